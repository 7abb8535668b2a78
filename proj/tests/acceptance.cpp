#include "pidchan/builtin.hpp"
#include "pidchan/channels.hpp"
#include "pidchan/measures.hpp"
#include "pidchan/optimize.hpp"
#include "pidchan/preorders.hpp"
#include "pidchan/probcore.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

using namespace pidchan;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool near(double x, double target, double tol) { return std::abs(x - target) <= tol; }

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", n, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::map<MeasureKind, MeasureResult> measures_of(const std::string& example) {
    return all_measures(joint_to_system(builtin_example(example)->table));
}

double value(const std::map<MeasureKind, MeasureResult>& m, MeasureKind k) { return m.at(k).value; }

bool has_flag(const MeasureResult& r, const std::string& f) {
    return std::find(r.flags.begin(), r.flags.end(), f) != r.flags.end();
}

void gate_examples() {
    const auto start = Clock::now();
    struct Row {
        const char* name;
        double preorder;
        double mmi;
    };
    const MeasureKind preorder_kinds[] = {MeasureKind::Degradation, MeasureKind::LessNoisy,
                                          MeasureKind::DegradationSupermodular, MeasureKind::MoreCapable};
    bool ok = true;
    std::ostringstream detail;
    for (const Row& row : {Row{"and", 0.311, 0.311}, Row{"sum", 0.5, 0.5}, Row{"unq", 0.0, 0.0},
                           Row{"copy-target", 0.0, 1.0}}) {
        const auto m = measures_of(row.name);
        bool row_ok = near(value(m, MeasureKind::Deterministic), 0.0, 1e-2) &&
                      near(value(m, MeasureKind::MinimumMI), row.mmi, 1e-2);
        for (MeasureKind k : preorder_kinds) row_ok = row_ok && near(value(m, k), row.preorder, 1e-2);
        detail << row.name << (row_ok ? " ok; " : " MISMATCH; ");
        ok = ok && row_ok;
    }
    const double t = seconds_since(start);
    detail << "runtime " << t << " s";
    report(1, ok && t < 60.0, "gate examples: " + detail.str());
}

void counterexample1() {
    const auto m = measures_of("cex1");
    const JointSystem sys = joint_to_system(builtin_example("cex1")->table);
    const double i2 = mutual_information(sys.target_marginal, sys.channels[1]);
    const double det = value(m, MeasureKind::Deterministic), d = value(m, MeasureKind::Degradation);
    const double ln = value(m, MeasureKind::LessNoisy), mc = value(m, MeasureKind::MoreCapable);
    const bool ok = near(i2, 0.004, 5e-4) && near(d, 0.002, 1e-3) && near(ln, 0.004, 5e-4) &&
                    near(mc, 0.004, 5e-4) && det == 0.0;
    std::ostringstream detail;
    detail << "I(T;Y2)=" << i2 << " d=" << d << " ln=" << ln << " mc=" << mc << " det=" << det;
    report(2, ok, "counterexample 1: " + detail.str());
}

void counterexample2() {
    const auto m = measures_of("cex2-ds");
    const JointSystem sys = joint_to_system(builtin_example("cex2-ds")->table);
    const double i4 = mutual_information(sys.target_marginal, sys.channels[1]);
    const double ds = value(m, MeasureKind::DegradationSupermodular), mc = value(m, MeasureKind::MoreCapable);
    const double d = value(m, MeasureKind::Degradation), mmi = value(m, MeasureKind::MinimumMI);
    const MeasureResult& ln = m.at(MeasureKind::LessNoisy);
    const bool ok = near(i4, 0.322, 5e-4) && near(ds, 0.322, 5e-4) && near(mc, 0.322, 5e-4) && near(d, 0.0, 1e-3) &&
                    near(mmi, 0.322, 5e-4) && ln.value >= 0.0 && ln.value <= mc + kInfoTol &&
                    has_flag(ln, "upper_bound");
    std::ostringstream detail;
    detail << "I(T;Y4)=" << i4 << " ds=" << ds << " mc=" << mc << " d=" << d << " mmi=" << mmi
           << " ln=" << ln.value << " (upper bound)";
    report(3, ok, "counterexample 2: " + detail.str());
}

void preorder_counterexamples() {
    const auto start = Clock::now();
    const auto [k1, k2] = counterexample1_channels();
    const auto [k3, k4] = counterexample2_channels();
    const bool deg = check_degradation(k2, k1).status == VerdictStatus::Falsified;

    const Dist p1(std::vector<double>{0, 0, 1}), q1(std::vector<double>{0.1, 0.1, 0.8});
    const Dist p2(std::vector<double>{0, 1, 0}), q2(std::vector<double>{0.1, 0, 0.9});
    const PreorderVerdict a = check_less_noisy_on(k3, k4, {{p1, q1}});
    const PreorderVerdict b = check_less_noisy_on(k4, k3, {{p2, q2}});
    const bool pairs = a.status == VerdictStatus::Falsified && verify(a, k3, k4) &&
                       b.status == VerdictStatus::Falsified && verify(b, k4, k3);
    const bool sampled = check_less_noisy_sampled(k3, k4).status == VerdictStatus::Falsified &&
                         check_less_noisy_sampled(k4, k3).status == VerdictStatus::Falsified;

    const PreorderVerdict s = check_supermodular_reachable(k4, k3, 1);
    bool seq = s.status == VerdictStatus::Holds && verify(s, k4, k3);
    if (seq) {
        const auto& steps = std::get<JoinMeetWitness>(*s.witness).steps;
        seq = steps.size() == 1 && steps[0] == JoinMeetStep{0, 1};
    }
    const double t = seconds_since(start);
    std::ostringstream detail;
    detail << "degradation " << (deg ? "falsified" : "NOT falsified") << ", witness pairs "
           << (pairs ? "falsify both orientations" : "FAILED") << ", grid search " << (sampled ? "agrees" : "DISAGREES")
           << ", JoinMeet sequence " << (seq ? "[(1,2)]" : "MISSING") << ", runtime " << t << " s";
    report(4, deg && pairs && sampled && seq && t < 5.0, "preorder verdicts: " + detail.str());
}

// Copy-target sources with a random block structure: each symbol of each
// source is assigned a block and only same-block cells carry mass.
JointTable random_block_sources(testing::Rng& rng) {
    const std::size_t n1 = 2 + rng() % 2, n2 = 2 + rng() % 2;
    const std::size_t blocks = 1 + rng() % 3;
    std::vector<std::size_t> b1(n1), b2(n2);
    for (auto& b : b1) b = rng() % blocks;
    for (auto& b : b2) b = rng() % blocks;
    std::vector<double> probs(n1 * n2);
    double total = 0.0;
    for (std::size_t x = 0; x < n1; ++x) {
        for (std::size_t y = 0; y < n2; ++y) {
            if (b1[x] != b2[y]) continue;
            probs[x * n2 + y] = -std::log(1.0 - testing::uniform01(rng));
            total += probs[x * n2 + y];
        }
    }
    if (total == 0.0) {
        probs[0] = 1.0;
        total = 1.0;
    }
    for (double& p : probs) p /= total;
    return JointTable({Alphabet::indexed(n1), Alphabet::indexed(n2)}, std::move(probs));
}

void copy_targets() {
    std::vector<JointTable> cases;
    cases.emplace_back(JointTable({Alphabet::indexed(2), Alphabet::indexed(2)}, {0.25, 0.25, 0.25, 0.25}));
    cases.emplace_back(
        JointTable({Alphabet::indexed(3), Alphabet::indexed(3)}, {0.2, 0, 0, 0, 0.3, 0, 0, 0, 0.5}));
    testing::Rng rng(2024);
    while (cases.size() < 25) cases.push_back(random_block_sources(rng));

    std::size_t matched = 0;
    double worst = 0.0;
    for (const auto& sources : cases) {
        const CopyTargetResult r = copy_target_measures(sources);
        worst = std::max(worst, std::abs(r.more_capable - r.common_information));
        if (r.matches) ++matched;
    }
    const double indep = copy_target_measures(cases[0]).more_capable;
    const double corr = copy_target_measures(cases[1]).more_capable;
    const double h1 = entropy(Dist(std::vector<double>{0.2, 0.3, 0.5}));
    const bool ok = matched == cases.size() && near(indep, 0.0, 1e-2) && near(corr, h1, 1e-2);
    std::ostringstream detail;
    detail << matched << "/" << cases.size() << " systems match, max |mc - C| = " << worst << ", independent "
           << indep << ", correlated " << corr << " vs H(Y1) " << h1;
    report(5, ok, "copy target mc = H(common variable): " + detail.str());
}

void axioms(const RandomSystemGenerator& gen) {
    bool ok = true;
    std::ostringstream detail;
    for (MeasureKind k : all_measure_kinds()) {
        const double tol = k == MeasureKind::MinimumMI ? 1e-9 : 1e-3;
        const AxiomReport r = check_wb_axioms(k, gen, 100, tol);
        detail << short_name(k) << " " << r.violations.size() << " violations; ";
        ok = ok && r.passed();
    }
    report(6, ok, "axioms on 100 systems per measure: " + detail.str());
}

void chain(const RandomSystemGenerator& gen) {
    const double tol = 1e-3;
    std::size_t bad = 0;
    double worst = 0.0;
    for (std::size_t trial = 0; trial < 100; ++trial) {
        const auto m = all_measures(gen(trial));
        const double v[] = {value(m, MeasureKind::Deterministic), value(m, MeasureKind::Degradation),
                            value(m, MeasureKind::LessNoisy), value(m, MeasureKind::MoreCapable),
                            value(m, MeasureKind::MinimumMI)};
        bool ok = true;
        for (std::size_t i = 0; i + 1 < 5; ++i) {
            worst = std::max(worst, v[i] - v[i + 1]);
            ok = ok && v[i] <= v[i + 1] + tol;
        }
        if (!ok) ++bad;
    }
    std::ostringstream detail;
    detail << bad << " of 100 systems out of order, largest inversion " << std::max(worst, 0.0);
    report(7, bad == 0, "det <= d <= ln <= mc <= mmi: " + detail.str());
}

void optimizer_sanity() {
    testing::Rng rng(8);
    const double h = 1e-5;
    double worst = 0.0;
    for (int point = 0; point < 50; ++point) {
        const std::size_t nt = 2 + point % 3, nq = 2 + (point / 3) % 3;
        const Dist p = testing::random_dist(rng, nt);
        Matrix K(nt, nq);
        for (std::size_t t = 0; t < nt; ++t) {
            const auto row = testing::random_simplex(rng, nq);
            for (std::size_t q = 0; q < nq; ++q) K(t, q) = (0.05 + 0.9 * row[q]) / (0.05 * nq + 0.9);
        }
        const Matrix g = mi_gradient(p, Channel(K));
        for (std::size_t t = 0; t < nt; ++t) {
            for (std::size_t q = 0; q < nq; ++q) {
                Matrix a = K, b = K;
                a(t, q) += h;
                b(t, q) -= h;
                const double fd =
                    (raw::mutual_information(p.probs(), a) - raw::mutual_information(p.probs(), b)) / (2.0 * h);
                worst = std::max(worst, std::abs(g(t, q) - fd) / std::max(std::abs(fd), 1e-3));
            }
        }
    }
    double worst_h = 0.0;
    for (std::size_t nt = 1; nt <= 4; ++nt) {
        for (int trial = 0; trial < 5; ++trial) {
            const Dist p = testing::random_dist(rng, nt, 0.2);
            OptimizerConfig c;
            c.support_size = nt;
            const auto r = maximize_mi(p, unconstrained_oracle(), c);
            worst_h = std::max(worst_h, std::abs(r.value - entropy(p)));
        }
    }
    std::ostringstream detail;
    detail << "max gradient rel. error " << worst << ", max |max MI - H(T)| " << worst_h;
    report(8, worst < 1e-4 && worst_h <= 1e-3, "optimizer sanity: " + detail.str());
}

}  // namespace

int main() {
    gate_examples();
    counterexample1();
    counterexample2();
    preorder_counterexamples();
    copy_targets();
    const RandomSystemGenerator gen;
    axioms(gen);
    chain(gen);
    optimizer_sanity();
    return failures == 0 ? 0 : 1;
}

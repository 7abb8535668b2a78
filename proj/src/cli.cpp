#include "pidchan/cli.hpp"

#include "pidchan/builtin.hpp"
#include "pidchan/distfile.hpp"
#include "pidchan/measures.hpp"
#include "pidchan/preorders.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace pidchan {

using nlohmann::ordered_json;

double report_value(double v) {
    if (!std::isfinite(v)) return v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ordered_json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return report_value(v);
}

ordered_json matrix_json(const Matrix& m) {
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (double v : m.row(r)) row.push_back(num(v));
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json dist_json(const Dist& d) {
    ordered_json a = ordered_json::array();
    for (double v : d.probs()) a.push_back(num(v));
    return a;
}

std::string fmt(double v, int digits = 6) {
    if (!std::isfinite(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, std::abs(v) < 0.5 * std::pow(10.0, -digits) ? 0.0 : v);
    return buf;
}

std::string read_text(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("PID_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') throw InputError(std::string("PID_SEED is not an integer: ") + env);
        return v;
    }
    return OptimizerConfig{}.seed;
}

struct SolverFlags {
    std::optional<std::uint64_t> seed;
    std::size_t support = 0;
    std::size_t starts = OptimizerConfig{}.num_starts;
    std::size_t grid = kDefaultGridResolution;
    std::size_t depth = kDefaultDsDepth;
    std::size_t max_ops = kDefaultJoinMeetOps;

    MeasureOptions options() const {
        MeasureOptions o;
        o.optimizer.seed = resolve_seed(seed);
        o.optimizer.support_size = support;
        o.optimizer.num_starts = starts;
        o.grid_resolution = grid;
        o.ds_depth = depth;
        o.joinmeet_max_ops = max_ops;
        validate(o.optimizer);
        return o;
    }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
    cmd->add_option("--seed", f.seed, "Optimizer seed (default: $PID_SEED or 20230417)");
    cmd->add_option("--support", f.support, "Size of the optimization variable Q (0 = auto)");
    cmd->add_option("--starts", f.starts, "Number of random starts")->check(CLI::PositiveNumber);
    cmd->add_option("--grid", f.grid, "Simplex grid resolution for sampled constraints")->check(CLI::PositiveNumber);
    cmd->add_option("--depth", f.depth, "Depth of the ds chain search");
    cmd->add_option("--max-ops", f.max_ops, "JoinMeet operations per closure");
}

ordered_json options_json(const MeasureOptions& o) {
    return {{"seed", o.optimizer.seed},        {"support", o.optimizer.support_size},
            {"starts", o.optimizer.num_starts}, {"grid", o.grid_resolution},
            {"depth", o.ds_depth},              {"max_ops", o.joinmeet_max_ops}};
}

JointTable load_table(const std::string& file, const std::string& example) {
    if (!example.empty()) {
        auto ex = builtin_example(example);
        if (!ex) throw InputError("unknown example '" + example + "'");
        return ex->table;
    }
    if (file.empty()) throw InputError("no input: give a distribution file or --example");
    return parse_distribution(read_text(file)).table;
}

std::vector<MeasureKind> selected_measures(const std::string& name) {
    if (name == "all") return all_measure_kinds();
    auto k = parse_measure(name);
    if (!k) throw InputError("unknown measure '" + name + "'");
    return {*k};
}

ordered_json flags_json(const std::vector<std::string>& flags) { return ordered_json(flags); }

int cmd_decompose(const std::string& file, const std::string& example, const std::string& measure,
                  const SolverFlags& flags, bool json, std::ostream& out) {
    const JointTable table = load_table(file, example);
    const MeasureOptions options = flags.options();
    const JointSystem sys = joint_to_system(table);
    const auto kinds = selected_measures(measure);

    std::map<MeasureKind, MeasureResult> results;
    if (kinds.size() > 1) {
        results = all_measures(sys, options);
    } else {
        results.emplace(kinds[0], ii_measure(sys, kinds[0], options));
    }
    const bool full = sys.num_sources() == 2;

    ordered_json rows = ordered_json::array();
    std::ostringstream text;
    text << "sources: " << sys.num_sources() << "   I(T;Y) = " << fmt(mutual_information(sys.target_marginal,
                                                                                        joint_source_channel(sys)))
         << '\n';
    for (std::size_t i = 0; i < sys.num_sources(); ++i) {
        text << "I(T;Y" << i + 1 << ") = " << fmt(mutual_information(sys.target_marginal, sys.channels[i])) << '\n';
    }
    text << (full ? "measure  R          U1         U2         S          flags\n" : "measure  R          flags\n");
    for (MeasureKind k : kinds) {
        const MeasureResult& r = results.at(k);
        ordered_json row{{"measure", short_name(k)}, {"redundancy", num(r.value)}};
        std::ostringstream line;
        line << std::left << std::setw(9) << short_name(k) << std::setw(11) << fmt(r.value);
        if (full) {
            const Decomposition d = decomposition_from(sys, r);
            row["unique"] = {num(d.unique[0]), num(d.unique[1])};
            row["synergy"] = num(d.synergy);
            row["total"] = num(d.total);
            line << std::setw(11) << fmt(d.unique[0]) << std::setw(11) << fmt(d.unique[1]) << std::setw(11)
                 << fmt(d.synergy);
        }
        row["flags"] = flags_json(r.flags);
        std::string fl;
        for (const auto& f : r.flags) fl += (fl.empty() ? "" : ",") + f;
        line << fl;
        std::string s = line.str();
        while (!s.empty() && s.back() == ' ') s.pop_back();
        text << s << '\n';
        rows.push_back(std::move(row));
    }
    if (json) {
        ordered_json doc{{"command", "decompose"},
                         {"input", example.empty() ? file : "example:" + example},
                         {"options", options_json(options)},
                         {"sources", sys.num_sources()},
                         {"total", num(mutual_information(sys.target_marginal, joint_source_channel(sys)))},
                         {"results", std::move(rows)}};
        out << doc.dump(2) << '\n';
    } else {
        out << text.str();
    }
    return kExitOk;
}

std::optional<Relation> parse_relation(const std::string& s) {
    if (s == "d") return Relation::Degradation;
    if (s == "ln") return Relation::LessNoisy;
    if (s == "mc") return Relation::MoreCapable;
    if (s == "s") return Relation::Supermodular;
    if (s == "ds") return Relation::DegradationSupermodular;
    return std::nullopt;
}

ordered_json witness_json(const PreorderVerdict& v) {
    ordered_json w = nullptr;
    if (!v.witness) return w;
    auto steps_json = [](const std::vector<JoinMeetStep>& steps) {
        ordered_json a = ordered_json::array();
        for (const auto& s : steps) a.push_back({s.max_col + 1, s.min_col + 1});
        return a;
    };
    std::visit(
        [&](const auto& x) {
            using X = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<X, GarblingWitness>) {
                w = {{"type", "garbling"}, {"matrix", matrix_json(x.garbling)}, {"residual", num(x.residual)}};
            } else if constexpr (std::is_same_v<X, JoinMeetWitness>) {
                w = {{"type", "joinmeet"}, {"steps", steps_json(x.steps)}};
            } else {
                ordered_json links = ordered_json::array();
                for (const auto& l : x.links) {
                    ordered_json link{{"kind", l.kind == ChainLink::Kind::Degradation ? "degradation" : "joinmeet"},
                                      {"channel", matrix_json(l.channel.matrix())}};
                    if (l.garbling) link["garbling"] = matrix_json(*l.garbling);
                    if (!l.steps.empty()) link["steps"] = steps_json(l.steps);
                    links.push_back(std::move(link));
                }
                w = {{"type", "chain"}, {"links", std::move(links)}};
            }
        },
        *v.witness);
    return w;
}

ordered_json counterexample_json(const PreorderVerdict& v) {
    if (!v.counterexample) return nullptr;
    const Counterexample& c = *v.counterexample;
    ordered_json j = ordered_json::object();
    if (c.residual) j["residual"] = num(*c.residual);
    if (c.p) j["p"] = dist_json(*c.p);
    if (c.q) j["q"] = dist_json(*c.q);
    if (c.p) {
        j["violating_side"] = num(c.violating_side);
        j["bound_side"] = num(c.bound_side);
    }
    return j;
}

int cmd_preorder(const std::string& file, const std::string& channels_file, const std::string& example,
                 const std::string& relation, std::size_t a, std::size_t b, const SolverFlags& flags, bool json,
                 std::ostream& out) {
    const auto rel = parse_relation(relation);
    if (!rel) throw InputError("unknown relation '" + relation + "'");
    std::vector<Channel> channels;
    std::string input;
    const std::string path = channels_file.empty() ? file : channels_file;
    if (example.empty() && !path.empty()) {
        const std::string text = read_text(path);
        input = path;
        if (!channels_file.empty() || looks_like_channel_file(text)) {
            for (auto& nc : parse_channels(text)) channels.push_back(std::move(nc.channel));
        } else {
            channels = restrict_to_support(joint_to_system(parse_distribution(text).table)).channels;
        }
    } else {
        input = "example:" + example;
        channels = restrict_to_support(joint_to_system(load_table("", example))).channels;
    }
    if (a < 1 || b < 1 || a > channels.size() || b > channels.size()) {
        throw InputError("channel indices out of range (1.." + std::to_string(channels.size()) + ")");
    }
    const Channel& A = channels[a - 1];
    const Channel& B = channels[b - 1];
    if (A.num_inputs() != B.num_inputs()) throw InputError("channels have different input sizes");

    PreorderVerdict v = [&] {
        switch (*rel) {
        case Relation::Degradation: return check_degradation(A, B);
        case Relation::LessNoisy: return check_less_noisy_sampled(B, A, flags.grid);
        case Relation::MoreCapable: return check_more_capable_sampled(A, B, flags.grid);
        case Relation::Supermodular: return check_supermodular_reachable(A, B, flags.max_ops);
        case Relation::DegradationSupermodular: return check_ds_bounded(A, B, flags.depth, flags.max_ops);
        }
        throw std::logic_error("unknown relation");
    }();

    if (json) {
        ordered_json doc{{"command", "preorder"},
                         {"input", input},
                         {"relation", relation},
                         {"a", a},
                         {"b", b},
                         {"status", to_string(v.status)},
                         {"verified", verify(v, *rel == Relation::LessNoisy ? B : A, *rel == Relation::LessNoisy ? A : B)},
                         {"witness", witness_json(v)},
                         {"counterexample", counterexample_json(v)},
                         {"budget",
                          {{"grid", v.budget.grid_resolution},
                           {"samples", v.budget.samples},
                           {"max_ops", v.budget.max_ops},
                           {"depth", v.budget.depth},
                           {"states_explored", v.budget.states_explored}}}};
        out << doc.dump(2) << '\n';
    } else {
        out << "K" << a << " <=_" << relation << " K" << b << ": " << describe(v) << '\n';
    }
    switch (v.status) {
    case VerdictStatus::Holds: return kExitOk;
    case VerdictStatus::Falsified: return kExitFalsified;
    case VerdictStatus::Unknown: return kExitUnknown;
    }
    return kExitUnknown;
}

int cmd_examples(const std::string& name, const std::string& output, bool table, const SolverFlags& flags,
                 bool json, std::ostream& out) {
    if (name.empty() || name == "list") {
        for (const auto& n : builtin_names()) out << n << '\t' << builtin_example(n)->description << '\n';
        return kExitOk;
    }
    auto ex = builtin_example(name);
    if (!ex) throw InputError("unknown example '" + name + "'");
    const std::string text = "# " + ex->description + "\n" + write_distribution(ex->table);
    if (!output.empty()) {
        std::ofstream f(output);
        if (!f) throw InputError("cannot write " + output);
        f << text;
    } else if (!table) {
        out << text;
    }
    if (table) return cmd_decompose("", name, "all", flags, json, out);
    return kExitOk;
}

int cmd_axioms(const std::string& measure, std::size_t trials, const SolverFlags& flags, double tol, bool json,
               std::ostream& out) {
    const MeasureOptions options = flags.options();
    RandomSystemGenerator gen;
    gen.seed = options.optimizer.seed;
    ordered_json reports = ordered_json::array();
    bool ok = true;
    for (MeasureKind k : selected_measures(measure)) {
        const double t = tol > 0.0 ? tol : (k == MeasureKind::MinimumMI ? 1e-9 : 1e-3);
        const AxiomReport r = check_wb_axioms(k, gen, trials, t, options);
        ok = ok && r.passed();
        ordered_json violations = ordered_json::array();
        for (const auto& v : r.violations) {
            violations.push_back({{"trial", v.trial},
                                  {"axiom", v.axiom},
                                  {"lhs", num(v.lhs)},
                                  {"rhs", num(v.rhs)},
                                  {"system", v.system}});
        }
        if (!json) {
            out << short_name(k) << ": " << r.trials << " systems, " << r.checks << " checks, "
                << r.violations.size() << " violations (tol " << t << ")\n";
            for (const auto& v : r.violations) {
                out << "  trial " << v.trial << " " << v.axiom << ": " << fmt(v.lhs, 9) << " vs " << fmt(v.rhs, 9)
                    << '\n'
                    << v.system;
            }
        }
        reports.push_back({{"measure", short_name(k)},
                           {"tolerance", t},
                           {"trials", r.trials},
                           {"checks", r.checks},
                           {"violations", std::move(violations)}});
    }
    if (json) {
        ordered_json doc{{"command", "axioms"},
                         {"options", options_json(options)},
                         {"generator_seed", gen.seed},
                         {"reports", std::move(reports)}};
        out << doc.dump(2) << '\n';
    }
    return ok ? kExitOk : kExitFalsified;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Partial information decomposition with channel-preorder redundancy measures", "pidc"};
    app.require_subcommand(1);
    bool json = false;
    SolverFlags flags;

    std::string file, example, measure = "all";
    auto* dec = app.add_subcommand("decompose", "Redundancy, unique and synergistic information");
    dec->add_option("file", file, "Distribution file ('-' for stdin)");
    dec->add_option("--example", example, "Use a builtin example instead of a file");
    dec->add_option("--measure", measure, "gh|det|d|ln|mc|ds|mmi|all");
    dec->add_flag("--json", json, "Emit a JSON report");
    add_solver_flags(dec, flags);

    std::string pfile, channels_file, pexample, relation = "d";
    std::size_t a = 2, b = 1;
    auto* pre = app.add_subcommand("preorder", "Check K_a <= K_b in a channel preorder");
    pre->add_option("file", pfile, "Distribution or channel file");
    pre->add_option("--channels", channels_file, "Channel file");
    pre->add_option("--example", pexample, "Use the sources of a builtin example");
    pre->add_option("--relation", relation, "d|ln|mc|s|ds");
    pre->add_option("--a", a, "Index of the lower channel (1-based)");
    pre->add_option("--b", b, "Index of the upper channel (1-based)");
    pre->add_flag("--json", json, "Emit a JSON report");
    add_solver_flags(pre, flags);

    std::string name, output;
    bool table = false;
    auto* exs = app.add_subcommand("examples", "Write a builtin example as a distribution file");
    exs->add_option("name", name, "and|sum|copy-target|unq|cex1|cex2-ds|list");
    exs->add_option("-o,--output", output, "Output path");
    exs->add_flag("--table", table, "Also print the decomposition for every measure");
    exs->add_flag("--json", json, "Emit a JSON report with --table");
    add_solver_flags(exs, flags);

    std::string ameasure = "all";
    std::size_t trials = 100;
    double tol = 0.0;
    auto* ax = app.add_subcommand("axioms", "Williams-Beer axiom suite on random systems");
    ax->add_option("--measure", ameasure, "gh|det|d|ln|mc|ds|mmi|all");
    ax->add_option("--trials", trials, "Number of random systems")->check(CLI::PositiveNumber);
    ax->add_option("--tol", tol, "Tolerance (default 1e-3, 1e-9 for mmi)");
    ax->add_flag("--json", json, "Emit a JSON report");
    add_solver_flags(ax, flags);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitMalformed;
    }

    try {
        if (*dec) return cmd_decompose(file, example, measure, flags, json, out);
        if (*pre) return cmd_preorder(pfile, channels_file, pexample, relation, a, b, flags, json, out);
        if (*exs) return cmd_examples(name, output, table, flags, json, out);
        if (*ax) return cmd_axioms(ameasure, trials, flags, tol, json, out);
    } catch (const OptimizerError& e) {
        err << "optimizer failure: " << e.what() << '\n';
        return kExitOptimizer;
    } catch (const ParseError& e) {
        err << "malformed input: " << e.what() << '\n';
        return kExitMalformed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitMalformed;
    }
    return kExitMalformed;
}

}  // namespace pidchan

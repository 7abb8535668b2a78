#include "pidchan/probcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pidchan {

namespace raw {

double entropy(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) h -= p * std::log2(p);
    }
    return std::max(h, 0.0);
}

void output_dist(std::span<const double> p, const Matrix& K, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t t = 0; t < K.rows(); ++t) {
        const double pt = p[t];
        if (pt == 0.0) continue;
        const auto row = K.row(t);
        for (std::size_t y = 0; y < K.cols(); ++y) out[y] += pt * row[y];
    }
}

double mutual_information(std::span<const double> p, const Matrix& K) {
    double small[32];
    std::vector<double> big;
    std::span<double> r;
    if (K.cols() <= 32) {
        r = std::span<double>(small, K.cols());
    } else {
        big.resize(K.cols());
        r = big;
    }
    output_dist(p, K, r);
    double mi = 0.0;
    for (std::size_t t = 0; t < K.rows(); ++t) {
        const double pt = p[t];
        if (pt == 0.0) continue;
        const auto row = K.row(t);
        for (std::size_t y = 0; y < K.cols(); ++y) {
            const double k = row[y];
            if (k > 0.0) mi += pt * k * std::log2(k / r[y]);
        }
    }
    return std::max(mi, 0.0);
}

double chi_square(std::span<const double> u, std::span<const double> v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (v[i] == 0.0) {
            if (u[i] > 0.0) return std::numeric_limits<double>::infinity();
            continue;
        }
        const double d = u[i] - v[i];
        acc += d * d / v[i];
    }
    return acc;
}

}  // namespace raw

double entropy(std::span<const double> probs) { return raw::entropy(probs); }

double entropy(const Dist& d) { return raw::entropy(d.probs()); }

double mutual_information(const Dist& p_t, const Channel& K) {
    if (p_t.alphabet() != K.input()) throw AlphabetMismatch("mutual_information: p_t and channel input differ");
    return raw::mutual_information(p_t.probs(), K.matrix());
}

double specific_information(const Dist& p_t, const Channel& K, std::size_t t) {
    if (p_t.alphabet() != K.input()) throw AlphabetMismatch("specific_information: p_t and channel input differ");
    if (t >= p_t.size()) throw std::out_of_range("specific_information: outcome index");
    const double pt = p_t[t];
    if (pt <= 0.0) throw std::domain_error("specific_information: outcome has zero probability");
    std::vector<double> r(K.num_outputs());
    raw::output_dist(p_t.probs(), K.matrix(), r);
    double acc = 0.0;
    for (std::size_t y = 0; y < K.num_outputs(); ++y) {
        const double k = K(t, y);
        if (k <= 0.0) continue;
        // p(t|y) / p(t) = K[t,y] / p(y)
        acc += k * std::log2(k / r[y]);
    }
    return acc;
}

double chi_square(const Dist& u, const Dist& v) {
    if (u.alphabet() != v.alphabet()) throw AlphabetMismatch("chi_square: alphabets differ");
    return raw::chi_square(u.probs(), v.probs());
}

namespace {

void grid_recurse(std::size_t dim, std::size_t m, std::size_t pos, std::size_t remaining,
                  std::vector<std::size_t>& counts, std::vector<std::vector<std::size_t>>& out) {
    if (pos + 1 == dim) {
        counts[pos] = remaining;
        out.push_back(counts);
        return;
    }
    for (std::size_t c = remaining + 1; c-- > 0;) {
        counts[pos] = c;
        grid_recurse(dim, m, pos + 1, remaining - c, counts, out);
    }
}

}  // namespace

std::vector<Dist> simplex_grid(const Alphabet& alphabet, std::size_t resolution) {
    const std::size_t dim = alphabet.size();
    if (resolution == 0) throw std::invalid_argument("simplex_grid: resolution must be positive");
    std::vector<std::vector<std::size_t>> counts;
    std::vector<std::size_t> scratch(dim, 0);
    grid_recurse(dim, resolution, 0, resolution, scratch, counts);
    std::vector<Dist> grid;
    grid.reserve(counts.size());
    const double m = static_cast<double>(resolution);
    for (const auto& c : counts) {
        std::vector<double> probs(dim);
        for (std::size_t i = 0; i < dim; ++i) probs[i] = static_cast<double>(c[i]) / m;
        grid.emplace_back(alphabet, std::move(probs));
    }
    return grid;
}

std::vector<Dist> simplex_grid(std::size_t dim, std::size_t resolution) {
    if (dim == 0) throw std::invalid_argument("simplex_grid: dimension must be positive");
    return simplex_grid(Alphabet::indexed(dim), resolution);
}

JointTable::JointTable(std::vector<Alphabet> axes, std::vector<double> probs)
    : axes_(std::move(axes)), probs_(std::move(probs)) {
    if (axes_.empty()) throw std::invalid_argument("joint table needs at least one axis");
    std::size_t total = 1;
    for (const auto& a : axes_) {
        shape_.push_back(a.size());
        total *= a.size();
    }
    if (probs_.size() != total) throw std::invalid_argument("joint table size differs from product of alphabet sizes");
    double sum = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("joint table: negative or non-finite entry");
        sum += p;
    }
    if (sum == 0.0) throw std::invalid_argument("joint table: all entries are zero");
    if (std::abs(sum - 1.0) > kProbTol) throw std::invalid_argument("joint table: entries sum to " + std::to_string(sum));
}

std::size_t JointTable::flat_index(std::span<const std::size_t> index) const {
    if (index.size() != shape_.size()) throw std::invalid_argument("joint table index has wrong rank");
    std::size_t flat = 0;
    for (std::size_t a = 0; a < shape_.size(); ++a) {
        if (index[a] >= shape_[a]) throw std::out_of_range("joint table index");
        flat = flat * shape_[a] + index[a];
    }
    return flat;
}

std::vector<std::size_t> JointTable::unflatten(std::size_t flat) const {
    std::vector<std::size_t> index(shape_.size());
    for (std::size_t a = shape_.size(); a-- > 0;) {
        index[a] = flat % shape_[a];
        flat /= shape_[a];
    }
    return index;
}

Dist JointTable::marginal(std::size_t axis) const {
    if (axis >= rank()) throw std::out_of_range("joint table axis");
    std::vector<double> m(shape_[axis], 0.0);
    for (std::size_t f = 0; f < probs_.size(); ++f) m[unflatten(f)[axis]] += probs_[f];
    return Dist(axes_[axis], std::move(m));
}

JointTable JointTable::marginal(std::span<const std::size_t> keep) const {
    std::vector<Alphabet> axes;
    std::size_t total = 1;
    for (std::size_t a : keep) {
        if (a >= rank()) throw std::out_of_range("joint table axis");
        axes.push_back(axes_[a]);
        total *= shape_[a];
    }
    std::vector<double> m(total, 0.0);
    for (std::size_t f = 0; f < probs_.size(); ++f) {
        const auto idx = unflatten(f);
        std::size_t g = 0;
        for (std::size_t a : keep) g = g * shape_[a] + idx[a];
        m[g] += probs_[f];
    }
    return JointTable(std::move(axes), std::move(m));
}

bool JointSystem::fully_supported() const {
    return std::all_of(supported.begin(), supported.end(), [](bool b) { return b; });
}

JointSystem joint_to_system(const JointTable& table) {
    const std::size_t n = table.rank() - 1;
    const Dist p_t = table.marginal(0);
    const std::size_t nt = p_t.size();
    std::vector<bool> supported(nt);
    for (std::size_t t = 0; t < nt; ++t) supported[t] = p_t[t] > 0.0;

    std::vector<Channel> channels;
    std::vector<Alphabet> sources;
    for (std::size_t i = 1; i <= n; ++i) {
        const std::size_t axes[2] = {0, i};
        const JointTable pair = table.marginal(axes);
        const std::size_t ny = table.axes()[i].size();
        Matrix K(nt, ny);
        for (std::size_t t = 0; t < nt; ++t) {
            if (!supported[t]) {
                for (std::size_t y = 0; y < ny; ++y) K(t, y) = 1.0 / static_cast<double>(ny);
                continue;
            }
            double rowsum = 0.0;
            for (std::size_t y = 0; y < ny; ++y) rowsum += pair.probs()[t * ny + y];
            for (std::size_t y = 0; y < ny; ++y) K(t, y) = pair.probs()[t * ny + y] / rowsum;
        }
        channels.emplace_back(table.axes()[0], table.axes()[i], std::move(K));
        sources.push_back(table.axes()[i]);
    }
    return JointSystem{p_t, std::move(channels), std::move(sources), std::move(supported), table};
}

JointTable conditionally_independent_joint(const Dist& p_t, std::span<const Channel> channels) {
    std::vector<Alphabet> axes{p_t.alphabet()};
    for (const auto& K : channels) {
        if (K.input() != p_t.alphabet()) throw AlphabetMismatch("channel input differs from target alphabet");
        axes.push_back(K.output());
    }
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.size();
    std::vector<double> probs(total, 0.0);
    std::vector<std::size_t> idx(axes.size(), 0);
    for (std::size_t f = 0; f < total; ++f) {
        std::size_t rem = f;
        for (std::size_t a = axes.size(); a-- > 0;) {
            idx[a] = rem % axes[a].size();
            rem /= axes[a].size();
        }
        double p = p_t[idx[0]];
        for (std::size_t i = 0; i < channels.size() && p != 0.0; ++i) p *= channels[i](idx[0], idx[i + 1]);
        probs[f] = p;
    }
    // Products of decimal literals drift by a few ulps; absorb that here.
    const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
    for (double& p : probs) p /= sum;
    return JointTable(std::move(axes), std::move(probs));
}

Channel joint_source_channel(const JointSystem& system) {
    const JointTable& j = system.joint;
    const std::size_t nt = j.shape()[0];
    const std::size_t ny = j.probs().size() / nt;
    std::vector<std::string> labels;
    labels.reserve(ny);
    for (std::size_t c = 0; c < ny; ++c) {
        auto idx = j.unflatten(c);  // index 0 is t = 0
        std::string label;
        for (std::size_t a = 1; a < j.rank(); ++a) {
            if (a > 1) label += ',';
            label += j.axes()[a].label(idx[a]);
        }
        labels.push_back(label.empty() ? std::to_string(c) : label);
    }
    Matrix K(nt, ny);
    for (std::size_t t = 0; t < nt; ++t) {
        double rowsum = 0.0;
        for (std::size_t c = 0; c < ny; ++c) rowsum += j.probs()[t * ny + c];
        for (std::size_t c = 0; c < ny; ++c) {
            K(t, c) = rowsum > 0.0 ? j.probs()[t * ny + c] / rowsum : 1.0 / static_cast<double>(ny);
        }
    }
    return Channel(j.axes()[0], Alphabet(std::move(labels)), std::move(K));
}

JointSystem restrict_to_support(const JointSystem& system) {
    if (system.fully_supported()) return system;
    const JointTable& j = system.joint;
    const std::size_t nt = j.shape()[0];
    const std::size_t block = j.probs().size() / nt;
    std::vector<std::string> labels;
    std::vector<double> probs;
    for (std::size_t t = 0; t < nt; ++t) {
        if (!system.supported[t]) continue;
        labels.push_back(j.axes()[0].label(t));
        probs.insert(probs.end(), j.probs().begin() + t * block, j.probs().begin() + (t + 1) * block);
    }
    std::vector<Alphabet> axes = j.axes();
    axes[0] = Alphabet(std::move(labels));
    return joint_to_system(JointTable(std::move(axes), std::move(probs)));
}

std::vector<double> reconstruct_pair(const JointSystem& system, std::size_t source) {
    const Channel& K = system.channels.at(source);
    std::vector<double> out(K.num_inputs() * K.num_outputs());
    for (std::size_t t = 0; t < K.num_inputs(); ++t) {
        for (std::size_t y = 0; y < K.num_outputs(); ++y) {
            out[t * K.num_outputs() + y] = system.target_marginal[t] * K(t, y);
        }
    }
    return out;
}

}  // namespace pidchan

#include "pidchan/channels.hpp"

#include "pidchan/probcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pidchan {

Channel compose(const Channel& Kab, const Channel& Kbc) {
    if (Kab.output() != Kbc.input()) throw AlphabetMismatch("compose: output alphabet of the first channel differs from input of the second");
    Matrix m = Kab.matrix() * Kbc.matrix();
    // Renormalize rounding drift so long chains stay row-stochastic.
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        double s = 0.0;
        for (double v : row) s += v;
        for (double& v : row) v /= s;
    }
    return Channel(Kab.input(), Kbc.output(), std::move(m));
}

Dist output_dist(const Dist& p, const Channel& K) {
    if (p.alphabet() != K.input()) throw AlphabetMismatch("output_dist: distribution and channel input differ");
    std::vector<double> out(K.num_outputs());
    raw::output_dist(p.probs(), K.matrix(), out);
    double s = 0.0;
    for (double v : out) s += v;
    for (double& v : out) v /= s;
    return Dist(K.output(), std::move(out));
}

Channel join_meet(const Channel& K, std::size_t max_col, std::size_t min_col) {
    if (max_col == min_col) throw std::invalid_argument("join_meet: column indices must differ");
    if (max_col >= K.num_outputs() || min_col >= K.num_outputs()) throw std::out_of_range("join_meet: column index");
    Matrix m = K.matrix();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double a = m(r, max_col);
        const double b = m(r, min_col);
        m(r, max_col) = std::max(a, b);
        m(r, min_col) = std::min(a, b);
    }
    return Channel(K.input(), K.output(), std::move(m));
}

Channel pad_outputs(const Channel& K, std::size_t outputs) {
    if (outputs < K.num_outputs()) throw std::invalid_argument("pad_outputs: cannot shrink a channel");
    if (outputs == K.num_outputs()) return K;
    std::vector<std::string> labels = K.output().labels();
    for (std::size_t extra = 0; labels.size() < outputs; ++extra) {
        std::string l = "pad" + std::to_string(extra);
        if (!K.output().index_of(l)) labels.push_back(std::move(l));
    }
    Matrix m(K.num_inputs(), outputs);
    for (std::size_t r = 0; r < K.num_inputs(); ++r) {
        std::copy(K.row(r).begin(), K.row(r).end(), m.row(r).begin());
    }
    return Channel(K.input(), Alphabet(std::move(labels)), std::move(m));
}

bool has_identical_rows(const Channel& K, double tol) {
    for (std::size_t r = 1; r < K.num_inputs(); ++r) {
        for (std::size_t c = 0; c < K.num_outputs(); ++c) {
            if (std::abs(K(r, c) - K(0, c)) > tol) return false;
        }
    }
    return true;
}

}  // namespace pidchan

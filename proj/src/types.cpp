#include "pidchan/types.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace pidchan {

namespace {

void require_probabilities(std::span<const double> probs, const char* what) {
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument(std::string(what) + ": negative or non-finite probability");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > kProbTol) {
        throw std::invalid_argument(std::string(what) + ": probabilities sum to " + std::to_string(total));
    }
}

}  // namespace

Alphabet::Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw std::invalid_argument("alphabet must contain at least one symbol");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
        if (!seen.insert(l).second) throw std::invalid_argument("duplicate alphabet label '" + l + "'");
    }
}

Alphabet Alphabet::indexed(std::size_t n) {
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
    return Alphabet(std::move(labels));
}

std::optional<std::size_t> Alphabet::index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
}

Dist::Dist(Alphabet alphabet, std::vector<double> probs)
    : alphabet_(std::move(alphabet)), probs_(std::move(probs)) {
    if (probs_.size() != alphabet_.size()) throw AlphabetMismatch("distribution length differs from alphabet size");
    require_probabilities(probs_, "distribution");
}

Dist::Dist(std::vector<double> probs) : Dist(Alphabet::indexed(probs.size()), probs) {}

Dist Dist::uniform(Alphabet alphabet) {
    const std::size_t n = alphabet.size();
    return Dist(std::move(alphabet), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Dist Dist::point_mass(Alphabet alphabet, std::size_t index) {
    std::vector<double> probs(alphabet.size(), 0.0);
    probs.at(index) = 1.0;
    return Dist(std::move(alphabet), std::move(probs));
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols()) throw std::invalid_argument("ragged matrix rows");
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    return worst;
}

Channel::Channel(Alphabet input, Alphabet output, Matrix rows)
    : input_(std::move(input)), output_(std::move(output)), rows_(std::move(rows)) {
    if (rows_.rows() != input_.size() || rows_.cols() != output_.size()) {
        throw AlphabetMismatch("channel matrix shape differs from its alphabets");
    }
    for (std::size_t x = 0; x < rows_.rows(); ++x) require_probabilities(rows_.row(x), "channel row");
}

Channel::Channel(Matrix rows)
    : Channel(Alphabet::indexed(rows.rows()), Alphabet::indexed(rows.cols()), rows) {}

Channel Channel::from_rows(const std::vector<std::vector<double>>& rows) {
    return Channel(Matrix::from_rows(rows));
}

Channel Channel::identity(const Alphabet& alphabet) {
    Matrix m(alphabet.size(), alphabet.size());
    for (std::size_t i = 0; i < alphabet.size(); ++i) m(i, i) = 1.0;
    return Channel(alphabet, alphabet, std::move(m));
}

Channel Channel::constant(const Alphabet& input, const Alphabet& output, std::span<const double> row) {
    if (row.size() != output.size()) throw AlphabetMismatch("constant channel row has wrong length");
    Matrix m(input.size(), output.size());
    for (std::size_t x = 0; x < input.size(); ++x) std::copy(row.begin(), row.end(), m.row(x).begin());
    return Channel(input, output, std::move(m));
}

}  // namespace pidchan

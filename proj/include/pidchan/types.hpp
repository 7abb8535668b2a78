#pragma once

// Core value types shared by every module: labeled alphabets, probability
// vectors, dense matrices and row-stochastic channels.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pidchan {

/// Validation tolerance for probability sums.
inline constexpr double kProbTol = 1e-9;
/// Tolerance for equality of information quantities, in bits.
inline constexpr double kInfoTol = 1e-6;

class Alphabet {
public:
    explicit Alphabet(std::vector<std::string> labels);

    /// Labels "0", "1", ..., "n-1".
    static Alphabet indexed(std::size_t n);

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    std::optional<std::size_t> index_of(const std::string& label) const;

    bool operator==(const Alphabet&) const = default;

private:
    std::vector<std::string> labels_;
};

class Dist {
public:
    Dist(Alphabet alphabet, std::vector<double> probs);
    /// Indexed alphabet of matching size.
    explicit Dist(std::vector<double> probs);

    static Dist uniform(Alphabet alphabet);
    static Dist point_mass(Alphabet alphabet, std::size_t index);

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    std::span<const double> probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }

    bool operator==(const Dist&) const = default;

private:
    Alphabet alphabet_;
    std::vector<double> probs_;
};

/// Dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Row-stochastic matrix K[x, y] = p(y | x) with labeled input and output
/// alphabets.
class Channel {
public:
    Channel(Alphabet input, Alphabet output, Matrix rows);
    /// Indexed alphabets sized from the matrix.
    explicit Channel(Matrix rows);
    static Channel from_rows(const std::vector<std::vector<double>>& rows);

    static Channel identity(const Alphabet& alphabet);
    /// Every row equal to `row`.
    static Channel constant(const Alphabet& input, const Alphabet& output, std::span<const double> row);

    const Alphabet& input() const noexcept { return input_; }
    const Alphabet& output() const noexcept { return output_; }
    const Matrix& matrix() const noexcept { return rows_; }
    std::size_t num_inputs() const noexcept { return rows_.rows(); }
    std::size_t num_outputs() const noexcept { return rows_.cols(); }
    double operator()(std::size_t x, std::size_t y) const { return rows_(x, y); }
    std::span<const double> row(std::size_t x) const { return rows_.row(x); }

    bool operator==(const Channel&) const = default;

private:
    Alphabet input_;
    Alphabet output_;
    Matrix rows_;
};

/// Thrown when two objects with incompatible alphabets are combined.
class AlphabetMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace pidchan

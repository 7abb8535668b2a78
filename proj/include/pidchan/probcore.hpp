#pragma once

// Exact finite-alphabet probability primitives. All information quantities
// are in bits.

#include "pidchan/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace pidchan {

double entropy(const Dist& d);
double entropy(std::span<const double> probs);

/// I(T;Y) for input distribution p_t pushed through K.
double mutual_information(const Dist& p_t, const Channel& K);

/// Specific information of outcome t:
///   sum_y p(y|t) log2( p(t|y) / p(t) ).
/// Throws std::domain_error when p(t) = 0.
double specific_information(const Dist& p_t, const Channel& K, std::size_t t);

/// sum_i (u_i - v_i)^2 / v_i, or +infinity when some v_i = 0 < u_i.
double chi_square(const Dist& u, const Dist& v);

/// All distributions on `dim` symbols with entries in {0, 1/m, ..., 1},
/// ordered lexicographically from the first coordinate's largest value
/// downward ([1,0], [0.5,0.5], [0,1] for dim = 2, m = 2).
std::vector<Dist> simplex_grid(std::size_t dim, std::size_t resolution);
std::vector<Dist> simplex_grid(const Alphabet& alphabet, std::size_t resolution);

/// Unchecked kernels on raw storage, for inner loops that evaluate many
/// (distribution, channel) pairs of known-compatible shape.
namespace raw {
double entropy(std::span<const double> probs);
void output_dist(std::span<const double> p, const Matrix& K, std::span<double> out);
double mutual_information(std::span<const double> p, const Matrix& K);
double chi_square(std::span<const double> u, std::span<const double> v);
}  // namespace raw

/// Probability table over axis 0 (the target) and axes 1..n (the sources),
/// stored row-major with axis 0 varying slowest.
class JointTable {
public:
    JointTable(std::vector<Alphabet> axes, std::vector<double> probs);

    const std::vector<Alphabet>& axes() const noexcept { return axes_; }
    std::size_t rank() const noexcept { return axes_.size(); }
    std::span<const double> probs() const noexcept { return probs_; }
    const std::vector<std::size_t>& shape() const noexcept { return shape_; }

    std::size_t flat_index(std::span<const std::size_t> index) const;
    std::vector<std::size_t> unflatten(std::size_t flat) const;
    double at(std::span<const std::size_t> index) const { return probs_[flat_index(index)]; }

    Dist marginal(std::size_t axis) const;
    /// Marginal over a subset of axes, kept in the given order.
    JointTable marginal(std::span<const std::size_t> axes) const;

    bool operator==(const JointTable&) const = default;

private:
    std::vector<Alphabet> axes_;
    std::vector<std::size_t> shape_;
    std::vector<double> probs_;
};

/// Target marginal plus one channel p(y_i | t) per source, together with the
/// full joint table they were derived from.
struct JointSystem {
    Dist target_marginal;
    std::vector<Channel> channels;
    std::vector<Alphabet> source_alphabets;
    /// supported[t] is false where p(t) = 0; those channel rows are uniform.
    std::vector<bool> supported;
    JointTable joint;

    std::size_t num_sources() const noexcept { return channels.size(); }
    bool fully_supported() const;
};

/// Splits a joint table into p(t) and the per-source channels.
/// Throws std::invalid_argument for an all-zero table.
JointSystem joint_to_system(const JointTable& table);

/// p(t) * prod_i K_i[t, y_i], i.e. sources conditionally independent given T.
JointTable conditionally_independent_joint(const Dist& p_t, std::span<const Channel> channels);

/// Channel from T to the product alphabet of all sources.
Channel joint_source_channel(const JointSystem& system);

/// The same system with zero-probability target outcomes removed.
JointSystem restrict_to_support(const JointSystem& system);

/// Rebuilds p(t, y_i) = p(t) K_i[t, y_i].
std::vector<double> reconstruct_pair(const JointSystem& system, std::size_t source);

}  // namespace pidchan

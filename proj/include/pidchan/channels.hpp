#pragma once

#include "pidchan/types.hpp"

#include <cstddef>

namespace pidchan {

/// Kab followed by Kbc: the matrix product Kab * Kbc.
Channel compose(const Channel& Kab, const Channel& Kbc);

/// Distribution of the channel output for input distribution p.
Dist output_dist(const Dist& p, const Channel& K);

/// JoinMeet column operator: column `max_col` receives the elementwise
/// maximum of columns max_col and min_col, column `min_col` the minimum.
/// Other columns are untouched. Indices are zero-based.
Channel join_meet(const Channel& K, std::size_t max_col, std::size_t min_col);

/// Appends zero columns so that K has `outputs` output symbols.
Channel pad_outputs(const Channel& K, std::size_t outputs);

/// True when all rows of K coincide within tol.
bool has_identical_rows(const Channel& K, double tol = kProbTol);

}  // namespace pidchan

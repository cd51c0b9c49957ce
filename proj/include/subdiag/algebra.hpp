#pragma once

#include <random>
#include <vector>

#include "subdiag/block_structure.hpp"
#include "subdiag/matrix.hpp"

namespace subdiag {

enum class Subspace { A, A0, D };

/// Normalized trace tau(x) = (1/n) sum_i x_ii, a faithful tracial state.
Complex tau(const CMatrix& x);

/// Trace-preserving conditional expectation onto D: block-diagonal
/// compression. Multiplicative on A, a D-bimodule map, contractive in
/// every p-norm.
CMatrix phi(const CMatrix& x, const BlockStructure& bs);

/// Entrywise membership test for A / A0 / D at tolerance `tol`
/// (scaled_tol(x) when negative).
bool member_of(const CMatrix& x, const BlockStructure& bs, Subspace which, double tol = -1.0);

/// Matrix units spanning the requested subalgebra, ordered row-major by
/// (i, j). Sizes: sum_{i<=j} n_i n_j for A, sum_i n_i^2 for D.
std::vector<CMatrix> basis(const BlockStructure& bs, Subspace which);

enum class RandomKind { A, A0, D, M, Unitary, Positive, PositiveDefinite };

/// Random elements for the verification harness. Entries are independent
/// standard complex Gaussians (re and im each N(0,1)), with the zero
/// pattern of the requested subalgebra enforced. Unitary: Householder-QR
/// phase-fixed orthonormalization of a Gaussian matrix (Haar). Positive:
/// g*g for Gaussian g. PositiveDefinite: g*g + floor*I with
/// floor = pd_floor_frac * lambda_max(g*g).
/// RNG state is explicit and owned by the caller; same state, same matrix.
CMatrix random_element(const BlockStructure& bs, RandomKind kind, std::mt19937_64& rng);

}  // namespace subdiag

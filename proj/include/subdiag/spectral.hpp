#pragma once

#include <functional>
#include <vector>

#include "subdiag/matrix.hpp"

namespace subdiag {

/// Eigensystem of a Hermitian matrix, eigenvalues ascending.
struct EigenSystem {
    RVector values;
    CMatrix vectors;
};

/// The single decomposition primitive: all spectral operations
/// (modulus, polar, functional calculus, singular values) route
/// through the Hermitian eigensolver.
EigenSystem hermitian_eig(const CMatrix& x);

/// Singular values of x, ascending (square roots of eig(x* x)).
RVector singular_values(const CMatrix& x);

/// Eigenvalues at or below rank_scale * max * n count as zero.
double rank_cutoff(const RVector& values_ascending, Eigen::Index n);

/// sigma_min(x) > rank cutoff.
bool is_invertible(const CMatrix& x);

/// |x| = (x* x)^{1/2}, positive semidefinite.
CMatrix modulus(const CMatrix& x);

struct PolarDecomposition {
    CMatrix w;        // partial isometry; unitary when the input is invertible
    CMatrix modulus;  // positive semidefinite part
};

/// x = w |x| with w* w = support(|x|).
PolarDecomposition polar(const CMatrix& x);

/// Unitary polar factor, completed from ker(|x|) onto ker(|x*|) when x
/// is singular.
CMatrix unitary_polar_factor(const CMatrix& x);

/// Orthonormal basis of the numerical column span of a (possibly
/// rectangular) matrix, rank decided by the global rank cutoff.
CMatrix column_span_orthonormal(const CMatrix& w);

/// Functional calculus f(x) = U f(Lambda) U* for positive semidefinite x.
/// Eigenvalues within tolerance below zero are clamped to zero before f
/// is applied. Throws std::domain_error if f is undefined (non-finite)
/// at an eigenvalue.
CMatrix func_calc(const std::function<double(double)>& f, const CMatrix& x);

/// Spectral projection of positive semidefinite x onto eigenvalues above
/// the rank cutoff; support(x) * x = x.
Projection support(const CMatrix& x);

/// Spectral projection of Hermitian x onto eigenvalues in (lo, inf).
Projection spectral_projection_above(const CMatrix& x, double lo);

struct SpectralAtom {
    double eigenvalue;  // nonnegative
    double weight;      // multiplicity / n
};

/// Atomic distribution of a positive semidefinite matrix under the
/// normalized trace: weights are multiplicity/n and sum to 1. Eigenvalues
/// closer than atom_merge_rel * lambda_max merge into a single atom at
/// their weighted mean.
struct SpectralMeasure {
    std::vector<SpectralAtom> atoms;

    double total_weight() const;
    /// integral of f against the measure: sum_i w_i f(lambda_i).
    double integrate(const std::function<double(double)>& f) const;
};

SpectralMeasure spectral_measure(const CMatrix& x);

/// Truncated-reciprocal pair used by the uniform-outer construction:
///   b(t) = 1/t for t > 1/n, = n for t <= 1/n
///   c(t) = t b(t) = 1 for t > 1/n, = t n otherwise (so 0 <= c <= 1).
struct BnFunctions {
    std::function<double(double)> b;
    std::function<double(double)> c;
};

BnFunctions bn_family(int n);

}  // namespace subdiag

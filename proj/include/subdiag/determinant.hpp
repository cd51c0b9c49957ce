#pragma once

#include "subdiag/matrix.hpp"

namespace subdiag {

enum class DetMethod { ExactLogTrace, DetRoot, Regularized };

struct DetResult {
    double value = 0.0;      // nonnegative
    double log_value = 0.0;  // -inf iff value == 0
    DetMethod method = DetMethod::ExactLogTrace;
};

/// Geometric-mean determinant exp((1/n) sum_i log s_i(x)). Returns 0
/// (log -inf) when any singular value falls at or below the rank cutoff,
/// so callers branching on zero vs positive see a stable split. The log
/// is accumulated in log-space.
DetResult fk_det(const CMatrix& x);

/// |det x|^{1/n} via LU. Second algebraic route for cross-checking
/// fk_det; the two agree identically at finite dimension.
DetResult det_root(const CMatrix& x);

/// Determinant of |x| + eps, monotone nonincreasing as eps decreases,
/// with limit fk_det(x).
DetResult fk_det_regularized(const CMatrix& x, double eps);

}  // namespace subdiag

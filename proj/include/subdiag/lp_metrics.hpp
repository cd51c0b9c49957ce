#pragma once

#include <cstdint>
#include <limits>

#include "subdiag/algebra.hpp"
#include "subdiag/block_structure.hpp"
#include "subdiag/matrix.hpp"

namespace subdiag {

/// Exponent of a normalized Schatten norm; p in [1, inf].
struct PNorm {
    double p = 2.0;

    static PNorm inf() { return PNorm{std::numeric_limits<double>::infinity()}; }
    bool is_inf() const { return std::isinf(p); }
    void validate() const;
};

/// ||x||_p = ((1/n) sum_i s_i(x)^p)^{1/p}; operator norm at p = inf.
double p_norm(const CMatrix& x, PNorm p);

/// Localized seminorm ||x||^e_p = ((1/tr(e)) sum_i s_i(x e)^p)^{1/p} for a
/// nonzero projection e; reduces to p_norm when e = 1.
double localized_p_norm(const CMatrix& x, const Projection& e, PNorm p);

struct OptimOptions {
    int restarts = 16;
    int max_iterations = 500;
    double grad_tol = 1e-9;
    double stall_tol = 1e-12;
    int stall_window = 50;
    std::uint64_t seed = 0;
    /// skip closed forms and analytic warm starts; used to cross-check the
    /// exact p = 2 route against the generic optimizer
    bool force_iterative = false;
};

struct InfimumResult {
    double value = 0.0;
    CMatrix witness_a;  // optimal a0 (dist) or a (szego), an element of A0
    CMatrix witness_d;  // optimal positive-definite d in D (szego only; else identity)
    bool converged = false;
    int iterations = 0;
    int restarts_used = 0;
};

/// delta^e(f) = inf { ||f (1 + a0)||^e_p : a0 in A0 }.
/// p = 2 is solved exactly as the least-squares distance from f e to
/// span{ f b e : b in basis(A0) }; other p run an iterative convex
/// minimization over the real coordinates of a0 with multiple starts
/// (the p = 2 witness is one of them). `converged` reports stationarity;
/// a non-converged value is an upper bound only.
InfimumResult dist_to_right_ideal(const CMatrix& f, const BlockStructure& bs, const Projection& e,
                                  PNorm p, const OptimOptions& opts = {});

struct DeltaMinResult {
    double sigma_min = 0.0;
    double sigma_max = 0.0;  // scale reference for rank decisions
    CMatrix witness_d;       // unit-norm minimizer in D

    /// sigma_min above the rank cutoff relative to sigma_max.
    bool injective() const;
};

/// Smallest singular value of the map D -> M / span(f A0), d |-> residual
/// of f d against span{ f b : b in basis(A0) }, over unit-Frobenius d.
/// sigma_min above the rank cutoff is the injectivity criterion deciding
/// outer factorizability; the witness exhibits the obstruction otherwise.
/// Only p = 2 is supported (the p-independence of outerness makes the
/// p = 2 criterion decide the property).
DeltaMinResult delta_min(const CMatrix& f, const BlockStructure& bs, PNorm p = PNorm{2.0});

/// inf { ||h (a + d)||_p : a in A0, d in D, det-normalized d }.
/// d is parameterized as exp(s) with s Hermitian in D and tau(s) = 0,
/// which pins the geometric-mean determinant of d at 1. For p = 2 the
/// a-subproblem is solved by exact least squares with gradient steps on
/// s; other p polish the p = 2 solution with a derivative-free simplex
/// search. On well-conditioned invertible input the value matches
/// fk_det(h) to optimizer tolerance.
InfimumResult szego_infimum(const CMatrix& h, const BlockStructure& bs, PNorm p,
                            const OptimOptions& opts = {});

}  // namespace subdiag

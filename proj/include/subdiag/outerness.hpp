#pragma once

#include <map>
#include <string>

#include "subdiag/factor.hpp"
#include "subdiag/lp_metrics.hpp"

namespace subdiag {

struct CriterionCheck {
    bool holds = false;
    double residual = 0.0;
};

/// Verdict plus the independent theorem criteria it must agree with.
/// Criteria keys:
///   phi_outer - Phi(h) invertible in D
///   houterp   - |delta^1(h) - ||Phi(h)||_p| <= 1e-7 ||h||_p
///   innam     - Phi(h) - h lies in span(h A0)
///   ideal     - span(h A0) = span(A0)
///   louter    - delta_min(h) above the rank cutoff
/// Each of phi_outer & houterp, phi_outer & innam, phi_outer & ideal,
/// and louter alone is equivalent to outerness; disagreement with the
/// master verdict is a property failure, not a valid state.
struct OuterVerdict {
    bool outer = false;
    bool strongly_outer = false;
    std::map<std::string, CriterionCheck> criteria;
};

/// Master verdict: h invertible (with inverse automatically in A for
/// block upper triangular h). All criteria are computed even when the
/// verdict is already known. The houterp criterion is evaluated at
/// exponent p (default 2).
OuterVerdict is_outer(const CMatrix& h, const BlockStructure& bs, PNorm p = PNorm{2.0});

/// Outer with positive determinant. Coincides with is_outer at finite
/// dimension; a discrepancy is a property failure.
bool is_strongly_outer(const CMatrix& h, const BlockStructure& bs);

struct UniformWitness {
    bool is_uniform = false;
    std::vector<UniformOuterStep> steps;
};

/// Runs the constructive sequence on an outer h and reports whether the
/// final step reaches ||h a_n - 1||_p <= 1e-6 with ||h a_n||_inf <= 1.
/// Non-outer h returns false without searching.
UniformWitness uniform_outer_witness(const CMatrix& h, const BlockStructure& bs, PNorm p);

struct MstkResult {
    bool norm_equal = false;
    bool rigidity_holds = false;
};

/// Norm-equality rigidity for a contraction a: ||a h||_p = ||h||_p forces
/// h = a* a h. norm_equal implies rigidity_holds; anything else is a
/// property failure.
MstkResult mstk_check(const CMatrix& a, const CMatrix& h, PNorm p);

/// For h in A with Phi(h) invertible: h = u g with u unitary in A and g
/// outer. At finite dimension u necessarily lies in D (so h itself is
/// outer); a factor with ||u - Phi(u)||_inf beyond tolerance is flagged
/// as a property failure.
FactorizationResult phi_outer_factor(const CMatrix& h, const BlockStructure& bs);

/// 1 in span(A h): the left-handed variant, computed for the
/// left-vs-right coincidence check only.
bool is_left_outer(const CMatrix& h, const BlockStructure& bs);

}  // namespace subdiag

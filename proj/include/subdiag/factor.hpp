#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "subdiag/block_structure.hpp"
#include "subdiag/lp_metrics.hpp"
#include "subdiag/matrix.hpp"

namespace subdiag {

struct QRFactors {
    CMatrix q;  // unitary
    CMatrix r;  // upper triangular, nonnegative real diagonal
};

/// Householder QR of a square complex matrix, with column phases fixed so
/// the triangular factor has nonnegative real diagonal.
QRFactors householder_qr(const CMatrix& x);

struct FactorizationResult {
    CMatrix u;                      // unitary factor
    CMatrix h;                      // outer factor in A, Phi(h) >= 0
    double residual = 0.0;          // ||u h - f||_inf or || |h| - f ||_inf
    double u_unitarity_defect = 0.0;  // ||u* u - 1||_inf
    bool h_outer = false;
};

/// Raised when the requested factorization does not exist; carries the
/// injectivity obstruction d (a nonzero element of D with f d inside
/// span(f A0)).
class NotFactorizableError : public std::runtime_error {
public:
    NotFactorizableError(const std::string& msg, CMatrix witness_d)
        : std::runtime_error(msg), witness_d_(std::move(witness_d)) {}
    const CMatrix& witness_d() const { return witness_d_; }

private:
    CMatrix witness_d_;
};

/// f = u h with u unitary and h outer in A, normalized so Phi(h) >= 0
/// (which makes the factorization unique). If f is in A then u is inner.
/// Singular f has no outer factorization; throws NotFactorizableError
/// with the delta_min witness.
FactorizationResult inner_outer(const CMatrix& f, const BlockStructure& bs);

/// For positive definite f, the outer h in A with |h| = f (equivalently
/// h* h = f^2), normalized as in inner_outer.
FactorizationResult riesz_szego_positive(const CMatrix& f, const BlockStructure& bs);

/// Upper triangular a with a a* = g for positive definite g, computed by
/// reversal-conjugated Cholesky. Diagonal of a is positive.
CMatrix reverse_cholesky(const CMatrix& g);

struct UniformOuterStep {
    int n = 0;
    CMatrix k_n;             // truncated reciprocal of |h|
    CMatrix a_n;             // outer element of A with a_n a_n* = k_n^2
    CMatrix u_n;             // unitary a_n^{-1} k_n
    double op_norm_ha = 0.0;     // ||h a_n||_inf, always <= 1
    double p_dist_to_one = 0.0;  // ||h a_n - 1||_p
    double det_ha = 0.0;         // geometric-mean determinant of h a_n
};

/// The constructive uniform-outer sequence for an outer h: for each n,
/// k_n = b_n(|h|), a_n upper triangular with a_n a_n* = k_n^2 (via
/// reverse Cholesky), then a_n is rotated by a block-diagonal unitary so
/// Phi(h a_n) >= 0. Along the sequence ||h a_n||_inf <= 1, h a_n -> 1 and
/// a_n^{-1} -> h; once 1/n drops below sigma_min(h) the step is exact.
std::vector<UniformOuterStep> uniform_outer_sequence(const CMatrix& h, const BlockStructure& bs,
                                                     const std::vector<int>& n_values, PNorm p);

/// Geometric schedule 1, 2, 4, ... up to the first power >= 4/sigma_min(h).
std::vector<int> default_outer_schedule(const CMatrix& h);

struct DiagCommutingResult {
    bool is_dc = false;
    std::optional<CMatrix> u;  // unitary witness in D
};

/// Tests whether |Phi(h)| commutes with u* h for u = 1 or u = the
/// (unitarily completed) polar factor of Phi(h).
DiagCommutingResult diag_commuting_check(const CMatrix& h, const BlockStructure& bs);

/// h_n = h e_n + (1/n) u (1 - e_n) with e_n the spectral projection of
/// |Phi(h)| for (1/n, inf): a sequence of strongly outer elements
/// converging to h, for h outer and diagonally commuting with witness u.
std::vector<CMatrix> strongly_outer_approximants(const CMatrix& h, const BlockStructure& bs,
                                                 const CMatrix& u, const std::vector<int>& n_values,
                                                 PNorm p);

}  // namespace subdiag

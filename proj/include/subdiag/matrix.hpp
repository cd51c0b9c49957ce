#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>

namespace subdiag {

using Complex = std::complex<double>;

/// Dense square complex matrix, the universal element representation.
/// Elements of M, A, A0, D and every L^p all share this type: at finite
/// dimension the spaces coincide as sets and differ only in norm.
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

/// Global numeric policy. All membership and equality tests derive their
/// slack from `base`; spectral rank decisions from `rank_scale`.
struct ToleranceConfig {
    double base = 1e-10;           // absolute tolerance scale for equality/membership
    double rank_scale = 1e-10;     // eigenvalue/singular value rank cutoff scale
    double atom_merge_rel = 1e-8;  // relative gap below which spectral atoms merge
    double pd_floor_frac = 1e-3;   // eigenvalue floor fraction for random positive definite
};

ToleranceConfig& tolerances();

/// Largest singular value (operator norm).
double op_norm(const CMatrix& x);

/// Scale- and dimension-aware absolute tolerance: base * max(1, ||x||_inf) * n.
double scaled_tol(const CMatrix& x);

bool is_finite(const CMatrix& x);
void require_finite(const CMatrix& x, const char* what);
void require_square(const CMatrix& x, const char* what);
void require_dim(const CMatrix& x, Eigen::Index n, const char* what);

bool approx_equal(const CMatrix& a, const CMatrix& b, double tol = -1.0);
bool is_hermitian(const CMatrix& x, double tol = -1.0);

/// Hermitian + idempotent matrix, validated on construction.
class Projection {
public:
    explicit Projection(CMatrix m);

    static Projection identity(Eigen::Index n);

    const CMatrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

    /// tr(e), the (unnormalized) rank of the projection.
    double trace_rank() const;

private:
    CMatrix m_;
};

}  // namespace subdiag

#include "subdiag/matrix.hpp"

#include "subdiag/spectral.hpp"

namespace subdiag {

ToleranceConfig& tolerances() {
    static ToleranceConfig config;
    return config;
}

double op_norm(const CMatrix& x) {
    if (x.size() == 0) return 0.0;
    const RVector s = singular_values(x);
    return s(s.size() - 1);
}

double scaled_tol(const CMatrix& x) {
    return tolerances().base * std::max(1.0, op_norm(x)) * static_cast<double>(x.rows());
}

bool is_finite(const CMatrix& x) { return x.allFinite(); }

void require_finite(const CMatrix& x, const char* what) {
    if (!x.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

void require_square(const CMatrix& x, const char* what) {
    if (x.rows() != x.cols())
        throw std::invalid_argument(std::string(what) + ": matrix is not square");
}

void require_dim(const CMatrix& x, Eigen::Index n, const char* what) {
    require_square(x, what);
    if (x.rows() != n)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch, got " +
                                    std::to_string(x.rows()) + " expected " + std::to_string(n));
}

bool approx_equal(const CMatrix& a, const CMatrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    if (tol < 0) tol = std::max(scaled_tol(a), scaled_tol(b));
    return op_norm(a - b) <= tol;
}

bool is_hermitian(const CMatrix& x, double tol) {
    if (x.rows() != x.cols()) return false;
    if (tol < 0) tol = scaled_tol(x);
    return op_norm(x - x.adjoint()) <= tol;
}

Projection::Projection(CMatrix m) : m_(std::move(m)) {
    require_square(m_, "Projection");
    require_finite(m_, "Projection");
    const double tol = scaled_tol(m_) + tolerances().base;
    if (op_norm(m_ - m_.adjoint()) > tol)
        throw std::invalid_argument("Projection: matrix is not Hermitian within tolerance");
    if (op_norm(m_ * m_ - m_) > tol)
        throw std::invalid_argument("Projection: matrix is not idempotent within tolerance");
}

Projection Projection::identity(Eigen::Index n) { return Projection(CMatrix::Identity(n, n)); }

double Projection::trace_rank() const { return m_.trace().real(); }

}  // namespace subdiag

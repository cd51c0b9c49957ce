#include "subdiag/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace subdiag {

EigenSystem hermitian_eig(const CMatrix& x) {
    require_square(x, "hermitian_eig");
    require_finite(x, "hermitian_eig");
    // symmetrize so roundoff in the input cannot leak into complex eigenvalues
    const CMatrix sym = 0.5 * (x + x.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eig: eigensolver failed to converge");
    return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

RVector singular_values(const CMatrix& x) {
    require_square(x, "singular_values");
    require_finite(x, "singular_values");
    // Jacobi SVD keeps relative accuracy on small singular values, which the
    // (x* x)^{1/2} route loses by squaring the condition number
    const Eigen::JacobiSVD<CMatrix> svd(x);
    const RVector desc = svd.singularValues();
    return desc.reverse();
}

double rank_cutoff(const RVector& values_ascending, Eigen::Index n) {
    if (values_ascending.size() == 0) return 0.0;
    const double vmax = std::abs(values_ascending(values_ascending.size() - 1));
    return tolerances().rank_scale * vmax * static_cast<double>(n);
}

bool is_invertible(const CMatrix& x) {
    const RVector s = singular_values(x);
    return s(0) > rank_cutoff(s, x.rows());
}

CMatrix modulus(const CMatrix& x) {
    const EigenSystem es = hermitian_eig(x.adjoint() * x);
    RVector s(es.values.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::sqrt(std::max(0.0, es.values(i)));
    return es.vectors * s.asDiagonal() * es.vectors.adjoint();
}

PolarDecomposition polar(const CMatrix& x) {
    const EigenSystem es = hermitian_eig(x.adjoint() * x);
    const Eigen::Index n = x.rows();
    RVector s(es.values.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::sqrt(std::max(0.0, es.values(i)));
    const double cutoff = rank_cutoff(s, n);
    RVector sinv = RVector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (s(i) > cutoff) sinv(i) = 1.0 / s(i);
    CMatrix mod = es.vectors * s.asDiagonal() * es.vectors.adjoint();
    CMatrix w = x * (es.vectors * sinv.asDiagonal() * es.vectors.adjoint());
    return PolarDecomposition{std::move(w), std::move(mod)};
}

CMatrix unitary_polar_factor(const CMatrix& x) {
    require_square(x, "unitary_polar_factor");
    require_finite(x, "unitary_polar_factor");
    if (x.rows() == 0) return x;
    const Eigen::JacobiSVD<CMatrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

CMatrix column_span_orthonormal(const CMatrix& w) {
    if (w.cols() == 0) return CMatrix(w.rows(), 0);
    const Eigen::JacobiSVD<CMatrix> svd(w, Eigen::ComputeThinU);
    const RVector s = svd.singularValues();  // descending
    if (s(0) <= 0.0) return CMatrix(w.rows(), 0);
    const double cutoff =
        tolerances().rank_scale * s(0) * static_cast<double>(std::max(w.rows(), w.cols()));
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > cutoff) ++rank;
    return svd.matrixU().leftCols(rank);
}

namespace {

void require_psd(const EigenSystem& es, const CMatrix& x, const char* what) {
    const double tol = scaled_tol(x) + tolerances().base;
    if (op_norm(x - x.adjoint()) > tol)
        throw std::invalid_argument(std::string(what) + ": input is not Hermitian");
    if (es.values.size() > 0 && es.values(0) < -tol)
        throw std::invalid_argument(std::string(what) + ": input is not positive semidefinite");
}

}  // namespace

CMatrix func_calc(const std::function<double(double)>& f, const CMatrix& x) {
    const EigenSystem es = hermitian_eig(x);
    require_psd(es, x, "func_calc");
    RVector fv(es.values.size());
    for (Eigen::Index i = 0; i < fv.size(); ++i) {
        const double lambda = std::max(0.0, es.values(i));
        const double y = f(lambda);
        if (!std::isfinite(y))
            throw std::domain_error("func_calc: function undefined at eigenvalue " +
                                    std::to_string(lambda));
        fv(i) = y;
    }
    return es.vectors * fv.asDiagonal() * es.vectors.adjoint();
}

Projection support(const CMatrix& x) {
    const EigenSystem es = hermitian_eig(x);
    require_psd(es, x, "support");
    const double cutoff = rank_cutoff(es.values, x.rows());
    RVector ind(es.values.size());
    for (Eigen::Index i = 0; i < ind.size(); ++i) ind(i) = es.values(i) > cutoff ? 1.0 : 0.0;
    return Projection(es.vectors * ind.asDiagonal() * es.vectors.adjoint());
}

Projection spectral_projection_above(const CMatrix& x, double lo) {
    const EigenSystem es = hermitian_eig(x);
    RVector ind(es.values.size());
    for (Eigen::Index i = 0; i < ind.size(); ++i) ind(i) = es.values(i) > lo ? 1.0 : 0.0;
    return Projection(es.vectors * ind.asDiagonal() * es.vectors.adjoint());
}

double SpectralMeasure::total_weight() const {
    double w = 0.0;
    for (const auto& a : atoms) w += a.weight;
    return w;
}

double SpectralMeasure::integrate(const std::function<double(double)>& f) const {
    double acc = 0.0;
    for (const auto& a : atoms) acc += a.weight * f(a.eigenvalue);
    return acc;
}

SpectralMeasure spectral_measure(const CMatrix& x) {
    const EigenSystem es = hermitian_eig(x);
    require_psd(es, x, "spectral_measure");
    const Eigen::Index n = es.values.size();
    const double vmax = std::max(0.0, es.values(n - 1));
    const double merge_gap = tolerances().atom_merge_rel * vmax;

    SpectralMeasure mu;
    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i;
        double sum = 0.0;
        while (j < n && (j == i || es.values(j) - es.values(j - 1) <= merge_gap)) {
            sum += std::max(0.0, es.values(j));
            ++j;
        }
        const double count = static_cast<double>(j - i);
        mu.atoms.push_back(SpectralAtom{sum / count, count / static_cast<double>(n)});
        i = j;
    }
    return mu;
}

BnFunctions bn_family(int n) {
    if (n < 1) throw std::invalid_argument("bn_family: n must be >= 1");
    const double nn = static_cast<double>(n);
    const double threshold = 1.0 / nn;
    BnFunctions fns;
    fns.b = [nn, threshold](double t) { return t > threshold ? 1.0 / t : nn; };
    fns.c = [nn, threshold](double t) { return t > threshold ? 1.0 : t * nn; };
    return fns;
}

}  // namespace subdiag

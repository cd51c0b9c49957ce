#include "subdiag/factor.hpp"

#include <cmath>

#include "subdiag/algebra.hpp"
#include "subdiag/determinant.hpp"
#include "subdiag/outerness.hpp"
#include "subdiag/spectral.hpp"

namespace subdiag {

QRFactors householder_qr(const CMatrix& x) {
    require_square(x, "householder_qr");
    require_finite(x, "householder_qr");
    const Eigen::Index n = x.rows();
    CMatrix r = x;
    CMatrix q = CMatrix::Identity(n, n);

    for (Eigen::Index k = 0; k < n; ++k) {
        CVector col = r.block(k, k, n - k, 1);
        const double xnorm = col.norm();
        if (xnorm == 0.0) continue;
        const Complex alpha = col(0);
        const double aabs = std::abs(alpha);
        const Complex phase = aabs > 0.0 ? alpha / aabs : Complex(1.0, 0.0);
        const Complex beta = -phase * xnorm;
        CVector v = col;
        v(0) -= beta;
        const double vnorm = v.norm();
        if (vnorm > 1e-300) {
            v /= vnorm;
            r.block(k, k, n - k, n - k) -=
                2.0 * v * (v.adjoint() * r.block(k, k, n - k, n - k)).eval();
            q.block(0, k, n, n - k) -=
                2.0 * (q.block(0, k, n, n - k) * v).eval() * v.adjoint();
        }
        r(k, k) = beta;
        for (Eigen::Index i = k + 1; i < n; ++i) r(i, k) = Complex(0.0, 0.0);
    }
    // rotate column phases so diag(r) is real and nonnegative
    for (Eigen::Index k = 0; k < n; ++k) {
        const Complex d = r(k, k);
        const double dabs = std::abs(d);
        if (dabs == 0.0) continue;
        const Complex ph = d / dabs;
        q.col(k) *= ph;
        r.row(k) *= std::conj(ph);
        r(k, k) = dabs;
    }
    return QRFactors{std::move(q), std::move(r)};
}

namespace {

/// Block-diagonal unitary v with v_k the (completed) polar phase of the
/// k-th diagonal block of x, so that v* x has positive semidefinite
/// block diagonal when x is block upper triangular.
CMatrix block_polar_phase(const CMatrix& x, const BlockStructure& bs) {
    const int n = bs.dim();
    CMatrix v = CMatrix::Zero(n, n);
    for (int k = 0; k < bs.block_count(); ++k) {
        const int off = bs.block_offset(k);
        const int sz = bs.block_size(k);
        v.block(off, off, sz, sz) = unitary_polar_factor(x.block(off, off, sz, sz));
    }
    return v;
}

FactorizationResult build_factorization(const CMatrix& f, const BlockStructure& bs,
                                        bool positive_mode) {
    const int n = bs.dim();
    QRFactors qr = householder_qr(f);
    // scalar upper triangular sits inside every block upper triangular A;
    // rotate the diagonal blocks so the block-diagonal part is positive
    const CMatrix v = block_polar_phase(qr.r, bs);
    CMatrix h = v.adjoint() * qr.r;
    CMatrix u = qr.q * v;

    FactorizationResult res;
    res.residual = positive_mode ? op_norm(modulus(h) - f) : op_norm(u * h - f);
    res.u_unitarity_defect = op_norm(u.adjoint() * u - CMatrix::Identity(n, n));
    res.h_outer = is_outer(h, bs).outer;
    res.u = std::move(u);
    res.h = std::move(h);
    return res;
}

}  // namespace

FactorizationResult inner_outer(const CMatrix& f, const BlockStructure& bs) {
    require_dim(f, bs.dim(), "inner_outer");
    require_finite(f, "inner_outer");
    if (!is_invertible(f)) {
        const DeltaMinResult obstruction = delta_min(f, bs);
        throw NotFactorizableError("inner_outer: input is singular, no outer factorization exists",
                                   obstruction.witness_d);
    }
    return build_factorization(f, bs, false);
}

FactorizationResult riesz_szego_positive(const CMatrix& f, const BlockStructure& bs) {
    require_dim(f, bs.dim(), "riesz_szego_positive");
    require_finite(f, "riesz_szego_positive");
    const double tol = scaled_tol(f) + tolerances().base;
    if (op_norm(f - f.adjoint()) > tol)
        throw std::invalid_argument("riesz_szego_positive: input is not Hermitian");
    const RVector eigs = hermitian_eig(f).values;
    if (eigs(0) < -tol)
        throw std::invalid_argument("riesz_szego_positive: input is not positive semidefinite");
    if (!is_invertible(f)) {
        const DeltaMinResult obstruction = delta_min(f, bs);
        throw NotFactorizableError("riesz_szego_positive: input is singular", obstruction.witness_d);
    }
    return build_factorization(f, bs, true);
}

CMatrix reverse_cholesky(const CMatrix& g) {
    require_square(g, "reverse_cholesky");
    require_finite(g, "reverse_cholesky");
    const Eigen::Index n = g.rows();
    const double tol = scaled_tol(g) + tolerances().base;
    if (op_norm(g - g.adjoint()) > tol)
        throw std::invalid_argument("reverse_cholesky: input is not Hermitian");

    // reverse both index orders, factor lower, reverse back: upper a with a a* = g
    CMatrix grev(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) grev(i, j) = g(n - 1 - i, n - 1 - j);

    CMatrix l = CMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Complex sum = grev(j, j);
        for (Eigen::Index k = 0; k < j; ++k) sum -= l(j, k) * std::conj(l(j, k));
        const double diag = sum.real();
        if (!(diag > 0.0))
            throw std::invalid_argument("reverse_cholesky: input is not positive definite");
        l(j, j) = std::sqrt(diag);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            Complex acc = grev(i, j);
            for (Eigen::Index k = 0; k < j; ++k) acc -= l(i, k) * std::conj(l(j, k));
            l(i, j) = acc / l(j, j).real();
        }
    }

    CMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = l(n - 1 - i, n - 1 - j);
    return a;
}

std::vector<int> default_outer_schedule(const CMatrix& h) {
    const RVector s = singular_values(h);
    const double smin = s(0);
    std::vector<int> out{1};
    if (smin <= 0.0) return out;
    const double target = 4.0 / smin;
    long long v = 1;
    while (static_cast<double>(v) < target && v < (1LL << 40)) {
        v *= 2;
        out.push_back(static_cast<int>(std::min<long long>(v, 1LL << 30)));
        if (v >= (1LL << 30)) break;
    }
    return out;
}

std::vector<UniformOuterStep> uniform_outer_sequence(const CMatrix& h, const BlockStructure& bs,
                                                     const std::vector<int>& n_values, PNorm p) {
    require_dim(h, bs.dim(), "uniform_outer_sequence");
    if (!member_of(h, bs, Subspace::A))
        throw std::domain_error("uniform_outer_sequence: h is not in A");
    if (!is_invertible(h))
        throw std::domain_error("uniform_outer_sequence: h is not outer");

    const int n = bs.dim();
    const CMatrix eye = CMatrix::Identity(n, n);
    const CMatrix mod_h = modulus(h);

    std::vector<UniformOuterStep> steps;
    steps.reserve(n_values.size());
    for (int nv : n_values) {
        const BnFunctions fns = bn_family(nv);
        UniformOuterStep step;
        step.n = nv;
        step.k_n = func_calc(fns.b, mod_h);
        CMatrix a = reverse_cholesky((step.k_n * step.k_n).eval());
        // rotate so the block-diagonal part of h a is positive
        const CMatrix vn = block_polar_phase(phi((h * a).eval(), bs), bs);
        a = a * vn.adjoint();
        step.a_n = a;
        step.u_n = a.partialPivLu().solve(step.k_n);
        const CMatrix ha = h * a;
        step.op_norm_ha = op_norm(ha);
        step.p_dist_to_one = p_norm(ha - eye, p);
        step.det_ha = fk_det(ha).value;
        steps.push_back(std::move(step));
    }
    return steps;
}

DiagCommutingResult diag_commuting_check(const CMatrix& h, const BlockStructure& bs) {
    require_dim(h, bs.dim(), "diag_commuting_check");
    if (!member_of(h, bs, Subspace::A))
        throw std::invalid_argument("diag_commuting_check: h is not in A");
    const CMatrix ph = phi(h, bs);
    const CMatrix mod_ph = modulus(ph);
    const double tol = scaled_tol(h) + tolerances().base;

    std::vector<CMatrix> candidates;
    candidates.push_back(CMatrix::Identity(bs.dim(), bs.dim()));
    candidates.push_back(block_polar_phase(ph, bs));  // polar phase of Phi(h), unitary in D

    for (const CMatrix& u : candidates) {
        const CMatrix uh = u.adjoint() * h;
        const CMatrix commutator = mod_ph * uh - uh * mod_ph;
        if (op_norm(commutator) <= tol) return DiagCommutingResult{true, u};
    }
    return DiagCommutingResult{false, std::nullopt};
}

std::vector<CMatrix> strongly_outer_approximants(const CMatrix& h, const BlockStructure& bs,
                                                 const CMatrix& u, const std::vector<int>& n_values,
                                                 PNorm p) {
    p.validate();
    require_dim(h, bs.dim(), "strongly_outer_approximants");
    require_dim(u, bs.dim(), "strongly_outer_approximants");
    if (!member_of(h, bs, Subspace::A) || !is_invertible(h))
        throw std::domain_error("strongly_outer_approximants: h is not outer");
    const double tol = scaled_tol(h) + tolerances().base;
    if (!member_of(u, bs, Subspace::D) ||
        op_norm(u.adjoint() * u - CMatrix::Identity(bs.dim(), bs.dim())) > tol)
        throw std::domain_error("strongly_outer_approximants: u is not a unitary in D");
    {
        const CMatrix mod_ph = modulus(phi(h, bs));
        const CMatrix uh = u.adjoint() * h;
        if (op_norm(mod_ph * uh - uh * mod_ph) > tol)
            throw std::domain_error("strongly_outer_approximants: h is not diagonally commuting");
    }

    const int n = bs.dim();
    const CMatrix eye = CMatrix::Identity(n, n);
    const CMatrix mod_ph = modulus(phi(h, bs));

    std::vector<CMatrix> out;
    out.reserve(n_values.size());
    for (int nv : n_values) {
        const CMatrix en = spectral_projection_above(mod_ph, 1.0 / static_cast<double>(nv)).matrix();
        out.push_back(h * en + (1.0 / static_cast<double>(nv)) * u * (eye - en));
    }
    return out;
}

}  // namespace subdiag

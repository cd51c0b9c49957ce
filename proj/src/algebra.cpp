#include "subdiag/algebra.hpp"

#include "subdiag/factor.hpp"
#include "subdiag/spectral.hpp"

namespace subdiag {

Complex tau(const CMatrix& x) {
    require_square(x, "tau");
    return x.trace() / static_cast<double>(x.rows());
}

CMatrix phi(const CMatrix& x, const BlockStructure& bs) {
    require_dim(x, bs.dim(), "phi");
    CMatrix out = CMatrix::Zero(bs.dim(), bs.dim());
    for (int k = 0; k < bs.block_count(); ++k) {
        const int off = bs.block_offset(k);
        const int sz = bs.block_size(k);
        out.block(off, off, sz, sz) = x.block(off, off, sz, sz);
    }
    return out;
}

bool member_of(const CMatrix& x, const BlockStructure& bs, Subspace which, double tol) {
    require_dim(x, bs.dim(), "member_of");
    if (tol < 0) tol = scaled_tol(x);
    const int n = bs.dim();
    for (int i = 0; i < n; ++i) {
        const int bi = bs.block_of(i);
        for (int j = 0; j < n; ++j) {
            const int bj = bs.block_of(j);
            bool must_vanish = false;
            switch (which) {
                case Subspace::A: must_vanish = bi > bj; break;
                case Subspace::A0: must_vanish = bi >= bj; break;
                case Subspace::D: must_vanish = bi != bj; break;
            }
            if (must_vanish && std::abs(x(i, j)) > tol) return false;
        }
    }
    return true;
}

std::vector<CMatrix> basis(const BlockStructure& bs, Subspace which) {
    const int n = bs.dim();
    std::vector<CMatrix> units;
    for (int i = 0; i < n; ++i) {
        const int bi = bs.block_of(i);
        for (int j = 0; j < n; ++j) {
            const int bj = bs.block_of(j);
            bool keep = false;
            switch (which) {
                case Subspace::A: keep = bi <= bj; break;
                case Subspace::A0: keep = bi < bj; break;
                case Subspace::D: keep = bi == bj; break;
            }
            if (!keep) continue;
            CMatrix e = CMatrix::Zero(n, n);
            e(i, j) = Complex(1.0, 0.0);
            units.push_back(std::move(e));
        }
    }
    return units;
}

namespace {

CMatrix gaussian_matrix(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            g(i, j) = Complex(re, im);
        }
    return g;
}

CMatrix mask_to(const CMatrix& g, const BlockStructure& bs, Subspace which) {
    const int n = bs.dim();
    CMatrix out = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const int bi = bs.block_of(i);
        for (int j = 0; j < n; ++j) {
            const int bj = bs.block_of(j);
            bool keep = false;
            switch (which) {
                case Subspace::A: keep = bi <= bj; break;
                case Subspace::A0: keep = bi < bj; break;
                case Subspace::D: keep = bi == bj; break;
            }
            if (keep) out(i, j) = g(i, j);
        }
    }
    return out;
}

}  // namespace

CMatrix random_element(const BlockStructure& bs, RandomKind kind, std::mt19937_64& rng) {
    const int n = bs.dim();
    switch (kind) {
        case RandomKind::M: return gaussian_matrix(n, rng);
        case RandomKind::A: return mask_to(gaussian_matrix(n, rng), bs, Subspace::A);
        case RandomKind::A0: return mask_to(gaussian_matrix(n, rng), bs, Subspace::A0);
        case RandomKind::D: return mask_to(gaussian_matrix(n, rng), bs, Subspace::D);
        case RandomKind::Unitary: return householder_qr(gaussian_matrix(n, rng)).q;
        case RandomKind::Positive: {
            const CMatrix g = gaussian_matrix(n, rng);
            return (g.adjoint() * g).eval();
        }
        case RandomKind::PositiveDefinite: {
            const CMatrix g = gaussian_matrix(n, rng);
            CMatrix p = g.adjoint() * g;
            const RVector eigs = hermitian_eig(p).values;
            const double floor = tolerances().pd_floor_frac * eigs(eigs.size() - 1);
            p += floor * CMatrix::Identity(n, n);
            return p;
        }
    }
    throw std::logic_error("random_element: unknown kind");
}

}  // namespace subdiag

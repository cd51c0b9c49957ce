#include "subdiag/lp_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "subdiag/determinant.hpp"
#include "subdiag/spectral.hpp"

namespace subdiag {

void PNorm::validate() const {
    if (std::isnan(p) || p < 1.0)
        throw std::invalid_argument("PNorm: p must lie in [1, inf]");
}

double p_norm(const CMatrix& x, PNorm p) {
    p.validate();
    require_square(x, "p_norm");
    const RVector s = singular_values(x);
    const Eigen::Index n = s.size();
    if (p.is_inf()) return s(n - 1);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) acc += std::pow(s(i), p.p);
    return std::pow(acc / static_cast<double>(n), 1.0 / p.p);
}

double localized_p_norm(const CMatrix& x, const Projection& e, PNorm p) {
    p.validate();
    require_dim(x, e.dim(), "localized_p_norm");
    const double tr_e = e.trace_rank();
    if (tr_e < 0.5) throw std::domain_error("localized_p_norm: zero projection");
    const RVector s = singular_values(x * e.matrix());
    if (p.is_inf()) return s(s.size() - 1);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i), p.p);
    return std::pow(acc / tr_e, 1.0 / p.p);
}

// ---------------------------------------------------------------------------
// internal linear-algebra and optimization helpers
// ---------------------------------------------------------------------------

namespace {

CVector vec(const CMatrix& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

CMatrix stack_columns(const std::vector<CMatrix>& mats, Eigen::Index rows) {
    CMatrix w(rows, static_cast<Eigen::Index>(mats.size()));
    for (std::size_t k = 0; k < mats.size(); ++k) w.col(static_cast<Eigen::Index>(k)) = vec(mats[k]);
    return w;
}

CMatrix hermitian_exp(const CMatrix& s) {
    const EigenSystem es = hermitian_eig(s);
    RVector ev(es.values.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = std::exp(es.values(i));
    return es.vectors * ev.asDiagonal() * es.vectors.adjoint();
}

CMatrix hermitian_log(const CMatrix& x) {
    const EigenSystem es = hermitian_eig(x);
    RVector ev(es.values.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (!(es.values(i) > 0.0))
            throw std::domain_error("hermitian_log: input not positive definite");
        ev(i) = std::log(es.values(i));
    }
    return es.vectors * ev.asDiagonal() * es.vectors.adjoint();
}

/// Orthonormal (Frobenius) basis of the Hermitian elements of D.
std::vector<CMatrix> hermitian_d_basis(const BlockStructure& bs) {
    const int n = bs.dim();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<CMatrix> out;
    for (int k = 0; k < bs.block_count(); ++k) {
        const int off = bs.block_offset(k);
        const int sz = bs.block_size(k);
        for (int i = off; i < off + sz; ++i) {
            CMatrix e = CMatrix::Zero(n, n);
            e(i, i) = 1.0;
            out.push_back(std::move(e));
        }
        for (int i = off; i < off + sz; ++i)
            for (int j = i + 1; j < off + sz; ++j) {
                CMatrix re = CMatrix::Zero(n, n);
                re(i, j) = inv_sqrt2;
                re(j, i) = inv_sqrt2;
                out.push_back(std::move(re));
                CMatrix im = CMatrix::Zero(n, n);
                im(i, j) = Complex(0.0, inv_sqrt2);
                im(j, i) = Complex(0.0, -inv_sqrt2);
                out.push_back(std::move(im));
            }
    }
    return out;
}

CMatrix from_coords_hermitian(const std::vector<CMatrix>& hbasis, const RVector& x) {
    CMatrix s = CMatrix::Zero(hbasis[0].rows(), hbasis[0].cols());
    for (Eigen::Index k = 0; k < x.size(); ++k) s += x(k) * hbasis[static_cast<std::size_t>(k)];
    return s;
}

RVector to_coords_hermitian(const std::vector<CMatrix>& hbasis, const CMatrix& s) {
    RVector x(static_cast<Eigen::Index>(hbasis.size()));
    for (std::size_t k = 0; k < hbasis.size(); ++k)
        x(static_cast<Eigen::Index>(k)) = (hbasis[k].adjoint() * s).trace().real();
    return x;
}

CMatrix from_complex_coords(const std::vector<CMatrix>& units, const RVector& x, Eigen::Index n) {
    CMatrix a = CMatrix::Zero(n, n);
    for (std::size_t k = 0; k < units.size(); ++k)
        a += Complex(x(2 * static_cast<Eigen::Index>(k)), x(2 * static_cast<Eigen::Index>(k) + 1)) *
             units[k];
    return a;
}

RVector numerical_gradient(const std::function<double(const RVector&)>& f, const RVector& x,
                           double step) {
    RVector g(x.size());
    RVector xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = step * std::max(1.0, std::abs(x(i)));
        xp(i) = x(i) + h;
        const double fp = f(xp);
        xp(i) = x(i) - h;
        const double fm = f(xp);
        xp(i) = x(i);
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

struct DescentOutcome {
    RVector x;
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Backtracking gradient descent; stationarity = gradient below grad_tol
/// or objective stalled below stall_tol over the stall window.
DescentOutcome gradient_descent(const std::function<double(const RVector&)>& f, RVector x,
                                const OptimOptions& opts) {
    DescentOutcome out;
    double fx = f(x);
    double window_best = fx;
    int window_count = 0;
    double step_scale = 1.0;
    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        const RVector g = numerical_gradient(f, x, 3e-6);
        const double gnorm = g.norm();
        if (gnorm <= opts.grad_tol) {
            out.converged = true;
            break;
        }
        double step = step_scale;
        double fnew = fx;
        RVector xnew = x;
        bool improved = false;
        for (int bt = 0; bt < 60; ++bt) {
            xnew = x - step * g;
            fnew = f(xnew);
            if (fnew <= fx - 1e-4 * step * gnorm * gnorm) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            out.converged = true;  // no descent direction resolvable: stationary
            break;
        }
        step_scale = std::min(1e6, step * 2.0);
        x = xnew;
        fx = fnew;
        if (window_best - fx <= opts.stall_tol) {
            if (++window_count >= opts.stall_window) {
                out.converged = true;
                break;
            }
        } else {
            window_best = fx;
            window_count = 0;
        }
    }
    out.x = x;
    out.value = fx;
    out.iterations = iter;
    return out;
}

struct SimplexOutcome {
    RVector x;
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Nelder-Mead on f from x0 with initial spread `scale`.
SimplexOutcome nelder_mead(const std::function<double(const RVector&)>& f, const RVector& x0,
                           double scale, int max_evals, double ftol) {
    const Eigen::Index dim = x0.size();
    SimplexOutcome out;
    if (dim == 0) {
        out.x = x0;
        out.value = f(x0);
        out.converged = true;
        return out;
    }
    std::vector<RVector> pts;
    std::vector<double> vals;
    pts.push_back(x0);
    vals.push_back(f(x0));
    for (Eigen::Index i = 0; i < dim; ++i) {
        RVector p = x0;
        p(i) += scale * std::max(1.0, std::abs(x0(i)));
        pts.push_back(p);
        vals.push_back(f(p));
    }
    int evals = static_cast<int>(dim) + 1;
    auto order = [&]() {
        std::vector<std::size_t> idx(pts.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        std::vector<RVector> p2;
        std::vector<double> v2;
        for (std::size_t i : idx) {
            p2.push_back(pts[i]);
            v2.push_back(vals[i]);
        }
        pts.swap(p2);
        vals.swap(v2);
    };
    order();
    while (evals < max_evals) {
        if (std::abs(vals.back() - vals.front()) <= ftol * (std::abs(vals.front()) + ftol)) {
            out.converged = true;
            break;
        }
        RVector centroid = RVector::Zero(dim);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) centroid += pts[i];
        centroid /= static_cast<double>(dim);
        const RVector worst = pts.back();
        const RVector refl = centroid + (centroid - worst);
        const double frefl = f(refl);
        ++evals;
        if (frefl < vals.front()) {
            const RVector expd = centroid + 2.0 * (centroid - worst);
            const double fexp = f(expd);
            ++evals;
            if (fexp < frefl) {
                pts.back() = expd;
                vals.back() = fexp;
            } else {
                pts.back() = refl;
                vals.back() = frefl;
            }
        } else if (frefl < vals[vals.size() - 2]) {
            pts.back() = refl;
            vals.back() = frefl;
        } else {
            const RVector contr = centroid + 0.5 * (worst - centroid);
            const double fcontr = f(contr);
            ++evals;
            if (fcontr < vals.back()) {
                pts.back() = contr;
                vals.back() = fcontr;
            } else {
                for (std::size_t i = 1; i < pts.size(); ++i) {
                    pts[i] = pts.front() + 0.5 * (pts[i] - pts.front());
                    vals[i] = f(pts[i]);
                    ++evals;
                }
            }
        }
        order();
    }
    out.x = pts.front();
    out.value = vals.front();
    out.iterations = evals;
    out.converged = out.converged ||
                    std::abs(vals.back() - vals.front()) <= ftol * (std::abs(vals.front()) + ftol);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// dist_to_right_ideal
// ---------------------------------------------------------------------------

InfimumResult dist_to_right_ideal(const CMatrix& f, const BlockStructure& bs, const Projection& e,
                                  PNorm p, const OptimOptions& opts) {
    p.validate();
    const int n = bs.dim();
    require_dim(f, n, "dist_to_right_ideal");
    require_dim(e.matrix(), n, "dist_to_right_ideal");
    if (e.trace_rank() < 0.5) throw std::domain_error("dist_to_right_ideal: zero projection");
    if (!member_of(e.matrix(), bs, Subspace::D))
        throw std::invalid_argument("dist_to_right_ideal: projection must lie in D");

    const std::vector<CMatrix> a0_units = basis(bs, Subspace::A0);
    const std::size_t m = a0_units.size();
    const CMatrix em = e.matrix();

    // exact p = 2 least squares: distance from vec(f e) to span{vec(f b e)}
    std::vector<CMatrix> cols;
    cols.reserve(m);
    for (const CMatrix& b : a0_units) cols.push_back(f * b * em);
    const CMatrix w = stack_columns(cols, static_cast<Eigen::Index>(n) * n);
    const CVector v = vec((f * em).eval());

    CMatrix a0_ls = CMatrix::Zero(n, n);
    if (m > 0) {
        const CVector c = w.colPivHouseholderQr().solve(-v);
        for (std::size_t k = 0; k < m; ++k) a0_ls += c(static_cast<Eigen::Index>(k)) * a0_units[k];
    }
    const double value_ls =
        localized_p_norm(f * (CMatrix::Identity(n, n) + a0_ls), e, PNorm{2.0});

    InfimumResult result;
    const bool exact = (p.p == 2.0 && !p.is_inf() && !opts.force_iterative) || m == 0;
    if (exact) {
        // with an empty A0 the infimum has no free parameters at any p
        result.value = m == 0 ? localized_p_norm(f, e, p) : value_ls;
        result.witness_a = a0_ls;
        result.witness_d = CMatrix::Identity(n, n);
        result.converged = true;
        result.iterations = 0;
        result.restarts_used = 0;
        return result;
    }

    // iterative convex minimization over the real coordinates of a0
    const CMatrix eye = CMatrix::Identity(n, n);
    auto objective = [&](const RVector& x) {
        return localized_p_norm(f * (eye + from_complex_coords(a0_units, x, n)), e, p);
    };

    const Eigen::Index dim = 2 * static_cast<Eigen::Index>(m);
    std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);

    RVector best_x;
    double best_val = std::numeric_limits<double>::infinity();
    bool best_conv = false;
    int total_iters = 0;
    int restarts_used = 0;

    const int restarts = std::max(1, opts.restarts);
    const int max_evals = opts.max_iterations * (static_cast<int>(dim) + 2);
    for (int r = 0; r < restarts; ++r) {
        RVector x0(dim);
        if (r == 0 && !opts.force_iterative) {
            // start at the exact p = 2 witness
            RVector coords(dim);
            for (std::size_t k = 0; k < m; ++k) {
                const Complex ck = (a0_units[k].adjoint() * a0_ls).trace();
                coords(2 * static_cast<Eigen::Index>(k)) = ck.real();
                coords(2 * static_cast<Eigen::Index>(k) + 1) = ck.imag();
            }
            x0 = coords;
        } else if (r == 0 || r == 1) {
            x0.setZero();
        } else {
            for (Eigen::Index i = 0; i < dim; ++i) x0(i) = gauss(rng);
        }
        const SimplexOutcome run = nelder_mead(objective, x0, 0.25, max_evals, opts.stall_tol);
        ++restarts_used;
        total_iters += run.iterations;
        if (run.value < best_val) {
            best_val = run.value;
            best_x = run.x;
            best_conv = run.converged;
        }
        if (r >= 1 && best_conv && std::abs(run.value - best_val) <= 1e-10 * (best_val + 1e-10))
            break;
    }

    result.value = best_val;
    result.witness_a = from_complex_coords(a0_units, best_x, n);
    result.witness_d = CMatrix::Identity(n, n);
    result.converged = best_conv;
    result.iterations = total_iters;
    result.restarts_used = restarts_used;
    return result;
}

// ---------------------------------------------------------------------------
// delta_min
// ---------------------------------------------------------------------------

DeltaMinResult delta_min(const CMatrix& f, const BlockStructure& bs, PNorm p) {
    if (p.is_inf() || p.p != 2.0)
        throw std::invalid_argument("delta_min: only p = 2 is supported");
    const int n = bs.dim();
    require_dim(f, n, "delta_min");

    const std::vector<CMatrix> a0_units = basis(bs, Subspace::A0);
    std::vector<CMatrix> span_cols;
    span_cols.reserve(a0_units.size());
    for (const CMatrix& b : a0_units) span_cols.push_back(f * b);
    const CMatrix q = column_span_orthonormal(
        stack_columns(span_cols, static_cast<Eigen::Index>(n) * n));

    const std::vector<CMatrix> d_units = basis(bs, Subspace::D);
    CMatrix residuals(static_cast<Eigen::Index>(n) * n, static_cast<Eigen::Index>(d_units.size()));
    for (std::size_t k = 0; k < d_units.size(); ++k) {
        const CVector col = vec((f * d_units[k]).eval());
        residuals.col(static_cast<Eigen::Index>(k)) = col - q * (q.adjoint() * col);
    }

    const Eigen::JacobiSVD<CMatrix> svd(residuals, Eigen::ComputeThinV);
    const RVector s = svd.singularValues();  // descending
    const double sigma_min = s(s.size() - 1);
    const double sigma_max = s(0);
    const CVector c = svd.matrixV().col(s.size() - 1);
    CMatrix witness = CMatrix::Zero(n, n);
    for (std::size_t k = 0; k < d_units.size(); ++k)
        witness += c(static_cast<Eigen::Index>(k)) * d_units[k];
    return DeltaMinResult{sigma_min, sigma_max, std::move(witness)};
}

bool DeltaMinResult::injective() const {
    return sigma_min > tolerances().rank_scale * sigma_max * static_cast<double>(witness_d.rows());
}

// ---------------------------------------------------------------------------
// szego_infimum
// ---------------------------------------------------------------------------

InfimumResult szego_infimum(const CMatrix& h, const BlockStructure& bs, PNorm p,
                            const OptimOptions& opts) {
    p.validate();
    const int n = bs.dim();
    require_dim(h, n, "szego_infimum");
    require_finite(h, "szego_infimum");

    const std::vector<CMatrix> a0_units = basis(bs, Subspace::A0);
    const std::vector<CMatrix> hbasis = hermitian_d_basis(bs);
    const std::size_t m = a0_units.size();
    const Eigen::Index sdim = static_cast<Eigen::Index>(hbasis.size());
    const CMatrix eye = CMatrix::Identity(n, n);

    // least-squares engine for the a-subproblem at p = 2
    std::vector<CMatrix> cols;
    cols.reserve(m);
    for (const CMatrix& b : a0_units) cols.push_back(h * b);
    std::optional<Eigen::ColPivHouseholderQR<CMatrix>> wqr;
    if (m > 0) wqr.emplace(stack_columns(cols, static_cast<Eigen::Index>(n) * n));

    auto center = [&](const CMatrix& s) {
        return (s - (s.trace() / static_cast<double>(n)) * eye).eval();
    };
    auto d_of = [&](const RVector& x) {
        RVector xc = x;
        for (Eigen::Index i = 0; i < xc.size(); ++i) xc(i) = std::clamp(xc(i), -30.0, 30.0);
        return hermitian_exp(center(from_coords_hermitian(hbasis, xc)));
    };
    auto best_a_for = [&](const CMatrix& d) {
        CMatrix a = CMatrix::Zero(n, n);
        if (wqr) {
            const CVector c = wqr->solve(-vec((h * d).eval()));
            for (std::size_t k = 0; k < m; ++k) a += c(static_cast<Eigen::Index>(k)) * a0_units[k];
        }
        return a;
    };
    auto reduced_objective = [&](const RVector& x) {
        const CMatrix d = d_of(x);
        return p_norm(h * (best_a_for(d) + d), PNorm{2.0});
    };

    // warm start: for invertible block-diagonal part, d = det(|Phi_h|) |Phi_h|^{-1}
    // attains the infimum exactly, for every p
    std::optional<RVector> warm;
    if (!opts.force_iterative) {
        const CMatrix ph = phi(h, bs);
        if (is_invertible(ph)) {
            const CMatrix g = modulus(ph);
            const DetResult dg = fk_det(g);
            if (dg.value > 0.0) {
                const CMatrix dstar = func_calc([&](double t) { return dg.value / t; }, g);
                warm = to_coords_hermitian(hbasis, hermitian_log(dstar));
            }
        }
    }

    std::mt19937_64 rng(opts.seed ^ 0xda3e39cb94b95bdbULL);
    std::normal_distribution<double> gauss(0.0, 0.5);
    const int restarts = std::max(1, opts.restarts);

    RVector best_x;
    double best_val = std::numeric_limits<double>::infinity();
    bool best_conv = false;
    int total_iters = 0;
    int restarts_used = 0;
    int consensus = 0;

    for (int r = 0; r < restarts; ++r) {
        RVector x0 = RVector::Zero(sdim);
        if (r == 0 && warm) {
            x0 = *warm;
        } else if ((r == 0 && !warm) || r == 1) {
            x0.setZero();
        } else {
            for (Eigen::Index i = 0; i < sdim; ++i) x0(i) = gauss(rng);
        }
        const DescentOutcome run = gradient_descent(reduced_objective, x0, opts);
        ++restarts_used;
        total_iters += run.iterations;
        const bool improved = run.value < best_val - 1e-14 * (best_val + 1.0);
        if (run.value < best_val) {
            best_val = run.value;
            best_x = run.x;
            best_conv = run.converged;
        }
        // one independent confirming restart is enough to stop early
        if (!improved && run.converged &&
            std::abs(run.value - best_val) <= 1e-6 * (best_val + 1e-12)) {
            if (++consensus >= 1) break;
        }
    }

    CMatrix d = d_of(best_x);
    CMatrix a = best_a_for(d);
    double value = p_norm(h * (a + d), p);
    bool converged = best_conv;
    int iterations = total_iters;

    if (p.is_inf() || p.p != 2.0) {
        // polish the p = 2 solution under the requested norm with a
        // derivative-free search over the joint (a, s) coordinates
        const Eigen::Index jdim = sdim + 2 * static_cast<Eigen::Index>(m);
        auto joint_objective = [&](const RVector& z) {
            const CMatrix dz = d_of(z.head(sdim));
            const CMatrix az = from_complex_coords(a0_units, z.tail(2 * static_cast<Eigen::Index>(m)), n);
            return p_norm(h * (az + dz), p);
        };
        RVector z0(jdim);
        z0.head(sdim) = best_x;
        for (std::size_t k = 0; k < m; ++k) {
            const Complex ck = (a0_units[k].adjoint() * a).trace();
            z0(sdim + 2 * static_cast<Eigen::Index>(k)) = ck.real();
            z0(sdim + 2 * static_cast<Eigen::Index>(k) + 1) = ck.imag();
        }
        const int max_evals = opts.max_iterations * (static_cast<int>(jdim) + 2);
        SimplexOutcome best_run = nelder_mead(joint_objective, z0, 0.1, max_evals, opts.stall_tol);
        total_iters += best_run.iterations;
        for (int r = 1; r < std::max(1, opts.restarts / 4); ++r) {
            RVector zr(jdim);
            for (Eigen::Index i = 0; i < jdim; ++i) zr(i) = gauss(rng);
            const SimplexOutcome run = nelder_mead(joint_objective, zr, 0.5, max_evals, opts.stall_tol);
            total_iters += run.iterations;
            ++restarts_used;
            if (run.value < best_run.value) best_run = run;
        }
        d = d_of(best_run.x.head(sdim));
        a = from_complex_coords(a0_units, best_run.x.tail(2 * static_cast<Eigen::Index>(m)), n);
        value = best_run.value;
        converged = best_run.converged;
        iterations = total_iters;
    }

    InfimumResult result;
    result.value = value;
    result.witness_a = std::move(a);
    result.witness_d = std::move(d);
    result.converged = converged;
    result.iterations = iterations;
    result.restarts_used = restarts_used;
    return result;
}

}  // namespace subdiag

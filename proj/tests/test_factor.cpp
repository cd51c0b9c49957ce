#include <doctest.h>

#include <cmath>

#include "subdiag/determinant.hpp"
#include "subdiag/factor.hpp"
#include "subdiag/outerness.hpp"
#include "test_helpers.hpp"

using namespace subdiag;
using namespace testutil;

TEST_CASE("householder qr") {
    std::mt19937_64 rng(3);
    for (int n : {1, 2, 5}) {
        const BlockStructure bs = BlockStructure::scalar(n);
        for (int i = 0; i < 10; ++i) {
            const CMatrix x = random_element(bs, RandomKind::M, rng);
            const QRFactors qr = householder_qr(x);
            CHECK(op_norm(qr.q * qr.r - x) < scaled_tol(x));
            CHECK(op_norm(qr.q.adjoint() * qr.q - CMatrix::Identity(n, n)) < 1e-12);
            for (int r = 0; r < n; ++r) {
                CHECK(qr.r(r, r).imag() == 0.0);
                CHECK(qr.r(r, r).real() >= 0.0);
                for (int c = 0; c < r; ++c) CHECK(std::abs(qr.r(r, c)) == 0.0);
            }
        }
    }
}

TEST_CASE("inner-outer factorization") {
    const BlockStructure bs = BlockStructure::scalar(2);

    const CMatrix flip = real2(0, 1, 1, 0);
    const FactorizationResult rf = inner_outer(flip, bs);
    CHECK(approx_equal(rf.u, flip, 1e-10));
    CHECK(approx_equal(rf.h, CMatrix::Identity(2, 2), 1e-10));

    // Gram-Schmidt oracle: h*h must equal f*f, diagonal positive
    const CMatrix f = real2(2, 1, 1, 2);
    const FactorizationResult r = inner_outer(f, bs);
    CHECK(r.h(0, 0).real() == doctest::Approx(std::sqrt(5.0)));
    CHECK(r.h(0, 1).real() == doctest::Approx(4.0 / std::sqrt(5.0)));
    CHECK(r.h(1, 1).real() == doctest::Approx(3.0 / std::sqrt(5.0)));
    CHECK(std::abs(r.h(1, 0)) < 1e-12);
    CHECK(op_norm(r.h.adjoint() * r.h - f.adjoint() * f) < 1e-10);
    CHECK(r.residual < 1e-10 * 2 * op_norm(f));
    CHECK(r.u_unitarity_defect < 1e-12);
    CHECK(r.h_outer);

    try {
        inner_outer(diag2(1, 0), bs);
        FAIL("expected NotFactorizableError");
    } catch (const NotFactorizableError& e) {
        CHECK(approx_equal((e.witness_d() * e.witness_d().adjoint()).eval(), diag2(0, 1), 1e-9));
    }
}

TEST_CASE("inner factor of triangular input stays in A and in D") {
    std::mt19937_64 rng(51);
    for (const BlockStructure& bs : {BlockStructure::scalar(3), BlockStructure({2, 1})}) {
        for (int i = 0; i < 10; ++i) {
            const CMatrix h = invertible_in(bs, RandomKind::A, rng);
            const FactorizationResult r = inner_outer(h, bs);
            CHECK(member_of(r.u, bs, Subspace::A, 1e-9));
            CHECK(member_of(r.u, bs, Subspace::D, 1e-9));  // unitary + triangular
            CHECK(member_of(r.h, bs, Subspace::A, 1e-9));
            // Phi(h) >= 0 normalization
            const CMatrix ph = phi(r.h, bs);
            CHECK(op_norm(ph - ph.adjoint()) < 1e-9);
            CHECK(hermitian_eig(ph).values(0) > -1e-9);
        }
    }
}

TEST_CASE("riesz-szego positive factorization") {
    const BlockStructure bs = BlockStructure::scalar(2);
    const FactorizationResult rd = riesz_szego_positive(diag2(2, 3), bs);
    CHECK(approx_equal(rd.h, diag2(2, 3), 1e-10));

    const CMatrix f = real2(2, 1, 1, 2);
    const FactorizationResult r = riesz_szego_positive(f, bs);
    // oracle: h*h = f^2 = [[5,4],[4,5]] solved by hand
    CHECK(op_norm(r.h.adjoint() * r.h - f * f) < 1e-10);
    CHECK(r.h(0, 0).real() == doctest::Approx(std::sqrt(5.0)));
    CHECK(op_norm(modulus(r.h) - f) < 1e-10);
    CHECK(r.h_outer);

    CHECK_THROWS_AS(riesz_szego_positive(diag2(1, 0), bs), NotFactorizableError);
    CHECK_THROWS_AS(riesz_szego_positive(real2(0, 1, 0, 0), bs), std::invalid_argument);
}

TEST_CASE("reverse cholesky") {
    CHECK(approx_equal(reverse_cholesky(CMatrix::Identity(2, 2)), CMatrix::Identity(2, 2)));
    CHECK(approx_equal(reverse_cholesky(diag2(4, 9)), diag2(2, 3)));

    // brute-force 3-parameter oracle for [[5,4],[4,5]]: a = [[3,4],[0,5]]/sqrt(5)
    const CMatrix g = real2(5, 4, 4, 5);
    const CMatrix a = reverse_cholesky(g);
    CHECK(op_norm(a * a.adjoint() - g) < 1e-12);
    CHECK(a(0, 0).real() == doctest::Approx(3.0 / std::sqrt(5.0)));
    CHECK(a(0, 1).real() == doctest::Approx(4.0 / std::sqrt(5.0)));
    CHECK(a(1, 1).real() == doctest::Approx(std::sqrt(5.0)));
    CHECK(std::abs(a(1, 0)) == 0.0);

    std::mt19937_64 rng(53);
    for (int i = 0; i < 10; ++i) {
        const CMatrix pd =
            random_element(BlockStructure::scalar(4), RandomKind::PositiveDefinite, rng);
        const CMatrix u = reverse_cholesky(pd);
        CHECK(op_norm(u * u.adjoint() - pd) < scaled_tol(pd) * 10);
        for (int r = 1; r < 4; ++r)
            for (int c = 0; c < r; ++c) CHECK(std::abs(u(r, c)) == 0.0);
    }
    CHECK_THROWS_AS(reverse_cholesky(diag2(1, -1)), std::invalid_argument);
}

TEST_CASE("uniform outer sequence on closed-form instances") {
    const BlockStructure bs = BlockStructure::scalar(2);
    const CMatrix h = diag2(0.5, 1);

    const std::vector<UniformOuterStep> s3 = uniform_outer_sequence(h, bs, {3}, PNorm{2.0});
    REQUIRE(s3.size() == 1);
    CHECK(approx_equal(s3[0].k_n, diag2(2, 1), 1e-12));
    CHECK(approx_equal(s3[0].a_n, diag2(2, 1), 1e-12));
    CHECK(s3[0].p_dist_to_one == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s3[0].op_norm_ha == doctest::Approx(1.0));
    CHECK(s3[0].det_ha == doctest::Approx(1.0));

    const std::vector<UniformOuterStep> s1 = uniform_outer_sequence(h, bs, {1}, PNorm{2.0});
    CHECK(approx_equal(s1[0].k_n, CMatrix::Identity(2, 2), 1e-12));
    CHECK(s1[0].p_dist_to_one == doctest::Approx(std::sqrt(0.125)).epsilon(1e-10));

    // unitary h: the normalized step is exact already at n = 1
    const CMatrix w = mat2(Complex(0, 1), Complex(0, 0), Complex(0, 0), Complex(-1, 0));
    const std::vector<UniformOuterStep> sw = uniform_outer_sequence(w, bs, {1}, PNorm{2.0});
    CHECK(sw[0].p_dist_to_one < 1e-12);

    CHECK_THROWS_AS(uniform_outer_sequence(diag2(1, 0), bs, {1}, PNorm{2.0}), std::domain_error);
    CHECK_THROWS_AS(uniform_outer_sequence(real2(0, 0, 1, 0), bs, {1}, PNorm{2.0}),
                    std::domain_error);
}

TEST_CASE("uniform outer sequence contracts on random outers") {
    std::mt19937_64 rng(57);
    for (const BlockStructure& bs :
         {BlockStructure::scalar(3), BlockStructure({2, 1}), BlockStructure::full(3)}) {
        for (int i = 0; i < 5; ++i) {
            CMatrix h = invertible_in(bs, RandomKind::A, rng, 1e3);
            h /= op_norm(h);
            const RVector sv = singular_values(h);
            const std::vector<UniformOuterStep> steps =
                uniform_outer_sequence(h, bs, default_outer_schedule(h), PNorm{2.0});
            double prev_det = -1.0;
            for (const UniformOuterStep& st : steps) {
                CHECK(st.op_norm_ha <= 1.0 + 1e-10);
                CHECK(member_of(st.a_n, bs, Subspace::A, 1e-9));
                CHECK(op_norm(modulus(st.a_n.adjoint()) - st.k_n) < scaled_tol(st.k_n) * 10);
                CHECK(op_norm(st.u_n.adjoint() * st.u_n - CMatrix::Identity(bs.dim(), bs.dim())) <
                      1e-9);
                CHECK(st.det_ha <= 1.0 + 1e-10);
                CHECK(st.det_ha >= prev_det - 1e-10);
                prev_det = std::max(prev_det, st.det_ha);

                const CMatrix ha = h * st.a_n;
                const double lhs = std::pow(p_norm(ha - CMatrix::Identity(bs.dim(), bs.dim()),
                                                   PNorm{2.0}),
                                            2.0);
                CHECK(lhs <= 2.0 * (1.0 - tau(ha).real()) + 1e-10);

                if (st.n >= 2.0 / sv(0)) {
                    const CMatrix ainv =
                        st.a_n.partialPivLu().solve(CMatrix::Identity(bs.dim(), bs.dim()));
                    CHECK(p_norm(ainv - h, PNorm{2.0}) <= 1e-6);
                }
                if (1.0 / st.n < sv(0)) CHECK(st.p_dist_to_one <= 1e-8);
            }
            CHECK(prev_det == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("diagonally commuting detection") {
    const BlockStructure full = BlockStructure::full(3);
    std::mt19937_64 rng(61);
    const CMatrix h = invertible_in(full, RandomKind::M, rng);
    const DiagCommutingResult r = diag_commuting_check(h, full);
    CHECK(r.is_dc);  // A = M = D: the polar phase always works
    REQUIRE(r.u.has_value());
    CHECK(member_of(*r.u, full, Subspace::D));

    const BlockStructure bs = BlockStructure::scalar(2);
    const DiagCommutingResult rd = diag_commuting_check(diag2(1, 2), bs);
    CHECK(rd.is_dc);
    CHECK(approx_equal(*rd.u, CMatrix::Identity(2, 2)));

    const DiagCommutingResult rn = diag_commuting_check(real2(1, 1, 0, 2), bs);
    CHECK_FALSE(rn.is_dc);
}

TEST_CASE("strongly outer approximants") {
    const BlockStructure full = BlockStructure::full(2);
    const CMatrix h = diag2(1, 0.3);
    const CMatrix id = CMatrix::Identity(2, 2);

    const std::vector<CMatrix> hs = strongly_outer_approximants(h, full, id, {2, 4}, PNorm{2.0});
    REQUIRE(hs.size() == 2);
    CHECK(approx_equal(hs[0], diag2(1, 0.5), 1e-12));  // e2 kills the 0.3 eigenvalue
    CHECK(approx_equal(hs[1], h, 1e-12));              // e4 is full

    CHECK_THROWS_AS(strongly_outer_approximants(diag2(1, 0), full, id, {2}, PNorm{2.0}),
                    std::domain_error);

    // identity |Phi(h_n)|^2 = |Phi(h)|^2 e_n + n^{-2} (1 - e_n) on random strata
    std::mt19937_64 rng(67);
    for (const BlockStructure& bs : {BlockStructure::full(3), BlockStructure::scalar(3)}) {
        const CMatrix g = bs.block_count() == 1 ? invertible_in(bs, RandomKind::M, rng)
                                                : invertible_in(bs, RandomKind::D, rng);
        const DiagCommutingResult dc = diag_commuting_check(g, bs);
        REQUIRE(dc.is_dc);
        const CMatrix mod_pg = modulus(phi(g, bs));
        const std::vector<int> ns = {1, 2, 4, 8};
        const std::vector<CMatrix> gs = strongly_outer_approximants(g, bs, *dc.u, ns, PNorm{2.0});
        for (std::size_t i = 0; i < gs.size(); ++i) {
            const CMatrix en = spectral_projection_above(mod_pg, 1.0 / ns[i]).matrix();
            const CMatrix lhs = modulus(phi(gs[i], bs));
            const CMatrix rhs = mod_pg * mod_pg * en +
                                (CMatrix::Identity(3, 3) - en) / (double(ns[i]) * ns[i]);
            CHECK(op_norm(lhs * lhs - rhs) < 1e-10 * std::max(1.0, op_norm(g) * op_norm(g)));
            CHECK(fk_det(gs[i]).value > 0.0);
        }
    }
}

#include <doctest.h>

#include "subdiag/algebra.hpp"
#include "subdiag/lp_metrics.hpp"
#include "test_helpers.hpp"

using namespace subdiag;
using namespace testutil;

TEST_CASE("block structure bookkeeping") {
    const BlockStructure bs({2, 1});
    CHECK(bs.dim() == 3);
    CHECK(bs.block_count() == 2);
    CHECK(bs.block_of(0) == 0);
    CHECK(bs.block_of(1) == 0);
    CHECK(bs.block_of(2) == 1);
    CHECK(bs.block_offset(1) == 2);
    CHECK_THROWS_AS(BlockStructure({2, 0}), std::invalid_argument);
    CHECK_THROWS_AS(BlockStructure({}), std::invalid_argument);
}

TEST_CASE("tau is the normalized trace") {
    CHECK(tau(CMatrix::Identity(2, 2)).real() == doctest::Approx(1.0));
    CHECK(tau(diag2(1, 3)).real() == doctest::Approx(2.0));
    CHECK(std::abs(tau(real2(0, 1, 0, 0))) == doctest::Approx(0.0));

    // tracial: tau(xy) = tau(yx)
    std::mt19937_64 rng(7);
    const BlockStructure bs = BlockStructure::scalar(4);
    const CMatrix x = random_element(bs, RandomKind::M, rng);
    const CMatrix y = random_element(bs, RandomKind::M, rng);
    CHECK(std::abs(tau((x * y).eval()) - tau((y * x).eval())) < 1e-12 * op_norm(x) * op_norm(y));
}

TEST_CASE("phi compresses to the block diagonal") {
    const BlockStructure bs = BlockStructure::scalar(2);
    CHECK(approx_equal(phi(real2(1, 5, 0, 2), bs), diag2(1, 2)));

    const BlockStructure full = BlockStructure::full(2);
    const CMatrix x = real2(1, 5, 3, 2);
    CHECK(approx_equal(phi(x, full), x));

    // multiplicativity on A, checked by direct multiplication
    const CMatrix a = real2(1, 1, 0, 1);
    const CMatrix b = real2(2, 3, 0, 4);
    CHECK(approx_equal(phi((a * b).eval(), bs), diag2(2, 4)));
    CHECK(approx_equal(phi((a * b).eval(), bs), (phi(a, bs) * phi(b, bs)).eval()));
}

TEST_CASE("phi is idempotent, trace preserving and a bimodule map") {
    std::mt19937_64 rng(11);
    const BlockStructure bs({2, 1, 2});
    const CMatrix x = random_element(bs, RandomKind::M, rng);
    const CMatrix px = phi(x, bs);
    CHECK(approx_equal(phi(px, bs), px));
    CHECK(std::abs(tau(px) - tau(x)) < 1e-12);

    const CMatrix d1 = random_element(bs, RandomKind::D, rng);
    const CMatrix d2 = random_element(bs, RandomKind::D, rng);
    CHECK(approx_equal(phi((d1 * x * d2).eval(), bs), (d1 * px * d2).eval(),
                       1e-10 * op_norm(d1) * op_norm(x) * op_norm(d2) * 5));
}

TEST_CASE("membership predicates") {
    const BlockStructure bs = BlockStructure::scalar(2);
    const CMatrix t = real2(1, 5, 0, 2);
    CHECK(member_of(t, bs, Subspace::A));
    CHECK_FALSE(member_of(t, bs, Subspace::A0));
    CHECK_FALSE(member_of(t, bs, Subspace::D));

    CHECK(member_of(real2(0, 5, 0, 0), bs, Subspace::A0));

    const BlockStructure bs21({2, 1});
    CMatrix x = CMatrix::Zero(3, 3);
    x(2, 0) = 1.0;
    CHECK_FALSE(member_of(x, bs21, Subspace::A));
    x(2, 0) = 0.0;
    x(1, 0) = 1.0;  // inside the first 2x2 block
    CHECK(member_of(x, bs21, Subspace::A));
}

TEST_CASE("basis dimensions count matrix units") {
    const BlockStructure bs11 = BlockStructure::scalar(2);
    CHECK(basis(bs11, Subspace::A).size() == 3);
    CHECK(basis(bs11, Subspace::A0).size() == 1);
    CHECK(basis(bs11, Subspace::D).size() == 2);

    const BlockStructure bs21({2, 1});
    CHECK(basis(bs21, Subspace::A).size() == 7);
    CHECK(basis(bs21, Subspace::D).size() == 5);
    CHECK(basis(bs21, Subspace::A0).size() == 2);

    const BlockStructure full = BlockStructure::full(3);
    CHECK(basis(full, Subspace::A).size() == 9);
    CHECK(basis(full, Subspace::D).size() == 9);
    CHECK(basis(full, Subspace::A0).empty());

    for (const CMatrix& e : basis(bs21, Subspace::A)) CHECK(member_of(e, bs21, Subspace::A));
    for (const CMatrix& e : basis(bs21, Subspace::A0)) CHECK(member_of(e, bs21, Subspace::A0));
}

TEST_CASE("random elements respect membership and determinism") {
    const BlockStructure bs = BlockStructure::scalar(2);
    std::mt19937_64 rng1(42), rng2(42);
    const CMatrix d = random_element(bs, RandomKind::D, rng1);
    CHECK(member_of(d, bs, Subspace::D));

    const CMatrix d2 = random_element(bs, RandomKind::D, rng2);
    CHECK((d - d2).cwiseAbs().maxCoeff() == 0.0);  // identical draw from identical state

    std::mt19937_64 rng3(99);
    const CMatrix u = random_element(bs, RandomKind::Unitary, rng3);
    CHECK(op_norm(u.adjoint() * u - CMatrix::Identity(2, 2)) <= 1e-12);

    const CMatrix p = random_element(bs, RandomKind::PositiveDefinite, rng3);
    const RVector eigs = hermitian_eig(p).values;
    CHECK(eigs(0) > 0.0);
}

TEST_CASE("phi is contractive in every p-norm") {
    std::mt19937_64 rng(3);
    for (const BlockStructure& bs : {BlockStructure::scalar(3), BlockStructure({2, 2})}) {
        for (int i = 0; i < 20; ++i) {
            const CMatrix x = random_element(bs, RandomKind::M, rng);
            for (double p : {1.0, 2.0}) {
                CHECK(p_norm(phi(x, bs), PNorm{p}) <= p_norm(x, PNorm{p}) + 1e-12);
            }
            CHECK(p_norm(phi(x, bs), PNorm::inf()) <= p_norm(x, PNorm::inf()) + 1e-12);
        }
    }
}

TEST_CASE("A plus A-star spans all of M") {
    for (const BlockStructure& bs :
         {BlockStructure::scalar(3), BlockStructure({2, 1}), BlockStructure::full(3)}) {
        const std::vector<CMatrix> ab = basis(bs, Subspace::A);
        const int n = bs.dim();
        CMatrix w(static_cast<Eigen::Index>(n) * n, 2 * static_cast<Eigen::Index>(ab.size()));
        for (std::size_t k = 0; k < ab.size(); ++k) {
            w.col(static_cast<Eigen::Index>(k)) =
                Eigen::Map<const CVector>(ab[k].data(), ab[k].size());
            const CMatrix adj = ab[k].adjoint();
            w.col(static_cast<Eigen::Index>(ab.size() + k)) =
                Eigen::Map<const CVector>(adj.data(), adj.size());
        }
        CHECK(w.colPivHouseholderQr().rank() == static_cast<Eigen::Index>(n) * n);
    }
}

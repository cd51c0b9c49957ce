#include <doctest.h>

#include <cmath>

#include "subdiag/determinant.hpp"
#include "subdiag/lp_metrics.hpp"
#include "test_helpers.hpp"

using namespace subdiag;
using namespace testutil;

TEST_CASE("p-norms") {
    CHECK(p_norm(CMatrix::Identity(3, 3), PNorm{1.0}) == doctest::Approx(1.0));
    CHECK(p_norm(CMatrix::Identity(3, 3), PNorm::inf()) == doctest::Approx(1.0));
    CHECK(p_norm(diag2(0, 2), PNorm{2.0}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(p_norm(diag2(0, 2), PNorm::inf()) == doctest::Approx(2.0));
    CHECK_THROWS_AS(p_norm(diag2(1, 1), PNorm{0.5}), std::invalid_argument);

    // monotone in p under the normalized trace
    std::mt19937_64 rng(8);
    for (int i = 0; i < 20; ++i) {
        const CMatrix x = random_element(BlockStructure::scalar(4), RandomKind::M, rng);
        const double n1 = p_norm(x, PNorm{1.0});
        const double n15 = p_norm(x, PNorm{1.5});
        const double n2 = p_norm(x, PNorm{2.0});
        const double ni = p_norm(x, PNorm::inf());
        CHECK(n1 <= n15 + 1e-12);
        CHECK(n15 <= n2 + 1e-12);
        CHECK(n2 <= ni + 1e-12);
    }
}

TEST_CASE("localized seminorm") {
    const CMatrix x = real2(1, 5, 0, 2);
    const Projection id = Projection::identity(2);
    CHECK(localized_p_norm(x, id, PNorm{2.0}) == doctest::Approx(p_norm(x, PNorm{2.0})));

    const Projection e1(diag2(1, 0));
    CHECK(localized_p_norm(diag2(3, 5), e1, PNorm{2.0}) == doctest::Approx(3.0));

    const Projection e2(diag2(0, 1));
    CHECK(localized_p_norm(x, e2, PNorm{2.0}) == doctest::Approx(std::sqrt(29.0)));

    CHECK_THROWS_AS(localized_p_norm(x, Projection(CMatrix::Zero(2, 2)), PNorm{2.0}),
                    std::domain_error);
    CHECK_THROWS_AS(Projection(real2(1, 1, 0, 1)), std::invalid_argument);
}

TEST_CASE("distance to the right ideal, p = 2 closed form") {
    const BlockStructure bs = BlockStructure::scalar(2);
    const Projection id = Projection::identity(2);

    const CMatrix f = real2(1, 5, 0, 2);
    const InfimumResult r = dist_to_right_ideal(f, bs, id, PNorm{2.0});
    CHECK(r.value == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
    CHECK(r.converged);
    CHECK(approx_equal(r.witness_a, real2(0, -5, 0, 0), 1e-9));
    CHECK(member_of(r.witness_a, bs, Subspace::A0));

    // f A0 = {0}: the distance is just ||f||_2
    const CMatrix g = real2(0, 1, 0, 1);
    CHECK(dist_to_right_ideal(g, bs, id, PNorm{2.0}).value == doctest::Approx(1.0));

    CHECK(dist_to_right_ideal(CMatrix::Identity(2, 2), bs, id, PNorm{2.0}).value ==
          doctest::Approx(1.0));
    CHECK(dist_to_right_ideal(CMatrix::Identity(2, 2), bs, id, PNorm{1.0}).value ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("distance to the right ideal across p") {
    // for outer h the infimum equals ||Phi(h)||_p at every p
    std::mt19937_64 rng(23);
    const BlockStructure bs = BlockStructure::scalar(3);
    const Projection id = Projection::identity(3);
    for (int i = 0; i < 5; ++i) {
        const CMatrix h = invertible_in(bs, RandomKind::A, rng);
        for (double p : {1.0, 1.5, 2.0}) {
            const InfimumResult r = dist_to_right_ideal(h, bs, id, PNorm{p});
            const double expect = p_norm(phi(h, bs), PNorm{p});
            CHECK(r.value == doctest::Approx(expect).epsilon(1e-7));
            CHECK(r.value >= expect - 1e-12);
        }
    }

    // localized variant: e of rank 1 on the second coordinate; the (1,2)
    // entry is free so only the second diagonal entry survives
    const CMatrix f = real2(1, 5, 0, 2);
    const Projection e2(diag2(0, 1));
    const InfimumResult r = dist_to_right_ideal(f, BlockStructure::scalar(2), e2, PNorm{2.0});
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("delta_min flags the injectivity obstruction") {
    const BlockStructure bs = BlockStructure::scalar(2);

    std::mt19937_64 rng(29);
    const CMatrix f = invertible_in(bs, RandomKind::M, rng);
    CHECK(delta_min(f, bs).injective());

    const DeltaMinResult r1 = delta_min(diag2(1, 0), bs);
    CHECK_FALSE(r1.injective());
    CHECK(approx_equal((r1.witness_d * r1.witness_d.adjoint()).eval(), diag2(0, 1), 1e-9));

    const DeltaMinResult r2 = delta_min(real2(0, 1, 0, 1), bs);
    CHECK_FALSE(r2.injective());
    CHECK(approx_equal((r2.witness_d * r2.witness_d.adjoint()).eval(), diag2(1, 0), 1e-9));

    CHECK_THROWS_AS(delta_min(f, bs, PNorm{1.0}), std::invalid_argument);
}

TEST_CASE("szego infimum on closed-form instances") {
    const BlockStructure bs = BlockStructure::scalar(2);
    OptimOptions opts;
    opts.seed = 5;

    const InfimumResult r = szego_infimum(real2(1, 5, 0, 2), bs, PNorm{2.0}, opts);
    CHECK(r.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    CHECK(member_of(r.witness_a, bs, Subspace::A0));
    CHECK(member_of(r.witness_d, bs, Subspace::D));
    // the witness d is positive definite and determinant-normalized
    CHECK(fk_det(r.witness_d).value == doctest::Approx(1.0).epsilon(1e-9));

    CHECK(szego_infimum(CMatrix::Identity(2, 2), bs, PNorm{2.0}, opts).value ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(szego_infimum((3.0 * CMatrix::Identity(2, 2)).eval(), bs, PNorm{2.0}, opts).value ==
          doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("szego infimum matches the determinant on random triangulars") {
    std::mt19937_64 rng(31);
    for (int n : {2, 3, 4}) {
        const BlockStructure bs = BlockStructure::scalar(n);
        for (int i = 0; i < 4; ++i) {
            const CMatrix h = invertible_in(bs, RandomKind::A, rng);
            OptimOptions opts;
            opts.seed = rng();
            const InfimumResult r = szego_infimum(h, bs, PNorm{2.0}, opts);
            const double expect = fk_det(h).value;
            CHECK(r.value == doctest::Approx(expect).epsilon(1e-3));
            CHECK(r.value >= expect - 1e-6 * expect);
            CHECK(r.restarts_used <= 16);
        }
    }
    // coarse blocks: A = M = D, the infimum is still the determinant
    const BlockStructure full = BlockStructure::full(3);
    const CMatrix h = invertible_in(full, RandomKind::M, rng);
    OptimOptions opts;
    opts.seed = 77;
    CHECK(szego_infimum(h, full, PNorm{2.0}, opts).value ==
          doctest::Approx(fk_det(h).value).epsilon(1e-3));
}

TEST_CASE("szego infimum at p = 1 and p = inf") {
    const BlockStructure bs = BlockStructure::scalar(2);
    OptimOptions opts;
    opts.seed = 9;
    opts.restarts = 8;
    const CMatrix h = real2(1, 5, 0, 2);
    for (PNorm p : {PNorm{1.0}, PNorm::inf()}) {
        const InfimumResult r = szego_infimum(h, bs, p, opts);
        CHECK(r.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-4));
    }
}

#include "doctest.h"

#include "phigamma/herr.hpp"
#include "phigamma/rng.hpp"

using namespace phigamma;

namespace {

LocalFieldPtr make_qp(int p) { return LocalField::make(FieldParams{p, 1, 1, {}, {}}); }

LaurentSeriesAL exact_const(const LocalFieldPtr& F, std::int64_t n, int m) {
    return LaurentSeriesAL::monomial(F, OLElement::from_int(F, n, m), 0, m,
                                     -LaurentSeriesAL::kExactWindow, LaurentSeriesAL::kExactWindow);
}

// the trivial mod-p module over Q_3 with Delta = mu_2 and gamma = 1+p
PhiGammaModule trivial_q3() {
    PhiGammaModule M;
    M.F = make_qp(3);
    M.rank = 1;
    M.base = BaseRing::EL;
    M.m = 1;
    M.phi_mat = {{exact_const(M.F, 1, 1)}};
    M.gammas = {{4, {{exact_const(M.F, 1, 1)}}}};
    M.deltas = {{-1, {{exact_const(M.F, 1, 1)}}}};
    M.profile = PrecisionProfile{1, -12, 24, 2};
    return M;
}

PhiGammaModule unramified_twist_q3(std::int64_t c) {
    PhiGammaModule M = trivial_q3();
    M.phi_mat = {{exact_const(M.F, c, 1)}};
    return M;
}

}  // namespace

TEST_CASE("is_etale: identity, pi-scaled, unit-scaled") {
    auto F = make_qp(3);
    PhiGammaModule M = trivial_q3();
    CHECK(is_etale(M).etale);

    PhiGammaModule bad = M;
    bad.base = BaseRing::AL;
    bad.m = 2;
    bad.phi_mat = {{exact_const(F, 3, 2)}};  // pi * identity: determinant not a unit
    CHECK(!is_etale(bad).etale);

    PhiGammaModule twist = unramified_twist_q3(2);
    CHECK(is_etale(twist).etale);
}

TEST_CASE("delta_invariants validates and marks the module") {
    PhiGammaModule M = trivial_q3();
    auto out = delta_invariants(M);
    CHECK(out.delta_projected);

    // order divisible by p is rejected: fake a 3-element torsion list over Q_3
    PhiGammaModule bad = M;
    bad.deltas = {{-1, bad.phi_mat}, {2, bad.phi_mat}};
    CHECK_THROWS_AS(delta_invariants(bad), DeltaOrderDivisibleByPError);
}

TEST_CASE("koszul shape and d^2 = 0 on sampled vectors") {
    PhiGammaModule M = trivial_q3();
    HerrComplex H = koszul_complex(M);
    CHECK(H.d == 1);
    CHECK(H.degree_multiplicities == std::vector<int>{1, 2, 1});
    Report rep = H.check_d_squared(99, 6);
    CHECK(rep.all_ok());
}

TEST_CASE("trivial mod-3 module over Q_3 has (h0,h1,h2) = (1,2,0)") {
    PhiGammaModule M = delta_invariants(trivial_q3());
    StabilizationPolicy pol;
    pol.stages = 3;
    pol.margin = 6;
    CohomologyReport rep = cohomology_mod_pi(M, pol);
    REQUIRE(rep.stabilized);
    CHECK(rep.dims == std::vector<int>{1, 2, 0});
}

TEST_CASE("unramified twist over Q_3 has (h0,h1,h2) = (0,1,0)") {
    PhiGammaModule M = delta_invariants(unramified_twist_q3(2));
    StabilizationPolicy pol;
    pol.stages = 3;
    pol.margin = 6;
    CohomologyReport rep = cohomology_mod_pi(M, pol);
    REQUIRE(rep.stabilized);
    CHECK(rep.dims == std::vector<int>{0, 1, 0});
}

TEST_CASE("module document round trip") {
    PhiGammaModule M = trivial_q3();
    std::string text = M.str();
    PhiGammaModule back = PhiGammaModule::parse(M.F, text);
    CHECK(back.rank == M.rank);
    CHECK(back.gammas.size() == 1);
    CHECK(back.deltas.size() == 1);
    CHECK(back.gammas[0].first == 4);
    CHECK(back.str() == text);
}

#include "doctest.h"

#include "phigamma/lubin_tate.hpp"
#include "phigamma/rng.hpp"

using namespace phigamma;

namespace {

LocalFieldPtr Q2() { return LocalField::make(FieldParams{2, 1, 1, {}, {}}); }
LocalFieldPtr Q3() { return LocalField::make(FieldParams{3, 1, 1, {}, {}}); }

// (1+Z)^a - 1 truncated to (pi^m, Z^N); the multiplicative-group oracle
// for L = Q_2, f = 2Z + Z^2.
PowerSeries binomial_oracle(const LocalFieldPtr& F, std::int64_t a, std::int64_t N, int m) {
    PowerSeries r(F, m, N);
    // binomial coefficients C(a, k) as exact integers
    std::int64_t c = 1;
    for (std::int64_t k = 1; k < N; ++k) {
        c = c * (a - k + 1) / k;
        r.set_coeff(k, OLElement::from_int(F, c, m));
    }
    return r;
}

}  // namespace

TEST_CASE("lt_frobenius_series is pi Z + Z^q") {
    auto F2 = Q2();
    PowerSeries f = lt_frobenius_series(F2, 4, 3);
    CHECK(f.coeff(1) == OLElement::from_int(F2, 2, 3));
    CHECK(f.coeff(2) == OLElement::one(F2, 3));
    for (std::int64_t k : {0, 3}) CHECK(f.coeff(k).is_zero());

    auto F3 = Q3();
    PowerSeries g = lt_frobenius_series(F3, 4, 2);
    CHECK(g.coeff(1) == OLElement::from_int(F3, 3, 2));
    CHECK(g.coeff(3) == OLElement::one(F3, 2));
    CHECK(g.coeff(2).is_zero());
}

TEST_CASE("group law over Q_2 is X + Y + XY (multiplicative group)") {
    auto F = Q2();
    BivariateSeries law = lt_group_law(F, 3, 3);
    CHECK(law.coeff(1, 0) == OLElement::one(F, 3));
    CHECK(law.coeff(0, 1) == OLElement::one(F, 3));
    CHECK(law.coeff(1, 1) == OLElement::one(F, 3));
    CHECK(law.coeff(2, 0).is_zero());
    CHECK(law.coeff(0, 2).is_zero());

    // and to higher degree the only nonzero coefficient stays XY
    BivariateSeries law8 = lt_group_law(F, 8, 3);
    for (const auto& [k, c] : law8.coeffs()) {
        bool expected = (k == std::pair<std::int64_t, std::int64_t>{1, 0}) ||
                        (k == std::pair<std::int64_t, std::int64_t>{0, 1}) ||
                        (k == std::pair<std::int64_t, std::int64_t>{1, 1});
        CHECK(expected);
    }
}

TEST_CASE("group law over Q_3 has no degree-2 term") {
    auto F = Q3();
    BivariateSeries law = lt_group_law(F, 3, 2);
    CHECK(law.coeff(1, 1).is_zero());
    CHECK(law.coeff(2, 0).is_zero());
    CHECK(law.coeff(0, 2).is_zero());
}

TEST_CASE("F(X, 0) = X: the group law has no pure-X terms beyond X") {
    auto F = Q3();
    BivariateSeries law = lt_group_law(F, 8, 2);
    for (const auto& [k, c] : law.coeffs()) {
        if (k.second == 0) CHECK(k.first == 1);
        if (k.first == 0) CHECK(k.second == 1);
    }
    CHECK(law.is_symmetric());
}

TEST_CASE("[1](Z) = Z and [pi](Z) = f(Z)") {
    auto F = Q3();
    PowerSeries one_series = lt_mult_by_int(F, 1, 6, 2);
    CHECK(one_series.coeff(1) == OLElement::one(F, 2));
    for (std::int64_t k = 2; k < 6; ++k) CHECK(one_series.coeff(k).is_zero());

    PowerSeries pi_series = lt_mult_by(OLElement::from_int(F, 3, 8), 6, 2);
    CHECK(pi_series == lt_frobenius_series(F, 6, 2));
}

TEST_CASE("[a](Z) = (1+Z)^a - 1 over Q_2 for a in {2,3,5}") {
    auto F = Q2();
    for (std::int64_t a : {2, 3, 5}) {
        PowerSeries got = lt_mult_by_int(F, a, 8, 3);
        PowerSeries expect = binomial_oracle(F, a, 8, 3);
        CHECK(got == expect);
    }
    // spec-pinned: [3](Z) = 3Z + 3Z^2 + Z^3
    PowerSeries three = lt_mult_by_int(F, 3, 4, 3);
    CHECK(three.coeff(1) == OLElement::from_int(F, 3, 3));
    CHECK(three.coeff(2) == OLElement::from_int(F, 3, 3));
    CHECK(three.coeff(3) == OLElement::one(F, 3));
}

TEST_CASE("[pi](Z) = Z^q mod pi") {
    for (auto F : {Q2(), Q3()}) {
        PowerSeries f = lt_frobenius_series(F, 10, 3);
        for (const auto& [k, c] : f.coeffs()) {
            if (k == F->q())
                CHECK(c.reduce_mod_pi().is_one());
            else
                CHECK(c.reduce_mod_pi().is_zero());
        }
    }
}

TEST_CASE("lt_compose([a],[b]) = [ab] and lt_add([a],[b]) = [a+b] for sampled a,b") {
    auto F = Q3();
    const int m = 2;
    const std::int64_t N = 8;
    BivariateSeries law = lt_group_law(F, N, m);
    Rng rng(99);
    for (int it = 0; it < 6; ++it) {
        std::int64_t a = static_cast<std::int64_t>(rng.below(20)) + 1;
        std::int64_t b = static_cast<std::int64_t>(rng.below(20)) + 1;
        PowerSeries sa = lt_mult_by_int(F, a, N, m);
        PowerSeries sb = lt_mult_by_int(F, b, N, m);
        CHECK(lt_compose(sa, sb) == lt_mult_by_int(F, a * b, N, m).truncated(m, N));
        CHECK(lt_add(sa, sb, law) == lt_mult_by_int(F, a + b, N, m).truncated(m, N));
    }
}

TEST_CASE("Q_2 multiplicative: lt_add(Z, Z) = 2Z + Z^2 = [2](Z)") {
    auto F = Q2();
    BivariateSeries law = lt_group_law(F, 8, 3);
    PowerSeries z = PowerSeries::monomial(F, OLElement::one(F, 3), 1, 3, 8);
    PowerSeries sum = lt_add(z, z, law);
    CHECK(sum == lt_mult_by_int(F, 2, 8, 3));
}

TEST_CASE("lt_add(Z, 0) = Z") {
    auto F = Q3();
    BivariateSeries law = lt_group_law(F, 6, 2);
    PowerSeries z = PowerSeries::monomial(F, OLElement::one(F, 2), 1, 2, 6);
    PowerSeries zero(F, 2, 6);
    CHECK(lt_add(z, zero, law) == z);
}

TEST_CASE("associativity of the group law to degree 8") {
    // F(F(X,Y),W) = F(X,F(Y,W)) checked by substituting power series in one
    // variable: x = Z, y = [2](Z), w = [3](Z) (their pairwise sums exercise
    // all coefficients up to the cutoff).
    auto F = Q3();
    const int m = 2;
    const std::int64_t N = 8;
    BivariateSeries law = lt_group_law(F, N, m);
    PowerSeries x = PowerSeries::monomial(F, OLElement::one(F, m), 1, m, N);
    PowerSeries y = lt_mult_by_int(F, 2, N, m);
    PowerSeries w = lt_mult_by_int(F, 3, N, m);
    CHECK(lt_add(lt_add(x, y, law), w, law) == lt_add(x, lt_add(y, w, law), law));
}

TEST_CASE("group law solve order does not change the result") {
    auto F = Q3();
    BivariateSeries a = lt_group_law(F, 7, 2, 0);
    BivariateSeries b = lt_group_law(F, 7, 2, 12345);
    CHECK(a == b);
}

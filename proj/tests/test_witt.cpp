#include "doctest.h"

#include <cstdint>

#include "phigamma/rng.hpp"
#include "phigamma/witt.hpp"

using namespace phigamma;

namespace {

LocalFieldPtr make_qp(int p) { return LocalField::make(FieldParams{p, 1, 1, {}, {}}); }
LocalFieldPtr make_unram(int p, int f) { return LocalField::make(FieldParams{p, f, 1, {}, {}}); }

std::int64_t binom(std::int64_t n, std::int64_t k) {
    std::int64_t r = 1;
    for (std::int64_t i = 1; i <= k; ++i) r = r * (n - i + 1) / i;
    return r;
}

}  // namespace

TEST_CASE("universal polys: ghost degree 0") {
    auto F = make_qp(3);
    auto W = UniversalWittPolys::get(F, 2, 5);
    MultiPoly x0 = MultiPoly::variable_x(F, 5, 0), y0 = MultiPoly::variable_y(F, 5, 0);
    CHECK(W->S(0).truncated(4) == (x0 + y0).truncated(4));
    CHECK(W->P(0).truncated(4) == (x0 * y0).truncated(4));
    CHECK(W->I(0).truncated(4) == (MultiPoly(F, 5) - x0).truncated(4));
}

TEST_CASE("universal polys: classical p-typical S_1 for L = Q_p") {
    for (int p : {2, 3, 5}) {
        auto F = make_qp(p);
        int m = 6;
        auto W = UniversalWittPolys::get(F, 2, m);
        // oracle: S_1 = X_1 + Y_1 - sum_{i=1}^{p-1} (1/p) C(p,i) X_0^i Y_0^{p-i}
        MultiPoly expect(F, m - 1);
        expect.set_term(MultiPoly::key_x(1, 1), OLElement::one(F, m - 1));
        expect.set_term(MultiPoly::key_y(1, 1), OLElement::one(F, m - 1));
        for (int i = 1; i < p; ++i) {
            std::int64_t c = -binom(p, i) / p;
            expect.set_term(MultiPoly::key_x(0, i) + MultiPoly::key_y(0, p - i),
                            OLElement::from_int(F, c, m - 1));
        }
        CHECK(W->S(1).truncated(m - 1) == expect.truncated(m - 1));
    }
}

TEST_CASE("universal polys: I_1 for p = 2 is -X_1 - X_0^2, reducing to X_1 + X_0^2") {
    auto F = make_qp(2);
    int m = 6;
    auto W = UniversalWittPolys::get(F, 2, m);
    MultiPoly expect(F, m - 1);
    expect.set_term(MultiPoly::key_x(1, 1), -OLElement::one(F, m - 1));
    expect.set_term(MultiPoly::key_x(0, 2), -OLElement::one(F, m - 1));
    CHECK(W->I(1).truncated(m - 1) == expect.truncated(m - 1));
    // evaluated form in characteristic 2: X_1 + X_0^2
    const auto& red = W->I_red(1);
    REQUIRE(red.terms.size() == 2);
    for (const auto& [k, c] : red.terms) CHECK(c.is_one());
}

TEST_CASE("ghost identities hold symbolically for j <= 2, q in {2,3}") {
    for (int p : {2, 3}) {
        auto F = make_qp(p);
        int n = 3, m = n + 3;
        auto W = UniversalWittPolys::get(F, n, m);
        for (int j = 0; j < n; ++j) {
            std::vector<MultiPoly> Sargs, Pargs, Iargs;
            for (int i = 0; i <= j; ++i) {
                Sargs.push_back(W->S(i));
                Pargs.push_back(W->P(i));
                Iargs.push_back(W->I(i));
            }
            int mm = m - j;
            MultiPoly gx = UniversalWittPolys::ghost_x(F, j, m);
            MultiPoly gy = UniversalWittPolys::ghost_y(F, j, m);
            CHECK(UniversalWittPolys::ghost_apply(Sargs, j, F, m).truncated(mm) ==
                  (gx + gy).truncated(mm));
            CHECK(UniversalWittPolys::ghost_apply(Pargs, j, F, m).truncated(mm) ==
                  (gx * gy).truncated(mm));
            CHECK(UniversalWittPolys::ghost_apply(Iargs, j, F, m).truncated(mm) ==
                  (MultiPoly(F, m) - gx).truncated(mm));
        }
    }
}

TEST_CASE("W_2(F_2): (1,0) + (1,0) = (0,1), the Z/4 oracle") {
    auto F = make_qp(2);
    auto W = make_witt_fq(F, 2, F->residue_field());
    auto one = W.teichmueller(FqElem::one(F->residue_field()));
    auto two = W.add(one, one);
    CHECK(two[0].is_zero());
    CHECK(two[1].is_one());
}

TEST_CASE("x + neg(x) = 0 and ring axioms, enumerated on W_2(F_4)_{Q_2}") {
    auto F = make_qp(2);
    auto F4 = FqField::extension(2, 2);
    auto W = make_witt_fq(F, 2, F4);
    std::vector<std::vector<FqElem>> all;
    enumerate_witt(F4, 2, [&](const std::vector<FqElem>& v) { all.push_back(v); });
    REQUIRE(all.size() == 16);
    for (const auto& x : all) {
        CHECK(W.is_zero(W.add(x, W.neg(x))));
        for (const auto& y : all) {
            CHECK(W.add(x, y) == W.add(y, x));
            CHECK(W.mul(x, y) == W.mul(y, x));
        }
    }
    // sampled associativity and distributivity
    Rng rng(3);
    for (int it = 0; it < 60; ++it) {
        const auto& a = all[rng.below(16)];
        const auto& b = all[rng.below(16)];
        const auto& c = all[rng.below(16)];
        CHECK(W.add(W.add(a, b), c) == W.add(a, W.add(b, c)));
        CHECK(W.mul(W.mul(a, b), c) == W.mul(a, W.mul(b, c)));
        CHECK(W.mul(a, W.add(b, c)) == W.add(W.mul(a, b), W.mul(a, c)));
    }
}

TEST_CASE("Teichmueller multiplicativity on F_4") {
    auto F = make_qp(2);
    auto F4 = FqField::extension(2, 2);
    auto W = make_witt_fq(F, 2, F4);
    for (std::uint64_t i = 0; i < 4; ++i)
        for (std::uint64_t j = 0; j < 4; ++j) {
            FqElem x = FqElem::from_index(F4, i), y = FqElem::from_index(F4, j);
            CHECK(W.mul(W.teichmueller(x), W.teichmueller(y)) == W.teichmueller(x * y));
        }
}

TEST_CASE("OLElement arithmetic is W_m(F_q) arithmetic under digit identification (e = 1)") {
    for (auto F : {make_qp(2), make_qp(3), make_unram(2, 2)}) {
        const int n = 2;
        auto k = F->residue_field();
        auto W = make_witt_fq(F, n, k);
        std::vector<std::vector<FqElem>> all;
        enumerate_witt(k, n, [&](const std::vector<FqElem>& v) { all.push_back(v); });
        for (const auto& dx : all)
            for (const auto& dy : all) {
                OLElement ax(F, dx), ay(F, dy);
                OLElement sum = ax + ay, prod = ax * ay;
                auto wsum = W.add(dx, dy), wprod = W.mul(dx, dy);
                CHECK(sum.digits() == wsum);
                CHECK(prod.digits() == wprod);
            }
    }
}

TEST_CASE("frobenius: identity on W_n(F_q), [x] -> [x^q], kernel on W_2(F_4)") {
    auto F = make_qp(2);
    auto k = F->residue_field();
    auto W2 = make_witt_fq(F, 2, k);
    std::vector<std::vector<FqElem>> allq;
    enumerate_witt(k, 2, [&](const std::vector<FqElem>& v) { allq.push_back(v); });
    for (const auto& x : allq) CHECK(W2.frobenius(x) == x);

    auto F4 = FqField::extension(2, 2);
    auto W = make_witt_fq(F, 2, F4);
    for (std::uint64_t i = 0; i < 4; ++i) {
        FqElem x = FqElem::from_index(F4, i);
        CHECK(W.frobenius(W.teichmueller(x)) == W.teichmueller(x.pow(2)));
    }
    int kernel = 0;
    enumerate_witt(F4, 2, [&](const std::vector<FqElem>& v) {
        if (W.is_zero(W.sub(W.frobenius(v), v))) ++kernel;
    });
    CHECK(kernel == 4);
}

TEST_CASE("verschiebung: V(1) = 2 in W_2(F_2), V(0) = 0, projection formula on all 256 pairs") {
    auto F = make_qp(2);
    auto k = F->residue_field();
    auto W2 = make_witt_fq(F, 2, k);
    auto one = W2.teichmueller(FqElem::one(k));
    auto v1 = W2.verschiebung(one);
    CHECK(v1 == W2.add(one, one));  // V(1) = (0,1) = 2 in Z/4
    CHECK(W2.is_zero(W2.verschiebung(W2.zero())));

    auto F4 = FqField::extension(2, 2);
    auto W = make_witt_fq(F, 2, F4);
    std::vector<std::vector<FqElem>> all;
    enumerate_witt(F4, 2, [&](const std::vector<FqElem>& v) { all.push_back(v); });
    for (const auto& x : all)
        for (const auto& y : all)
            CHECK(W.mul(W.verschiebung(x), y) == W.verschiebung(W.mul(x, W.frobenius(y))));
}

TEST_CASE("F(V(x)) = pi x and V additive, enumerated on W_2(F_4)") {
    auto F = make_qp(2);
    auto F4 = FqField::extension(2, 2);
    auto W = make_witt_fq(F, 2, F4);
    std::vector<std::vector<FqElem>> all;
    enumerate_witt(F4, 2, [&](const std::vector<FqElem>& v) { all.push_back(v); });
    OLElement pi = OLElement::from_int(F, 2, 3);
    for (const auto& x : all) {
        CHECK(W.frobenius(W.verschiebung(x)) == W.scalar_ol(pi, x));
        CHECK(W.mul_pi(x) == W.scalar_ol(pi, x));
        for (const auto& y : all)
            CHECK(W.verschiebung(W.add(x, y)) == W.add(W.verschiebung(x), W.verschiebung(y)));
    }
}

TEST_CASE("witt inversion over F_q and over Laurent coefficients") {
    auto F = make_qp(3);
    auto k = F->residue_field();
    auto W = make_witt_fq(F, 3, k);
    std::vector<std::vector<FqElem>> all;
    enumerate_witt(k, 3, [&](const std::vector<FqElem>& v) { all.push_back(v); });
    auto one = W.teichmueller(FqElem::one(k));
    for (const auto& x : all) {
        if (x[0].is_zero()) continue;
        CHECK(W.mul(x, W.inv(x)) == one);
    }

    auto WL = make_witt_laurent(F, 2, -6, 14);
    auto w = WL.teichmueller(LaurentSeriesFq::monomial(k, 3, FqElem::one(k), 1, -6, 14));
    auto winv = WL.inv(w);
    auto prod = WL.mul(w, winv);
    CHECK(prod[0].coeff(0).is_one());
    CHECK(prod[0].coeffs().size() == 1);
    CHECK(prod[1].is_zero_on_window());
}

TEST_CASE("Gauss norms: Teichmueller terms and pi scaling") {
    auto F = make_qp(2);
    auto k = F->residue_field();
    Rat w(2, 1);  // weight q/(q-1) = 2 for q = 2
    auto WL = make_witt_laurent(F, 3, -8, 16);
    auto om = LaurentSeriesFq::monomial(k, 2, FqElem::one(k), 1, -8, 16);
    auto tw = WL.teichmueller(om);
    Rat r(1, 2);
    // |[w]|_r = |w|^r = q^{-w r}
    GaussNorm n1 = WL.norm_r(tw, r, w);
    CHECK(!n1.zero);
    CHECK(n1.exponent == -(w * r));
    CHECK(n1.certified);
    // |pi [w]|_r = q^{-1} |w|^r
    GaussNorm n2 = WL.norm_r(WL.mul_pi(tw), r, w);
    CHECK(n2.exponent == -(w * r) - Rat(1));
    // interval norm: s = r collapses; pi has exponent -1 at every radius
    auto pivec = WL.mul_pi(WL.teichmueller(LaurentSeriesFq::one(k, 2, -8, 16)));
    GaussNorm n3 = WL.norm_interval(pivec, Rat(1, 4), Rat(1, 2), w);
    CHECK(n3.exponent == Rat(-1));
    // |[w]|_{[s,r]} = |w|^s: the smaller radius wins for v > 0
    GaussNorm n4 = WL.norm_interval(tw, Rat(1, 4), Rat(1, 2), w);
    CHECK(n4.exponent == -(w * Rat(1, 4)));
}

TEST_CASE("Gauss norm multiplicativity on random certified Witt vectors over E_L") {
    // data lives in the bottom two components; the product is taken in a
    // length-4 ring so the sup is visible unless flagged at the boundary
    auto F = make_qp(3);
    auto k = F->residue_field();
    Rat w(3, 2);  // q/(q-1) for q = 3
    Rat r(1, 3);
    auto WL = make_witt_laurent(F, 4, -40, 90);
    Rng rng(17);
    int checked = 0;
    for (int it = 0; it < 40; ++it) {
        typename WittRing<LaurentSeriesFq>::Vec x = WL.zero(), y = WL.zero();
        for (int c = 0; c < 2; ++c)
            for (int t = 0; t < 3; ++t) {
                x[c].set_coeff(rng.range(-3, 6), FqElem::from_index(k, rng.below(3)));
                y[c].set_coeff(rng.range(-3, 6), FqElem::from_index(k, rng.below(3)));
            }
        GaussNorm nx = WL.norm_r(x, r, w), ny = WL.norm_r(y, r, w);
        if (nx.zero || ny.zero) continue;
        GaussNorm nxy = WL.norm_r(WL.mul(x, y), r, w);
        if (!nxy.certified || nxy.boundary) continue;
        ++checked;
        CHECK(nxy.exponent == nx.exponent + ny.exponent);
    }
    CHECK(checked > 10);
}

TEST_CASE("scalar_ol distributes and matches repeated addition") {
    auto F = make_qp(3);
    auto F9 = FqField::extension(3, 2);
    auto W = make_witt_fq(F, 2, F9);
    Rng rng(101);
    std::vector<std::vector<FqElem>> all;
    enumerate_witt(F9, 2, [&](const std::vector<FqElem>& v) { all.push_back(v); });
    for (int it = 0; it < 10; ++it) {
        const auto& x = all[rng.below(all.size())];
        std::int64_t a = static_cast<std::int64_t>(rng.below(15));
        auto expect = W.zero();
        for (std::int64_t t = 0; t < a; ++t) expect = W.add(expect, x);
        CHECK(W.scalar_ol(OLElement::from_int(F, a, 2), x) == expect);
    }
}

#include "doctest.h"

#include <cstdint>

#include "phigamma/fq.hpp"
#include "phigamma/local_field.hpp"
#include "phigamma/rng.hpp"

using namespace phigamma;

namespace {

FieldParams qp(int p) { return FieldParams{p, 1, 1, {}, {}}; }
FieldParams unram(int p, int f) { return FieldParams{p, f, 1, {}, {}}; }
FieldParams ramified_sqrt_p(int p) { return FieldParams{p, 1, 2, {-p, 0, 1}, {}}; }

// Teichmueller lift of d in Z/p^m, computed with plain integer arithmetic.
std::int64_t teich_int(std::int64_t d, std::int64_t p, int m) {
    std::int64_t P = 1;
    for (int i = 0; i < m; ++i) P *= p;
    std::int64_t z = d % P;
    for (int it = 0; it < m + 2; ++it) {
        std::int64_t acc = 1;
        for (int i = 0; i < p; ++i) acc = (acc * z) % P;
        z = acc;
    }
    return z;
}

// Digits of n in Z/p^m under the Teichmueller expansion, integers only.
std::vector<int> teich_digits(std::int64_t n, std::int64_t p, int m) {
    std::vector<int> out;
    std::int64_t P = 1;
    for (int i = 0; i < m; ++i) P *= p;
    std::int64_t x = ((n % P) + P) % P;
    for (int i = 0; i < m; ++i) {
        int d = static_cast<int>(x % p);
        out.push_back(d);
        x = ((x - teich_int(d, p, m)) % P + P) % P;
        x /= p;
        P /= p;
    }
    return out;
}

std::vector<int> digit_indices(const OLElement& x) {
    std::vector<int> v;
    for (const auto& d : x.digits()) v.push_back(static_cast<int>(d.index()));
    return v;
}

}  // namespace

TEST_CASE("Fq: x^q = x by enumeration for q <= 16") {
    for (auto [p, n] : {std::pair{2, 1}, {3, 1}, {2, 2}, {5, 1}, {3, 2}, {13, 1}, {2, 4}}) {
        auto F = FqField::extension(p, n);
        for (std::uint64_t i = 0; i < F->size(); ++i) {
            FqElem x = FqElem::from_index(F, i);
            CHECK(x.pow(F->size()) == x);
        }
    }
}

TEST_CASE("Fq: field axioms and inverses on F_9") {
    auto F = FqField::extension(3, 2);
    for (std::uint64_t i = 0; i < F->size(); ++i) {
        FqElem x = FqElem::from_index(F, i);
        if (x.is_zero()) continue;
        CHECK((x * x.inv()).is_one());
    }
    // distributivity spot check by full enumeration
    for (std::uint64_t a = 0; a < F->size(); ++a)
        for (std::uint64_t b = 0; b < F->size(); ++b) {
            FqElem x = FqElem::from_index(F, a), y = FqElem::from_index(F, b);
            CHECK(x * (y + FqElem::one(F)) == x * y + x);
        }
}

TEST_CASE("fq_qth_root: identity on F_q, square root on F_4 over q=2") {
    auto F4 = FqField::extension(2, 2);
    CHECK(FqElem::one(F4).qth_root(2) == FqElem::one(F4));
    // on F_q itself the q-th root is the identity
    auto F5 = FqField::prime_field(5);
    for (std::uint64_t i = 0; i < 5; ++i) {
        FqElem x = FqElem::from_index(F5, i);
        CHECK(x.qth_root(5) == x);
    }
    // F_4 over q = 2: root(z) = z^2, checked by squaring back
    for (std::uint64_t i = 0; i < 4; ++i) {
        FqElem x = FqElem::from_index(F4, i);
        FqElem r = x.qth_root(2);
        CHECK(r * r == x);
        CHECK(r == x.pow(2));  // |F| = q^2, so the root is x^{q^{2-1}}
    }
}

TEST_CASE("Fq embedding: F_2 in F_4 is a ring homomorphism") {
    auto F2 = FqField::prime_field(2);
    auto F4 = FqField::extension(2, 2);
    auto emb = FqEmbedding::find(F2, F4);
    for (std::uint64_t a = 0; a < 2; ++a)
        for (std::uint64_t b = 0; b < 2; ++b) {
            FqElem x = FqElem::from_index(F2, a), y = FqElem::from_index(F2, b);
            CHECK(emb.apply(x + y) == emb.apply(x) + emb.apply(y));
            CHECK(emb.apply(x * y) == emb.apply(x) * emb.apply(y));
        }
}

TEST_CASE("ol_arith: 1+1 = (0,1,0) over Q_2 at m=3, against the Z/8 oracle") {
    auto F = LocalField::make(qp(2));
    OLElement one = OLElement::one(F, 3);
    OLElement two = one + one;
    CHECK(digit_indices(two) == std::vector<int>{0, 1, 0});
    CHECK(two == OLElement::from_int(F, 2, 3));
    CHECK(teich_digits(2, 2, 3) == std::vector<int>{0, 1, 0});
}

TEST_CASE("ol_arith: inv(2) over Q_3 at m=2 equals 5 mod 9 (extended Euclid oracle)") {
    auto F = LocalField::make(qp(3));
    OLElement two = OLElement::from_int(F, 2, 2);
    OLElement five = OLElement::from_int(F, 5, 2);
    CHECK(two.inv() == five);
    CHECK((two * five) == OLElement::one(F, 2));
    // Teichmueller digit form of 5 mod 9 (the naive base-3 digits would be (2,1))
    auto expected = teich_digits(5, 3, 2);
    CHECK(digit_indices(five) == expected);
}

TEST_CASE("ol_arith agrees with Z/p^m for e = f = 1 (exhaustive, small)") {
    for (int p : {2, 3}) {
        for (int m : {1, 2, 3}) {
            auto F = LocalField::make(qp(p));
            std::int64_t P = 1;
            for (int i = 0; i < m; ++i) P *= p;
            for (std::int64_t a = 0; a < P; ++a)
                for (std::int64_t b = 0; b < P; ++b) {
                    OLElement xa = OLElement::from_int(F, a, m);
                    OLElement xb = OLElement::from_int(F, b, m);
                    CHECK(xa + xb == OLElement::from_int(F, a + b, m));
                    CHECK(xa * xb == OLElement::from_int(F, a * b, m));
                    CHECK(xa - xb == OLElement::from_int(F, a - b, m));
                }
        }
    }
}

TEST_CASE("ol_arith: ring axioms on random elements incl. e > 1 and f > 1") {
    Rng rng(42);
    for (const auto& params : {qp(5), unram(3, 2), ramified_sqrt_p(3)}) {
        auto F = LocalField::make(params);
        const int m = 4;
        auto random_elem = [&] {
            std::vector<FqElem> d;
            for (int i = 0; i < m; ++i)
                d.push_back(FqElem::from_index(F->residue_field(), rng.below(F->residue_field()->size())));
            return OLElement(F, d);
        };
        for (int it = 0; it < 40; ++it) {
            OLElement a = random_elem(), b = random_elem(), c = random_elem();
            CHECK((a + b) + c == a + (b + c));
            CHECK(a + b == b + a);
            CHECK(a * (b + c) == a * b + a * c);
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * OLElement::one(F, m) == a);
            CHECK(a + (-a) == OLElement::zero(F, m));
            if (a.is_unit()) CHECK(a * a.inv() == OLElement::one(F, m));
        }
    }
}

TEST_CASE("ol_from_int: homomorphism and valuations") {
    Rng rng(7);
    auto F = LocalField::make(qp(3));
    for (int it = 0; it < 50; ++it) {
        std::int64_t a = static_cast<std::int64_t>(rng.below(2000)) - 1000;
        std::int64_t b = static_cast<std::int64_t>(rng.below(2000)) - 1000;
        CHECK(OLElement::from_int(F, a + b, 4) ==
              OLElement::from_int(F, a, 4) + OLElement::from_int(F, b, 4));
        CHECK(OLElement::from_int(F, a * b, 4) ==
              OLElement::from_int(F, a, 4) * OLElement::from_int(F, b, 4));
    }
    CHECK(OLElement::from_int(F, 0, 3).is_zero());
    CHECK(OLElement::from_int(F, 3, 3).valuation() == 1);

    // e = 2: p = pi^2 up to a unit
    auto Fr = LocalField::make(ramified_sqrt_p(3));
    CHECK(OLElement::from_int(Fr, 3, 4).valuation() == 2);
    CHECK(OLElement::from_int(Fr, 9, 6).valuation() == 4);

    // unramified: v(p) = 1
    auto Fu = LocalField::make(unram(2, 2));
    CHECK(OLElement::from_int(Fu, 2, 3).valuation() == 1);
}

TEST_CASE("mixed precision truncates to the minimum") {
    auto F = LocalField::make(qp(2));
    OLElement a = OLElement::from_int(F, 7, 4);
    OLElement b = OLElement::from_int(F, 5, 2);
    CHECK((a + b).precision() == 2);
    CHECK((a * b).precision() == 2);
}

TEST_CASE("pi arithmetic: mul/div round trip and q/pi") {
    auto F = LocalField::make(qp(3));
    OLElement a = OLElement::from_int(F, 7, 3);
    CHECK(a.mul_by_pi().div_by_pi_exact() == a);
    CHECK(F->q_over_pi(3) == OLElement::one(F, 3));  // q/pi = 1 for L = Q_p

    auto Fu = LocalField::make(unram(3, 2));
    CHECK(Fu->q_over_pi(3) == OLElement::from_int(Fu, 3, 3));  // q = 9, pi = 3

    auto Fr = LocalField::make(ramified_sqrt_p(3));
    // q/pi = 3/pi has valuation 1
    CHECK(Fr->q_over_pi(4).valuation() == 1);
}

TEST_CASE("OLElement serialization round trip") {
    Rng rng(11);
    for (const auto& params : {qp(2), unram(2, 2), ramified_sqrt_p(3)}) {
        auto F = LocalField::make(params);
        for (int it = 0; it < 20; ++it) {
            std::vector<FqElem> d;
            for (int i = 0; i < 3; ++i)
                d.push_back(FqElem::from_index(F->residue_field(), rng.below(F->residue_field()->size())));
            OLElement x(F, d);
            OLElement y = F->parse_element(x.str(), 3);
            CHECK(x == y);
        }
    }
}

TEST_CASE("FieldParams validation rejects bad Eisenstein data") {
    CHECK_THROWS_AS(LocalField::make(FieldParams{3, 1, 2, {-9, 0, 1}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(LocalField::make(FieldParams{3, 1, 2, {-3, 1, 1}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(LocalField::make(FieldParams{3, 1, 2, {-3, 0, 2}, {}}), std::invalid_argument);
    CHECK_NOTHROW(LocalField::make(FieldParams{3, 1, 2, {-3, 0, 1}, {}}));
}

TEST_CASE("config parsing") {
    auto cfg = parse_config_text("p = 3\nf = 1\ne = 1\nm = 3\nwindow = [-10, 30)\nperf_level = 2\n# comment\n");
    CHECK(cfg.params.p == 3);
    CHECK(cfg.profile.v_min == -10);
    CHECK(cfg.profile.N == 30);
    CHECK(cfg.profile.perf_level == 2);
    CHECK(!cfg.weight.has_value());
    auto cfg2 = parse_config_text("p=3\nweight = 3/2\n");
    CHECK(cfg2.weight.value() == Rat(3, 2));
}

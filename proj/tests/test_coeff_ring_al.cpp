#include "doctest.h"

#include "phigamma/laurent_al.hpp"
#include "phigamma/rng.hpp"

using namespace phigamma;

namespace {

LocalFieldPtr make_qp(int p) { return LocalField::make(FieldParams{p, 1, 1, {}, {}}); }
LocalFieldPtr make_unram(int p, int f) { return LocalField::make(FieldParams{p, f, 1, {}, {}}); }

LaurentSeriesAL random_al(const LocalFieldPtr& F, int m, Rng& rng, std::int64_t lo, std::int64_t hi,
                          int terms = 6) {
    LaurentSeriesAL s(F, m, lo, hi);
    auto k = F->residue_field();
    for (int t = 0; t < terms; ++t) {
        std::vector<FqElem> digits;
        for (int i = 0; i < m; ++i) digits.push_back(FqElem::from_index(k, rng.below(k->size())));
        s.set_coeff(rng.range(lo, hi), OLElement(F, digits));
    }
    return s;
}

bool agree_on_common_window(const LaurentSeriesAL& a, const LaurentSeriesAL& b) {
    std::int64_t lo = std::max(a.window_lo(), b.window_lo());
    std::int64_t hi = std::min(a.window_hi(), b.window_hi());
    int m = std::min(a.precision(), b.precision());
    return a.restricted(lo, hi).truncated_precision(m).same_series(
        b.restricted(lo, hi).truncated_precision(m));
}

bool agree_on_common_window_fq(const LaurentSeriesFq& a, const LaurentSeriesFq& b) {
    std::int64_t lo = std::max(a.window_lo(), b.window_lo());
    std::int64_t hi = std::min(a.window_hi(), b.window_hi());
    return a.restricted(lo, hi).coeffs() == b.restricted(lo, hi).coeffs();
}

}  // namespace

TEST_CASE("phi: phi(Z) = pi Z + Z^q and phi(1) = 1") {
    for (auto F : {make_qp(2), make_qp(3)}) {
        ALContext ctx(F, 3);
        auto Z = LaurentSeriesAL::monomial(F, OLElement::one(F, 3), 1, 3, -LaurentSeriesAL::kExactWindow,
                                           LaurentSeriesAL::kExactWindow);
        auto img = ctx.phi(Z);
        CHECK(img.coeff(1) == OLElement::from_int(F, F->params().p, 3));
        CHECK(img.coeff(F->q()).is_one());
        CHECK(img.coeffs().size() == 2);
        auto one = LaurentSeriesAL::one(F, 3, -LaurentSeriesAL::kExactWindow, LaurentSeriesAL::kExactWindow);
        CHECK(ctx.phi(one).same_series(one));
    }
}

TEST_CASE("phi: [pi](Z) * [pi](Z)^{-1} = 1") {
    for (auto F : {make_qp(2), make_qp(3), make_unram(2, 2)}) {
        ALContext ctx(F, 3);
        auto Zinv = LaurentSeriesAL::monomial(F, OLElement::one(F, 3), -1, 3,
                                              -LaurentSeriesAL::kExactWindow,
                                              LaurentSeriesAL::kExactWindow);
        auto prod = ctx.phi(Zinv) * ctx.phi(LaurentSeriesAL::monomial(
                                         F, OLElement::one(F, 3), 1, 3, -LaurentSeriesAL::kExactWindow,
                                         LaurentSeriesAL::kExactWindow));
        CHECK(prod.coeff(0).is_one());
        CHECK(prod.coeffs().size() == 1);
    }
}

TEST_CASE("phi reduces to the q-power Frobenius mod pi") {
    Rng rng(42);
    for (auto F : {make_qp(2), make_qp(3)}) {
        ALContext ctx(F, 3);
        for (int it = 0; it < 15; ++it) {
            auto f = random_al(F, 3, rng, -5, 12);
            auto lhs = ctx.phi(f).reduce_mod_pi();
            auto rhs = f.reduce_mod_pi().frobenius();
            CHECK(agree_on_common_window_fq(lhs, rhs));
        }
    }
}

TEST_CASE("gamma: identity at a = 1, inverse composition, commutation with phi") {
    Rng rng(7);
    auto F = make_qp(3);
    ALContext ctx(F, 2);
    for (int it = 0; it < 8; ++it) {
        auto f = random_al(F, 2, rng, -4, 10, 4);
        CHECK(agree_on_common_window(ctx.gamma_int(1, f), f));

        OLElement a = OLElement::from_int(F, 2, 20);
        auto once = ctx.gamma(a, f);
        auto back = ctx.gamma(a.inv(), once);
        CHECK(agree_on_common_window(back, f));

        CHECK(agree_on_common_window(ctx.phi(ctx.gamma(a, f)), ctx.gamma(a, ctx.phi(f))));
    }
}

TEST_CASE("gamma: group law gamma_a gamma_b = gamma_ab on random series") {
    Rng rng(19);
    auto F = make_qp(2);
    ALContext ctx(F, 2);
    for (int it = 0; it < 6; ++it) {
        auto f = random_al(F, 2, rng, -3, 9, 4);
        auto lhs = ctx.gamma_int(3, ctx.gamma_int(5, f));
        auto rhs = ctx.gamma_int(15, f);
        CHECK(agree_on_common_window(lhs, rhs));
    }
}

TEST_CASE("decompose_over_phi: phi-image, monomial example, reconstruction") {
    Rng rng(11);
    for (auto F : {make_qp(3), make_qp(2)}) {
        std::int64_t q = F->q();
        ALContext ctx(F, 2);
        // f = phi(g) decomposes as (g, 0, ..., 0)
        for (int it = 0; it < 6; ++it) {
            auto g = random_al(F, 2, rng, -3, 6, 4);
            auto dec = ctx.decompose_over_phi(ctx.phi(g));
            CHECK(agree_on_common_window(dec[0], g));
            for (std::int64_t i = 1; i < q; ++i) CHECK(dec[static_cast<size_t>(i)].is_zero_on_window());
        }
        // reconstruction on random f
        for (int it = 0; it < 6; ++it) {
            auto f = random_al(F, 2, rng, -6, 12);
            auto dec = ctx.decompose_over_phi(f);
            LaurentSeriesAL rec(F, 2, f.window_lo(), f.window_hi());
            for (std::int64_t i = 0; i < q; ++i)
                rec = rec + ctx.phi(dec[static_cast<size_t>(i)]).shifted(i);
            CHECK(agree_on_common_window(rec, f));
        }
    }
    // q >= 3: Z^{q+1} = phi(Z) Z + phi(-pi) Z^2
    auto F3 = make_qp(3);
    ALContext ctx3(F3, 2);
    auto f = LaurentSeriesAL::monomial(F3, OLElement::one(F3, 2), 4, 2, -9, 27);
    auto dec = ctx3.decompose_over_phi(f);
    CHECK(dec[0].is_zero_on_window());
    CHECK(dec[1].coeff(1).is_one());
    CHECK(dec[1].coeffs().size() == 1);
    CHECK(dec[2].coeff(0) == -OLElement::from_int(F3, 3, 2));
    CHECK(dec[2].coeffs().size() == 1);
}

TEST_CASE("trace: trace(phi(g)) = q phi(g)") {
    Rng rng(23);
    for (auto F : {make_qp(2), make_qp(3)}) {
        ALContext ctx(F, 2);
        for (int it = 0; it < 5; ++it) {
            auto g = random_al(F, 2, rng, -2, 6, 3);
            auto lhs = ctx.trace_over_phi(ctx.phi(g));
            auto rhs = ctx.phi(g).scaled(OLElement::from_int(F, F->q(), 2));
            CHECK(agree_on_common_window(lhs, rhs));
        }
    }
}

namespace {

// Independent torsion-point oracle for the trace of multiplication by Z^s:
// sum of F(Z, z)^s over z = 0 and the roots of [pi](w)/w = pi + w^{q-1},
// evaluated through Newton power sums of that polynomial.
LaurentSeriesAL torsion_trace_oracle_Zs(const LocalFieldPtr& F, int m, std::int64_t D,
                                        std::uint64_t s) {
    std::int64_t q = F->q();
    BivariateSeries law = lt_group_law(F, D, m);
    // power sums of the roots of w^{q-1} + pi: e_{q-1} = (-1)^{q-1} pi, others 0
    std::vector<OLElement> p(static_cast<size_t>(D), OLElement::zero(F, m));
    OLElement pi_elem = OLElement::one(F, m + 1).mul_by_pi().truncated(m);
    OLElement e_top = (q % 2 == 0) ? -pi_elem : pi_elem;  // (-1)^{q-1} pi
    for (std::int64_t k = 1; k < D; ++k) {
        if (k % (q - 1) != 0) continue;
        // p_k = (-1)^{q-2} e_{q-1} (p_{k-q+1} or (q-1) at the first step)
        OLElement sign_e = (q % 2 == 0) ? e_top : -e_top;  // (-1)^{q-2} e_{q-1}
        if (k == q - 1)
            p[static_cast<size_t>(k)] = sign_e * OLElement::from_int(F, q - 1, m);
        else
            p[static_cast<size_t>(k)] = sign_e * p[static_cast<size_t>(k - (q - 1))];
    }
    // p_0 counts the q-1 nonzero roots
    p[0] = OLElement::from_int(F, q - 1, m);
    // trace(Z^s) = F(Z,0)^s + sum_j p_j * (coefficient of z^j in F(Z,z)^s)
    BivariateSeries laws(F, m, D);
    laws.set_coeff(0, 0, OLElement::one(F, m));
    for (std::uint64_t t = 0; t < s; ++t) laws = laws * law;
    LaurentSeriesAL out(F, m, 0, D - (q - 1) * m);
    // z = 0 contributes F(Z,0)^s = Z^s since F(X,0) = X
    out.set_coeff(static_cast<std::int64_t>(s), OLElement::one(F, m));
    for (const auto& [k, c] : laws.coeffs()) {
        auto [i, j] = k;
        if (j >= D) continue;
        OLElement contrib = c * p[static_cast<size_t>(j)];
        out.set_coeff(i, out.coeff(i) + contrib);
    }
    return out;
}

}  // namespace

TEST_CASE("trace of Z and Z^2 matches the torsion-point oracle") {
    for (auto F : {make_qp(2), make_qp(3)}) {
        const int m = 3;
        ALContext ctx(F, m);
        for (std::uint64_t s : {std::uint64_t(1), std::uint64_t(2)}) {
            auto Zs = LaurentSeriesAL::monomial(F, OLElement::one(F, m), static_cast<std::int64_t>(s),
                                                m, 0, 30);
            auto got = ctx.trace_over_phi(Zs);
            auto oracle = torsion_trace_oracle_Zs(F, m, 24, s);
            CHECK(agree_on_common_window(got, oracle));
            // the comparison must carry content for at least one power
            if (F->q() == 2 && s == 1) REQUIRE(!oracle.is_zero_on_window());
            if (F->q() == 3 && s == 2) REQUIRE(!oracle.is_zero_on_window());
        }
    }
}

TEST_CASE("psi: psi(phi(f)) = (q/pi) f") {
    Rng rng(31);
    for (auto F : {make_qp(2), make_qp(3), make_unram(3, 2)}) {
        ALContext ctx(F, 2);
        for (int it = 0; it < 4; ++it) {
            auto f = random_al(F, 2, rng, -3, 8, 4);
            auto lhs = ctx.psi(ctx.phi(f));
            auto rhs = f.scaled(F->q_over_pi(2));
            CHECK(agree_on_common_window(lhs, rhs));
        }
    }
}

TEST_CASE("psi: projection formula psi(phi(f) g) = f psi(g)") {
    Rng rng(37);
    for (auto F : {make_qp(2), make_qp(3)}) {
        ALContext ctx(F, 2);
        for (int it = 0; it < 6; ++it) {
            auto f = random_al(F, 2, rng, -2, 5, 3);
            auto g = random_al(F, 2, rng, -3, 14, 5);
            if (f.is_zero_on_window() || g.is_zero_on_window()) continue;
            auto lhs = ctx.psi(ctx.phi(f) * g);
            auto rhs = f * ctx.psi(g);
            CHECK(agree_on_common_window(lhs, rhs));
        }
    }
}

TEST_CASE("psi(1) = 1 over Q_p") {
    for (auto F : {make_qp(2), make_qp(5)}) {
        ALContext ctx(F, 3);
        auto one = LaurentSeriesAL::one(F, 3, -6, 18);
        CHECK(agree_on_common_window(ctx.psi(one), one));
    }
}

TEST_CASE("AL inverse: x * x^{-1} = 1 on the certified window") {
    Rng rng(41);
    auto F = make_qp(3);
    for (int it = 0; it < 10; ++it) {
        auto x = random_al(F, 3, rng, -4, 9, 5);
        auto red = x.reduce_mod_pi();
        if (red.is_zero_on_window()) continue;
        auto inv = x.inv();
        auto prod = x * inv;
        auto one = LaurentSeriesAL::one(F, 3, prod.window_lo(), prod.window_hi());
        CHECK(agree_on_common_window(prod, one));
    }
}

TEST_CASE("overconvergent norms: |Z|_r, pi-scaling, Teichmueller-lift leading term") {
    auto F = make_qp(2);
    Rat w(2);  // q/(q-1) for q=2
    Rat r(1, 4);
    auto Z = LaurentSeriesAL::monomial(F, OLElement::one(F, 3), 1, 3, -10, 20);
    GaussNorm nz = overconv_norm_r({Z, Rat(1, 2), 0}, r, w);
    CHECK(!nz.zero);
    CHECK(nz.exponent == -(w * r));
    CHECK(nz.certified);

    GaussNorm npi = overconv_norm_r({Z.mul_by_pi().truncated_precision(3), Rat(1, 2), 0}, r, w);
    CHECK(npi.exponent == -(w * r) - Rat(1));

    // Teichmueller lift of b with v(b) = n0 has norm exponent -w r n0
    auto k = F->residue_field();
    LaurentSeriesFq b(k, 2, -3, 10);
    b.set_coeff(-3, FqElem::one(k));
    b.set_coeff(2, FqElem::one(k));
    auto x = LaurentSeriesAL::teichmueller_lift(b, F, 3);
    GaussNorm nb = overconv_norm_r({x, Rat(1, 2), 3}, r, w);
    CHECK(nb.exponent == w * r * Rat(3));
    CHECK(nb.certified);
}

TEST_CASE("overconvergent certificate violations are rejected") {
    auto F = make_qp(2);
    // pi-free coefficient deep in the tail violates a steep certificate
    LaurentSeriesAL bad(F, 3, -20, 5);
    bad.set_coeff(-15, OLElement::one(F, 3));
    CHECK_THROWS_AS(overconv_norm_r({bad, Rat(1, 2), 0}, Rat(1, 4), Rat(2)), CertificateInvalidError);
    // radius beyond the certificate slope
    LaurentSeriesAL ok(F, 3, -4, 6);
    ok.set_coeff(1, OLElement::one(F, 3));
    CHECK_THROWS_AS(overconv_norm_r({ok, Rat(1, 8), 0}, Rat(1, 4), Rat(2)), CertificateInvalidError);
}

TEST_CASE("AL series print/parse round trip") {
    Rng rng(55);
    for (auto F : {make_qp(3), make_unram(2, 2)}) {
        for (int it = 0; it < 10; ++it) {
            auto x = random_al(F, 3, rng, -5, 9, 4);
            auto y = LaurentSeriesAL::parse(F, 3, x.str(), -5, 9);
            CHECK(x.same_series(y));
        }
    }
}

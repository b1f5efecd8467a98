#include "phigamma/lubin_tate.hpp"

#include <algorithm>
#include <vector>

#include "phigamma/rng.hpp"

namespace phigamma {

namespace {

// Internal pi-precision margin: each solved degree performs one exact
// division by pi, and errors travel along q-power dependency chains of
// length log_q(N).
int solve_margin(std::int64_t q, std::int64_t N) {
    int margin = 2;
    std::int64_t t = 1;
    while (t < N) { t *= q; ++margin; }
    return margin;
}

// c / (pi (1 - pi^{d-1})), the invertible linear step of the inductive
// construction; d >= 2. The result is re-widened to the working width: the
// top digit it gains is scratch, covered by the q-chain margin of the solve.
OLElement divide_linear_step(const OLElement& c, int d, const LocalFieldPtr& F) {
    int m = c.precision();
    OLElement one = OLElement::one(F, m);
    OLElement pid = OLElement::from_int(F, 1, m);
    // pi^{d-1}
    for (int i = 0; i < d - 1; ++i) pid = pid.mul_by_pi().truncated(m);
    OLElement unit = one - pid;
    if (!unit.is_unit()) throw NoConvergenceError("linear step is singular");
    OLElement t = c * unit.inv();
    return t.div_by_pi_exact().padded_to(m);
}

}  // namespace

PowerSeries lt_frobenius_series(const LocalFieldPtr& F, std::int64_t N, int m) {
    PowerSeries f(F, m, N);
    OLElement pi = OLElement::from_int(F, 1, m).mul_by_pi().truncated(m);
    f.set_coeff(1, pi);
    f.set_coeff(F->q(), OLElement::one(F, m));
    return f;
}

BivariateSeries lt_group_law(const LocalFieldPtr& F, std::int64_t N, int m, std::uint64_t shuffle_seed) {
    if (N < 2) throw std::invalid_argument("lt_group_law needs N >= 2");
    const std::int64_t q = F->q();
    const int mi = m + solve_margin(q, N);
    PowerSeries f = lt_frobenius_series(F, N, mi);

    // Univariate powers of f embedded as bivariate series in X resp. Y.
    auto embed_pow = [&](bool in_x, const PowerSeries& s) {
        BivariateSeries b(F, mi, N);
        for (const auto& [k, c] : s.coeffs()) b.set_coeff(in_x ? k : 0, in_x ? 0 : k, c);
        return b;
    };
    std::vector<BivariateSeries> fx_pow, fy_pow;  // f(X)^i, f(Y)^j
    {
        PowerSeries acc = PowerSeries::monomial(F, OLElement::one(F, mi), 0, mi, N);
        for (std::int64_t i = 0; i < N; ++i) {
            fx_pow.push_back(embed_pow(true, acc));
            fy_pow.push_back(embed_pow(false, acc));
            acc = acc * f;
        }
    }

    BivariateSeries law(F, mi, N);
    OLElement one = OLElement::one(F, mi);
    law.set_coeff(1, 0, one);
    law.set_coeff(0, 1, one);

    // G = F(f(X), f(Y)) maintained incrementally as coefficients of F appear.
    BivariateSeries G = fx_pow[1] + fy_pow[1];

    Rng rng(shuffle_seed + 1);
    for (std::int64_t d = 2; d < N; ++d) {
        // degree-d part of F(f,f) - f(F_{<d})
        BivariateSeries fF(F, mi, N);
        {
            // pi * F_{<d} + (F_{<d})^q
            BivariateSeries acc = law;
            for (std::int64_t t = 1; t < q; ++t) acc = acc * law;
            for (const auto& [k, c] : law.coeffs())
                fF.set_coeff(k.first, k.second, c.mul_by_pi().truncated(mi));
            fF = fF + acc;
        }
        std::vector<std::pair<std::int64_t, std::int64_t>> monos;
        for (std::int64_t i = 0; i <= d; ++i) monos.push_back({i, d - i});
        // solve order must not matter; shuffle to make that testable
        for (size_t i = monos.size(); i > 1; --i) std::swap(monos[i - 1], monos[rng.below(i)]);

        for (auto [i, j] : monos) {
            OLElement rhs = G.coeff(i, j) - fF.coeff(i, j);
            if (rhs.is_zero()) continue;
            OLElement cij = divide_linear_step(rhs, static_cast<int>(d), F);
            law.set_coeff(i, j, cij);
            G = G + (fx_pow[static_cast<size_t>(i)] * fy_pow[static_cast<size_t>(j)]).scaled(cij);
        }
    }

    // a posteriori residual check of the defining equation at target
    // precision, recomputing F(f(X), f(Y)) from the final coefficients
    // rather than reusing the incrementally maintained G
    BivariateSeries lhs(F, mi, N);
    {
        BivariateSeries acc = law;
        for (std::int64_t t = 1; t < q; ++t) acc = acc * law;
        for (const auto& [k, c] : law.coeffs())
            lhs.set_coeff(k.first, k.second, c.mul_by_pi().truncated(mi));
        lhs = lhs + acc;
    }
    BivariateSeries rhs_check(F, mi, N);
    for (const auto& [k, c] : law.coeffs())
        rhs_check =
            rhs_check + (fx_pow[static_cast<size_t>(k.first)] * fy_pow[static_cast<size_t>(k.second)]).scaled(c);
    BivariateSeries diff = (lhs - rhs_check).truncated(m, N);
    if (!diff.coeffs().empty()) throw NoConvergenceError("group law residual nonzero");
    return law.truncated(m, N);
}

PowerSeries lt_mult_by(const OLElement& a, std::int64_t N, int m) {
    if (N < 2) throw std::invalid_argument("lt_mult_by needs N >= 2");
    const LocalFieldPtr& F = a.field();
    const std::int64_t q = F->q();
    const int mi = m + solve_margin(q, N);
    if (a.precision() < mi)
        throw std::invalid_argument("lt_mult_by: coefficient precision too low for the requested precision");
    PowerSeries f = lt_frobenius_series(F, N, mi);

    std::vector<PowerSeries> f_pow;  // f^k for k < N
    {
        PowerSeries acc = PowerSeries::monomial(F, OLElement::one(F, mi), 0, mi, N);
        for (std::int64_t k = 0; k < N; ++k) {
            f_pow.push_back(acc);
            acc = acc * f;
        }
    }

    PowerSeries series(F, mi, N);
    series.set_coeff(1, a.truncated(mi));

    for (std::int64_t d = 2; d < N; ++d) {
        // rhs_d = [sum_{k<d} c_k f^k]_d - [(series_{<d})^q]_d
        OLElement rhs = OLElement::zero(F, mi);
        for (const auto& [k, c] : series.coeffs()) rhs = rhs + c * f_pow[static_cast<size_t>(k)].coeff(d);
        PowerSeries sq = series.pow(static_cast<std::uint64_t>(q));
        rhs = rhs - sq.coeff(d);
        if (rhs.is_zero()) continue;
        series.set_coeff(d, divide_linear_step(rhs, static_cast<int>(d), F));
    }

    // residual check: f(series) - series(f) = 0 mod (pi^m, Z^N)
    PowerSeries lhs = series.pow(static_cast<std::uint64_t>(q));
    for (const auto& [k, c] : series.coeffs()) lhs.set_coeff(k, lhs.coeff(k) + c.mul_by_pi().truncated(mi));
    PowerSeries rhs_full(F, mi, N);
    for (const auto& [k, c] : series.coeffs()) rhs_full = rhs_full + f_pow[static_cast<size_t>(k)].scaled(c);
    if (!(lhs - rhs_full).truncated(m, N).is_zero())
        throw NoConvergenceError("multiplication series residual nonzero");
    return series.truncated(m, N);
}

PowerSeries lt_mult_by_int(const LocalFieldPtr& F, std::int64_t a, std::int64_t N, int m) {
    const int mi = m + solve_margin(F->q(), N) + 1;
    return lt_mult_by(OLElement::from_int(F, a, mi), N, m);
}

PowerSeries lt_add(const PowerSeries& x, const PowerSeries& y, const BivariateSeries& law) {
    if (!x.zero_constant_term() || !y.zero_constant_term()) throw ConstantTermNonzeroError();
    const LocalFieldPtr& F = x.field();
    int m = std::min({x.precision(), y.precision(), law.precision()});
    std::int64_t N = std::min({x.degree_bound(), y.degree_bound(), law.degree_bound()});
    PowerSeries r(F, m, N);
    // powers of x and y
    std::vector<PowerSeries> xp = {PowerSeries::monomial(F, OLElement::one(F, m), 0, m, N)};
    std::vector<PowerSeries> yp = xp;
    for (std::int64_t k = 1; k < law.degree_bound(); ++k) {
        xp.push_back(xp.back() * x);
        yp.push_back(yp.back() * y);
    }
    for (const auto& [k, c] : law.coeffs()) {
        if (k.first >= static_cast<std::int64_t>(xp.size()) || k.second >= static_cast<std::int64_t>(yp.size()))
            continue;
        r = r + (xp[static_cast<size_t>(k.first)] * yp[static_cast<size_t>(k.second)]).scaled(c);
    }
    return r;
}

PowerSeries lt_compose(const PowerSeries& g, const PowerSeries& h) { return g.compose(h); }

}  // namespace phigamma

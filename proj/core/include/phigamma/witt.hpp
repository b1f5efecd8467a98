#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "phigamma/laurent_fq.hpp"
#include "phigamma/local_field.hpp"
#include "phigamma/rational.hpp"

namespace phigamma {

// Multivariate polynomial over o_L/pi^m in X_0..X_{n-1}, Y_0..Y_{n-1} with
// n <= 4; exponents are packed one byte per variable (X_i in byte i, Y_i in
// byte 4+i). Exponent arithmetic never carries: per-variable degrees in the
// ghost computations stay below 256.
class MultiPoly {
  public:
    using Key = std::uint64_t;
    static constexpr int kMaxN = 4;

    MultiPoly() = default;
    MultiPoly(LocalFieldPtr F, int m) : field_(std::move(F)), m_(m) {}

    static Key key_x(int i, int exp) { return static_cast<Key>(exp) << (8 * i); }
    static Key key_y(int i, int exp) { return static_cast<Key>(exp) << (8 * (kMaxN + i)); }

    static MultiPoly variable_x(const LocalFieldPtr& F, int m, int i);
    static MultiPoly variable_y(const LocalFieldPtr& F, int m, int i);
    static MultiPoly constant(const LocalFieldPtr& F, const OLElement& c);

    const LocalFieldPtr& field() const { return field_; }
    int precision() const { return m_; }
    const std::map<Key, OLElement>& terms() const { return terms_; }

    void set_term(Key k, const OLElement& c);
    OLElement term(Key k) const;
    bool is_zero() const { return terms_.empty(); }

    MultiPoly operator+(const MultiPoly& o) const;
    MultiPoly operator-(const MultiPoly& o) const;
    MultiPoly operator*(const MultiPoly& o) const;
    MultiPoly pow(std::uint64_t e) const;
    MultiPoly mul_by_pi_pow(int i) const;   // coefficients gain precision
    MultiPoly div_by_pi_exact_pow(int i) const;  // throws InexactDivision
    MultiPoly truncated(int m) const;

    bool operator==(const MultiPoly& o) const { return terms_ == o.terms_; }

    std::string str() const;

  private:
    LocalFieldPtr field_;
    int m_ = 0;
    std::map<Key, OLElement> terms_;
};

// A universal polynomial reduced mod pi, ready for evaluation in
// characteristic-p coefficient rings.
struct ReducedPoly {
    std::vector<std::pair<MultiPoly::Key, FqElem>> terms;
};

// Universal addition/multiplication/negation polynomials of the ramified
// Witt vectors W_n(-)_L, derived from the ghost components
// Phi_j = X_0^{q^j} + pi X_1^{q^{j-1}} + ... + pi^j X_j by the recursive
// exact solve. S_j, P_j, I_j are held at precision m - j (each solve divides
// by pi^j); the reduced forms drive all runtime arithmetic.
class UniversalWittPolys {
  public:
    // m must exceed n*e so that every division is watched with slack.
    static std::shared_ptr<const UniversalWittPolys> get(const LocalFieldPtr& F, int n, int m);

    const LocalFieldPtr& field() const { return F_; }
    int n() const { return n_; }
    int m() const { return m_; }

    const MultiPoly& S(int j) const { return S_[j]; }
    const MultiPoly& P(int j) const { return P_[j]; }
    const MultiPoly& I(int j) const { return I_[j]; }
    const ReducedPoly& S_red(int j) const { return Sr_[j]; }
    const ReducedPoly& P_red(int j) const { return Pr_[j]; }
    const ReducedPoly& I_red(int j) const { return Ir_[j]; }

    // ghost polynomial applied to polynomial arguments args[0..j]
    static MultiPoly ghost_apply(const std::vector<MultiPoly>& args, int j, const LocalFieldPtr& F,
                                 int m);
    static MultiPoly ghost_x(const LocalFieldPtr& F, int j, int m);
    static MultiPoly ghost_y(const LocalFieldPtr& F, int j, int m);

  private:
    UniversalWittPolys() = default;

    LocalFieldPtr F_;
    int n_ = 0;
    int m_ = 0;
    std::vector<MultiPoly> S_, P_, I_;
    std::vector<ReducedPoly> Sr_, Pr_, Ir_;
};

// Gauss norm result as an exact q-exponent: |x|_r = q^exponent. `certified`
// is false when the window truncation cannot pin the sup; `boundary` marks a
// sup attained at the last stored Witt component.
struct GaussNorm {
    bool zero = false;
    Rat exponent;
    bool certified = true;
    bool boundary = false;

    std::string str() const;
};

// Coefficient-ring adapters for the rings Witt vectors are taken over.
template <class R>
struct CoeffTraits;

template <>
struct CoeffTraits<FqElem> {
    static FqElem frobenius(const FqElem& x, std::int64_t q) {
        return x.pow(static_cast<std::uint64_t>(q));
    }
    static bool is_zero_on_window(const FqElem& x) { return x.is_zero(); }
    static std::optional<Rat> valuation(const FqElem& x) {
        if (x.is_zero()) return std::nullopt;
        return Rat(0);
    }
    // upper window bound for the valuation of an on-window-zero element;
    // nullopt means zero is exact
    static std::optional<Rat> zero_valuation_bound(const FqElem&) { return std::nullopt; }
};

template <>
struct CoeffTraits<LaurentSeriesFq> {
    static LaurentSeriesFq frobenius(const LaurentSeriesFq& x, std::int64_t) { return x.frobenius(); }
    static bool is_zero_on_window(const LaurentSeriesFq& x) { return x.is_zero_on_window(); }
    static std::optional<Rat> valuation(const LaurentSeriesFq& x) {
        auto v = x.valuation();
        if (!v) return std::nullopt;
        return Rat(*v);
    }
    static std::optional<Rat> zero_valuation_bound(const LaurentSeriesFq& x) {
        return Rat(x.window_hi());
    }
};

template <>
struct CoeffTraits<PerfLaurent> {
    static PerfLaurent frobenius(const PerfLaurent& x, std::int64_t) { return x.frobenius(); }
    static bool is_zero_on_window(const PerfLaurent& x) { return x.is_zero_on_window(); }
    static std::optional<Rat> valuation(const PerfLaurent& x) { return x.valuation(); }
    static std::optional<Rat> zero_valuation_bound(const PerfLaurent& x) { return x.window_hi(); }
};

// The ring W_n(R)_L for a fixed coefficient ring instance. Values are plain
// component vectors; the ring object carries the universal polynomials, a
// zero prototype fixing the window context, and the embedding of the residue
// field into R's coefficient field.
template <class R>
class WittRing {
  public:
    using Vec = std::vector<R>;

    WittRing(std::shared_ptr<const UniversalWittPolys> polys, R zero_proto,
             std::function<R(const FqElem&)> scalar)
        : polys_(std::move(polys)), zero_(std::move(zero_proto)), scalar_(std::move(scalar)) {}

    int n() const { return polys_->n(); }
    std::int64_t q() const { return polys_->field()->q(); }
    const LocalFieldPtr& field() const { return polys_->field(); }
    const R& zero_proto() const { return zero_; }
    R scalar(const FqElem& c) const { return scalar_(c); }

    Vec zero() const { return Vec(static_cast<size_t>(n()), zero_); }
    Vec teichmueller(const R& x) const {
        Vec v = zero();
        v[0] = x;
        return v;
    }

    Vec add(const Vec& a, const Vec& b) const { return eval_all(&UniversalWittPolys::S_red, a, b); }
    Vec mul(const Vec& a, const Vec& b) const { return eval_all(&UniversalWittPolys::P_red, a, b); }
    Vec neg(const Vec& a) const { return eval_all(&UniversalWittPolys::I_red, a, zero()); }
    Vec sub(const Vec& a, const Vec& b) const { return add(a, neg(b)); }

    Vec frobenius(const Vec& a) const {
        Vec r;
        r.reserve(a.size());
        for (const auto& x : a) r.push_back(CoeffTraits<R>::frobenius(x, q()));
        return r;
    }

    Vec verschiebung(const Vec& a, int k = 1) const {
        Vec r = zero();
        for (int i = 0; i + k < n(); ++i) r[static_cast<size_t>(i + k)] = a[static_cast<size_t>(i)];
        return r;
    }

    // pi x = V(phi_q(x)) in characteristic p
    Vec mul_pi(const Vec& a) const { return verschiebung(frobenius(a), 1); }

    // a x for a in o_L via the Teichmueller digit expansion of a
    Vec scalar_ol(const OLElement& a, const Vec& x) const {
        Vec acc = zero();
        Vec cur = x;
        for (int i = 0; i < a.precision() && i < n(); ++i) {
            if (!a.digit(i).is_zero()) {
                Vec t = mul(teichmueller(scalar_(a.digit(i))), cur);
                acc = add(acc, t);
            }
            cur = mul_pi(cur);
        }
        return acc;
    }

    Vec pow(const Vec& a, std::uint64_t e) const {
        Vec r = teichmueller(scalar_(FqElem::one(field()->residue_field())));
        Vec base = a;
        while (e) {
            if (e & 1) r = mul(r, base);
            base = mul(base, base);
            e >>= 1;
        }
        return r;
    }

    // Newton inversion; needs an invertible leading component.
    Vec inv(const Vec& a) const;

    bool is_zero(const Vec& a) const {
        for (const auto& x : a)
            if (!CoeffTraits<R>::is_zero_on_window(x)) return false;
        return true;
    }

    GaussNorm norm_r(const Vec& a, const Rat& r, const Rat& w) const;
    GaussNorm norm_interval(const Vec& a, const Rat& s, const Rat& r, const Rat& w) const;

    R eval_reduced(const ReducedPoly& poly, const Vec& xs, const Vec& ys) const;

  private:
    using RedGetter = const ReducedPoly& (UniversalWittPolys::*)(int) const;
    Vec eval_all(RedGetter get, const Vec& a, const Vec& b) const {
        Vec r;
        r.reserve(static_cast<size_t>(n()));
        for (int j = 0; j < n(); ++j) r.push_back(eval_reduced((polys_.get()->*get)(j), a, b));
        return r;
    }

    std::shared_ptr<const UniversalWittPolys> polys_;
    R zero_;
    std::function<R(const FqElem&)> scalar_;
};

template <class R>
R WittRing<R>::eval_reduced(const ReducedPoly& poly, const Vec& xs, const Vec& ys) const {
    // per-variable power caches
    std::vector<std::vector<R>> xpow(xs.size()), ypow(ys.size());
    auto power = [&](std::vector<R>& cache, const R& base, int e) -> const R& {
        while (static_cast<int>(cache.size()) <= e) {
            if (cache.empty())
                cache.push_back(scalar_(FqElem::one(field()->residue_field())));
            else
                cache.push_back(cache.back() * base);
        }
        return cache[static_cast<size_t>(e)];
    };
    R acc = zero_;
    for (const auto& [key, coeff] : poly.terms) {
        R t = scalar_(coeff);
        for (size_t i = 0; i < xs.size(); ++i) {
            int e = static_cast<int>((key >> (8 * i)) & 0xff);
            if (e) t = t * power(xpow[i], xs[i], e);
        }
        for (size_t i = 0; i < ys.size(); ++i) {
            int e = static_cast<int>((key >> (8 * (MultiPoly::kMaxN + i))) & 0xff);
            if (e) t = t * power(ypow[i], ys[i], e);
        }
        acc = acc + t;
    }
    return acc;
}

template <class R>
typename WittRing<R>::Vec WittRing<R>::inv(const Vec& a) const {
    const R& lead = a[0];
    if (CoeffTraits<R>::is_zero_on_window(lead)) throw NonUnitError("Witt inverse: leading component zero");
    Vec y = teichmueller(lead.inv());
    Vec one = teichmueller(scalar_(FqElem::one(field()->residue_field())));
    int iters = 1;
    while ((1 << iters) < n()) ++iters;
    for (int it = 0; it <= iters; ++it) {
        Vec t = sub(add(one, one), mul(a, y));
        y = mul(y, t);
    }
    return y;
}

template <class R>
GaussNorm WittRing<R>::norm_r(const Vec& a, const Rat& r, const Rat& w) const {
    // x = sum pi^i [t_i] has Teichmueller coordinates t_i = comp_i^{1/q^i};
    // the sup runs over q^{-i} |t_i|^r, so component valuations scale by q^i.
    GaussNorm out;
    bool any = false;
    Rat best;
    int best_idx = -1;
    std::int64_t qi = 1;
    for (int i = 0; i < static_cast<int>(a.size()); ++i, qi *= q()) {
        auto v = CoeffTraits<R>::valuation(a[static_cast<size_t>(i)]);
        if (!v) continue;
        Rat t = Rat(-i) - r * w * (*v) / Rat(qi);
        if (!any || t > best) {
            best = t;
            best_idx = i;
            any = true;
        }
    }
    if (!any) {
        out.zero = true;
        // zero only certified when every component is exactly zero
        for (const auto& x : a)
            if (CoeffTraits<R>::zero_valuation_bound(x).has_value()) out.certified = false;
        return out;
    }
    out.exponent = best;
    out.boundary = (best_idx == static_cast<int>(a.size()) - 1);
    // window-zero components may hide larger contributions
    qi = 1;
    for (int i = 0; i < static_cast<int>(a.size()); ++i, qi *= q()) {
        auto v = CoeffTraits<R>::valuation(a[static_cast<size_t>(i)]);
        if (v) continue;
        auto bound = CoeffTraits<R>::zero_valuation_bound(a[static_cast<size_t>(i)]);
        if (!bound) continue;  // exact zero
        Rat potential = Rat(-i) - r * w * (*bound) / Rat(qi);
        if (potential > best) out.certified = false;
    }
    return out;
}

template <class R>
GaussNorm WittRing<R>::norm_interval(const Vec& a, const Rat& s, const Rat& r, const Rat& w) const {
    if (!(Rat(0) < s && s <= r)) throw std::invalid_argument("need 0 < s <= r");
    GaussNorm ns = norm_r(a, s, w), nr = norm_r(a, r, w);
    if (ns.zero) return nr;
    if (nr.zero) return ns;
    GaussNorm out = (ns.exponent >= nr.exponent) ? ns : nr;
    out.certified = ns.certified && nr.certified;
    return out;
}

// Convenience builders.
WittRing<FqElem> make_witt_fq(const LocalFieldPtr& F, int n, const FqFieldPtr& ambient);
WittRing<LaurentSeriesFq> make_witt_laurent(const LocalFieldPtr& F, int n, std::int64_t v_min,
                                            std::int64_t N);
WittRing<PerfLaurent> make_witt_perf(const LocalFieldPtr& F, int n, int level, std::int64_t v_min,
                                     std::int64_t N, int max_level = PerfLaurent::kDefaultMaxLevel);

// Enumerates all of W_n(ambient) componentwise; the callback receives the
// component vector.
void enumerate_witt(const FqFieldPtr& ambient, int n,
                    const std::function<void(const std::vector<FqElem>&)>& fn);

}  // namespace phigamma

#include "phigamma/laurent_fq.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <vector>

#include "phigamma/errors.hpp"

namespace phigamma {

namespace {
std::int64_t ipow64(std::int64_t b, int e) {
    std::int64_t r = 1;
    while (e--) r *= b;
    return r;
}
}  // namespace

LaurentSeriesFq LaurentSeriesFq::monomial(const FqFieldPtr& k, std::int64_t q, const FqElem& c,
                                          std::int64_t e, std::int64_t v_min, std::int64_t N) {
    LaurentSeriesFq s(k, q, v_min, N);
    s.set_coeff(e, c);
    return s;
}

FqElem LaurentSeriesFq::coeff(std::int64_t e) const {
    auto it = coeffs_.find(e);
    if (it != coeffs_.end()) return it->second;
    return FqElem::zero(k_);
}

void LaurentSeriesFq::set_coeff(std::int64_t e, const FqElem& c) {
    if (e < v_min_ || e >= N_) return;
    if (c.is_zero())
        coeffs_.erase(e);
    else
        coeffs_[e] = c;
}

std::optional<std::int64_t> LaurentSeriesFq::valuation() const {
    if (coeffs_.empty()) return std::nullopt;
    return coeffs_.begin()->first;
}

LaurentSeriesFq LaurentSeriesFq::operator+(const LaurentSeriesFq& o) const {
    LaurentSeriesFq r(k_, q_, std::min(v_min_, o.v_min_), std::min(N_, o.N_));
    for (const auto& [e, c] : coeffs_) r.set_coeff(e, c);
    for (const auto& [e, c] : o.coeffs_) r.set_coeff(e, r.coeff(e) + c);
    return r;
}

LaurentSeriesFq LaurentSeriesFq::operator-(const LaurentSeriesFq& o) const {
    LaurentSeriesFq r(k_, q_, std::min(v_min_, o.v_min_), std::min(N_, o.N_));
    for (const auto& [e, c] : coeffs_) r.set_coeff(e, c);
    for (const auto& [e, c] : o.coeffs_) r.set_coeff(e, r.coeff(e) - c);
    return r;
}

LaurentSeriesFq LaurentSeriesFq::operator-() const {
    LaurentSeriesFq r(k_, q_, v_min_, N_);
    for (const auto& [e, c] : coeffs_) r.coeffs_[e] = -c;
    return r;
}

LaurentSeriesFq LaurentSeriesFq::operator*(const LaurentSeriesFq& o) const {
    // The certified product window uses the exact support starts: unknown
    // tails begin at N_ + v(o) resp. o.N_ + v(*this). A window-zero factor
    // has support at >= N.
    std::int64_t va = valuation().value_or(N_);
    std::int64_t vb = o.valuation().value_or(o.N_);
    std::int64_t lo = va + vb;
    std::int64_t hi = std::min(N_ + vb, o.N_ + va);
    LaurentSeriesFq r(k_, q_, lo, hi);
    for (const auto& [e1, c1] : coeffs_)
        for (const auto& [e2, c2] : o.coeffs_) {
            std::int64_t e = e1 + e2;
            if (e >= hi) break;
            r.set_coeff(e, r.coeff(e) + c1 * c2);
        }
    return r;
}

LaurentSeriesFq LaurentSeriesFq::scaled(const FqElem& c) const {
    LaurentSeriesFq r(k_, q_, v_min_, N_);
    if (c.is_zero()) return r;
    for (const auto& [e, v] : coeffs_) r.coeffs_[e] = v * c;
    return r;
}

LaurentSeriesFq LaurentSeriesFq::shifted(std::int64_t s) const {
    LaurentSeriesFq r(k_, q_, v_min_ + s, N_ + s);
    for (const auto& [e, v] : coeffs_) r.coeffs_[e + s] = v;
    return r;
}

LaurentSeriesFq LaurentSeriesFq::restricted(std::int64_t v_min, std::int64_t N) const {
    LaurentSeriesFq r(k_, q_, std::max(v_min, v_min_), std::min(N, N_));
    for (const auto& [e, v] : coeffs_) r.set_coeff(e, v);
    return r;
}

LaurentSeriesFq LaurentSeriesFq::inv() const {
    auto v = valuation();
    if (!v) throw UncertifiedLeadingTermError();
    FqElem lead = coeff(*v);
    // x = lead w^v (1 + u); invert by Newton iteration on (1+u)
    LaurentSeriesFq unit = shifted(-*v).scaled(lead.inv());  // 1 + u, window [0, N - v)
    std::int64_t len = unit.N_;                              // known length of the unit part
    LaurentSeriesFq y = monomial(k_, q_, FqElem::one(k_), 0, 0, len);
    while (true) {
        // y <- y (2 - unit y)
        LaurentSeriesFq two = monomial(k_, q_, FqElem::from_int(k_, 2), 0, 0, len);
        LaurentSeriesFq t = two - unit * y;
        t = t.restricted(0, len);
        LaurentSeriesFq y2 = (y * t).restricted(0, len);
        if (y2.coeffs() == y.coeffs()) break;
        y = y2;
    }
    return y.shifted(-*v).scaled(lead.inv());
}

LaurentSeriesFq LaurentSeriesFq::frobenius() const {
    LaurentSeriesFq r(k_, q_, q_ * v_min_, q_ * N_);
    for (const auto& [e, c] : coeffs_) r.coeffs_[q_ * e] = c.pow(static_cast<std::uint64_t>(q_));
    return r;
}

std::string LaurentSeriesFq::str(const std::string& var) const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : coeffs_) {
        if (!first) os << " + ";
        first = false;
        os << c.str() << "*" << var << "^" << e;
    }
    if (first) os << "0";
    os << " + O(" << var << "^" << N_ << ")";
    return os.str();
}

// ---------------------------------------------------------------------------
// PerfLaurent

PerfLaurent::PerfLaurent(FqFieldPtr k, std::int64_t q, int level, std::int64_t v_min_num,
                         std::int64_t N_num, int max_level)
    : k_(std::move(k)), q_(q), level_(level), max_level_(max_level), denom_(ipow64(q, level)),
      v_min_num_(v_min_num), N_num_(N_num) {
    if (level_ > max_level_) throw PerfLevelExceededError();
}

PerfLaurent PerfLaurent::from_laurent(const LaurentSeriesFq& x, int level, int max_level) {
    std::int64_t D = ipow64(x.q(), level);
    PerfLaurent r(x.coeff_field(), x.q(), level, x.window_lo() * D, x.window_hi() * D, max_level);
    for (const auto& [e, c] : x.coeffs()) r.coeffs_[e * D] = c;
    return r;
}

PerfLaurent PerfLaurent::monomial(const FqFieldPtr& k, std::int64_t q, const FqElem& c, const Rat& e,
                                  int level, const Rat& v_min, const Rat& N, int max_level) {
    std::int64_t D = ipow64(q, level);
    Rat lo = v_min * Rat(D), hi = N * Rat(D);
    if (!lo.is_integer() || !hi.is_integer())
        throw std::invalid_argument("window bounds not representable at this perf_level");
    PerfLaurent r(k, q, level, lo.num(), hi.num(), max_level);
    r.set_coeff(e, c);
    return r;
}

FqElem PerfLaurent::coeff(const Rat& e) const {
    Rat key = e * Rat(denom_);
    if (!key.is_integer()) return FqElem::zero(k_);
    auto it = coeffs_.find(key.num());
    if (it != coeffs_.end()) return it->second;
    return FqElem::zero(k_);
}

void PerfLaurent::set_coeff(const Rat& e, const FqElem& c) {
    Rat key = e * Rat(denom_);
    if (!key.is_integer()) throw std::invalid_argument("exponent not representable at this perf_level");
    set_scaled_coeff(key.num(), c);
}

void PerfLaurent::set_scaled_coeff(std::int64_t key, const FqElem& c) {
    if (key < v_min_num_ || key >= N_num_) return;
    if (c.is_zero())
        coeffs_.erase(key);
    else
        coeffs_[key] = c;
}

std::optional<Rat> PerfLaurent::valuation() const {
    if (coeffs_.empty()) return std::nullopt;
    return Rat(coeffs_.begin()->first, denom_);
}

PerfLaurent PerfLaurent::with_level(int level) const {
    if (level < level_) throw std::invalid_argument("cannot lower perf_level representation");
    if (level == level_) return *this;
    std::int64_t scale = ipow64(q_, level - level_);
    PerfLaurent r(k_, q_, level, v_min_num_ * scale, N_num_ * scale, max_level_);
    for (const auto& [e, c] : coeffs_) r.coeffs_[e * scale] = c;
    return r;
}

PerfLaurent PerfLaurent::operator+(const PerfLaurent& o) const {
    int lvl = std::max(level_, o.level_);
    PerfLaurent a = with_level(lvl), b = o.with_level(lvl);
    PerfLaurent r(k_, q_, lvl, std::min(a.v_min_num_, b.v_min_num_), std::min(a.N_num_, b.N_num_),
                  std::max(max_level_, o.max_level_));
    for (const auto& [e, c] : a.coeffs_) r.set_scaled_coeff(e, c);
    for (const auto& [e, c] : b.coeffs_) {
        auto it = r.coeffs_.find(e);
        FqElem cur = (it != r.coeffs_.end()) ? it->second : FqElem::zero(k_);
        r.set_scaled_coeff(e, cur + c);
    }
    return r;
}

PerfLaurent PerfLaurent::operator-(const PerfLaurent& o) const { return *this + (-o); }

PerfLaurent PerfLaurent::operator-() const {
    PerfLaurent r = *this;
    for (auto& [e, c] : r.coeffs_) c = -c;
    return r;
}

PerfLaurent PerfLaurent::operator*(const PerfLaurent& o) const {
    int lvl = std::max(level_, o.level_);
    PerfLaurent a = with_level(lvl), b = o.with_level(lvl);
    std::int64_t va = a.coeffs_.empty() ? a.N_num_ : a.coeffs_.begin()->first;
    std::int64_t vb = b.coeffs_.empty() ? b.N_num_ : b.coeffs_.begin()->first;
    std::int64_t lo = va + vb;
    std::int64_t hi = std::min(a.N_num_ + vb, b.N_num_ + va);
    PerfLaurent r(k_, q_, lvl, lo, hi, std::max(max_level_, o.max_level_));
    for (const auto& [e1, c1] : a.coeffs_)
        for (const auto& [e2, c2] : b.coeffs_) {
            std::int64_t e = e1 + e2;
            if (e >= hi) break;
            auto it = r.coeffs_.find(e);
            FqElem cur = (it != r.coeffs_.end()) ? it->second : FqElem::zero(k_);
            r.set_scaled_coeff(e, cur + c1 * c2);
        }
    return r;
}

PerfLaurent PerfLaurent::scaled(const FqElem& c) const {
    PerfLaurent r(k_, q_, level_, v_min_num_, N_num_, max_level_);
    if (c.is_zero()) return r;
    for (const auto& [e, v] : coeffs_) r.coeffs_[e] = v * c;
    return r;
}

PerfLaurent PerfLaurent::inv() const {
    auto v = valuation();
    if (!v) throw UncertifiedLeadingTermError();
    std::int64_t vkey = coeffs_.begin()->first;
    FqElem lead = coeffs_.begin()->second;
    // shift to a unit with constant term 1, Newton-invert, shift back
    PerfLaurent unit(k_, q_, level_, 0, N_num_ - vkey, max_level_);
    for (const auto& [e, c] : coeffs_) unit.coeffs_[e - vkey] = c * lead.inv();
    std::int64_t len = unit.N_num_;
    PerfLaurent y(k_, q_, level_, 0, len, max_level_);
    y.coeffs_[0] = FqElem::one(k_);
    while (true) {
        PerfLaurent two(k_, q_, level_, 0, len, max_level_);
        two.coeffs_[0] = FqElem::from_int(k_, 2);
        PerfLaurent t = two - unit * y;
        PerfLaurent y2 = y * t;
        // clamp window back to [0, len)
        PerfLaurent y3(k_, q_, level_, 0, len, max_level_);
        for (const auto& [e, c] : y2.coeffs_) y3.set_scaled_coeff(e, c);
        if (y3.coeffs_ == y.coeffs_) break;
        y = y3;
    }
    PerfLaurent r(k_, q_, level_, -vkey, N_num_ - 2 * vkey, max_level_);
    for (const auto& [e, c] : y.coeffs_) r.set_scaled_coeff(e - vkey, c * lead.inv());
    return r;
}

PerfLaurent PerfLaurent::restricted(const Rat& v_min, const Rat& N) const {
    Rat lo = v_min * Rat(denom_), hi = N * Rat(denom_);
    if (!lo.is_integer() || !hi.is_integer())
        throw std::invalid_argument("window bounds not representable at this perf_level");
    PerfLaurent r(k_, q_, level_, std::max(lo.num(), v_min_num_), std::min(hi.num(), N_num_), max_level_);
    for (const auto& [e, c] : coeffs_) r.set_scaled_coeff(e, c);
    return r;
}

PerfLaurent PerfLaurent::frobenius() const {
    PerfLaurent r(k_, q_, level_, q_ * v_min_num_, q_ * N_num_, max_level_);
    for (const auto& [e, c] : coeffs_) r.coeffs_[q_ * e] = c.pow(static_cast<std::uint64_t>(q_));
    return r;
}

PerfLaurent PerfLaurent::qth_root() const {
    if (level_ + 1 > max_level_) throw PerfLevelExceededError();
    // exponents divide by q: with the denominator bumped by one level the
    // scaled keys are unchanged
    PerfLaurent r(k_, q_, level_ + 1, v_min_num_, N_num_, max_level_);
    for (const auto& [e, c] : coeffs_) r.coeffs_[e] = c.qth_root(static_cast<std::uint64_t>(q_));
    return r;
}

LaurentSeriesFq PerfLaurent::integral_part() const {
    // window bounds rounded inward to integers
    std::int64_t lo = v_min_num_ >= 0 ? (v_min_num_ + denom_ - 1) / denom_
                                      : -((-v_min_num_) / denom_);
    std::int64_t hi = N_num_ >= 0 ? (N_num_ + denom_ - 1) / denom_ : -((-N_num_) / denom_);
    LaurentSeriesFq r(k_, q_, lo, hi);
    for (const auto& [e, c] : coeffs_)
        if (e % denom_ == 0) r.set_coeff(e / denom_, c);
    return r;
}

PerfLaurent PerfLaurent::fractional_part() const {
    PerfLaurent r(k_, q_, level_, v_min_num_, N_num_, max_level_);
    for (const auto& [e, c] : coeffs_)
        if (e % denom_ != 0) r.coeffs_[e] = c;
    return r;
}

bool PerfLaurent::operator==(const PerfLaurent& o) const {
    int lvl = std::max(level_, o.level_);
    PerfLaurent a = with_level(lvl), b = o.with_level(lvl);
    return a.v_min_num_ == b.v_min_num_ && a.N_num_ == b.N_num_ && a.coeffs_ == b.coeffs_;
}

std::string PerfLaurent::str(const std::string& var) const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : coeffs_) {
        if (!first) os << " + ";
        first = false;
        os << c.str() << "*" << var << "^(" << Rat(e, denom_).str() << ")";
    }
    if (first) os << "0";
    os << " + O(" << var << "^(" << Rat(N_num_, denom_).str() << "))";
    return os.str();
}

// ---------------------------------------------------------------------------
// solvers

ArtinSchreierResult artin_schreier_solve(const LaurentSeriesFq& a) {
    const auto& k = a.coeff_field();
    std::int64_t q = a.q();
    std::int64_t v = a.window_lo(), N = a.window_hi();
    if (v > 0 || N <= 0) throw WindowTooSmallError("Artin-Schreier window must contain 0");
    LaurentSeriesFq x(k, q, v, N);

    // constant term: solve c^q - c = a_0 in k by enumeration
    FqElem a0 = a.coeff(0);
    FqElem obstruction = a0;
    if (!a0.is_zero()) {
        for (std::uint64_t i = 0; i < k->size(); ++i) {
            FqElem c = FqElem::from_index(k, i);
            if (c.pow(static_cast<std::uint64_t>(q)) - c == a0) {
                x.set_coeff(0, c);
                obstruction = FqElem::zero(k);
                break;
            }
        }
    }

    // positive exponents, ascending: x_n = (x_{n/q})^q - a_n
    for (std::int64_t n = 1; n < N; ++n) {
        FqElem c = -a.coeff(n);
        if (n % q == 0) c = c + x.coeff(n / q).pow(static_cast<std::uint64_t>(q));
        x.set_coeff(n, c);
    }
    // negative exponents, descending from -1: the orbit tops (q does not
    // divide n) are pinned directly, deeper members follow
    for (std::int64_t n = -1; n >= v; --n) {
        FqElem c = -a.coeff(n);
        if (n % q == 0) c = c + x.coeff(n / q).pow(static_cast<std::uint64_t>(q));
        x.set_coeff(n, c);
    }
    return {x, obstruction};
}

// ---------------------------------------------------------------------------
// parsing of "c*w^e + ... + O(w^N)" with e an integer or (a/b)

namespace {

struct ParsedTerm {
    std::string coeff;
    Rat exponent;
};

std::vector<ParsedTerm> split_terms(const std::string& text) {
    std::vector<ParsedTerm> out;
    std::istringstream in(text);
    std::string tok;
    std::vector<std::string> raw;
    // split on '+' surrounded by spaces; coefficients never contain '+'
    std::string cur;
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '+') {
            raw.push_back(cur);
            cur.clear();
        } else {
            cur += text[i];
        }
    }
    raw.push_back(cur);
    for (auto& term : raw) {
        // trim
        size_t a = term.find_first_not_of(" \t");
        size_t b = term.find_last_not_of(" \t");
        if (a == std::string::npos) continue;
        std::string t = term.substr(a, b - a + 1);
        if (t.empty() || t == "0") continue;
        if (t.rfind("O(", 0) == 0) continue;  // window annotation
        auto star = t.find('*');
        if (star == std::string::npos) throw std::invalid_argument("malformed series term: " + t);
        auto caret = t.find('^', star);
        if (caret == std::string::npos) throw std::invalid_argument("malformed series term: " + t);
        std::string expo = t.substr(caret + 1);
        if (!expo.empty() && expo.front() == '(') {
            if (expo.back() != ')') throw std::invalid_argument("malformed exponent: " + expo);
            expo = expo.substr(1, expo.size() - 2);
        }
        out.push_back({t.substr(0, star), Rat::parse(expo)});
    }
    return out;
}

FqElem parse_fq_coeff(const FqFieldPtr& k, const std::string& s) {
    size_t i = 0;
    if (!s.empty() && s[0] == '[') {
        std::vector<int> coords;
        ++i;
        while (i < s.size() && s[i] != ']') {
            size_t j = i;
            while (j < s.size() && (s[j] == '-' || std::isdigit(static_cast<unsigned char>(s[j])))) ++j;
            coords.push_back(std::stoi(s.substr(i, j - i)));
            i = j;
            if (i < s.size() && s[i] == ',') ++i;
        }
        return FqElem(k, coords);
    }
    return FqElem::from_int(k, std::stoll(s));
}

}  // namespace

LaurentSeriesFq LaurentSeriesFq::parse(const FqFieldPtr& k, std::int64_t q, const std::string& text,
                                       std::int64_t v_min, std::int64_t N) {
    LaurentSeriesFq r(k, q, v_min, N);
    for (const auto& term : split_terms(text)) {
        if (!term.exponent.is_integer())
            throw std::invalid_argument("fractional exponent in integral series");
        r.set_coeff(term.exponent.num(), parse_fq_coeff(k, term.coeff));
    }
    return r;
}

PerfLaurent PerfLaurent::parse(const FqFieldPtr& k, std::int64_t q, const std::string& text, int level,
                               const Rat& v_min, const Rat& N, int max_level) {
    std::int64_t D = ipow64(q, level);
    Rat lo = v_min * Rat(D), hi = N * Rat(D);
    if (!lo.is_integer() || !hi.is_integer())
        throw std::invalid_argument("window bounds not representable at this perf_level");
    PerfLaurent r(k, q, level, lo.num(), hi.num(), max_level);
    for (const auto& term : split_terms(text)) r.set_coeff(term.exponent, parse_fq_coeff(k, term.coeff));
    return r;
}

PerfLaurent phi_minus_one_solve_perf_mod_E(const PerfLaurent& a) {
    if (a.perf_level() < 1) throw std::invalid_argument("target must have perf_level >= 1");
    const auto& k = a.coeff_field();
    std::int64_t q = a.q();
    int L = a.perf_level();
    PerfLaurent aL = a;

    // denominator depth of a scaled key: the minimal j with exponent * q^j
    // integral; phi maps depth j+1 terms to depth j terms exactly
    auto depth_of_key = [&](std::int64_t key) {
        int t = 0;
        std::int64_t v = key;
        while (t < L && v % q == 0) { v /= q; ++t; }
        return L - t;
    };

    std::int64_t lo = aL.scaled_window_lo();
    std::int64_t hi = aL.scaled_window_hi();
    std::vector<PerfLaurent> part(static_cast<size_t>(L) + 1, PerfLaurent(k, q, L, lo, hi, aL.max_level()));
    for (const auto& [key, c] : aL.scaled_coeffs()) {
        int d = depth_of_key(key);
        part[static_cast<size_t>(d)].set_scaled_coeff(key, c);
    }

    // x^{(j)} = phi(x^{(j+1)}) - a^{(j)} from the deepest level down; beyond
    // the perfection cap x vanishes by policy
    const std::int64_t wide = std::int64_t(1) << 40;
    PerfLaurent cur(k, q, L, -wide, wide, aL.max_level());  // x^{(L+1)} = 0
    PerfLaurent total(k, q, L, -wide, wide, aL.max_level());
    for (int j = L; j >= 1; --j) {
        cur = cur.frobenius().with_level(L) - part[static_cast<size_t>(j)];
        total = total + cur;
    }
    return total;
}

}  // namespace phigamma

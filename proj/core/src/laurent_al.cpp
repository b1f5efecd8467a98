#include "phigamma/laurent_al.hpp"

#include <algorithm>
#include <sstream>

#include "phigamma/errors.hpp"

namespace phigamma {

namespace {

std::int64_t clamp_window(std::int64_t v) {
    return std::max(std::min(v, LaurentSeriesAL::kExactWindow), -LaurentSeriesAL::kExactWindow);
}

// ceil division for window class extraction
std::int64_t cdiv(std::int64_t a, std::int64_t b) {
    return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

}  // namespace

LaurentSeriesAL LaurentSeriesAL::monomial(const LocalFieldPtr& F, const OLElement& c, std::int64_t e,
                                          int m, std::int64_t v_min, std::int64_t N) {
    LaurentSeriesAL s(F, m, v_min, N);
    s.set_coeff(e, c);
    return s;
}

LaurentSeriesAL LaurentSeriesAL::from_power_series(const PowerSeries& s, std::int64_t v_min) {
    LaurentSeriesAL r(s.field(), s.precision(), v_min, s.degree_bound());
    for (const auto& [k, c] : s.coeffs()) r.set_coeff(k, c);
    return r;
}

OLElement LaurentSeriesAL::coeff(std::int64_t e) const {
    auto it = coeffs_.find(e);
    if (it != coeffs_.end()) return it->second;
    return OLElement::zero(field_, m_);
}

void LaurentSeriesAL::set_coeff(std::int64_t e, const OLElement& c) {
    if (e < v_min_ || e >= N_) return;
    OLElement t = c.truncated(m_);
    if (t.is_zero())
        coeffs_.erase(e);
    else
        coeffs_[e] = t;
}

std::optional<std::int64_t> LaurentSeriesAL::support_lo() const {
    if (coeffs_.empty()) return std::nullopt;
    return coeffs_.begin()->first;
}

LaurentSeriesAL LaurentSeriesAL::operator+(const LaurentSeriesAL& o) const {
    LaurentSeriesAL r(field_, std::min(m_, o.m_), std::min(v_min_, o.v_min_), std::min(N_, o.N_));
    for (const auto& [e, c] : coeffs_) r.set_coeff(e, c);
    for (const auto& [e, c] : o.coeffs_) r.set_coeff(e, r.coeff(e) + c);
    return r;
}

LaurentSeriesAL LaurentSeriesAL::operator-(const LaurentSeriesAL& o) const {
    LaurentSeriesAL r(field_, std::min(m_, o.m_), std::min(v_min_, o.v_min_), std::min(N_, o.N_));
    for (const auto& [e, c] : coeffs_) r.set_coeff(e, c);
    for (const auto& [e, c] : o.coeffs_) r.set_coeff(e, r.coeff(e) - c);
    return r;
}

LaurentSeriesAL LaurentSeriesAL::operator-() const {
    LaurentSeriesAL r(field_, m_, v_min_, N_);
    for (const auto& [e, c] : coeffs_) r.coeffs_[e] = -c;
    return r;
}

LaurentSeriesAL LaurentSeriesAL::operator*(const LaurentSeriesAL& o) const {
    std::int64_t va = support_lo().value_or(N_);
    std::int64_t vb = o.support_lo().value_or(o.N_);
    std::int64_t lo = clamp_window(va + vb);
    std::int64_t hi = clamp_window(std::min(N_ + vb, o.N_ + va));
    LaurentSeriesAL r(field_, std::min(m_, o.m_), lo, hi);
    for (const auto& [e1, c1] : coeffs_)
        for (const auto& [e2, c2] : o.coeffs_) {
            std::int64_t e = e1 + e2;
            if (e >= hi) break;
            r.set_coeff(e, r.coeff(e) + c1 * c2);
        }
    return r;
}

LaurentSeriesAL LaurentSeriesAL::scaled(const OLElement& c) const {
    LaurentSeriesAL r(field_, std::min<int>(m_, c.precision()), v_min_, N_);
    for (const auto& [e, v] : coeffs_) r.set_coeff(e, v * c);
    return r;
}

LaurentSeriesAL LaurentSeriesAL::shifted(std::int64_t s) const {
    LaurentSeriesAL r(field_, m_, clamp_window(v_min_ + s), clamp_window(N_ + s));
    for (const auto& [e, v] : coeffs_) r.coeffs_[e + s] = v;
    return r;
}

LaurentSeriesAL LaurentSeriesAL::restricted(std::int64_t v_min, std::int64_t N) const {
    LaurentSeriesAL r(field_, m_, std::max(v_min, v_min_), std::min(N, N_));
    for (const auto& [e, v] : coeffs_) r.set_coeff(e, v);
    return r;
}

LaurentSeriesAL LaurentSeriesAL::truncated_precision(int m) const {
    LaurentSeriesAL r(field_, std::min(m, m_), v_min_, N_);
    for (const auto& [e, v] : coeffs_) r.set_coeff(e, v);
    return r;
}

LaurentSeriesAL LaurentSeriesAL::mul_by_pi() const {
    LaurentSeriesAL r(field_, m_ + 1, v_min_, N_);
    for (const auto& [e, v] : coeffs_) r.coeffs_[e] = v.mul_by_pi();
    return r;
}

LaurentSeriesAL LaurentSeriesAL::div_by_pi_exact() const {
    LaurentSeriesAL r(field_, m_ - 1, v_min_, N_);
    for (const auto& [e, v] : coeffs_) r.set_coeff(e, v.div_by_pi_exact());
    return r;
}

LaurentSeriesFq LaurentSeriesAL::reduce_mod_pi() const {
    LaurentSeriesFq r(field_->residue_field(), field_->q(), v_min_, N_);
    for (const auto& [e, v] : coeffs_) r.set_coeff(e, v.reduce_mod_pi());
    return r;
}

LaurentSeriesAL LaurentSeriesAL::teichmueller_lift(const LaurentSeriesFq& b, const LocalFieldPtr& F,
                                                   int m) {
    LaurentSeriesAL r(F, m, b.window_lo(), b.window_hi());
    for (const auto& [e, c] : b.coeffs()) r.coeffs_[e] = OLElement::teichmueller(F, c, m);
    return r;
}

LaurentSeriesAL LaurentSeriesAL::inv() const {
    LaurentSeriesFq red = reduce_mod_pi();
    if (red.is_zero_on_window())
        throw UncertifiedLeadingTermError("inverse needs a unit with certified mod-pi leading term");
    LaurentSeriesAL z = teichmueller_lift(red.inv(), field_, m_);
    LaurentSeriesAL two = LaurentSeriesAL::monomial(field_, OLElement::from_int(field_, 2, m_), 0, m_,
                                                    -kExactWindow, kExactWindow);
    int iters = 1;
    while ((1 << iters) < 2 * m_) ++iters;
    for (int it = 0; it <= iters; ++it) z = z * (two - *this * z);
    return z;
}

std::string LaurentSeriesAL::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : coeffs_) {
        if (!first) os << " + ";
        first = false;
        os << c.str() << "*Z^" << e;
    }
    if (first) os << "0";
    if (N_ >= kExactWindow)
        os << " + O(pi^" << m_ << ")";
    else
        os << " + O(Z^" << N_ << ") + O(pi^" << m_ << ")";
    return os.str();
}

LaurentSeriesAL LaurentSeriesAL::parse(const LocalFieldPtr& F, int m, const std::string& text,
                                       std::int64_t v_min, std::int64_t N) {
    LaurentSeriesAL r(F, m, v_min, N);
    // terms look like "(d0,d1,...) base q=<q>*Z^e"; split at "*Z^"
    size_t pos = 0;
    while (pos < text.size()) {
        size_t star = text.find("*Z^", pos);
        if (star == std::string::npos) break;
        size_t term_start = text.rfind('(', star);
        if (term_start == std::string::npos) throw std::invalid_argument("malformed AL series: " + text);
        std::string coeff_text = text.substr(term_start, star - term_start);
        size_t epos = star + 3;
        size_t eend = epos;
        while (eend < text.size() && (text[eend] == '-' || std::isdigit(static_cast<unsigned char>(text[eend]))))
            ++eend;
        std::int64_t e = std::stoll(text.substr(epos, eend - epos));
        r.set_coeff(e, F->parse_element(coeff_text, m));
        pos = eend;
    }
    return r;
}

// ---------------------------------------------------------------------------
// ALContext

ALContext::ALContext(LocalFieldPtr F, int m) : F_(std::move(F)), m_(m), q_(F_->q()) {
    // [pi](Z) = pi Z + Z^q, exact
    frob_ = LaurentSeriesAL(F_, m_, -LaurentSeriesAL::kExactWindow, LaurentSeriesAL::kExactWindow);
    frob_.set_coeff(1, OLElement::one(F_, m_ + 1).mul_by_pi().truncated(m_));
    frob_.set_coeff(q_, OLElement::one(F_, m_));
    // [pi](Z)^{-1} = Z^{-q} sum_{k<m} (-pi)^k Z^{k(1-q)}
    frob_inv_ = LaurentSeriesAL(F_, m_, -LaurentSeriesAL::kExactWindow, LaurentSeriesAL::kExactWindow);
    OLElement c = OLElement::one(F_, m_);
    for (int k = 0; k < m_; ++k) {
        frob_inv_.set_coeff(-q_ + k * (1 - q_), c);
        c = (-c).mul_by_pi().truncated(m_);
    }
}

const LaurentSeriesAL& ALContext::frobenius_power(std::int64_t n) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = pow_cache_.find(n);
    if (it != pow_cache_.end()) return it->second;
    // build outward from the nearest cached power
    if (pow_cache_.empty()) {
        LaurentSeriesAL one = LaurentSeriesAL::one(F_, m_, -LaurentSeriesAL::kExactWindow,
                                                   LaurentSeriesAL::kExactWindow);
        pow_cache_.emplace(0, one);
    }
    while (true) {
        auto lo = pow_cache_.begin()->first;
        auto hi = pow_cache_.rbegin()->first;
        if (n > hi)
            pow_cache_.emplace(hi + 1, pow_cache_.at(hi) * frob_);
        else if (n < lo)
            pow_cache_.emplace(lo - 1, pow_cache_.at(lo) * frob_inv_);
        else
            break;
    }
    return pow_cache_.at(n);
}

LaurentSeriesAL ALContext::phi(const LaurentSeriesAL& f) const {
    std::int64_t v = f.window_lo(), N = f.window_hi();
    bool exact = N >= LaurentSeriesAL::kExactWindow;
    std::int64_t tail_bulge = static_cast<std::int64_t>(m_ - 1) * (q_ - 1);
    std::int64_t hi = exact ? LaurentSeriesAL::kExactWindow : q_ * N - tail_bulge;
    std::int64_t lo = v >= 0 ? v : q_ * v - tail_bulge;
    if (v <= -LaurentSeriesAL::kExactWindow) lo = -LaurentSeriesAL::kExactWindow;
    LaurentSeriesAL r(F_, std::min(m_, f.precision()), clamp_window(lo), clamp_window(hi));
    for (const auto& [e, c] : f.coeffs()) {
        const LaurentSeriesAL& pw = frobenius_power(e);
        for (const auto& [pe, pc] : pw.coeffs()) r.set_coeff(pe, r.coeff(pe) + pc * c);
    }
    return r;
}

LaurentSeriesAL ALContext::gamma(const OLElement& a, const LaurentSeriesAL& f) const {
    if (!a.is_unit()) throw NonUnitError("gamma needs a unit");
    std::int64_t v = f.window_lo(), N = f.window_hi();
    if (N >= LaurentSeriesAL::kExactWindow) {
        // exact input: take the window large enough for the stored support
        if (f.is_zero_on_window()) return f;
        v = std::min(v, *f.support_lo());
        N = f.coeffs().rbegin()->first + 1 + 8;
    }
    std::int64_t span = N - std::min<std::int64_t>(v, 0);

    // the substitution data per unit is cached across calls
    std::lock_guard<std::mutex> lock(mutex_);
    std::string key = a.str();
    auto it = gamma_cache_.find(key);
    if (it == gamma_cache_.end() || it->second.span < span) {
        GammaCache gc;
        gc.span = std::max<std::int64_t>(span, 16);
        PowerSeries mult = lt_mult_by(a, gc.span + 1, m_);
        gc.u = LaurentSeriesAL::from_power_series(mult, 0);
        // unit part w = [a](Z)/Z and its inverse by coefficient recursion
        LaurentSeriesAL w = gc.u.shifted(-1);
        LaurentSeriesAL winv(F_, m_, 0, gc.span + 1);
        OLElement a0inv = w.coeff(0).inv();
        winv.set_coeff(0, a0inv);
        for (std::int64_t n = 1; n <= gc.span; ++n) {
            OLElement acc = OLElement::zero(F_, m_);
            for (std::int64_t j = 0; j < n; ++j) acc = acc + winv.coeff(j) * w.coeff(n - j);
            winv.set_coeff(n, -(a0inv * acc));
        }
        gc.uinv = winv.shifted(-1);
        gc.powers.clear();
        gc.powers.emplace(0, LaurentSeriesAL::one(F_, m_, -LaurentSeriesAL::kExactWindow,
                                                  LaurentSeriesAL::kExactWindow));
        it = gamma_cache_.insert_or_assign(key, std::move(gc)).first;
    }
    GammaCache& gc = it->second;

    LaurentSeriesAL r(F_, std::min(m_, f.precision()), f.window_lo(), f.window_hi());
    for (const auto& [e, c] : f.coeffs()) {
        auto pit = gc.powers.find(e);
        if (pit == gc.powers.end()) {
            while (true) {
                auto lo2 = gc.powers.begin()->first;
                auto hi2 = gc.powers.rbegin()->first;
                if (e > hi2)
                    gc.powers.emplace(hi2 + 1, gc.powers.at(hi2) * gc.u);
                else if (e < lo2)
                    gc.powers.emplace(lo2 - 1, gc.powers.at(lo2) * gc.uinv);
                else
                    break;
            }
            pit = gc.powers.find(e);
        }
        for (const auto& [pe, pc] : pit->second.coeffs()) r.set_coeff(pe, r.coeff(pe) + pc * c);
    }
    return r;
}

LaurentSeriesAL ALContext::gamma_int(std::int64_t a, const LaurentSeriesAL& f) const {
    int need = m_ + 12;
    return gamma(OLElement::from_int(F_, a, need), f);
}

std::vector<LaurentSeriesAL> ALContext::decompose_over_phi(const LaurentSeriesAL& f) const {
    std::int64_t v = f.window_lo(), N = f.window_hi();
    if (N - v < q_ + 1) throw WindowTooSmallError("decompose_over_phi: window too small");
    int mf = std::min(m_, f.precision());
    std::vector<LaurentSeriesAL> parts;
    for (std::int64_t i = 0; i < q_; ++i)
        parts.emplace_back(F_, mf, cdiv(v - i, q_), cdiv(N - i, q_));

    LaurentSeriesAL rem = f.truncated_precision(mf);
    for (int level = 0; level < mf; ++level) {
        LaurentSeriesFq fbar = rem.reduce_mod_pi();
        std::vector<LaurentSeriesAL> lifts;
        for (std::int64_t i = 0; i < q_; ++i) {
            LaurentSeriesFq ci(F_->residue_field(), q_, cdiv(rem.window_lo() - i, q_),
                               cdiv(rem.window_hi() - i, q_));
            for (const auto& [e, c] : fbar.coeffs()) {
                std::int64_t cls = ((e % q_) + q_) % q_;
                if (cls == i) ci.set_coeff((e - i) / q_, c);
            }
            LaurentSeriesAL lift = LaurentSeriesAL::teichmueller_lift(ci, F_, mf - level);
            lifts.push_back(lift);
            LaurentSeriesAL scaled_lift = lift;
            for (int t = 0; t < level; ++t) scaled_lift = scaled_lift.mul_by_pi();
            parts[static_cast<size_t>(i)] = parts[static_cast<size_t>(i)] + scaled_lift;
        }
        if (level + 1 < mf) {
            LaurentSeriesAL sub(F_, mf - level, rem.window_lo(), rem.window_hi());
            for (std::int64_t i = 0; i < q_; ++i)
                sub = sub + phi(lifts[static_cast<size_t>(i)]).shifted(i);
            rem = (rem - sub).div_by_pi_exact();
        }
    }
    return parts;
}

LaurentSeriesAL ALContext::trace_over_phi(const LaurentSeriesAL& f) const {
    LaurentSeriesAL acc(F_, std::min(m_, f.precision()), -LaurentSeriesAL::kExactWindow,
                        LaurentSeriesAL::kExactWindow);
    for (std::int64_t j = 0; j < q_; ++j) {
        auto dec = decompose_over_phi(f.shifted(j));
        acc = acc + phi(dec[static_cast<size_t>(j)]);
    }
    // purely inseparable residue extension: the trace is divisible by pi
    for (const auto& [e, c] : acc.coeffs())
        if (!c.reduce_mod_pi().is_zero())
            throw TraceNotDivisibleError();
    return acc;
}

const std::vector<LaurentSeriesAL>& ALContext::psi_basis() const {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!psi_basis_.empty()) return psi_basis_;
    // one extra pi-digit so that the division by pi keeps full precision
    ALContext up(F_, m_ + 1);
    for (std::int64_t i = 0; i < q_; ++i) {
        LaurentSeriesAL zi = LaurentSeriesAL::monomial(F_, OLElement::one(F_, m_ + 1), i, m_ + 1,
                                                       -LaurentSeriesAL::kExactWindow,
                                                       LaurentSeriesAL::kExactWindow);
        LaurentSeriesAL tr = up.trace_over_phi(zi);
        LaurentSeriesAL u = tr.div_by_pi_exact();  // precision m_
        psi_basis_.push_back(up.phi_inverse_at(u, m_));
    }
    return psi_basis_;
}

LaurentSeriesAL ALContext::phi_inverse(const LaurentSeriesAL& f) const {
    return phi_inverse_at(f, std::min(m_, f.precision()));
}

LaurentSeriesAL ALContext::phi_inverse_at(const LaurentSeriesAL& f, int m) const {
    ALContext sub(F_, m);
    auto dec = sub.decompose_over_phi(f.truncated_precision(m));
    // residual classes beyond the pure phi-image are truncated; they signal
    // uncertified window boundaries rather than mathematical failure
    return dec[0];
}

LaurentSeriesAL ALContext::psi(const LaurentSeriesAL& f) const {
    const auto& basis = psi_basis();
    auto dec = decompose_over_phi(f);
    LaurentSeriesAL acc(F_, std::min(m_, f.precision()), -LaurentSeriesAL::kExactWindow,
                        LaurentSeriesAL::kExactWindow);
    for (std::int64_t i = 0; i < q_; ++i)
        acc = acc + dec[static_cast<size_t>(i)] * basis[static_cast<size_t>(i)];
    return acc;
}

// ---------------------------------------------------------------------------
// overconvergent witnesses

GaussNorm overconv_norm_r(const OverconvergentWitness& fw, const Rat& r, const Rat& w) {
    const LaurentSeriesAL& f = fw.element;
    if (r > fw.r_cert) throw CertificateInvalidError("norm radius exceeds the certificate slope");
    // validate the certificate on stored negative-exponent coefficients
    for (const auto& [e, c] : f.coeffs()) {
        if (e >= 0) continue;
        Rat bound = w * fw.r_cert * Rat(-e) - Rat(fw.C);
        if (Rat(c.valuation()) < bound && c.valuation() < f.precision())
            throw CertificateInvalidError("stored coefficient violates the growth certificate");
    }
    GaussNorm out;
    bool any = false;
    Rat best;
    for (const auto& [e, c] : f.coeffs()) {
        int vpi = c.valuation();
        if (vpi >= f.precision()) continue;
        Rat t = Rat(-vpi) - w * r * Rat(e);
        if (!any || t > best) {
            best = t;
            any = true;
        }
    }
    if (!any) {
        out.zero = true;
        out.certified = false;  // zero mod pi^m only
        return out;
    }
    out.exponent = best;
    // Unknown contributions: pi^m-invisible coefficients obey v >= m and,
    // at negative exponents, also the certificate; below the window floor
    // only the certificate applies.
    std::int64_t v_min = f.window_lo(), N = f.window_hi();
    auto cert_bound = [&](std::int64_t n) {  // lower bound on v_pi(a_n), n < 0
        Rat b = w * fw.r_cert * Rat(-n) - Rat(fw.C);
        // ceil of the rational bound
        std::int64_t c = b.num() >= 0 ? (b.num() + b.den() - 1) / b.den() : -((-b.num()) / b.den());
        return std::max<std::int64_t>(c, 0);
    };
    if (v_min > -LaurentSeriesAL::kExactWindow) {
        // sup over n < v_min of -cert(n) + w r |n|; decreasing in |n| for
        // r < r_cert and constant for r = r_cert
        Rat tail = Rat(-cert_bound(v_min - 1)) - w * r * Rat(v_min - 1);
        if (fw.r_cert == r) tail = Rat(fw.C);
        if (tail > best) out.certified = false;
    }
    for (std::int64_t n = std::max(v_min, -(std::int64_t(1) << 20)); n < 0; ++n) {
        if (!f.coeff(n).is_zero()) continue;
        Rat hidden = Rat(-std::max<std::int64_t>(f.precision(), cert_bound(n))) - w * r * Rat(n);
        if (hidden > best) out.certified = false;
    }
    if (Rat(-f.precision()) > best) out.certified = false;  // hidden at n = 0
    if (N < LaurentSeriesAL::kExactWindow) {
        Rat tail_hi = -(w * r * Rat(N));
        if (tail_hi > best) out.certified = false;
    }
    return out;
}

OverconvergentWitness make_witness(const LaurentSeriesAL& f, const Rat& r_cert, const Rat& w) {
    std::int64_t C = 0;
    for (const auto& [e, c] : f.coeffs()) {
        if (e >= 0) continue;
        Rat need = w * r_cert * Rat(-e) - Rat(c.valuation());
        std::int64_t cc = need.num() >= 0 ? (need.num() + need.den() - 1) / need.den()
                                          : -((-need.num()) / need.den());
        C = std::max(C, cc);
    }
    return {f, r_cert, C};
}

}  // namespace phigamma

#include "phigamma/witt.hpp"

#include <mutex>
#include <sstream>
#include <unordered_map>

#include "phigamma/errors.hpp"

namespace phigamma {

namespace {

OLElement pi_pow_elem(const LocalFieldPtr& F, int i, int m) {
    OLElement x = OLElement::one(F, m);
    for (int t = 0; t < i; ++t) x = x.mul_by_pi();
    return x.truncated(m);
}

std::int64_t ipow64(std::int64_t b, int e) {
    std::int64_t r = 1;
    while (e--) r *= b;
    return r;
}

}  // namespace

MultiPoly MultiPoly::variable_x(const LocalFieldPtr& F, int m, int i) {
    MultiPoly p(F, m);
    p.set_term(key_x(i, 1), OLElement::one(F, m));
    return p;
}

MultiPoly MultiPoly::variable_y(const LocalFieldPtr& F, int m, int i) {
    MultiPoly p(F, m);
    p.set_term(key_y(i, 1), OLElement::one(F, m));
    return p;
}

MultiPoly MultiPoly::constant(const LocalFieldPtr& F, const OLElement& c) {
    MultiPoly p(F, c.precision());
    p.set_term(0, c);
    return p;
}

void MultiPoly::set_term(Key k, const OLElement& c) {
    if (c.is_zero())
        terms_.erase(k);
    else
        terms_[k] = c;
}

OLElement MultiPoly::term(Key k) const {
    auto it = terms_.find(k);
    if (it != terms_.end()) return it->second;
    return OLElement::zero(field_, m_);
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
    MultiPoly r(field_, std::min(m_, o.m_));
    r.terms_ = terms_;
    for (const auto& [k, c] : o.terms_) {
        auto it = r.terms_.find(k);
        OLElement sum = (it != r.terms_.end()) ? it->second + c : c;
        r.set_term(k, sum);
    }
    // renormalize precisions lazily: values at mixed precision truncate on use
    return r;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const {
    MultiPoly r(field_, std::min(m_, o.m_));
    r.terms_ = terms_;
    for (const auto& [k, c] : o.terms_) {
        auto it = r.terms_.find(k);
        OLElement d = (it != r.terms_.end()) ? it->second - c : -c;
        r.set_term(k, d);
    }
    return r;
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
    MultiPoly r(field_, std::min(m_, o.m_));
    std::unordered_map<Key, OLElement> acc;
    acc.reserve(terms_.size() * 2);
    for (const auto& [k1, c1] : terms_)
        for (const auto& [k2, c2] : o.terms_) {
            OLElement prod = c1 * c2;
            if (prod.is_zero()) continue;
            auto [it, fresh] = acc.try_emplace(k1 + k2, prod);
            if (!fresh) it->second = it->second + prod;
        }
    for (auto& [k, c] : acc) r.set_term(k, c);
    return r;
}

MultiPoly MultiPoly::pow(std::uint64_t e) const {
    MultiPoly r = constant(field_, OLElement::one(field_, m_));
    MultiPoly base = *this;
    while (e) {
        if (e & 1) r = r * base;
        base = (e >>= 1) ? base * base : base;
    }
    return r;
}

MultiPoly MultiPoly::mul_by_pi_pow(int i) const {
    MultiPoly r(field_, m_ + i);
    for (const auto& [k, c] : terms_) {
        OLElement t = c;
        for (int j = 0; j < i; ++j) t = t.mul_by_pi();
        r.set_term(k, t);
    }
    return r;
}

MultiPoly MultiPoly::div_by_pi_exact_pow(int i) const {
    MultiPoly r(field_, m_ - i);
    for (const auto& [k, c] : terms_) {
        OLElement t = c;
        for (int j = 0; j < i; ++j) t = t.div_by_pi_exact();
        r.set_term(k, t);
    }
    return r;
}

MultiPoly MultiPoly::truncated(int m) const {
    MultiPoly r(field_, std::min(m, m_));
    for (const auto& [k, c] : terms_) r.set_term(k, c.truncated(r.m_));
    return r;
}

std::string MultiPoly::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << c.str();
        for (int i = 0; i < kMaxN; ++i) {
            int ex = static_cast<int>((k >> (8 * i)) & 0xff);
            if (ex) os << "*X" << i << "^" << ex;
        }
        for (int i = 0; i < kMaxN; ++i) {
            int ey = static_cast<int>((k >> (8 * (kMaxN + i))) & 0xff);
            if (ey) os << "*Y" << i << "^" << ey;
        }
    }
    if (first) os << "0";
    return os.str();
}

MultiPoly UniversalWittPolys::ghost_apply(const std::vector<MultiPoly>& args, int j,
                                          const LocalFieldPtr& F, int m) {
    MultiPoly acc(F, m);
    for (int i = 0; i <= j; ++i) {
        MultiPoly t = args[static_cast<size_t>(i)].pow(ipow64(F->q(), j - i));
        acc = acc + t.mul_by_pi_pow(i).truncated(m);
    }
    return acc;
}

MultiPoly UniversalWittPolys::ghost_x(const LocalFieldPtr& F, int j, int m) {
    std::vector<MultiPoly> vars;
    for (int i = 0; i <= j; ++i) vars.push_back(MultiPoly::variable_x(F, m, i));
    return ghost_apply(vars, j, F, m);
}

MultiPoly UniversalWittPolys::ghost_y(const LocalFieldPtr& F, int j, int m) {
    std::vector<MultiPoly> vars;
    for (int i = 0; i <= j; ++i) vars.push_back(MultiPoly::variable_y(F, m, i));
    return ghost_apply(vars, j, F, m);
}

namespace {
ReducedPoly reduce_poly(const MultiPoly& p) {
    ReducedPoly r;
    for (const auto& [k, c] : p.terms()) {
        FqElem d = c.reduce_mod_pi();
        if (!d.is_zero()) r.terms.push_back({k, d});
    }
    return r;
}
}  // namespace

std::shared_ptr<const UniversalWittPolys> UniversalWittPolys::get(const LocalFieldPtr& F, int n, int m) {
    if (n < 1 || n > MultiPoly::kMaxN) throw std::invalid_argument("Witt length out of range");
    if (m <= n * F->params().e)
        throw std::invalid_argument("universal Witt polynomials need m > n*e");

    static std::mutex cache_mutex;
    static std::map<std::string, std::shared_ptr<const UniversalWittPolys>> cache;
    std::ostringstream key;
    key << F->params().str() << "|" << F->residue_field()->modulus_str() << "|n=" << n << "|m=" << m;
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find(key.str());
        if (it != cache.end()) return it->second;
    }

    auto out = std::shared_ptr<UniversalWittPolys>(new UniversalWittPolys());
    out->F_ = F;
    out->n_ = n;
    out->m_ = m;

    for (int j = 0; j < n; ++j) {
        // numerators: ghost identity minus the lower-index contributions
        MultiPoly numS = ghost_x(F, j, m) + ghost_y(F, j, m);
        MultiPoly numP = ghost_x(F, j, m) * ghost_y(F, j, m);
        MultiPoly numI = MultiPoly(F, m) - ghost_x(F, j, m);
        for (int i = 0; i < j; ++i) {
            std::int64_t e = ipow64(F->q(), j - i);
            numS = numS - out->S_[static_cast<size_t>(i)].pow(e).mul_by_pi_pow(i).truncated(m);
            numP = numP - out->P_[static_cast<size_t>(i)].pow(e).mul_by_pi_pow(i).truncated(m);
            numI = numI - out->I_[static_cast<size_t>(i)].pow(e).mul_by_pi_pow(i).truncated(m);
        }
        out->S_.push_back(numS.div_by_pi_exact_pow(j));
        out->P_.push_back(numP.div_by_pi_exact_pow(j));
        out->I_.push_back(numI.div_by_pi_exact_pow(j));
        out->Sr_.push_back(reduce_poly(out->S_.back()));
        out->Pr_.push_back(reduce_poly(out->P_.back()));
        out->Ir_.push_back(reduce_poly(out->I_.back()));
    }

    std::lock_guard<std::mutex> lock(cache_mutex);
    auto [it, fresh] = cache.try_emplace(key.str(), out);
    return it->second;
}

std::string GaussNorm::str() const {
    if (zero) return std::string("0") + (certified ? " [certified]" : " [boundary]");
    std::ostringstream os;
    os << "q^(" << exponent.str() << ") " << (certified ? (boundary ? "[boundary]" : "[certified]") : "[boundary]");
    return os.str();
}

WittRing<FqElem> make_witt_fq(const LocalFieldPtr& F, int n, const FqFieldPtr& ambient) {
    int m = std::max(n * F->params().e + 1, n) + 1;
    auto polys = UniversalWittPolys::get(F, n, m);
    auto emb = std::make_shared<FqEmbedding>(FqEmbedding::find(F->residue_field(), ambient));
    return WittRing<FqElem>(polys, FqElem::zero(ambient),
                            [emb](const FqElem& c) { return emb->apply(c); });
}

WittRing<LaurentSeriesFq> make_witt_laurent(const LocalFieldPtr& F, int n, std::int64_t v_min,
                                            std::int64_t N) {
    int m = std::max(n * F->params().e + 1, n) + 1;
    auto polys = UniversalWittPolys::get(F, n, m);
    auto k = F->residue_field();
    std::int64_t q = F->q();
    LaurentSeriesFq zero(k, q, v_min, N);
    return WittRing<LaurentSeriesFq>(polys, zero, [k, q, v_min, N](const FqElem& c) {
        return LaurentSeriesFq::monomial(k, q, c, 0, v_min, N);
    });
}

WittRing<PerfLaurent> make_witt_perf(const LocalFieldPtr& F, int n, int level, std::int64_t v_min,
                                     std::int64_t N, int max_level) {
    int m = std::max(n * F->params().e + 1, n) + 1;
    auto polys = UniversalWittPolys::get(F, n, m);
    auto k = F->residue_field();
    std::int64_t q = F->q();
    std::int64_t D = ipow64(q, level);
    PerfLaurent zero(k, q, level, v_min * D, N * D, max_level);
    return WittRing<PerfLaurent>(polys, zero, [k, q, level, v_min, N, D, max_level](const FqElem& c) {
        PerfLaurent r(k, q, level, v_min * D, N * D, max_level);
        r.set_scaled_coeff(0, c);
        return r;
    });
}

void enumerate_witt(const FqFieldPtr& ambient, int n,
                    const std::function<void(const std::vector<FqElem>&)>& fn) {
    std::uint64_t total = 1;
    for (int i = 0; i < n; ++i) {
        if (total > (1ULL << 16) / ambient->size()) throw TooLargeError();
        total *= ambient->size();
    }
    std::vector<FqElem> comps(static_cast<size_t>(n), FqElem::zero(ambient));
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        std::uint64_t t = idx;
        for (int i = 0; i < n; ++i) {
            comps[static_cast<size_t>(i)] = FqElem::from_index(ambient, t % ambient->size());
            t /= ambient->size();
        }
        fn(comps);
    }
}

}  // namespace phigamma

#include "phigamma/fq.hpp"

#include <algorithm>
#include <sstream>

namespace phigamma {

namespace {

// Dense polynomial arithmetic over F_p, used only for field construction.
using Poly = std::vector<int>;

Poly poly_trim(Poly a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

Poly poly_mul_mod(const Poly& a, const Poly& b, const Poly& g, int p) {
    if (a.empty() || b.empty()) return {};
    std::vector<int> r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    // reduce mod the monic g
    int n = static_cast<int>(g.size()) - 1;
    for (int i = static_cast<int>(r.size()) - 1; i >= n; --i) {
        int c = r[i];
        if (c == 0) continue;
        r[i] = 0;
        for (int j = 0; j < n; ++j) r[i - n + j] = ((r[i - n + j] - c * g[j]) % p + p) % p;
    }
    r.resize(n);
    return poly_trim(r);
}

Poly poly_powmod(Poly base, std::uint64_t e, const Poly& g, int p) {
    Poly r = {1};
    while (e) {
        if (e & 1) r = poly_mul_mod(r, base, g, p);
        base = poly_mul_mod(base, base, g, p);
        e >>= 1;
    }
    return r;
}

Poly poly_gcd(Poly a, Poly b, int p) {
    a = poly_trim(a);
    b = poly_trim(b);
    while (!b.empty()) {
        // a mod b with b made monic
        int lead = b.back();
        int lead_inv = 1;
        for (int t = 1; t < p; ++t)
            if (lead * t % p == 1) { lead_inv = t; break; }
        Poly bm(b.size());
        for (size_t i = 0; i < b.size(); ++i) bm[i] = b[i] * lead_inv % p;
        while (a.size() >= bm.size() && !a.empty()) {
            int c = a.back();
            size_t shift = a.size() - bm.size();
            for (size_t i = 0; i < bm.size(); ++i) a[shift + i] = ((a[shift + i] - c * bm[i]) % p + p) % p;
            a = poly_trim(a);
        }
        std::swap(a, b);
    }
    return a;
}

std::uint64_t ipow(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    while (e--) r *= b;
    return r;
}

}  // namespace

bool FqField::is_irreducible(int p, const std::vector<int>& monic_coeffs) {
    Poly g(monic_coeffs.begin(), monic_coeffs.end());
    int n = static_cast<int>(g.size()) - 1;
    if (n < 1 || g[n] != 1) return false;
    if (n == 1) return true;
    // x^{p^n} == x mod g, and gcd(x^{p^{n/l}} - x, g) = 1 for prime l | n.
    Poly x = {0, 1};
    Poly xq = poly_powmod(x, ipow(p, n), g, p);
    if (poly_trim(xq) != poly_trim(x)) return false;
    for (int l = 2; l <= n; ++l) {
        if (n % l != 0) continue;
        bool is_prime = true;
        for (int d = 2; d * d <= l; ++d)
            if (l % d == 0) is_prime = false;
        if (!is_prime) continue;
        Poly xe = poly_powmod(x, ipow(p, n / l), g, p);
        // xe - x
        Poly diff = xe;
        diff.resize(std::max(diff.size(), x.size()), 0);
        diff[1] = ((diff[1] - 1) % p + p) % p;
        Poly gc = poly_gcd(g, poly_trim(diff), p);
        if (static_cast<int>(poly_trim(gc).size()) > 1) return false;
    }
    return true;
}

FqField::FqField(int p, std::vector<std::int16_t> modulus) : p_(p), modulus_(std::move(modulus)) {
    deg_ = static_cast<int>(modulus_.size()) - 1;
    size_ = ipow(static_cast<std::uint64_t>(p_), deg_);
    // Tables x^(deg+k) mod g for k = 0..deg-2.
    xpow_.resize(std::max(0, deg_ - 1));
    std::array<std::int16_t, kMaxDeg> cur{};  // x^deg mod g = -g[0..deg)
    for (int j = 0; j < deg_; ++j) cur[j] = static_cast<std::int16_t>(((-modulus_[j]) % p_ + p_) % p_);
    for (int k = 0; k + 1 < deg_; ++k) {
        xpow_[k] = cur;
        // multiply cur by x and reduce
        std::int16_t top = cur[deg_ - 1];
        for (int j = deg_ - 1; j > 0; --j) cur[j] = cur[j - 1];
        cur[0] = 0;
        if (top) {
            for (int j = 0; j < deg_; ++j)
                cur[j] = static_cast<std::int16_t>(((cur[j] + top * (-modulus_[j])) % p_ + p_) % p_);
        }
    }
    if (deg_ - 1 > 0) {
        // last computed entry belongs to k = deg-2; loop above already stored it
    }
}

FqFieldPtr FqField::prime_field(int p) { return with_modulus(p, {0, 1}); }

FqFieldPtr FqField::extension(int p, int n) {
    if (n == 1) return prime_field(p);
    if (n > kMaxDeg) throw TooLargeError("field degree beyond supported bound");
    // enumerate coefficient vectors (c_0,...,c_{n-1}) by base-p integer value
    std::uint64_t count = ipow(static_cast<std::uint64_t>(p), n);
    for (std::uint64_t v = 0; v < count; ++v) {
        std::vector<int> g(n + 1, 0);
        std::uint64_t t = v;
        for (int i = 0; i < n; ++i) { g[i] = static_cast<int>(t % p); t /= p; }
        g[n] = 1;
        if (is_irreducible(p, g)) return with_modulus(p, g);
    }
    throw MathError("no irreducible polynomial found");  // unreachable
}

FqFieldPtr FqField::with_modulus(int p, const std::vector<int>& monic_coeffs) {
    if (p < 2) throw std::invalid_argument("p must be a prime >= 2");
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) throw std::invalid_argument("p must be prime");
    if (static_cast<int>(monic_coeffs.size()) - 1 > kMaxDeg)
        throw TooLargeError("field degree beyond supported bound");
    if (monic_coeffs.size() < 2 || monic_coeffs.back() != 1)
        throw std::invalid_argument("modulus must be monic of degree >= 1");
    if (!is_irreducible(p, monic_coeffs)) throw std::invalid_argument("modulus is not irreducible");
    std::vector<std::int16_t> m;
    m.reserve(monic_coeffs.size());
    for (int c : monic_coeffs) m.push_back(static_cast<std::int16_t>(((c % p) + p) % p));
    m.back() = 1;
    return FqFieldPtr(new FqField(p, std::move(m)));
}

std::string FqField::modulus_str() const {
    std::ostringstream os;
    bool first = true;
    for (int i = deg_; i >= 0; --i) {
        int c = (i == deg_) ? 1 : modulus_[i];
        if (c == 0) continue;
        if (!first) os << "+";
        first = false;
        if (i == 0 || c != 1) os << c;
        if (i >= 1) {
            os << "x";
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

FqElem::FqElem(FqFieldPtr field, const std::vector<int>& coords) : field_(std::move(field)) {
    c_.fill(0);
    int p = field_->p();
    for (size_t i = 0; i < coords.size() && i < static_cast<size_t>(field_->deg()); ++i)
        c_[i] = static_cast<std::int16_t>(((coords[i] % p) + p) % p);
}

FqElem FqElem::zero(const FqFieldPtr& f) { return FqElem(f, {}); }
FqElem FqElem::one(const FqFieldPtr& f) { return FqElem(f, {1}); }
FqElem FqElem::from_int(const FqFieldPtr& f, std::int64_t n) {
    int p = f->p();
    return FqElem(f, {static_cast<int>(((n % p) + p) % p)});
}
FqElem FqElem::from_index(const FqFieldPtr& f, std::uint64_t idx) {
    std::vector<int> coords(f->deg());
    for (int i = 0; i < f->deg(); ++i) { coords[i] = static_cast<int>(idx % f->p()); idx /= f->p(); }
    return FqElem(f, coords);
}
FqElem FqElem::gen(const FqFieldPtr& f) { return FqElem(f, {0, 1}); }

bool FqElem::is_zero() const {
    if (!field_) return true;
    for (int i = 0; i < field_->deg(); ++i)
        if (c_[i]) return false;
    return true;
}

bool FqElem::is_one() const {
    if (!field_) return false;
    if (c_[0] != 1) return false;
    for (int i = 1; i < field_->deg(); ++i)
        if (c_[i]) return false;
    return true;
}

std::uint64_t FqElem::index() const {
    std::uint64_t idx = 0;
    for (int i = field_->deg() - 1; i >= 0; --i) idx = idx * field_->p() + c_[i];
    return idx;
}

std::vector<int> FqElem::coords() const {
    std::vector<int> v(field_->deg());
    for (int i = 0; i < field_->deg(); ++i) v[i] = c_[i];
    return v;
}

void FqElem::check_compatible(const FqElem& o) const {
    if (!field_ || !o.field_ || !field_->same_as(*o.field_))
        throw RingMismatchError("FqElem operands from different fields");
}

FqElem FqElem::operator+(const FqElem& o) const {
    check_compatible(o);
    FqElem r(*this);
    int p = field_->p();
    for (int i = 0; i < field_->deg(); ++i) r.c_[i] = static_cast<std::int16_t>((c_[i] + o.c_[i]) % p);
    return r;
}

FqElem FqElem::operator-(const FqElem& o) const {
    check_compatible(o);
    FqElem r(*this);
    int p = field_->p();
    for (int i = 0; i < field_->deg(); ++i)
        r.c_[i] = static_cast<std::int16_t>(((c_[i] - o.c_[i]) % p + p) % p);
    return r;
}

FqElem FqElem::operator-() const {
    FqElem r(*this);
    int p = field_->p();
    for (int i = 0; i < field_->deg(); ++i) r.c_[i] = static_cast<std::int16_t>((p - c_[i]) % p);
    return r;
}

FqElem FqElem::operator*(const FqElem& o) const {
    check_compatible(o);
    int n = field_->deg();
    int p = field_->p();
    std::array<int, 2 * FqField::kMaxDeg> prod{};
    for (int i = 0; i < n; ++i) {
        if (!c_[i]) continue;
        for (int j = 0; j < n; ++j) prod[i + j] += c_[i] * o.c_[j];
    }
    FqElem r = zero(field_);
    for (int i = 0; i < n; ++i) r.c_[i] = static_cast<std::int16_t>(prod[i] % p);
    for (int k = 0; k + 1 < n; ++k) {
        int c = prod[n + k] % p;
        if (!c) continue;
        const auto& red = field_->xpow(k);
        for (int j = 0; j < n; ++j) r.c_[j] = static_cast<std::int16_t>((r.c_[j] + c * red[j]) % p);
    }
    return r;
}

FqElem FqElem::pow(std::uint64_t e) const {
    FqElem base(*this);
    FqElem r = one(field_);
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

FqElem FqElem::inv() const {
    if (is_zero()) throw NonUnitError("inverse of zero in F_q");
    return pow(field_->size() - 2);
}

FqElem FqElem::qth_root(std::uint64_t q) const {
    return pow(field_->size() / q);
}

bool FqElem::operator==(const FqElem& o) const {
    if (!field_ && !o.field_) return true;
    if (!field_ || !o.field_) return is_zero() && o.is_zero();
    if (!field_->same_as(*o.field_)) return false;
    for (int i = 0; i < field_->deg(); ++i)
        if (c_[i] != o.c_[i]) return false;
    return true;
}

std::string FqElem::str() const {
    if (!field_) return "0";
    if (field_->deg() == 1) return std::to_string(c_[0]);
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < field_->deg(); ++i) {
        if (i) os << ",";
        os << c_[i];
    }
    os << "]";
    return os.str();
}

FqEmbedding FqEmbedding::find(FqFieldPtr sub, FqFieldPtr ambient) {
    if (sub->p() != ambient->p() || ambient->deg() % sub->deg() != 0)
        throw RingMismatchError("no subfield embedding: degree mismatch");
    FqEmbedding e;
    e.sub_ = sub;
    e.ambient_ = ambient;
    if (sub->same_as(*ambient)) {
        e.beta_ = FqElem::gen(ambient);
        return e;
    }
    // smallest-index root of the subfield modulus in the ambient field
    for (std::uint64_t idx = 0; idx < ambient->size(); ++idx) {
        FqElem x = FqElem::from_index(ambient, idx);
        FqElem acc = FqElem::zero(ambient);
        FqElem xp = FqElem::one(ambient);
        for (size_t i = 0; i < sub->modulus().size(); ++i) {
            acc = acc + xp * FqElem::from_int(ambient, sub->modulus()[i]);
            xp = xp * x;
        }
        if (acc.is_zero()) {
            e.beta_ = x;
            return e;
        }
    }
    throw MathError("subfield modulus has no root in ambient field");  // unreachable
}

FqElem FqEmbedding::apply(const FqElem& x) const {
    if (sub_->same_as(*ambient_)) return x;
    FqElem acc = FqElem::zero(ambient_);
    FqElem bp = FqElem::one(ambient_);
    for (int i = 0; i < sub_->deg(); ++i) {
        acc = acc + bp * FqElem::from_int(ambient_, x.coord(i));
        bp = bp * beta_;
    }
    return acc;
}

}  // namespace phigamma

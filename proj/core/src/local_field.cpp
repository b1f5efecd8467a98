#include "phigamma/local_field.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "phigamma/errors.hpp"

namespace phigamma {

namespace {

std::int64_t ipow64(std::int64_t b, int e) {
    std::int64_t r = 1;
    while (e--) r *= b;
    return r;
}

bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t mod) {
    // extended Euclid; a must be a unit mod `mod`
    std::int64_t t = 0, newt = 1, r = mod, newr = ((a % mod) + mod) % mod;
    while (newr != 0) {
        std::int64_t qout = r / newr;
        std::swap(t -= qout * newt, newt);
        std::swap(r -= qout * newr, newr);
    }
    if (r != 1) throw NonUnitError("mod_inverse of non-unit");
    return ((t % mod) + mod) % mod;
}

}  // namespace

std::int64_t FieldParams::q() const { return ipow64(p, f); }

void FieldParams::validate() const {
    if (!is_prime(p)) throw std::invalid_argument("p must be prime");
    if (f < 1 || f > FqField::kMaxDeg) throw std::invalid_argument("f out of range");
    if (e < 1) throw std::invalid_argument("e must be >= 1");
    if (e == 1) {
        if (!eisenstein.empty()) throw std::invalid_argument("eisenstein data given but e = 1");
        return;
    }
    if (static_cast<int>(eisenstein.size()) != e + 1)
        throw std::invalid_argument("eisenstein polynomial needs e+1 coefficients");
    if (eisenstein.back() != 1) throw std::invalid_argument("eisenstein polynomial must be monic");
    if (eisenstein[0] % p != 0 || (eisenstein[0] / p) % p == 0 || eisenstein[0] == 0)
        throw std::invalid_argument("eisenstein constant term must have p-valuation exactly 1");
    for (int i = 1; i < e; ++i)
        if (eisenstein[i] % p != 0)
            throw std::invalid_argument("eisenstein non-leading coefficients must be divisible by p");
}

std::string FieldParams::str() const {
    std::ostringstream os;
    os << "p=" << p << " f=" << f << " e=" << e;
    if (!eisenstein.empty()) {
        os << " eisenstein=";
        for (size_t i = 0; i < eisenstein.size(); ++i) {
            if (i) os << ",";
            os << eisenstein[i];
        }
    }
    return os.str();
}

void PrecisionProfile::validate() const {
    if (m < 1) throw std::invalid_argument("pi-adic precision m must be >= 1");
    if (!(v_min <= 0 && 0 <= N)) throw std::invalid_argument("window must satisfy v_min <= 0 <= N");
    if (perf_level < 0) throw std::invalid_argument("perf_level must be >= 0");
}

std::string PrecisionProfile::str() const {
    std::ostringstream os;
    os << "m=" << m << " window=[" << v_min << "," << N << ") perf=" << perf_level;
    return os.str();
}

LocalField::LocalField(const FieldParams& params) : params_(params) {
    params_.validate();
    if (params_.residue_modulus.empty())
        residue_ = FqField::extension(params_.p, params_.f);
    else
        residue_ = FqField::with_modulus(params_.p, params_.residue_modulus);
    q_ = params_.q();
    ytab_.assign(residue_->modulus().begin(), residue_->modulus().end());
}

LocalFieldPtr LocalField::make(const FieldParams& params) {
    return LocalFieldPtr(new LocalField(params));
}

std::int64_t LocalField::pK(int K) const { return ipow64(params_.p, K); }

LocalField::Rep LocalField::rep_zero(int K) const {
    Rep r;
    r.K = K;
    r.c.assign(static_cast<size_t>(params_.e) * params_.f, 0);
    return r;
}

LocalField::Rep LocalField::rep_from_int(std::int64_t n, int K) const {
    Rep r = rep_zero(K);
    std::int64_t P = pK(K);
    r.c[0] = ((n % P) + P) % P;
    return r;
}

LocalField::Rep LocalField::rep_add(const Rep& a, const Rep& b) const {
    int K = std::min(a.K, b.K);
    std::int64_t P = pK(K);
    Rep r = rep_zero(K);
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = (a.c[i] % P + b.c[i] % P) % P;
    return r;
}

LocalField::Rep LocalField::rep_sub(const Rep& a, const Rep& b) const {
    int K = std::min(a.K, b.K);
    std::int64_t P = pK(K);
    Rep r = rep_zero(K);
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = ((a.c[i] - b.c[i]) % P + P) % P;
    return r;
}

LocalField::Rep LocalField::rep_neg(const Rep& a) const {
    std::int64_t P = pK(a.K);
    Rep r = rep_zero(a.K);
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = (P - a.c[i] % P) % P;
    return r;
}

LocalField::Rep LocalField::rep_mul(const Rep& a, const Rep& b) const {
    int K = std::min(a.K, b.K);
    std::int64_t P = pK(K);
    int e = params_.e, f = params_.f;
    // X-degree convolution with unramified-block multiplication.
    std::vector<__int128> acc(static_cast<size_t>(2 * e - 1) * (2 * f - 1), 0);
    for (int j1 = 0; j1 < e; ++j1)
        for (int j2 = 0; j2 < e; ++j2)
            for (int i1 = 0; i1 < f; ++i1) {
                std::int64_t av = a.c[static_cast<size_t>(j1) * f + i1] % P;
                if (!av) continue;
                for (int i2 = 0; i2 < f; ++i2) {
                    std::int64_t bv = b.c[static_cast<size_t>(j2) * f + i2] % P;
                    if (!bv) continue;
                    acc[static_cast<size_t>(j1 + j2) * (2 * f - 1) + (i1 + i2)] +=
                        static_cast<__int128>(av) * bv;
                }
            }
    // reduce y-degree within each X-block: y^f = -(ytab_[0..f))
    auto blk = [&](int j, int i) -> __int128& { return acc[static_cast<size_t>(j) * (2 * f - 1) + i]; };
    for (int j = 0; j < 2 * e - 1; ++j)
        for (int i = 2 * f - 2; i >= f; --i) {
            __int128 c = blk(j, i) % P;
            blk(j, i) = 0;
            if (c == 0) continue;
            for (int t = 0; t < f; ++t) blk(j, i - f + t) -= c * ytab_[t];
        }
    // reduce X-degree: X^e = -(eis[0..e)) with integer coefficients
    for (int j = 2 * e - 2; j >= e; --j)
        for (int i = 0; i < f; ++i) {
            __int128 c = blk(j, i) % P;
            blk(j, i) = 0;
            if (c == 0) continue;
            for (int t = 0; t < e; ++t) blk(j - e + t, i) -= c * params_.eisenstein[t];
        }
    Rep r = rep_zero(K);
    for (int j = 0; j < e; ++j)
        for (int i = 0; i < f; ++i) {
            __int128 v = blk(j, i) % P;
            if (v < 0) v += P;
            r.c[static_cast<size_t>(j) * f + i] = static_cast<std::int64_t>(v);
        }
    return r;
}

bool LocalField::rep_is_zero(const Rep& a) const {
    std::int64_t P = pK(a.K);
    for (auto v : a.c)
        if (v % P != 0) return false;
    return true;
}

FqElem LocalField::rep_residue(const Rep& a) const {
    std::vector<int> coords(params_.f);
    for (int i = 0; i < params_.f; ++i)
        coords[i] = static_cast<int>(((a.c[i] % params_.p) + params_.p) % params_.p);
    return FqElem(residue_, coords);
}

LocalField::Rep LocalField::rep_mul_pi(const Rep& a) const {
    if (params_.e == 1) {
        std::int64_t P = pK(a.K);
        Rep r = rep_zero(a.K);
        for (size_t i = 0; i < r.c.size(); ++i)
            r.c[i] = static_cast<std::int64_t>((static_cast<__int128>(a.c[i]) * params_.p) % P);
        return r;
    }
    int e = params_.e, f = params_.f;
    std::int64_t P = pK(a.K);
    Rep r = rep_zero(a.K);
    // shift X-degree up by one; the top block reduces through the Eisenstein relation
    std::vector<__int128> top(f);
    for (int i = 0; i < f; ++i) top[i] = a.c[static_cast<size_t>(e - 1) * f + i];
    for (int j = e - 1; j >= 1; --j)
        for (int i = 0; i < f; ++i) r.c[static_cast<size_t>(j) * f + i] = a.c[static_cast<size_t>(j - 1) * f + i];
    for (int i = 0; i < f; ++i) r.c[i] = 0;
    for (int t = 0; t < e; ++t)
        for (int i = 0; i < f; ++i) {
            __int128 v = r.c[static_cast<size_t>(t) * f + i] - top[i] * params_.eisenstein[t];
            v %= P;
            if (v < 0) v += P;
            r.c[static_cast<size_t>(t) * f + i] = static_cast<std::int64_t>(v);
        }
    return r;
}

LocalField::Rep LocalField::rep_div_pi(const Rep& a) const {
    if (a.K <= 1) throw InexactDivisionError("internal precision exhausted dividing by pi");
    if (params_.e == 1) {
        Rep r = rep_zero(a.K - 1);
        std::int64_t P = pK(a.K);
        for (size_t i = 0; i < r.c.size(); ++i) {
            std::int64_t v = a.c[i] % P;
            if (v % params_.p != 0) throw InexactDivisionError("element not divisible by pi");
            r.c[i] = (v / params_.p) % pK(a.K - 1);
        }
        return r;
    }
    // multiply by X^{e-1} + eis[e-1] X^{e-2} + ... + eis[1], then divide by -eis[0]
    Rep mult = rep_zero(a.K);
    std::int64_t P = pK(a.K);
    mult.c[static_cast<size_t>(params_.e - 1) * params_.f] = 1;
    for (int j = 1; j < params_.e; ++j)
        mult.c[static_cast<size_t>(j - 1) * params_.f] = ((params_.eisenstein[j] % P) + P) % P;
    Rep t = rep_mul(a, mult);
    std::int64_t a0 = params_.eisenstein[0];
    std::int64_t u0 = -(a0 / params_.p);  // a0 = p * (-u0)^{-1}-ish; u0 is a p-unit
    Rep r = rep_zero(a.K - 1);
    std::int64_t Pm1 = pK(a.K - 1);
    std::int64_t u0inv = mod_inverse(u0, Pm1);
    for (size_t i = 0; i < r.c.size(); ++i) {
        std::int64_t v = t.c[i] % P;
        if (v % params_.p != 0) throw InexactDivisionError("element not divisible by pi");
        __int128 w = (static_cast<__int128>(v / params_.p) * u0inv) % Pm1;
        r.c[i] = static_cast<std::int64_t>(w);
    }
    return r;
}

LocalField::Rep LocalField::rep_inv(const Rep& a) const {
    FqElem d = rep_residue(a);
    if (d.is_zero()) throw NonUnitError("inverse of a non-unit in o_L");
    Rep z = teich_rep(d.inv(), a.K);
    Rep one = rep_from_int(1, a.K);
    int iters = 2;
    {
        int need = params_.e * a.K;
        while ((1 << iters) < 2 * need) ++iters;
    }
    for (int it = 0; it < iters + 1; ++it) {
        // z <- z (2 - a z)
        Rep az = rep_mul(a, z);
        Rep corr = rep_sub(rep_add(one, one), az);
        z = rep_mul(z, corr);
    }
    if (!rep_is_zero(rep_sub(rep_mul(a, z), one)))
        throw MathError("Newton inversion failed to converge");
    return z;
}

LocalField::Rep LocalField::teich_rep(const FqElem& d, int K) const {
    std::lock_guard<std::mutex> lock(teich_mutex_);
    if (static_cast<int>(teich_cache_.size()) <= K) teich_cache_.resize(K + 1);
    auto& row = teich_cache_[K];
    if (row.empty()) row.resize(residue_->size());
    std::uint64_t idx = d.index();
    if (!row[idx].c.empty()) return row[idx];
    Rep z = rep_zero(K);
    for (int i = 0; i < params_.f; ++i) z.c[i] = d.coord(i);
    for (int it = 0; it < K + 2; ++it) {
        // z <- z^q
        Rep acc = rep_from_int(1, K);
        Rep base = z;
        std::int64_t ee = q_;
        while (ee) {
            if (ee & 1) acc = rep_mul(acc, base);
            base = rep_mul(base, base);
            ee >>= 1;
        }
        z = acc;
    }
    row[idx] = z;
    return z;
}

LocalField::Rep LocalField::encode(const OLElement& x, int K) const {
    Rep acc = rep_zero(K);
    Rep pipow = rep_from_int(1, K);
    for (int i = 0; i < x.precision(); ++i) {
        if (!x.digit(i).is_zero()) acc = rep_add(acc, rep_mul(teich_rep(x.digit(i), K), pipow));
        pipow = rep_mul_pi(pipow);
    }
    return acc;
}

OLElement LocalField::decode(const Rep& r, int m) const {
    std::vector<FqElem> digits;
    digits.reserve(m);
    Rep cur = r;
    for (int i = 0; i < m; ++i) {
        FqElem d = rep_residue(cur);
        digits.push_back(d);
        if (i + 1 < m) {
            if (!d.is_zero()) cur = rep_sub(cur, teich_rep(d, cur.K));
            cur = rep_div_pi(cur);
        }
    }
    return OLElement(shared_from_this(), std::move(digits));
}

OLElement LocalField::q_over_pi(int m) const {
    OLElement qel = OLElement::from_int(shared_from_this(), q_, m + 1);
    return qel.div_by_pi_exact();
}

// ---------------------------------------------------------------------------
// OLElement

OLElement::OLElement(LocalFieldPtr field, std::vector<FqElem> digits)
    : field_(std::move(field)), m_(static_cast<int>(digits.size())), digits_(std::move(digits)) {}

OLElement OLElement::zero(const LocalFieldPtr& F, int m) {
    return OLElement(F, std::vector<FqElem>(m, FqElem::zero(F->residue_field())));
}

OLElement OLElement::one(const LocalFieldPtr& F, int m) {
    auto d = std::vector<FqElem>(m, FqElem::zero(F->residue_field()));
    if (m > 0) d[0] = FqElem::one(F->residue_field());
    return OLElement(F, std::move(d));
}

OLElement OLElement::from_int(const LocalFieldPtr& F, std::int64_t n, int m) {
    return F->decode(F->rep_from_int(n, LocalField::internal_precision(m)), m);
}

OLElement OLElement::teichmueller(const LocalFieldPtr& F, const FqElem& d, int m) {
    auto digits = std::vector<FqElem>(m, FqElem::zero(F->residue_field()));
    if (m > 0) digits[0] = d;
    return OLElement(F, std::move(digits));
}

bool OLElement::is_zero() const {
    for (const auto& d : digits_)
        if (!d.is_zero()) return false;
    return true;
}

bool OLElement::is_one() const {
    if (m_ == 0 || !digits_[0].is_one()) return false;
    for (int i = 1; i < m_; ++i)
        if (!digits_[i].is_zero()) return false;
    return true;
}

int OLElement::valuation() const {
    for (int i = 0; i < m_; ++i)
        if (!digits_[i].is_zero()) return i;
    return m_;
}

FqElem OLElement::reduce_mod_pi() const {
    return m_ > 0 ? digits_[0] : FqElem::zero(field_->residue_field());
}

static void check_same_field(const OLElement& a, const OLElement& b) {
    if (!a.field() || !b.field() || !a.field()->same_as(*b.field()))
        throw RingMismatchError("OLElement operands over different fields");
}

OLElement OLElement::operator+(const OLElement& o) const {
    check_same_field(*this, o);
    int m = std::min(m_, o.m_);
    int K = LocalField::internal_precision(m);
    return field_->decode(field_->rep_add(field_->encode(truncated(m), K), field_->encode(o.truncated(m), K)), m);
}

OLElement OLElement::operator-(const OLElement& o) const {
    check_same_field(*this, o);
    int m = std::min(m_, o.m_);
    int K = LocalField::internal_precision(m);
    return field_->decode(field_->rep_sub(field_->encode(truncated(m), K), field_->encode(o.truncated(m), K)), m);
}

OLElement OLElement::operator-() const {
    int K = LocalField::internal_precision(m_);
    return field_->decode(field_->rep_neg(field_->encode(*this, K)), m_);
}

OLElement OLElement::operator*(const OLElement& o) const {
    check_same_field(*this, o);
    int m = std::min(m_, o.m_);
    int K = LocalField::internal_precision(m);
    return field_->decode(field_->rep_mul(field_->encode(truncated(m), K), field_->encode(o.truncated(m), K)), m);
}

OLElement OLElement::inv() const {
    if (!is_unit()) throw NonUnitError("OLElement inverse of a non-unit");
    int K = LocalField::internal_precision(m_);
    return field_->decode(field_->rep_inv(field_->encode(*this, K)), m_);
}

OLElement OLElement::pow(std::uint64_t k) const {
    OLElement r = one(field_, m_);
    OLElement base = *this;
    while (k) {
        if (k & 1) r = r * base;
        base = base * base;
        k >>= 1;
    }
    return r;
}

OLElement OLElement::truncated(int m) const {
    if (m >= m_) return *this;
    return OLElement(field_, std::vector<FqElem>(digits_.begin(), digits_.begin() + m));
}

OLElement OLElement::padded_to(int m) const {
    if (m <= m_) return truncated(m);
    std::vector<FqElem> d = digits_;
    d.resize(m, FqElem::zero(field_->residue_field()));
    return OLElement(field_, std::move(d));
}

OLElement OLElement::mul_by_pi() const {
    std::vector<FqElem> d;
    d.reserve(m_ + 1);
    d.push_back(FqElem::zero(field_->residue_field()));
    d.insert(d.end(), digits_.begin(), digits_.end());
    return OLElement(field_, std::move(d));
}

OLElement OLElement::div_by_pi_exact() const {
    if (m_ == 0 || !digits_[0].is_zero())
        throw InexactDivisionError("OLElement not divisible by pi");
    return OLElement(field_, std::vector<FqElem>(digits_.begin() + 1, digits_.end()));
}

bool OLElement::operator==(const OLElement& o) const {
    if (!field_ || !o.field_) return is_zero() && o.is_zero();
    if (!field_->same_as(*o.field_)) return false;
    int m = std::min(m_, o.m_);
    for (int i = 0; i < m; ++i)
        if (digits_[i] != o.digits_[i]) return false;
    return m_ == o.m_;
}

std::string OLElement::str() const {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < m_; ++i) {
        if (i) os << ",";
        os << digits_[i].str();
    }
    os << ") base q=" << (field_ ? field_->q() : 0);
    return os.str();
}

// ---------------------------------------------------------------------------
// element / config parsing

namespace {

void skip_ws(const std::string& s, size_t& i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

FqElem parse_fq(const FqFieldPtr& F, const std::string& s, size_t& i) {
    skip_ws(s, i);
    if (i < s.size() && s[i] == '[') {
        ++i;
        std::vector<int> coords;
        while (true) {
            skip_ws(s, i);
            size_t j = i;
            while (j < s.size() && (s[j] == '-' || std::isdigit(static_cast<unsigned char>(s[j])))) ++j;
            coords.push_back(std::stoi(s.substr(i, j - i)));
            i = j;
            skip_ws(s, i);
            if (i < s.size() && s[i] == ',') { ++i; continue; }
            if (i < s.size() && s[i] == ']') { ++i; break; }
            throw std::invalid_argument("malformed F_q element: " + s);
        }
        return FqElem(F, coords);
    }
    size_t j = i;
    while (j < s.size() && (s[j] == '-' || std::isdigit(static_cast<unsigned char>(s[j])))) ++j;
    if (j == i) throw std::invalid_argument("malformed F_q element: " + s);
    int v = std::stoi(s.substr(i, j - i));
    i = j;
    return FqElem::from_int(F, v);
}

}  // namespace

OLElement LocalField::parse_element(const std::string& text, int m) const {
    size_t i = 0;
    skip_ws(text, i);
    if (i < text.size() && text[i] == '(') {
        ++i;
        std::vector<FqElem> digits;
        while (true) {
            digits.push_back(parse_fq(residue_, text, i));
            skip_ws(text, i);
            if (i < text.size() && text[i] == ',') { ++i; continue; }
            if (i < text.size() && text[i] == ')') { ++i; break; }
            throw std::invalid_argument("malformed OL element: " + text);
        }
        // optional trailing "base q=<q>"
        return OLElement(shared_from_this(), std::move(digits));
    }
    // bare integer
    return OLElement::from_int(shared_from_this(), std::stoll(text), m);
}

ParsedConfig parse_config_text(const std::string& text) {
    ParsedConfig cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r\n");
            size_t b = s.find_last_not_of(" \t\r\n");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) continue;
        if (key == "p") cfg.params.p = std::stoi(val);
        else if (key == "f") cfg.params.f = std::stoi(val);
        else if (key == "e") cfg.params.e = std::stoi(val);
        else if (key == "eisenstein") {
            std::istringstream vs(val);
            std::int64_t c;
            cfg.params.eisenstein.clear();
            while (vs >> c) cfg.params.eisenstein.push_back(c);
        } else if (key == "residue_modulus") {
            std::istringstream vs(val);
            int c;
            cfg.params.residue_modulus.clear();
            while (vs >> c) cfg.params.residue_modulus.push_back(c);
        } else if (key == "m") cfg.profile.m = std::stoi(val);
        else if (key == "window") {
            auto lb = val.find('[');
            auto comma = val.find(',');
            auto rb = val.find_first_of("])", comma);
            if (lb == std::string::npos || comma == std::string::npos || rb == std::string::npos)
                throw std::invalid_argument("window must look like [v_min, N)");
            cfg.profile.v_min = std::stoll(val.substr(lb + 1, comma - lb - 1));
            cfg.profile.N = std::stoll(val.substr(comma + 1, rb - comma - 1));
        } else if (key == "perf_level") cfg.profile.perf_level = std::stoi(val);
        else if (key == "weight") cfg.weight = Rat::parse(val);
        else throw std::invalid_argument("unknown config key: " + key);
    }
    cfg.params.validate();
    cfg.profile.validate();
    return cfg;
}

ParsedConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace phigamma

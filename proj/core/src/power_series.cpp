#include "phigamma/power_series.hpp"

#include <sstream>

namespace phigamma {

PowerSeries PowerSeries::monomial(const LocalFieldPtr& F, const OLElement& c, std::int64_t k, int m,
                                  std::int64_t N) {
    PowerSeries s(F, m, N);
    s.set_coeff(k, c);
    return s;
}

OLElement PowerSeries::coeff(std::int64_t k) const {
    auto it = coeffs_.find(k);
    if (it != coeffs_.end()) return it->second;
    return OLElement::zero(field_, m_);
}

void PowerSeries::set_coeff(std::int64_t k, const OLElement& c) {
    if (k < 0) throw std::invalid_argument("PowerSeries exponent must be >= 0");
    if (k >= N_) return;
    OLElement t = c.truncated(m_);
    if (t.is_zero())
        coeffs_.erase(k);
    else
        coeffs_[k] = t;
}

PowerSeries PowerSeries::operator+(const PowerSeries& o) const {
    PowerSeries r(field_, std::min(m_, o.m_), std::min(N_, o.N_));
    for (const auto& [k, c] : coeffs_) r.set_coeff(k, c);
    for (const auto& [k, c] : o.coeffs_) r.set_coeff(k, r.coeff(k) + c);
    return r;
}

PowerSeries PowerSeries::operator-(const PowerSeries& o) const {
    PowerSeries r(field_, std::min(m_, o.m_), std::min(N_, o.N_));
    for (const auto& [k, c] : coeffs_) r.set_coeff(k, c);
    for (const auto& [k, c] : o.coeffs_) r.set_coeff(k, r.coeff(k) - c);
    return r;
}

PowerSeries PowerSeries::operator*(const PowerSeries& o) const {
    PowerSeries r(field_, std::min(m_, o.m_), std::min(N_, o.N_));
    for (const auto& [k1, c1] : coeffs_) {
        if (k1 >= r.N_) break;
        for (const auto& [k2, c2] : o.coeffs_) {
            if (k1 + k2 >= r.N_) break;
            r.set_coeff(k1 + k2, r.coeff(k1 + k2) + c1 * c2);
        }
    }
    return r;
}

PowerSeries PowerSeries::scaled(const OLElement& c) const {
    PowerSeries r(field_, std::min(m_, c.precision()), N_);
    for (const auto& [k, v] : coeffs_) r.set_coeff(k, v * c);
    return r;
}

PowerSeries PowerSeries::truncated(int m, std::int64_t N) const {
    PowerSeries r(field_, std::min(m, m_), std::min(N, N_));
    for (const auto& [k, v] : coeffs_) r.set_coeff(k, v);
    return r;
}

PowerSeries PowerSeries::compose(const PowerSeries& h) const {
    if (!h.zero_constant_term()) throw ConstantTermNonzeroError();
    PowerSeries r(field_, std::min(m_, h.m_), std::min(N_, h.N_));
    // Horner over decreasing exponents.
    bool first = true;
    std::int64_t prev = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        if (first) {
            r.set_coeff(0, it->second);
            prev = it->first;
            first = false;
            continue;
        }
        for (std::int64_t t = 0; t < prev - it->first; ++t) r = r * h;
        r.set_coeff(0, r.coeff(0) + it->second);
        prev = it->first;
    }
    if (first) return r;  // zero series
    for (std::int64_t t = 0; t < prev; ++t) r = r * h;
    return r;
}

PowerSeries PowerSeries::pow(std::uint64_t k) const {
    PowerSeries r = monomial(field_, OLElement::one(field_, m_), 0, m_, N_);
    PowerSeries base = *this;
    while (k) {
        if (k & 1) r = r * base;
        base = base * base;
        k >>= 1;
    }
    return r;
}

std::string PowerSeries::str(const std::string& var) const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : coeffs_) {
        if (!first) os << " + ";
        first = false;
        os << c.str() << "*" << var << "^" << k;
    }
    if (first) os << "0";
    os << " + O(" << var << "^" << N_ << ") + O(pi^" << m_ << ")";
    return os.str();
}

OLElement BivariateSeries::coeff(std::int64_t i, std::int64_t j) const {
    auto it = coeffs_.find({i, j});
    if (it != coeffs_.end()) return it->second;
    return OLElement::zero(field_, m_);
}

void BivariateSeries::set_coeff(std::int64_t i, std::int64_t j, const OLElement& c) {
    if (i < 0 || j < 0) throw std::invalid_argument("BivariateSeries exponents must be >= 0");
    if (i + j >= N_) return;
    OLElement t = c.truncated(m_);
    if (t.is_zero())
        coeffs_.erase({i, j});
    else
        coeffs_[{i, j}] = t;
}

BivariateSeries BivariateSeries::operator+(const BivariateSeries& o) const {
    BivariateSeries r(field_, std::min(m_, o.m_), std::min(N_, o.N_));
    for (const auto& [k, c] : coeffs_) r.set_coeff(k.first, k.second, c);
    for (const auto& [k, c] : o.coeffs_) r.set_coeff(k.first, k.second, r.coeff(k.first, k.second) + c);
    return r;
}

BivariateSeries BivariateSeries::operator-(const BivariateSeries& o) const {
    BivariateSeries r(field_, std::min(m_, o.m_), std::min(N_, o.N_));
    for (const auto& [k, c] : coeffs_) r.set_coeff(k.first, k.second, c);
    for (const auto& [k, c] : o.coeffs_) r.set_coeff(k.first, k.second, r.coeff(k.first, k.second) - c);
    return r;
}

BivariateSeries BivariateSeries::operator*(const BivariateSeries& o) const {
    BivariateSeries r(field_, std::min(m_, o.m_), std::min(N_, o.N_));
    for (const auto& [k1, c1] : coeffs_)
        for (const auto& [k2, c2] : o.coeffs_) {
            std::int64_t i = k1.first + k2.first, j = k1.second + k2.second;
            if (i + j >= r.N_) continue;
            r.set_coeff(i, j, r.coeff(i, j) + c1 * c2);
        }
    return r;
}

BivariateSeries BivariateSeries::scaled(const OLElement& c) const {
    BivariateSeries r(field_, std::min(m_, c.precision()), N_);
    for (const auto& [k, v] : coeffs_) r.set_coeff(k.first, k.second, v * c);
    return r;
}

BivariateSeries BivariateSeries::truncated(int m, std::int64_t N) const {
    BivariateSeries r(field_, std::min(m, m_), std::min(N, N_));
    for (const auto& [k, v] : coeffs_) r.set_coeff(k.first, k.second, v);
    return r;
}

bool BivariateSeries::is_symmetric() const {
    for (const auto& [k, v] : coeffs_)
        if (!(coeff(k.second, k.first) == v)) return false;
    return true;
}

std::string BivariateSeries::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : coeffs_) {
        if (!first) os << " + ";
        first = false;
        os << c.str() << "*X^" << k.first << "*Y^" << k.second;
    }
    if (first) os << "0";
    os << " + O(deg " << N_ << ") + O(pi^" << m_ << ")";
    return os.str();
}

}  // namespace phigamma

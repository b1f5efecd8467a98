#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <utility>

#include "phigamma/errors.hpp"
#include "phigamma/local_field.hpp"

namespace phigamma {

// Truncated power series over o_L/pi^m supported on [0, N), sparse normal
// form (no stored coefficient is zero).
class PowerSeries {
  public:
    PowerSeries() : m_(0), N_(0) {}
    PowerSeries(LocalFieldPtr F, int m, std::int64_t N) : field_(std::move(F)), m_(m), N_(N) {}

    static PowerSeries zero(const LocalFieldPtr& F, int m, std::int64_t N) { return PowerSeries(F, m, N); }
    static PowerSeries monomial(const LocalFieldPtr& F, const OLElement& c, std::int64_t k, int m,
                                std::int64_t N);

    const LocalFieldPtr& field() const { return field_; }
    int precision() const { return m_; }
    std::int64_t degree_bound() const { return N_; }
    const std::map<std::int64_t, OLElement>& coeffs() const { return coeffs_; }

    OLElement coeff(std::int64_t k) const;
    void set_coeff(std::int64_t k, const OLElement& c);
    bool is_zero() const { return coeffs_.empty(); }
    bool zero_constant_term() const { return coeffs_.find(0) == coeffs_.end(); }

    PowerSeries operator+(const PowerSeries& o) const;
    PowerSeries operator-(const PowerSeries& o) const;
    PowerSeries operator*(const PowerSeries& o) const;
    PowerSeries scaled(const OLElement& c) const;
    PowerSeries truncated(int m, std::int64_t N) const;

    // g(h) for h with zero constant term.
    PowerSeries compose(const PowerSeries& h) const;
    PowerSeries pow(std::uint64_t k) const;

    bool operator==(const PowerSeries& o) const { return m_ == o.m_ && N_ == o.N_ && coeffs_ == o.coeffs_; }

    // "c_k * Z^k + ... + O(Z^N) + O(pi^m)" with OLElement digit syntax.
    std::string str(const std::string& var = "Z") const;
    friend std::ostream& operator<<(std::ostream& os, const PowerSeries& s) { return os << s.str(); }

  private:
    LocalFieldPtr field_;
    int m_;
    std::int64_t N_;
    std::map<std::int64_t, OLElement> coeffs_;
};

// Bivariate truncation: coefficients on i + j < N. Used for the formal group
// law, where coeff(i,j) = coeff(j,i).
class BivariateSeries {
  public:
    BivariateSeries() : m_(0), N_(0) {}
    BivariateSeries(LocalFieldPtr F, int m, std::int64_t N) : field_(std::move(F)), m_(m), N_(N) {}

    const LocalFieldPtr& field() const { return field_; }
    int precision() const { return m_; }
    std::int64_t degree_bound() const { return N_; }
    const std::map<std::pair<std::int64_t, std::int64_t>, OLElement>& coeffs() const { return coeffs_; }

    OLElement coeff(std::int64_t i, std::int64_t j) const;
    void set_coeff(std::int64_t i, std::int64_t j, const OLElement& c);

    BivariateSeries operator+(const BivariateSeries& o) const;
    BivariateSeries operator-(const BivariateSeries& o) const;
    BivariateSeries operator*(const BivariateSeries& o) const;
    BivariateSeries scaled(const OLElement& c) const;
    BivariateSeries truncated(int m, std::int64_t N) const;

    bool is_symmetric() const;
    bool operator==(const BivariateSeries& o) const {
        return m_ == o.m_ && N_ == o.N_ && coeffs_ == o.coeffs_;
    }

    std::string str() const;
    friend std::ostream& operator<<(std::ostream& os, const BivariateSeries& s) { return os << s.str(); }

  private:
    LocalFieldPtr field_;
    int m_;
    std::int64_t N_;
    std::map<std::pair<std::int64_t, std::int64_t>, OLElement> coeffs_;
};

}  // namespace phigamma

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "phigamma/fq.hpp"
#include "phigamma/rational.hpp"

namespace phigamma {

// Truncated Laurent series over a finite field k, the residue-world model of
// k((w)). Window semantics: coefficients below v_min are exactly zero (hard
// support bound), coefficients on [v_min, N) are stored, everything from N on
// is unknown.
class LaurentSeriesFq {
  public:
    LaurentSeriesFq() : v_min_(0), N_(0), q_(0) {}
    LaurentSeriesFq(FqFieldPtr k, std::int64_t q, std::int64_t v_min, std::int64_t N)
        : k_(std::move(k)), v_min_(v_min), N_(N), q_(q) {}

    static LaurentSeriesFq zero(const FqFieldPtr& k, std::int64_t q, std::int64_t v_min, std::int64_t N) {
        return LaurentSeriesFq(k, q, v_min, N);
    }
    static LaurentSeriesFq monomial(const FqFieldPtr& k, std::int64_t q, const FqElem& c, std::int64_t e,
                                    std::int64_t v_min, std::int64_t N);
    static LaurentSeriesFq one(const FqFieldPtr& k, std::int64_t q, std::int64_t v_min, std::int64_t N) {
        return monomial(k, q, FqElem::one(k), 0, v_min, N);
    }

    const FqFieldPtr& coeff_field() const { return k_; }
    std::int64_t q() const { return q_; }
    std::int64_t window_lo() const { return v_min_; }
    std::int64_t window_hi() const { return N_; }
    const std::map<std::int64_t, FqElem>& coeffs() const { return coeffs_; }

    FqElem coeff(std::int64_t e) const;
    void set_coeff(std::int64_t e, const FqElem& c);
    bool is_zero_on_window() const { return coeffs_.empty(); }

    // Exact valuation; nullopt when the series vanishes on the whole window
    // (the true valuation could be >= N, so nothing is certified).
    std::optional<std::int64_t> valuation() const;

    LaurentSeriesFq operator+(const LaurentSeriesFq& o) const;
    LaurentSeriesFq operator-(const LaurentSeriesFq& o) const;
    LaurentSeriesFq operator-() const;
    LaurentSeriesFq operator*(const LaurentSeriesFq& o) const;
    LaurentSeriesFq scaled(const FqElem& c) const;
    LaurentSeriesFq shifted(std::int64_t e) const;  // multiply by w^e
    LaurentSeriesFq inv() const;                    // needs certified leading term
    LaurentSeriesFq restricted(std::int64_t v_min, std::int64_t N) const;

    // x -> x^q: coefficientwise q-power plus exponent dilation; the certified
    // window dilates to [q v_min, q N).
    LaurentSeriesFq frobenius() const;

    bool operator==(const LaurentSeriesFq& o) const {
        return v_min_ == o.v_min_ && N_ == o.N_ && coeffs_ == o.coeffs_;
    }
    bool same_series(const LaurentSeriesFq& o) const { return coeffs_ == o.coeffs_; }

    std::string str(const std::string& var = "w") const;
    friend std::ostream& operator<<(std::ostream& os, const LaurentSeriesFq& s) { return os << s.str(); }

    static LaurentSeriesFq parse(const FqFieldPtr& k, std::int64_t q, const std::string& text,
                                 std::int64_t v_min, std::int64_t N);

  private:
    FqFieldPtr k_;
    std::int64_t v_min_, N_;
    std::int64_t q_;
    std::map<std::int64_t, FqElem> coeffs_;
};

// Truncated series with fractional exponents of denominator dividing
// q^perf_level: the finite-precision model of the perfection of k((w)).
// Exponent keys are scaled by q^perf_level; the window is kept in actual
// exponent values as rationals with the same denominator.
class PerfLaurent {
  public:
    static constexpr int kDefaultMaxLevel = 6;

    PerfLaurent() : q_(0), level_(0), max_level_(kDefaultMaxLevel), denom_(1), v_min_num_(0), N_num_(0) {}
    PerfLaurent(FqFieldPtr k, std::int64_t q, int level, std::int64_t v_min_num, std::int64_t N_num,
                int max_level = kDefaultMaxLevel);

    static PerfLaurent from_laurent(const LaurentSeriesFq& x, int level,
                                    int max_level = kDefaultMaxLevel);
    static PerfLaurent monomial(const FqFieldPtr& k, std::int64_t q, const FqElem& c, const Rat& e,
                                int level, const Rat& v_min, const Rat& N,
                                int max_level = kDefaultMaxLevel);

    const FqFieldPtr& coeff_field() const { return k_; }
    std::int64_t q() const { return q_; }
    int perf_level() const { return level_; }
    int max_level() const { return max_level_; }
    std::int64_t denom() const { return denom_; }  // q^level
    Rat window_lo() const { return Rat(v_min_num_, denom_); }
    Rat window_hi() const { return Rat(N_num_, denom_); }
    std::int64_t scaled_window_lo() const { return v_min_num_; }
    std::int64_t scaled_window_hi() const { return N_num_; }
    const std::map<std::int64_t, FqElem>& scaled_coeffs() const { return coeffs_; }

    FqElem coeff(const Rat& e) const;
    void set_coeff(const Rat& e, const FqElem& c);
    void set_scaled_coeff(std::int64_t key, const FqElem& c);
    bool is_zero_on_window() const { return coeffs_.empty(); }
    std::optional<Rat> valuation() const;

    PerfLaurent with_level(int level) const;  // rescale representation (level >= current)
    PerfLaurent operator+(const PerfLaurent& o) const;
    PerfLaurent operator-(const PerfLaurent& o) const;
    PerfLaurent operator-() const;
    PerfLaurent operator*(const PerfLaurent& o) const;
    PerfLaurent scaled(const FqElem& c) const;
    PerfLaurent inv() const;
    PerfLaurent restricted(const Rat& v_min, const Rat& N) const;

    PerfLaurent frobenius() const;   // x -> x^q
    PerfLaurent qth_root() const;    // raises perf_level by one

    // Keeps only terms with integral exponent, as a LaurentSeriesFq (window
    // bounds rounded inward).
    LaurentSeriesFq integral_part() const;
    // Keeps only terms with non-integral exponent.
    PerfLaurent fractional_part() const;

    bool operator==(const PerfLaurent& o) const;

    std::string str(const std::string& var = "w") const;
    friend std::ostream& operator<<(std::ostream& os, const PerfLaurent& s) { return os << s.str(); }

    static PerfLaurent parse(const FqFieldPtr& k, std::int64_t q, const std::string& text, int level,
                             const Rat& v_min, const Rat& N, int max_level = kDefaultMaxLevel);

  private:
    FqFieldPtr k_;
    std::int64_t q_;
    int level_;
    int max_level_;
    std::int64_t denom_;  // q^level
    std::int64_t v_min_num_, N_num_;
    std::map<std::int64_t, FqElem> coeffs_;  // key = exponent * denom
};

// Solves x^q - x = a - obstruction on the window of a. The obstruction is
// the constant-term residue that has no solution in the coefficient field;
// over F_q itself the Artin-Schreier map c -> c^q - c vanishes, so any
// nonzero constant term of a is obstructed.
struct ArtinSchreierResult {
    LaurentSeriesFq x;
    FqElem obstruction;
};
ArtinSchreierResult artin_schreier_solve(const LaurentSeriesFq& a);

// Solves (phi - 1) x = a modulo integral-exponent series, where phi is the
// q-power Frobenius. a must have perf_level >= 1; the fractional digits are
// determined by a finite recursion from the deepest denominator level down.
PerfLaurent phi_minus_one_solve_perf_mod_E(const PerfLaurent& a);

}  // namespace phigamma

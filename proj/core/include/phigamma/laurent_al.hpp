#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "phigamma/laurent_fq.hpp"
#include "phigamma/local_field.hpp"
#include "phigamma/lubin_tate.hpp"
#include "phigamma/witt.hpp"

namespace phigamma {

// Truncated Laurent series over o_L/pi^m in the variable Z: the working
// model of A_L/pi^m. Window semantics as in LaurentSeriesFq: hard support
// bound below v_min, known coefficients on [v_min, N), unknown from N on.
// Exact elements (finite known support, no unknown tail) use a huge N.
class LaurentSeriesAL {
  public:
    static constexpr std::int64_t kExactWindow = std::int64_t(1) << 40;

    LaurentSeriesAL() : m_(0), v_min_(0), N_(0) {}
    LaurentSeriesAL(LocalFieldPtr F, int m, std::int64_t v_min, std::int64_t N)
        : field_(std::move(F)), m_(m), v_min_(v_min), N_(N) {}

    static LaurentSeriesAL monomial(const LocalFieldPtr& F, const OLElement& c, std::int64_t e, int m,
                                    std::int64_t v_min, std::int64_t N);
    static LaurentSeriesAL one(const LocalFieldPtr& F, int m, std::int64_t v_min, std::int64_t N) {
        return monomial(F, OLElement::one(F, m), 0, m, v_min, N);
    }
    static LaurentSeriesAL from_power_series(const PowerSeries& s, std::int64_t v_min);

    const LocalFieldPtr& field() const { return field_; }
    int precision() const { return m_; }
    std::int64_t window_lo() const { return v_min_; }
    std::int64_t window_hi() const { return N_; }
    const std::map<std::int64_t, OLElement>& coeffs() const { return coeffs_; }

    OLElement coeff(std::int64_t e) const;
    void set_coeff(std::int64_t e, const OLElement& c);
    bool is_zero_on_window() const { return coeffs_.empty(); }
    // lowest stored exponent; nullopt when zero on the window
    std::optional<std::int64_t> support_lo() const;

    LaurentSeriesAL operator+(const LaurentSeriesAL& o) const;
    LaurentSeriesAL operator-(const LaurentSeriesAL& o) const;
    LaurentSeriesAL operator-() const;
    LaurentSeriesAL operator*(const LaurentSeriesAL& o) const;
    LaurentSeriesAL scaled(const OLElement& c) const;
    LaurentSeriesAL shifted(std::int64_t e) const;
    LaurentSeriesAL restricted(std::int64_t v_min, std::int64_t N) const;
    LaurentSeriesAL truncated_precision(int m) const;
    LaurentSeriesAL mul_by_pi() const;
    LaurentSeriesAL div_by_pi_exact() const;

    // Unit inversion: the reduction mod pi must have a certified leading
    // term; Newton lifting handles the pi-adic correction.
    LaurentSeriesAL inv() const;

    LaurentSeriesFq reduce_mod_pi() const;
    static LaurentSeriesAL teichmueller_lift(const LaurentSeriesFq& b, const LocalFieldPtr& F, int m);

    bool operator==(const LaurentSeriesAL& o) const {
        return m_ == o.m_ && v_min_ == o.v_min_ && N_ == o.N_ && coeffs_ == o.coeffs_;
    }
    bool same_series(const LaurentSeriesAL& o) const { return coeffs_ == o.coeffs_; }

    std::string str() const;
    friend std::ostream& operator<<(std::ostream& os, const LaurentSeriesAL& s) { return os << s.str(); }
    static LaurentSeriesAL parse(const LocalFieldPtr& F, int m, const std::string& text,
                                 std::int64_t v_min, std::int64_t N);

  private:
    LocalFieldPtr field_;
    int m_;
    std::int64_t v_min_, N_;
    std::map<std::int64_t, OLElement> coeffs_;
};

// The operator context for A_L/pi^m: caches the Frobenius power series, its
// inverse powers, the trace matrices and the psi images of the basis
// monomials per (field, precision, window). Immutable after construction.
class ALContext {
  public:
    ALContext(LocalFieldPtr F, int m);

    const LocalFieldPtr& field() const { return F_; }
    int precision() const { return m_; }

    // f([pi](Z)); certified window propagation documented in the module notes
    LaurentSeriesAL phi(const LaurentSeriesAL& f) const;
    // f([a](Z)) for a unit a in o_L
    LaurentSeriesAL gamma(const OLElement& a, const LaurentSeriesAL& f) const;
    // f = sum_i phi(parts[i]) Z^i
    std::vector<LaurentSeriesAL> decompose_over_phi(const LaurentSeriesAL& f) const;
    // trace of multiplication by f over phi(A_L); divisible by pi
    LaurentSeriesAL trace_over_phi(const LaurentSeriesAL& f) const;
    LaurentSeriesAL psi(const LaurentSeriesAL& f) const;

    // inverse of phi on certified members of phi(A_L)
    LaurentSeriesAL phi_inverse(const LaurentSeriesAL& f) const;

    // gamma with an integer unit; the series [a](Z) needs more pi-digits of
    // a than f carries, so group elements are taken as exact integers
    LaurentSeriesAL gamma_int(std::int64_t a, const LaurentSeriesAL& f) const;

    // Powers of [pi](Z) (exact elements); n may be negative.
    const LaurentSeriesAL& frobenius_power(std::int64_t n) const;

    // psi on the basis monomials Z^i, i < q, from the trace matrix at one
    // extra pi-digit; cached write-once
    const std::vector<LaurentSeriesAL>& psi_basis() const;

  private:
    LaurentSeriesAL phi_inverse_at(const LaurentSeriesAL& f, int m) const;

    struct GammaCache {
        std::int64_t span = 0;
        LaurentSeriesAL u, uinv;  // [a](Z) and its inverse
        std::map<std::int64_t, LaurentSeriesAL> powers;
    };

    LocalFieldPtr F_;
    int m_;
    std::int64_t q_;
    LaurentSeriesAL frob_;      // [pi](Z), exact window
    LaurentSeriesAL frob_inv_;  // [pi](Z)^{-1}, exact by pi-nilpotence
    mutable std::map<std::int64_t, LaurentSeriesAL> pow_cache_;
    mutable std::map<std::string, GammaCache> gamma_cache_;
    mutable std::vector<LaurentSeriesAL> psi_basis_;
    mutable std::mutex mutex_;
};

// An element of the overconvergent subring with its growth certificate: all
// coefficients at exponents n < 0 satisfy v_pi(a_n) >= ceil(w r_cert |n|) - C.
struct OverconvergentWitness {
    LaurentSeriesAL element;
    Rat r_cert;
    std::int64_t C = 0;
};

// Coefficient-formula Gauss norm sup_n |a_n| (|w|_flat^r)^n as an exact
// exponent; requires r <= r_cert and validates the certificate.
GaussNorm overconv_norm_r(const OverconvergentWitness& fw, const Rat& r, const Rat& w);

// Wraps a series with the smallest offset C making the slope-r_cert
// certificate valid for its stored coefficients.
OverconvergentWitness make_witness(const LaurentSeriesAL& f, const Rat& r_cert, const Rat& w);

}  // namespace phigamma

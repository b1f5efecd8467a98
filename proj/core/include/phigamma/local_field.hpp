#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "phigamma/fq.hpp"
#include "phigamma/rational.hpp"

namespace phigamma {

// Parameters of the base field L/Q_p: residue size q = p^f, ramification
// index e, and for e > 1 an Eisenstein polynomial with integer coefficients
// defining the prime element. For e = 1 the prime element is p itself.
struct FieldParams {
    int p = 2;
    int f = 1;
    int e = 1;
    std::vector<std::int64_t> eisenstein;        // e+1 integer coefficients, monic; empty iff e == 1
    std::vector<int> residue_modulus;            // optional override for the F_q modulus

    std::int64_t q() const;
    void validate() const;
    std::string str() const;

    bool operator==(const FieldParams& o) const {
        return p == o.p && f == o.f && e == o.e && eisenstein == o.eisenstein &&
               residue_modulus == o.residue_modulus;
    }
};

// Shared precision bookkeeping: pi-adic precision m, the half-open exponent
// window [v_min, N) for series variables, and the maximal q-power denominator
// exponent for fractional-exponent series.
struct PrecisionProfile {
    int m = 3;
    std::int64_t v_min = -10;
    std::int64_t N = 30;
    int perf_level = 2;

    void validate() const;
    std::string str() const;
    bool operator==(const PrecisionProfile& o) const = default;
};

class LocalField;
using LocalFieldPtr = std::shared_ptr<const LocalField>;

// An element of o_L/pi_L^m in canonical Teichmueller digit form
// x = sum [d_i] pi_L^i with d_i in F_q.
class OLElement {
  public:
    OLElement() : m_(0) {}
    OLElement(LocalFieldPtr field, std::vector<FqElem> digits);

    static OLElement zero(const LocalFieldPtr& F, int m);
    static OLElement one(const LocalFieldPtr& F, int m);
    static OLElement from_int(const LocalFieldPtr& F, std::int64_t n, int m);
    static OLElement teichmueller(const LocalFieldPtr& F, const FqElem& d, int m);

    const LocalFieldPtr& field() const { return field_; }
    int precision() const { return m_; }
    const std::vector<FqElem>& digits() const { return digits_; }
    const FqElem& digit(int i) const { return digits_[i]; }

    bool is_zero() const;
    bool is_one() const;
    bool is_unit() const { return m_ > 0 && !digits_[0].is_zero(); }
    // Index of the first nonzero digit; m when zero at this precision.
    int valuation() const;

    FqElem reduce_mod_pi() const;

    OLElement operator+(const OLElement& o) const;
    OLElement operator-(const OLElement& o) const;
    OLElement operator-() const;
    OLElement operator*(const OLElement& o) const;
    OLElement inv() const;
    OLElement pow(std::uint64_t k) const;

    OLElement truncated(int m) const;       // lower precision view
    // Widens with zero top digits. Solver-internal: the added digits carry no
    // guarantee; callers own the margin analysis that makes them irrelevant.
    OLElement padded_to(int m) const;
    OLElement mul_by_pi() const;            // precision grows to m+1
    OLElement div_by_pi_exact() const;      // digit shift; requires digit 0 = 0

    bool operator==(const OLElement& o) const;
    bool operator!=(const OLElement& o) const { return !(*this == o); }

    std::string str() const;                          // "(d_0,...,d_{m-1}) base q=<q>"
    friend std::ostream& operator<<(std::ostream& os, const OLElement& x) { return os << x.str(); }

  private:
    LocalFieldPtr field_;
    int m_;
    std::vector<FqElem> digits_;
};

// The base local field context: residue field, Teichmueller lift machinery,
// and the internal unramified-tower representation used for multiplication.
// Immutable after construction; safe to share across threads.
class LocalField : public std::enable_shared_from_this<LocalField> {
  public:
    static LocalFieldPtr make(const FieldParams& params);

    const FieldParams& params() const { return params_; }
    const FqFieldPtr& residue_field() const { return residue_; }
    std::int64_t q() const { return q_; }
    int e() const { return params_.e; }
    // pi-valuation of q = p^f, always e*f >= 1.
    int q_valuation() const { return params_.e * params_.f; }

    // q/pi_L^{e*f - ?}: the integral element q / pi_L, needed by the psi
    // operator normalization.
    OLElement q_over_pi(int m) const;

    OLElement parse_element(const std::string& text, int m) const;

    bool same_as(const LocalField& o) const { return params_ == o.params_; }

    // -- internal tower representation (exposed for the Witt/Lubin-Tate
    //    modules' exact solves; coordinates mod p^K over the basis
    //    X^j y^i, j < e, i < f) --
    struct Rep {
        std::vector<std::int64_t> c;  // size e*f
        int K = 0;                    // coordinates are held mod p^K
    };
    Rep rep_zero(int K) const;
    Rep rep_from_int(std::int64_t n, int K) const;
    Rep rep_add(const Rep& a, const Rep& b) const;
    Rep rep_sub(const Rep& a, const Rep& b) const;
    Rep rep_neg(const Rep& a) const;
    Rep rep_mul(const Rep& a, const Rep& b) const;
    Rep rep_inv(const Rep& a) const;                      // unit required
    Rep rep_div_pi(const Rep& a) const;                   // exact; throws InexactDivision
    Rep rep_mul_pi(const Rep& a) const;
    bool rep_is_zero(const Rep& a) const;
    Rep teich_rep(const FqElem& d, int K) const;          // cached
    FqElem rep_residue(const Rep& a) const;

    Rep encode(const OLElement& x, int K) const;
    OLElement decode(const Rep& r, int m) const;

    // Internal precision used to extract m exact digits.
    static int internal_precision(int m) { return m + 2; }

  private:
    explicit LocalField(const FieldParams& params);

    std::int64_t pK(int K) const;

    FieldParams params_;
    FqFieldPtr residue_;
    std::int64_t q_;
    std::vector<std::int64_t> ytab_;   // integer lift of the residue modulus
    mutable std::vector<std::vector<Rep>> teich_cache_;  // [K][elem index]
    mutable std::mutex teich_mutex_;
};

// Key-value configuration document: p, f, e, eisenstein, and the default
// precision profile. '#' starts a comment.
struct ParsedConfig {
    FieldParams params;
    PrecisionProfile profile;
    std::optional<Rat> weight;  // flat-norm weight; defaults to q/(q-1)
};

ParsedConfig parse_config_text(const std::string& text);
ParsedConfig parse_config_file(const std::string& path);

}  // namespace phigamma

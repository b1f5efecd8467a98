#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "phigamma/errors.hpp"

namespace phigamma {

class FqField;
using FqFieldPtr = std::shared_ptr<const FqField>;

// F_{p^n} presented as F_p[x]/(g) for a monic irreducible g of degree n.
// The default g is the lexicographically smallest irreducible polynomial
// (coefficient vectors ordered by their base-p integer value, constant
// coefficient least significant); it is recorded in output headers.
class FqField : public std::enable_shared_from_this<FqField> {
  public:
    static constexpr int kMaxDeg = 8;

    static FqFieldPtr prime_field(int p);
    static FqFieldPtr extension(int p, int n);
    static FqFieldPtr with_modulus(int p, const std::vector<int>& monic_coeffs);

    int p() const { return p_; }
    int deg() const { return deg_; }
    std::uint64_t size() const { return size_; }
    const std::vector<std::int16_t>& modulus() const { return modulus_; }
    std::string modulus_str() const;

    bool same_as(const FqField& other) const {
        return p_ == other.p_ && deg_ == other.deg_ && modulus_ == other.modulus_;
    }

    // Reduction of x^(deg+k) mod g, for k in [0, deg-1).
    const std::array<std::int16_t, kMaxDeg>& xpow(int k) const { return xpow_[k]; }

    static bool is_irreducible(int p, const std::vector<int>& monic_coeffs);

  private:
    FqField(int p, std::vector<std::int16_t> modulus);

    int p_;
    int deg_;
    std::uint64_t size_;
    std::vector<std::int16_t> modulus_;
    std::vector<std::array<std::int16_t, kMaxDeg>> xpow_;
};

class FqElem {
  public:
    FqElem() : field_(nullptr) { c_.fill(0); }
    FqElem(FqFieldPtr field, const std::vector<int>& coords);

    static FqElem zero(const FqFieldPtr& f);
    static FqElem one(const FqFieldPtr& f);
    static FqElem from_int(const FqFieldPtr& f, std::int64_t n);  // image of n under Z -> F_p -> F
    static FqElem from_index(const FqFieldPtr& f, std::uint64_t idx);
    static FqElem gen(const FqFieldPtr& f);  // the class of x (equals 1 when deg = 1... no: equals 0+1*x)

    const FqFieldPtr& field() const { return field_; }
    bool is_zero() const;
    bool is_one() const;
    std::uint64_t index() const;
    std::vector<int> coords() const;
    int coord(int i) const { return c_[i]; }

    FqElem operator+(const FqElem& o) const;
    FqElem operator-(const FqElem& o) const;
    FqElem operator-() const;
    FqElem operator*(const FqElem& o) const;
    FqElem inv() const;
    FqElem pow(std::uint64_t e) const;

    // x -> x^q and its inverse on a field of size q^j. Requires q | size.
    FqElem frobenius_q(std::uint64_t q) const { return pow(q); }
    FqElem qth_root(std::uint64_t q) const;

    bool operator==(const FqElem& o) const;
    bool operator!=(const FqElem& o) const { return !(*this == o); }

    // Prints a bare integer for prime fields, "[c0,c1,...]" otherwise.
    std::string str() const;
    friend std::ostream& operator<<(std::ostream& os, const FqElem& x) { return os << x.str(); }

  private:
    friend class FqField;
    void check_compatible(const FqElem& o) const;

    FqFieldPtr field_;
    std::array<std::int16_t, FqField::kMaxDeg> c_;
};

// Embedding of a subfield into an ambient field; the image of the subfield
// generator is the root of the subfield modulus with smallest element index.
class FqEmbedding {
  public:
    static FqEmbedding find(FqFieldPtr sub, FqFieldPtr ambient);

    FqElem apply(const FqElem& x) const;
    const FqFieldPtr& sub() const { return sub_; }
    const FqFieldPtr& ambient() const { return ambient_; }

  private:
    FqFieldPtr sub_;
    FqFieldPtr ambient_;
    FqElem beta_;  // image of the subfield generator
};

}  // namespace phigamma

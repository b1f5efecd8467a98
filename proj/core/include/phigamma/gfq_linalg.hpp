#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "phigamma/fq.hpp"
#include "phigamma/local_field.hpp"

namespace phigamma {

// Index-based lookup tables for a small finite field; all the staged
// cohomology linear algebra runs on these.
class GfTab {
  public:
    explicit GfTab(FqFieldPtr k);

    const FqFieldPtr& field() const { return k_; }
    std::uint16_t size() const { return q_; }
    std::uint16_t add(std::uint16_t a, std::uint16_t b) const { return add_[a * q_ + b]; }
    std::uint16_t sub(std::uint16_t a, std::uint16_t b) const { return add_[a * q_ + neg_[b]]; }
    std::uint16_t mul(std::uint16_t a, std::uint16_t b) const { return mul_[a * q_ + b]; }
    std::uint16_t neg(std::uint16_t a) const { return neg_[a]; }
    std::uint16_t inv(std::uint16_t a) const { return inv_[a]; }

    std::uint16_t from_elem(const FqElem& x) const { return static_cast<std::uint16_t>(x.index()); }
    FqElem to_elem(std::uint16_t i) const { return FqElem::from_index(k_, i); }

  private:
    FqFieldPtr k_;
    std::uint16_t q_;
    std::vector<std::uint16_t> add_, mul_, neg_, inv_;
};

// Dense row-major matrix over the table field.
struct GfMat {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint16_t> a;

    GfMat() = default;
    GfMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0) {}
    std::uint16_t& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    std::uint16_t at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

int gf_rank(const GfTab& T, GfMat A);
// Basis of the right kernel, one column per kernel vector.
GfMat gf_kernel(const GfTab& T, GfMat A);
// Solves A x = b for all columns of b. Returns false if any system is
// inconsistent; on success x has A.cols rows.
bool gf_solve(const GfTab& T, GfMat A, const GfMat& b, GfMat& x);
GfMat gf_mul(const GfTab& T, const GfMat& A, const GfMat& B);
GfMat gf_hstack(const GfMat& A, const GfMat& B);

// Column echelon data for working modulo a subspace: reduce() maps a vector
// to its normal form modulo the span; the complement positions index a basis
// of the quotient.
class GfSpan {
  public:
    GfSpan() : T_(nullptr), dim_(0) {}
    GfSpan(const GfTab& T, int dim);

    // returns true if v was independent (and absorbs it)
    bool absorb(std::vector<std::uint16_t> v);
    void reduce(std::vector<std::uint16_t>& v) const;
    int rank() const { return static_cast<int>(pivots_.size()); }
    int dim() const { return dim_; }
    std::vector<int> complement_positions() const;

  private:
    const GfTab* T_;
    int dim_;
    std::vector<int> pivots_;                            // pivot position per stored vector
    std::vector<std::vector<std::uint16_t>> basis_;      // echelonized vectors
};

// Exact linear algebra over o_L/pi^m through Smith-style elimination with
// minimal-valuation pivots. Used by the pi-power cohomology engine; small
// dimensions only.
struct OlMat {
    int rows = 0;
    int cols = 0;
    std::vector<OLElement> a;

    OlMat() = default;
    OlMat(int r, int c, const LocalFieldPtr& F, int m)
        : rows(r), cols(c), a(static_cast<size_t>(r) * c, OLElement::zero(F, m)) {}
    OLElement& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    const OLElement& at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

struct OlSmithResult {
    std::vector<int> divisor_valuations;  // valuations of the nonzero diagonal entries
    OlMat col_ops;                        // V with A V = (column-reduced form), cols x cols
    int rank = 0;                         // number of diagonal entries with valuation < m
};

// Diagonalizes A over o_L/pi^m; A is consumed.
OlSmithResult ol_smith(OlMat A, const LocalFieldPtr& F, int m);

// Kernel of A over o_L/pi^m: columns generate { x : A x = 0 }, each tagged
// with the pi-power annihilator exponent of the generator.
struct OlKernel {
    OlMat generators;
    std::vector<int> annihilator;  // pi^{a} kills the generator
};
OlKernel ol_kernel(const OlMat& A, const LocalFieldPtr& F, int m);

// Elementary divisors of the subquotient ker(B) / im(A) where B A = 0,
// as pi-valuations sorted descending (m means a full o/pi^m factor... the
// valuation counts pi-torsion: a factor o/pi^a appears as value a).
std::vector<int> ol_subquotient_divisors(const OlMat& B, const OlMat& A, const LocalFieldPtr& F,
                                         int m);

}  // namespace phigamma

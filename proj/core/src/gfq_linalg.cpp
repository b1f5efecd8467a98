#include "phigamma/gfq_linalg.hpp"

#include <algorithm>

#include "phigamma/errors.hpp"

namespace phigamma {

GfTab::GfTab(FqFieldPtr k) : k_(std::move(k)) {
    if (k_->size() > 512) throw TooLargeError("GfTab supports fields up to 512 elements");
    q_ = static_cast<std::uint16_t>(k_->size());
    add_.resize(static_cast<size_t>(q_) * q_);
    mul_.resize(static_cast<size_t>(q_) * q_);
    neg_.resize(q_);
    inv_.resize(q_);
    std::vector<FqElem> elems;
    for (std::uint16_t i = 0; i < q_; ++i) elems.push_back(FqElem::from_index(k_, i));
    for (std::uint16_t i = 0; i < q_; ++i) {
        neg_[i] = static_cast<std::uint16_t>((-elems[i]).index());
        inv_[i] = i ? static_cast<std::uint16_t>(elems[i].inv().index()) : 0;
        for (std::uint16_t j = 0; j < q_; ++j) {
            add_[i * q_ + j] = static_cast<std::uint16_t>((elems[i] + elems[j]).index());
            mul_[i * q_ + j] = static_cast<std::uint16_t>((elems[i] * elems[j]).index());
        }
    }
}

namespace {

// in-place column echelon on the transpose view: classic row reduction
int row_reduce(const GfTab& T, GfMat& A, std::vector<int>* pivot_cols = nullptr) {
    int r = 0;
    for (int c = 0; c < A.cols && r < A.rows; ++c) {
        int piv = -1;
        for (int i = r; i < A.rows; ++i)
            if (A.at(i, c)) { piv = i; break; }
        if (piv < 0) continue;
        if (piv != r)
            for (int j = 0; j < A.cols; ++j) std::swap(A.at(piv, j), A.at(r, j));
        std::uint16_t s = T.inv(A.at(r, c));
        for (int j = c; j < A.cols; ++j) A.at(r, j) = T.mul(A.at(r, j), s);
        for (int i = 0; i < A.rows; ++i) {
            if (i == r || !A.at(i, c)) continue;
            std::uint16_t f = A.at(i, c);
            for (int j = c; j < A.cols; ++j)
                A.at(i, j) = T.sub(A.at(i, j), T.mul(f, A.at(r, j)));
        }
        if (pivot_cols) pivot_cols->push_back(c);
        ++r;
    }
    return r;
}

}  // namespace

int gf_rank(const GfTab& T, GfMat A) { return row_reduce(T, A); }

GfMat gf_kernel(const GfTab& T, GfMat A) {
    std::vector<int> pivots;
    int r = row_reduce(T, A, &pivots);
    std::vector<char> is_pivot(static_cast<size_t>(A.cols), 0);
    for (int c : pivots) is_pivot[static_cast<size_t>(c)] = 1;
    std::vector<int> free_cols;
    for (int c = 0; c < A.cols; ++c)
        if (!is_pivot[static_cast<size_t>(c)]) free_cols.push_back(c);
    GfMat K(A.cols, static_cast<int>(free_cols.size()));
    for (size_t fi = 0; fi < free_cols.size(); ++fi) {
        int fc = free_cols[fi];
        K.at(fc, static_cast<int>(fi)) = 1;
        for (int i = 0; i < r; ++i) {
            // pivot row i has its pivot at pivots[i]
            std::uint16_t v = A.at(i, fc);
            if (v) K.at(pivots[static_cast<size_t>(i)], static_cast<int>(fi)) = T.neg(v);
        }
    }
    return K;
}

bool gf_solve(const GfTab& T, GfMat A, const GfMat& b, GfMat& x) {
    int n = A.cols;
    GfMat aug(A.rows, A.cols + b.cols);
    for (int i = 0; i < A.rows; ++i) {
        for (int j = 0; j < A.cols; ++j) aug.at(i, j) = A.at(i, j);
        for (int j = 0; j < b.cols; ++j) aug.at(i, A.cols + j) = b.at(i, j);
    }
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < n && r < aug.rows; ++c) {
        int piv = -1;
        for (int i = r; i < aug.rows; ++i)
            if (aug.at(i, c)) { piv = i; break; }
        if (piv < 0) continue;
        if (piv != r)
            for (int j = 0; j < aug.cols; ++j) std::swap(aug.at(piv, j), aug.at(r, j));
        std::uint16_t s = T.inv(aug.at(r, c));
        for (int j = c; j < aug.cols; ++j) aug.at(r, j) = T.mul(aug.at(r, j), s);
        for (int i = 0; i < aug.rows; ++i) {
            if (i == r || !aug.at(i, c)) continue;
            std::uint16_t f = aug.at(i, c);
            for (int j = c; j < aug.cols; ++j) aug.at(i, j) = T.sub(aug.at(i, j), T.mul(f, aug.at(r, j)));
        }
        pivots.push_back(c);
        ++r;
    }
    // consistency: zero rows of the A-part must have zero b-part
    for (int i = r; i < aug.rows; ++i)
        for (int j = 0; j < b.cols; ++j)
            if (aug.at(i, n + j)) return false;
    x = GfMat(n, b.cols);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < b.cols; ++j) x.at(pivots[static_cast<size_t>(i)], j) = aug.at(i, n + j);
    return true;
}

GfMat gf_mul(const GfTab& T, const GfMat& A, const GfMat& B) {
    GfMat C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            std::uint16_t v = A.at(i, k);
            if (!v) continue;
            for (int j = 0; j < B.cols; ++j)
                if (B.at(k, j)) C.at(i, j) = T.add(C.at(i, j), T.mul(v, B.at(k, j)));
        }
    return C;
}

GfMat gf_hstack(const GfMat& A, const GfMat& B) {
    GfMat C(A.rows, A.cols + B.cols);
    for (int i = 0; i < A.rows; ++i) {
        for (int j = 0; j < A.cols; ++j) C.at(i, j) = A.at(i, j);
        for (int j = 0; j < B.cols; ++j) C.at(i, A.cols + j) = B.at(i, j);
    }
    return C;
}

GfSpan::GfSpan(const GfTab& T, int dim) : T_(&T), dim_(dim) {}

void GfSpan::reduce(std::vector<std::uint16_t>& v) const {
    for (size_t b = 0; b < basis_.size(); ++b) {
        std::uint16_t f = v[static_cast<size_t>(pivots_[b])];
        if (!f) continue;
        const auto& w = basis_[b];
        for (int i = 0; i < dim_; ++i)
            if (w[static_cast<size_t>(i)])
                v[static_cast<size_t>(i)] = T_->sub(v[static_cast<size_t>(i)],
                                                    T_->mul(f, w[static_cast<size_t>(i)]));
    }
}

bool GfSpan::absorb(std::vector<std::uint16_t> v) {
    reduce(v);
    int piv = -1;
    for (int i = 0; i < dim_; ++i)
        if (v[static_cast<size_t>(i)]) { piv = i; break; }
    if (piv < 0) return false;
    std::uint16_t s = T_->inv(v[static_cast<size_t>(piv)]);
    for (int i = 0; i < dim_; ++i) v[static_cast<size_t>(i)] = T_->mul(v[static_cast<size_t>(i)], s);
    // eliminate the new pivot from the existing basis
    for (size_t b = 0; b < basis_.size(); ++b) {
        std::uint16_t f = basis_[b][static_cast<size_t>(piv)];
        if (!f) continue;
        for (int i = 0; i < dim_; ++i)
            basis_[b][static_cast<size_t>(i)] =
                T_->sub(basis_[b][static_cast<size_t>(i)], T_->mul(f, v[static_cast<size_t>(i)]));
    }
    pivots_.push_back(piv);
    basis_.push_back(std::move(v));
    return true;
}

std::vector<int> GfSpan::complement_positions() const {
    std::vector<char> is_pivot(static_cast<size_t>(dim_), 0);
    for (int p : pivots_) is_pivot[static_cast<size_t>(p)] = 1;
    std::vector<int> out;
    for (int i = 0; i < dim_; ++i)
        if (!is_pivot[static_cast<size_t>(i)]) out.push_back(i);
    return out;
}

// ---------------------------------------------------------------------------
// o_L/pi^m elimination

namespace {

int val_of(const OLElement& x) { return x.valuation(); }

}  // namespace

OlSmithResult ol_smith(OlMat A, const LocalFieldPtr& F, int m) {
    OlSmithResult out;
    int n = std::min(A.rows, A.cols);
    // identity col_ops
    out.col_ops = OlMat(A.cols, A.cols, F, m);
    for (int j = 0; j < A.cols; ++j) out.col_ops.at(j, j) = OLElement::one(F, m);

    int k = 0;
    for (; k < n; ++k) {
        // minimal-valuation pivot in the remaining block
        int pr = -1, pc = -1, best = m;
        for (int i = k; i < A.rows; ++i)
            for (int j = k; j < A.cols; ++j) {
                int v = val_of(A.at(i, j));
                if (v < best) { best = v; pr = i; pc = j; }
            }
        if (pr < 0) break;
        if (pr != k)
            for (int j = 0; j < A.cols; ++j) std::swap(A.at(pr, j), A.at(k, j));
        if (pc != k) {
            for (int i = 0; i < A.rows; ++i) std::swap(A.at(i, pc), A.at(i, k));
            for (int i = 0; i < A.cols; ++i) std::swap(out.col_ops.at(i, pc), out.col_ops.at(i, k));
        }
        // pivot = pi^best * unit: normalize the pivot to exactly pi^best
        OLElement piv = A.at(k, k);
        OLElement unit = piv;
        for (int t = 0; t < best; ++t) unit = unit.div_by_pi_exact();
        unit = unit.padded_to(m);  // unit part, precision m
        OLElement unit_inv = unit.inv();
        for (int i = 0; i < A.rows; ++i) A.at(i, k) = A.at(i, k) * unit_inv;
        for (int i = 0; i < A.cols; ++i) out.col_ops.at(i, k) = out.col_ops.at(i, k) * unit_inv;
        // clear the column (row ops; untracked) and the row (col ops; tracked)
        for (int i = 0; i < A.rows; ++i) {
            if (i == k) continue;
            OLElement v = A.at(i, k);
            if (v.is_zero()) continue;
            // v divisible by pi^best
            OLElement f = v;
            for (int t = 0; t < best; ++t) f = f.div_by_pi_exact();
            f = f.padded_to(m);
            for (int j = 0; j < A.cols; ++j) A.at(i, j) = A.at(i, j) - f * A.at(k, j);
        }
        for (int j = 0; j < A.cols; ++j) {
            if (j == k) continue;
            OLElement v = A.at(k, j);
            if (v.is_zero()) continue;
            OLElement f = v;
            for (int t = 0; t < best; ++t) f = f.div_by_pi_exact();
            f = f.padded_to(m);
            for (int i = 0; i < A.rows; ++i) A.at(i, j) = A.at(i, j) - f * A.at(i, k);
            for (int i = 0; i < A.cols; ++i)
                out.col_ops.at(i, j) = out.col_ops.at(i, j) - f * out.col_ops.at(i, k);
        }
        out.divisor_valuations.push_back(best);
    }
    out.rank = k;
    return out;
}

OlKernel ol_kernel(const OlMat& A, const LocalFieldPtr& F, int m) {
    OlSmithResult s = ol_smith(A, F, m);
    OlKernel out;
    std::vector<int> gens;
    std::vector<int> ann;
    for (int j = 0; j < A.cols; ++j) {
        int d = (j < s.rank) ? s.divisor_valuations[static_cast<size_t>(j)] : m;
        if (d == 0) continue;  // unit divisor: no kernel contribution
        gens.push_back(j);
        ann.push_back(d);
    }
    out.generators = OlMat(A.cols, static_cast<int>(gens.size()), F, m);
    out.annihilator = ann;
    for (size_t gi = 0; gi < gens.size(); ++gi) {
        int j = gens[gi];
        int d = ann[gi];
        // generator = pi^{m-d} * (column j of V)
        for (int i = 0; i < A.cols; ++i) {
            OLElement v = s.col_ops.at(i, j);
            for (int t = 0; t < m - d; ++t) v = v.mul_by_pi();
            out.generators.at(i, static_cast<int>(gi)) = v.truncated(m);
        }
    }
    return out;
}

std::vector<int> ol_subquotient_divisors(const OlMat& B, const OlMat& A, const LocalFieldPtr& F,
                                         int m) {
    // kernel of B in y-coordinates: x = V y, ker = { y_j in pi^{m-d_j} }
    OlSmithResult s = ol_smith(B, F, m);
    std::vector<int> dliv;  // d_j per column of V (m for columns beyond rank)
    for (int j = 0; j < B.cols; ++j)
        dliv.push_back(j < s.rank ? s.divisor_valuations[static_cast<size_t>(j)] : m);

    // express the image columns in y-coordinates: y = V^{-1} a
    // invert V by elimination (V is invertible over the local ring)
    OlMat V = s.col_ops;
    int n = V.rows;
    OlMat Vinv(n, n, F, m);
    for (int i = 0; i < n; ++i) Vinv.at(i, i) = OLElement::one(F, m);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int i = c; i < n; ++i)
            if (V.at(i, c).is_unit()) { piv = i; break; }
        if (piv < 0) throw MathError("ol_subquotient: singular col_ops");
        if (piv != c)
            for (int j = 0; j < n; ++j) {
                std::swap(V.at(piv, j), V.at(c, j));
                std::swap(Vinv.at(piv, j), Vinv.at(c, j));
            }
        OLElement inv = V.at(c, c).inv();
        for (int j = 0; j < n; ++j) {
            V.at(c, j) = V.at(c, j) * inv;
            Vinv.at(c, j) = Vinv.at(c, j) * inv;
        }
        for (int i = 0; i < n; ++i) {
            if (i == c) continue;
            OLElement f = V.at(i, c);
            if (f.is_zero()) continue;
            for (int j = 0; j < n; ++j) {
                V.at(i, j) = V.at(i, j) - f * V.at(c, j);
                Vinv.at(i, j) = Vinv.at(i, j) - f * Vinv.at(c, j);
            }
        }
    }

    // generators of ker(B)/im(A): rows j with d_j > 0; relations:
    // pi^{d_j} e_j and the image columns scaled down by pi^{m-d_j}
    std::vector<int> gen_rows;
    for (int j = 0; j < n; ++j)
        if (dliv[static_cast<size_t>(j)] > 0) gen_rows.push_back(j);
    int g = static_cast<int>(gen_rows.size());
    OlMat rel(g, g + A.cols, F, m);
    for (int t = 0; t < g; ++t) {
        OLElement v = OLElement::one(F, m);
        for (int u = 0; u < dliv[static_cast<size_t>(gen_rows[t])]; ++u) v = v.mul_by_pi();
        rel.at(t, t) = v.truncated(m);
    }
    for (int c = 0; c < A.cols; ++c) {
        // y = Vinv * (column c of A)
        for (int t = 0; t < g; ++t) {
            int j = gen_rows[static_cast<size_t>(t)];
            OLElement acc = OLElement::zero(F, m);
            for (int i = 0; i < n; ++i) acc = acc + Vinv.at(j, i) * A.at(i, c);
            // the column lies in the kernel: y_j divisible by pi^{m-d_j}
            int shift = m - dliv[static_cast<size_t>(j)];
            for (int u = 0; u < shift; ++u) acc = acc.div_by_pi_exact();
            rel.at(t, g + c) = acc.padded_to(m);
        }
    }
    // H = o^g / col-span(rel): divisors of the relation matrix give the
    // cyclic decomposition; generator t contributes o/pi^{e_t}
    OlSmithResult rs = ol_smith(rel, F, m);
    std::vector<int> out;
    for (int t = 0; t < g; ++t) {
        int e = (t < rs.rank) ? rs.divisor_valuations[static_cast<size_t>(t)] : m;
        if (e > 0) out.push_back(e);
    }
    std::sort(out.rbegin(), out.rend());
    return out;
}

}  // namespace phigamma

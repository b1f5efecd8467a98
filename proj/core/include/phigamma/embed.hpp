#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "phigamma/laurent_al.hpp"
#include "phigamma/report.hpp"
#include "phigamma/witt.hpp"

namespace phigamma {

// The finite-precision image of the variable Z inside the Witt vectors of
// the tilt: the unique length-n vector w with w_0 = omega and
// phi_q(w) = [pi_L](w), solved digit by digit through q-th roots.
struct OmegaLTApprox {
    std::vector<PerfLaurent> witt;
    std::vector<PerfLaurent> defect;  // residual components of the defining equation
    bool residual_zero_on_window = true;
};

// Comparison context: a Witt ring over the perfection truncation together
// with the solved omega and cached powers. Immutable and thread safe after
// construction; the power cache is interior-locked.
class EmbedContext {
  public:
    EmbedContext(LocalFieldPtr F, int n, int perf_level, std::int64_t v_min, std::int64_t N,
                 const Rat& weight);

    const LocalFieldPtr& field() const { return F_; }
    const WittRing<PerfLaurent>& ring() const { return ring_; }
    int n() const { return n_; }
    const Rat& weight() const { return weight_; }
    const OmegaLTApprox& omega() const { return omega_; }

    // perturb_digit: re-runs the digit solve starting from a perturbed guess
    // at the given correction level; the result must be independent of it
    static OmegaLTApprox solve_omega(const WittRing<PerfLaurent>& ring, int perturb_level = -1);

    // evaluation of f at omega_LT through Witt arithmetic
    std::vector<PerfLaurent> embed(const LaurentSeriesAL& f) const;
    // Teichmueller-coefficient lift of b evaluated at omega_LT
    std::vector<PerfLaurent> embed_teich(const LaurentSeriesFq& b) const;

    const std::vector<PerfLaurent>& omega_power(std::int64_t e) const;

    // flat valuation min_k v(w_k)/q^k of the solved omega; powers w^e have
    // component-k valuations at least e tau q^k, which bounds where the
    // unknown tail of an embedded series can reach
    const Rat& omega_flat_valuation() const { return tau_; }

  private:
    std::vector<PerfLaurent> cap_tail(std::vector<PerfLaurent> v, std::int64_t N) const;
    static Rat floor_to_level(const Rat& x, const PerfLaurent& proto);

    LocalFieldPtr F_;
    int n_;
    Rat weight_;
    WittRing<PerfLaurent> ring_;
    OmegaLTApprox omega_;
    Rat tau_;
    mutable std::map<std::int64_t, std::vector<PerfLaurent>> pow_cache_;
    mutable std::mutex mutex_;
};

// Searches r over the grid (q-1)/q * 2^{-i}, i <= 6, for the strict
// inequality |omega_LT - [omega]|_r < |omega|_flat^r; reports the inequality,
// the Teichmueller-lift norm equality |x|_r = |b|_flat^r, and the strictness
// conclusion.
struct WeakDecompletionResult {
    Rat r;
    Report report;
};
WeakDecompletionResult check_weak_decompletion(const EmbedContext& ctx, const LaurentSeriesFq& b,
                                               const Rat* forced_r = nullptr);

// Enumerates W_n(F_{q^j}) and reports the kernel of phi_q - 1, the image
// count at n = 1, and for each unreached target the minimal extension degree
// where a preimage appears.
struct ExactSequenceResult {
    std::uint64_t ring_size = 0;
    std::uint64_t kernel_size = 0;
    bool kernel_is_base_witt = false;  // kernel = W_n(F_q) componentwise
    std::uint64_t image_size_n1 = 0;   // only for n = 1
    std::vector<std::pair<std::vector<FqElem>, int>> preimage_extensions;  // (target, minimal j')
    Report report;
};
ExactSequenceResult check_exact_sequence_finite(const LocalFieldPtr& F, int j, int n,
                                                bool search_extensions = true);

}  // namespace phigamma

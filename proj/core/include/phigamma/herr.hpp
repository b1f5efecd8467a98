#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phigamma/gfq_linalg.hpp"
#include "phigamma/laurent_al.hpp"
#include "phigamma/report.hpp"

namespace phigamma {

enum class BaseRing { EL, EPerf, AL };

// A matrix-presented (phi, Gamma)-module. Matrices are stored over
// A_L/pi^m uniformly (m = 1 for the residue bases) and must have exact
// windows: finitely many known coefficients and nothing hidden.
struct PhiGammaModule {
    using Mat = std::vector<std::vector<LaurentSeriesAL>>;

    LocalFieldPtr F;
    int rank = 1;
    BaseRing base = BaseRing::EL;
    int m = 1;           // pi-adic precision for the AL base
    int perf_level = 0;  // for the EPerf base
    Mat phi_mat;
    std::vector<std::pair<std::int64_t, Mat>> gammas;  // topological generators of U'
    std::vector<std::pair<std::int64_t, Mat>> deltas;  // non-identity torsion elements
    PrecisionProfile profile;
    bool delta_projected = false;  // set by delta_invariants

    int d() const { return static_cast<int>(gammas.size()); }
    void validate() const;

    std::string str() const;
    static PhiGammaModule parse(const LocalFieldPtr& F, const std::string& text);
};

struct EtaleCertificate {
    bool etale = false;
    LaurentSeriesFq det_reduction;  // determinant of Phi mod pi
    std::int64_t slope = 0;         // |v(det)|, the pole-bound seed
};

// Etale iff the determinant of Phi is a unit in the base; over the residue
// bases this means a certified nonzero reduction.
EtaleCertificate is_etale(const PhiGammaModule& M);

// Validates the torsion data (order prime to p, idempotency and
// delta-invariance of the averaging projector on window truncations,
// projector rank consistency across two window stages) and marks the module
// as Delta-projected. The cohomology engines then work on the image of the
// projector.
PhiGammaModule delta_invariants(const PhiGammaModule& M);

// The Koszul mapping-fibre shape for d generators, with a numeric check
// that the squared differential vanishes on sampled module vectors.
struct HerrComplex {
    PhiGammaModule module;
    int d = 1;
    std::vector<int> degree_multiplicities;  // binomial pattern of the fibre

    Report check_d_squared(std::uint64_t seed, int samples) const;
};
HerrComplex koszul_complex(const PhiGammaModule& M);

// Pole-bound schedule: stages use bounds slope + margin, doubled per stage;
// a result is accepted when the last two stages agree.
struct StabilizationPolicy {
    int stages = 3;
    std::int64_t margin = 8;
    std::int64_t forced_base_bound = 0;  // 0 = derive from the etale certificate
};

struct CohomologyReport {
    std::vector<std::vector<int>> trail;       // dims per stage, h^0..h^{d+1}
    std::vector<int> dims;                     // accepted dims
    bool stabilized = false;
    std::vector<std::vector<int>> divisors;    // pi^m case: per degree, descending valuations
    Report claims;
};

// Cohomology of the Herr fibre complex over the residue base (EL or EPerf):
// kernel and cokernel of phi_M - 1 as finite F_q-spaces with the U'-Koszul
// linear algebra on them, assembled through the long exact sequence of the
// cone. Throws NotEtale / NotStabilized (the report carries the trail).
CohomologyReport cohomology_mod_pi(const PhiGammaModule& M, const StabilizationPolicy& pol = {});

// The pi^m-torsion case: a direct staged solve over o_L/pi^m reporting
// elementary divisors, cross-checked by devissage through the mod-pi engine
// along 0 -> pi^k/pi^{k+1} -> /pi^{k+1} -> /pi^k -> 0.
CohomologyReport cohomology_mod_pi_power(const PhiGammaModule& M, int m,
                                         const StabilizationPolicy& pol = {});

// Base-changes an E_L-module to the perfection truncation, recomputes the
// dims, and verifies the acyclicity driver: (phi-1) is bijective on the
// fractional quotient, checked by the depth-recursion solver on seeded
// targets with exact substitution residuals.
struct CompareRingsResult {
    CohomologyReport over_el;
    CohomologyReport over_perf;
    Report report;
};
CompareRingsResult compare_herr_across_rings(const PhiGammaModule& M, int perf_level,
                                             std::uint64_t seed, int solver_samples,
                                             const StabilizationPolicy& pol = {});

}  // namespace phigamma

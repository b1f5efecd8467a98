#pragma once

#include "phigamma/power_series.hpp"

namespace phigamma {

// The Frobenius power series f(Z) = pi_L Z + Z^q fixed by this artifact,
// truncated to (pi^m, Z^N).
PowerSeries lt_frobenius_series(const LocalFieldPtr& F, std::int64_t N, int m);

// The unique F(X,Y) = X + Y + (deg >= 2) with f(F(X,Y)) = F(f(X), f(Y))
// mod (pi^m, total degree N), found degree by degree. `shuffle_seed`
// permutes the per-degree solve order; the result must not depend on it.
BivariateSeries lt_group_law(const LocalFieldPtr& F, std::int64_t N, int m,
                             std::uint64_t shuffle_seed = 0);

// The unique [a](Z) = aZ + (deg >= 2) with f([a]) = [a](f) mod (pi^m, Z^N).
PowerSeries lt_mult_by(const OLElement& a, std::int64_t N, int m);
PowerSeries lt_mult_by_int(const LocalFieldPtr& F, std::int64_t a, std::int64_t N, int m);

// Formal-group addition F(x, y) of two series with zero constant term, and
// plain composition g(h).
PowerSeries lt_add(const PowerSeries& x, const PowerSeries& y, const BivariateSeries& law);
PowerSeries lt_compose(const PowerSeries& g, const PowerSeries& h);

}  // namespace phigamma

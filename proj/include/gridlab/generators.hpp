#pragma once

// Deterministic instance generators for the property suites. Everything is
// driven by an explicit Rng, and rational-valued instances use small fixed
// denominators so exact-mode audits stay cheap.

#include <vector>

#include "gridlab/grid.hpp"
#include "gridlab/rng.hpp"
#include "gridlab/scalar.hpp"

namespace gridlab {

// entries uniform in {lo, lo+1, ..., hi} / denom
template <class R>
std::vector<R> random_vector(Rng& rng, int n, long long lo, long long hi, long long denom) {
  std::vector<R> v(static_cast<size_t>(n));
  for (auto& x : v)
    x = make_ratio<R>(lo + static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(hi - lo + 1))), denom);
  return v;
}

template <class R>
Grid2<R> random_grid2(Rng& rng, int nx, int ny, long long lo, long long hi, long long denom) {
  Grid2<R> g(nx, ny);
  for (R& x : g.data())
    x = make_ratio<R>(lo + static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(hi - lo + 1))), denom);
  return g;
}

template <class R>
Grid2<R> random_grid01(Rng& rng, int nx, int ny, double density) {
  Grid2<R> g(nx, ny);
  for (R& x : g.data()) x = rng.next_double() < density ? R(1) : R(0);
  return g;
}

inline Grid3Indicator random_indicator(Rng& rng, const Dims& d, double density) {
  Grid3Indicator F(d.nx, d.ny, d.nz);
  for (auto& b : F.b) b = rng.next_double() < density ? 1 : 0;
  return F;
}

inline BitGrid2 random_bitgrid(Rng& rng, int n0, int n1, double density) {
  BitGrid2 g(n0, n1);
  for (auto& b : g.b) b = rng.next_double() < density ? 1 : 0;
  return g;
}

inline CylinderIntersection random_ci(Rng& rng, const Dims& d, double faceDensity) {
  return CylinderIntersection(random_bitgrid(rng, d.nx, d.ny, faceDensity),
                              random_bitgrid(rng, d.nx, d.nz, faceDensity),
                              random_bitgrid(rng, d.ny, d.nz, faceDensity));
}

template <class R>
DensityFunction<R> random_density(Rng& rng, const Dims& d, long long denom) {
  DensityFunction<R> p(d);
  R total(0);
  for (R& x : p.p) {
    x = make_ratio<R>(1 + static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(denom))), denom);
    total += x;
  }
  R mean = total / R(d.cells());
  for (R& x : p.p) x /= mean;  // normalize to E = 1
  return p;
}

template <class R>
DensityFunction<R> uniform_density_on_set(const Grid3Indicator& S) {
  DensityFunction<R> p(S.dims());
  long long sz = S.count();
  if (sz == 0) throw DegenerateError("uniform_density_on_set: empty support");
  R v = make_ratio<R>(S.dims().cells(), sz);
  for (long long i = 0; i < S.dims().cells(); ++i)
    if (S.b[static_cast<size_t>(i)]) p.p[static_cast<size_t>(i)] = v;
  return p;
}

}  // namespace gridlab

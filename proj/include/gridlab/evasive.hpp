#pragma once

// Prime-field inner products, the explicit hard set
//   D(x,y,z) = 1[<x,y> = <x,z> = <y,z>]  over F_q^k,
// and exact evasiveness measurement against slice functions: the largest
// ratio E_{w~D}[s(w)] / E_{w~U}[s(w)] over slices of density >= 2^-d.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "gridlab/errors.hpp"
#include "gridlab/grid.hpp"
#include "gridlab/scalar.hpp"

namespace gridlab {

struct PrimeField {
  std::uint32_t q;

  explicit PrimeField(std::uint32_t q_) : q(q_) {
    if (q < 2) throw DomainError("PrimeField: modulus must be >= 2");
    for (std::uint32_t d = 2; d * d <= q; ++d)
      if (q % d == 0) throw DomainError("PrimeField: " + std::to_string(q) + " is not prime");
  }

  std::uint32_t add(std::uint32_t a, std::uint32_t b) const { return (a + b) % q; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) % q);
  }
};

using FieldVector = std::vector<std::uint32_t>;

// [N] <-> F_q^k via base-q digits, least significant first.
inline FieldVector index_to_vector(const PrimeField& f, int k, long long idx) {
  FieldVector v(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    v[static_cast<size_t>(i)] = static_cast<std::uint32_t>(idx % f.q);
    idx /= f.q;
  }
  if (idx != 0) throw DomainError("index_to_vector: index out of range");
  return v;
}

inline long long vector_to_index(const PrimeField& f, const FieldVector& v) {
  long long idx = 0;
  for (size_t i = v.size(); i-- > 0;) {
    if (v[i] >= f.q) throw DomainError("vector_to_index: coordinate out of field");
    idx = idx * f.q + v[i];
  }
  return idx;
}

inline std::uint32_t inner_product(const PrimeField& f, const FieldVector& a, const FieldVector& b) {
  if (a.size() != b.size()) throw DimensionError("inner_product: length mismatch");
  std::uint32_t s = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] >= f.q || b[i] >= f.q) throw DomainError("inner_product: coordinate out of field");
    s = f.add(s, f.mul(a[i], b[i]));
  }
  return s;
}

// D = { (x,y,z) : <x,y> = <x,z> = <y,z> } over [N]^3 with N = q^k.
inline Grid3Indicator build_D(const PrimeField& f, int k, long long cellCap = 1ll << 20,
                              long long axisCap = 1ll << 10) {
  if (k < 1) throw DomainError("build_D: requires k >= 1");
  long long N = 1;
  for (int i = 0; i < k; ++i) {
    N *= f.q;
    if (N > axisCap) throw ResourceError("build_D: q^k exceeds the per-axis cap");
  }
  if (N * N * N > cellCap) throw ResourceError("build_D: N^3 exceeds the cell cap");
  std::vector<FieldVector> vecs(static_cast<size_t>(N));
  for (long long i = 0; i < N; ++i) vecs[static_cast<size_t>(i)] = index_to_vector(f, k, i);
  std::vector<std::uint32_t> ip(static_cast<size_t>(N) * static_cast<size_t>(N));
  for (long long a = 0; a < N; ++a)
    for (long long b = 0; b < N; ++b)
      ip[static_cast<size_t>(a * N + b)] =
          inner_product(f, vecs[static_cast<size_t>(a)], vecs[static_cast<size_t>(b)]);
  Grid3Indicator D(static_cast<int>(N), static_cast<int>(N), static_cast<int>(N));
  for (long long x = 0; x < N; ++x)
    for (long long y = 0; y < N; ++y) {
      std::uint32_t xy = ip[static_cast<size_t>(x * N + y)];
      for (long long z = 0; z < N; ++z) {
        std::uint32_t xz = ip[static_cast<size_t>(x * N + z)];
        if (xy != xz) continue;
        if (xz == ip[static_cast<size_t>(y * N + z)])
          D.at(static_cast<int>(x), static_cast<int>(y), static_cast<int>(z)) = 1;
      }
    }
  return D;
}

template <class R>
struct EvasivenessReport {
  int dFloorExp = 0;
  bool found = false;       // some slice met the floor
  bool exact = false;       // point axes were within the enumeration cap
  R maxRatio{};             // max E_D[s]/E_U[s] over slices of density >= 2^-d
  double kPrime = 0;        // log2(maxRatio)
  SliceFunction worstSlice;
};

namespace detail {

// Smallest pair count m with m * qsize >= cells / 2^d.
inline long long min_pairs_for_floor(long long cells, int dExp, long long qsize) {
  if (dExp >= 62) return 1;
  long long denom = qsize << dExp;
  if (denom <= 0 || denom >= cells) return 1;
  return (cells + denom - 1) / denom;
}

}  // namespace detail

// E_{w~p}[s] / E_{w~U}[s] maximized over slices of density >= 2^-d, for a
// density p (E_Omega[p] = 1). Exact: point-set subsets are enumerated; for
// each point set and each pair count m the ratio-maximal pair set is the
// top-m prefix by per-pair mass.
template <class R>
EvasivenessReport<R> evasiveness_measure(const std::vector<R>& density, const Dims& dims,
                                         int dFloorExp, int pointAxisCap = 16) {
  if (static_cast<long long>(density.size()) != dims.cells())
    throw DimensionError("evasiveness_measure: density size mismatch");
  long long cells = dims.cells();
  EvasivenessReport<R> rep;
  rep.dFloorExp = dFloorExp;
  struct BestLoc {
    Orientation o;
    std::uint32_t mask;
    long long m;
  } bestLoc{Orientation::XY_Z, 0, 0};
  bool have = false;
  R bestNum{}, bestDen{};  // ratio as bestNum / bestDen, bestNum = prefix mass, bestDen = m * |Q|
  for (Orientation o : {Orientation::XY_Z, Orientation::YZ_X, Orientation::XZ_Y}) {
    auto [nPairs, nPts] = SliceFunction::pair_point_counts(dims, o);
    if (nPts > pointAxisCap)
      throw ResourceError("evasiveness_measure: point axis exceeds the enumeration cap");
    std::vector<R> mass(static_cast<size_t>(nPairs));
    std::vector<int> order(static_cast<size_t>(nPairs));
    for (std::uint32_t mask = 1; mask < (1u << nPts); ++mask) {
      long long qsize = __builtin_popcount(mask);
      long long mMin = detail::min_pairs_for_floor(cells, dFloorExp, qsize);
      if (mMin > nPairs) continue;
      for (int pr = 0; pr < nPairs; ++pr) {
        R s(0);
        for (int pt = 0; pt < nPts; ++pt)
          if (mask & (1u << pt))
            s += density[static_cast<size_t>(SliceFunction::cell_of(dims, o, pr, pt))];
        mass[static_cast<size_t>(pr)] = s;
      }
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return mass[static_cast<size_t>(a)] > mass[static_cast<size_t>(b)];
      });
      R prefix(0);
      for (long long m = 1; m <= nPairs; ++m) {
        prefix += mass[static_cast<size_t>(order[static_cast<size_t>(m - 1)])];
        if (m < mMin) continue;
        R den = R(m * qsize);
        // prefix/den > bestNum/bestDen, cross-multiplied
        if (!have || prefix * bestDen > bestNum * den) {
          have = true;
          bestNum = prefix;
          bestDen = den;
          bestLoc = {o, mask, m};
        }
      }
    }
  }
  rep.exact = true;
  rep.found = have;
  if (!have) return rep;
  rep.maxRatio = bestNum / bestDen;
  rep.kPrime = rep.maxRatio == R(0) ? 0.0 : log2_approx(rep.maxRatio);
  // rebuild the maximizing slice
  auto [nPairs, nPts] = SliceFunction::pair_point_counts(dims, bestLoc.o);
  std::vector<R> mass(static_cast<size_t>(nPairs));
  for (int pr = 0; pr < nPairs; ++pr) {
    R s(0);
    for (int pt = 0; pt < nPts; ++pt)
      if (bestLoc.mask & (1u << pt))
        s += density[static_cast<size_t>(SliceFunction::cell_of(dims, bestLoc.o, pr, pt))];
    mass[static_cast<size_t>(pr)] = s;
  }
  std::vector<int> order(static_cast<size_t>(nPairs));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return mass[static_cast<size_t>(a)] > mass[static_cast<size_t>(b)];
  });
  rep.worstSlice.axis = bestLoc.o;
  rep.worstSlice.pairs.assign(order.begin(), order.begin() + bestLoc.m);
  std::sort(rep.worstSlice.pairs.begin(), rep.worstSlice.pairs.end());
  for (int pt = 0; pt < nPts; ++pt)
    if (bestLoc.mask & (1u << pt)) rep.worstSlice.points.push_back(pt);
  return rep;
}

// Ratio of a single slice under a density; re-evaluation hook for witnesses.
template <class R>
R slice_mass_ratio(const std::vector<R>& density, const Dims& dims, const SliceFunction& s) {
  R mass(0);
  for (int pr : s.pairs)
    for (int pt : s.points)
      mass += density[static_cast<size_t>(SliceFunction::cell_of(dims, s.axis, pr, pt))];
  return mass / R(s.size());
}

template <class R>
std::vector<R> uniform_density_on(const Grid3Indicator& D) {
  long long sz = D.count();
  if (sz == 0) throw DegenerateError("uniform_density_on: empty set");
  std::vector<R> p(static_cast<size_t>(D.dims().cells()), R(0));
  R v = make_ratio<R>(D.dims().cells(), sz);
  for (long long i = 0; i < D.dims().cells(); ++i)
    if (D.b[static_cast<size_t>(i)]) p[static_cast<size_t>(i)] = v;
  return p;
}

// Evasiveness of a set: the uniform distribution over D.
template <class R>
EvasivenessReport<R> evasiveness_audit(const Grid3Indicator& D, int dFloorExp,
                                       int pointAxisCap = 16) {
  return evasiveness_measure<R>(uniform_density_on<R>(D), D.dims(), dFloorExp, pointAxisCap);
}

}  // namespace gridlab

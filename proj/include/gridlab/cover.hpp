#pragma once

// Slice-function covers: the fractional cover LP solved by column
// generation with an exact pricing oracle, its dual packing, randomized
// rounding to an integral cover, the removal-lemma pipeline, and the
// constructive largeness certificate (subcube maximization, face
// marginals, truncation/min-degree conditioning, product lower bound).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gridlab/errors.hpp"
#include "gridlab/evasive.hpp"
#include "gridlab/grid.hpp"
#include "gridlab/norms.hpp"
#include "gridlab/rng.hpp"
#include "gridlab/scalar.hpp"
#include "gridlab/simplex.hpp"
#include "gridlab/spread.hpp"

namespace gridlab {

template <class R>
R slice_weight(const SliceFunction& s, const Dims& d) {
  return slice_density<R>(s, d);
}

// --- pricing ---

template <class R>
struct PricingResult {
  bool found = false;
  SliceFunction slice;
  R reducedCost{};  // w(s) - sum_{w in s} y_w / |Omega|
};

// Minimizes w(s) - sum_{w in s} y_w/|Omega| over slices of density >= floor.
// For a fixed point set Q each pair contributes (|Q| - sum_{pt in Q} y)/|Omega|
// independently, so the optimal pair set of every cardinality is a prefix of
// the pairs sorted by mass; the floor only forces a minimum cardinality.
// Ties break toward the earliest orientation/mask/cardinality scanned.
template <class R>
PricingResult<R> pricing_oracle(const std::vector<R>& y, const Dims& dims, const R& floorDensity,
                                int pointAxisCap = 16) {
  long long cells = dims.cells();
  if (static_cast<long long>(y.size()) != cells)
    throw DimensionError("pricing_oracle: value vector size mismatch");
  for (const R& v : y)
    if (v < R(0)) throw DomainError("pricing_oracle: negative value");
  PricingResult<R> out;
  struct Loc {
    Orientation o;
    std::uint32_t mask;
    long long m;
  } bestLoc{Orientation::XY_Z, 0, 0};
  R bestScaled{};  // reducedCost * |Omega|
  for (Orientation o : {Orientation::XY_Z, Orientation::YZ_X, Orientation::XZ_Y}) {
    auto [nPairs, nPts] = SliceFunction::pair_point_counts(dims, o);
    if (nPts > pointAxisCap)
      throw ResourceError("pricing_oracle: point axis exceeds the enumeration cap");
    std::vector<R> mass(static_cast<size_t>(nPairs));
    std::vector<int> order(static_cast<size_t>(nPairs));
    for (std::uint32_t mask = 1; mask < (1u << nPts); ++mask) {
      long long qsize = __builtin_popcount(mask);
      long long mMin = std::max<long long>(1, ceil_to_ll(floorDensity * R(cells) / R(qsize)));
      if (mMin > nPairs) continue;
      for (int pr = 0; pr < nPairs; ++pr) {
        R s(0);
        for (int pt = 0; pt < nPts; ++pt)
          if (mask & (1u << pt))
            s += y[static_cast<size_t>(SliceFunction::cell_of(dims, o, pr, pt))];
        mass[static_cast<size_t>(pr)] = s;
      }
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return mass[static_cast<size_t>(a)] > mass[static_cast<size_t>(b)];
      });
      R acc(0);
      for (long long m = 1; m <= nPairs; ++m) {
        acc += R(qsize) - mass[static_cast<size_t>(order[static_cast<size_t>(m - 1)])];
        if (m < mMin) continue;
        if (!out.found || acc < bestScaled) {
          out.found = true;
          bestScaled = acc;
          bestLoc = {o, mask, m};
        }
      }
    }
  }
  if (!out.found) return out;
  out.reducedCost = bestScaled / R(cells);
  auto [nPairs, nPts] = SliceFunction::pair_point_counts(dims, bestLoc.o);
  std::vector<R> mass(static_cast<size_t>(nPairs));
  for (int pr = 0; pr < nPairs; ++pr) {
    R s(0);
    for (int pt = 0; pt < nPts; ++pt)
      if (bestLoc.mask & (1u << pt))
        s += y[static_cast<size_t>(SliceFunction::cell_of(dims, bestLoc.o, pr, pt))];
    mass[static_cast<size_t>(pr)] = s;
  }
  std::vector<int> order(static_cast<size_t>(nPairs));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return mass[static_cast<size_t>(a)] > mass[static_cast<size_t>(b)];
  });
  out.slice.axis = bestLoc.o;
  out.slice.pairs.assign(order.begin(), order.begin() + bestLoc.m);
  std::sort(out.slice.pairs.begin(), out.slice.pairs.end());
  for (int pt = 0; pt < nPts; ++pt)
    if (bestLoc.mask & (1u << pt)) out.slice.points.push_back(pt);
  return out;
}

// --- fractional cover / dual packing ---

struct ColGenConfig {
  long iterationCap = 4000;
  long pivotCap = 1 << 20;
  int pointAxisCap = 16;
  double tol = 1e-9;  // float-mode reduced-cost and duality slack
};

template <class R>
struct FractionalCover {
  Dims dims;
  std::vector<SliceFunction> slices;  // positive-coefficient columns
  std::vector<R> coeffs;
  R value{};
  R floorDensity{};
  bool optimal = false;  // pricing certified all reduced costs >= 0
  R lastReducedCost{};
  long iterations = 0;
  long columnsGenerated = 0;
  std::vector<R> duals;  // density-scale y on all of Omega, zero off support
  R dualObjective{};
};

template <class R>
struct DualPacking {
  DensityFunction<R> p;  // supported on F; sum_{w in s} p(w)/|Omega| <= w(s)
  R objective{};
};

template <class R>
FractionalCover<R> solve_fractional_cover(const Grid3Indicator& F, const R& floorDensity,
                                          const ColGenConfig& cfg = {}) {
  Dims dims = F.dims();
  long long cells = dims.cells();
  FractionalCover<R> out;
  out.dims = dims;
  out.floorDensity = floorDensity;
  out.duals.assign(static_cast<size_t>(cells), R(0));
  if (floorDensity > R(1))
    throw DegenerateError("solve_fractional_cover: no slice meets the floor");
  std::vector<long long> support;
  for (long long i = 0; i < cells; ++i)
    if (F.b[static_cast<size_t>(i)]) support.push_back(i);
  if (support.empty()) {
    out.optimal = true;
    return out;
  }
  int m = static_cast<int>(support.size());
  std::vector<std::array<int, 3>> coords(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    long long c = support[static_cast<size_t>(i)];
    coords[static_cast<size_t>(i)] = {static_cast<int>(c / (dims.ny * dims.nz)),
                                      static_cast<int>((c / dims.nz) % dims.ny),
                                      static_cast<int>(c % dims.nz)};
  }
  CoveringSimplex<R> lp(std::vector<R>(static_cast<size_t>(m), R(1)));
  std::vector<SliceFunction> columns;
  auto add_slice = [&](const SliceFunction& s) {
    std::vector<R> col(static_cast<size_t>(m), R(0));
    for (int i = 0; i < m; ++i) {
      auto& xyz = coords[static_cast<size_t>(i)];
      if (s.contains(dims, xyz[0], xyz[1], xyz[2])) col[static_cast<size_t>(i)] = R(1);
    }
    lp.add_column(col, slice_weight<R>(s, dims));
    columns.push_back(s);
  };
  add_slice(SliceFunction::all_of(dims));
  for (long iter = 0; iter < cfg.iterationCap; ++iter) {
    ++out.iterations;
    auto st = lp.solve(cfg.pivotCap);
    if (st != CoveringSimplex<R>::Status::Optimal)
      throw Error("solve_fractional_cover: master LP did not reach optimality");
    auto pi = lp.duals();
    std::fill(out.duals.begin(), out.duals.end(), R(0));
    for (int i = 0; i < m; ++i)
      out.duals[static_cast<size_t>(support[static_cast<size_t>(i)])] =
          pi[static_cast<size_t>(i)] * R(cells);
    auto priced = pricing_oracle(out.duals, dims, floorDensity, cfg.pointAxisCap);
    if (!priced.found) throw DegenerateError("solve_fractional_cover: no slice meets the floor");
    out.lastReducedCost = priced.reducedCost;
    bool done;
    if constexpr (is_exact_v<R>) done = priced.reducedCost >= R(0);
    else done = priced.reducedCost >= -cfg.tol;
    if (done) {
      out.optimal = true;
      break;
    }
    add_slice(priced.slice);
  }
  out.columnsGenerated = lp.columns();
  out.value = lp.objective();
  auto x = lp.primal();
  for (size_t j = 0; j < columns.size(); ++j) {
    if (x[j] > R(0)) {
      out.slices.push_back(columns[j]);
      out.coeffs.push_back(x[j]);
    }
  }
  R dualObj(0);
  for (const R& v : out.duals) dualObj += v;
  out.dualObjective = dualObj / R(cells);
  return out;
}

template <class R>
DualPacking<R> solve_dual_packing(const Grid3Indicator& F, const R& floorDensity,
                                  const ColGenConfig& cfg = {}) {
  auto fc = solve_fractional_cover(F, floorDensity, cfg);
  DualPacking<R> out;
  out.p = DensityFunction<R>(F.dims());
  out.p.p = fc.duals;
  out.objective = fc.dualObjective;
  return out;
}

// Pointwise check sum_i c_i s_i(w) >= 1 for every w with F(w) = 1.
template <class R>
bool fractional_cover_valid(const FractionalCover<R>& fc, const Grid3Indicator& F,
                            double tol = kDefaultTol) {
  Dims dims = F.dims();
  std::vector<R> covered(static_cast<size_t>(dims.cells()), R(0));
  for (size_t j = 0; j < fc.slices.size(); ++j) {
    const auto& s = fc.slices[j];
    for (int pr : s.pairs)
      for (int pt : s.points)
        covered[static_cast<size_t>(SliceFunction::cell_of(dims, s.axis, pr, pt))] += fc.coeffs[j];
  }
  for (long long i = 0; i < dims.cells(); ++i)
    if (F.b[static_cast<size_t>(i)] && !geq(covered[static_cast<size_t>(i)], R(1), tol)) return false;
  return true;
}

// --- randomized rounding ---

template <class R>
struct IntegralCover {
  std::vector<SliceFunction> slices;  // distinct drawn slices
  R measure{};                        // sum of their weights, E[F']
  bool valid = false;
  int draws = 0;
  int attempts = 0;
  std::vector<long long> uncovered;   // cells of F missed by the last attempt
};

// Draw ceil(C ln(|Omega|/failProb) sum c) slices i.i.d. with probability
// c_i / sum c; retry on a miss up to retryCap attempts.
template <class R>
IntegralCover<R> round_cover(const FractionalCover<R>& fc, const Grid3Indicator& F,
                             double failProb, Rng& rng, double samplingConstant = 2.0,
                             int retryCap = 8) {
  if (failProb <= 0 || failProb >= 1) throw DomainError("round_cover: failProb must be in (0,1)");
  Dims dims = F.dims();
  long long cells = dims.cells();
  IntegralCover<R> out;
  if (F.count() == 0) {
    out.valid = true;
    return out;
  }
  if (!fractional_cover_valid(fc, F))
    throw DomainError("round_cover: input does not cover F fractionally");
  R total(0);
  for (const R& c : fc.coeffs) total += c;
  std::vector<double> cum(fc.coeffs.size());
  double acc = 0, totalD = to_double(total);
  for (size_t i = 0; i < fc.coeffs.size(); ++i) {
    acc += to_double(fc.coeffs[i]) / totalD;
    cum[i] = acc;
  }
  cum.back() = 1.0;
  int draws = static_cast<int>(std::ceil(samplingConstant *
                                         std::log(static_cast<double>(cells) / failProb) *
                                         totalD));
  out.draws = std::max(draws, 1);
  for (int attempt = 0; attempt < retryCap; ++attempt) {
    ++out.attempts;
    std::set<size_t> chosen;
    for (int t = 0; t < out.draws; ++t) {
      double u = rng.next_double();
      size_t idx = static_cast<size_t>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
      if (idx >= cum.size()) idx = cum.size() - 1;
      chosen.insert(idx);
    }
    std::vector<std::uint8_t> covered(static_cast<size_t>(cells), 0);
    for (size_t j : chosen) {
      const auto& s = fc.slices[j];
      for (int pr : s.pairs)
        for (int pt : s.points)
          covered[static_cast<size_t>(SliceFunction::cell_of(dims, s.axis, pr, pt))] = 1;
    }
    out.uncovered.clear();
    for (long long i = 0; i < cells; ++i)
      if (F.b[static_cast<size_t>(i)] && !covered[static_cast<size_t>(i)]) out.uncovered.push_back(i);
    out.slices.clear();
    out.measure = R(0);
    for (size_t j : chosen) {
      out.slices.push_back(fc.slices[j]);
      out.measure += slice_weight<R>(fc.slices[j], dims);
    }
    if (out.uncovered.empty()) {
      out.valid = true;
      break;
    }
  }
  return out;
}

// --- removal lemma pipeline ---

template <class R>
struct RemovalReport {
  AuditStatus status = AuditStatus::Pass;
  int d = 0;
  int floorExp = 0;
  R inputDensity{};         // E[F]
  FractionalCover<R> cover;
  IntegralCover<R> rounded;
  R coverDensity{};         // E[F'] = total measure of the integral cover
  int sliceCount = 0;
  R minSliceDensity{};
  double shapeDensityRef = 0;  // 2^{-sqrt(d)} log2|Omega|, for comparison only
  double shapeSizeRef = 0;     // 2^{-C_f d}, the floor actually enforced
  std::string note;
};

// E[F] <= 2^-d: fractional cover at floor 2^{-C_f d}, then rounding. The
// quantities the cover theorem bounds are reported as measured values.
template <class R>
RemovalReport<R> removal_lemma(const CylinderIntersection& F, int d, Rng& rng,
                               double floorConstant = 3.0, double failProb = 0.1,
                               const ColGenConfig& cfg = {}) {
  RemovalReport<R> rep;
  rep.d = d;
  Grid3Indicator ind = F.to_indicator();
  rep.inputDensity = expectation<R>(ind);
  if (d < 0 || rep.inputDensity > pow2<R>(-d)) {
    rep.status = AuditStatus::HypothesisUnmet;
    rep.note = "E[F] above 2^-d";
    return rep;
  }
  rep.floorExp = static_cast<int>(std::ceil(floorConstant * d));
  R floorDensity = pow2<R>(-std::max(rep.floorExp, 0));
  rep.cover = solve_fractional_cover(ind, floorDensity, cfg);
  rep.rounded = round_cover(rep.cover, ind, failProb, rng);
  rep.coverDensity = rep.rounded.measure;
  rep.sliceCount = static_cast<int>(rep.rounded.slices.size());
  rep.minSliceDensity = R(1);
  for (const auto& s : rep.rounded.slices)
    rep.minSliceDensity = std::min(rep.minSliceDensity, slice_weight<R>(s, ind.dims()));
  rep.shapeDensityRef = std::exp2(-std::sqrt(static_cast<double>(d))) *
                        std::log2(static_cast<double>(ind.dims().cells()));
  rep.shapeSizeRef = std::exp2(static_cast<double>(-rep.floorExp));
  rep.status = rep.rounded.valid ? AuditStatus::Pass : AuditStatus::Fail;
  if (!rep.rounded.valid) rep.note = "rounding failed to cover F within the retry cap";
  return rep;
}

// --- subcube maximization ---

template <class R>
struct SubcubeResult {
  SubCube cube;
  Powered<R> phiPow;  // Phi(C)^t = (E_{w~C}[p])^t * |C|/|Omega|
  double phi = 0;
  bool exact = false;
};

namespace detail {

template <class R>
struct CubeKey {
  R powered{};
  double logv = -1e300;
  bool valid = false;

  static CubeKey make(const R& condMean, long long sz, long long cells, long t) {
    CubeKey k;
    k.valid = true;
    if constexpr (is_exact_v<R>) {
      k.powered = pow_nonneg(condMean, t) * make_ratio<R>(sz, cells);
    } else {
      k.logv = condMean <= 0 ? -1e300
                             : t * std::log2(condMean) +
                                   std::log2(static_cast<double>(sz) / static_cast<double>(cells));
      k.powered = condMean;
    }
    return k;
  }
  bool better_than(const CubeKey& o) const {
    if (!o.valid) return valid;
    if (!valid) return false;
    if constexpr (is_exact_v<R>) return powered > o.powered;
    else return logv > o.logv;
  }
};

inline std::vector<int> mask_to_indices(std::uint32_t mask, int n) {
  std::vector<int> v;
  for (int i = 0; i < n; ++i)
    if (mask & (1u << i)) v.push_back(i);
  return v;
}

}  // namespace detail

// Maximize Phi(C) = E_{w~C}[p] (|C|/|Omega|)^{1/t} over subcubes of density
// >= floor. Exact by axis-subset enumeration when 2^(nx+ny+nz) fits the
// cap; otherwise coordinate-wise sorted-prefix ascent from several starts.
// Phi(Omega) = 1 is always a candidate, so the result is >= 1.
template <class R>
SubcubeResult<R> subcube_maximize(const DensityFunction<R>& p, long t, const R& floorDensity,
                                  long long enumCap = 1ll << 12, int restarts = 8,
                                  Rng* rng = nullptr) {
  const Dims& dims = p.dim;
  long long cells = dims.cells();
  if (t < 1) throw DomainError("subcube_maximize: requires t >= 1");
  if (floorDensity > R(1)) throw DomainError("subcube_maximize: floor above 1");
  SubcubeResult<R> out;
  auto cube_sum = [&](const std::vector<int>& sx, const std::vector<int>& sy,
                      const std::vector<int>& sz) {
    R s(0);
    for (int x : sx)
      for (int y : sy)
        for (int z : sz) s += p.at(x, y, z);
    return s;
  };
  detail::CubeKey<R> best;
  SubCube bestCube;
  auto consider = [&](const std::vector<int>& sx, const std::vector<int>& sy,
                      const std::vector<int>& sz) {
    long long sz3 = static_cast<long long>(sx.size()) * sy.size() * sz.size();
    if (R(sz3) < floorDensity * R(cells)) return;
    R condMean = cube_sum(sx, sy, sz) / R(sz3);
    auto key = detail::CubeKey<R>::make(condMean, sz3, cells, t);
    if (key.better_than(best)) {
      best = key;
      bestCube = SubCube{sx, sy, sz};
    }
  };
  long long total = 1ll << (dims.nx + dims.ny + dims.nz > 62 ? 62 : dims.nx + dims.ny + dims.nz);
  if (dims.nx + dims.ny + dims.nz <= 62 && total <= enumCap) {
    out.exact = true;
    for (std::uint32_t mx = 1; mx < (1u << dims.nx); ++mx) {
      auto sx = detail::mask_to_indices(mx, dims.nx);
      for (std::uint32_t my = 1; my < (1u << dims.ny); ++my) {
        auto sy = detail::mask_to_indices(my, dims.ny);
        for (std::uint32_t mz = 1; mz < (1u << dims.nz); ++mz)
          consider(sx, sy, detail::mask_to_indices(mz, dims.nz));
      }
    }
  } else {
    out.exact = false;
    Rng local(rng ? rng->next_u64() : 0);
    auto full = SubCube::full(dims);
    for (int start = 0; start <= restarts; ++start) {
      SubCube cur = full;
      if (start > 0) {
        auto pick = [&](int n) {
          std::vector<int> v;
          for (int i = 0; i < n; ++i)
            if (local.next_bool()) v.push_back(i);
          if (v.empty()) v.push_back(static_cast<int>(local.next_below(static_cast<std::uint64_t>(n))));
          return v;
        };
        cur = SubCube{pick(dims.nx), pick(dims.ny), pick(dims.nz)};
      }
      detail::CubeKey<R> local_best;
      {
        long long sz3 = cur.cells();
        if (R(sz3) >= floorDensity * R(cells)) {
          R condMean = cube_sum(cur.sx, cur.sy, cur.sz) / R(sz3);
          local_best = detail::CubeKey<R>::make(condMean, sz3, cells, t);
        }
      }
      for (int round = 0; round < 16; ++round) {
        bool improved = false;
        for (int axis = 0; axis < 3; ++axis) {
          int n = axis == 0 ? dims.nx : axis == 1 ? dims.ny : dims.nz;
          const std::vector<int>& a = axis == 0 ? cur.sy : cur.sx;
          const std::vector<int>& b = axis == 2 ? cur.sy : cur.sz;
          // marginal mean per index on this axis over the other two sets
          std::vector<R> marg(static_cast<size_t>(n), R(0));
          for (int i = 0; i < n; ++i) {
            R s(0);
            for (int u : a)
              for (int v : b) {
                if (axis == 0) s += p.at(i, u, v);
                else if (axis == 1) s += p.at(u, i, v);
                else s += p.at(u, v, i);
              }
            marg[static_cast<size_t>(i)] = s;
          }
          std::vector<int> order(static_cast<size_t>(n));
          std::iota(order.begin(), order.end(), 0);
          std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
            return marg[static_cast<size_t>(i)] > marg[static_cast<size_t>(j)];
          });
          long long others = static_cast<long long>(a.size()) * b.size();
          R prefix(0);
          detail::CubeKey<R> axisBest;
          int axisBestSize = 0;
          for (int s = 1; s <= n; ++s) {
            prefix += marg[static_cast<size_t>(order[static_cast<size_t>(s - 1)])];
            long long sz3 = s * others;
            if (R(sz3) < floorDensity * R(cells)) continue;
            auto key = detail::CubeKey<R>::make(prefix / R(sz3), sz3, cells, t);
            if (key.better_than(axisBest)) {
              axisBest = key;
              axisBestSize = s;
            }
          }
          if (axisBest.better_than(local_best)) {
            local_best = axisBest;
            std::vector<int> chosen(order.begin(), order.begin() + axisBestSize);
            std::sort(chosen.begin(), chosen.end());
            (axis == 0 ? cur.sx : axis == 1 ? cur.sy : cur.sz) = std::move(chosen);
            improved = true;
          }
        }
        if (!improved) break;
      }
      if (local_best.better_than(best)) {
        best = local_best;
        bestCube = cur;
      }
    }
  }
  out.cube = bestCube;
  if constexpr (is_exact_v<R>) {
    out.phiPow = {best.powered, t};
    out.phi = out.phiPow.approx();
  } else {
    out.phi = std::exp2(best.logv / static_cast<double>(t));
    out.phiPow = {out.phi, 1};
  }
  return out;
}

// --- faces, truncation, certificate ---

template <class R>
struct Faces {
  SubCube cube;
  R cubeMass{};     // E_{w~C}[p]
  Grid2<R> f;       // |sx| x |sy|, mean exactly 1
  Grid2<R> g;       // |sx| x |sz|
  Grid2<R> h;       // |sy| x |sz|
};

// Condition p on the cube and project onto the three two-marginals.
template <class R>
Faces<R> build_faces(const DensityFunction<R>& p, const SubCube& cube) {
  if (!cube.valid()) throw DimensionError("build_faces: empty cube");
  Faces<R> out;
  out.cube = cube;
  int a = static_cast<int>(cube.sx.size()), b = static_cast<int>(cube.sy.size()),
      c = static_cast<int>(cube.sz.size());
  R mass(0);
  for (int x : cube.sx)
    for (int y : cube.sy)
      for (int z : cube.sz) mass += p.at(x, y, z);
  mass /= R(cube.cells());
  if (mass == R(0)) throw DegenerateError("build_faces: zero mass on the cube");
  out.cubeMass = mass;
  out.f = Grid2<R>(a, b);
  out.g = Grid2<R>(a, c);
  out.h = Grid2<R>(b, c);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) {
      R s(0);
      for (int z : cube.sz) s += p.at(cube.sx[static_cast<size_t>(i)], cube.sy[static_cast<size_t>(j)], z);
      out.f.at(i, j) = s / (R(c) * mass);
    }
  for (int i = 0; i < a; ++i)
    for (int k = 0; k < c; ++k) {
      R s(0);
      for (int y : cube.sy) s += p.at(cube.sx[static_cast<size_t>(i)], y, cube.sz[static_cast<size_t>(k)]);
      out.g.at(i, k) = s / (R(b) * mass);
    }
  for (int j = 0; j < b; ++j)
    for (int k = 0; k < c; ++k) {
      R s(0);
      for (int x : cube.sx) s += p.at(x, cube.sy[static_cast<size_t>(j)], cube.sz[static_cast<size_t>(k)]);
      out.h.at(j, k) = s / (R(a) * mass);
    }
  return out;
}

template <class R>
struct TruncationResult {
  Grid2<R> f, g, h;            // rescaled to mean 1 on the pruned domain
  std::vector<int> keptRows;   // indices into cube.sx
  std::vector<int> keptCols;   // indices into cube.sz
  R removedMassF{}, removedMassG{}, removedMassH{};  // l1 mass capped away
  int prunedRows = 0, prunedCols = 0;
  R scaleF{}, scaleG{}, scaleH{};
};

// Step 1: cap entries at 2^t. Step 2: drop x-rows of f and z-columns of h
// whose means fall below (1-eps) of the face mean. Step 3: rescale each
// face to mean 1 on what is left.
template <class R>
TruncationResult<R> truncate_and_condition(const Faces<R>& faces, long t, const R& eps) {
  if (!(eps > R(0) && eps < R(1))) throw DomainError("truncate_and_condition: eps in (0,1)");
  R cap = pow2<R>(t);
  auto truncate = [&](const Grid2<R>& m, R& removed) {
    Grid2<R> out = m;
    R gone(0);
    for (R& v : out.data())
      if (v > cap) {
        gone += v - cap;
        v = cap;
      }
    removed = gone / R(m.cells());
    return out;
  };
  TruncationResult<R> out;
  Grid2<R> fBar = truncate(faces.f, out.removedMassF);
  Grid2<R> gBar = truncate(faces.g, out.removedMassG);
  Grid2<R> hBar = truncate(faces.h, out.removedMassH);
  R meanF = expectation(fBar), meanH = expectation(hBar);
  std::vector<int> keepX, keepZ;
  for (int x = 0; x < fBar.nx(); ++x) {
    R rm(0);
    for (int y = 0; y < fBar.ny(); ++y) rm += fBar.at(x, y);
    rm /= R(fBar.ny());
    if (rm >= (R(1) - eps) * meanF) keepX.push_back(x);
  }
  for (int z = 0; z < hBar.ny(); ++z) {
    R cm(0);
    for (int y = 0; y < hBar.nx(); ++y) cm += hBar.at(y, z);
    cm /= R(hBar.nx());
    if (cm >= (R(1) - eps) * meanH) keepZ.push_back(z);
  }
  if (keepX.empty() || keepZ.empty())
    throw DegenerateError("truncate_and_condition: min-degree pruning removed everything");
  out.prunedRows = fBar.nx() - static_cast<int>(keepX.size());
  out.prunedCols = hBar.ny() - static_cast<int>(keepZ.size());
  std::vector<int> allY(static_cast<size_t>(fBar.ny()));
  std::iota(allY.begin(), allY.end(), 0);
  Grid2<R> fCut = restrict_grid(fBar, keepX, allY);
  Grid2<R> gCut = restrict_grid(gBar, keepX, keepZ);
  std::vector<int> allYh(static_cast<size_t>(hBar.nx()));
  std::iota(allYh.begin(), allYh.end(), 0);
  Grid2<R> hCut = restrict_grid(hBar, allYh, keepZ);
  auto rescale = [](Grid2<R>& m, R& scale) {
    R mean = expectation(m);
    if (mean == R(0)) throw DegenerateError("truncate_and_condition: face mean collapsed to zero");
    scale = R(1) / mean;
    for (R& v : m.data()) v *= scale;
  };
  rescale(fCut, out.scaleF);
  rescale(gCut, out.scaleG);
  rescale(hCut, out.scaleH);
  out.f = std::move(fCut);
  out.g = std::move(gCut);
  out.h = std::move(hCut);
  out.keptRows = std::move(keepX);
  out.keptCols = std::move(keepZ);
  return out;
}

template <class R>
struct LargenessCertificate {
  SubCube starCube;    // C*, the maximizer
  SubCube barCube;     // C-bar after min-degree pruning, original coordinates
  long t = 0;
  Grid2<R> f, g, h;    // conditioned faces on C-bar
  R productMean{};     // E_{C-bar}[f g h], via the matrix product route
  R maxProduct{};      // max of the face product over C-bar
  R nominalDenominator{};  // 4 * 2^{3t}
  bool constantOk = false; // maxProduct <= 4 * 2^{3t}
  bool cubeDensityOk = false;  // |C*| >= 2^{-t^2} |Omega|
  R bound{};           // (|C-bar|/|Omega|) * productMean / max(nominal, maxProduct)
  R directDensity{};   // E[F], counted
};

template <class R>
struct CertificateConfig {
  double evasivenessC = 0.125;  // c in the (c sqrt(d), d/c) hypothesis
  R eps = make_ratio<R>(1, 10);
  int pointAxisCap = 16;
  long long subcubeEnumCap = 1ll << 12;
  int subcubeRestarts = 8;
  long long productCellCap = 1ll << 20;
};

template <class R>
struct LargenessOutcome {
  AuditStatus status = AuditStatus::Pass;
  LargenessCertificate<R> cert;
  EvasivenessReport<R> evasiveness;
  Powered<R> phiPow;
  std::string note;
};

// Full constructive pipeline: subcube maximization, face marginals,
// truncation and min-degree conditioning, then the product lower bound
//   E[F] >= (|C-bar|/|Omega|) E_{C-bar}[f g h] / denom.
// Wherever the face product is positive F is 1 (p lives on F and F factors
// through the same faces), so denom = max(4*2^{3t}, max product) always
// yields a true lower bound; constant_ok records whether the nominal
// 4*2^{3t} was the binding value.
template <class R>
LargenessOutcome<R> largeness_certificate(const DensityFunction<R>& p,
                                          const CylinderIntersection& F, long t, long d,
                                          const CertificateConfig<R>& cfg = {}, Rng* rng = nullptr) {
  LargenessOutcome<R> out;
  const Dims dims = p.dim;
  if (dims != F.dims()) throw DimensionError("largeness_certificate: domain mismatch");
  long long cells = dims.cells();
  // p must be a density supported on F
  Grid3Indicator Find = F.to_indicator();
  R mean(0);
  for (long long i = 0; i < cells; ++i) {
    const R& v = p.p[static_cast<size_t>(i)];
    if (v < R(0)) throw DomainError("largeness_certificate: negative density");
    if (v != R(0) && !Find.b[static_cast<size_t>(i)])
      throw DomainError("largeness_certificate: density has mass off F");
    mean += v;
  }
  mean /= R(cells);
  if (!geq(mean, R(1), 1e-9) || !leq(mean, R(1), 1e-9))
    throw DomainError("largeness_certificate: density is not normalized");
  if (t < 1 || d < 1 || t * t > d) {
    out.status = AuditStatus::HypothesisUnmet;
    out.note = "needs 1 <= t and t^2 <= d";
    return out;
  }
  int evFloorExp = static_cast<int>(std::ceil(static_cast<double>(d) / cfg.evasivenessC));
  out.evasiveness = evasiveness_measure<R>(p.p, dims, evFloorExp, cfg.pointAxisCap);
  if (out.evasiveness.found && out.evasiveness.maxRatio > pow2<R>(t)) {
    out.status = AuditStatus::HypothesisUnmet;
    out.note = "density is not (t, d/c)-evasive: worst slice ratio exceeds 2^t";
    return out;
  }
  long cubeFloorExp = static_cast<long>(
      std::min<double>(62.0, std::ceil(static_cast<double>(t) * t / cfg.evasivenessC)));
  auto sub = subcube_maximize(p, t, pow2<R>(-cubeFloorExp), cfg.subcubeEnumCap,
                              cfg.subcubeRestarts, rng);
  out.phiPow = sub.phiPow;
  auto& cert = out.cert;
  cert.t = t;
  cert.starCube = sub.cube;
  cert.cubeDensityOk = R(sub.cube.cells()) * pow2<R>(t * t) >= R(cells);
  auto faces = build_faces(p, sub.cube);
  auto tr = truncate_and_condition(faces, t, cfg.eps);
  cert.f = tr.f;
  cert.g = tr.g;
  cert.h = tr.h;
  for (int i : tr.keptRows) cert.barCube.sx.push_back(sub.cube.sx[static_cast<size_t>(i)]);
  cert.barCube.sy = sub.cube.sy;
  for (int k : tr.keptCols) cert.barCube.sz.push_back(sub.cube.sz[static_cast<size_t>(k)]);
  // E_{C-bar}[f g h] = <f o h^T, g> over the (x,z) grid
  Grid2<R> fh = matrix_product(tr.f, tr.h.transposed());
  R prod(0);
  for (int i = 0; i < fh.nx(); ++i)
    for (int k = 0; k < fh.ny(); ++k) prod += fh.at(i, k) * tr.g.at(i, k);
  cert.productMean = prod / R(fh.cells());
  if (cert.barCube.cells() > cfg.productCellCap)
    throw ResourceError("largeness_certificate: cube exceeds the product cell cap");
  R maxProd(0);
  for (int i = 0; i < tr.f.nx(); ++i)
    for (int j = 0; j < tr.f.ny(); ++j) {
      if (tr.f.at(i, j) == R(0)) continue;
      for (int k = 0; k < static_cast<int>(tr.keptCols.size()); ++k) {
        R v = tr.f.at(i, j) * tr.g.at(i, k) * tr.h.at(j, k);
        maxProd = std::max(maxProd, v);
      }
    }
  cert.maxProduct = maxProd;
  cert.nominalDenominator = R(4) * pow2<R>(3 * t);
  cert.constantOk = maxProd <= cert.nominalDenominator;
  R denom = std::max(cert.nominalDenominator, maxProd);
  cert.bound = make_ratio<R>(cert.barCube.cells(), cells) * cert.productMean / denom;
  cert.directDensity = make_ratio<R>(F.count(), cells);
  bool lower = leq(cert.bound, cert.directDensity, kDefaultTol);
  if (!lower) {
    out.status = AuditStatus::Fail;
    out.note = "certificate bound exceeds the counted density";
  } else if (!cert.cubeDensityOk) {
    out.status = AuditStatus::Fail;
    out.note = "maximizer cube smaller than 2^{-t^2} of the domain";
  } else {
    out.status = AuditStatus::Pass;
  }
  return out;
}

}  // namespace gridlab

#pragma once

// Number-on-forehead experiments: the constant-cost randomized protocol for
// the equal-inner-products set, exact minimum cylinder-intersection cover
// numbers at micro scale, and local-search lower bounds for the largest
// monochromatic cylinder intersection inside D.

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridlab/errors.hpp"
#include "gridlab/evasive.hpp"
#include "gridlab/grid.hpp"
#include "gridlab/rng.hpp"
#include "gridlab/scalar.hpp"

namespace gridlab {

struct ProtocolTranscript {
  bool accepted = false;
  int rounds = 0;
  std::array<int, 3> bitsPerPlayer{};  // speaker order: knows-xy, knows-xz, knows-yz
  int totalBits = 0;
  std::uint64_t seed = 0;
};

// Public-coin equality check of a = <x,y>, b = <x,z>, c = <y,z>. Per round a
// shared random mask over the value bits is drawn; the player knowing (x,y)
// announces parity(a & mask), the player knowing (x,z) announces
// parity(b & mask) plus a verdict on a = b, and the player knowing (y,z)
// verdicts on b = c against its own parities. 2r + 2 bits total, never a
// function of q or k. Members of D are always accepted; each unequal pair
// survives all rounds with probability 2^-r.
inline ProtocolTranscript randomized_protocol(const PrimeField& fq, int k, long long x,
                                              long long y, long long z, int rounds,
                                              std::uint64_t seed) {
  if (rounds < 1) throw DomainError("randomized_protocol: requires rounds >= 1");
  ProtocolTranscript tr;
  tr.rounds = rounds;
  tr.seed = seed;
  auto vx = index_to_vector(fq, k, x), vy = index_to_vector(fq, k, y),
       vz = index_to_vector(fq, k, z);
  std::uint32_t a = inner_product(fq, vx, vy);
  std::uint32_t b = inner_product(fq, vx, vz);
  std::uint32_t c = inner_product(fq, vy, vz);
  int valueBits = std::max(1, static_cast<int>(std::bit_width(fq.q - 1)));
  Rng rng(seed);
  bool abMatch = true, bcMatch = true;
  for (int t = 0; t < rounds; ++t) {
    std::uint32_t mask =
        static_cast<std::uint32_t>(rng.next_u64() & ((1ull << valueBits) - 1));
    int pa = std::popcount(a & mask) & 1;
    int pb = std::popcount(b & mask) & 1;
    int pc = std::popcount(c & mask) & 1;
    abMatch = abMatch && (pa == pb);
    bcMatch = bcMatch && (pb == pc);
  }
  tr.accepted = abMatch && bcMatch;
  tr.bitsPerPlayer = {rounds, rounds + 1, 1};
  tr.totalBits = 2 * rounds + 2;
  return tr;
}

// --- exact cover numbers ---

struct CoverNumberResult {
  std::optional<int> exact;
  int lowerBound = 0;
  int upperBound = 0;
  std::string method;  // "bruteforce" or "greedy"
  std::vector<CylinderIntersection> cover;
  long long maximalCiCount = 0;
  long long maxCiSize = 0;
};

struct MaxCiResult {
  CylinderIntersection ci;
  long long size = 0;
};

namespace detail {

using PointMask = std::vector<std::uint64_t>;

inline void mask_set(PointMask& m, int i) { m[static_cast<size_t>(i) >> 6] |= 1ull << (i & 63); }
inline bool mask_get(const PointMask& m, int i) {
  return (m[static_cast<size_t>(i) >> 6] >> (i & 63)) & 1;
}
inline int mask_pop(const PointMask& m) {
  int s = 0;
  for (auto w : m) s += std::popcount(w);
  return s;
}
inline bool mask_subset(const PointMask& a, const PointMask& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}

// ON-flip hill climbing for the largest CI inside D, counting only cells
// with weight 1. Flips are monotone, so the loop terminates.
inline MaxCiResult grow_ci(const Grid3Indicator& D, const std::vector<std::uint8_t>& weight,
                           int px, int py, int pz) {
  int nx = D.nx, ny = D.ny, nz = D.nz;
  CylinderIntersection ci(BitGrid2(nx, ny), BitGrid2(nx, nz), BitGrid2(ny, nz));
  ci.fxy.at(px, py) = 1;
  ci.gxz.at(px, pz) = 1;
  ci.hyz.at(py, pz) = 1;
  auto added_cells_ok = [&](int face, int i, int j, long long& gain) {
    gain = 0;
    if (face == 0) {  // fxy bit (x=i, y=j)
      for (int z = 0; z < nz; ++z)
        if (ci.gxz.at(i, z) && ci.hyz.at(j, z)) {
          if (!D.at(i, j, z)) return false;
          gain += weight[static_cast<size_t>(D.dims().index(i, j, z))];
        }
    } else if (face == 1) {  // gxz bit (x=i, z=j)
      for (int y = 0; y < ny; ++y)
        if (ci.fxy.at(i, y) && ci.hyz.at(y, j)) {
          if (!D.at(i, y, j)) return false;
          gain += weight[static_cast<size_t>(D.dims().index(i, y, j))];
        }
    } else {  // hyz bit (y=i, z=j)
      for (int x = 0; x < nx; ++x)
        if (ci.fxy.at(x, i) && ci.gxz.at(x, j)) {
          if (!D.at(x, i, j)) return false;
          gain += weight[static_cast<size_t>(D.dims().index(x, i, j))];
        }
    }
    return true;
  };
  for (;;) {
    long long bestGain = -1;
    int bestFace = -1, bestI = 0, bestJ = 0;
    auto scan = [&](int face, BitGrid2& grid) {
      for (int i = 0; i < grid.n0; ++i)
        for (int j = 0; j < grid.n1; ++j) {
          if (grid.at(i, j)) continue;
          long long gain;
          if (added_cells_ok(face, i, j, gain) && gain > bestGain) {
            bestGain = gain;
            bestFace = face;
            bestI = i;
            bestJ = j;
          }
        }
    };
    scan(0, ci.fxy);
    scan(1, ci.gxz);
    scan(2, ci.hyz);
    if (bestFace < 0) break;
    if (bestFace == 0) ci.fxy.at(bestI, bestJ) = 1;
    else if (bestFace == 1) ci.gxz.at(bestI, bestJ) = 1;
    else ci.hyz.at(bestI, bestJ) = 1;
  }
  MaxCiResult out;
  out.size = 0;
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y)
      for (int z = 0; z < nz; ++z)
        if (ci.contains(x, y, z)) out.size += weight[static_cast<size_t>(D.dims().index(x, y, z))];
  out.ci = std::move(ci);
  return out;
}

}  // namespace detail

// Best monochromatic CI found by restarted local search. Always a lower
// bound on the true maximum; restarts only improve it.
inline MaxCiResult max_monochromatic_ci(const Grid3Indicator& D, int restarts,
                                        std::uint64_t seed) {
  std::vector<long long> pts;
  for (long long i = 0; i < D.dims().cells(); ++i)
    if (D.b[static_cast<size_t>(i)]) pts.push_back(i);
  MaxCiResult best;
  if (pts.empty()) {
    best.ci = CylinderIntersection(BitGrid2(D.nx, D.ny), BitGrid2(D.nx, D.nz), BitGrid2(D.ny, D.nz));
    return best;
  }
  std::vector<std::uint8_t> ones(static_cast<size_t>(D.dims().cells()), 1);
  Rng rng(seed);
  for (int s = 0; s <= restarts; ++s) {
    long long cell = s == 0 ? pts[0]
                            : pts[static_cast<size_t>(rng.next_below(pts.size()))];
    int px = static_cast<int>(cell / (D.ny * D.nz));
    int py = static_cast<int>((cell / D.nz) % D.ny);
    int pz = static_cast<int>(cell % D.nz);
    auto got = detail::grow_ci(D, ones, px, py, pz);
    if (got.size > best.size) best = std::move(got);
  }
  return best;
}

// Enumerates every maximal CI inside D (enumerate the xy and xz faces, the
// yz face is then forced to its maximal closure), then solves minimum set
// cover of D's points exactly by branch and bound. Falls back to a greedy
// local-search cover when the face enumeration exceeds the budget.
inline CoverNumberResult cover_number_exact(const Grid3Indicator& D,
                                            long long enumBudgetLog2 = 26,
                                            long long bbNodeCap = 1ll << 22,
                                            std::uint64_t seed = 0) {
  CoverNumberResult out;
  std::vector<long long> pts;
  for (long long i = 0; i < D.dims().cells(); ++i)
    if (D.b[static_cast<size_t>(i)]) pts.push_back(i);
  if (pts.empty()) {
    out.exact = 0;
    out.method = "bruteforce";
    return out;
  }
  std::map<long long, int> ptIndex;
  for (size_t i = 0; i < pts.size(); ++i) ptIndex[pts[i]] = static_cast<int>(i);
  int nPts = static_cast<int>(pts.size());
  int words = (nPts + 63) / 64;
  int nx = D.nx, ny = D.ny, nz = D.nz;
  long long fBits = static_cast<long long>(nx) * ny, gBits = static_cast<long long>(nx) * nz;

  if (fBits + gBits > enumBudgetLog2) {
    // greedy fallback: repeatedly grab the CI covering the most uncovered points
    out.method = "greedy";
    std::vector<std::uint8_t> weight(static_cast<size_t>(D.dims().cells()), 0);
    for (long long c : pts) weight[static_cast<size_t>(c)] = 1;
    Rng rng(seed);
    long long remaining = nPts;
    while (remaining > 0) {
      MaxCiResult bestCi;
      for (int s = 0; s < 16; ++s) {
        long long cell = -1;
        for (long long c : pts)
          if (weight[static_cast<size_t>(c)]) {
            cell = c;
            break;
          }
        // random uncovered start after the first deterministic one
        if (s > 0) {
          std::vector<long long> rem;
          for (long long c : pts)
            if (weight[static_cast<size_t>(c)]) rem.push_back(c);
          cell = rem[static_cast<size_t>(rng.next_below(rem.size()))];
        }
        int px = static_cast<int>(cell / (ny * nz));
        int py = static_cast<int>((cell / nz) % ny);
        int pz = static_cast<int>(cell % nz);
        auto got = detail::grow_ci(D, weight, px, py, pz);
        if (got.size > bestCi.size) bestCi = std::move(got);
      }
      if (bestCi.size <= 0) throw Error("cover_number_exact: greedy stalled");
      for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
          for (int z = 0; z < nz; ++z)
            if (bestCi.ci.contains(x, y, z)) {
              auto& w = weight[static_cast<size_t>(D.dims().index(x, y, z))];
              remaining -= w;
              w = 0;
            }
      out.cover.push_back(bestCi.ci);
    }
    out.upperBound = static_cast<int>(out.cover.size());
    out.lowerBound = 1;
    return out;
  }

  // exhaustive maximal-CI enumeration
  std::set<detail::PointMask> seen;
  std::vector<detail::PointMask> masks;
  std::vector<CylinderIntersection> cis;
  for (std::uint64_t fm = 1; fm < (1ull << fBits); ++fm) {
    BitGrid2 f(nx, ny);
    for (int i = 0; i < fBits; ++i)
      if (fm & (1ull << i)) f.b[static_cast<size_t>(i)] = 1;
    for (std::uint64_t gm = 1; gm < (1ull << gBits); ++gm) {
      BitGrid2 g(nx, nz);
      for (int i = 0; i < gBits; ++i)
        if (gm & (1ull << i)) g.b[static_cast<size_t>(i)] = 1;
      BitGrid2 h(ny, nz, 1);
      for (int y = 0; y < ny; ++y)
        for (int z = 0; z < nz; ++z) {
          for (int x = 0; x < nx; ++x)
            if (f.at(x, y) && g.at(x, z) && !D.at(x, y, z)) {
              h.at(y, z) = 0;
              break;
            }
        }
      CylinderIntersection ci(f, g, h);
      detail::PointMask pm(static_cast<size_t>(words), 0);
      bool any = false;
      for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
          if (!f.at(x, y)) continue;
          for (int z = 0; z < nz; ++z)
            if (g.at(x, z) && h.at(y, z)) {
              detail::mask_set(pm, ptIndex[D.dims().index(x, y, z)]);
              any = true;
            }
        }
      if (!any) continue;
      if (seen.insert(pm).second) {
        masks.push_back(std::move(pm));
        cis.push_back(std::move(ci));
      }
    }
  }
  // keep only maximal point sets
  std::vector<int> keep;
  for (size_t i = 0; i < masks.size(); ++i) {
    bool dominated = false;
    for (size_t j = 0; j < masks.size() && !dominated; ++j)
      if (i != j && masks[i] != masks[j] && detail::mask_subset(masks[i], masks[j]))
        dominated = true;
    if (!dominated) keep.push_back(static_cast<int>(i));
  }
  std::vector<detail::PointMask> sets;
  std::vector<CylinderIntersection> setCis;
  long long maxSize = 0;
  for (int i : keep) {
    sets.push_back(masks[static_cast<size_t>(i)]);
    setCis.push_back(cis[static_cast<size_t>(i)]);
    maxSize = std::max<long long>(maxSize, detail::mask_pop(masks[static_cast<size_t>(i)]));
  }
  out.maximalCiCount = static_cast<long long>(sets.size());
  out.maxCiSize = maxSize;
  out.method = "bruteforce";
  out.lowerBound = static_cast<int>((nPts + maxSize - 1) / maxSize);

  // greedy upper bound
  detail::PointMask uncovered(static_cast<size_t>(words), 0);
  for (int i = 0; i < nPts; ++i) detail::mask_set(uncovered, i);
  std::vector<int> greedySel;
  {
    detail::PointMask un = uncovered;
    while (detail::mask_pop(un) > 0) {
      int bestIdx = -1, bestCnt = -1;
      for (size_t s = 0; s < sets.size(); ++s) {
        int cnt = 0;
        for (size_t w = 0; w < un.size(); ++w) cnt += std::popcount(un[w] & sets[s][w]);
        if (cnt > bestCnt) {
          bestCnt = cnt;
          bestIdx = static_cast<int>(s);
        }
      }
      if (bestCnt <= 0) throw Error("cover_number_exact: enumeration missed a point");
      greedySel.push_back(bestIdx);
      for (size_t w = 0; w < un.size(); ++w) un[w] &= ~sets[static_cast<size_t>(bestIdx)][w];
    }
  }
  out.upperBound = static_cast<int>(greedySel.size());

  // branch and bound on the uncovered point with the fewest candidate sets
  std::vector<int> bestSel = greedySel;
  std::vector<int> cur;
  long long nodes = 0;
  auto covers = [&](int s, int pt) { return detail::mask_get(sets[static_cast<size_t>(s)], pt); };
  auto rec = [&](auto&& self, detail::PointMask un) -> void {
    if (++nodes > bbNodeCap) return;
    int remaining = detail::mask_pop(un);
    if (remaining == 0) {
      if (cur.size() < bestSel.size()) bestSel = cur;
      return;
    }
    long long lb = (remaining + maxSize - 1) / maxSize;
    if (static_cast<long long>(cur.size()) + lb >= static_cast<long long>(bestSel.size())) return;
    int pick = -1, fewest = 1 << 30;
    for (int ptI = 0; ptI < nPts; ++ptI) {
      if (!detail::mask_get(un, ptI)) continue;
      int cnt = 0;
      for (size_t s = 0; s < sets.size(); ++s) cnt += covers(static_cast<int>(s), ptI);
      if (cnt < fewest) {
        fewest = cnt;
        pick = ptI;
      }
    }
    for (size_t s = 0; s < sets.size(); ++s) {
      if (!covers(static_cast<int>(s), pick)) continue;
      detail::PointMask nu = un;
      for (size_t w = 0; w < nu.size(); ++w) nu[w] &= ~sets[s][w];
      cur.push_back(static_cast<int>(s));
      self(self, std::move(nu));
      cur.pop_back();
    }
  };
  rec(rec, uncovered);
  out.exact = static_cast<int>(bestSel.size());
  for (int s : bestSel) out.cover.push_back(setCis[static_cast<size_t>(s)]);
  return out;
}

// --- bundled experiment ---

template <class R>
struct SeparationReport {
  std::uint32_t q = 0;
  int k = 0;
  long long N = 0;
  long long dSize = 0;
  R density{};
  int rounds = 0;
  long long completenessChecks = 0;
  long long completenessAccepted = 0;
  long long soundnessTrials = 0;
  long long falseAccepts = 0;
  double falseAcceptRate = 0;
  double soundnessBudget = 0;  // 2^-r + 3 sigma
  int bitsTotal = 0;
  std::array<int, 3> bitsPerPlayer{};
  int evasivenessFloorExp = 0;
  EvasivenessReport<R> evasiveness;
  CoverNumberResult coverNumber;
  std::uint64_t seed = 0;
};

template <class R>
SeparationReport<R> separation_report(std::uint32_t q, int k, int rounds, long long trials,
                                      std::uint64_t seed, int evasivenessFloorExp = 4,
                                      int completenessSeeds = 100) {
  PrimeField fq(q);
  SeparationReport<R> rep;
  rep.q = q;
  rep.k = k;
  rep.rounds = rounds;
  rep.seed = seed;
  Grid3Indicator D = build_D(fq, k);
  rep.N = D.nx;
  rep.dSize = D.count();
  rep.density = make_ratio<R>(rep.dSize, D.dims().cells());
  Rng rng(seed);
  // completeness: every member of D, several protocol seeds each
  for (long long x = 0; x < rep.N; ++x)
    for (long long y = 0; y < rep.N; ++y)
      for (long long z = 0; z < rep.N; ++z) {
        if (!D.at(static_cast<int>(x), static_cast<int>(y), static_cast<int>(z))) continue;
        for (int s = 0; s < completenessSeeds; ++s) {
          auto tr = randomized_protocol(fq, k, x, y, z, rounds, rng.next_u64());
          ++rep.completenessChecks;
          rep.completenessAccepted += tr.accepted;
          rep.bitsTotal = tr.totalBits;
          rep.bitsPerPlayer = tr.bitsPerPlayer;
        }
      }
  // soundness: random non-members (some inner product pair differs)
  for (long long t = 0; t < trials; ++t) {
    long long x, y, z;
    do {
      x = static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(rep.N)));
      y = static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(rep.N)));
      z = static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(rep.N)));
    } while (D.at(static_cast<int>(x), static_cast<int>(y), static_cast<int>(z)));
    auto tr = randomized_protocol(fq, k, x, y, z, rounds, rng.next_u64());
    ++rep.soundnessTrials;
    rep.falseAccepts += tr.accepted;
  }
  rep.falseAcceptRate = rep.soundnessTrials == 0
                            ? 0.0
                            : static_cast<double>(rep.falseAccepts) /
                                  static_cast<double>(rep.soundnessTrials);
  double p = std::exp2(static_cast<double>(-rounds));
  rep.soundnessBudget =
      p + 3.0 * std::sqrt(p * (1 - p) / std::max<double>(1.0, static_cast<double>(trials)));
  rep.evasivenessFloorExp = evasivenessFloorExp;
  rep.evasiveness = evasiveness_audit<R>(D, evasivenessFloorExp);
  rep.coverNumber = cover_number_exact(D, 26, 1ll << 22, seed);
  return rep;
}

}  // namespace gridlab

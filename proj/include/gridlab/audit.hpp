#pragma once

// audit_all: one entry point that exercises every inequality audit in the
// library on freshly generated instances that meet the hypotheses, and
// reports a pass/fail matrix keyed by statement. Runs in exact arithmetic.

#include <cmath>
#include <string>
#include <vector>

#include "gridlab/cover.hpp"
#include "gridlab/evasive.hpp"
#include "gridlab/evasive_ci.hpp"
#include "gridlab/generators.hpp"
#include "gridlab/grid.hpp"
#include "gridlab/nof.hpp"
#include "gridlab/norms.hpp"
#include "gridlab/rng.hpp"
#include "gridlab/scalar.hpp"
#include "gridlab/spread.hpp"

namespace gridlab {

enum class AuditScale { Micro, Small };
enum class FaultInjection { None, DecouplingRhsZero };

struct AuditLine {
  std::string statement;
  AuditStatus status = AuditStatus::Pass;
  double measured = 0;
  std::string detail;
};

struct AuditMatrix {
  std::vector<AuditLine> lines;

  int exit_code() const {
    bool unmet = false;
    for (const auto& l : lines) {
      if (l.status == AuditStatus::Fail) return 1;
      unmet = unmet || l.status == AuditStatus::HypothesisUnmet;
    }
    return unmet ? 2 : 0;
  }
};

namespace detail {

inline AuditStatus combine(AuditStatus a, AuditStatus b) {
  if (a == AuditStatus::Fail || b == AuditStatus::Fail) return AuditStatus::Fail;
  if (a == AuditStatus::HypothesisUnmet || b == AuditStatus::HypothesisUnmet)
    return AuditStatus::HypothesisUnmet;
  return AuditStatus::Pass;
}

// largest eps = j/64 in [1/64, 1/10] with (2 eps)^2 <= m2; zero if none
inline Rational eps_for_second_moment(const Rational& m2) {
  for (long j = 6; j >= 1; --j) {
    Rational eps(j, 64);
    if (pow_nonneg(Rational(2) * eps, 2) <= m2) return eps;
  }
  return Rational(0);
}

}  // namespace detail

inline AuditMatrix audit_all(AuditScale scale, std::uint64_t seed,
                             FaultInjection inject = FaultInjection::None) {
  using R = Rational;
  AuditMatrix mat;
  const bool small = scale == AuditScale::Small;
  Rng root(seed);

  {  // vector flat-norm sandwich on smooth vectors
    AuditLine line{"vector-flat-sandwich"};
    Rng rng = root.split(1);
    int count = small ? 200 : 24;
    R eps = make_ratio<R>(1, 10);
    double worst = 1.0;
    for (int i = 0; i < count; ++i) {
      long k = 1 + static_cast<long>(rng.next_below(8));
      int n = 4 + static_cast<int>(rng.next_below(small ? 61 : 13));
      auto v = random_vector<R>(rng, n, 8, 8ll << k, 8);
      long p = std::max<long>(1, static_cast<long>(std::ceil(
                                     10.0 * std::log2(static_cast<double>(k)) / to_double(eps))));
      auto rep = flat_sandwich_audit(v, p, k, eps);
      line.status = detail::combine(line.status, rep.status);
      if (rep.lp > 0) worst = std::min(worst, rep.flat / rep.lp);
    }
    line.measured = worst;
    line.detail = "min flat/lp ratio over smooth instances";
    mat.lines.push_back(line);
  }

  {  // matrix flat-vs-operator sandwich
    AuditLine line{"matrix-flat-sandwich"};
    Rng rng = root.split(2);
    int count = small ? 12 : 4;
    double worst = 1.0;
    for (int i = 0; i < count; ++i) {
      auto M = random_grid2<R>(rng, 6, 6, 1, 4, 4);
      R eps = make_ratio<R>(1, 2);
      long d = 2;
      auto rep = matrix_sandwich_audit(M, 40, 40, d, eps, 20.0, 4, rng.next_u64());
      line.status = detail::combine(line.status, rep.status);
      if (rep.op > 0) worst = std::min(worst, rep.flat / rep.op);
    }
    line.measured = worst;
    line.detail = "min flat/operator ratio";
    mat.lines.push_back(line);
  }

  {  // grid norm of spread + smooth matrices stays near the mean
    AuditLine line{"grid-bound-for-spread"};
    Rng rng = root.split(3);
    int count = small ? 10 : 3;
    double worstRatio = 0;
    for (int i = 0; i < count; ++i) {
      Grid2<R> M(8, 8);
      do {
        M = random_grid2<R>(rng, 8, 8, 7, 9, 16);
      } while (expectation(M) < make_ratio<R>(1, 2));
      R eps = make_ratio<R>(1, 5);
      auto rep = grid_bound_audit(M, 100, 1, eps, R(10));
      line.status = detail::combine(line.status, rep.status);
      worstRatio = std::max(worstRatio, rep.ratio);
    }
    line.measured = worstRatio;
    line.detail = "max U(2,k)/mean over spread instances";
    mat.lines.push_back(line);
  }

  {  // matrix shift lemma
    AuditLine line{"matrix-shift"};
    Rng rng = root.split(4);
    int count = small ? 10 : 4;
    int vacuous = 0;
    for (int i = 0; i < count; ++i) {
      auto f = random_grid2<R>(rng, 6, 6, 3, 4, 4);  // entries in [3/4, 1]
      R eps = make_ratio<R>(1, 4);
      auto rep = matrix_shift_audit(f, 2, eps, 16);
      line.status = detail::combine(line.status, rep.status);
      vacuous += rep.antecedent ? 0 : 1;
    }
    line.measured = static_cast<double>(vacuous);
    line.detail = "instances with a vacuous antecedent";
    mat.lines.push_back(line);
  }

  {  // spectral positivity on Gram-pair profiles
    AuditLine line{"spectral-positivity"};
    Rng rng = root.split(5);
    int count = small ? 50 : 8;
    double worstMargin = 1e300;
    for (int i = 0; i < count; ++i) {
      Grid2<R> f = random_grid01<R>(rng, 5, 5, 0.5);
      auto prof = gram_pair_profile(f);
      R eps = detail::eps_for_second_moment(prof.moment(2));
      if (eps == R(0)) {
        --i;  // nearly constant rows, resample
        continue;
      }
      long p = ceil_to_ll(R(2) / eps);
      auto rep = spectral_positivity_audit(prof, 2, eps, p);
      line.status = detail::combine(line.status, rep.status);
      if (rep.rhs > R(0)) worstMargin = std::min(worstMargin, to_double(rep.lhs / rep.rhs));
    }
    line.measured = worstMargin;
    line.detail = "min E[|1+A|^p]/(1+eps)^p";
    mat.lines.push_back(line);
  }

  {  // decoupling inequality; fault injection zeroes the right-hand side
    AuditLine line{"decoupling"};
    Rng rng = root.split(6);
    int count = small ? 100 : 16;
    double worstGap = 1e300;
    for (int i = 0; i < count; ++i) {
      auto f = random_grid2<R>(rng, 6, 6, 0, 8, 8);
      auto g = random_grid2<R>(rng, 5, 6, 0, 8, 8);
      long k = (i % 2 == 0) ? 2 : 4;
      auto rep = decoupling_audit(f, g, k);
      if (inject == FaultInjection::DecouplingRhsZero) {
        bool ok = rep.lhsPow <= R(0);
        rep.status = ok ? AuditStatus::Pass : AuditStatus::Fail;
      }
      line.status = detail::combine(line.status, rep.status);
      worstGap = std::min(worstGap, rep.rhs - rep.lhs);
    }
    line.measured = worstGap;
    line.detail = inject == FaultInjection::DecouplingRhsZero
                      ? "rhs mutated to zero (fault injection)"
                      : "min rhs - lhs gap";
    mat.lines.push_back(line);
  }

  {  // product of spread matrices is near uniform
    AuditLine line{"product-of-spread"};
    Rng rng = root.split(7);
    int count = small ? 6 : 2;
    double worstRatio = 0;
    for (int i = 0; i < count; ++i) {
      auto f = random_grid2<R>(rng, 8, 8, 19, 20, 20);
      auto g = random_grid2<R>(rng, 8, 8, 19, 20, 20);
      R eps = make_ratio<R>(1, 10);
      auto rep = product_theorem_audit(f, g, 3, eps, R(10));
      line.status = detail::combine(line.status, rep.status);
      worstRatio = std::max(worstRatio, rep.ratio);
    }
    line.measured = worstRatio;
    line.detail = "max deviation/bound ratio";
    mat.lines.push_back(line);
  }

  Dims micro{4, 4, 4};
  {  // LP strong duality + certified pricing
    AuditLine line{"lp-duality"};
    Rng rng = root.split(8);
    int count = small ? 25 : 5;
    for (int i = 0; i < count; ++i) {
      auto F = random_indicator(rng, micro, 0.5);
      auto fc = solve_fractional_cover<R>(F, pow2<R>(-6));
      bool ok = fc.optimal && fc.value == fc.dualObjective && fractional_cover_valid(fc, F);
      line.status = detail::combine(line.status, ok ? AuditStatus::Pass : AuditStatus::Fail);
      line.measured = to_double(fc.value);
    }
    line.detail = "primal value of the last instance; exact primal = dual enforced";
    mat.lines.push_back(line);
  }

  {  // randomized rounding
    AuditLine line{"rounding-cover"};
    Rng rng = root.split(9);
    auto F = random_indicator(rng, micro, 0.4);
    auto fc = solve_fractional_cover<R>(F, pow2<R>(-6));
    int seeds = small ? 50 : 20, good = 0;
    double budget = 4.0 * std::log(static_cast<double>(micro.cells())) * to_double(fc.value);
    for (int s = 0; s < seeds; ++s) {
      Rng r2 = rng.split(static_cast<std::uint64_t>(s));
      auto rounded = round_cover(fc, F, 0.1, r2, 2.0, 1);
      if (rounded.valid && to_double(rounded.measure) <= budget) ++good;
    }
    line.measured = static_cast<double>(good) / seeds;
    line.status = (good * 10 >= seeds * 9) ? AuditStatus::Pass : AuditStatus::Fail;
    line.detail = "fraction of seeds with a valid, within-budget cover";
    mat.lines.push_back(line);
  }

  {  // largeness certificate stays below the counted density
    AuditLine line{"largeness-certificate"};
    Rng rng = root.split(10);
    // all-ones cylinder with the uniform density: bound must reach 2^{-3t}/4
    {
      auto F = CylinderIntersection::full(3, 3, 3);
      DensityFunction<R> p(Dims{3, 3, 3}, R(1));
      auto outc = largeness_certificate(p, F, 1, 4);
      bool floor = outc.cert.bound >= pow2<R>(-3) / R(8);
      line.status = detail::combine(line.status,
                                    floor ? outc.status : AuditStatus::Fail);
      line.measured = to_double(outc.cert.bound);
    }
    // dense random cylinder with the uniform density on it
    for (int i = 0; i < (small ? 6 : 2); ++i) {
      CylinderIntersection F = random_ci(rng, micro, 0.9);
      Grid3Indicator ind = F.to_indicator();
      if (ind.count() < 16) {
        --i;
        continue;
      }
      auto p = uniform_density_on_set<R>(ind);
      auto outc = largeness_certificate(p, F, 2, 4);
      line.status = detail::combine(line.status, outc.status);
    }
    line.detail = "certificate lower bounds vs counted densities";
    mat.lines.push_back(line);
  }

  {  // the explicit set and its measured evasiveness
    AuditLine line{"evasive-set-measure"};
    PrimeField f2(2);
    auto D1 = build_D(f2, 1);
    bool sizeOk = D1.count() == 5;
    auto D2 = build_D(f2, 2);
    auto rep = evasiveness_audit<R>(D2, 4);
    line.measured = rep.kPrime;
    bool bounded = rep.found && rep.kPrime <= 4.0;
    line.status = (sizeOk && bounded) ? AuditStatus::Pass : AuditStatus::Fail;
    line.detail = "k' of the q=2,k=2 set at floor 2^-4; |D(2,1)| = 5 checked";
    mat.lines.push_back(line);
  }

  {  // cover-implied pseudorandomness for cylinder intersections
    AuditLine line{"ci-pseudorandomness"};
    Rng rng = root.split(11);
    PrimeField f2(2);
    auto D = build_D(f2, 2);
    int tried = 0;
    for (int i = 0; i < (small ? 5 : 2) && tried < 40; ++i) {
      ++tried;
      auto F = random_ci(rng, micro, 0.45);
      auto ind = F.to_indicator();
      if (ind.count() == 0 || expectation<R>(ind) > pow2<R>(-2)) {
        --i;
        continue;
      }
      auto rep = pseudorandom_ci_audit<R>(D, F, 2);
      line.status = detail::combine(line.status, rep.status);
      line.measured = to_double(rep.implied - rep.direct);
    }
    line.detail = "implied-minus-direct slack of the last instance";
    mat.lines.push_back(line);
  }

  {  // protocol completeness on all of D
    AuditLine line{"protocol-completeness"};
    Rng rng = root.split(12);
    PrimeField f2(2);
    long long checks = 0, accepted = 0;
    for (int k = 1; k <= 2; ++k) {
      auto D = build_D(f2, k);
      int N = D.nx;
      for (int x = 0; x < N; ++x)
        for (int y = 0; y < N; ++y)
          for (int z = 0; z < N; ++z) {
            if (!D.at(x, y, z)) continue;
            for (int s = 0; s < (small ? 100 : 20); ++s) {
              auto tr = randomized_protocol(f2, k, x, y, z, 10, rng.next_u64());
              ++checks;
              accepted += tr.accepted;
            }
          }
    }
    line.measured = static_cast<double>(accepted) / static_cast<double>(checks);
    line.status = accepted == checks ? AuditStatus::Pass : AuditStatus::Fail;
    line.detail = "acceptance rate over all of D, must be exactly 1";
    mat.lines.push_back(line);
  }

  {  // protocol soundness
    AuditLine line{"protocol-soundness"};
    Rng rng = root.split(13);
    PrimeField f2(2);
    int k = 2, r = 10;
    auto D = build_D(f2, k);
    int N = D.nx;
    long long trials = small ? 10000 : 2000, bad = 0;
    for (long long t = 0; t < trials; ++t) {
      int x, y, z;
      do {
        x = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(N)));
        y = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(N)));
        z = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(N)));
      } while (D.at(x, y, z));
      bad += randomized_protocol(f2, k, x, y, z, r, rng.next_u64()).accepted;
    }
    double rate = static_cast<double>(bad) / static_cast<double>(trials);
    double p = std::exp2(-r);
    double budget = p + 3.0 * std::sqrt(p * (1 - p) / static_cast<double>(trials));
    line.measured = rate;
    line.status = rate <= budget ? AuditStatus::Pass : AuditStatus::Fail;
    line.detail = "false-accept rate vs 2^-r + 3 sigma";
    mat.lines.push_back(line);
  }

  return mat;
}

}  // namespace gridlab

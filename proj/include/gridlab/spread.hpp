#pragma once

// Spreadness testing, the density increment loop, row averaging, normalized
// matrix products, and the audits for the grid-norm upper bound, the
// decoupling inequality, spectral positivity, the matrix shift lemma and
// the product theorem. Signed U(2,k) quantities go through the Gram route,
// so only k-th powers of row inner products ever appear.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridlab/grid.hpp"
#include "gridlab/norms.hpp"
#include "gridlab/scalar.hpp"

namespace gridlab {

template <class R>
struct SpreadParams {
  long t = 2;
  R eps = make_ratio<R>(1, 10);
};

template <class R>
struct SpreadCheck {
  bool spread = false;
  bool certified = false;              // flat norm came from exact enumeration
  R mean{};                            // ||M||_1
  FlatOperatorNormResult<R> flat;      // flat (t,t) norm with witness
};

// (t,eps)-spread: flat (t,t)-norm <= (1+eps) ||M||_1. The witness rectangle
// of a failed check is the flat-norm maximizer.
template <class R>
SpreadCheck<R> is_spread(const Grid2<R>& M, const SpreadParams<R>& prm, int enumCap = 16) {
  if (!M.nonnegative()) throw DomainError("is_spread: negative entry");
  SpreadCheck<R> out;
  out.mean = expectation(M);
  out.flat = flat_operator_norm(M, prm.t, prm.t, enumCap);
  out.certified = out.flat.exact;
  R threshold = (R(1) + prm.eps) * out.mean;
  if constexpr (is_exact_v<R>) {
    // flat^t <= ((1+eps)||M||_1)^t, root-free
    out.spread = out.flat.powered.base <= pow_nonneg(threshold, out.flat.powered.root);
  } else {
    out.spread = out.flat.value <= to_double(threshold) + kDefaultTol;
  }
  return out;
}

struct SubRect {
  std::vector<int> rows, cols;  // original coordinates, sorted
};

template <class R>
struct IncrementStep {
  SubRect rect;
  R meanBefore{}, meanAfter{};
  R sizeRatio{};  // |rect| / |original domain|
};

template <class R>
struct IncrementResult {
  SubRect rect;                          // final rectangle, original coordinates
  std::vector<IncrementStep<R>> trace;
  bool spreadReached = false;            // false means the size floor stopped us
  R finalMean{};
  SpreadCheck<R> finalCheck;
};

// Density increment: restrict to the violating rectangle until spread or the
// cumulative size floor would be crossed. Each step multiplies the mean by
// more than (1+eps), because the flat witness pays a size penalty <= 1.
template <class R>
IncrementResult<R> density_increment(const Grid2<R>& M, const SpreadParams<R>& prm,
                                     const R& sizeFloor, int stepCap = 64, int enumCap = 16) {
  R total = expectation(M);
  if (total == R(0)) throw DomainError("density_increment: ||M||_1 = 0");
  IncrementResult<R> out;
  SubRect cur;
  cur.rows.resize(static_cast<size_t>(M.nx()));
  cur.cols.resize(static_cast<size_t>(M.ny()));
  std::iota(cur.rows.begin(), cur.rows.end(), 0);
  std::iota(cur.cols.begin(), cur.cols.end(), 0);
  Grid2<R> view = M;
  R domainCells = R(M.cells());
  for (int step = 0; step < stepCap; ++step) {
    auto chk = is_spread(view, prm, enumCap);
    if (chk.spread) {
      out.spreadReached = true;
      out.finalCheck = std::move(chk);
      break;
    }
    // map the witness back to original coordinates
    SubRect next;
    for (int i : chk.flat.rows) next.rows.push_back(cur.rows[static_cast<size_t>(i)]);
    for (int j : chk.flat.cols) next.cols.push_back(cur.cols[static_cast<size_t>(j)]);
    R ratio = R(static_cast<long long>(next.rows.size()) *
                static_cast<long long>(next.cols.size())) / domainCells;
    if (ratio < sizeFloor) {
      out.spreadReached = false;
      out.finalCheck = std::move(chk);
      break;
    }
    Grid2<R> sub = restrict_grid(M, next.rows, next.cols);
    IncrementStep<R> st;
    st.rect = next;
    st.meanBefore = expectation(view);
    st.meanAfter = expectation(sub);
    st.sizeRatio = ratio;
    out.trace.push_back(st);
    cur = std::move(next);
    view = std::move(sub);
    if (step == stepCap - 1) out.finalCheck = is_spread(view, prm, enumCap);
  }
  out.rect = cur;
  out.finalMean = expectation(view);
  return out;
}

template <class R>
Grid2<R> row_average(const Grid2<R>& f) {
  Grid2<R> out(f.nx(), f.ny());
  for (int x = 0; x < f.nx(); ++x) {
    R s(0);
    for (int y = 0; y < f.ny(); ++y) s += f.at(x, y);
    s /= R(f.ny());
    for (int y = 0; y < f.ny(); ++y) out.at(x, y) = s;
  }
  return out;
}

// (f o g)(x,z) = E_y[f(x,y) g(z,y)] for f on XxY and g on ZxY.
template <class R>
Grid2<R> matrix_product(const Grid2<R>& f, const Grid2<R>& g) {
  if (f.ny() != g.ny()) throw DimensionError("matrix_product: shared axis mismatch");
  Grid2<R> out(f.nx(), g.nx());
  for (int x = 0; x < f.nx(); ++x)
    for (int z = 0; z < g.nx(); ++z) {
      R s(0);
      for (int y = 0; y < f.ny(); ++y) s += f.at(x, y) * g.at(z, y);
      out.at(x, z) = s / R(f.ny());
    }
  return out;
}

template <class R>
struct DecouplingReport {
  AuditStatus status = AuditStatus::Pass;
  R lhsPow{};       // E[(f o g - Rf o Rg)^k], signed k-th powers
  R rhsPowProd{};   // Lf * Lg with Lf = ||f-Rf||_{U(2,k)}^{2k}
  double lhs = 0, rhs = 0;  // k-th roots for reporting
};

// E[(f o g - Rf o Rg)^k] <= ||f-Rf||_{U(2,k)}^k ||g-Rg||_{U(2,k)}^k.
// Exact form: lhs <= 0, or lhs^2 <= Lf * Lg. Unconditional; a violation
// beyond tolerance is a bug, not a property of the input.
template <class R>
DecouplingReport<R> decoupling_audit(const Grid2<R>& f, const Grid2<R>& g, long k,
                                     double tol = kDefaultTol) {
  if (f.ny() != g.ny()) throw DimensionError("decoupling_audit: shared axis mismatch");
  if (k < 1) throw DomainError("decoupling_audit: requires k >= 1");
  DecouplingReport<R> rep;
  Grid2<R> fc = f, gc = g;
  Grid2<R> rf = row_average(f), rg = row_average(g);
  for (int x = 0; x < f.nx(); ++x)
    for (int y = 0; y < f.ny(); ++y) fc.at(x, y) -= rf.at(x, y);
  for (int z = 0; z < g.nx(); ++z)
    for (int y = 0; y < g.ny(); ++y) gc.at(z, y) -= rg.at(z, y);
  // lhs: signed k-th powers of the product deviations
  Grid2<R> dev = matrix_product(fc, gc);
  R lhs(0);
  for (const R& v : dev.data()) {
    if constexpr (is_exact_v<R>) {
      R a = pow_nonneg(abs_val(v), k);
      lhs += (k % 2 == 1 && v < R(0)) ? -a : a;
    } else {
      lhs += std::pow(v, static_cast<double>(k));
    }
  }
  lhs /= R(dev.cells());
  R Lf = grid_u2k_power(fc, k);
  R Lg = grid_u2k_power(gc, k);
  rep.lhsPow = lhs;
  rep.rhsPowProd = Lf * Lg;
  bool ok;
  if constexpr (is_exact_v<R>) {
    ok = lhs <= R(0) || lhs * lhs <= rep.rhsPowProd;
  } else {
    double l = lhs;
    double r = std::sqrt(std::max(0.0, Lf * Lg));
    ok = l <= r + tol;
  }
  if (lhs == R(0))
    rep.lhs = 0.0;
  else if (lhs < R(0))
    rep.lhs = -std::exp2(log2_approx(abs_val(lhs)) / static_cast<double>(k));
  else
    rep.lhs = std::exp2(log2_approx(lhs) / static_cast<double>(k));
  rep.rhs = rep.rhsPowProd == R(0)
                ? 0.0
                : std::exp2(log2_approx(rep.rhsPowProd) / static_cast<double>(2 * k));
  rep.status = ok ? AuditStatus::Pass : AuditStatus::Fail;
  return rep;
}

// Finite random variable as (value, probability) atoms.
template <class R>
struct MomentProfile {
  std::vector<std::pair<R, R>> atoms;

  R probability_mass() const {
    R s(0);
    for (auto& [v, p] : atoms) s += p;
    return s;
  }

  R moment(long t) const {
    R s(0);
    for (auto& [v, p] : atoms) {
      if constexpr (is_exact_v<R>) {
        R a = pow_nonneg(abs_val(v), t);
        s += p * ((t % 2 == 1 && v < R(0)) ? -a : a);
      } else {
        s += p * std::pow(v, static_cast<double>(t));
      }
    }
    return s;
  }

  // E[|1+A|^p]
  R abs_shift_moment(long p) const {
    R s(0);
    for (auto& [v, q] : atoms) s += q * pow_nonneg(abs_val(R(1) + v), p);
    return s;
  }
};

// A = <(f-Rf)(i,*), (f-Rf)(j,*)> for a uniform pair (i,j). Its k-th moments
// are the signed U(2,k) powers of f-Rf, so E[A^t] >= 0 for every t.
template <class R>
MomentProfile<R> gram_pair_profile(const Grid2<R>& f) {
  Grid2<R> fc = f;
  Grid2<R> rf = row_average(f);
  for (int x = 0; x < f.nx(); ++x)
    for (int y = 0; y < f.ny(); ++y) fc.at(x, y) -= rf.at(x, y);
  MomentProfile<R> out;
  int nx = f.nx(), ny = f.ny();
  R prob = make_ratio<R>(1, static_cast<long long>(nx) * nx);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nx; ++j) {
      R s(0);
      for (int y = 0; y < ny; ++y) s += fc.at(i, y) * fc.at(j, y);
      out.atoms.push_back({s / R(ny), prob});
    }
  return out;
}

template <class R>
struct SpectralPositivityReport {
  AuditStatus status = AuditStatus::Pass;
  R lhs{}, rhs{};  // E[|1+A|^p] and (1+eps)^p
  std::string note;
};

// E[A^k] >= (2 eps)^k (k even), E[A^t] >= 0 up to the horizon, eps < 1/4,
// p >= k/eps  =>  E[|1+A|^p] >= (1+eps)^p.
template <class R>
SpectralPositivityReport<R> spectral_positivity_audit(const MomentProfile<R>& A, long k,
                                                      const R& eps, long p,
                                                      long momentHorizon = 16,
                                                      double tol = kDefaultTol) {
  SpectralPositivityReport<R> rep;
  if (k < 2 || k % 2 != 0) {
    rep.status = AuditStatus::HypothesisUnmet;
    rep.note = "k must be even and >= 2";
    return rep;
  }
  if (!(eps > R(0) && eps < make_ratio<R>(1, 4))) {
    rep.status = AuditStatus::HypothesisUnmet;
    rep.note = "eps outside (0, 1/4)";
    return rep;
  }
  if (!geq(A.moment(k), pow_nonneg(R(2) * eps, k), tol)) {
    rep.status = AuditStatus::HypothesisUnmet;
    rep.note = "E[A^k] below (2 eps)^k";
    return rep;
  }
  for (long t = 1; t <= momentHorizon; ++t) {
    if (!geq(A.moment(t), R(0), tol)) {
      rep.status = AuditStatus::HypothesisUnmet;
      rep.note = "negative moment at t = " + std::to_string(t);
      return rep;
    }
  }
  if (R(static_cast<long long>(p)) * eps < R(k)) {
    rep.status = AuditStatus::HypothesisUnmet;
    rep.note = "p below k/eps";
    return rep;
  }
  rep.lhs = A.abs_shift_moment(p);
  rep.rhs = pow_nonneg(R(1) + eps, p);
  rep.status = geq(rep.lhs, rep.rhs, tol) ? AuditStatus::Pass : AuditStatus::Fail;
  return rep;
}

template <class R>
struct MatrixShiftReport {
  AuditStatus status = AuditStatus::Pass;
  bool antecedent = false;       // ||f-Rf||_{U(2,k)} >= 6 eps E[f]
  bool consequentHalf = false;   // ||f||_{U(2,p)}^{2p} >= (1/2)((1+eps)E[f])^{2p}
  bool consequentClean = false;  // ||f||_{U(2,p)} >= (1+eps)E[f]
  bool contrapositiveHolds = false;
  double u2kCentered = 0, u2pFull = 0, mean = 0;
  std::string note;
};

// Min-degree rows + large centered U(2,k) force a large U(2,p). The audited
// implication uses the half-slack conclusion; the clean form is reported.
template <class R>
MatrixShiftReport<R> matrix_shift_audit(const Grid2<R>& f, long k, const R& eps, long p,
                                        double tol = kDefaultTol) {
  if (!f.nonnegative()) throw DomainError("matrix_shift_audit: negative entry");
  MatrixShiftReport<R> rep;
  R mean = expectation(f);
  rep.mean = to_double(mean);
  if (!(eps > R(0) && eps < R(1)) || k < 1) {
    rep.status = AuditStatus::HypothesisUnmet;
    rep.note = "bad parameters";
    return rep;
  }
  for (int x = 0; x < f.nx(); ++x) {
    R rm(0);
    for (int y = 0; y < f.ny(); ++y) rm += f.at(x, y);
    rm /= R(f.ny());
    if (rm < (R(1) - eps) * mean) {
      rep.status = AuditStatus::HypothesisUnmet;
      rep.note = "min-degree condition violated at row " + std::to_string(x);
      return rep;
    }
  }
  if (R(static_cast<long long>(p)) * eps < R(2 * k)) {
    rep.status = AuditStatus::HypothesisUnmet;
    rep.note = "p below 2k/eps";
    return rep;
  }
  Grid2<R> fc = f;
  Grid2<R> rf = row_average(f);
  for (int x = 0; x < f.nx(); ++x)
    for (int y = 0; y < f.ny(); ++y) fc.at(x, y) -= rf.at(x, y);
  R centeredPow = grid_u2k_power(fc, k);   // ||f-Rf||_{U(2,k)}^{2k} >= 0
  R fullPow = grid_u2k_power(f, p);        // ||f||_{U(2,p)}^{2p}
  rep.u2kCentered = centeredPow == R(0)
                        ? 0.0
                        : std::exp2(log2_approx(centeredPow) / static_cast<double>(2 * k));
  rep.u2pFull = fullPow == R(0) ? 0.0 : std::exp2(log2_approx(fullPow) / static_cast<double>(2 * p));
  R antecedentRhs = pow_nonneg(R(6) * eps * mean, 2 * k);
  rep.antecedent = geq(centeredPow, antecedentRhs, tol);
  R cons = pow_nonneg((R(1) + eps) * mean, 2 * p);
  rep.consequentHalf = geq(R(2) * fullPow, cons, tol);
  rep.consequentClean = geq(fullPow, cons, tol);
  rep.contrapositiveHolds = !rep.antecedent || rep.consequentHalf;
  rep.status = rep.contrapositiveHolds ? AuditStatus::Pass : AuditStatus::Fail;
  if (!rep.antecedent) rep.note = "antecedent false; implication vacuous";
  return rep;
}

template <class R>
struct GridBoundReport {
  AuditStatus status = AuditStatus::Pass;
  double ratio = 0;      // U(2,k) / ||M||_1
  double bound = 0;      // 1 + C eps
  bool spreadCertified = false;
  std::string note;
};

// Spread + smooth implies the U(2,k) norm stays within (1 + C eps) of the
// mean. C is the configured audit constant, measured not assumed.
template <class R>
GridBoundReport<R> grid_bound_audit(const Grid2<R>& M, long k, long d, const R& eps,
                                    const R& auditConstant = R(10), int enumCap = 16,
                                    double tol = kDefaultTol) {
  GridBoundReport<R> rep;
  if (!M.nonnegative() || M.max_entry() > R(1))
    throw DomainError("grid_bound_audit: entries must lie in [0,1]");
  R mean = expectation(M);
  if (!(eps > R(0) && eps < R(1)) || d < 1) {
    rep.status = AuditStatus::HypothesisUnmet;
    rep.note = "bad parameters";
    return rep;
  }
  if (mean < pow2<R>(-d)) {
    rep.status = AuditStatus::HypothesisUnmet;
    rep.note = "||M||_1 below 2^-d";
    return rep;
  }
  if (R(k) * eps < R(20 * d)) {
    rep.status = AuditStatus::HypothesisUnmet;
    rep.note = "k below 20 d / eps";
    return rep;
  }
  auto chk = is_spread(M, SpreadParams<R>{k, eps}, enumCap);
  rep.spreadCertified = chk.certified;
  if (!chk.spread) {
    rep.status = AuditStatus::HypothesisUnmet;
    rep.note = "matrix is not (k,eps)-spread";
    return rep;
  }
  R normPow = grid_u2k_power(M, k);  // U(2,k)^{2k}
  R cap = (R(1) + auditConstant * eps) * mean;
  bool ok = leq(normPow, pow_nonneg(cap, 2 * k), tol);
  rep.ratio = mean == R(0) ? 0.0
                           : std::exp2(log2_approx(normPow) / static_cast<double>(2 * k)) /
                                 to_double(mean);
  rep.bound = to_double(R(1) + auditConstant * eps);
  rep.status = ok ? AuditStatus::Pass : AuditStatus::Fail;
  return rep;
}

template <class R>
struct ProductTheoremReport {
  AuditStatus status = AuditStatus::Pass;
  double deviation = 0;  // ||f o g - Rf o Rg||_d
  double bound = 0;      // C' eps^2 ||f||_1 ||g||_1
  double ratio = 0;
  std::string note;
};

// Spread + min-degree + dense on both sides bounds the d-norm of the
// product deviation by C' eps^2 ||f||_1 ||g||_1.
template <class R>
ProductTheoremReport<R> product_theorem_audit(const Grid2<R>& f, const Grid2<R>& g, long d,
                                              const R& eps, const R& auditConstant = R(10),
                                              int enumCap = 16, double tol = kDefaultTol) {
  ProductTheoremReport<R> rep;
  if (f.ny() != g.ny()) throw DimensionError("product_theorem_audit: shared axis mismatch");
  if (!f.nonnegative() || !g.nonnegative() || f.max_entry() > R(1) || g.max_entry() > R(1))
    throw DomainError("product_theorem_audit: entries must lie in [0,1]");
  if (!(eps > R(0) && eps < R(1)) || d < 1) {
    rep.status = AuditStatus::HypothesisUnmet;
    rep.note = "bad parameters";
    return rep;
  }
  R meanF = expectation(f), meanG = expectation(g);
  if (meanF < pow2<R>(-d) || meanG < pow2<R>(-d)) {
    rep.status = AuditStatus::HypothesisUnmet;
    rep.note = "density below 2^-d";
    return rep;
  }
  for (const Grid2<R>* m : {&f, &g}) {
    for (int x = 0; x < m->nx(); ++x) {
      R rm(0);
      for (int y = 0; y < m->ny(); ++y) rm += m->at(x, y);
      rm /= R(m->ny());
      if (rm < R(1) - eps) {
        rep.status = AuditStatus::HypothesisUnmet;
        rep.note = "row mean below 1 - eps";
        return rep;
      }
    }
  }
  long t = ceil_to_ll(R(100 * d) / eps);
  SpreadParams<R> prm{t, eps};
  if (!is_spread(f, prm, enumCap).spread || !is_spread(g, prm, enumCap).spread) {
    rep.status = AuditStatus::HypothesisUnmet;
    rep.note = "not (100d/eps, eps)-spread";
    return rep;
  }
  Grid2<R> rf = row_average(f), rg = row_average(g);
  Grid2<R> lhs = matrix_product(f, g), rhs = matrix_product(rf, rg);
  R devPow(0);
  for (int x = 0; x < lhs.nx(); ++x)
    for (int z = 0; z < lhs.ny(); ++z) {
      R v = lhs.at(x, z) - rhs.at(x, z);
      devPow += pow_nonneg(abs_val(v), d);
    }
  devPow /= R(lhs.cells());  // ||dev||_d^d
  R cap = auditConstant * eps * eps * meanF * meanG;
  bool ok = leq(devPow, pow_nonneg(cap, d), tol);
  rep.deviation = devPow == R(0) ? 0.0 : std::exp2(log2_approx(devPow) / static_cast<double>(d));
  rep.bound = to_double(cap);
  rep.ratio = rep.bound == 0 ? 0.0 : rep.deviation / rep.bound;
  rep.status = ok ? AuditStatus::Pass : AuditStatus::Fail;
  return rep;
}

}  // namespace gridlab

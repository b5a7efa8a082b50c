#pragma once

// Two-phase tableau simplex for covering problems:
//
//   min c.x   s.t.  A x >= b,  x >= 0,  b >= 0.
//
// Templated over the scalar: exact rationals give exact optima and duals
// (Bland's rule, so no cycling and no tolerances), doubles give the fast
// path with pivot tolerances. Columns can be appended after a solve; the
// tableau representation of a new column is recovered from the artificial
// block (which holds B^-1), so column generation re-optimizes in place
// instead of solving the master from scratch.
//
// Column layout: [0, m) surplus, [m, 2m) artificial, [2m, ...) structural.

#include <vector>

#include "gridlab/errors.hpp"
#include "gridlab/scalar.hpp"

namespace gridlab {

template <class R>
class CoveringSimplex {
 public:
  enum class Status { Optimal, Infeasible, Unbounded, PivotCap };

  explicit CoveringSimplex(std::vector<R> b) : b_(std::move(b)), m_(static_cast<int>(b_.size())) {
    if (m_ < 1) throw DimensionError("CoveringSimplex: no rows");
    for (const R& v : b_)
      if (v < R(0)) throw DomainError("CoveringSimplex: requires b >= 0");
  }

  // Returns the structural column id (0-based).
  int add_column(const std::vector<R>& col, R cost) {
    if (static_cast<int>(col.size()) != m_) throw DimensionError("add_column: wrong height");
    cols_.push_back(col);
    costs_.push_back(std::move(cost));
    if (initialized_) append_to_tableau(static_cast<int>(cols_.size()) - 1);
    return static_cast<int>(cols_.size()) - 1;
  }

  Status solve(long pivotCap = 1 << 20) {
    if (!initialized_) {
      build_tableau();
      Status s1 = run_pivots(pivotCap, /*phase1=*/true);
      if (s1 != Status::Optimal) return status_ = s1;
      if (!feasible_phase1()) return status_ = Status::Infeasible;
      drive_out_artificials();
      rebuild_objective();
      initialized_ = true;
    }
    return status_ = run_pivots(pivotCap, /*phase1=*/false);
  }

  Status status() const { return status_; }
  const R& objective() const { return z_; }
  long pivots() const { return pivots_; }
  int columns() const { return static_cast<int>(cols_.size()); }

  std::vector<R> primal() const {
    std::vector<R> x(cols_.size(), R(0));
    for (int i = 0; i < m_; ++i)
      if (basis_[static_cast<size_t>(i)] >= 2 * m_)
        x[static_cast<size_t>(basis_[static_cast<size_t>(i)] - 2 * m_)] = rhs_[static_cast<size_t>(i)];
    return x;
  }

  // Row duals; valid at phase-2 optimality, nonnegative for covering rows.
  std::vector<R> duals() const {
    std::vector<R> pi(static_cast<size_t>(m_));
    for (int i = 0; i < m_; ++i) pi[static_cast<size_t>(i)] = obj_[static_cast<size_t>(i)];
    return pi;
  }

 private:
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kElemTol = 1e-11;

  std::vector<R> b_;
  int m_;
  std::vector<std::vector<R>> cols_;
  std::vector<R> costs_;

  std::vector<std::vector<R>> tab_;  // m rows, width() entries each
  std::vector<R> rhs_;
  std::vector<R> obj_;               // reduced-cost row
  R z_{};                            // current objective value
  std::vector<int> basis_;
  bool initialized_ = false;
  long pivots_ = 0;
  Status status_ = Status::Optimal;

  int width() const { return 2 * m_ + static_cast<int>(cols_.size()); }

  bool is_artificial(int j) const { return j >= m_ && j < 2 * m_; }

  void build_tableau() {
    int w = width();
    tab_.assign(static_cast<size_t>(m_), std::vector<R>(static_cast<size_t>(w), R(0)));
    rhs_ = b_;
    basis_.resize(static_cast<size_t>(m_));
    for (int i = 0; i < m_; ++i) {
      auto& row = tab_[static_cast<size_t>(i)];
      row[static_cast<size_t>(i)] = R(-1);       // surplus
      row[static_cast<size_t>(m_ + i)] = R(1);   // artificial
      for (size_t j = 0; j < cols_.size(); ++j)
        row[static_cast<size_t>(2 * m_) + j] = cols_[j][static_cast<size_t>(i)];
      basis_[static_cast<size_t>(i)] = m_ + i;
    }
    // phase-1 objective: min sum of artificials
    obj_.assign(static_cast<size_t>(w), R(0));
    z_ = R(0);
    for (int j = 0; j < w; ++j) {
      R rc = is_artificial(j) ? R(1) : R(0);
      for (int i = 0; i < m_; ++i) rc -= tab_[static_cast<size_t>(i)][static_cast<size_t>(j)] * R(is_artificial(basis_[static_cast<size_t>(i)]) ? 1 : 0);
      obj_[static_cast<size_t>(j)] = rc;
    }
    for (int i = 0; i < m_; ++i) z_ += rhs_[static_cast<size_t>(i)];
  }

  bool feasible_phase1() const {
    if constexpr (is_exact_v<R>) return z_ == R(0);
    else return z_ <= 1e-7;
  }

  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[static_cast<size_t>(i)])) continue;
      int w = width();
      for (int j = 0; j < w; ++j) {
        if (is_artificial(j)) continue;
        const R& v = tab_[static_cast<size_t>(i)][static_cast<size_t>(j)];
        bool nonzero;
        if constexpr (is_exact_v<R>) nonzero = v != R(0);
        else nonzero = v > kElemTol || v < -kElemTol;
        if (nonzero) {
          pivot(i, j);
          break;
        }
      }
      // a fully zero row is redundant; its artificial stays basic at zero
    }
  }

  void rebuild_objective() {
    int w = width();
    obj_.assign(static_cast<size_t>(w), R(0));
    z_ = R(0);
    auto cost_of = [&](int j) -> R {
      if (j >= 2 * m_) return costs_[static_cast<size_t>(j - 2 * m_)];
      return R(0);
    };
    for (int i = 0; i < m_; ++i) z_ += cost_of(basis_[static_cast<size_t>(i)]) * rhs_[static_cast<size_t>(i)];
    for (int j = 0; j < w; ++j) {
      R rc = cost_of(j);
      for (int i = 0; i < m_; ++i) {
        const R& cb = cost_of(basis_[static_cast<size_t>(i)]);
        if (cb != R(0)) rc -= cb * tab_[static_cast<size_t>(i)][static_cast<size_t>(j)];
      }
      obj_[static_cast<size_t>(j)] = rc;
    }
  }

  void append_to_tableau(int colId) {
    // representation of the new column is B^-1 a, read off the artificial block
    const auto& a = cols_[static_cast<size_t>(colId)];
    std::vector<R> rep(static_cast<size_t>(m_), R(0));
    for (int i = 0; i < m_; ++i) {
      R s(0);
      for (int k = 0; k < m_; ++k) {
        const R& binv = tab_[static_cast<size_t>(i)][static_cast<size_t>(m_ + k)];
        if (binv != R(0)) s += binv * a[static_cast<size_t>(k)];
      }
      rep[static_cast<size_t>(i)] = s;
    }
    R rc = costs_[static_cast<size_t>(colId)];
    for (int i = 0; i < m_; ++i) rc -= obj_[static_cast<size_t>(i)] * a[static_cast<size_t>(i)];  // duals live under the surplus block
    for (int i = 0; i < m_; ++i) tab_[static_cast<size_t>(i)].push_back(rep[static_cast<size_t>(i)]);
    obj_.push_back(rc);
  }

  void pivot(int row, int col) {
    ++pivots_;
    auto& prow = tab_[static_cast<size_t>(row)];
    R inv = R(1) / prow[static_cast<size_t>(col)];
    int w = width();
    for (int j = 0; j < w; ++j) prow[static_cast<size_t>(j)] *= inv;
    rhs_[static_cast<size_t>(row)] *= inv;
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      R factor = tab_[static_cast<size_t>(i)][static_cast<size_t>(col)];
      if (factor == R(0)) continue;
      auto& irow = tab_[static_cast<size_t>(i)];
      for (int j = 0; j < w; ++j)
        if (prow[static_cast<size_t>(j)] != R(0)) irow[static_cast<size_t>(j)] -= factor * prow[static_cast<size_t>(j)];
      rhs_[static_cast<size_t>(i)] -= factor * rhs_[static_cast<size_t>(row)];
    }
    R ofactor = obj_[static_cast<size_t>(col)];
    if (ofactor != R(0)) {
      for (int j = 0; j < w; ++j)
        if (prow[static_cast<size_t>(j)] != R(0)) obj_[static_cast<size_t>(j)] -= ofactor * prow[static_cast<size_t>(j)];
    }
    basis_[static_cast<size_t>(row)] = col;
  }

  Status run_pivots(long pivotCap, bool phase1) {
    for (long step = 0; step < pivotCap; ++step) {
      int entering = -1;
      int w = width();
      for (int j = 0; j < w; ++j) {
        if (!phase1 && is_artificial(j)) continue;
        bool negative;
        if constexpr (is_exact_v<R>) negative = obj_[static_cast<size_t>(j)] < R(0);
        else negative = obj_[static_cast<size_t>(j)] < -kPivotTol;
        if (negative) {
          entering = j;
          break;  // Bland: lowest index
        }
      }
      if (entering < 0) return Status::Optimal;
      int leaving = -1;
      R bestRatio{};
      for (int i = 0; i < m_; ++i) {
        const R& coef = tab_[static_cast<size_t>(i)][static_cast<size_t>(entering)];
        bool positive;
        if constexpr (is_exact_v<R>) positive = coef > R(0);
        else positive = coef > kElemTol;
        if (!positive) continue;
        R ratio = rhs_[static_cast<size_t>(i)] / coef;
        if (leaving < 0 || ratio < bestRatio ||
            (ratio == bestRatio && basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leaving)])) {
          leaving = i;
          bestRatio = ratio;
        }
      }
      if (leaving < 0) return Status::Unbounded;
      pivot_with_z(leaving, entering);
    }
    return Status::PivotCap;
  }

  // pivot + objective value update (z decreases by rc * ratio)
  void pivot_with_z(int row, int col) {
    R rc = obj_[static_cast<size_t>(col)];
    R ratio = rhs_[static_cast<size_t>(row)] / tab_[static_cast<size_t>(row)][static_cast<size_t>(col)];
    z_ += rc * ratio;
    pivot(row, col);
  }
};

}  // namespace gridlab

#pragma once

// Core domain types. Domains X, Y, Z are dense 0-based index ranges; every
// expectation and norm is an average over its domain, never a sum. All
// types are immutable-by-convention after construction and safe to share
// across threads.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "gridlab/errors.hpp"
#include "gridlab/scalar.hpp"

namespace gridlab {

struct Dims {
  int nx = 0, ny = 0, nz = 0;
  long long cells() const { return static_cast<long long>(nx) * ny * nz; }
  long long index(int x, int y, int z) const {
    return (static_cast<long long>(x) * ny + y) * nz + z;
  }
  bool operator==(const Dims&) const = default;
};

template <class R>
class Grid2 {
 public:
  Grid2() = default;
  Grid2(int nx, int ny, R fill = R(0)) : nx_(nx), ny_(ny) {
    if (nx < 1 || ny < 1) throw DimensionError("Grid2: dimensions must be >= 1");
    a_.assign(static_cast<size_t>(nx) * ny, fill);
  }

  static Grid2 ones(int nx, int ny) { return Grid2(nx, ny, R(1)); }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  long long cells() const { return static_cast<long long>(nx_) * ny_; }

  R& at(int x, int y) { return a_[static_cast<size_t>(x) * ny_ + y]; }
  const R& at(int x, int y) const { return a_[static_cast<size_t>(x) * ny_ + y]; }

  const std::vector<R>& data() const { return a_; }
  std::vector<R>& data() { return a_; }

  bool nonnegative() const {
    for (const R& v : a_)
      if (v < R(0)) return false;
    return true;
  }

  R max_entry() const {
    R m = a_.front();
    for (const R& v : a_) m = std::max(m, v);
    return m;
  }

  Grid2 transposed() const {
    Grid2 t(ny_, nx_);
    for (int x = 0; x < nx_; ++x)
      for (int y = 0; y < ny_; ++y) t.at(y, x) = at(x, y);
    return t;
  }

  bool operator==(const Grid2&) const = default;

 private:
  int nx_ = 0, ny_ = 0;
  std::vector<R> a_;
};

// 0/1 face of a cylinder intersection.
struct BitGrid2 {
  int n0 = 0, n1 = 0;
  std::vector<std::uint8_t> b;

  BitGrid2() = default;
  BitGrid2(int a, int c, std::uint8_t fill = 0) : n0(a), n1(c) {
    if (a < 1 || c < 1) throw DimensionError("BitGrid2: dimensions must be >= 1");
    b.assign(static_cast<size_t>(a) * c, fill);
  }
  static BitGrid2 ones(int a, int c) { return BitGrid2(a, c, 1); }

  std::uint8_t& at(int i, int j) { return b[static_cast<size_t>(i) * n1 + j]; }
  std::uint8_t at(int i, int j) const { return b[static_cast<size_t>(i) * n1 + j]; }
  long long count() const {
    long long s = 0;
    for (auto v : b) s += v;
    return s;
  }
  bool operator==(const BitGrid2&) const = default;
};

struct Grid3Indicator {
  int nx = 0, ny = 0, nz = 0;
  std::vector<std::uint8_t> b;

  Grid3Indicator() = default;
  Grid3Indicator(int nx_, int ny_, int nz_, std::uint8_t fill = 0)
      : nx(nx_), ny(ny_), nz(nz_) {
    if (nx_ < 1 || ny_ < 1 || nz_ < 1)
      throw DimensionError("Grid3Indicator: dimensions must be >= 1");
    b.assign(static_cast<size_t>(nx_) * ny_ * nz_, fill);
  }
  static Grid3Indicator full(int nx, int ny, int nz) { return Grid3Indicator(nx, ny, nz, 1); }

  Dims dims() const { return Dims{nx, ny, nz}; }
  std::uint8_t& at(int x, int y, int z) {
    return b[static_cast<size_t>(dims().index(x, y, z))];
  }
  std::uint8_t at(int x, int y, int z) const {
    return b[static_cast<size_t>(dims().index(x, y, z))];
  }
  long long count() const {
    long long s = 0;
    for (auto v : b) s += v;
    return s;
  }
  bool operator==(const Grid3Indicator&) const = default;
};

// F(x,y,z) = fxy(x,y) * gxz(x,z) * hyz(y,z), each face an indicator.
struct CylinderIntersection {
  BitGrid2 fxy, gxz, hyz;

  CylinderIntersection() = default;
  CylinderIntersection(BitGrid2 f, BitGrid2 g, BitGrid2 h)
      : fxy(std::move(f)), gxz(std::move(g)), hyz(std::move(h)) {
    if (fxy.n0 != gxz.n0 || fxy.n1 != hyz.n0 || gxz.n1 != hyz.n1)
      throw DimensionError("CylinderIntersection: face shapes disagree");
  }
  static CylinderIntersection full(int nx, int ny, int nz) {
    return CylinderIntersection(BitGrid2::ones(nx, ny), BitGrid2::ones(nx, nz),
                                BitGrid2::ones(ny, nz));
  }

  Dims dims() const { return Dims{fxy.n0, fxy.n1, gxz.n1}; }
  bool contains(int x, int y, int z) const {
    return fxy.at(x, y) && gxz.at(x, z) && hyz.at(y, z);
  }
  Grid3Indicator to_indicator() const {
    Dims d = dims();
    Grid3Indicator out(d.nx, d.ny, d.nz);
    for (int x = 0; x < d.nx; ++x)
      for (int y = 0; y < d.ny; ++y) {
        if (!fxy.at(x, y)) continue;
        for (int z = 0; z < d.nz; ++z)
          if (gxz.at(x, z) && hyz.at(y, z)) out.at(x, y, z) = 1;
      }
    return out;
  }
  long long count() const {
    Dims d = dims();
    long long s = 0;
    for (int x = 0; x < d.nx; ++x)
      for (int y = 0; y < d.ny; ++y) {
        if (!fxy.at(x, y)) continue;
        for (int z = 0; z < d.nz; ++z) s += gxz.at(x, z) && hyz.at(y, z);
      }
    return s;
  }
};

// Which two coordinates the pair set lives on; the point set is on the rest.
enum class Orientation { XY_Z = 0, YZ_X = 1, XZ_Y = 2 };

inline const char* orientation_name(Orientation o) {
  switch (o) {
    case Orientation::XY_Z: return "xy|z";
    case Orientation::YZ_X: return "yz|x";
    case Orientation::XZ_Y: return "xz|y";
  }
  return "?";
}

// Pair ids are row-major over the two grouped axes:
//   XY_Z: pair = x*ny + y, point = z
//   YZ_X: pair = y*nz + z, point = x
//   XZ_Y: pair = x*nz + z, point = y
struct SliceFunction {
  Orientation axis = Orientation::XY_Z;
  std::vector<int> pairs;   // sorted ascending
  std::vector<int> points;  // sorted ascending

  static SliceFunction all_of(const Dims& d, Orientation o = Orientation::XY_Z) {
    SliceFunction s;
    s.axis = o;
    auto [np, nq] = pair_point_counts(d, o);
    s.pairs.resize(static_cast<size_t>(np));
    s.points.resize(static_cast<size_t>(nq));
    for (int i = 0; i < np; ++i) s.pairs[static_cast<size_t>(i)] = i;
    for (int i = 0; i < nq; ++i) s.points[static_cast<size_t>(i)] = i;
    return s;
  }

  static std::pair<int, int> pair_point_counts(const Dims& d, Orientation o) {
    switch (o) {
      case Orientation::XY_Z: return {d.nx * d.ny, d.nz};
      case Orientation::YZ_X: return {d.ny * d.nz, d.nx};
      case Orientation::XZ_Y: return {d.nx * d.nz, d.ny};
    }
    return {0, 0};
  }

  // (pair id, point id) of a cell under this orientation.
  std::pair<int, int> split(const Dims& d, int x, int y, int z) const {
    switch (axis) {
      case Orientation::XY_Z: return {x * d.ny + y, z};
      case Orientation::YZ_X: return {y * d.nz + z, x};
      case Orientation::XZ_Y: return {x * d.nz + z, y};
    }
    return {0, 0};
  }

  static long long cell_of(const Dims& d, Orientation o, int pair, int point) {
    switch (o) {
      case Orientation::XY_Z: return d.index(pair / d.ny, pair % d.ny, point);
      case Orientation::YZ_X: return d.index(point, pair / d.nz, pair % d.nz);
      case Orientation::XZ_Y: return d.index(pair / d.nz, point, pair % d.nz);
    }
    return 0;
  }

  bool contains(const Dims& d, int x, int y, int z) const {
    auto [p, q] = split(d, x, y, z);
    return std::binary_search(pairs.begin(), pairs.end(), p) &&
           std::binary_search(points.begin(), points.end(), q);
  }

  long long size() const {
    return static_cast<long long>(pairs.size()) * static_cast<long long>(points.size());
  }

  bool operator==(const SliceFunction&) const = default;
};

template <class R>
R slice_density(const SliceFunction& s, const Dims& d) {
  return make_ratio<R>(s.size(), d.cells());
}

template <class R>
struct DensityFunction {
  Dims dim;
  std::vector<R> p;  // nonnegative, normalized when E over the domain is 1

  DensityFunction() = default;
  explicit DensityFunction(const Dims& d, R fill = R(0)) : dim(d) {
    if (d.cells() < 1) throw DimensionError("DensityFunction: empty domain");
    p.assign(static_cast<size_t>(d.cells()), fill);
  }
  R& at(int x, int y, int z) { return p[static_cast<size_t>(dim.index(x, y, z))]; }
  const R& at(int x, int y, int z) const {
    return p[static_cast<size_t>(dim.index(x, y, z))];
  }
  std::vector<long long> support() const {
    std::vector<long long> s;
    for (long long i = 0; i < dim.cells(); ++i)
      if (p[static_cast<size_t>(i)] != R(0)) s.push_back(i);
    return s;
  }
};

struct SubCube {
  std::vector<int> sx, sy, sz;  // sorted ascending, nonempty

  long long cells() const {
    return static_cast<long long>(sx.size()) * sy.size() * sz.size();
  }
  bool valid() const { return !sx.empty() && !sy.empty() && !sz.empty(); }
  static SubCube full(const Dims& d) {
    SubCube c;
    c.sx.resize(static_cast<size_t>(d.nx));
    c.sy.resize(static_cast<size_t>(d.ny));
    c.sz.resize(static_cast<size_t>(d.nz));
    for (int i = 0; i < d.nx; ++i) c.sx[static_cast<size_t>(i)] = i;
    for (int i = 0; i < d.ny; ++i) c.sy[static_cast<size_t>(i)] = i;
    for (int i = 0; i < d.nz; ++i) c.sz[static_cast<size_t>(i)] = i;
    return c;
  }
  bool operator==(const SubCube&) const = default;
};

// --- expectations (uniform measure, always an average) ---

template <class R>
R expectation(const Grid2<R>& g) {
  if (g.cells() == 0) throw DimensionError("expectation: empty grid");
  R s(0);
  for (const R& v : g.data()) s += v;
  return s / R(g.cells());
}

template <class R>
R expectation(const Grid3Indicator& g) {
  if (g.dims().cells() == 0) throw DimensionError("expectation: empty grid");
  return make_ratio<R>(g.count(), g.dims().cells());
}

template <class R>
R expectation(const DensityFunction<R>& f) {
  if (f.dim.cells() == 0) throw DimensionError("expectation: empty domain");
  R s(0);
  for (const R& v : f.p) s += v;
  return s / R(f.dim.cells());
}

// --- restrictions (values unchanged; expectations renormalize implicitly) ---

template <class R>
Grid2<R> restrict_grid(const Grid2<R>& g, const std::vector<int>& rows,
                       const std::vector<int>& cols) {
  if (rows.empty() || cols.empty()) throw DimensionError("restrict: empty region");
  Grid2<R> out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= g.nx()) throw DimensionError("restrict: row out of bounds");
    for (size_t j = 0; j < cols.size(); ++j) {
      if (cols[j] < 0 || cols[j] >= g.ny())
        throw DimensionError("restrict: column out of bounds");
      out.at(static_cast<int>(i), static_cast<int>(j)) = g.at(rows[i], cols[j]);
    }
  }
  return out;
}

inline Grid3Indicator restrict_grid(const Grid3Indicator& g, const SubCube& c) {
  if (!c.valid()) throw DimensionError("restrict: empty region");
  Grid3Indicator out(static_cast<int>(c.sx.size()), static_cast<int>(c.sy.size()),
                     static_cast<int>(c.sz.size()));
  for (size_t i = 0; i < c.sx.size(); ++i)
    for (size_t j = 0; j < c.sy.size(); ++j)
      for (size_t k = 0; k < c.sz.size(); ++k) {
        if (c.sx[i] >= g.nx || c.sy[j] >= g.ny || c.sz[k] >= g.nz || c.sx[i] < 0 ||
            c.sy[j] < 0 || c.sz[k] < 0)
          throw DimensionError("restrict: index out of bounds");
        out.at(static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)) =
            g.at(c.sx[i], c.sy[j], c.sz[k]);
      }
  return out;
}

template <class R>
DensityFunction<R> restrict_grid(const DensityFunction<R>& f, const SubCube& c) {
  if (!c.valid()) throw DimensionError("restrict: empty region");
  Dims nd{static_cast<int>(c.sx.size()), static_cast<int>(c.sy.size()),
          static_cast<int>(c.sz.size())};
  DensityFunction<R> out(nd);
  for (size_t i = 0; i < c.sx.size(); ++i)
    for (size_t j = 0; j < c.sy.size(); ++j)
      for (size_t k = 0; k < c.sz.size(); ++k)
        out.at(static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)) =
            f.at(c.sx[i], c.sy[j], c.sz[k]);
  return out;
}

// Both sides of E_{w~p}[S(w)] = (|S|/|Omega|) * E_{w~S}[p(w)]. Exact mode
// returns identical rationals whenever S is nonempty.
template <class R>
struct ChangeOfDistribution {
  R lhs, rhs;
};

template <class R>
ChangeOfDistribution<R> change_of_distribution_check(const DensityFunction<R>& p,
                                                     const Grid3Indicator& S) {
  if (p.dim != S.dims()) throw DimensionError("change_of_distribution: domain mismatch");
  long long cells = p.dim.cells();
  long long sz = S.count();
  if (sz == 0)
    throw DegenerateError("change_of_distribution: S empty, conditional expectation undefined");
  R lhs(0);
  for (long long i = 0; i < cells; ++i)
    if (S.b[static_cast<size_t>(i)]) lhs += p.p[static_cast<size_t>(i)];
  lhs /= R(cells);
  R onS(0);
  for (long long i = 0; i < cells; ++i)
    if (S.b[static_cast<size_t>(i)]) onS += p.p[static_cast<size_t>(i)];
  R rhs = make_ratio<R>(sz, cells) * (onS / R(sz));
  return {lhs, rhs};
}

}  // namespace gridlab

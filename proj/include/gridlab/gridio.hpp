#pragma once

// Text grid format shared by all CLI commands:
//   grid2 nx ny
//   <nx*ny row-major entries>
// or
//   grid3 nx ny nz
//   <nx*ny*nz row-major 0/1 entries>
// Entries are whitespace separated; rationals are written "a/b".

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gridlab/errors.hpp"
#include "gridlab/grid.hpp"

namespace gridlab {

namespace detail {

// Reads tokens while tracking line numbers for error messages.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  bool next(std::string& tok) {
    for (;;) {
      if (pos_ >= line_.size()) {
        if (!std::getline(in_, line_)) return false;
        ++lineno_;
        pos_ = 0;
        continue;
      }
      while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
      if (pos_ >= line_.size()) continue;
      size_t start = pos_;
      while (pos_ < line_.size() && !std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
      tok = line_.substr(start, pos_ - start);
      return true;
    }
  }

  std::string require(const char* what) {
    std::string tok;
    if (!next(tok)) throw ParseError(lineno_ + 1, std::string("expected ") + what);
    return tok;
  }

  int require_int(const char* what) {
    std::string tok = require(what);
    try {
      size_t used = 0;
      int v = std::stoi(tok, &used);
      if (used != tok.size()) throw std::runtime_error("");
      return v;
    } catch (...) {
      throw ParseError(lineno_, std::string("bad integer for ") + what + ": '" + tok + "'");
    }
  }

  int line() const { return lineno_; }

 private:
  std::istream& in_;
  std::string line_;
  size_t pos_ = 0;
  int lineno_ = 0;
};

}  // namespace detail

template <class R>
using AnyGrid = std::variant<Grid2<R>, Grid3Indicator>;

template <class R>
AnyGrid<R> read_grid(std::istream& in) {
  detail::TokenReader tr(in);
  std::string kind = tr.require("grid header 'grid2' or 'grid3'");
  if (kind == "grid2") {
    int nx = tr.require_int("nx"), ny = tr.require_int("ny");
    if (nx < 1 || ny < 1) throw ParseError(tr.line(), "grid2 dimensions must be >= 1");
    Grid2<R> g(nx, ny);
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < ny; ++y) {
        std::string tok = tr.require("grid entry");
        try {
          g.at(x, y) = parse_scalar<R>(tok);
        } catch (const Error&) {
          throw ParseError(tr.line(), "bad entry '" + tok + "'");
        }
        if (g.at(x, y) < R(0)) throw ParseError(tr.line(), "negative entry '" + tok + "'");
      }
    return g;
  }
  if (kind == "grid3") {
    int nx = tr.require_int("nx"), ny = tr.require_int("ny"), nz = tr.require_int("nz");
    if (nx < 1 || ny < 1 || nz < 1) throw ParseError(tr.line(), "grid3 dimensions must be >= 1");
    Grid3Indicator g(nx, ny, nz);
    for (long long i = 0; i < g.dims().cells(); ++i) {
      std::string tok = tr.require("grid entry");
      if (tok == "0")
        g.b[static_cast<size_t>(i)] = 0;
      else if (tok == "1")
        g.b[static_cast<size_t>(i)] = 1;
      else
        throw ParseError(tr.line(), "grid3 entry must be 0 or 1, got '" + tok + "'");
    }
    return g;
  }
  throw ParseError(tr.line(), "unknown grid header '" + kind + "'");
}

template <class R>
AnyGrid<R> read_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open input file: " + path);
  return read_grid<R>(in);
}

template <class R>
Grid2<R> read_grid2_file(const std::string& path) {
  auto g = read_grid_file<R>(path);
  if (!std::holds_alternative<Grid2<R>>(g)) throw Error(path + ": expected a grid2 file");
  return std::get<Grid2<R>>(g);
}

inline Grid3Indicator read_grid3_file(const std::string& path) {
  auto g = read_grid_file<Rational>(path);
  if (!std::holds_alternative<Grid3Indicator>(g)) throw Error(path + ": expected a grid3 file");
  return std::get<Grid3Indicator>(g);
}

template <class R>
void write_grid(std::ostream& out, const Grid2<R>& g) {
  out << "grid2 " << g.nx() << " " << g.ny() << "\n";
  for (int x = 0; x < g.nx(); ++x) {
    for (int y = 0; y < g.ny(); ++y) out << (y ? " " : "") << format_scalar(g.at(x, y));
    out << "\n";
  }
}

inline void write_grid(std::ostream& out, const Grid3Indicator& g) {
  out << "grid3 " << g.nx << " " << g.ny << " " << g.nz << "\n";
  for (int x = 0; x < g.nx; ++x)
    for (int y = 0; y < g.ny; ++y) {
      for (int z = 0; z < g.nz; ++z) out << (z ? " " : "") << int(g.at(x, y, z));
      out << "\n";
    }
}

}  // namespace gridlab

#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gkaccel/geometry.hpp"

namespace gkaccel {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Best-approximation problem: a start point and the sets to intersect.
struct Problem {
  std::size_t dim = 0;
  Vector x0;
  std::vector<AffineSet> sets;
};

// Line-oriented text format:
//
//   dim <d>
//   x0 <d reals>
//   hyperplane <d reals: normal> <offset>
//   point <d reals>
//
// One set per line after the header. Blank lines and '#' comments are ignored.
inline Problem parse_problem(std::istream& in) {
  Problem p;
  std::string raw;
  std::size_t lineno = 0;
  enum { WantDim, WantX0, Sets } state = WantDim;

  auto read_reals = [&](std::istringstream& ss, std::size_t count) {
    Vector v(static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
      std::string tok;
      if (!(ss >> tok)) throw ParseError(lineno, "expected " + std::to_string(count) + " numbers");
      try {
        std::size_t used = 0;
        v[static_cast<Eigen::Index>(i)] = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError(lineno, "not a number: '" + tok + "'");
      }
      if (!std::isfinite(v[static_cast<Eigen::Index>(i)])) throw ParseError(lineno, "non-finite value");
    }
    std::string extra;
    if (ss >> extra) throw ParseError(lineno, "trailing token '" + extra + "'");
    return v;
  };

  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ss(raw);
    std::string key;
    if (!(ss >> key)) continue;

    if (state == WantDim) {
      if (key != "dim") throw ParseError(lineno, "expected 'dim'");
      long long d = 0;
      std::string extra;
      if (!(ss >> d) || d < 1 || (ss >> extra)) throw ParseError(lineno, "bad dimension");
      p.dim = static_cast<std::size_t>(d);
      state = WantX0;
    } else if (state == WantX0) {
      if (key != "x0") throw ParseError(lineno, "expected 'x0'");
      p.x0 = read_reals(ss, p.dim);
      state = Sets;
    } else if (key == "hyperplane") {
      Vector v = read_reals(ss, p.dim + 1);
      try {
        p.sets.push_back(AffineSet::hyperplane(v.head(static_cast<Eigen::Index>(p.dim)),
                                               v[static_cast<Eigen::Index>(p.dim)]));
      } catch (const std::invalid_argument& e) {
        throw ParseError(lineno, e.what());
      }
    } else if (key == "point") {
      p.sets.push_back(AffineSet::point(read_reals(ss, p.dim)));
    } else {
      throw ParseError(lineno, "unknown set kind '" + key + "'");
    }
  }
  if (state != Sets) throw ParseError(lineno + 1, "missing header");
  if (p.sets.empty()) throw ParseError(lineno + 1, "no sets");
  return p;
}

inline Problem parse_problem(const std::string& text) {
  std::istringstream ss(text);
  return parse_problem(ss);
}

inline void write_problem(std::ostream& out, const Problem& p) {
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, " %.17g", v);
    out << buf;
  };
  out << "dim " << p.dim << "\nx0";
  for (auto v : p.x0) put(v);
  out << '\n';
  for (const auto& s : p.sets) {
    if (s.kind() == AffineSet::Kind::Hyperplane) {
      out << "hyperplane";
      for (auto v : s.normal()) put(v);
      put(s.offset());
    } else if (s.kind() == AffineSet::Kind::Span && s.affine_dim() == 0) {
      out << "point";
      for (auto v : s.anchor()) put(v);
    } else {
      throw UnsupportedOperation("problem files hold hyperplanes and points only");
    }
    out << '\n';
  }
}

}  // namespace gkaccel

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace stab {

enum class SpaceKind { Circle, Torus2, CircleTimesTorus2 };

struct PhaseSpace {
  SpaceKind kind = SpaceKind::Torus2;

  constexpr int dim() const {
    switch (kind) {
      case SpaceKind::Circle: return 1;
      case SpaceKind::Torus2: return 2;
      case SpaceKind::CircleTimesTorus2: return 3;
    }
    return 0;
  }
  friend constexpr bool operator==(PhaseSpace, PhaseSpace) = default;

  static constexpr PhaseSpace circle() { return {SpaceKind::Circle}; }
  static constexpr PhaseSpace torus() { return {SpaceKind::Torus2}; }
  static constexpr PhaseSpace product() { return {SpaceKind::CircleTimesTorus2}; }
};

inline std::string to_string(PhaseSpace s) {
  switch (s.kind) {
    case SpaceKind::Circle: return "circle";
    case SpaceKind::Torus2: return "torus2";
    case SpaceKind::CircleTimesTorus2: return "circle_x_torus2";
  }
  return "?";
}

/// Canonical representative in [0,1).
inline double wrap(double c) {
  if (!std::isfinite(c)) throw std::domain_error("non-finite coordinate");
  double r = c - std::floor(c);
  // c - floor(c) can round up to 1 for tiny negative c
  if (r >= 1.0) r = 0.0;
  return r;
}

/// Signed representative of a-b in [-0.5, 0.5).
inline double wdiff(double a, double b) {
  double d = a - b;
  d -= std::floor(d + 0.5);
  return d;
}

struct Point {
  std::array<double, 3> c{};
  int n = 0;

  Point() = default;
  Point(std::initializer_list<double> xs) {
    if (xs.size() > 3) throw std::invalid_argument("point dimension > 3");
    for (double x : xs) c[n++] = x;
  }
  static Point of(int dim) {
    Point p;
    p.n = dim;
    return p;
  }

  int dim() const { return n; }
  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }
  const double* begin() const { return c.data(); }
  const double* end() const { return c.data() + n; }
  friend bool operator==(const Point& a, const Point& b) {
    if (a.n != b.n) return false;
    for (int i = 0; i < a.n; ++i)
      if (a.c[i] != b.c[i]) return false;
    return true;
  }
};

inline Point wrapped(Point p) {
  for (int i = 0; i < p.n; ++i) p.c[i] = wrap(p.c[i]);
  return p;
}

inline Point make_point(PhaseSpace s, const std::vector<double>& xs) {
  if (static_cast<int>(xs.size()) != s.dim()) throw std::invalid_argument("space mismatch");
  Point p = Point::of(s.dim());
  for (int i = 0; i < p.n; ++i) p.c[i] = xs[i];
  return wrapped(p);
}

inline void check_space(PhaseSpace s, const Point& x) {
  if (x.n != s.dim()) throw std::invalid_argument("space mismatch");
}

/// Flat quotient metric; the product uses the max of the factor distances.
inline double distance(PhaseSpace s, const Point& x, const Point& y) {
  check_space(s, x);
  check_space(s, y);
  auto ax = [&](int i) {
    double d = std::abs(x.c[i] - y.c[i]);
    d -= std::floor(d);
    return std::min(d, 1.0 - d);
  };
  switch (s.kind) {
    case SpaceKind::Circle: return ax(0);
    case SpaceKind::Torus2: return std::hypot(ax(0), ax(1));
    case SpaceKind::CircleTimesTorus2: return std::max(ax(0), std::hypot(ax(1), ax(2)));
  }
  return 0.0;
}

inline bool same_point(PhaseSpace s, const Point& x, const Point& y, double tol = 1e-12) {
  return distance(s, x, y) < tol;
}

inline double diameter_bound(PhaseSpace s) {
  return s.kind == SpaceKind::Circle ? 0.5 : std::sqrt(0.5);
}

struct UniformGrid {
  int resolution = 0;
};
struct RandomUniform {
  std::size_t count = 0;
  std::uint64_t seed = 0;
};
using Sampler = std::variant<UniformGrid, RandomUniform>;

/// Portable uniform double in [0,1) from a 64-bit engine.
inline double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::vector<Point> sample(PhaseSpace s, const Sampler& sm) {
  const int d = s.dim();
  std::vector<Point> out;
  if (auto g = std::get_if<UniformGrid>(&sm)) {
    if (g->resolution <= 0) throw std::invalid_argument("empty sampler");
    const int r = g->resolution;
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(r);
    out.reserve(total);
    std::array<int, 3> idx{};
    for (std::size_t k = 0; k < total; ++k) {
      Point p = Point::of(d);
      for (int i = 0; i < d; ++i) p.c[i] = static_cast<double>(idx[i]) / r;
      out.push_back(p);
      for (int i = d - 1; i >= 0; --i) {
        if (++idx[i] < r) break;
        idx[i] = 0;
      }
    }
  } else {
    const auto& ru = std::get<RandomUniform>(sm);
    if (ru.count == 0) throw std::invalid_argument("empty sampler");
    std::mt19937_64 rng(ru.seed);
    out.reserve(ru.count);
    for (std::size_t k = 0; k < ru.count; ++k) {
      Point p = Point::of(d);
      for (int i = 0; i < d; ++i) p.c[i] = unit_double(rng);
      out.push_back(p);
    }
  }
  return out;
}

inline std::string describe(const Sampler& sm) {
  if (auto g = std::get_if<UniformGrid>(&sm)) return "grid:" + std::to_string(g->resolution);
  const auto& r = std::get<RandomUniform>(sm);
  return "random:" + std::to_string(r.count) + ":" + std::to_string(r.seed);
}

/// Parses "grid:R" or "random:COUNT[:SEED]".
inline Sampler parse_sampler(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("bad sampler: " + text);
  std::string kind = text.substr(0, colon), rest = text.substr(colon + 1);
  if (kind == "grid") return UniformGrid{std::stoi(rest)};
  if (kind == "random") {
    auto c2 = rest.find(':');
    RandomUniform r;
    r.count = std::stoul(rest.substr(0, c2));
    r.seed = c2 == std::string::npos ? 1 : std::stoull(rest.substr(c2 + 1));
    return r;
  }
  throw std::invalid_argument("bad sampler: " + text);
}

}  // namespace stab

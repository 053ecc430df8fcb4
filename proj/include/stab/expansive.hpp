#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "parallel.hpp"

namespace stab {

struct SeparationReport {
  Point x, y;
  std::optional<int> n;
  double separation = 0;  // at n if found, otherwise the max over |n| <= horizon
  int horizon = 0;
  double eps = 0;
};

namespace detail {
/// Orbit samples f^n(x) for n in [-N, N], stored at index n + N.
inline std::vector<Point> two_sided_orbit(const Diffeo& f, const Point& x, int N) {
  std::vector<Point> o(static_cast<std::size_t>(2 * N + 1));
  o[static_cast<std::size_t>(N)] = x;
  for (int n = 1; n <= N; ++n) {
    o[static_cast<std::size_t>(N + n)] = f.forward(o[static_cast<std::size_t>(N + n - 1)]);
    o[static_cast<std::size_t>(N - n)] = f.inverse(o[static_cast<std::size_t>(N - n + 1)]);
  }
  return o;
}

/// Smallest |n| with separation > eps, positive n first on ties.
inline void scan_separation(PhaseSpace s, const std::vector<Point>& ox, const std::vector<Point>& oy, int N, double eps,
                            std::optional<int>& n_out, double& sep) {
  double best = 0;
  for (int k = 0; k <= N; ++k) {
    for (int sg : {1, -1}) {
      if (k == 0 && sg < 0) continue;
      const int n = sg * k;
      const double d = distance(s, ox[static_cast<std::size_t>(N + n)], oy[static_cast<std::size_t>(N + n)]);
      if (d > eps) {
        n_out = n;
        sep = d;
        return;
      }
      best = std::max(best, d);
    }
  }
  n_out.reset();
  sep = best;
}
}  // namespace detail

inline SeparationReport separation_time(const Diffeo& f, const Point& x, const Point& y, double eps, int N) {
  const PhaseSpace s = f.space();
  if (distance(s, x, y) <= 1e-14) throw std::invalid_argument("degenerate pair");
  if (N < 0) throw std::invalid_argument("negative horizon");
  SeparationReport r{x, y, std::nullopt, 0, N, eps};
  auto ox = detail::two_sided_orbit(f, x, N), oy = detail::two_sided_orbit(f, y, N);
  detail::scan_separation(s, ox, oy, N, eps, r.n, r.separation);
  return r;
}

struct FailingPair {
  Point x, y;
  double max_separation = 0;
};

struct DenseExpansivenessReport {
  std::size_t pairs_tested = 0, pairs_separated = 0;
  double fraction = 0;
  double eps = 0;
  int horizon = 0;
  int max_time_used = 0;
  std::vector<FailingPair> failing;
  bool subsampled = false;
};

/// Fraction of pairs of D separated beyond eps within |n| <= N. max_pairs = 0 tests all pairs.
inline DenseExpansivenessReport dense_expansiveness_probe(const Diffeo& f, const std::vector<Point>& D, double eps, int N,
                                                          std::size_t max_pairs = 100000, std::uint64_t seed = 17) {
  const PhaseSpace s = f.space();
  DenseExpansivenessReport r;
  r.eps = eps;
  r.horizon = N;
  std::vector<std::vector<Point>> orbits(D.size());
  parallel_for(D.size(), [&](std::size_t i) { orbits[i] = detail::two_sided_orbit(f, D[i], N); });
  const std::size_t m = D.size();
  const std::size_t total = m < 2 ? 0 : m * (m - 1) / 2;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  if (max_pairs == 0 || total <= max_pairs) {
    pairs.reserve(total);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
  } else {
    r.subsampled = true;
    std::mt19937_64 rng(seed);
    std::set<std::pair<std::uint32_t, std::uint32_t>> chosen;
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    while (chosen.size() < max_pairs) {
      std::size_t i = pick(rng), j = pick(rng);
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      chosen.emplace(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    }
    pairs.assign(chosen.begin(), chosen.end());
  }
  std::vector<int> time(pairs.size());
  std::vector<double> sep(pairs.size());
  std::vector<char> ok(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k) {
    auto [i, j] = pairs[k];
    if (distance(s, D[i], D[j]) <= 1e-14) throw std::invalid_argument("degenerate pair");
    std::optional<int> n;
    detail::scan_separation(s, orbits[i], orbits[j], N, eps, n, sep[k]);
    ok[k] = n.has_value();
    time[k] = n ? std::abs(*n) : -1;
  });
  r.pairs_tested = pairs.size();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (ok[k]) {
      ++r.pairs_separated;
      r.max_time_used = std::max(r.max_time_used, time[k]);
    } else {
      r.failing.push_back({D[pairs[k].first], D[pairs[k].second], sep[k]});
    }
  }
  r.fraction = r.pairs_tested ? static_cast<double>(r.pairs_separated) / static_cast<double>(r.pairs_tested) : 1.0;
  return r;
}

/// Unit directions used to place companions at distance delta.
inline std::vector<std::array<double, 3>> companion_directions(PhaseSpace s) {
  std::vector<std::array<double, 3>> dirs;
  switch (s.kind) {
    case SpaceKind::Circle:
      dirs = {{1, 0, 0}, {-1, 0, 0}};
      break;
    case SpaceKind::Torus2:
      for (int k = 0; k < 8; ++k) {
        const double a = k * std::numbers::pi / 4;
        dirs.push_back({std::cos(a), std::sin(a), 0});
      }
      break;
    case SpaceKind::CircleTimesTorus2: {
      for (int i = 0; i < 3; ++i)
        for (double sg : {1.0, -1.0}) {
          std::array<double, 3> d{0, 0, 0};
          d[static_cast<std::size_t>(i)] = sg;
          dirs.push_back(d);
        }
      const double c = 1 / std::sqrt(3.0);
      for (int m = 0; m < 8; ++m) dirs.push_back({(m & 1 ? -c : c), (m & 2 ? -c : c), (m & 4 ? -c : c)});
      break;
    }
  }
  return dirs;
}

struct SensitivityReport {
  std::size_t points = 0, with_witness = 0;
  double fraction = 0;
  double delta = 0, eps = 0;
  int horizon = 0;
  std::vector<Point> without_witness;
};

/// For each base point, looks for a companion at distance delta that separates beyond eps within |n| <= N.
inline SensitivityReport sensitivity_probe(const Diffeo& f, const std::vector<Point>& base, double delta, double eps, int N) {
  if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
  const PhaseSpace s = f.space();
  auto dirs = companion_directions(s);
  std::vector<char> hit(base.size());
  parallel_for(base.size(), [&](std::size_t i) {
    const Point& x = base[i];
    auto ox = detail::two_sided_orbit(f, x, N);
    hit[i] = 0;
    for (const auto& d : dirs) {
      Point y = x;
      for (int a = 0; a < s.dim(); ++a) y[a] = wrap(y[a] + delta * d[static_cast<std::size_t>(a)]);
      auto oy = detail::two_sided_orbit(f, y, N);
      std::optional<int> n;
      double sep = 0;
      detail::scan_separation(s, ox, oy, N, eps, n, sep);
      if (n) {
        hit[i] = 1;
        break;
      }
    }
  });
  SensitivityReport r;
  r.points = base.size();
  r.delta = delta;
  r.eps = eps;
  r.horizon = N;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (hit[i]) ++r.with_witness;
    else r.without_witness.push_back(base[i]);
  }
  r.fraction = r.points ? static_cast<double>(r.with_witness) / static_cast<double>(r.points) : 1.0;
  return r;
}

struct ShrinkingBallCertificate {
  double lo = 0, hi = 0;          // the arc B = [lo, hi]
  double max_diameter = 0;        // largest diam f^n(B) observed up to the horizons
  double certified_bound = 0;     // strict upper bound on diam f^n(B) for all integers n
  int argmax = 0;
  int horizon_forward = 0, horizon_backward = 0;
  int horizon = 0;
  std::string tail = "MonotoneTail";
  double eps = 0;
  bool valid = false;             // certified_bound < eps
};

inline constexpr double certificate_margin = 1e-12;

/// Arc around 1/4 whose iterates stay shorter than eps. Past the horizons both endpoints sit in
/// collars where the map (forward) or its inverse (backward) has derivative <= 1, so diameters only shrink.
inline ShrinkingBallCertificate shrinking_ball_certificate(const NorthSouth& f, double eps, int cap = 10000) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  if (eps >= 0.5) throw std::invalid_argument("no certificate needed at this scale");
  ShrinkingBallCertificate c;
  c.eps = eps;
  const double w = eps / 2;
  c.lo = 0.25 - w / 2;
  c.hi = 0.25 + w / 2;
  c.max_diameter = c.hi - c.lo;
  auto in_fwd = [](double x) { return x >= 0.25 && x < 0.5; };
  auto in_bwd = [](double x) { return x > 0.0 && x <= 0.25; };
  double a = c.lo, b = c.hi;
  int n = 0;
  while (!(in_fwd(a) && in_fwd(b))) {
    if (++n > cap) throw std::runtime_error("certificate horizon exceeded");
    a = f.forward({a})[0];
    b = f.forward({b})[0];
    if (b - a > c.max_diameter) {
      c.max_diameter = b - a;
      c.argmax = n;
    }
  }
  c.horizon_forward = n;
  a = c.lo;
  b = c.hi;
  n = 0;
  while (!(in_bwd(a) && in_bwd(b))) {
    if (++n > cap) throw std::runtime_error("certificate horizon exceeded");
    a = f.inverse({a})[0];
    b = f.inverse({b})[0];
    if (b - a > c.max_diameter) {
      c.max_diameter = b - a;
      c.argmax = -n;
    }
  }
  c.horizon_backward = n;
  c.horizon = std::max(c.horizon_forward, c.horizon_backward);
  c.certified_bound = c.max_diameter + certificate_margin;
  c.valid = c.certified_bound < eps;
  return c;
}

/// Max of diam f^n(B) over |n| <= N, by direct iteration of the endpoints.
inline double sampled_max_diameter(const NorthSouth& f, double lo, double hi, int N) {
  double m = hi - lo;
  double a = lo, b = hi;
  for (int n = 1; n <= N; ++n) {
    a = f.forward({a})[0];
    b = f.forward({b})[0];
    m = std::max(m, b - a);
  }
  a = lo;
  b = hi;
  for (int n = 1; n <= N; ++n) {
    a = f.inverse({a})[0];
    b = f.inverse({b})[0];
    m = std::max(m, b - a);
  }
  return m;
}

/// Integer offsets ordered by |m|+|n|, then m, then n.
inline std::vector<std::pair<int, int>> lattice_offsets(std::size_t count) {
  std::vector<std::pair<int, int>> out;
  for (int L = 0; out.size() < count; ++L)
    for (int m = -L; m <= L && out.size() < count; ++m) {
      const int r = L - std::abs(m);
      out.emplace_back(m, -r);
      if (r != 0 && out.size() < count) out.emplace_back(m, r);
    }
  return out;
}

/// Homoclinic points of the fixed point: s e_s = u e_u + (m,n). For the DA map the bump disk and
/// the repeller itself are excluded.
inline std::vector<Point> heteroclinic_separated_set(const Diffeo& f, std::size_t count) {
  if (count < 1) throw std::invalid_argument("count must be positive");
  Frame F;
  Point p{0.0, 0.0};
  const DerivedFromAnosov* da = dynamic_cast<const DerivedFromAnosov*>(&f);
  if (da) {
    F = da->frame();
    p = da->center();
  } else if (auto lin = dynamic_cast<const LinearAnosov*>(&f)) {
    F = lin->frame();
  } else {
    throw std::invalid_argument("heteroclinic set needs a linear Anosov or derived-from-Anosov map");
  }
  // [e_s, -e_u] (s,u)^T = (m,n)
  const double a = F.e_s[0], b = -F.e_u[0], c = F.e_s[1], d = -F.e_u[1];
  const double det = a * d - b * c;
  std::vector<Point> out;
  for (std::size_t batch = count;; batch *= 2) {
    out.clear();
    for (auto [m, n] : lattice_offsets(batch)) {
      const double s = (d * m - b * n) / det;
      Point x{wrap(p[0] + s * F.e_s[0]), wrap(p[1] + s * F.e_s[1])};
      if (da && (m == 0 && n == 0)) continue;
      if (da && da->in_support(x)) continue;
      out.push_back(x);
      if (out.size() == count) return out;
    }
  }
}

/// (s, u) of a lattice offset; exposed for tests.
inline std::pair<double, double> homoclinic_coordinates(const Frame& F, int m, int n) {
  const double a = F.e_s[0], b = -F.e_u[0], c = F.e_s[1], d = -F.e_u[1];
  const double det = a * d - b * c;
  return {(d * m - b * n) / det, (-c * m + a * n) / det};
}

}  // namespace stab

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "homeo.hpp"
#include "parallel.hpp"

namespace stab {

/// Raised when the outer Moser iteration leaves the perturbative regime.
struct PerturbationTooLarge : std::runtime_error {
  PerturbationTooLarge() : std::runtime_error("perturbation too large") {}
};

enum class OffGridEval { Series, Bilinear };

struct MoserOptions {
  int resolution = 256;
  double tol_inner = 1e-15;
  double tol_outer = 1e-14;
  int max_outer = 100;
  OffGridEval eval = OffGridEval::Series;
  std::size_t sweep_count = 2000;
  std::uint64_t sweep_seed = 20240611;
};

/// h(x) = x + u(x) on T^2 with u stored at the nodes of a periodic grid.
class GridHomeo final : public HomeoPiece {
 public:
  PhaseSpace space() const override { return PhaseSpace::torus(); }
  std::string kind() const override { return "grid_homeo"; }

  int resolution() const { return n_; }
  const std::vector<Vec2>& nodes() const { return u_; }
  Vec2 node(int i, int j) const { return u_[static_cast<std::size_t>(idx(i, j))]; }
  double residual() const { return residual_; }
  int iterations_used() const { return iterations_; }
  int series_terms() const { return terms_; }
  double sup_u() const { return sup_u_; }
  const std::vector<double>& node_residual_history() const { return history_; }
  const std::vector<double>& update_history() const { return updates_; }
  OffGridEval eval_mode() const { return mode_; }
  const std::vector<Point>& residual_sweep() const { return sweep_; }
  double eps() const { return g_->eps(); }

  /// Periodic bilinear interpolation of the node field.
  Vec2 bilinear(double x, double y) const {
    const double gx = wrap(x) * n_, gy = wrap(y) * n_;
    int i0 = static_cast<int>(gx), j0 = static_cast<int>(gy);
    const double tx = gx - i0, ty = gy - j0;
    i0 %= n_;
    j0 %= n_;
    const int i1 = (i0 + 1) % n_, j1 = (j0 + 1) % n_;
    const Vec2 &a = node(i0, j0), &b = node(i1, j0), &c = node(i0, j1), &d = node(i1, j1);
    Vec2 r;
    for (int k = 0; k < 2; ++k)
      r[k] = a[k] * (1 - tx) * (1 - ty) + b[k] * tx * (1 - ty) + c[k] * (1 - tx) * ty + d[k] * tx * ty;
    return r;
  }

  /// Off-grid displacement: one twisted-series application to eps p(y + u_bilinear(y)), or plain bilinear.
  Vec2 displacement(double x, double y) const {
    if (mode_ == OffGridEval::Bilinear) return bilinear(x, y);
    auto phi = [&](double a, double b) {
      Vec2 w = bilinear(a, b);
      Vec2 q = g_->field()(a + w[0], b + w[1]);
      return Vec2{g_->eps() * q[0], g_->eps() * q[1]};
    };
    const Frame& F = frame_;
    double us = 0, uu = 0;
    Point z{wrap(x), wrap(y)};
    double w = 1.0 / F.lambda_u;
    for (int n = 0; n < terms_; ++n) {
      Vec2 ph = phi(z[0], z[1]);
      uu -= w * F.u_of(ph);
      w /= F.lambda_u;
      z = A_->forward(z);
    }
    z = A_->inverse(Point{wrap(x), wrap(y)});
    w = 1.0;
    for (int n = 1; n <= terms_; ++n) {
      Vec2 ph = phi(z[0], z[1]);
      us += w * F.s_of(ph);
      w *= F.lambda_s;
      z = A_->inverse(z);
    }
    return F.compose(us, uu);
  }

  Point forward(const Point& x) const override {
    check_space(space(), x);
    Vec2 d = displacement(x[0], x[1]);
    return {wrap(x[0] + d[0]), wrap(x[1] + d[1])};
  }

  /// Solves z + u(z) = y by fixed-point iteration.
  Point inverse(const Point& y) const override {
    check_space(space(), y);
    Point z = y;
    for (int it = 0; it < 200; ++it) {
      Vec2 d = displacement(z[0], z[1]);
      Point nz{wrap(y[0] - d[0]), wrap(y[1] - d[1])};
      const double step = std::hypot(wdiff(nz[0], z[0]), wdiff(nz[1], z[1]));
      z = nz;
      if (step <= 1e-17) break;
    }
    return z;
  }

  /// Number of grid cells whose image triangles are degenerate or flipped.
  int injectivity_violations() const {
    int bad = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        auto corner = [&](int di, int dj) {
          Vec2 w = node((i + di) % n_, (j + dj) % n_);
          return Vec2{static_cast<double>(i + di) / n_ + w[0], static_cast<double>(j + dj) / n_ + w[1]};
        };
        Vec2 a = corner(0, 0), b = corner(1, 0), c = corner(1, 1), d = corner(0, 1);
        auto cross = [](Vec2 p, Vec2 q, Vec2 r) {
          return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
        };
        if (cross(a, b, c) <= 0 || cross(a, c, d) <= 0) ++bad;
      }
    return bad;
  }

 private:
  friend std::shared_ptr<const GridHomeo> moser_solve(std::shared_ptr<const LinearAnosov>,
                                                      std::shared_ptr<const PerturbedAnosov>, const MoserOptions&);
  int idx(int i, int j) const { return i * n_ + j; }

  std::shared_ptr<const LinearAnosov> A_;
  std::shared_ptr<const PerturbedAnosov> g_;
  Frame frame_;
  int n_ = 0, terms_ = 0, iterations_ = 0;
  std::vector<Vec2> u_;
  double residual_ = 0, sup_u_ = 0;
  std::vector<double> history_, updates_;
  std::vector<Point> sweep_;
  OffGridEval mode_ = OffGridEval::Series;
};

/// Contraction factor bound of the outer iteration.
inline double moser_contraction(const Frame& F, const FourierField& p, double eps) {
  const double ns = std::hypot(F.dual[0][0], F.dual[0][1]) * std::hypot(F.e_s[0], F.e_s[1]);
  const double nu = std::hypot(F.dual[1][0], F.dual[1][1]) * std::hypot(F.e_u[0], F.e_u[1]);
  const double ls = std::abs(F.lambda_s), lu = std::abs(F.lambda_u);
  return std::abs(eps) * p.lipschitz_bound() * (ns / (1 - ls) + nu / (lu - 1));
}

/// Solves h o A = g o h with h = id + u by iterating the twisted cohomological equation.
inline std::shared_ptr<const GridHomeo> moser_solve(std::shared_ptr<const LinearAnosov> A,
                                                    std::shared_ptr<const PerturbedAnosov> g,
                                                    const MoserOptions& opt = {}) {
  if (!A || !g) throw std::invalid_argument("null map");
  if (!(g->base().matrix() == A->matrix())) throw std::invalid_argument("perturbation of a different matrix");
  if (opt.resolution < 2) throw std::invalid_argument("resolution too small");
  const Frame& F = A->frame();
  if (moser_contraction(F, g->field(), g->eps()) >= 1.0) throw PerturbationTooLarge();

  auto out = std::make_shared<GridHomeo>();
  GridHomeo& H = *out;
  H.A_ = A;
  H.g_ = g;
  H.frame_ = F;
  H.mode_ = opt.eval;
  const int N = opt.resolution;
  H.n_ = N;
  const std::size_t total = static_cast<std::size_t>(N) * N;
  H.u_.assign(total, Vec2{0, 0});
  const Mat2 M = A->matrix(), Mi = M.inverse();
  auto mod = [N](std::int64_t v) { return static_cast<int>(((v % N) + N) % N); };
  const double eps = g->eps();
  const double lam = std::max(std::abs(F.lambda_s), 1.0 / std::abs(F.lambda_u));

  std::vector<double> phs(total), phu(total);
  std::vector<Vec2> next(total);
  for (int k = 1; k <= opt.max_outer; ++k) {
    double supphi = 0;
    for (std::size_t id = 0; id < total; ++id) {
      const int i = static_cast<int>(id / N), j = static_cast<int>(id % N);
      const Vec2& w = H.u_[id];
      Vec2 q = g->field()(static_cast<double>(i) / N + w[0], static_cast<double>(j) / N + w[1]);
      Vec2 ph{eps * q[0], eps * q[1]};
      phs[id] = F.s_of(ph);
      phu[id] = F.u_of(ph);
      supphi = std::max({supphi, std::abs(phs[id]), std::abs(phu[id])});
    }
    int terms = 1;
    while (terms < 400 && std::pow(lam, terms) * supphi / (1 - lam) >= opt.tol_inner) ++terms;
    H.terms_ = std::max(H.terms_, terms);
    parallel_for(total, [&](std::size_t id) {
      const int i0 = static_cast<int>(id / N), j0 = static_cast<int>(id % N);
      double uu = 0, us = 0, w = 1.0 / F.lambda_u;
      int i = i0, j = j0;
      for (int n = 0; n < terms; ++n) {
        uu -= w * phu[static_cast<std::size_t>(i) * N + j];
        w /= F.lambda_u;
        const int ni = mod(M.a * i + M.b * j), nj = mod(M.c * i + M.d * j);
        i = ni;
        j = nj;
      }
      i = i0;
      j = j0;
      w = 1.0;
      for (int n = 1; n <= terms; ++n) {
        const int ni = mod(Mi.a * i + Mi.b * j), nj = mod(Mi.c * i + Mi.d * j);
        i = ni;
        j = nj;
        us += w * phs[static_cast<std::size_t>(i) * N + j];
        w *= F.lambda_s;
      }
      next[id] = F.compose(us, uu);
    });
    double diff = 0, supu = 0;
    for (std::size_t id = 0; id < total; ++id) {
      diff = std::max(diff, std::hypot(next[id][0] - H.u_[id][0], next[id][1] - H.u_[id][1]));
      supu = std::max(supu, std::hypot(next[id][0], next[id][1]));
    }
    H.u_.swap(next);
    H.iterations_ = k;
    H.sup_u_ = supu;
    H.updates_.push_back(diff);
    if (!(supu < 0.25)) throw PerturbationTooLarge();
    // node residual |u(Ax) - A u(x) - eps p(x + u(x))|
    double res = 0;
    for (std::size_t id = 0; id < total; ++id) {
      const int i = static_cast<int>(id / N), j = static_cast<int>(id % N);
      const Vec2& w = H.u_[id];
      const Vec2& wa = H.u_[static_cast<std::size_t>(mod(M.a * i + M.b * j)) * N + mod(M.c * i + M.d * j)];
      Vec2 Aw = M.apply(w);
      Vec2 q = g->field()(static_cast<double>(i) / N + w[0], static_cast<double>(j) / N + w[1]);
      res = std::max(res, std::hypot(wa[0] - Aw[0] - eps * q[0], wa[1] - Aw[1] - eps * q[1]));
    }
    H.history_.push_back(res);
    if (diff < opt.tol_outer) break;
    if (k == opt.max_outer) throw PerturbationTooLarge();
  }

  H.sweep_ = sample(PhaseSpace::torus(), RandomUniform{opt.sweep_count, opt.sweep_seed});
  const GridHomeo& cref = H;
  H.residual_ = sup_over(H.sweep_, [&](const Point& x) {
                  return distance(PhaseSpace::torus(), cref.forward(A->forward(x)), g->forward(cref.forward(x)));
                }).value;
  return out;
}

inline Homeo as_homeo(std::shared_ptr<const GridHomeo> h) { return Homeo::custom(std::move(h)); }

/// F_h(f~) = h o f~
inline Homeo F_h(const Homeo& h, const Homeo& tilde_f) { return h * tilde_f; }

/// F_h^-1(k) = h^-1 o k
inline Homeo F_h_inverse(const Homeo& h, const Homeo& k) { return h.inv() * k; }

/// Carries a commuter of f to a commuter of g, where h o f = g o h.
inline Homeo push_centralizer(const Homeo& h_g, const Homeo& tilde_f) { return h_g * tilde_f * h_g.inv(); }

}  // namespace stab

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "geometry.hpp"

namespace stab {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

using Vec2 = std::array<double, 2>;

/// Integer 2x2 matrix [[a,b],[c,d]].
struct Mat2 {
  std::int64_t a = 1, b = 0, c = 0, d = 1;

  std::int64_t det() const { return a * d - b * c; }
  std::int64_t trace() const { return a + d; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;

  static Mat2 identity() { return {}; }

  /// Integer inverse; only for det = +-1.
  Mat2 inverse() const {
    auto dt = det();
    if (dt != 1 && dt != -1) throw std::invalid_argument("matrix not unimodular");
    return {d * dt, -b * dt, -c * dt, a * dt};
  }

  Mat2 pow(int n) const {
    if (n < 0) return inverse().pow(-n);
    if (n > 40) throw std::invalid_argument("matrix power too large");
    Mat2 r = identity(), base = *this;
    for (int i = 0; i < n; ++i) r = r * base;
    return r;
  }

  Vec2 apply(Vec2 v) const {
    return {static_cast<double>(a) * v[0] + static_cast<double>(b) * v[1],
            static_cast<double>(c) * v[0] + static_cast<double>(d) * v[1]};
  }
};

/// Eigen data of a hyperbolic 2x2 matrix. dual rows give the s and u coordinates.
struct Frame {
  Vec2 e_s{}, e_u{};
  double lambda_s = 0, lambda_u = 0;
  std::array<Vec2, 2> dual{};

  double s_of(Vec2 v) const { return dual[0][0] * v[0] + dual[0][1] * v[1]; }
  double u_of(Vec2 v) const { return dual[1][0] * v[0] + dual[1][1] * v[1]; }
  Vec2 compose(double s, double u) const {
    return {s * e_s[0] + u * e_u[0], s * e_s[1] + u * e_u[1]};
  }
};

namespace detail {
inline Vec2 eigvec(const Mat2& m, double lam) {
  Vec2 v;
  if (m.b != 0)
    v = {static_cast<double>(m.b), lam - static_cast<double>(m.a)};
  else
    v = {lam - static_cast<double>(m.d), static_cast<double>(m.c)};
  if (v[0] == 0 && v[1] == 0) v = {1, 0};
  double n = std::hypot(v[0], v[1]);
  v = {v[0] / n, v[1] / n};
  if (v[0] < 0 || (v[0] == 0 && v[1] < 0)) v = {-v[0], -v[1]};
  return v;
}
}  // namespace detail

inline Frame stable_unstable_frame(const Mat2& m) {
  const double tr = static_cast<double>(m.trace()), dt = static_cast<double>(m.det());
  const double disc = tr * tr - 4.0 * dt;
  if (disc < 0) throw std::domain_error("not hyperbolic");
  const double sq = std::sqrt(disc);
  double l1 = (tr + sq) / 2, l2 = (tr - sq) / 2;
  if (std::abs(std::abs(l1) - 1.0) < 1e-9 || std::abs(std::abs(l2) - 1.0) < 1e-9)
    throw std::domain_error("not hyperbolic");
  if (std::abs(l1) < std::abs(l2)) std::swap(l1, l2);
  if (std::abs(l1) < 1.0 || std::abs(l2) > 1.0) throw std::domain_error("not hyperbolic");
  // recompute the small root from the product to avoid cancellation
  l2 = dt / l1;
  Frame f;
  f.lambda_u = l1;
  f.lambda_s = l2;
  f.e_u = detail::eigvec(m, l1);
  f.e_s = detail::eigvec(m, l2);
  const double a = f.e_s[0], b = f.e_u[0], c = f.e_s[1], d = f.e_u[1];
  const double det = a * d - b * c;
  f.dual[0] = {d / det, -b / det};
  f.dual[1] = {-c / det, a / det};
  return f;
}

/// |det(A^n - I)|, the number of fixed points of A^n on the torus.
inline std::int64_t periodic_point_count_linear(const Mat2& m, int n) {
  if (n <= 0) throw std::invalid_argument("period must be positive");
  Mat2 p = m.pow(n);
  std::int64_t x, y, dt;
  if (__builtin_mul_overflow(p.a - 1, p.d - 1, &x) || __builtin_mul_overflow(p.b, p.c, &y) || __builtin_sub_overflow(x, y, &dt))
    throw std::overflow_error("periodic point count overflows");
  return dt < 0 ? -dt : dt;
}

/// Counts rational points k/D (D = |det(A^n-I)|) fixed by A^n, by exhaustive search.
inline std::int64_t periodic_point_count_lattice(const Mat2& m, int n) {
  const std::int64_t D = periodic_point_count_linear(m, n);
  if (D == 0) throw std::domain_error("not hyperbolic");
  if (D > 5000) throw std::invalid_argument("lattice too large for brute force");
  Mat2 p = m.pow(n);
  auto md = [D](std::int64_t v) { return ((v % D) + D) % D; };
  std::int64_t count = 0;
  for (std::int64_t i = 0; i < D; ++i)
    for (std::int64_t j = 0; j < D; ++j)
      if (md(p.a * i + p.b * j) == i && md(p.c * i + p.d * j) == j) ++count;
  return count;
}

/// Trigonometric vector field p(x) = sum_k sin(2 pi k.x) s_k + cos(2 pi k.x) c_k.
struct FourierTerm {
  int k1 = 0, k2 = 0;
  Vec2 sin_coef{}, cos_coef{};
};

struct FourierField {
  std::vector<FourierTerm> terms;

  Vec2 operator()(double x, double y) const {
    Vec2 r{0, 0};
    for (const auto& t : terms) {
      const double ph = two_pi * (t.k1 * x + t.k2 * y);
      const double sn = std::sin(ph), cs = std::cos(ph);
      r[0] += sn * t.sin_coef[0] + cs * t.cos_coef[0];
      r[1] += sn * t.sin_coef[1] + cs * t.cos_coef[1];
    }
    return r;
  }

  /// Jacobian rows: d p_i / d x_j.
  std::array<Vec2, 2> jacobian(double x, double y) const {
    std::array<Vec2, 2> J{};
    for (const auto& t : terms) {
      const double ph = two_pi * (t.k1 * x + t.k2 * y);
      const double sn = std::sin(ph), cs = std::cos(ph);
      for (int i = 0; i < 2; ++i) {
        const double g = two_pi * (cs * t.sin_coef[i] - sn * t.cos_coef[i]);
        J[i][0] += g * t.k1;
        J[i][1] += g * t.k2;
      }
    }
    return J;
  }

  /// Upper bound on the Lipschitz constant (Euclidean).
  double lipschitz_bound() const {
    double L = 0;
    for (const auto& t : terms) {
      const double kn = std::hypot(t.k1, t.k2);
      L += two_pi * kn * (std::hypot(t.sin_coef[0], t.sin_coef[1]) + std::hypot(t.cos_coef[0], t.cos_coef[1]));
    }
    return L;
  }

  double sup_bound() const {
    double s = 0;
    for (const auto& t : terms)
      s += std::hypot(t.sin_coef[0], t.sin_coef[1]) + std::hypot(t.cos_coef[0], t.cos_coef[1]);
    return s;
  }

  static FourierField default_field() {
    return {{FourierTerm{0, 1, {1.0 / two_pi, 0.0}, {0.0, 0.0}}}};
  }
  static FourierField constant(Vec2 c) { return {{FourierTerm{0, 0, {0, 0}, c}}}; }
};

struct HyperbolicityMeta {
  double eps0 = 0.2;
  double lambda = 0.5;
  double C = 1.0;
  std::string spectral_spec;
};

class Diffeo {
 public:
  virtual ~Diffeo() = default;
  virtual PhaseSpace space() const = 0;
  virtual Point forward(const Point& x) const = 0;
  virtual Point inverse(const Point& x) const = 0;
  virtual std::string body() const = 0;

  const std::string& name() const { return name_; }
  const HyperbolicityMeta& meta() const { return meta_; }

  Point operator()(const Point& x) const { return forward(x); }

  /// f^n(x) for any integer n.
  Point iterate(Point x, int n) const {
    for (; n > 0; --n) x = forward(x);
    for (; n < 0; ++n) x = inverse(x);
    return x;
  }

 protected:
  Diffeo(std::string name, HyperbolicityMeta meta) : name_(std::move(name)), meta_(std::move(meta)) {}

  void check_meta() const {
    if (!(meta_.lambda > 0 && meta_.lambda < 1) || !(meta_.C >= 1) || !(meta_.eps0 > 0))
      throw std::invalid_argument("invalid hyperbolicity metadata");
  }

  /// Construction-time inverse contract on a seeded sample.
  void check_inverse_contract(std::size_t count = 256) const {
    auto pts = sample(space(), RandomUniform{count, 0x5eedULL});
    for (const auto& x : pts) {
      if (distance(space(), inverse(forward(x)), x) >= 1e-10 || distance(space(), forward(inverse(x)), x) >= 1e-10)
        throw std::invalid_argument("forward and inverse disagree for " + name_);
    }
  }

 private:
  std::string name_;
  HyperbolicityMeta meta_;
};

using DiffeoPtr = std::shared_ptr<const Diffeo>;

namespace detail {
/// Safeguarded Newton on a bracket [lo,hi] for increasing F.
template <class F, class DF>
double bracketed_newton(F&& fn, DF&& dfn, double lo, double hi, double x0) {
  double x = x0;
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double v = fn(x);
    if (v == 0) return x;
    if (v < 0) lo = x; else hi = x;
    const double dv = dfn(x);
    double nx = (dv > 0) ? x - v / dv : 0.5 * (lo + hi);
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::abs(nx - x) <= 1e-17 + 1e-16 * std::abs(x) || hi - lo <= 4e-16 * (1 + std::abs(x))) return nx;
    x = nx;
  }
  throw std::runtime_error("inverse solve failed");
}
}  // namespace detail

class LinearAnosov final : public Diffeo {
 public:
  LinearAnosov(Mat2 m, std::string name = "cat", HyperbolicityMeta meta = {0.2, 0.3819660112501051, 1.0, "cat"})
      : Diffeo(std::move(name), std::move(meta)), m_(m), inv_(m.inverse()), frame_(stable_unstable_frame(m)) {
    check_meta();
  }

  PhaseSpace space() const override { return PhaseSpace::torus(); }
  std::string body() const override { return "linear_anosov"; }
  const Mat2& matrix() const { return m_; }
  const Frame& frame() const { return frame_; }

  /// Unwrapped image, shared with maps that coincide with A off a small set.
  Vec2 raw(const Point& x) const { return m_.apply({x[0], x[1]}); }

  Point forward(const Point& x) const override {
    check_space(space(), x);
    Vec2 y = raw(x);
    return {wrap(y[0]), wrap(y[1])};
  }
  Point inverse(const Point& x) const override {
    check_space(space(), x);
    Vec2 y = inv_.apply({x[0], x[1]});
    return {wrap(y[0]), wrap(y[1])};
  }

 private:
  Mat2 m_, inv_;
  Frame frame_;
};

/// g(x) = A x + eps p(x) mod 1.
class PerturbedAnosov final : public Diffeo {
 public:
  PerturbedAnosov(Mat2 m, FourierField p, double eps, std::string name = "catpert",
                  HyperbolicityMeta meta = {0.2, 0.4, 1.0, "cat"})
      : Diffeo(std::move(name), std::move(meta)), base_(std::make_shared<LinearAnosov>(m)), p_(std::move(p)), eps_(eps) {
    check_meta();
    if (!std::isfinite(eps)) throw std::invalid_argument("non-finite amplitude");
    // local diffeomorphism check: det(A + eps Dp) keeps the sign of det A
    const double sgn = m.det() > 0 ? 1.0 : -1.0;
    for (int i = 0; i < 64; ++i)
      for (int j = 0; j < 64; ++j) {
        auto J = jac(i / 64.0, j / 64.0);
        if (sgn * (J[0][0] * J[1][1] - J[0][1] * J[1][0]) <= 0)
          throw std::invalid_argument("perturbation breaks invertibility");
      }
    check_inverse_contract();
  }

  PhaseSpace space() const override { return PhaseSpace::torus(); }
  std::string body() const override { return "affine_perturbed_anosov"; }
  const LinearAnosov& base() const { return *base_; }
  std::shared_ptr<const LinearAnosov> base_ptr() const { return base_; }
  const FourierField& field() const { return p_; }
  double eps() const { return eps_; }

  Point forward(const Point& x) const override {
    check_space(space(), x);
    Vec2 y = base_->raw(x);
    Vec2 q = p_(x[0], x[1]);
    return {wrap(y[0] + eps_ * q[0]), wrap(y[1] + eps_ * q[1])};
  }

  Point inverse(const Point& x) const override {
    check_space(space(), x);
    Point z = base_->inverse(x);
    for (int it = 0; it < 200; ++it) {
      Point gz = forward(z);
      const double r0 = wdiff(gz[0], x[0]), r1 = wdiff(gz[1], x[1]);
      if (std::hypot(r0, r1) < 1e-15) return z;
      auto J = jac(z[0], z[1]);
      const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
      const double d0 = (J[1][1] * r0 - J[0][1] * r1) / det;
      const double d1 = (-J[1][0] * r0 + J[0][0] * r1) / det;
      Point nz{wrap(z[0] - d0), wrap(z[1] - d1)};
      if (std::hypot(d0, d1) < 1e-17) return nz;
      z = nz;
    }
    Point gz = forward(z);
    if (std::hypot(wdiff(gz[0], x[0]), wdiff(gz[1], x[1])) < 1e-12) return z;
    throw std::runtime_error("inverse solve failed");
  }

 private:
  std::array<Vec2, 2> jac(double x, double y) const {
    auto Dp = p_.jacobian(x, y);
    const auto& m = base_->matrix();
    return {{{m.a + eps_ * Dp[0][0], m.b + eps_ * Dp[0][1]}, {m.c + eps_ * Dp[1][0], m.d + eps_ * Dp[1][1]}}};
  }

  std::shared_ptr<const LinearAnosov> base_;
  FourierField p_;
  double eps_;
};

/// theta -> theta + a sin(2 pi theta); repeller at 0, attractor at 1/2.
class NorthSouth final : public Diffeo {
 public:
  explicit NorthSouth(double a = 0.1, std::string name = "northsouth",
                      HyperbolicityMeta meta = {0.25, 0.6142423331, 1.0, "northsouth"})
      : Diffeo(std::move(name), std::move(meta)), a_(a) {
    check_meta();
    if (!(a > 0 && a < 1.0 / two_pi)) throw std::invalid_argument("north-south parameter out of range");
    check_inverse_contract();
  }

  PhaseSpace space() const override { return PhaseSpace::circle(); }
  std::string body() const override { return "north_south_circle"; }
  double a() const { return a_; }

  double lifted(double t) const { return t + a_ * std::sin(two_pi * t); }
  double derivative(double t) const { return 1.0 + two_pi * a_ * std::cos(two_pi * t); }

  Point forward(const Point& x) const override {
    check_space(space(), x);
    return {wrap(lifted(x[0]))};
  }
  Point inverse(const Point& x) const override {
    check_space(space(), x);
    const double v = x[0];
    const double t = detail::bracketed_newton([&](double s) { return lifted(s) - v; },
                                              [&](double s) { return derivative(s); }, v - a_ - 1e-12, v + a_ + 1e-12, v);
    return {wrap(t)};
  }

  static constexpr double north = 0.0, south = 0.5;

 private:
  double a_;
};

enum class BumpShape { Quadratic, Quartic };

inline std::string to_string(BumpShape b) { return b == BumpShape::Quadratic ? "quadratic" : "quartic"; }

/// Derived-from-Anosov: f(x) = A x + k phi(|x-p|/r) s(x) e_s near the fixed point p, A x elsewhere.
class DerivedFromAnosov final : public Diffeo {
 public:
  DerivedFromAnosov(Mat2 m, double r = 0.15, double k = 1.0, Point center = {0.0, 0.0},
                    BumpShape shape = BumpShape::Quadratic, std::string name = "da",
                    HyperbolicityMeta meta = {0.2, 0.7236067977, 1.0, "da"})
      : Diffeo(std::move(name), std::move(meta)), base_(std::make_shared<LinearAnosov>(m)), r_(r), k_(k),
        p_(wrapped(center)), shape_(shape) {
    check_meta();
    const Frame& F = frame();
    if (!(r > 0 && r < 0.25)) throw std::invalid_argument("bump radius out of range");
    if (!(F.lambda_s + k > 1)) throw std::invalid_argument("push too weak: fixed point would not repel");
    if (!same_point(space(), base_->forward(p_), p_)) throw std::invalid_argument("bump center is not fixed");
    check_injective();
    check_inverse_contract();
  }

  PhaseSpace space() const override { return PhaseSpace::torus(); }
  std::string body() const override { return "derived_from_anosov"; }
  const LinearAnosov& base() const { return *base_; }
  const Frame& frame() const { return base_->frame(); }
  double radius() const { return r_; }
  double push() const { return k_; }
  const Point& center() const { return p_; }
  BumpShape shape() const { return shape_; }

  double phi(double v) const {
    if (v >= 1) return 0;
    return shape_ == BumpShape::Quadratic ? (1 - v) * (1 - v) : (1 - v * v) * (1 - v * v);
  }
  double dphi(double v) const {
    if (v >= 1) return 0;
    return shape_ == BumpShape::Quadratic ? -2 * (1 - v) : -4 * v * (1 - v * v);
  }

  /// Offset of x from the centre, wrapped into [-1/2,1/2)^2.
  Vec2 local(const Point& x) const { return {wdiff(x[0], p_[0]), wdiff(x[1], p_[1])}; }

  bool in_support(const Point& x) const {
    Vec2 d = local(x);
    return std::hypot(d[0], d[1]) < r_;
  }

  Point forward(const Point& x) const override {
    check_space(space(), x);
    Vec2 y = base_->raw(x);
    Vec2 d = local(x);
    const double rho = std::hypot(d[0], d[1]);
    if (rho < r_) {
      const double amp = k_ * phi(rho / r_) * frame().s_of(d);
      y[0] += amp * frame().e_s[0];
      y[1] += amp * frame().e_s[1];
    }
    return {wrap(y[0]), wrap(y[1])};
  }

  Point inverse(const Point& x) const override {
    check_space(space(), x);
    Point y = base_->inverse(x);
    Vec2 d = local(y);
    if (std::hypot(d[0], d[1]) >= r_) return y;
    const Frame& F = frame();
    const double s = F.s_of(d);
    const double de = d[0] * F.e_s[0] + d[1] * F.e_s[1];
    const double dd = d[0] * d[0] + d[1] * d[1];
    const double disc = std::sqrt(std::max(0.0, de * de - dd + r_ * r_));
    const double lo = -de - disc, hi = -de + disc;
    // H(t) = lambda_s t + k phi(rho(t)/r) (s+t); zero gives the preimage y + t e_s
    auto rho_of = [&](double t) { return std::sqrt(std::max(0.0, dd + 2 * t * de + t * t)); };
    auto H = [&](double t) { return F.lambda_s * t + k_ * phi(rho_of(t) / r_) * (s + t); };
    auto dH = [&](double t) {
      const double rho = rho_of(t);
      const double drho = rho > 0 ? (de + t) / rho : 0.0;
      return F.lambda_s + k_ * (phi(rho / r_) + dphi(rho / r_) * drho / r_ * (s + t));
    };
    const double t = detail::bracketed_newton(H, dH, lo, hi, 0.0);
    return {wrap(y[0] + t * F.e_s[0]), wrap(y[1] + t * F.e_s[1])};
  }

 private:
  void check_injective() const {
    // along each e_s line through the support the s-coordinate of the image must increase
    const Frame& F = frame();
    const Vec2 nrm{-F.e_s[1], F.e_s[0]};
    const int lines = 201, steps = 801;
    for (int i = 0; i < lines; ++i) {
      const double w = -r_ + 2 * r_ * i / (lines - 1);
      double prev = -1e300;
      for (int j = 0; j < steps; ++j) {
        const double t = -r_ + 2 * r_ * j / (steps - 1);
        Vec2 d{w * nrm[0] + t * F.e_s[0], w * nrm[1] + t * F.e_s[1]};
        const double rho = std::hypot(d[0], d[1]);
        const double s = F.s_of(d);
        const double img = F.lambda_s * s + (rho < r_ ? k_ * phi(rho / r_) * s : 0.0);
        if (img <= prev) throw std::invalid_argument("derived-from-Anosov map is not injective on the bump support");
        prev = img;
      }
    }
  }

  std::shared_ptr<const LinearAnosov> base_;
  double r_, k_;
  Point p_;
  BumpShape shape_;
};

/// (circle map) x (torus map) on S^1 x T^2; coordinates (theta, x, y).
class ProductMap final : public Diffeo {
 public:
  ProductMap(DiffeoPtr circle, DiffeoPtr torus, std::string name = "product",
             HyperbolicityMeta meta = {0.2, 0.6142423331, 1.0, "product"})
      : Diffeo(std::move(name), std::move(meta)), c_(std::move(circle)), t_(std::move(torus)) {
    check_meta();
    if (!c_ || !t_ || c_->space() != PhaseSpace::circle() || t_->space() != PhaseSpace::torus())
      throw std::invalid_argument("product needs a circle map and a torus map");
  }

  PhaseSpace space() const override { return PhaseSpace::product(); }
  std::string body() const override { return "product"; }
  const Diffeo& circle() const { return *c_; }
  const Diffeo& torus() const { return *t_; }
  DiffeoPtr circle_ptr() const { return c_; }
  DiffeoPtr torus_ptr() const { return t_; }

  Point forward(const Point& x) const override {
    check_space(space(), x);
    Point a = c_->forward({x[0]}), b = t_->forward({x[1], x[2]});
    return {a[0], b[0], b[1]};
  }
  Point inverse(const Point& x) const override {
    check_space(space(), x);
    Point a = c_->inverse({x[0]}), b = t_->inverse({x[1], x[2]});
    return {a[0], b[0], b[1]};
  }

 private:
  DiffeoPtr c_, t_;
};

/// f_1^{n_1} o ... o f_k^{n_k}; the last factor acts first.
class CompositeMap final : public Diffeo {
 public:
  CompositeMap(std::vector<std::pair<DiffeoPtr, int>> factors, std::string name, HyperbolicityMeta meta)
      : Diffeo(std::move(name), std::move(meta)), fs_(std::move(factors)) {
    check_meta();
    if (fs_.empty()) throw std::invalid_argument("empty composite");
    for (auto& [f, n] : fs_)
      if (!f || f->space() != fs_.front().first->space()) throw std::invalid_argument("space mismatch");
  }

  PhaseSpace space() const override { return fs_.front().first->space(); }
  std::string body() const override { return "composite"; }
  const std::vector<std::pair<DiffeoPtr, int>>& factors() const { return fs_; }

  Point forward(const Point& x) const override {
    Point y = x;
    for (auto it = fs_.rbegin(); it != fs_.rend(); ++it) y = it->first->iterate(y, it->second);
    return y;
  }
  Point inverse(const Point& x) const override {
    Point y = x;
    for (const auto& [f, n] : fs_) y = f->iterate(y, -n);
    return y;
  }

 private:
  std::vector<std::pair<DiffeoPtr, int>> fs_;
};

inline Mat2 cat_matrix() { return {2, 1, 1, 1}; }

/// f^n(x) for n in [n_min, n_max], computed outward from n = 0.
inline std::vector<std::pair<int, Point>> orbit(const Diffeo& f, const Point& x, int n_min, int n_max) {
  if (n_min > n_max) throw std::invalid_argument("empty orbit range");
  check_space(f.space(), x);
  std::vector<std::pair<int, Point>> out;
  out.reserve(static_cast<std::size_t>(n_max - n_min + 1));
  Point y = wrapped(x);
  std::vector<Point> back;
  for (int n = 0; n > n_min; --n) {
    y = f.inverse(y);
    back.push_back(y);
  }
  for (int n = n_min; n <= n_max && n < 0; ++n) out.emplace_back(n, back[static_cast<std::size_t>(-n - 1)]);
  y = wrapped(x);
  for (int n = 0; n <= n_max; ++n) {
    if (n >= n_min) out.emplace_back(n, y);
    if (n < n_max) y = f.forward(y);
  }
  return out;
}

}  // namespace stab

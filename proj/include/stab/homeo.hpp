#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "catalog.hpp"
#include "geometry.hpp"
#include "parallel.hpp"

namespace stab {

/// A homeomorphism with explicit inverse, used as a leaf of composed expressions.
class HomeoPiece {
 public:
  virtual ~HomeoPiece() = default;
  virtual PhaseSpace space() const = 0;
  virtual Point forward(const Point& x) const = 0;
  virtual Point inverse(const Point& x) const = 0;
  virtual std::string kind() const = 0;
};

using PiecePtr = std::shared_ptr<const HomeoPiece>;

/// Expression-tree homeomorphism. Cheap to copy; nodes are shared and immutable.
class Homeo {
 public:
  struct Node {
    virtual ~Node() = default;
    virtual PhaseSpace space() const = 0;
    virtual Point fwd(const Point&) const = 0;
    virtual Point inv(const Point&) const = 0;
    virtual std::string describe() const = 0;
  };

  Homeo() : Homeo(identity(PhaseSpace::torus())) {}

  static Homeo identity(PhaseSpace s) {
    struct Id final : Node {
      PhaseSpace s;
      explicit Id(PhaseSpace s_) : s(s_) {}
      PhaseSpace space() const override { return s; }
      Point fwd(const Point& x) const override { return x; }
      Point inv(const Point& x) const override { return x; }
      std::string describe() const override { return "id"; }
    };
    return Homeo(std::make_shared<Id>(s), true);
  }

  static Homeo power(DiffeoPtr f, int n) {
    struct Pow final : Node {
      DiffeoPtr f;
      int n;
      Pow(DiffeoPtr f_, int n_) : f(std::move(f_)), n(n_) {}
      PhaseSpace space() const override { return f->space(); }
      Point fwd(const Point& x) const override { return f->iterate(x, n); }
      Point inv(const Point& x) const override { return f->iterate(x, -n); }
      std::string describe() const override { return f->name() + "^" + std::to_string(n); }
    };
    if (!f) throw std::invalid_argument("null map");
    if (n == 0) return identity(f->space());
    return Homeo(std::make_shared<Pow>(std::move(f), n));
  }

  /// x -> M x + t mod 1. On the circle only M.a (= +-1) and t[0] are used.
  static Homeo affine(PhaseSpace s, Mat2 M, Vec2 t) {
    struct Aff final : Node {
      PhaseSpace s;
      Mat2 M, Mi;
      Vec2 t;
      Aff(PhaseSpace s_, Mat2 M_, Vec2 t_) : s(s_), M(M_), t(t_) {
        if (s.kind == SpaceKind::Circle) {
          if (M.a != 1 && M.a != -1) throw std::invalid_argument("circle affine map needs slope +-1");
          Mi = Mat2{M.a, 0, 0, 1};
        } else if (s.kind == SpaceKind::Torus2) {
          Mi = M.inverse();
        } else {
          throw std::invalid_argument("affine maps are defined on the circle and torus");
        }
      }
      PhaseSpace space() const override { return s; }
      Point fwd(const Point& x) const override {
        if (s.kind == SpaceKind::Circle) return {wrap(static_cast<double>(M.a) * x[0] + t[0])};
        Vec2 y = M.apply({x[0], x[1]});
        return {wrap(y[0] + t[0]), wrap(y[1] + t[1])};
      }
      Point inv(const Point& x) const override {
        if (s.kind == SpaceKind::Circle) return {wrap(static_cast<double>(Mi.a) * (x[0] - t[0]))};
        Vec2 y = Mi.apply({x[0] - t[0], x[1] - t[1]});
        return {wrap(y[0]), wrap(y[1])};
      }
      std::string describe() const override {
        return "affine[" + std::to_string(M.a) + "," + std::to_string(M.b) + ";" + std::to_string(M.c) + "," +
               std::to_string(M.d) + "]";
      }
    };
    return Homeo(std::make_shared<Aff>(s, M, t));
  }

  static Homeo translation(PhaseSpace s, Vec2 t) { return affine(s, Mat2::identity(), t); }

  static Homeo custom(PiecePtr p) {
    struct Cus final : Node {
      PiecePtr p;
      explicit Cus(PiecePtr p_) : p(std::move(p_)) {}
      PhaseSpace space() const override { return p->space(); }
      Point fwd(const Point& x) const override { return p->forward(x); }
      Point inv(const Point& x) const override { return p->inverse(x); }
      std::string describe() const override { return p->kind(); }
    };
    if (!p) throw std::invalid_argument("null piece");
    return Homeo(std::make_shared<Cus>(std::move(p)));
  }

  /// c x t on S^1 x T^2.
  static Homeo product(const Homeo& c, const Homeo& t) {
    struct Prod final : Node {
      Homeo c, t;
      Prod(Homeo c_, Homeo t_) : c(std::move(c_)), t(std::move(t_)) {}
      PhaseSpace space() const override { return PhaseSpace::product(); }
      Point fwd(const Point& x) const override {
        Point a = c({x[0]}), b = t({x[1], x[2]});
        return {a[0], b[0], b[1]};
      }
      Point inv(const Point& x) const override {
        Point a = c.inverse({x[0]}), b = t.inverse({x[1], x[2]});
        return {a[0], b[0], b[1]};
      }
      std::string describe() const override { return "(" + c.describe() + " x " + t.describe() + ")"; }
    };
    if (c.space() != PhaseSpace::circle() || t.space() != PhaseSpace::torus())
      throw std::invalid_argument("product needs a circle factor and a torus factor");
    return Homeo(std::make_shared<Prod>(c, t));
  }

  Homeo inv() const {
    struct Inv final : Node {
      Homeo h;
      explicit Inv(Homeo h_) : h(std::move(h_)) {}
      PhaseSpace space() const override { return h.space(); }
      Point fwd(const Point& x) const override { return h.inverse(x); }
      Point inv(const Point& x) const override { return h(x); }
      std::string describe() const override { return "inv(" + h.describe() + ")"; }
    };
    if (identity_) return *this;
    if (auto p = std::dynamic_pointer_cast<const Inv>(n_)) return p->h;
    return Homeo(std::make_shared<Inv>(*this));
  }

  /// a o b
  static Homeo compose(const Homeo& a, const Homeo& b) {
    struct Comp final : Node {
      Homeo a, b;
      Comp(Homeo a_, Homeo b_) : a(std::move(a_)), b(std::move(b_)) {}
      PhaseSpace space() const override { return a.space(); }
      Point fwd(const Point& x) const override { return a(b(x)); }
      Point inv(const Point& x) const override { return b.inverse(a.inverse(x)); }
      std::string describe() const override { return a.describe() + " o " + b.describe(); }
    };
    if (a.space() != b.space()) throw std::invalid_argument("space mismatch");
    return Homeo(std::make_shared<Comp>(a, b));
  }

  Point operator()(const Point& x) const {
    check_space(space(), x);
    return n_->fwd(x);
  }
  Point inverse(const Point& x) const {
    check_space(space(), x);
    return n_->inv(x);
  }
  PhaseSpace space() const { return n_->space(); }
  std::string describe() const { return n_->describe(); }
  bool is_identity() const { return identity_; }

 private:
  explicit Homeo(std::shared_ptr<const Node> n, bool id = false) : n_(std::move(n)), identity_(id) {}
  std::shared_ptr<const Node> n_;
  bool identity_ = false;
};

inline Homeo operator*(const Homeo& a, const Homeo& b) { return Homeo::compose(a, b); }

struct SupResult {
  double value = 0;
  Point witness;
};

/// sup over points of fn(x), first maximiser wins; evaluated in parallel, reduced in index order.
template <class Fn>
SupResult sup_over(const std::vector<Point>& pts, Fn&& fn) {
  std::vector<double> vals(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { vals[i] = fn(pts[i]); });
  SupResult r;
  if (!pts.empty()) r.witness = pts[0];
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (vals[i] > r.value) {
      r.value = vals[i];
      r.witness = pts[i];
    }
  return r;
}

struct D0Report {
  double value = 0;
  double sup_forward = 0, sup_inverse = 0;
  Point witness_forward, witness_inverse;
  std::string sampler;
};

/// Sampled d0: sup d(h1 x, h2 x) + sup d(h1^-1 x, h2^-1 x).
inline D0Report d0(const Homeo& h1, const Homeo& h2, const Sampler& sm) {
  if (h1.space() != h2.space()) throw std::invalid_argument("space mismatch");
  const PhaseSpace s = h1.space();
  auto pts = sample(s, sm);
  auto f = sup_over(pts, [&](const Point& x) { return distance(s, h1(x), h2(x)); });
  auto b = sup_over(pts, [&](const Point& x) { return distance(s, h1.inverse(x), h2.inverse(x)); });
  return {f.value + b.value, f.value, b.value, f.witness, b.witness, describe(sm)};
}

/// sup d(h(f x), f(h x)).
inline SupResult commutation_residual(const Diffeo& f, const Homeo& h, const std::vector<Point>& pts) {
  const PhaseSpace s = f.space();
  if (h.space() != s) throw std::invalid_argument("space mismatch");
  return sup_over(pts, [&](const Point& x) { return distance(s, h(f(x)), f(h(x))); });
}
inline double commutation_residual(const Diffeo& f, const Homeo& h, const Sampler& sm) {
  return commutation_residual(f, h, sample(f.space(), sm)).value;
}

/// sup d(h(f x), g(h x)).
inline SupResult conjugacy_residual(const Diffeo& f, const Diffeo& g, const Homeo& h, const std::vector<Point>& pts) {
  const PhaseSpace s = f.space();
  if (g.space() != s || h.space() != s) throw std::invalid_argument("space mismatch");
  return sup_over(pts, [&](const Point& x) { return distance(s, h(f(x)), g(h(x))); });
}
inline double conjugacy_residual(const Diffeo& f, const Diffeo& g, const Homeo& h, const Sampler& sm) {
  return conjugacy_residual(f, g, h, sample(f.space(), sm)).value;
}

/// Sampled C0 distance between two maps.
inline double map_distance(const Diffeo& f, const Diffeo& g, const Sampler& sm) {
  if (f.space() != g.space()) throw std::invalid_argument("space mismatch");
  auto pts = sample(f.space(), sm);
  return sup_over(pts, [&](const Point& x) { return distance(f.space(), f(x), g(x)); }).value;
}

/// max of sup d(R R x, x) and sup d(R f x, f^-1 R x).
inline double reversibility_check(const Diffeo& f, const Homeo& R, const Sampler& sm) {
  const PhaseSpace s = f.space();
  auto pts = sample(s, sm);
  double a = sup_over(pts, [&](const Point& x) { return distance(s, R(R(x)), x); }).value;
  double b = sup_over(pts, [&](const Point& x) { return distance(s, R(f(x)), f.inverse(R(x))); }).value;
  return std::max(a, b);
}

/// Sampled modulus of continuity: sup d(h x, h y) over sampled pairs with d(x,y) <= delta.
inline double modulus_of_continuity(const Homeo& h, double delta, const Sampler& sm) {
  const PhaseSpace s = h.space();
  auto pts = sample(s, sm);
  const int d = s.dim();
  return sup_over(pts, [&](const Point& x) {
    double m = 0;
    for (int i = 0; i < d; ++i)
      for (double sg : {-1.0, 1.0}) {
        Point y = x;
        y[i] = wrap(y[i] + sg * delta);
        m = std::max(m, distance(s, h(x), h(y)));
      }
    return m;
  }).value;
}

}  // namespace stab

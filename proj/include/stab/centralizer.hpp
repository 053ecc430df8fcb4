#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "catalog.hpp"
#include "homeo.hpp"

namespace stab {

/// Increasing piecewise-linear map given by nodes (x_k, y_k).
class PLMap {
 public:
  PLMap() = default;
  explicit PLMap(std::vector<std::pair<double, double>> nodes) : n_(std::move(nodes)) {
    if (n_.size() < 2) throw std::invalid_argument("piecewise-linear map needs two nodes");
    for (std::size_t i = 1; i < n_.size(); ++i)
      if (!(n_[i].first > n_[i - 1].first) || !(n_[i].second > n_[i - 1].second))
        throw std::invalid_argument("piecewise-linear nodes must be strictly increasing");
  }

  /// Identity on [a,b] moving the midpoint by `shift`.
  static PLMap bump(double a, double b, double shift) {
    const double m = 0.5 * (a + b);
    if (shift == 0) return PLMap({{a, a}, {b, b}});
    return PLMap({{a, a}, {m, m + shift}, {b, b}});
  }

  const std::vector<std::pair<double, double>>& nodes() const { return n_; }
  double lo() const { return n_.front().first; }
  double hi() const { return n_.back().first; }
  bool fixes_endpoints() const { return n_.front().first == n_.front().second && n_.back().first == n_.back().second; }

  double operator()(double x) const { return eval(x, false); }
  double inverse(double y) const { return eval(y, true); }

 private:
  double eval(double x, bool inv) const {
    auto key = [&](std::size_t i) { return inv ? n_[i].second : n_[i].first; };
    auto val = [&](std::size_t i) { return inv ? n_[i].first : n_[i].second; };
    if (x <= key(0)) return val(0) + (x - key(0));
    const std::size_t last = n_.size() - 1;
    if (x >= key(last)) return val(last) + (x - key(last));
    std::size_t i = 1;
    while (x > key(i)) ++i;
    const double t = (x - key(i - 1)) / (key(i) - key(i - 1));
    return val(i - 1) + t * (val(i) - val(i - 1));
  }
  std::vector<std::pair<double, double>> n_;
};

/// One wandering arc of a north-south map with its fundamental domain [x0, f(x0)).
/// Positions are measured by key = orientation * x, which increases along forward orbits.
struct WanderingArc {
  double arc_lo = 0, arc_hi = 0.5;  // open arc in [0,1)
  int orientation = 1;
  double x0 = 0.25, x1 = 0.35;      // x1 = f(x0)
  PLMap h0;                          // in key coordinates on [key(x0), key(x1)]

  double key(double x) const { return orientation * x; }
  double unkey(double k) const { return orientation * k; }
  bool on_arc(double x) const { return x > arc_lo && x < arc_hi; }
  double key_lo() const { return std::min(key(x0), key(x1)); }
  double key_hi() const { return std::max(key(x0), key(x1)); }
  /// Half-open domain with a small shift so that f^-1(x1) lands inside even after rounding.
  bool in_domain(double x, double shift = 1e-12) const {
    if (!on_arc(x)) return false;
    const double k = key(x);
    return k >= key_lo() - shift && k < key_hi() - shift;
  }
};

struct FundamentalDomainPiece {
  std::shared_ptr<const NorthSouth> map;
  std::vector<WanderingArc> arcs;
  int cap = 200;

  /// Default pieces I = [0.25, f(0.25)) and its mirror (0.75 - ..., 0.75], each with a midpoint bump.
  static FundamentalDomainPiece standard(std::shared_ptr<const NorthSouth> f, double bump = 0.0) {
    FundamentalDomainPiece p;
    p.map = f;
    WanderingArc a;
    a.arc_lo = NorthSouth::north;
    a.arc_hi = NorthSouth::south;
    a.orientation = 1;
    a.x0 = 0.25;
    a.x1 = f->forward({0.25})[0];
    a.h0 = PLMap::bump(a.key_lo(), a.key_hi(), bump);
    WanderingArc b;
    b.arc_lo = NorthSouth::south;
    b.arc_hi = 1.0;
    b.orientation = -1;
    b.x0 = 0.75;
    b.x1 = f->forward({0.75})[0];
    b.h0 = PLMap::bump(b.key_lo(), b.key_hi(), bump);
    p.arcs = {a, b};
    p.validate();
    return p;
  }

  void validate() const {
    if (!map) throw std::invalid_argument("null map");
    for (const auto& a : arcs) {
      if (std::abs(map->forward({a.x0})[0] - a.x1) > 1e-12) throw std::invalid_argument("not a fundamental domain");
      if (!a.h0.fixes_endpoints() || a.h0.lo() != a.key_lo() || a.h0.hi() != a.key_hi())
        throw std::invalid_argument("h0 must fix the endpoints of its domain");
      if (!a.on_arc(a.x0) || !a.on_arc(a.x1)) throw std::invalid_argument("domain leaves its arc");
    }
  }
};

inline bool near_fixed_point(const NorthSouth&, double x, double tol = 1e-12) {
  const PhaseSpace c = PhaseSpace::circle();
  return distance(c, {x}, {NorthSouth::north}) < tol || distance(c, {x}, {NorthSouth::south}) < tol;
}

/// The unique n with f^n(x) in the arc's fundamental domain, if |n| <= cap.
inline std::optional<int> transit_time(const NorthSouth& f, const WanderingArc& arc, const Point& x, int cap = 200) {
  check_space(f.space(), x);
  if (near_fixed_point(f, x[0])) throw std::domain_error("fixed point has no transit time");
  if (!arc.on_arc(x[0])) return std::nullopt;
  Point y = x;
  if (arc.in_domain(y[0])) return 0;
  const double k = arc.key(y[0]);
  if (k < arc.key_lo()) {
    for (int n = 1; n <= cap; ++n) {
      y = f.forward(y);
      if (arc.in_domain(y[0])) return n;
      if (arc.key(y[0]) >= arc.key_hi()) return std::nullopt;
    }
  } else {
    for (int n = 1; n <= cap; ++n) {
      y = f.inverse(y);
      if (arc.in_domain(y[0])) return -n;
      if (arc.key(y[0]) < arc.key_lo() - 1e-12) return std::nullopt;
    }
  }
  return std::nullopt;
}

/// h(x) = f^-n(h0(f^n x)) on each wandering arc, identity at the fixed points.
class MSCentralizer final : public HomeoPiece {
 public:
  explicit MSCentralizer(FundamentalDomainPiece piece) : p_(std::move(piece)) { p_.validate(); }

  PhaseSpace space() const override { return PhaseSpace::circle(); }
  std::string kind() const override { return "fundamental_domain_piece"; }
  const FundamentalDomainPiece& piece() const { return p_; }

  Point forward(const Point& x) const override { return apply(x, false); }
  Point inverse(const Point& x) const override { return apply(x, true); }

 private:
  Point apply(const Point& x, bool inv) const {
    check_space(space(), x);
    const NorthSouth& f = *p_.map;
    if (near_fixed_point(f, x[0])) return x;
    for (const auto& arc : p_.arcs) {
      if (!arc.on_arc(x[0])) continue;
      auto n = transit_time(f, arc, x, p_.cap);
      if (!n) return x;
      Point y = f.iterate(x, *n);
      const double k = arc.key(y[0]);
      const double nk = inv ? arc.h0.inverse(k) : arc.h0(k);
      return f.iterate({wrap(arc.unkey(nk))}, -*n);
    }
    return x;
  }
  FundamentalDomainPiece p_;
};

inline Homeo ms_centralizer(const FundamentalDomainPiece& piece) {
  return Homeo::custom(std::make_shared<MSCentralizer>(piece));
}

/// Axis-aligned box in local (tau, ell) coordinates; tau is ignored on the circle.
struct LocalBox {
  double tau_lo = 0, tau_hi = 0, l_lo = 0, l_hi = 0;
  bool contains(double tau, double l, bool use_tau) const {
    return (!use_tau || (tau > tau_lo && tau < tau_hi)) && l > l_lo && l < l_hi;
  }
  /// Closure of this box lies inside the open box o.
  bool closure_inside(const LocalBox& o, bool use_tau) const {
    return (!use_tau || (tau_lo > o.tau_lo && tau_hi < o.tau_hi)) && l_lo > o.l_lo && l_hi < o.l_hi;
  }
  bool disjoint(const LocalBox& o, bool use_tau) const {
    return (use_tau && (tau_hi <= o.tau_lo || o.tau_hi <= tau_lo)) || l_hi <= o.l_lo || o.l_hi <= l_lo;
  }
};

/// Push along straight fibres inside a wandering box, spread over the box's orbit.
/// On the torus the fibre coordinate ell is the stable coordinate about `center` and tau the unstable one;
/// on the circle ell is the signed offset from `center`.
struct BumpPushSpec {
  DiffeoPtr map;
  Point center;          // torus: fixed point the chart is centred at; circle: centre of U
  LocalBox U;            // wandering box
  double tau_w_lo = 0, tau_w_hi = 0, tau_v_lo = 0, tau_v_hi = 0;  // transversal extent of W and V
  double l0 = 0.05;      // fibre length of W: ell in (-l0/2, l0/2); V: (-l0/4, l0/4)
  double zeta = 0.01;
  double t = 1.0;
  int n_max = 200;
  LocalBox trap;         // backward-invariant box disjoint from U

  LocalBox W() const { return {tau_w_lo, tau_w_hi, -l0 / 2, l0 / 2}; }
  LocalBox V() const { return {tau_v_lo, tau_v_hi, -l0 / 4, l0 / 4}; }

  static BumpPushSpec da_default(std::shared_ptr<const DerivedFromAnosov> f, double zeta = 0.01, double t = 1.0) {
    BumpPushSpec s;
    s.map = f;
    s.center = f->center();
    // U stays below the unstable curves of the two saddles created by the bump (|ell| ~ 0.031 here)
    s.U = {0.012, 0.03, -0.023, 0.023};
    s.tau_w_lo = 0.013;
    s.tau_w_hi = 0.029;
    s.tau_v_lo = 0.014;
    s.tau_v_hi = 0.028;
    s.l0 = 0.044;
    s.zeta = zeta;
    s.t = t;
    s.trap = {-0.011, 0.011, -0.029, 0.029};
    s.n_max = 1000;
    return s;
  }

  static BumpPushSpec northsouth_default(std::shared_ptr<const NorthSouth> f, double zeta = 0.01, double t = 1.0) {
    BumpPushSpec s;
    s.map = f;
    s.center = {0.26};
    s.U = {0, 0, -0.03, 0.03};
    s.l0 = 0.05;
    s.zeta = zeta;
    s.t = t;
    s.trap = {0, 0, -0.22 - 0.26, 0.22 - 0.26};
    return s;
  }
};

/// h_t for a BumpPushSpec. Evaluated as z + delta * fibre, with delta carried along a single base orbit.
class BumpPush final : public HomeoPiece {
 public:
  enum class Status { Pushed, Outside, Unresolved };

  explicit BumpPush(BumpPushSpec spec) : s_(std::move(spec)) {
    if (!s_.map) throw std::invalid_argument("null map");
    torus_ = s_.map->space() == PhaseSpace::torus();
    if (!torus_ && s_.map->space() != PhaseSpace::circle()) throw std::invalid_argument("bump push needs a circle or torus map");
    if (torus_) {
      auto da = std::dynamic_pointer_cast<const DerivedFromAnosov>(s_.map);
      auto lin = std::dynamic_pointer_cast<const LinearAnosov>(s_.map);
      if (da) frame_ = da->frame();
      else if (lin) frame_ = lin->frame();
      else throw std::invalid_argument("bump push on the torus needs a map preserving the linear stable foliation");
    }
    validate();
    reach_ = measure_reach();
  }

  PhaseSpace space() const override { return s_.map->space(); }
  std::string kind() const override { return "bump_push"; }
  int reach() const { return reach_; }
  const BumpPushSpec& spec() const { return s_; }

  Point forward(const Point& x) const override { return apply(x, false, nullptr); }
  Point inverse(const Point& x) const override { return apply(x, true, nullptr); }

  Status classify(const Point& x) const {
    Status st;
    apply(x, false, &st);
    return st;
  }

  /// Fibre displacement of H_t at local coordinates (tau, ell).
  double push_offset(double tau, double l, bool inv) const {
    const double c = gamma(tau) * s_.t * s_.zeta;
    if (c == 0 || std::abs(l) >= s_.l0 / 2) return 0.0;
    const double a = s_.l0 / 4, b = s_.l0 / 2;
    if (!inv) return c * beta(l);
    // ell -> ell + c beta(ell) is PL with knots -b, -a, a, b
    PLMap m({{-b, -b}, {-a, -a + c}, {a, a + c}, {b, b}});
    return m.inverse(l) - l;
  }

  double beta(double l) const {
    const double a = s_.l0 / 4, b = s_.l0 / 2, al = std::abs(l);
    if (al <= a) return 1.0;
    if (al >= b) return 0.0;
    return (b - al) / (b - a);
  }

  double gamma(double tau) const {
    if (!torus_) return 1.0;
    if (tau <= s_.tau_w_lo || tau >= s_.tau_w_hi) return 0.0;
    if (tau < s_.tau_v_lo) return (tau - s_.tau_w_lo) / (s_.tau_v_lo - s_.tau_w_lo);
    if (tau > s_.tau_v_hi) return (s_.tau_w_hi - tau) / (s_.tau_w_hi - s_.tau_v_hi);
    return 1.0;
  }

  /// Local (tau, ell) of a point.
  std::pair<double, double> local(const Point& x) const {
    if (!torus_) return {0.0, wdiff(x[0], s_.center[0])};
    Vec2 d{wdiff(x[0], s_.center[0]), wdiff(x[1], s_.center[1])};
    return {frame_.u_of(d), frame_.s_of(d)};
  }

  Point from_local(double tau, double l) const {
    if (!torus_) return {wrap(s_.center[0] + l)};
    Vec2 v = frame_.compose(l, tau);
    return {wrap(s_.center[0] + v[0]), wrap(s_.center[1] + v[1])};
  }

  bool in_U(const Point& x) const {
    auto [tau, l] = local(x);
    return s_.U.contains(tau, l, torus_);
  }
  bool in_trap(const Point& x) const {
    auto [tau, l] = local(x);
    return s_.trap.contains(tau, l, torus_);
  }

  /// x moved by delta along the fibre.
  Point shift(const Point& x, double delta) const {
    if (!torus_) return {wrap(x[0] + delta)};
    return {wrap(x[0] + delta * frame_.e_s[0]), wrap(x[1] + delta * frame_.e_s[1])};
  }
  /// Fibre coordinate of a - b (both on one fibre).
  double fibre_diff(const Point& a, const Point& b) const {
    if (!torus_) return wdiff(a[0], b[0]);
    return frame_.s_of({wdiff(a[0], b[0]), wdiff(a[1], b[1])});
  }

 private:
  void validate() const {
    const bool ut = torus_;
    if (!(s_.zeta > 0)) throw std::invalid_argument("push size must be positive");
    if (!(s_.t >= 0 && s_.t <= 1)) throw std::invalid_argument("parameter t must lie in [0,1]");
    if (s_.n_max < 1) throw std::invalid_argument("orbit cap must be positive");
    const LocalBox W = s_.W(), V = s_.V();
    if (!V.closure_inside(W, ut) || !W.closure_inside(s_.U, ut)) throw std::invalid_argument("boxes must nest V < W < U");
    if (ut && !(s_.tau_v_lo < s_.tau_v_hi)) throw std::invalid_argument("empty inner box");
    // strict: at equality the fibre push has slope 0 on the ramp of beta and is no longer injective
    if (!(s_.t * s_.zeta < s_.l0 / 4)) throw std::invalid_argument("push must stay below a quarter of the fibre length");
    if (!s_.trap.disjoint(s_.U, ut)) throw std::invalid_argument("trap must be disjoint from U");
    const Diffeo& f = *s_.map;
    // trap backward-invariant, U wandering, both on a sample grid
    const int g = 9;
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) {
        auto lerp = [&](double a, double b, int k) { return a + (b - a) * (k + 0.5) / g; };
        if (ut || i == 0) {
          Point z = from_local(lerp(s_.trap.tau_lo, s_.trap.tau_hi, i), lerp(s_.trap.l_lo, s_.trap.l_hi, j));
          if (!in_trap(f.inverse(z))) throw std::invalid_argument("trap is not backward invariant");
          Point y0 = from_local(lerp(s_.U.tau_lo, s_.U.tau_hi, i), lerp(s_.U.l_lo, s_.U.l_hi, j));
          Point a = y0, b = y0;
          for (int n = 1; n <= s_.n_max; ++n) {
            a = f.forward(a);
            b = f.inverse(b);
            if (in_U(a) || in_U(b)) throw std::invalid_argument("U is not wandering");
          }
        }
      }
  }

  Point apply(const Point& z, bool inv, Status* st) const {
    check_space(space(), z);
    if (st) *st = Status::Outside;
    if (s_.t == 0) return z;
    const Diffeo& f = *s_.map;
    if (distance(space(), f.forward(z), z) < 1e-15) return z;
    // backward: hit U, or reach the trap (after which U is never visited again going backward)
    std::vector<Point> path{z};
    path.reserve(64);
    for (int m = 0;; ++m) {
      const Point& x = path.back();
      if (in_U(x)) return pushed(z, path, inv, true, st);
      if (in_trap(x)) break;
      if (m == s_.n_max) {
        if (st) *st = Status::Unresolved;
        return z;
      }
      path.push_back(f.inverse(x));
    }
    // forward: f^k(z) in U forces f^(k-j)(z) in the trap for some j <= reach_, so k <= reach_ + i_max
    int i_max = -static_cast<int>(path.size() - 1);
    if (i_max == 0) {
      Point y = z;
      while (i_max < s_.n_max) {
        y = f.forward(y);
        if (!in_trap(y)) break;
        ++i_max;
      }
    }
    const int K = std::min(s_.n_max, reach_ + i_max);
    path.assign(1, z);
    for (int k = 1; k <= K; ++k) {
      path.push_back(f.forward(path.back()));
      if (in_U(path.back())) return pushed(z, path, inv, false, st);
    }
    return z;
  }

  /// Applies the push at path.back() in U and carries the fibre offset back to z = path.front().
  Point pushed(const Point& z, const std::vector<Point>& path, bool inv, bool backward_path, Status* st) const {
    const Diffeo& f = *s_.map;
    auto [tau, l] = local(path.back());
    double delta = push_offset(tau, l, inv);
    if (delta == 0) return z;
    if (st) *st = Status::Pushed;
    for (std::size_t j = path.size() - 1; j > 0; --j) {
      if (backward_path)
        delta = fibre_diff(f.forward(shift(path[j], delta)), f.forward(path[j]));
      else
        delta = fibre_diff(f.inverse(shift(path[j], delta)), f.inverse(path[j]));
    }
    return shift(z, delta);
  }

  /// Largest number of backward steps a point of U needs to reach the trap (sampled, plus margin).
  int measure_reach() const {
    const Diffeo& f = *s_.map;
    const int g = torus_ ? 41 : 401;
    int worst = 0;
    for (int i = 0; i < (torus_ ? g : 1); ++i)
      for (int j = 0; j < g; ++j) {
        const double tau = s_.U.tau_lo + (s_.U.tau_hi - s_.U.tau_lo) * i / (g - 1);
        const double l = s_.U.l_lo + (s_.U.l_hi - s_.U.l_lo) * j / (g - 1);
        Point y = from_local(tau, l);
        int m = 0;
        while (!in_trap(y)) {
          if (++m > s_.n_max) throw std::invalid_argument("U does not drain into the trap within the orbit cap");
          y = f.inverse(y);
        }
        worst = std::max(worst, m);
      }
    return worst + 2;
  }

  BumpPushSpec s_;
  bool torus_ = true;
  Frame frame_;
  int reach_ = 0;
};

inline Homeo bump_push(const BumpPushSpec& spec) {
  if (spec.t == 0) return Homeo::identity(spec.map->space());
  return Homeo::custom(std::make_shared<BumpPush>(spec));
}

/// h_t for each t in ts.
inline std::vector<Homeo> bump_push_family(const BumpPushSpec& spec, const std::vector<double>& ts) {
  std::vector<Homeo> out;
  for (double t : ts) {
    BumpPushSpec s = spec;
    s.t = t;
    // t = 0 still validates the geometry
    BumpPush check(s);
    out.push_back(bump_push(s));
  }
  return out;
}

/// Fraction of sample points whose saturation membership was not resolved within n_max.
inline double unresolved_fraction(const BumpPushSpec& spec, const std::vector<Point>& pts) {
  BumpPushSpec s = spec;
  if (s.t == 0) s.t = 1;
  BumpPush h(s);
  std::vector<int> un(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { un[i] = h.classify(pts[i]) == BumpPush::Status::Unresolved; });
  std::size_t c = 0;
  for (int v : un) c += static_cast<std::size_t>(v);
  return pts.empty() ? 0.0 : static_cast<double>(c) / static_cast<double>(pts.size());
}

/// c x id on S^1 x T^2.
inline Homeo product_lift(const Homeo& c) { return Homeo::product(c, Homeo::identity(PhaseSpace::torus())); }

struct DiscretenessEntry {
  std::size_t index = 0;
  std::string label;
  double residual = 0, d0 = 0;
  bool witness = false;
};

struct DiscretenessReport {
  std::vector<DiscretenessEntry> entries;
  std::vector<std::size_t> witnesses;
  double min_residual = 0;
  double eps = 0, tau = 0;
};

/// Flags candidates that commute with f within tau while staying d0-closer than eps to the identity.
inline DiscretenessReport discreteness_probe(const Diffeo& f, const std::vector<Homeo>& candidates,
                                             const std::vector<std::string>& labels, double eps, const Sampler& sm,
                                             double tau = 1e-6) {
  DiscretenessReport r;
  r.eps = eps;
  r.tau = tau;
  r.min_residual = candidates.empty() ? 0.0 : 1e300;
  auto pts = sample(f.space(), sm);
  const Homeo id = Homeo::identity(f.space());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    DiscretenessEntry e;
    e.index = i;
    e.label = i < labels.size() ? labels[i] : std::to_string(i);
    e.residual = commutation_residual(f, candidates[i], pts).value;
    e.d0 = d0(candidates[i], id, sm).value;
    e.witness = e.residual < tau && e.d0 < eps;
    if (e.witness) r.witnesses.push_back(i);
    r.min_residual = std::min(r.min_residual, e.residual);
    r.entries.push_back(std::move(e));
  }
  return r;
}

}  // namespace stab

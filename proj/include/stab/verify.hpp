#pragma once

#include <chrono>
#include <cmath>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "centralizer.hpp"
#include "chains.hpp"
#include "conjugacy.hpp"
#include "expansive.hpp"
#include "io.hpp"
#include "registry.hpp"

namespace stab::verify {

/// Acceptance thresholds.
namespace tol {
inline constexpr double moser_residual = 1e-6;
inline constexpr double k_ratio_lo = 0.5, k_ratio_hi = 2.0;
inline constexpr double constant_closed_form = 1e-10;
inline constexpr double conjugacy_seconds = 60.0;
inline constexpr double round_trip = 1e-12;
inline constexpr double composition_law = 1e-10;
inline constexpr double psi_commutation = 1e-5;
inline constexpr double ms_commutation = 1e-8;
inline constexpr double ms_pairwise_d0 = 1e-4;
inline constexpr double da_commutation = 1e-6;
inline constexpr double unresolved = 1e-3;
inline constexpr double product_commutation = 1e-8;
inline constexpr double translation_floor = 0.05;
inline constexpr double linear_commutation = 1e-12;
inline constexpr double certificate_diameter = 0.1;
inline constexpr double inverse_contract = 1e-10;
}  // namespace tol

enum class Rel { Less, LessEq, Greater, GreaterEq, Equal, Within };

struct Check {
  int criterion = 0;
  std::string id, name;
  double measured = 0;
  Rel rel = Rel::Less;
  double lo = 0, hi = 0;  // threshold; Within uses [lo, hi]
  bool pass = false;
  bool timing = false;    // measured value withheld so reports stay byte-identical
};

inline std::string rel_text(const Check& c) {
  char b[96];
  switch (c.rel) {
    case Rel::Less: std::snprintf(b, sizeof b, "< %g", c.lo); break;
    case Rel::LessEq: std::snprintf(b, sizeof b, "<= %g", c.lo); break;
    case Rel::Greater: std::snprintf(b, sizeof b, "> %g", c.lo); break;
    case Rel::GreaterEq: std::snprintf(b, sizeof b, ">= %g", c.lo); break;
    case Rel::Equal: std::snprintf(b, sizeof b, "== %g", c.lo); break;
    case Rel::Within: std::snprintf(b, sizeof b, "in [%g, %g]", c.lo, c.hi); break;
  }
  return b;
}

struct Report {
  std::string suite;
  std::vector<Check> checks;

  void add(int criterion, std::string id, std::string name, double measured, Rel rel, double lo, double hi = 0) {
    Check c;
    c.criterion = criterion;
    c.id = std::move(id);
    c.name = std::move(name);
    c.measured = measured;
    c.rel = rel;
    c.lo = lo;
    c.hi = hi;
    switch (rel) {
      case Rel::Less: c.pass = measured < lo; break;
      case Rel::LessEq: c.pass = measured <= lo; break;
      case Rel::Greater: c.pass = measured > lo; break;
      case Rel::GreaterEq: c.pass = measured >= lo; break;
      case Rel::Equal: c.pass = measured == lo; break;
      case Rel::Within: c.pass = measured >= lo && measured <= hi; break;
    }
    checks.push_back(std::move(c));
  }
  void add_timing(int criterion, std::string id, std::string name, double seconds, double limit) {
    add(criterion, std::move(id), std::move(name), seconds, Rel::Less, limit);
    checks.back().timing = true;
  }

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  bool criterion_pass(int k) const {
    for (const auto& c : checks)
      if (c.criterion == k && !c.pass) return false;
    return true;
  }
  std::vector<int> criteria() const {
    std::vector<int> out;
    for (const auto& c : checks)
      if (out.empty() || out.back() != c.criterion) out.push_back(c.criterion);
    return out;
  }
};

namespace detail {
inline double sup_pointwise(PhaseSpace s, const std::vector<Point>& pts, const Homeo& a, const Homeo& b) {
  return sup_over(pts, [&](const Point& x) { return distance(s, a(x), b(x)); }).value;
}
}  // namespace detail

/// Criteria 1 and 2: Moser solver and the F_h / Psi machinery.
inline void conjugacy_checks(Report& r) {
  Catalog cat;
  auto A = cat.get_as<LinearAnosov>("cat");
  const PhaseSpace T = PhaseSpace::torus();
  const auto t0 = std::chrono::steady_clock::now();

  std::shared_ptr<const GridHomeo> h2;
  double K[2] = {0, 0};
  const double epss[2] = {1e-3, 1e-2};
  for (int k = 0; k < 2; ++k) {
    auto g = std::make_shared<PerturbedAnosov>(A->matrix(), FourierField::default_field(), epss[k]);
    MoserOptions opt;
    opt.resolution = 256;
    auto h = moser_solve(A, g, opt);
    // fresh points, not the solver's own sweep
    const double res = conjugacy_residual(*A, *g, as_homeo(h), RandomUniform{10000, 7});
    r.add(1, k == 0 ? "1.a" : "1.b", std::string("off-grid conjugacy residual, eps=") + (k == 0 ? "1e-3" : "1e-2"), res, Rel::Less,
          tol::moser_residual);
    K[k] = h->sup_u() / map_distance(*A, *g, RandomUniform{10000, 11});
    if (k == 1) h2 = h;
  }
  r.add(1, "1.c", "K_estimate(1e-2) / K_estimate(1e-3)", K[1] / K[0], Rel::Within, tol::k_ratio_lo, tol::k_ratio_hi);

  {
    const Vec2 c{1.0, 0.0};
    const double eps = 0.01;
    auto g = std::make_shared<PerturbedAnosov>(A->matrix(), FourierField::constant(c), eps);
    MoserOptions opt;
    opt.resolution = 64;
    auto h = moser_solve(A, g, opt);
    // u0 = eps (I - A)^-1 c by Cramer's rule
    const Mat2 M = A->matrix();
    const double a = 1.0 - static_cast<double>(M.a), b = -static_cast<double>(M.b), cc = -static_cast<double>(M.c),
                 d = 1.0 - static_cast<double>(M.d);
    const double det = a * d - b * cc;
    const Vec2 u0{eps * (d * c[0] - b * c[1]) / det, eps * (-cc * c[0] + a * c[1]) / det};
    double err = 0;
    for (const auto& u : h->nodes()) err = std::max(err, std::hypot(u[0] - u0[0], u[1] - u0[1]));
    r.add(1, "1.d", "constant perturbation vs closed form", err, Rel::Less, tol::constant_closed_form);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.add_timing(1, "1.e", "solver wall time (s)", secs, tol::conjugacy_seconds);

  const Homeo h = as_homeo(h2);
  const Homeo minus_id = Homeo::affine(T, Mat2{-1, 0, 0, -1}, {0, 0});
  const Homeo fhat = Homeo::power(A, 1);
  auto pts = sample(T, RandomUniform{1000, 23});
  r.add(2, "2.a", "F_h^-1(F_h(-id)) vs -id", detail::sup_pointwise(T, pts, F_h_inverse(h, F_h(h, minus_id)), minus_id), Rel::Less,
        tol::round_trip);
  const double law = d0(F_h(h, minus_id * fhat), F_h(h, minus_id) * h.inv() * F_h(h, fhat), RandomUniform{1000, 29}).value;
  r.add(2, "2.b", "composition law d0", law, Rel::Less, tol::composition_law);
  auto g = std::make_shared<PerturbedAnosov>(A->matrix(), FourierField::default_field(), 1e-2);
  r.add(2, "2.c", "Psi(-id) commutes with g", commutation_residual(*g, push_centralizer(h, minus_id), RandomUniform{10000, 31}),
        Rel::Less, tol::psi_commutation);
}

/// Criteria 3 and 4: explicit centralizer elements and the discreteness contrast.
inline void centralizer_checks(Report& r) {
  Catalog cat;
  auto ns = cat.get_as<NorthSouth>("northsouth");
  const PhaseSpace C = PhaseSpace::circle();
  {
    auto pts = sample(C, RandomUniform{10000, 41});
    std::vector<Homeo> fam;
    std::vector<std::string> labels;
    double worst = 0;
    for (int k = 0; k <= 10; ++k) {
      fam.push_back(ms_centralizer(FundamentalDomainPiece::standard(ns, 0.001 * k)));
      labels.push_back("t=" + std::to_string(k) + "/10");
      worst = std::max(worst, commutation_residual(*ns, fam.back(), pts).value);
    }
    r.add(3, "3.a", "north-south family, max commutation residual", worst, Rel::Less, tol::ms_commutation);
    double closest = 1e300;
    for (std::size_t i = 0; i < fam.size(); ++i)
      for (std::size_t j = i + 1; j < fam.size(); ++j) closest = std::min(closest, d0(fam[i], fam[j], RandomUniform{2000, 43}).value);
    r.add(3, "3.b", "north-south family, min pairwise d0", closest, Rel::Greater, tol::ms_pairwise_d0);
    std::vector<Homeo> nonid(fam.begin() + 1, fam.end());
    std::vector<std::string> nl(labels.begin() + 1, labels.end());
    auto probe = discreteness_probe(*ns, nonid, nl, ns->meta().eps0 / 2, RandomUniform{2000, 44});
    r.add(3, "3.c", "north-south witnesses of non-discreteness", static_cast<double>(probe.witnesses.size()), Rel::Equal, 10);
  }
  {
    auto da = cat.get_as<DerivedFromAnosov>("da");
    const PhaseSpace T = PhaseSpace::torus();
    auto spec = BumpPushSpec::da_default(da, 0.01, 1.0);
    std::vector<double> ts;
    for (int k = 0; k <= 10; ++k) ts.push_back(0.1 * k);
    auto fam = bump_push_family(spec, ts);
    auto pts = sample(T, RandomUniform{10000, 47});
    double worst = 0;
    for (const auto& h : fam) worst = std::max(worst, commutation_residual(*da, h, pts).value);
    r.add(3, "3.d", "DA bump-push family, max commutation residual", worst, Rel::Less, tol::da_commutation);
    r.add(3, "3.e", "DA unresolved saturation fraction", unresolved_fraction(spec, pts), Rel::Less, tol::unresolved);
    double moved = fam[0].is_identity() ? 0.0 : 1.0;
    for (const auto& x : pts) {
      const Point y = fam[0](x), z = fam[0].inverse(x);
      if (!(y == x) || !(z == x)) moved += 1.0;
    }
    r.add(3, "3.f", "h_0 differs from id (points)", moved, Rel::Equal, 0);
    std::vector<Homeo> nonid(fam.begin() + 1, fam.end());
    std::vector<std::string> nl;
    for (int k = 1; k <= 10; ++k) nl.push_back("t=" + std::to_string(k) + "/10");
    auto probe = discreteness_probe(*da, nonid, nl, da->meta().eps0 / 2, RandomUniform{2000, 48});
    r.add(3, "3.g", "DA witnesses of non-discreteness", static_cast<double>(probe.witnesses.size()), Rel::Equal, 10);
  }
  {
    auto prod = cat.get("product");
    auto lift = product_lift(ms_centralizer(FundamentalDomainPiece::standard(ns, 0.01)));
    r.add(3, "3.h", "product lift commutation residual", commutation_residual(*prod, lift, RandomUniform{10000, 53}), Rel::Less,
          tol::product_commutation);
  }
  {
    auto A = cat.get_as<LinearAnosov>("cat");
    const PhaseSpace T = PhaseSpace::torus();
    std::vector<Homeo> cands;
    std::vector<std::string> labels;
    for (int i = 0; i < 64; ++i)
      for (int j = 0; j < 64; ++j) {
        if (i == 0 && j == 0) continue;
        cands.push_back(Homeo::translation(T, {i / 64.0, j / 64.0}));
        labels.push_back("(" + std::to_string(i) + "," + std::to_string(j) + ")/64");
      }
    auto probe = discreteness_probe(*A, cands, labels, A->meta().eps0 / 2, UniformGrid{4});
    r.add(4, "4.a", "cat map, min commutation residual over 64x64 translations", probe.min_residual, Rel::GreaterEq,
          tol::translation_floor);
    auto pts = sample(T, RandomUniform{10000, 59});
    double worst = commutation_residual(*A, Homeo::affine(T, Mat2{-1, 0, 0, -1}, {0, 0}), pts).value;
    for (int n = -3; n <= 3; ++n)
      if (n != 0) worst = std::max(worst, commutation_residual(*A, Homeo::power(A, n), pts).value);
    r.add(4, "4.b", "-id and A^n (0<|n|<=3) commutation residual", worst, Rel::Less, tol::linear_commutation);
  }
}

/// Criterion 5.
inline void expansive_checks(Report& r) {
  Catalog cat;
  auto A = cat.get_as<LinearAnosov>("cat");
  auto da = cat.get_as<DerivedFromAnosov>("da");
  auto ns = cat.get_as<NorthSouth>("northsouth");
  auto prod = cat.get("product");
  const PhaseSpace T = PhaseSpace::torus(), C = PhaseSpace::circle();

  auto g = dense_expansiveness_probe(*A, sample(T, UniformGrid{32}), 0.2, 15, 0);
  r.add(5, "5.a", "cat 32x32 grid pairs separated at eps=0.2, |n|<=15", g.fraction, Rel::Equal, 1.0);
  auto h = dense_expansiveness_probe(*da, heteroclinic_separated_set(*da, 200), da->meta().eps0 / 2, 60, 0);
  r.add(5, "5.b", "DA heteroclinic set pairs separated at eps0/2, |n|<=60", h.fraction, Rel::Equal, 1.0);
  auto cert = shrinking_ball_certificate(*ns, 0.1);
  r.add(5, "5.c", "north-south certified max diameter", cert.valid ? cert.certified_bound : 1.0, Rel::Less, tol::certificate_diameter);
  auto d = dense_expansiveness_probe(*ns, sample(C, UniformGrid{64}), 0.1, 200, 0);
  r.add(5, "5.d", "north-south 64-grid pairs separated at eps=0.1", d.fraction, Rel::Less, 1.0);
  auto s = sensitivity_probe(*ns, sample(C, UniformGrid{64}), 1e-3, 0.2, 200);
  r.add(5, "5.e", "north-south sensitivity fraction", s.fraction, Rel::Less, 1.0);
  auto p = sensitivity_probe(*prod, sample(prod->space(), UniformGrid{8}), 1e-3, 0.1, 30);
  r.add(5, "5.f", "product sensitivity fraction at delta=1e-3, eps=0.1, N=30", p.fraction, Rel::Equal, 1.0);
}

namespace detail {
/// Reachability by breadth-first search over declared edges.
inline bool oracle_A(const chains::SpectralSpec& s) {
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(s.pieces[i].trivial && s.pieces[i].kind == chains::PieceKind::Repeller)) continue;
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(static_cast<int>(i));
    while (!q.empty()) {
      int a = q.front();
      q.pop();
      for (const auto& e : s.edges)
        if (e.hi == a && !seen[static_cast<std::size_t>(e.lo)]) {
          seen[static_cast<std::size_t>(e.lo)] = 1;
          const auto& p = s.pieces[static_cast<std::size_t>(e.lo)];
          if (p.trivial && p.kind == chains::PieceKind::Attractor) return false;
          q.push(e.lo);
        }
    }
  }
  return true;
}
/// dim_u never increases along edges, so every maximal chain is constant iff every edge is.
inline bool oracle_C(const chains::SpectralSpec& s) {
  for (const auto& e : s.edges)
    if (s.pieces[static_cast<std::size_t>(e.hi)].dim_u != s.pieces[static_cast<std::size_t>(e.lo)].dim_u) return false;
  return true;
}
}  // namespace detail

/// Criterion 6.
inline void chains_checks(Report& r) {
  struct Expect {
    const char* name;
    bool v[4];
  };
  const Expect expect[] = {{"cat", {true, true, true, true}},
                           {"da", {true, true, false, false}},
                           {"northsouth", {false, false, false, false}},
                           {"product", {true, true, false, false}}};
  for (const auto& e : expect) {
    auto pr = chains::parse_spec(builtin_spec(e.name));
    double bad = static_cast<double>(pr.violations.size());
    if (pr.violations.empty()) {
      auto v = chains::verdict(pr.spec);
      const bool got[4] = {v.densely_expansive, v.sensitive, v.anosov, v.centralizer_discrete};
      for (int k = 0; k < 4; ++k) bad += got[k] != e.v[k];
    }
    r.add(6, std::string("6.") + e.name, std::string(e.name) + " verdict mismatches", bad, Rel::Equal, 0);
  }
  {
    auto s = chains::parse_spec(builtin_spec("example44")).spec;
    auto f = chains::select_theta(s);
    auto b = chains::select_theta(chains::reversed(s));
    using V = std::vector<std::string>;
    double bad = 0;
    bad += f.attractors != V{"L1", "L2"};
    bad += !f.repellers.empty();
    bad += b.attractors != V{"L5"};
    bad += b.repellers != V{"L1"};
    r.add(6, "6.theta", "Example 4.4 theta selection mismatches (f and f^-1)", bad, Rel::Equal, 0);
  }
  {
    std::mt19937_64 rng(20240611);
    double bad = 0;
    for (int k = 0; k < 1000; ++k) {
      auto s = chains::random_valid_spec(rng);
      if (!chains::validate(s).empty()) {
        ++bad;
        continue;
      }
      auto v = chains::verdict(s);
      const bool ok = v.densely_expansive == v.sensitive && v.anosov == v.centralizer_discrete &&
                      v.densely_expansive == detail::oracle_A(s) && v.anosov == detail::oracle_C(s);
      auto back = chains::parse_spec(chains::print_spec(s));
      if (!ok || !back.violations.empty() || !chains::equivalent(back.spec, s)) ++bad;
    }
    r.add(6, "6.random", "random valid specs violating verdict equivalences", bad, Rel::Equal, 0);
  }
}

/// Criterion 7.
inline void catalog_checks(Report& r) {
  Catalog cat;
  double worst = 0;
  for (const auto& name : cat.names()) {
    auto f = cat.get(name);
    auto pts = sample(f->space(), RandomUniform{10000, 61});
    worst = std::max(worst, sup_over(pts, [&](const Point& x) {
                              return std::max(distance(f->space(), f->inverse(f->forward(x)), x),
                                              distance(f->space(), f->forward(f->inverse(x)), x));
                            }).value);
  }
  r.add(7, "7.a", "inverse contract over all catalog maps", worst, Rel::Less, tol::inverse_contract);

  auto A = cat.get_as<LinearAnosov>("cat");
  double bad = 0;
  const std::int64_t known[3] = {1, 5, 16};
  for (int n = 1; n <= 6; ++n) {
    const auto lin = periodic_point_count_linear(A->matrix(), n);
    bad += lin != periodic_point_count_lattice(A->matrix(), n);
    if (n <= 3) bad += lin != known[n - 1];
  }
  r.add(7, "7.b", "periodic point count mismatches, n<=6", bad, Rel::Equal, 0);

  auto da = cat.get_as<DerivedFromAnosov>("da");
  auto pts = sample(PhaseSpace::torus(), RandomUniform{10000, 67});
  double diff = 0, outside = 0;
  for (const auto& x : pts) {
    if (da->in_support(x)) continue;
    outside += 1;
    if (!(da->forward(x) == A->forward(x))) diff += 1;
  }
  r.add(7, "7.c", "DA vs cat outside the bump (differing points)", outside > 0 ? diff : 1.0, Rel::Equal, 0);
}

inline const std::vector<std::string>& suites() {
  static const std::vector<std::string> s = {"all", "conjugacy", "centralizer", "expansive", "chains", "catalog"};
  return s;
}

inline Report run(const std::string& suite) {
  Report r;
  r.suite = suite;
  const bool all = suite == "all";
  if (!all && std::find(suites().begin(), suites().end(), suite) == suites().end())
    throw std::invalid_argument("unknown suite '" + suite + "'");
  if (all || suite == "conjugacy") conjugacy_checks(r);
  if (all || suite == "centralizer") centralizer_checks(r);
  if (all || suite == "expansive") expansive_checks(r);
  if (all || suite == "chains") chains_checks(r);
  if (all || suite == "catalog") catalog_checks(r);
  return r;
}

inline json to_json(const Report& r) {
  json j;
  j["suite"] = r.suite;
  j["pass"] = r.pass();
  json cs = json::array();
  for (const auto& c : r.checks) {
    json e;
    e["criterion"] = c.criterion;
    e["id"] = c.id;
    e["name"] = c.name;
    e["measured"] = c.timing ? json(nullptr) : json(c.measured);
    e["threshold"] = rel_text(c);
    e["pass"] = c.pass;
    cs.push_back(e);
  }
  j["checks"] = cs;
  return j;
}

inline std::string table(const Report& r) {
  std::string out;
  for (const auto& c : r.checks) {
    char b[256];
    const std::string m = c.timing ? std::string("(not recorded)") : io::format_double(c.measured);
    std::snprintf(b, sizeof b, "%s  %-9s %-58s %-24s %s\n", c.pass ? "PASS" : "FAIL", c.id.c_str(), c.name.c_str(), m.c_str(),
                  rel_text(c).c_str());
    out += b;
  }
  out += r.pass() ? "overall: PASS\n" : "overall: FAIL\n";
  return out;
}

}  // namespace stab::verify

#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <stab/catalog.hpp>
#include <stab/registry.hpp>

using namespace stab;

namespace {
std::string slurp(const std::string& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}
}  // namespace

TEST(Mat2, Arithmetic) {
  const Mat2 A = cat_matrix();
  EXPECT_EQ(A.det(), 1);
  EXPECT_EQ(A.inverse(), (Mat2{1, -1, -1, 2}));
  EXPECT_EQ(A.pow(2), (Mat2{5, 3, 3, 2}));
  EXPECT_EQ(A.pow(-1), A.inverse());
  EXPECT_EQ(A.pow(0), Mat2::identity());
}

TEST(Frame, EigenvaluesOfCatMap) {
  const Frame F = stable_unstable_frame(cat_matrix());
  const double lu = (3 + std::sqrt(5.0)) / 2;
  EXPECT_NEAR(F.lambda_u, lu, 1e-14);
  EXPECT_NEAR(F.lambda_s * F.lambda_u, 1.0, 1e-14);
  const Vec2 Au = cat_matrix().apply(F.e_u), As = cat_matrix().apply(F.e_s);
  EXPECT_NEAR(Au[0], lu * F.e_u[0], 1e-14);
  EXPECT_NEAR(Au[1], lu * F.e_u[1], 1e-14);
  EXPECT_NEAR(As[0], F.lambda_s * F.e_s[0], 1e-14);
  EXPECT_NEAR(F.s_of(F.e_s), 1.0, 1e-14);
  EXPECT_NEAR(F.u_of(F.e_s), 0.0, 1e-14);
  EXPECT_NEAR(F.u_of(F.e_u), 1.0, 1e-14);
  EXPECT_THROW(stable_unstable_frame(Mat2{1, 1, 0, 1}), std::domain_error);
}

// |det(A^n - I)| = lambda_u^n + lambda_s^n - 2 for the cat map (trace formula).
TEST(PeriodicPoints, CountsMatchTraceFormulaAndLattice) {
  const double lu = (3 + std::sqrt(5.0)) / 2, ls = 1 / lu;
  const std::int64_t listed[] = {1, 5, 16, 45, 121, 320};
  for (int n = 1; n <= 6; ++n) {
    const auto c = periodic_point_count_linear(cat_matrix(), n);
    EXPECT_EQ(c, std::llround(std::pow(lu, n) + std::pow(ls, n) - 2)) << n;
    EXPECT_EQ(c, listed[n - 1]) << n;
    EXPECT_EQ(c, periodic_point_count_lattice(cat_matrix(), n)) << n;
  }
}

TEST(Catalog, InverseContractOnAllMaps) {
  Catalog cat;
  for (const auto& name : cat.names()) {
    auto f = cat.get(name);
    auto pts = sample(f->space(), RandomUniform{10000, 61});
    double worst = 0;
    for (const auto& x : pts)
      worst = std::max({worst, distance(f->space(), f->inverse(f->forward(x)), x), distance(f->space(), f->forward(f->inverse(x)), x)});
    EXPECT_LT(worst, 1e-10) << name;
  }
}

TEST(Catalog, DefaultsAndLookup) {
  Catalog cat;
  EXPECT_EQ(cat.names(), (std::vector<std::string>{"cat", "catpert", "northsouth", "da", "product", "cat2"}));
  EXPECT_THROW(cat.get("missing"), std::invalid_argument);
  EXPECT_THROW(cat.get_as<NorthSouth>("cat"), std::invalid_argument);
  EXPECT_EQ(cat.get("da")->meta().spectral_spec, "da");
}

TEST(Catalog, FileMatchesBuiltIn) {
  const auto file = json::parse(slurp(std::string(STAB_SOURCE_DIR) + "/data/catalog.json"));
  EXPECT_EQ(file, json::parse(default_catalog_text()));
  Catalog from_file(file);
  EXPECT_EQ(from_file.names(), Catalog().names());
  for (const auto& [name, text] : builtin_specs())
    EXPECT_EQ(slurp(std::string(STAB_SOURCE_DIR) + "/data/specs/" + name + ".txt"), text) << name;
}

TEST(Catalog, RejectsBadEntries) {
  EXPECT_THROW(Catalog(json::parse(R"({"maps":[{"name":"x","body":"nope"}]})")), std::invalid_argument);
  EXPECT_THROW(Catalog(json::parse(R"({"maps":[{"name":"c","body":"linear_anosov","parameters":{"matrix":[[2,1],[1,1]]}},
                                                {"name":"c","body":"linear_anosov","parameters":{"matrix":[[2,1],[1,1]]}}]})")),
               std::invalid_argument);
  EXPECT_ANY_THROW(Catalog(json::parse(R"({"maps":[{"name":"c","body":"linear_anosov","parameters":{"matrix":[[1,1],[0,1]]}}]})")));
}

TEST(LinearAnosov, ActsModOne) {
  Catalog cat;
  auto f = cat.get("cat");
  Point y = f->forward({0.3, 0.4});
  EXPECT_NEAR(y[0], 0.0, 1e-15);  // 2*0.3 + 0.4 = 1.0
  EXPECT_NEAR(y[1], 0.7, 1e-15);
  auto g = cat.get("cat2");
  auto pts = sample(PhaseSpace::torus(), RandomUniform{200, 3});
  for (const auto& x : pts) {
    Point z{wrap(5 * x[0] + 3 * x[1]), wrap(3 * x[0] + 2 * x[1])};
    EXPECT_LT(distance(PhaseSpace::torus(), g->forward(x), z), 1e-14);
  }
}

TEST(NorthSouth, FixedPointsAndDerivatives) {
  NorthSouth f(0.1);
  EXPECT_EQ(f.forward({0.0})[0], 0.0);
  EXPECT_NEAR(f.forward({0.5})[0], 0.5, 1e-16);
  EXPECT_GT(f.derivative(0.0), 1.0);
  EXPECT_LT(f.derivative(0.5), 1.0);
  EXPECT_NEAR(f.forward({0.25})[0], 0.35, 1e-15);
  EXPECT_NEAR(f.inverse({0.35})[0], 0.25, 1e-14);
  EXPECT_THROW(NorthSouth(0.2), std::invalid_argument);
}

TEST(Perturbed, FieldAndJacobian) {
  auto p = FourierField::default_field();
  const double x = 0.3, y = 0.17;
  auto v = p(x, y);
  EXPECT_NEAR(v[0], std::sin(two_pi * y) / two_pi, 1e-15);
  EXPECT_NEAR(v[1], 0.0, 1e-15);
  auto J = p.jacobian(x, y);
  const double h = 1e-6;
  for (int c = 0; c < 2; ++c) {
    auto px = p(x + h, y), mx = p(x - h, y), py = p(x, y + h), my = p(x, y - h);
    EXPECT_NEAR(J[c][0], (px[c] - mx[c]) / (2 * h), 1e-8);
    EXPECT_NEAR(J[c][1], (py[c] - my[c]) / (2 * h), 1e-8);
  }
  PerturbedAnosov zero(cat_matrix(), p, 0.0);
  LinearAnosov lin(cat_matrix());
  for (const auto& q : sample(PhaseSpace::torus(), RandomUniform{100, 4})) EXPECT_EQ(zero.forward(q), lin.forward(q));
  EXPECT_THROW(PerturbedAnosov(cat_matrix(), p, 5.0), std::invalid_argument);
}

TEST(DerivedFromAnosov, EqualsCatOutsideBumpExactly) {
  Catalog cat;
  auto da = cat.get_as<DerivedFromAnosov>("da");
  auto A = cat.get("cat");
  std::size_t outside = 0, inside_moved = 0;
  for (const auto& x : sample(PhaseSpace::torus(), RandomUniform{10000, 67})) {
    if (da->in_support(x)) {
      inside_moved += !(da->forward(x) == A->forward(x));
      continue;
    }
    ++outside;
    EXPECT_EQ(da->forward(x), A->forward(x));
  }
  EXPECT_GT(outside, 9000u);
  EXPECT_GT(inside_moved, 0u);
}

TEST(DerivedFromAnosov, PushesAlongStableDirectionOnly) {
  Catalog cat;
  auto da = cat.get_as<DerivedFromAnosov>("da");
  auto A = cat.get("cat");
  const Frame F = stable_unstable_frame(cat_matrix());
  for (const auto& x : sample(PhaseSpace::torus(), RandomUniform{2000, 8})) {
    const Point a = da->forward(x), b = A->forward(x);
    Vec2 d{wdiff(a[0], b[0]), wdiff(a[1], b[1])};
    EXPECT_NEAR(F.u_of(d), 0.0, 1e-14);
  }
  EXPECT_EQ(da->forward(da->center()), da->center());
}

TEST(DerivedFromAnosov, QuarticBumpIsRejected) {
  try {
    DerivedFromAnosov f(cat_matrix(), 0.15, 1.0, {0.0, 0.0}, BumpShape::Quartic);
    FAIL() << "quartic bump accepted";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("not injective"), std::string::npos) << e.what();
  }
}

TEST(Product, ActsFactorwise) {
  Catalog cat;
  auto P = cat.get("product");
  auto ns = cat.get("northsouth");
  auto A = cat.get("cat");
  Point x{0.1, 0.3, 0.4};
  Point y = P->forward(x);
  EXPECT_EQ(y[0], ns->forward({0.1})[0]);
  EXPECT_EQ(y[1], A->forward({0.3, 0.4})[0]);
  EXPECT_EQ(y[2], A->forward({0.3, 0.4})[1]);
}

TEST(Orbit, RowsMatchIterates) {
  Catalog cat;
  auto f = cat.get("northsouth");
  auto orb = orbit(*f, {0.1}, -2, 3);
  ASSERT_EQ(orb.size(), 6u);
  for (const auto& [n, p] : orb) EXPECT_LT(distance(f->space(), p, f->iterate({0.1}, n)), 1e-14) << n;
  EXPECT_THROW(orbit(*f, {0.1}, 3, -2), std::invalid_argument);
}

#include <cmath>

#include <gtest/gtest.h>

#include <stab/conjugacy.hpp>
#include <stab/registry.hpp>

using namespace stab;

namespace {

struct Fixture {
  Catalog cat;
  std::shared_ptr<const LinearAnosov> A = cat.get_as<LinearAnosov>("cat");

  std::shared_ptr<const PerturbedAnosov> pert(double eps, FourierField p = FourierField::default_field()) const {
    return std::make_shared<PerturbedAnosov>(A->matrix(), std::move(p), eps);
  }
  std::shared_ptr<const GridHomeo> solve(double eps, int res = 64) const {
    MoserOptions o;
    o.resolution = res;
    return moser_solve(A, pert(eps), o);
  }
};

const PhaseSpace T = PhaseSpace::torus();

}  // namespace

TEST(Moser, ZeroPerturbationGivesIdentity) {
  Fixture f;
  auto h = f.solve(0.0, 32);
  for (const auto& u : h->nodes()) {
    EXPECT_EQ(u[0], 0.0);
    EXPECT_EQ(u[1], 0.0);
  }
  EXPECT_EQ(h->sup_u(), 0.0);
}

// (I - A) u = eps c has the unique solution u = (0, -eps) for c = (1, 0).
TEST(Moser, ConstantPerturbationClosedForm) {
  Fixture f;
  MoserOptions o;
  o.resolution = 16;
  auto h = moser_solve(f.A, f.pert(0.01, FourierField::constant({1.0, 0.0})), o);
  for (const auto& u : h->nodes()) {
    EXPECT_NEAR(u[0], 0.0, 1e-12);
    EXPECT_NEAR(u[1], -0.01, 1e-12);
  }
}

TEST(Moser, OffGridResidualIsSmall) {
  Fixture f;
  auto g = f.pert(1e-2);
  MoserOptions o;
  o.resolution = 128;
  auto h = moser_solve(f.A, g, o);
  EXPECT_LT(conjugacy_residual(*f.A, *g, as_homeo(h), RandomUniform{4000, 99}), 1e-6);
  // stored residual is the sup over its own sweep
  const double again = conjugacy_residual(*f.A, *g, as_homeo(h), h->residual_sweep()).value;
  EXPECT_EQ(again, h->residual());
  EXPECT_EQ(h->residual_sweep().size(), o.sweep_count);
}

TEST(Moser, NodeResidualHistoryShrinks) {
  Fixture f;
  auto h = f.solve(1e-2);
  const auto& hist = h->node_residual_history();
  ASSERT_GE(hist.size(), 2u);
  EXPECT_LT(hist.back(), hist.front());
  EXPECT_LT(hist.back(), 1e-12);
  EXPECT_EQ(static_cast<int>(hist.size()), h->iterations_used());
}

TEST(Moser, DisplacementScalesLinearlyInEps) {
  Fixture f;
  const double ratio = f.solve(1e-2)->sup_u() / f.solve(1e-3)->sup_u();
  EXPECT_GE(ratio, 8.0);
  EXPECT_LE(ratio, 12.0);
}

TEST(Moser, TooLargeIsReported) {
  Fixture f;
  try {
    f.solve(0.5, 16);
    FAIL() << "no error";
  } catch (const PerturbationTooLarge& e) {
    EXPECT_STREQ(e.what(), "perturbation too large");
  }
}

TEST(Moser, RefinementAgreesOnSharedNodes) {
  Fixture f;
  auto h1 = f.solve(1e-2, 32), h2 = f.solve(1e-2, 64);
  double worst = 0;
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      auto a = h1->node(i, j), b = h2->node(2 * i, 2 * j);
      worst = std::max(worst, std::hypot(a[0] - b[0], a[1] - b[1]));
    }
  EXPECT_LT(worst, 1e-10);
}

TEST(Moser, InverseRoundTrip) {
  Fixture f;
  auto h = f.solve(1e-2);
  for (const auto& x : sample(T, RandomUniform{500, 3})) EXPECT_LT(distance(T, h->inverse(h->forward(x)), x), 1e-10);
  EXPECT_EQ(h->injectivity_violations(), 0);
}

TEST(Moser, RejectsMismatchedInputs) {
  Fixture f;
  MoserOptions o;
  o.resolution = 1;
  EXPECT_THROW(moser_solve(f.A, f.pert(1e-3), o), std::invalid_argument);
  auto other = std::make_shared<PerturbedAnosov>(Mat2{3, 1, 2, 1}, FourierField::default_field(), 1e-3);
  EXPECT_THROW(moser_solve(f.A, other, {}), std::invalid_argument);
}

TEST(D0, RotationOfCircle) {
  const auto C = PhaseSpace::circle();
  const Homeo r = Homeo::affine(C, Mat2::identity(), {0.1, 0.0});
  auto rep = d0(r, Homeo::identity(C), UniformGrid{100});
  EXPECT_NEAR(rep.sup_forward, 0.1, 1e-15);
  EXPECT_NEAR(rep.sup_inverse, 0.1, 1e-15);
  EXPECT_NEAR(rep.value, 0.2, 1e-15);
  EXPECT_EQ(d0(r, r, UniformGrid{100}).value, 0.0);
  EXPECT_THROW(d0(r, Homeo::identity(T), UniformGrid{4}), std::invalid_argument);
}

TEST(Residuals, IdentityConjugacyIsMapDistance) {
  Fixture f;
  auto g = f.pert(1e-2);
  const Sampler s = RandomUniform{1000, 5};
  EXPECT_EQ(conjugacy_residual(*f.A, *g, Homeo::identity(T), s), map_distance(*f.A, *g, s));
  EXPECT_NEAR(map_distance(*f.A, *g, s), 1e-2 / two_pi, 1e-5);
}

TEST(Push, FhRoundTripAndPsi) {
  Fixture f;
  auto hg = f.solve(1e-2, 128);
  auto g = f.pert(1e-2);
  const Homeo h = as_homeo(hg);
  const Homeo minus_id = Homeo::affine(T, Mat2{-1, 0, 0, -1}, {0, 0});
  auto pts = sample(T, RandomUniform{300, 7});
  for (const auto& x : pts) EXPECT_LT(distance(T, F_h_inverse(h, F_h(h, minus_id))(x), minus_id(x)), 1e-12);
  // pushing A itself gives g
  const Homeo psiA = push_centralizer(h, Homeo::power(f.A, 1));
  for (const auto& x : pts) EXPECT_LT(distance(T, psiA(x), g->forward(x)), 1e-5);
  EXPECT_LT(commutation_residual(*g, push_centralizer(h, minus_id), RandomUniform{2000, 9}), 1e-5);
}

TEST(Push, ReversorTransfers) {
  Fixture f;
  const Homeo R = Homeo::affine(T, Mat2{-1, 0, 1, 1}, {0, 0});
  EXPECT_LT(reversibility_check(*f.A, R, RandomUniform{1000, 2}), 1e-13);
  const Homeo swap = Homeo::affine(T, Mat2{0, 1, 1, 0}, {0, 0});
  EXPECT_GT(reversibility_check(*f.A, swap, RandomUniform{1000, 2}), 0.1);
  auto g = f.pert(1e-2);
  const Homeo h = as_homeo(f.solve(1e-2, 128));
  EXPECT_LT(reversibility_check(*g, push_centralizer(h, R), RandomUniform{1000, 2}), 1e-5);
}

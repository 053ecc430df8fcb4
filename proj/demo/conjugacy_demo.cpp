// Conjugacy between the cat map and a small perturbation of it, and a commuter carried across.
#include <cstdio>

#include <stab/conjugacy.hpp>
#include <stab/registry.hpp>

using namespace stab;

int main() {
  Catalog cat;
  auto A = cat.get_as<LinearAnosov>("cat");
  for (double eps : {1e-3, 1e-2, 5e-2}) {
    auto g = std::make_shared<PerturbedAnosov>(A->matrix(), FourierField::default_field(), eps);
    auto h = moser_solve(A, g);
    const double dist = map_distance(*A, *g, RandomUniform{4000, 3});
    std::printf("eps %-6g residual %.3e  sup|u| %.6e  K %.4f  outer iterations %d\n", eps, h->residual(), h->sup_u(),
                h->sup_u() / dist, h->iterations_used());
    if (eps == 1e-2) {
      // -id commutes with A, so h (-id) h^-1 commutes with g
      Homeo minus = Homeo::affine(PhaseSpace::torus(), Mat2{-1, 0, 0, -1}, {0, 0});
      Homeo psi = push_centralizer(as_homeo(h), minus);
      std::printf("  pushed -id commutes with g to %.3e\n", commutation_residual(*g, psi, RandomUniform{4000, 5}));
    }
  }
  try {
    auto g = std::make_shared<PerturbedAnosov>(A->matrix(), FourierField::default_field(), 0.5);
    moser_solve(A, g);
  } catch (const PerturbationTooLarge& e) {
    std::printf("eps 0.5: %s\n", e.what());
  }
}

// Continua of commuting homeomorphisms for maps that are not Anosov.
#include <cstdio>

#include <stab/centralizer.hpp>
#include <stab/registry.hpp>

using namespace stab;

int main() {
  Catalog cat;
  auto ns = cat.get_as<NorthSouth>("northsouth");
  const Homeo id1 = Homeo::identity(PhaseSpace::circle());
  std::printf("north-south, h0 shifts the middle of [0.25, f(0.25)) by b\n");
  for (double b : {0.0, 0.0025, 0.005, 0.01}) {
    Homeo h = ms_centralizer(FundamentalDomainPiece::standard(ns, b));
    std::printf("  b %-7g commutation %.2e  d0(h,id) %.5f\n", b, commutation_residual(*ns, h, RandomUniform{4000, 1}),
                d0(h, id1, RandomUniform{4000, 1}).value);
  }
  auto da = cat.get_as<DerivedFromAnosov>("da");
  const Homeo id2 = Homeo::identity(PhaseSpace::torus());
  std::printf("DA map, push of size t*0.01 along stable fibres\n");
  for (double t : {0.0, 0.25, 0.5, 1.0}) {
    auto spec = BumpPushSpec::da_default(da, 0.01, t);
    Homeo h = bump_push(spec);
    auto pts = sample(PhaseSpace::torus(), RandomUniform{4000, 2});
    std::printf("  t %-5g commutation %.2e  d0(h,id) %.5f  unresolved %.4f\n", t, commutation_residual(*da, h, pts).value,
                d0(h, id2, RandomUniform{4000, 2}).value, unresolved_fraction(spec, pts));
  }
}

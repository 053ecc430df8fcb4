// Verdicts for the shipped spectral decompositions.
#include <cstdio>

#include <stab/io.hpp>
#include <stab/registry.hpp>

using namespace stab;

int main() {
  for (const auto& [name, text] : builtin_specs()) {
    std::printf("== %s\n%s", name.c_str(), io::chains_text(io::chains_report(text)).c_str());
  }
  auto s = chains::parse_spec(builtin_spec("example44")).spec;
  auto th = chains::select_theta(chains::reversed(s));
  std::printf("== example44 for the inverse map\ntheta_a =");
  for (const auto& a : th.attractors) std::printf(" %s", a.c_str());
  std::printf(", theta_r =");
  for (const auto& r : th.repellers) std::printf(" %s", r.c_str());
  std::printf("\n");
}

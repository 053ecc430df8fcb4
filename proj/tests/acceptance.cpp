// One line per acceptance criterion on stdout; the per-check table goes to stderr.
#include <cstdio>
#include <map>
#include <string>

#include <stab/verify.hpp>

int main() {
  const std::map<int, std::string> titles = {
      {1, "Moser conjugacy: residual, K ratio, constant closed form, runtime"},
      {2, "F_h round trip, composition law, Psi(-id) commutes with g"},
      {3, "centralizer families: north-south, DA bump push, product lift"},
      {4, "discreteness contrast for the cat map"},
      {5, "expansiveness, certificate and sensitivity probes"},
      {6, "chains oracle: verdicts, theta selection, random specs"},
      {7, "catalog soundness: inverses, periodic counts, DA outside the bump"},
  };
  auto rep = stab::verify::run("all");
  std::fputs(stab::verify::table(rep).c_str(), stderr);
  int failed = 0;
  for (const auto& [k, title] : titles) {
    const bool ok = rep.criterion_pass(k);
    failed += !ok;
    std::string ids;
    for (const auto& c : rep.checks)
      if (c.criterion == k && !c.pass) ids += " " + c.id;
    std::printf("criterion %d: %s  %s%s%s\n", k, ok ? "PASS" : "FAIL", title.c_str(), ok ? "" : "  [failed:", ok ? "" : (ids + "]").c_str());
  }
  return failed ? 1 : 0;
}

// stab: command-line front end for the catalog, solvers, probes and the chains analyzer.
#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <stab/centralizer.hpp>
#include <stab/chains.hpp>
#include <stab/conjugacy.hpp>
#include <stab/expansive.hpp>
#include <stab/io.hpp>
#include <stab/registry.hpp>
#include <stab/verify.hpp>

using namespace stab;

namespace {

enum Exit { Ok = 0, Numerical = 1, Usage = 2, VerifyFailed = 3 };

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

void summary(const json& j) { std::cout << io::dump(j, -1) << "\n"; }

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw UsageError("bad number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::pair<int, int> parse_range(const std::string& s) {
  auto c = s.find(':');
  if (c == std::string::npos) throw UsageError("range must look like a:b");
  return {std::stoi(s.substr(0, c)), std::stoi(s.substr(c + 1))};
}

Catalog load_catalog(const std::string& path) {
  if (path.empty()) return Catalog();
  return Catalog(json::parse(io::read_file(path)));
}

void write_or_skip(const std::string& path, const std::string& text) {
  if (!path.empty()) io::write_file(path, text);
}

/// Point set for the probes: grid:R, random:C[:S] or heteroclinic:N.
std::vector<Point> point_set(const Diffeo& f, const std::string& spec) {
  if (spec.rfind("heteroclinic:", 0) == 0) return heteroclinic_separated_set(f, std::stoul(spec.substr(13)));
  return sample(f.space(), parse_sampler(spec));
}

std::string default_set(PhaseSpace s) {
  switch (s.kind) {
    case SpaceKind::Circle: return "grid:64";
    case SpaceKind::Torus2: return "grid:16";
    default: return "grid:8";
  }
}

FourierField parse_pert(const std::string& p) {
  if (p == "default") return FourierField::default_field();
  if (p.rfind("constant:", 0) == 0) {
    auto v = parse_list(p.substr(9));
    if (v.size() != 2) throw UsageError("constant perturbation needs two components");
    return FourierField::constant({v[0], v[1]});
  }
  return field_from_json(json::parse(io::read_file(p)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stab: structural stability toolkit"};
  app.require_subcommand(1);
  std::string catalog_path;
  std::uint64_t seed = 1;
  app.add_option("--catalog", catalog_path, "map catalog JSON (default: built-in)");
  app.add_option("--seed", seed, "seed for random samplers");

  // catalog list
  auto* c_cat = app.add_subcommand("catalog", "catalog operations");
  c_cat->require_subcommand(1);
  auto* c_list = c_cat->add_subcommand("list", "print names and parameters");

  // orbit
  auto* c_orbit = app.add_subcommand("orbit", "orbit of a point as CSV");
  std::string o_map, o_x, o_range = "0:10", o_out;
  c_orbit->add_option("--map", o_map)->required();
  c_orbit->add_option("--x", o_x, "comma-separated coordinates")->required();
  c_orbit->add_option("--range", o_range, "n_min:n_max");
  c_orbit->add_option("--out", o_out)->required();

  // conjugate
  auto* c_conj = app.add_subcommand("conjugate", "Moser conjugacy between a linear map and its perturbation");
  std::string cj_base = "cat", cj_pert = "default", cj_out;
  double cj_eps = 0.01;
  int cj_res = 256;
  c_conj->add_option("--base", cj_base);
  c_conj->add_option("--pert", cj_pert, "default | constant:c1,c2 | field JSON file");
  c_conj->add_option("--eps", cj_eps);
  c_conj->add_option("--res", cj_res);
  c_conj->add_option("--out", cj_out);

  // centralizer build|family|probe
  auto* c_cen = app.add_subcommand("centralizer", "centralizer constructions");
  c_cen->require_subcommand(1);
  auto* c_build = c_cen->add_subcommand("build", "one centralizer element");
  std::string cb_map, cb_kind = "ms", cb_out;
  double cb_bump = 0.01, cb_zeta = 0.01, cb_t = 1.0;
  c_build->add_option("--map", cb_map)->required();
  c_build->add_option("--kind", cb_kind, "ms | bump")->check(CLI::IsMember({"ms", "bump"}));
  c_build->add_option("--bump", cb_bump, "midpoint shift of h0 (ms)");
  c_build->add_option("--zeta", cb_zeta, "push size (bump)");
  c_build->add_option("--t", cb_t, "family parameter (bump)");
  c_build->add_option("--out", cb_out);
  auto* c_fam = c_cen->add_subcommand("family", "one-parameter family t = 0..1");
  std::string cf_map, cf_out;
  double cf_zeta = 0.01;
  int cf_steps = 11;
  c_fam->add_option("--map", cf_map)->required();
  c_fam->add_option("--zeta", cf_zeta);
  c_fam->add_option("--steps", cf_steps)->check(CLI::Range(2, 1000));
  c_fam->add_option("--out", cf_out);
  auto* c_probe = c_cen->add_subcommand("probe", "search for small near-commuters");
  std::string cp_map, cp_out;
  int cp_grid = 64;
  double cp_eps = -1, cp_tau = 1e-6;
  c_probe->add_option("--map", cp_map)->required();
  c_probe->add_option("--grid", cp_grid, "translation grid (cat) or family size");
  c_probe->add_option("--eps", cp_eps, "d0 radius (default eps0/2)");
  c_probe->add_option("--tau", cp_tau, "commutation tolerance");
  c_probe->add_option("--out", cp_out);

  // expansive
  auto* c_exp = app.add_subcommand("expansive", "dense expansiveness probe");
  std::string e_map, e_set, e_out, e_csv;
  double e_eps = -1;
  int e_h = 20;
  std::size_t e_max = 100000;
  c_exp->add_option("--map", e_map)->required();
  c_exp->add_option("--set", e_set, "grid:R | random:C[:S] | heteroclinic:N");
  c_exp->add_option("--eps", e_eps, "threshold (default eps0/2)");
  c_exp->add_option("--horizon", e_h);
  c_exp->add_option("--max-pairs", e_max, "0 tests every pair");
  c_exp->add_option("--out", e_out);
  c_exp->add_option("--csv", e_csv, "failing pairs");

  // sensitivity
  auto* c_sen = app.add_subcommand("sensitivity", "sensitivity probe");
  std::string s_map, s_set, s_out;
  double s_delta = 1e-3, s_eps = -1;
  int s_h = 20;
  c_sen->add_option("--map", s_map)->required();
  c_sen->add_option("--set", s_set);
  c_sen->add_option("--delta", s_delta);
  c_sen->add_option("--eps", s_eps);
  c_sen->add_option("--horizon", s_h);
  c_sen->add_option("--out", s_out);

  // certificate shrinking-ball
  auto* c_cert = app.add_subcommand("certificate", "non-expansiveness certificates");
  c_cert->require_subcommand(1);
  auto* c_ball = c_cert->add_subcommand("shrinking-ball", "arc whose iterates all stay small");
  std::string sb_map = "northsouth", sb_out;
  double sb_eps = 0.1;
  c_ball->add_option("--map", sb_map);
  c_ball->add_option("--eps", sb_eps);
  c_ball->add_option("--out", sb_out);

  // chains analyze
  auto* c_ch = app.add_subcommand("chains", "spectral decomposition analyzer");
  c_ch->require_subcommand(1);
  auto* c_an = c_ch->add_subcommand("analyze", "verdicts for a spec file");
  std::string ch_spec, ch_builtin, ch_format = "json", ch_out;
  bool ch_one = false;
  c_an->add_option("--spec", ch_spec, "spec file");
  c_an->add_option("--builtin", ch_builtin, "shipped spec name");
  c_an->add_option("--format", ch_format)->check(CLI::IsMember({"json", "text"}));
  c_an->add_flag("--one-step", ch_one, "also report the one-step reading of the order");
  c_an->add_option("--out", ch_out);

  // verify
  auto* c_ver = app.add_subcommand("verify", "acceptance suite");
  std::string v_suite = "all", v_out;
  c_ver->add_option("suite,--suite", v_suite, "all | conjugacy | centralizer | expansive | chains | catalog")
      ->check(CLI::IsMember(verify::suites()));
  c_ver->add_option("--out", v_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return Usage;
  }

  try {
    const Catalog cat = load_catalog(catalog_path);

    if (c_list->parsed()) {
      json maps = json::array();
      for (const auto& n : cat.names()) {
        const auto& e = cat.entry(n);
        maps.push_back({{"name", n}, {"body", e.at("body")}, {"parameters", e.value("parameters", json::object())}});
        std::cerr << n << "  " << e.at("body").get<std::string>() << "  " << io::dump(e.value("parameters", json::object()), -1)
                  << "\n";
      }
      summary({{"ok", true}, {"maps", maps}});
      return Ok;
    }

    if (c_orbit->parsed()) {
      auto f = cat.get(o_map);
      Point x = make_point(f->space(), parse_list(o_x));
      auto [a, b] = parse_range(o_range);
      auto orb = orbit(*f, x, a, b);
      io::write_file(o_out, io::orbit_csv(f->space(), orb));
      summary({{"ok", true}, {"map", o_map}, {"rows", orb.size()}, {"out", o_out}});
      return Ok;
    }

    if (c_conj->parsed()) {
      auto A = cat.get_as<LinearAnosov>(cj_base);
      auto g = std::make_shared<PerturbedAnosov>(A->matrix(), parse_pert(cj_pert), cj_eps);
      MoserOptions opt;
      opt.resolution = cj_res;
      auto h = moser_solve(A, g, opt);
      const double dist = map_distance(*A, *g, RandomUniform{10000, seed});
      json doc = io::to_json(*h);
      doc["base"] = cj_base;
      write_or_skip(cj_out, io::dump(doc) + "\n");
      summary({{"ok", true},
               {"residual", h->residual()},
               {"sup_u", h->sup_u()},
               {"K_estimate", dist > 0 ? json(h->sup_u() / dist) : json(nullptr)},
               {"iterations", h->iterations_used()},
               {"injectivity_violations", h->injectivity_violations()}});
      return Ok;
    }

    if (c_build->parsed()) {
      auto f = cat.get(cb_map);
      const Sampler sm = RandomUniform{10000, seed};
      json doc;
      Homeo h;
      if (cb_kind == "ms") {
        auto piece = FundamentalDomainPiece::standard(cat.get_as<NorthSouth>(cb_map), cb_bump);
        h = ms_centralizer(piece);
        doc = io::to_json(piece);
      } else {
        BumpPushSpec spec;
        if (auto da = std::dynamic_pointer_cast<const DerivedFromAnosov>(f)) spec = BumpPushSpec::da_default(da, cb_zeta, cb_t);
        else spec = BumpPushSpec::northsouth_default(cat.get_as<NorthSouth>(cb_map), cb_zeta, cb_t);
        h = bump_push(spec);
        doc = io::to_json(spec);
        doc["unresolved_fraction"] = unresolved_fraction(spec, sample(f->space(), sm));
      }
      doc["commutation_residual"] = commutation_residual(*f, h, sm);
      doc["d0_to_identity"] = d0(h, Homeo::identity(f->space()), sm).value;
      write_or_skip(cb_out, io::dump(doc) + "\n");
      summary({{"ok", true}, {"kind", doc["kind"]}, {"commutation_residual", doc["commutation_residual"]},
               {"d0_to_identity", doc["d0_to_identity"]}});
      return Ok;
    }

    if (c_fam->parsed()) {
      auto f = cat.get(cf_map);
      const Sampler sm = RandomUniform{4000, seed};
      auto pts = sample(f->space(), sm);
      std::vector<Homeo> fam;
      json members = json::array();
      const bool is_da = std::dynamic_pointer_cast<const DerivedFromAnosov>(f) != nullptr;
      for (int k = 0; k < cf_steps; ++k) {
        const double t = static_cast<double>(k) / (cf_steps - 1);
        json m;
        m["t"] = t;
        if (is_da) {
          auto spec = BumpPushSpec::da_default(cat.get_as<DerivedFromAnosov>(cf_map), cf_zeta, t);
          fam.push_back(bump_push(spec));
          m["element"] = io::to_json(spec);
          m["unresolved_fraction"] = unresolved_fraction(spec, pts);
        } else {
          auto piece = FundamentalDomainPiece::standard(cat.get_as<NorthSouth>(cf_map), t * cf_zeta);
          fam.push_back(ms_centralizer(piece));
          m["element"] = io::to_json(piece);
        }
        m["commutation_residual"] = commutation_residual(*f, fam.back(), pts).value;
        m["d0_to_identity"] = d0(fam.back(), Homeo::identity(f->space()), sm).value;
        members.push_back(m);
      }
      double closest = 1e300, worst = 0;
      for (std::size_t i = 0; i < fam.size(); ++i) {
        worst = std::max(worst, members[i]["commutation_residual"].get<double>());
        for (std::size_t j = i + 1; j < fam.size(); ++j) closest = std::min(closest, d0(fam[i], fam[j], sm).value);
      }
      json doc{{"map", cf_map}, {"zeta", cf_zeta}, {"steps", cf_steps}, {"members", members},
               {"max_commutation_residual", worst}, {"min_pairwise_d0", closest}};
      write_or_skip(cf_out, io::dump(doc) + "\n");
      summary({{"ok", true}, {"max_commutation_residual", worst}, {"min_pairwise_d0", closest}});
      return Ok;
    }

    if (c_probe->parsed()) {
      auto f = cat.get(cp_map);
      const double eps = cp_eps > 0 ? cp_eps : f->meta().eps0 / 2;
      std::vector<Homeo> cands;
      std::vector<std::string> labels;
      Sampler sm = RandomUniform{2000, seed};
      if (f->space() == PhaseSpace::torus() && !std::dynamic_pointer_cast<const DerivedFromAnosov>(f)) {
        for (int i = 0; i < cp_grid; ++i)
          for (int j = 0; j < cp_grid; ++j) {
            if (i == 0 && j == 0) continue;
            cands.push_back(Homeo::translation(f->space(), {static_cast<double>(i) / cp_grid, static_cast<double>(j) / cp_grid}));
            labels.push_back("translation(" + std::to_string(i) + "," + std::to_string(j) + ")/" + std::to_string(cp_grid));
          }
        sm = UniformGrid{4};
      } else if (auto da = std::dynamic_pointer_cast<const DerivedFromAnosov>(f)) {
        for (int k = 1; k <= 10; ++k) {
          cands.push_back(bump_push(BumpPushSpec::da_default(da, 0.01, k / 10.0)));
          labels.push_back("bump_push(t=" + std::to_string(k) + "/10)");
        }
      } else if (auto ns = std::dynamic_pointer_cast<const NorthSouth>(f)) {
        for (int k = 1; k <= 10; ++k) {
          cands.push_back(ms_centralizer(FundamentalDomainPiece::standard(ns, 0.001 * k)));
          labels.push_back("ms(bump=" + std::to_string(k) + "e-3)");
        }
      } else if (auto pm = std::dynamic_pointer_cast<const ProductMap>(f)) {
        auto nsf = std::dynamic_pointer_cast<const NorthSouth>(pm->circle_ptr());
        if (!nsf) throw UsageError("product probe needs a north-south circle factor");
        for (int k = 1; k <= 10; ++k) {
          cands.push_back(product_lift(ms_centralizer(FundamentalDomainPiece::standard(nsf, 0.001 * k))));
          labels.push_back("lift(ms(bump=" + std::to_string(k) + "e-3))");
        }
      } else {
        throw UsageError("no candidate family for map '" + cp_map + "'");
      }
      auto rep = discreteness_probe(*f, cands, labels, eps, sm, cp_tau);
      json doc = io::to_json(rep);
      doc["map"] = cp_map;
      write_or_skip(cp_out, io::dump(doc) + "\n");
      summary({{"ok", true}, {"witnesses", doc["witnesses"]}, {"min_residual", rep.min_residual}});
      return Ok;
    }

    if (c_exp->parsed()) {
      auto f = cat.get(e_map);
      const double eps = e_eps > 0 ? e_eps : f->meta().eps0 / 2;
      auto D = point_set(*f, e_set.empty() ? default_set(f->space()) : e_set);
      auto rep = dense_expansiveness_probe(*f, D, eps, e_h, e_max, seed);
      json doc = io::to_json(rep);
      doc["map"] = e_map;
      doc["set"] = e_set.empty() ? default_set(f->space()) : e_set;
      write_or_skip(e_out, io::dump(doc) + "\n");
      std::string csv = e_csv;
      if (csv.empty() && !e_out.empty()) {
        csv = e_out;
        auto dot = csv.rfind(".json");
        if (dot != std::string::npos) csv.erase(dot);
        csv += ".failing.csv";
      }
      write_or_skip(csv, io::failing_pairs_csv(f->space(), rep.failing));
      summary({{"ok", true}, {"fraction", rep.fraction}, {"pairs_tested", rep.pairs_tested}, {"failing", rep.failing.size()}});
      return Ok;
    }

    if (c_sen->parsed()) {
      auto f = cat.get(s_map);
      const double eps = s_eps > 0 ? s_eps : f->meta().eps0 / 2;
      auto base = point_set(*f, s_set.empty() ? default_set(f->space()) : s_set);
      auto rep = sensitivity_probe(*f, base, s_delta, eps, s_h);
      json doc = io::to_json(rep);
      doc["map"] = s_map;
      write_or_skip(s_out, io::dump(doc) + "\n");
      summary({{"ok", true}, {"fraction", rep.fraction}, {"points", rep.points}});
      return Ok;
    }

    if (c_ball->parsed()) {
      auto c = shrinking_ball_certificate(*cat.get_as<NorthSouth>(sb_map), sb_eps);
      json doc = io::to_json(c);
      doc["map"] = sb_map;
      write_or_skip(sb_out, io::dump(doc) + "\n");
      summary({{"ok", true}, {"valid", c.valid}, {"max_diameter", c.max_diameter}, {"certified_bound", c.certified_bound}});
      return Ok;
    }

    if (c_an->parsed()) {
      if (ch_spec.empty() == ch_builtin.empty()) throw UsageError("give exactly one of --spec or --builtin");
      const std::string text = ch_spec.empty() ? builtin_spec(ch_builtin) : io::read_file(ch_spec);
      json rep = io::chains_report(text, ch_one);
      write_or_skip(ch_out, io::dump(rep) + "\n");
      if (ch_format == "text") std::cout << io::chains_text(rep);
      summary(rep);
      return rep["valid"].get<bool>() ? Ok : Usage;
    }

    if (c_ver->parsed()) {
      auto rep = verify::run(v_suite);
      std::cout << verify::table(rep);
      write_or_skip(v_out, io::dump(verify::to_json(rep)) + "\n");
      json crit = json::object();
      for (int k : rep.criteria()) crit[std::to_string(k)] = rep.criterion_pass(k);
      summary({{"ok", rep.pass()}, {"suite", v_suite}, {"criteria", crit}});
      return rep.pass() ? Ok : VerifyFailed;
    }
  } catch (const PerturbationTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    summary({{"ok", false}, {"error", e.what()}});
    return Numerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    summary({{"ok", false}, {"error", e.what()}});
    return Usage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    summary({{"ok", false}, {"error", e.what()}});
    return Usage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    summary({{"ok", false}, {"error", e.what()}});
    return Usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    summary({{"ok", false}, {"error", e.what()}});
    return Numerical;
  }
  return Usage;
}

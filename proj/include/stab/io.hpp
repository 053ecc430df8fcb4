#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "centralizer.hpp"
#include "chains.hpp"
#include "conjugacy.hpp"
#include "expansive.hpp"
#include "homeo.hpp"
#include "registry.hpp"

namespace stab::io {

/// 17 significant digits, which round-trips every double. Non-finite values become null.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0) return std::signbit(v) ? "-0.0" : "0.0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

namespace detail {
inline void dump(const json& j, std::ostringstream& o, int indent, int depth) {
  auto nl = [&](int d) {
    if (indent < 0) return;
    o << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        o << "{}";
        return;
      }
      o << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) o << ',';
        first = false;
        nl(depth + 1);
        o << json(it.key()).dump() << (indent < 0 ? ":" : ": ");
        dump(it.value(), o, indent, depth + 1);
      }
      nl(depth);
      o << '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        o << "[]";
        return;
      }
      // numeric arrays stay on one line
      bool flat = true;
      for (const auto& e : j) flat = flat && e.is_primitive();
      o << '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) o << ',';
        if (flat) {
          if (i && indent >= 0) o << ' ';
        } else {
          nl(depth + 1);
        }
        dump(j[i], o, indent, depth + 1);
      }
      if (!flat) nl(depth);
      o << ']';
      return;
    }
    case json::value_t::number_float:
      o << format_double(j.get<double>());
      return;
    default:
      o << j.dump();
  }
}
}  // namespace detail

/// Deterministic text for a JSON value; indent < 0 gives a single line.
inline std::string dump(const json& j, int indent = 2) {
  std::ostringstream o;
  detail::dump(j, o, indent, 0);
  return o.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot read " + path);
  std::ostringstream o;
  o << f.rdbuf();
  return o.str();
}

inline json to_json(const Point& p) {
  json a = json::array();
  for (double v : p) a.push_back(v);
  return a;
}

inline Point point_from_json(PhaseSpace s, const json& j) {
  if (!j.is_array()) throw std::invalid_argument("point must be an array");
  return make_point(s, j.get<std::vector<double>>());
}

/// Column names in axis order.
inline std::vector<std::string> coordinate_names(PhaseSpace s) {
  switch (s.kind) {
    case SpaceKind::Circle: return {"theta"};
    case SpaceKind::Torus2: return {"x", "y"};
    default: return {"theta", "x", "y"};
  }
}

inline std::string csv_row(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

inline std::string orbit_csv(PhaseSpace s, const std::vector<std::pair<int, Point>>& orb) {
  std::string out = "n";
  for (const auto& c : coordinate_names(s)) out += "," + c;
  out += "\n";
  for (const auto& [n, p] : orb) {
    out += std::to_string(n);
    for (double v : p) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

inline std::string failing_pairs_csv(PhaseSpace s, const std::vector<FailingPair>& pairs) {
  std::string out;
  for (const char* w : {"x", "y"})
    for (int i = 0; i < s.dim(); ++i) out += std::string(w) + std::to_string(i) + ",";
  out += "max_separation\n";
  for (const auto& fp : pairs) {
    std::vector<double> row(fp.x.begin(), fp.x.end());
    row.insert(row.end(), fp.y.begin(), fp.y.end());
    row.push_back(fp.max_separation);
    out += csv_row(row) + "\n";
  }
  return out;
}

inline json to_json(const SeparationReport& r) {
  json j;
  j["x"] = to_json(r.x);
  j["y"] = to_json(r.y);
  j["n"] = r.n ? json(*r.n) : json(nullptr);
  j["separation"] = r.separation;
  j["horizon"] = r.horizon;
  j["eps"] = r.eps;
  return j;
}

inline json to_json(const DenseExpansivenessReport& r) {
  json j;
  j["pairs_tested"] = r.pairs_tested;
  j["pairs_separated"] = r.pairs_separated;
  j["fraction"] = r.fraction;
  j["eps"] = r.eps;
  j["horizon"] = r.horizon;
  j["max_time_used"] = r.max_time_used;
  j["subsampled"] = r.subsampled;
  json f = json::array();
  for (const auto& p : r.failing) f.push_back({{"x", to_json(p.x)}, {"y", to_json(p.y)}, {"max_separation", p.max_separation}});
  j["failing"] = f;
  return j;
}

inline json to_json(const SensitivityReport& r) {
  json j;
  j["points"] = r.points;
  j["with_witness"] = r.with_witness;
  j["fraction"] = r.fraction;
  j["delta"] = r.delta;
  j["eps"] = r.eps;
  j["horizon"] = r.horizon;
  json w = json::array();
  for (const auto& p : r.without_witness) w.push_back(to_json(p));
  j["without_witness"] = w;
  return j;
}

inline json to_json(const ShrinkingBallCertificate& c) {
  json j;
  j["arc"] = {c.lo, c.hi};
  j["max_diameter"] = c.max_diameter;
  j["certified_bound"] = c.certified_bound;
  j["argmax"] = c.argmax;
  j["horizon_forward"] = c.horizon_forward;
  j["horizon_backward"] = c.horizon_backward;
  j["horizon"] = c.horizon;
  j["tail"] = c.tail;
  j["eps"] = c.eps;
  j["valid"] = c.valid;
  return j;
}

inline json to_json(const D0Report& r) {
  json j;
  j["value"] = r.value;
  j["sup_forward"] = r.sup_forward;
  j["sup_inverse"] = r.sup_inverse;
  j["witness_forward"] = to_json(r.witness_forward);
  j["witness_inverse"] = to_json(r.witness_inverse);
  j["sampler"] = r.sampler;
  return j;
}

inline json to_json(const DiscretenessReport& r) {
  json j;
  j["eps"] = r.eps;
  j["tau"] = r.tau;
  j["min_residual"] = r.min_residual;
  json w = json::array();
  for (auto i : r.witnesses) w.push_back(r.entries[i].label);
  j["witnesses"] = w;
  json e = json::array();
  for (const auto& x : r.entries)
    e.push_back({{"label", x.label}, {"residual", x.residual}, {"d0", x.d0}, {"witness", x.witness}});
  j["candidates"] = e;
  return j;
}

/// Displacement field, nodes in row-major order (first index is x).
inline json to_json(const GridHomeo& h) {
  json j;
  j["kind"] = "grid_homeo";
  j["resolution"] = h.resolution();
  j["eps"] = h.eps();
  j["residual"] = h.residual();
  j["iterations_used"] = h.iterations_used();
  j["series_terms"] = h.series_terms();
  j["sup_u"] = h.sup_u();
  json u = json::array();
  for (const auto& v : h.nodes()) u.push_back({v[0], v[1]});
  j["u"] = u;
  return j;
}

inline json to_json(const PLMap& m) {
  json a = json::array();
  for (const auto& [x, y] : m.nodes()) a.push_back({x, y});
  return a;
}

inline json to_json(const FundamentalDomainPiece& p) {
  json j;
  j["kind"] = "fundamental_domain_piece";
  j["map"] = p.map->name();
  json arcs = json::array();
  for (const auto& a : p.arcs)
    arcs.push_back({{"arc", {a.arc_lo, a.arc_hi}}, {"orientation", a.orientation}, {"domain", {a.x0, a.x1}}, {"h0", to_json(a.h0)}});
  j["arcs"] = arcs;
  j["cap"] = p.cap;
  return j;
}

inline json to_json(const BumpPushSpec& s) {
  json j;
  j["kind"] = "bump_push";
  j["map"] = s.map->name();
  j["center"] = to_json(s.center);
  j["U"] = {{"tau", {s.U.tau_lo, s.U.tau_hi}}, {"ell", {s.U.l_lo, s.U.l_hi}}};
  j["W_tau"] = {s.tau_w_lo, s.tau_w_hi};
  j["V_tau"] = {s.tau_v_lo, s.tau_v_hi};
  j["l0"] = s.l0;
  j["zeta"] = s.zeta;
  j["t"] = s.t;
  j["n_max"] = s.n_max;
  j["trap"] = {{"tau", {s.trap.tau_lo, s.trap.tau_hi}}, {"ell", {s.trap.l_lo, s.trap.l_hi}}};
  return j;
}

/// The chains analysis document; valid is false when there are violations.
inline json chains_report(const std::string& text, bool one_step_too = false) {
  auto pr = chains::parse_spec(text);
  json j;
  j["valid"] = pr.violations.empty();
  json v = json::array();
  for (const auto& x : pr.violations) v.push_back({{"line", x.line}, {"message", x.message}});
  j["violations"] = v;
  if (!pr.violations.empty()) return j;
  const auto& s = pr.spec;
  json ch = json::array();
  for (const auto& c : chains::maximal_chains(s)) ch.push_back(chains::names(s, c));
  j["chains"] = ch;
  auto th = chains::select_theta(s);
  j["theta"] = {{"attractors", th.attractors}, {"repellers", th.repellers}};
  auto vd = chains::verdict(s);
  json pairs = json::array();
  for (const auto& [a, b] : vd.trivial_basin_pairs) pairs.push_back({a, b});
  j["verdict"] = {{"densely_expansive", vd.densely_expansive},
                  {"sensitive", vd.sensitive},
                  {"anosov", vd.anosov},
                  {"centralizer_discrete", vd.centralizer_discrete},
                  {"witnesses", {{"trivial_basin_pairs", pairs}, {"dim_jump_chains", vd.dim_jump_chains}}}};
  if (one_step_too) {
    auto a1 = chains::theorem_A_predicate(s, true);
    json p1 = json::array();
    for (const auto& [a, b] : a1.witnesses) p1.push_back({a, b});
    j["one_step"] = {{"densely_expansive", a1.holds}, {"trivial_basin_pairs", p1}};
  }
  return j;
}

inline std::string chains_text(const json& r) {
  std::ostringstream o;
  if (!r["valid"].get<bool>()) {
    o << "invalid spec\n";
    for (const auto& v : r["violations"]) o << "  line " << v["line"].get<int>() << ": " << v["message"].get<std::string>() << "\n";
    return o.str();
  }
  o << "chains:\n";
  for (const auto& c : r["chains"]) {
    o << "  ";
    for (std::size_t i = 0; i < c.size(); ++i) o << (i ? " > " : "") << c[i].get<std::string>();
    o << "\n";
  }
  auto list = [](const json& a) {
    std::string s = "{";
    for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ", " : "") + a[i].get<std::string>();
    return s + "}";
  };
  o << "theta_a = " << list(r["theta"]["attractors"]) << ", theta_r = " << list(r["theta"]["repellers"]) << "\n";
  const auto& v = r["verdict"];
  for (const char* k : {"densely_expansive", "sensitive", "anosov", "centralizer_discrete"})
    o << k << ": " << (v[k].get<bool>() ? "yes" : "no") << "\n";
  return o.str();
}

}  // namespace stab::io

#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "catalog.hpp"

namespace stab {

using json = nlohmann::ordered_json;

/// Built-in catalog; data/catalog.json carries the same content.
inline const char* default_catalog_text() {
  return R"({
  "maps": [
    {
      "name": "cat",
      "body": "linear_anosov",
      "parameters": {"matrix": [[2, 1], [1, 1]]},
      "metadata": {"eps0": 0.2, "lambda": 0.3819660112501051, "C": 1.0},
      "spectral_spec": "cat"
    },
    {
      "name": "catpert",
      "body": "affine_perturbed_anosov",
      "parameters": {"matrix": [[2, 1], [1, 1]], "eps": 0.01, "perturbation": "default"},
      "metadata": {"eps0": 0.2, "lambda": 0.4, "C": 1.0},
      "spectral_spec": "cat"
    },
    {
      "name": "northsouth",
      "body": "north_south_circle",
      "parameters": {"a": 0.1},
      "metadata": {"eps0": 0.25, "lambda": 0.6142423331, "C": 1.0},
      "spectral_spec": "northsouth"
    },
    {
      "name": "da",
      "body": "derived_from_anosov",
      "parameters": {"matrix": [[2, 1], [1, 1]], "radius": 0.15, "push": 1.0, "center": [0.0, 0.0], "bump": "quadratic"},
      "metadata": {"eps0": 0.2, "lambda": 0.7236067977, "C": 1.0},
      "spectral_spec": "da"
    },
    {
      "name": "product",
      "body": "product",
      "parameters": {"circle": "northsouth", "torus": "cat"},
      "metadata": {"eps0": 0.2, "lambda": 0.6142423331, "C": 1.0},
      "spectral_spec": "product"
    },
    {
      "name": "cat2",
      "body": "composite",
      "parameters": {"factors": [{"map": "cat", "power": 2}]},
      "metadata": {"eps0": 0.2, "lambda": 0.1458980337503155, "C": 1.0},
      "spectral_spec": "cat"
    }
  ]
}
)";
}

inline Mat2 mat2_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || j[0].size() != 2 || j[1].size() != 2) throw std::invalid_argument("matrix must be 2x2");
  return {j[0][0].get<std::int64_t>(), j[0][1].get<std::int64_t>(), j[1][0].get<std::int64_t>(), j[1][1].get<std::int64_t>()};
}

inline json mat2_to_json(const Mat2& m) { return json::array({json::array({m.a, m.b}), json::array({m.c, m.d})}); }

inline FourierField field_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "default") return FourierField::default_field();
    throw std::invalid_argument("unknown perturbation '" + j.get<std::string>() + "'");
  }
  FourierField f;
  for (const auto& t : j) {
    FourierTerm term;
    term.k1 = t.at("k")[0].get<int>();
    term.k2 = t.at("k")[1].get<int>();
    if (t.contains("sin")) term.sin_coef = {t["sin"][0].get<double>(), t["sin"][1].get<double>()};
    if (t.contains("cos")) term.cos_coef = {t["cos"][0].get<double>(), t["cos"][1].get<double>()};
    f.terms.push_back(term);
  }
  return f;
}

inline json field_to_json(const FourierField& f) {
  json a = json::array();
  for (const auto& t : f.terms)
    a.push_back({{"k", {t.k1, t.k2}}, {"sin", {t.sin_coef[0], t.sin_coef[1]}}, {"cos", {t.cos_coef[0], t.cos_coef[1]}}});
  return a;
}

class Catalog {
 public:
  Catalog() : Catalog(json::parse(default_catalog_text())) {}

  explicit Catalog(const json& doc) {
    for (const auto& e : doc.at("maps")) {
      const std::string name = e.at("name");
      if (maps_.count(name)) throw std::invalid_argument("duplicate map '" + name + "'");
      maps_[name] = build(e);
      order_.push_back(name);
      entries_[name] = e;
    }
  }

  DiffeoPtr get(const std::string& name) const {
    auto it = maps_.find(name);
    if (it == maps_.end()) throw std::invalid_argument("unknown map '" + name + "'");
    return it->second;
  }
  template <class T>
  std::shared_ptr<const T> get_as(const std::string& name) const {
    auto p = std::dynamic_pointer_cast<const T>(get(name));
    if (!p) throw std::invalid_argument("map '" + name + "' has the wrong body kind");
    return p;
  }
  bool contains(const std::string& name) const { return maps_.count(name) > 0; }
  const std::vector<std::string>& names() const { return order_; }
  const json& entry(const std::string& name) const { return entries_.at(name); }

 private:
  DiffeoPtr build(const json& e) const {
    const std::string name = e.at("name"), body = e.at("body");
    const json& p = e.contains("parameters") ? e["parameters"] : json::object();
    HyperbolicityMeta meta;
    if (e.contains("metadata")) {
      const auto& m = e["metadata"];
      meta.eps0 = m.value("eps0", meta.eps0);
      meta.lambda = m.value("lambda", meta.lambda);
      meta.C = m.value("C", meta.C);
    }
    meta.spectral_spec = e.value("spectral_spec", std::string());
    if (body == "linear_anosov") return std::make_shared<LinearAnosov>(mat2_from_json(p.at("matrix")), name, meta);
    if (body == "affine_perturbed_anosov")
      return std::make_shared<PerturbedAnosov>(mat2_from_json(p.at("matrix")), field_from_json(p.value("perturbation", json("default"))),
                                               p.value("eps", 0.01), name, meta);
    if (body == "north_south_circle") return std::make_shared<NorthSouth>(p.value("a", 0.1), name, meta);
    if (body == "derived_from_anosov") {
      Point c{0.0, 0.0};
      if (p.contains("center")) c = {p["center"][0].get<double>(), p["center"][1].get<double>()};
      const std::string bump = p.value("bump", std::string("quadratic"));
      BumpShape shape;
      if (bump == "quadratic") shape = BumpShape::Quadratic;
      else if (bump == "quartic") shape = BumpShape::Quartic;
      else throw std::invalid_argument("unknown bump '" + bump + "'");
      return std::make_shared<DerivedFromAnosov>(mat2_from_json(p.at("matrix")), p.value("radius", 0.15), p.value("push", 1.0), c,
                                                 shape, name, meta);
    }
    if (body == "product") return std::make_shared<ProductMap>(get(p.at("circle")), get(p.at("torus")), name, meta);
    if (body == "composite") {
      std::vector<std::pair<DiffeoPtr, int>> fs;
      for (const auto& f : p.at("factors")) fs.emplace_back(get(f.at("map")), f.value("power", 1));
      return std::make_shared<CompositeMap>(std::move(fs), name, meta);
    }
    throw std::invalid_argument("unknown body '" + body + "'");
  }

  std::map<std::string, DiffeoPtr> maps_;
  std::map<std::string, json> entries_;
  std::vector<std::string> order_;
};

/// Shipped spectral decompositions.
inline const std::map<std::string, std::string>& builtin_specs() {
  static const std::map<std::string, std::string> specs = {
      {"cat",
       "# hyperbolic toral automorphism: one basic piece, the whole torus\n"
       "ambient 2\n"
       "piece T2 kind=attractor trivial=no dim_u=1 dim_s=1\n"},
      {"northsouth",
       "# north-south circle map\n"
       "ambient 1\n"
       "piece N kind=repeller trivial=yes dim_u=1 dim_s=0\n"
       "piece S kind=attractor trivial=yes dim_u=0 dim_s=1\n"
       "edge N > S\n"},
      {"da",
       "# derived-from-Anosov: repelling fixed point and a one-dimensional attractor\n"
       "ambient 2\n"
       "piece p kind=repeller trivial=yes dim_u=2 dim_s=0\n"
       "piece Lambda kind=attractor trivial=no dim_u=1 dim_s=1\n"
       "edge p > Lambda\n"},
      {"product",
       "# north-south x cat on S1 x T2\n"
       "ambient 3\n"
       "piece NxT2 kind=repeller trivial=no dim_u=2 dim_s=1\n"
       "piece SxT2 kind=attractor trivial=no dim_u=1 dim_s=2\n"
       "edge NxT2 > SxT2\n"},
      {"example44",
       "# two attractors, three repellers\n"
       "ambient 2\n"
       "piece L1 kind=attractor trivial=yes dim_u=0 dim_s=2\n"
       "piece L2 kind=attractor trivial=no dim_u=1 dim_s=1\n"
       "piece L3 kind=repeller trivial=no dim_u=1 dim_s=1\n"
       "piece L4 kind=repeller trivial=no dim_u=1 dim_s=1\n"
       "piece L5 kind=repeller trivial=no dim_u=1 dim_s=1\n"
       "edge L3 > L1\n"
       "edge L4 > L1\n"
       "edge L5 > L2\n"},
  };
  return specs;
}

inline const std::string& builtin_spec(const std::string& name) {
  auto it = builtin_specs().find(name);
  if (it == builtin_specs().end()) throw std::invalid_argument("unknown spec '" + name + "'");
  return it->second;
}

}  // namespace stab

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stab::chains {

enum class PieceKind { Attractor, Repeller, Saddle };

inline std::string to_string(PieceKind k) {
  switch (k) {
    case PieceKind::Attractor: return "attractor";
    case PieceKind::Repeller: return "repeller";
    case PieceKind::Saddle: return "saddle";
  }
  return "?";
}

struct Piece {
  std::string name;
  PieceKind kind = PieceKind::Saddle;
  bool trivial = false;
  int dim_u = 0, dim_s = 0;
  int line = 0;
};

struct Edge {
  int hi = 0, lo = 0;  // pieces[hi] > pieces[lo]
  int line = 0;
};

struct SpectralSpec {
  std::vector<Piece> pieces;
  std::vector<Edge> edges;
  int ambient = 0;

  std::optional<int> index(std::string_view name) const {
    for (std::size_t i = 0; i < pieces.size(); ++i)
      if (pieces[i].name == name) return static_cast<int>(i);
    return std::nullopt;
  }
  std::size_t size() const { return pieces.size(); }
};

/// Same pieces, ambient dimension and edge set; line numbers ignored.
inline bool equivalent(const SpectralSpec& a, const SpectralSpec& b) {
  if (a.ambient != b.ambient || a.pieces.size() != b.pieces.size()) return false;
  for (std::size_t i = 0; i < a.pieces.size(); ++i) {
    const auto &p = a.pieces[i], &q = b.pieces[i];
    if (p.name != q.name || p.kind != q.kind || p.trivial != q.trivial || p.dim_u != q.dim_u || p.dim_s != q.dim_s)
      return false;
  }
  std::set<std::pair<int, int>> ea, eb;
  for (auto& e : a.edges) ea.emplace(e.hi, e.lo);
  for (auto& e : b.edges) eb.emplace(e.hi, e.lo);
  return ea == eb;
}

struct Violation {
  int line = 0;
  std::string message;
};

struct ParseResult {
  SpectralSpec spec;
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
};

namespace detail {
inline std::vector<std::string> tokens(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::optional<int> to_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}
}  // namespace detail

/// Reflexive-free transitive closure: reach[i][j] iff pieces[i] >* pieces[j].
inline std::vector<std::vector<char>> closure(const SpectralSpec& s) {
  const std::size_t n = s.size();
  std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
  for (auto& e : s.edges) r[static_cast<std::size_t>(e.hi)][static_cast<std::size_t>(e.lo)] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = 1;
  return r;
}

/// Structural checks of a parsed spec.
inline std::vector<Violation> validate(const SpectralSpec& s) {
  std::vector<Violation> v;
  const std::size_t n = s.size();
  if (n == 0) v.push_back({0, "no pieces declared"});
  if (s.ambient <= 0) v.push_back({0, "ambient dimension must be positive"});
  for (const auto& p : s.pieces) {
    if (p.dim_u < 0 || p.dim_s < 0) v.push_back({p.line, "negative dimension for " + p.name});
    if (p.dim_u + p.dim_s != s.ambient) v.push_back({p.line, "splitting dimensions of " + p.name + " do not add up to ambient"});
    if (p.trivial && p.kind == PieceKind::Attractor && p.dim_u != 0)
      v.push_back({p.line, "trivial attractor " + p.name + " must have dim_u=0"});
    if (p.trivial && p.kind == PieceKind::Repeller && p.dim_s != 0)
      v.push_back({p.line, "trivial repeller " + p.name + " must have dim_s=0"});
  }
  // acyclicity by repeated removal of sources
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> out(n);
  for (auto& e : s.edges) {
    out[static_cast<std::size_t>(e.hi)].push_back(e.lo);
    ++indeg[static_cast<std::size_t>(e.lo)];
  }
  std::vector<int> stack;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) stack.push_back(static_cast<int>(i));
  std::size_t removed = 0;
  auto deg = indeg;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    ++removed;
    for (int j : out[static_cast<std::size_t>(i)])
      if (--deg[static_cast<std::size_t>(j)] == 0) stack.push_back(j);
  }
  if (removed != n) {
    int line = 0;
    for (auto& e : s.edges)
      if (deg[static_cast<std::size_t>(e.lo)] > 0 && deg[static_cast<std::size_t>(e.hi)] > 0) {
        line = e.line;
        break;
      }
    v.push_back({line, "no-cycles violated"});
  }
  for (auto& e : s.edges) {
    const auto &a = s.pieces[static_cast<std::size_t>(e.hi)], &b = s.pieces[static_cast<std::size_t>(e.lo)];
    if (a.dim_u < b.dim_u)
      v.push_back({e.line, "unstable dimension increases along " + a.name + " > " + b.name});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = s.pieces[i];
    const bool has_out = !out[i].empty(), has_in = indeg[i] > 0;
    if (p.kind == PieceKind::Attractor && has_out) v.push_back({p.line, "attractor " + p.name + " must be a sink"});
    if (p.kind == PieceKind::Repeller && has_in) v.push_back({p.line, "repeller " + p.name + " must be a source"});
    if (p.kind == PieceKind::Saddle && (!has_out || !has_in))
      v.push_back({p.line, "saddle " + p.name + " needs incoming and outgoing edges"});
  }
  return v;
}

/// Parses the line-oriented DSL and validates the result.
inline ParseResult parse_spec(std::string_view text) {
  ParseResult r;
  std::vector<std::pair<std::vector<std::string>, int>> edge_lines;
  int ambient_count = 0;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    auto tk = detail::tokens(line);
    if (tk.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    if (tk[0] == "piece") {
      if (tk.size() < 2) {
        r.violations.push_back({lineno, "piece needs a name"});
        continue;
      }
      Piece p;
      p.name = tk[1];
      p.line = lineno;
      std::set<std::string> seen;
      bool ok = true;
      for (std::size_t i = 2; i < tk.size(); ++i) {
        auto eq = tk[i].find('=');
        if (eq == std::string::npos) {
          r.violations.push_back({lineno, "expected key=value, got '" + tk[i] + "'"});
          ok = false;
          continue;
        }
        std::string key = tk[i].substr(0, eq), val = tk[i].substr(eq + 1);
        if (!seen.insert(key).second) {
          r.violations.push_back({lineno, "duplicate key '" + key + "'"});
          ok = false;
        }
        if (key == "kind") {
          if (val == "attractor") p.kind = PieceKind::Attractor;
          else if (val == "repeller") p.kind = PieceKind::Repeller;
          else if (val == "saddle") p.kind = PieceKind::Saddle;
          else {
            r.violations.push_back({lineno, "unknown kind '" + val + "'"});
            ok = false;
          }
        } else if (key == "trivial") {
          if (val == "yes") p.trivial = true;
          else if (val == "no") p.trivial = false;
          else {
            r.violations.push_back({lineno, "trivial must be yes or no"});
            ok = false;
          }
        } else if (key == "dim_u" || key == "dim_s") {
          auto iv = detail::to_int(val);
          if (!iv) {
            r.violations.push_back({lineno, key + " must be an integer"});
            ok = false;
          } else {
            (key == "dim_u" ? p.dim_u : p.dim_s) = *iv;
          }
        } else {
          r.violations.push_back({lineno, "unknown key '" + key + "'"});
          ok = false;
        }
      }
      for (const char* k : {"kind", "trivial", "dim_u", "dim_s"})
        if (!seen.count(k)) {
          r.violations.push_back({lineno, std::string("missing ") + k + " for piece " + p.name});
          ok = false;
        }
      if (r.spec.index(p.name)) {
        r.violations.push_back({lineno, "duplicate piece '" + p.name + "'"});
        ok = false;
      }
      if (ok) r.spec.pieces.push_back(p);
    } else if (tk[0] == "edge") {
      if (tk.size() != 4 || tk[2] != ">") {
        r.violations.push_back({lineno, "edge syntax is: edge <A> > <B>"});
        continue;
      }
      edge_lines.emplace_back(tk, lineno);
    } else if (tk[0] == "ambient") {
      std::optional<int> iv = tk.size() == 2 ? detail::to_int(tk[1]) : std::nullopt;
      if (!iv) {
        r.violations.push_back({lineno, "ambient syntax is: ambient <int>"});
        continue;
      }
      if (++ambient_count > 1) r.violations.push_back({lineno, "ambient declared twice"});
      r.spec.ambient = *iv;
    } else {
      r.violations.push_back({lineno, "unknown directive '" + tk[0] + "'"});
    }
    if (nl == text.size()) break;
  }
  std::set<std::pair<int, int>> seen_edges;
  for (auto& [tk, ln] : edge_lines) {
    auto a = r.spec.index(tk[1]), b = r.spec.index(tk[3]);
    if (!a) r.violations.push_back({ln, "unknown piece '" + tk[1] + "'"});
    if (!b) r.violations.push_back({ln, "unknown piece '" + tk[3] + "'"});
    if (a && b && seen_edges.emplace(*a, *b).second) r.spec.edges.push_back({*a, *b, ln});
  }
  if (ambient_count == 0) r.violations.push_back({0, "missing ambient declaration"});
  if (r.violations.empty()) r.violations = validate(r.spec);
  return r;
}

inline std::string print_spec(const SpectralSpec& s) {
  std::ostringstream o;
  o << "ambient " << s.ambient << "\n";
  for (const auto& p : s.pieces)
    o << "piece " << p.name << " kind=" << to_string(p.kind) << " trivial=" << (p.trivial ? "yes" : "no")
      << " dim_u=" << p.dim_u << " dim_s=" << p.dim_s << "\n";
  for (const auto& e : s.edges)
    o << "edge " << s.pieces[static_cast<std::size_t>(e.hi)].name << " > " << s.pieces[static_cast<std::size_t>(e.lo)].name << "\n";
  return o.str();
}

/// Decomposition of the inverse map: kinds and splittings swap, edges reverse.
inline SpectralSpec reversed(const SpectralSpec& s) {
  SpectralSpec r = s;
  for (auto& p : r.pieces) {
    if (p.kind == PieceKind::Attractor) p.kind = PieceKind::Repeller;
    else if (p.kind == PieceKind::Repeller) p.kind = PieceKind::Attractor;
    std::swap(p.dim_u, p.dim_s);
  }
  for (auto& e : r.edges) std::swap(e.hi, e.lo);
  return r;
}

using Chain = std::vector<int>;

/// All maximal totally ordered chains, as paths of covering relations from maximal to minimal pieces.
inline std::vector<Chain> maximal_chains(const SpectralSpec& s) {
  const std::size_t n = s.size();
  auto R = closure(s);
  std::vector<std::vector<int>> cover(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!R[i][j]) continue;
      bool direct = true;
      for (std::size_t k = 0; k < n && direct; ++k)
        if (R[i][k] && R[k][j]) direct = false;
      if (direct) cover[i].push_back(static_cast<int>(j));
    }
  std::vector<char> has_above(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (int j : cover[i]) has_above[static_cast<std::size_t>(j)] = 1;
  std::vector<Chain> out;
  Chain cur;
  auto dfs = [&](auto&& self, int i) -> void {
    cur.push_back(i);
    if (cover[static_cast<std::size_t>(i)].empty()) out.push_back(cur);
    for (int j : cover[static_cast<std::size_t>(i)]) self(self, j);
    cur.pop_back();
  };
  for (std::size_t i = 0; i < n; ++i)
    if (!has_above[i]) dfs(dfs, static_cast<int>(i));
  std::sort(out.begin(), out.end(), [&](const Chain& a, const Chain& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [&](int x, int y) {
      return s.pieces[static_cast<std::size_t>(x)].name < s.pieces[static_cast<std::size_t>(y)].name;
    });
  });
  return out;
}

inline std::vector<std::string> names(const SpectralSpec& s, const std::vector<int>& idx) {
  std::vector<std::string> out;
  for (int i : idx) out.push_back(s.pieces[static_cast<std::size_t>(i)].name);
  return out;
}

struct PairWitnesses {
  bool holds = true;
  std::vector<std::pair<std::string, std::string>> witnesses;
};

/// No trivial repeller reaches a trivial attractor (transitive closure, or one-step edges if one_step).
inline PairWitnesses theorem_A_predicate(const SpectralSpec& s, bool one_step = false) {
  PairWitnesses r;
  std::vector<std::vector<char>> R;
  if (one_step) {
    R.assign(s.size(), std::vector<char>(s.size(), 0));
    for (auto& e : s.edges) R[static_cast<std::size_t>(e.hi)][static_cast<std::size_t>(e.lo)] = 1;
  } else {
    R = closure(s);
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& a = s.pieces[i];
    if (!(a.trivial && a.kind == PieceKind::Repeller)) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      const auto& b = s.pieces[j];
      if (b.trivial && b.kind == PieceKind::Attractor && R[i][j]) r.witnesses.emplace_back(a.name, b.name);
    }
  }
  r.holds = r.witnesses.empty();
  return r;
}

struct ChainWitnesses {
  bool holds = true;
  std::vector<std::vector<std::string>> witnesses;
};

/// Every maximal chain keeps a constant unstable dimension.
inline ChainWitnesses theorem_C_predicate(const SpectralSpec& s) {
  ChainWitnesses r;
  for (const auto& c : maximal_chains(s)) {
    bool constant = true;
    for (int i : c)
      if (s.pieces[static_cast<std::size_t>(i)].dim_u != s.pieces[static_cast<std::size_t>(c.front())].dim_u) constant = false;
    if (!constant) r.witnesses.push_back(names(s, c));
  }
  r.holds = r.witnesses.empty();
  return r;
}

struct Theta {
  std::vector<std::string> attractors, repellers;
};

/// Theta_a: trivial attractors, plus non-trivial attractors reached only from non-trivial repellers.
/// Theta_r: empty if every repeller reaches Theta_a, otherwise the repellers that do not.
inline Theta select_theta(const SpectralSpec& s) {
  auto R = closure(s);
  const std::size_t n = s.size();
  std::vector<char> in_a(n, 0);
  Theta t;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& a = s.pieces[j];
    if (a.kind != PieceKind::Attractor) continue;
    bool pick = a.trivial;
    if (!pick) {
      pick = true;
      for (std::size_t i = 0; i < n; ++i)
        if (s.pieces[i].kind == PieceKind::Repeller && R[i][j] && s.pieces[i].trivial) pick = false;
    }
    if (pick) {
      in_a[j] = 1;
      t.attractors.push_back(a.name);
    }
  }
  std::vector<std::string> unrelated;
  for (std::size_t i = 0; i < n; ++i) {
    if (s.pieces[i].kind != PieceKind::Repeller) continue;
    bool related = false;
    for (std::size_t j = 0; j < n; ++j)
      if (in_a[j] && (R[i][j] || i == j)) related = true;
    if (!related) unrelated.push_back(s.pieces[i].name);
  }
  t.repellers = unrelated;
  return t;
}

struct ChainVerdict {
  bool densely_expansive = false, sensitive = false, anosov = false, centralizer_discrete = false;
  std::vector<std::pair<std::string, std::string>> trivial_basin_pairs;
  std::vector<std::vector<std::string>> dim_jump_chains;
};

inline ChainVerdict verdict(const SpectralSpec& s) {
  ChainVerdict v;
  auto a = theorem_A_predicate(s);
  auto c = theorem_C_predicate(s);
  v.densely_expansive = v.sensitive = a.holds;
  v.anosov = v.centralizer_discrete = c.holds;
  v.trivial_basin_pairs = std::move(a.witnesses);
  v.dim_jump_chains = std::move(c.witnesses);
  return v;
}

/// Random spec that passes validate(): edges only run from lower to higher index, kinds follow
/// from in/out degree and dim_u is chosen non-increasing along edges.
inline SpectralSpec random_valid_spec(std::mt19937_64& rng, int max_pieces = 7, int max_ambient = 4) {
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
  SpectralSpec s;
  s.ambient = pick(1, max_ambient);
  const int n = pick(1, max_pieces);
  s.pieces.resize(static_cast<std::size_t>(n));
  std::vector<char> has_in(static_cast<std::size_t>(n), 0), has_out(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng() % 100 < 35) {
        s.edges.push_back({i, j, 0});
        has_out[static_cast<std::size_t>(i)] = has_in[static_cast<std::size_t>(j)] = 1;
      }
  for (int i = n - 1; i >= 0; --i) {
    auto& p = s.pieces[static_cast<std::size_t>(i)];
    p.name = "P" + std::to_string(i);
    int lo = 0;
    for (const auto& e : s.edges)
      if (e.hi == i) lo = std::max(lo, s.pieces[static_cast<std::size_t>(e.lo)].dim_u);
    p.dim_u = pick(lo, s.ambient);
    p.dim_s = s.ambient - p.dim_u;
    const bool in = has_in[static_cast<std::size_t>(i)], out = has_out[static_cast<std::size_t>(i)];
    if (in && out) p.kind = PieceKind::Saddle;
    else if (out) p.kind = PieceKind::Repeller;
    else if (in) p.kind = PieceKind::Attractor;
    else p.kind = rng() % 2 ? PieceKind::Attractor : PieceKind::Repeller;
    const bool may_be_trivial = p.kind == PieceKind::Saddle || (p.kind == PieceKind::Attractor && p.dim_u == 0) ||
                                (p.kind == PieceKind::Repeller && p.dim_s == 0);
    p.trivial = may_be_trivial && rng() % 2;
  }
  return s;
}

}  // namespace stab::chains

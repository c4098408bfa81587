#pragma once

#include "abnet/abnet.hpp"

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

using namespace abnet;
using Rng = std::mt19937_64;
using EmitRow = std::map<std::string, Int>;

inline std::vector<std::string> numbered(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

/// Processor with states "0".."n-1". Missing emit tables mean no output.
inline ProcessorSpec proc(std::string id, std::vector<std::string> alphabet, std::size_t n,
                          std::vector<std::vector<StateIndex>> transition,
                          std::vector<std::vector<EmitRow>> emit = {}) {
  ProcessorSpec s;
  s.id = std::move(id);
  s.alphabet = std::move(alphabet);
  s.states = numbered(n);
  s.transition = std::move(transition);
  if (emit.empty()) emit.assign(s.alphabet.size(), std::vector<EmitRow>(n));
  s.emit = std::move(emit);
  return s;
}

inline const IntMatrix& ex3_laplacian() {
  static const IntMatrix l{{3, -1, 0}, {-2, 4, -2}, {-2, -2, 5}};
  return l;
}

inline Network ex3() { return build_toppling(ex3_laplacian(), {"a", "b", "c"}, "ex3"); }

inline GraphSpec complete_graph(std::size_t n) {
  GraphSpec g;
  for (std::size_t i = 0; i < n; ++i) g.vertices.push_back("v" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.add_undirected(g.vertices[i], g.vertices[j]);
  return g;
}

inline GraphSpec directed_cycle(std::size_t n) {
  GraphSpec g;
  for (std::size_t i = 0; i < n; ++i) g.vertices.push_back("v" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i) g.edges.emplace_back(g.vertices[i], g.vertices[(i + 1) % n]);
  return g;
}

inline Network sand_k2() { return build_sandpile(complete_graph(2), "sand_k2"); }
inline Network sand_triangle() { return build_sandpile(complete_graph(3), "sand_triangle"); }
inline Network sand_grid3() { return build_sandpile(grid_graph(3, 3), "sand_grid3"); }
inline Network sand_cycle3() { return build_sandpile(directed_cycle(3), "sand_cycle3"); }
inline Network rotor_k2() { return build_rotor(complete_graph(2), "rotor_k2"); }

/// Triangle with one extra edge from v0 into a sink.
inline Network sand_triangle_sink() {
  auto g = complete_graph(3);
  g.vertices.push_back("s");
  g.edges.emplace_back("v0", "s");
  return build_sandpile(g, "sand_triangle_sink");
}

/// Two strongly connected pairs {a1,a2} -> {b1,b2}; halts on all inputs.
inline Network chain() {
  const IntMatrix l{{2, -1, 0, 0}, {-1, 2, 0, 0}, {-1, 0, 2, -1}, {0, 0, -1, 2}};
  return build_toppling(l, {"a1", "a2", "b1", "b2"}, "chain");
}

/// (Z/2)^2 with a and b toggling separate bits and no output: L = D.
inline Network zero_emit() {
  return Network("zero_emit", {proc("v", {"a", "b"}, 4, {{1, 0, 3, 2}, {2, 3, 0, 1}})});
}

/// Unary rho-shaped processor 0 -> 1 -> 2 -> 3 -> 2 re-emitting its own letter.
inline Network rho() {
  std::vector<EmitRow> e(4);
  e[0]["a"] = 2;
  e[3]["a"] = 1;
  return Network("rho", {proc("v", {"a"}, 4, {{1, 2, 3, 2}}, {e})});
}

/// (Z/2)^2, state index 2*q1 + q0. Letter a toggles q0 and emits k letters b
/// when q0 = 1; b toggles q1 and emits k letters a when q1 = 1.
inline Network klein(int k, std::string name) {
  std::vector<EmitRow> ea(4), eb(4);
  for (StateIndex q = 0; q < 4; ++q) {
    if (q & 1) ea[q]["b"] = k;
    if (q & 2) eb[q]["a"] = k;
  }
  return Network(std::move(name), {proc("v", {"a", "b"}, 4, {{1, 0, 3, 2}, {2, 3, 0, 1}}, {ea, eb})});
}
inline Network klein_halting() { return klein(1, "klein_halting"); }
inline Network klein_nonhalting() { return klein(2, "klein_nonhalting"); }

/// Letters a and b both advance a shared counter mod 3, so a - b lies in the
/// kernel. Wrapping sends one c; c (mod 2) sends one a on wrap.
inline Network shared_counter() {
  std::vector<EmitRow> eab(3), ec(2);
  eab[2]["c"] = 1;
  ec[1]["a"] = 1;
  return Network("shared_counter", {proc("u", {"a", "b"}, 3, {{1, 2, 0}, {1, 2, 0}}, {eab, eab}),
                                    proc("w", {"c"}, 2, {{1, 0}}, {ec})});
}

/// Non-unary vertex feeding a unary one; strong components {a, c} and {b}.
inline Network mixed_two_vertex() {
  std::vector<EmitRow> ea(4), eb(4), ec(3);
  for (StateIndex q = 0; q < 4; ++q)
    if (q & 1) ea[q]["c"] = 1;
  ec[2]["a"] = 1;
  ec[2]["b"] = 1;
  return Network("mixed_two_vertex", {proc("u", {"a", "b"}, 4, {{1, 0, 3, 2}, {2, 3, 0, 1}}, {ea, eb}),
                                      proc("w", {"c"}, 3, {{1, 2, 0}}, {ec})});
}

/// One state, every letter re-emitted: L = [0].
inline Network self_reemit() {
  std::vector<EmitRow> e(1);
  e[0]["a"] = 1;
  return Network("self_reemit", {proc("v", {"a"}, 1, {{0}}, {e})});
}

/// Two irreducible classes {0,1} and {2,3}; the second emits twice as much.
inline Network two_class(const std::string& start) {
  std::vector<EmitRow> e(4);
  e[1]["a"] = 1;
  e[3]["a"] = 2;
  return Network("two_class_" + start, {proc("v", {"a"}, 4, {{1, 0, 3, 2}}, {e})}, {{"v", start}});
}

/// Rotor network on the triangle with a non-default rotor order at v0.
inline Network rotor_triangle() {
  auto g = complete_graph(3);
  g.rotor_order["v0"] = {"v2", "v1"};
  return build_rotor(g, "rotor_triangle");
}

struct Fixture {
  std::string name;
  Network net;
  bool halts;  // hand-derived verdict at the initial state
};

inline std::vector<Fixture> all() {
  return {
      {"ex3", ex3(), true},
      {"sand_k2", sand_k2(), false},
      {"sand_triangle", sand_triangle(), false},
      {"sand_grid3", sand_grid3(), false},
      {"sand_cycle3", sand_cycle3(), false},
      {"sand_triangle_sink", sand_triangle_sink(), true},
      {"rotor_k2", rotor_k2(), false},
      {"rotor_triangle", rotor_triangle(), false},
      {"chain", chain(), true},
      {"zero_emit", zero_emit(), true},
      {"rho", rho(), true},
      {"klein_halting", klein_halting(), true},
      {"klein_nonhalting", klein_nonhalting(), false},
      {"shared_counter", shared_counter(), true},
      {"mixed_two_vertex", mixed_two_vertex(), true},
      {"self_reemit", self_reemit(), false},
      {"two_class_0", two_class("0"), true},
      {"two_class_2", two_class("2"), false},
  };
}

// ---------------------------------------------------------------------------
// Random generators

inline Transformation random_map(Rng& rng, std::size_t n, bool permutation) {
  Transformation f = Transformation::identity(n);
  if (permutation) {
    std::shuffle(f.table.begin(), f.table.end(), rng);
  } else {
    std::uniform_int_distribution<std::size_t> d(0, n - 1);
    for (auto& v : f.table) v = d(rng);
  }
  return f;
}

inline Transformation power(const Transformation& f, std::size_t k) {
  Transformation out = Transformation::identity(f.table.size());
  for (std::size_t i = 0; i < k; ++i) out = f.after(out);
  return out;
}

/// k pairwise commuting maps on {0..n-1}, drawn from several families:
/// powers of one map, product actions, disjoint unions and a constant map
/// onto a common fixed point.
inline std::vector<Transformation> random_commuting_maps(Rng& rng, std::size_t n, std::size_t k) {
  std::uniform_int_distribution<int> fam(0, 3);
  std::uniform_int_distribution<std::size_t> exp(0, 4);
  std::bernoulli_distribution coin(0.5);
  std::vector<Transformation> gens;
  switch (n >= 2 ? fam(rng) : 0) {
    case 0: {  // powers of one map
      const auto f = random_map(rng, n, coin(rng));
      for (std::size_t i = 0; i < k; ++i) gens.push_back(power(f, i == 0 ? 1 : exp(rng)));
      break;
    }
    case 1: {  // product action on n1 x n2 (falls back to powers when n is prime)
      std::size_t n1 = 0;
      for (std::size_t d = 2; d < n; ++d)
        if (n % d == 0) n1 = d;
      if (n1 == 0) return random_commuting_maps(rng, n, k);
      const std::size_t n2 = n / n1;
      const auto f = random_map(rng, n1, coin(rng));
      const auto h = random_map(rng, n2, coin(rng));
      for (std::size_t i = 0; i < k; ++i) {
        const auto fi = power(f, exp(rng)), hi = power(h, exp(rng));
        Transformation g = Transformation::identity(n);
        for (std::size_t x = 0; x < n; ++x) g.table[x] = fi(x / n2) * n2 + hi(x % n2);
        gens.push_back(g);
      }
      break;
    }
    case 2: {  // disjoint union of two power families
      std::uniform_int_distribution<std::size_t> split(1, n - 1);
      const std::size_t n1 = split(rng);
      const auto f = random_map(rng, n1, coin(rng));
      const auto h = random_map(rng, n - n1, coin(rng));
      for (std::size_t i = 0; i < k; ++i) {
        const auto fi = power(f, exp(rng)), hi = power(h, exp(rng));
        Transformation g = Transformation::identity(n);
        for (std::size_t x = 0; x < n1; ++x) g.table[x] = fi(x);
        for (std::size_t x = n1; x < n; ++x) g.table[x] = n1 + hi(x - n1);
        gens.push_back(g);
      }
      break;
    }
    default: {  // powers of f together with the constant map onto a fixed point of f
      auto f = random_map(rng, n, false);
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      const auto p = pick(rng);
      f.table[p] = p;
      for (std::size_t i = 0; i < k; ++i) {
        if (i == 1) {
          Transformation c = Transformation::identity(n);
          for (auto& v : c.table) v = p;
          gens.push_back(c);
        } else {
          gens.push_back(power(f, i == 0 ? 1 : exp(rng)));
        }
      }
    }
  }
  std::shuffle(gens.begin(), gens.end(), rng);
  return gens;
}

/// Emission tables satisfying the exchange identity: for unary vertices any
/// table works; otherwise N(a, q)_b = c_ab + phi_b(t_a q) - phi_b(q), retried
/// until every count lies in [0, max_count].
inline std::vector<std::vector<EmitRow>> random_emits(Rng& rng, const std::vector<Transformation>& gens,
                                                      const std::vector<std::string>& targets, int max_count,
                                                      double density) {
  const std::size_t k = gens.size(), n = gens.empty() ? 0 : gens[0].table.size();
  std::vector<std::vector<EmitRow>> out(k, std::vector<EmitRow>(n));
  std::uniform_int_distribution<int> count(0, max_count);
  std::bernoulli_distribution use(density);
  for (const auto& b : targets) {
    if (!use(rng)) continue;
    if (k == 1) {
      for (std::size_t q = 0; q < n; ++q)
        if (int c = use(rng) ? count(rng) : 0) out[0][q][b] = c;
      continue;
    }
    std::vector<int> c(k), phi(n);
    bool ok = false;
    for (int attempt = 0; attempt < 50 && !ok; ++attempt) {
      for (auto& v : c) v = count(rng);
      for (auto& v : phi) v = count(rng);
      ok = true;
      for (std::size_t a = 0; a < k && ok; ++a)
        for (std::size_t q = 0; q < n && ok; ++q) {
          const int v = c[a] + phi[gens[a](q)] - phi[q];
          ok = v >= 0 && v <= max_count;
        }
    }
    if (!ok) std::fill(phi.begin(), phi.end(), 0);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t q = 0; q < n; ++q)
        if (int v = c[a] + phi[gens[a](q)] - phi[q]) out[a][q][b] = v;
  }
  return out;
}

struct RandomNetworkOptions {
  std::size_t max_vertices = 3;
  std::size_t max_letters = 2;
  std::size_t max_states = 4;
  int max_count = 2;
  double density = 0.5;
};

inline Network random_network(Rng& rng, const RandomNetworkOptions& o = {}) {
  std::uniform_int_distribution<std::size_t> nv(1, o.max_vertices), nl(1, o.max_letters), ns(1, o.max_states);
  const std::size_t vcount = nv(rng);
  std::vector<std::vector<std::string>> alphabets(vcount);
  std::vector<std::string> all_letters;
  for (std::size_t v = 0; v < vcount; ++v) {
    const std::size_t k = nl(rng);
    for (std::size_t i = 0; i < k; ++i) {
      alphabets[v].push_back("l" + std::to_string(v) + std::string(1, char('a' + i)));
      all_letters.push_back(alphabets[v].back());
    }
  }
  std::vector<ProcessorSpec> specs;
  for (std::size_t v = 0; v < vcount; ++v) {
    const std::size_t n = ns(rng);
    const auto gens = random_commuting_maps(rng, n, alphabets[v].size());
    std::vector<std::vector<StateIndex>> t;
    for (const auto& g : gens) t.emplace_back(g.table.begin(), g.table.end());
    specs.push_back(proc("v" + std::to_string(v), alphabets[v], n, std::move(t),
                         random_emits(rng, gens, all_letters, o.max_count, o.density)));
  }
  return Network("random", std::move(specs));
}

/// Processor-free view of a single-vertex network built from maps.
inline Network single_vertex(const std::vector<Transformation>& gens) {
  std::vector<std::string> letters;
  std::vector<std::vector<StateIndex>> t;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    letters.push_back("g" + std::to_string(i));
    t.emplace_back(gens[i].table.begin(), gens[i].table.end());
  }
  return Network("single", {proc("v", letters, gens[0].table.size(), std::move(t))});
}

}  // namespace fixtures

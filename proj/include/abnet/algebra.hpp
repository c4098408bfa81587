#pragma once

#include "abnet/execution.hpp"
#include "abnet/linalg.hpp"
#include "abnet/monoid.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

namespace abnet {

/// Transition monoid and recurrence data for every vertex.
struct LocalStructure {
  std::vector<TransformationMonoid> monoids;
  std::vector<RecurrentStructure> recurrent;
};

inline LocalStructure local_structure(const Network& net, std::size_t budget = default_monoid_budget()) {
  LocalStructure ls;
  for (const auto& p : net.vertices()) {
    ls.monoids.push_back(generate_monoid(p, budget));
    ls.recurrent.push_back(recurrent_structure(ls.monoids.back()));
  }
  return ls;
}

/// q-hat = (e_v q_v)_v.
inline StateTuple locally_recurrent(const LocalStructure& ls, const StateTuple& q) {
  StateTuple out(q.size());
  for (std::size_t v = 0; v < q.size(); ++v) out[v] = ls.recurrent.at(v).e(q[v]);
  return out;
}

inline StateTuple locally_recurrent(const Network& net, const StateTuple& q) {
  return locally_recurrent(local_structure(net), q);
}

inline bool is_locally_recurrent(const LocalStructure& ls, const StateTuple& q) {
  return locally_recurrent(ls, q) == q;
}

/// Per-vertex irreducible component labels; a local component of the network
/// is one choice of label per vertex.
struct ComponentData {
  std::vector<std::vector<std::size_t>> labels;  // [vertex][state]
  std::vector<std::size_t> counts;               // classes per vertex

  std::vector<std::size_t> component_of(const StateTuple& q) const {
    std::vector<std::size_t> out(q.size());
    for (std::size_t v = 0; v < q.size(); ++v) out[v] = labels[v][q[v]];
    return out;
  }
  bool same_component(const StateTuple& q, const StateTuple& r) const { return component_of(q) == component_of(r); }

  /// Number of local components, saturating at SIZE_MAX.
  std::size_t total() const {
    std::size_t n = 1;
    for (auto c : counts) {
      if (n > std::numeric_limits<std::size_t>::max() / c) return std::numeric_limits<std::size_t>::max();
      n *= c;
    }
    return n;
  }
  bool locally_irreducible() const {
    return std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c == 1; });
  }
};

inline ComponentData local_components(const Network& net) {
  ComponentData cd;
  for (const auto& p : net.vertices()) {
    cd.labels.push_back(irreducible_components(letter_maps(p), p.num_states()));
    cd.counts.push_back(count_labels(cd.labels.back()));
  }
  return cd;
}

/// A network carved out of a parent, with the state index correspondence.
struct Restriction {
  Network network;
  std::vector<std::vector<StateIndex>> to_parent;  // [vertex][child state] -> parent state
  std::vector<VertexId> vertex_to_parent;

  StateTuple lift(const StateTuple& q) const {
    StateTuple out(q.size());
    for (std::size_t v = 0; v < q.size(); ++v) out[v] = to_parent[v][q[v]];
    return out;
  }
  /// Parent tuple -> child tuple; throws if a state lies outside the child.
  StateTuple project(const StateTuple& parent) const {
    StateTuple out(to_parent.size());
    for (std::size_t v = 0; v < to_parent.size(); ++v) {
      const auto& m = to_parent[v];
      auto it = std::find(m.begin(), m.end(), parent.at(vertex_to_parent[v]));
      if (it == m.end()) throw InvalidArgument("state lies outside the restricted network");
      out[v] = static_cast<StateIndex>(it - m.begin());
    }
    return out;
  }
};

/// N_q: every processor restricted to the irreducible class containing q_v.
/// Graph and alphabet are unchanged.
inline Restriction restrict_to_component(const Network& net, const StateTuple& q,
                                         const ComponentData& cd) {
  auto specs = net.to_specs();
  Restriction r;
  std::map<std::string, std::string> initial;
  for (VertexId v = 0; v < specs.size(); ++v) {
    auto& s = specs[v];
    const auto label = cd.labels[v][q.at(v)];
    std::vector<StateIndex> keep;
    std::vector<StateIndex> local(s.states.size(), 0);
    for (StateIndex x = 0; x < s.states.size(); ++x)
      if (cd.labels[v][x] == label) {
        local[x] = static_cast<StateIndex>(keep.size());
        keep.push_back(x);
      }
    ProcessorSpec out;
    out.id = s.id;
    out.alphabet = s.alphabet;
    for (auto x : keep) out.states.push_back(s.states[x]);
    for (std::size_t i = 0; i < s.alphabet.size(); ++i) {
      std::vector<StateIndex> t;
      std::vector<std::map<std::string, Int>> e;
      for (auto x : keep) {
        t.push_back(local[s.transition[i][x]]);
        e.push_back(s.emit[i][x]);
      }
      out.transition.push_back(std::move(t));
      out.emit.push_back(std::move(e));
    }
    initial[s.id] = s.states[q[v]];
    s = std::move(out);
    r.to_parent.push_back(std::move(keep));
    r.vertex_to_parent.push_back(v);
  }
  r.network = Network(net.name(), std::move(specs), std::move(initial));
  return r;
}

inline Restriction restrict_to_component(const Network& net, const StateTuple& q) {
  return restrict_to_component(net, q, local_components(net));
}

/// Subnetwork on a sub-alphabet: vertices without kept letters are dropped
/// and emissions of removed letters are discarded. State spaces are unchanged.
inline Restriction restrict_alphabet(const Network& net, const std::vector<LetterId>& letters) {
  std::vector<bool> keep(net.num_letters(), false);
  for (auto a : letters) keep.at(a) = true;
  auto specs = net.to_specs();
  std::vector<ProcessorSpec> out;
  Restriction r;
  for (VertexId v = 0; v < specs.size(); ++v) {
    const auto& p = net.vertex(v);
    ProcessorSpec s;
    s.id = specs[v].id;
    s.states = specs[v].states;
    for (std::size_t i = 0; i < p.num_letters(); ++i) {
      if (!keep[p.letters()[i]]) continue;
      s.alphabet.push_back(specs[v].alphabet[i]);
      s.transition.push_back(specs[v].transition[i]);
      auto rows = specs[v].emit[i];
      for (auto& row : rows)
        std::erase_if(row, [&](const auto& kv) { return !keep[*net.find_letter(kv.first)]; });
      s.emit.push_back(std::move(rows));
    }
    if (s.alphabet.empty()) continue;
    std::vector<StateIndex> ident(s.states.size());
    for (StateIndex x = 0; x < ident.size(); ++x) ident[x] = x;
    r.to_parent.push_back(std::move(ident));
    r.vertex_to_parent.push_back(v);
    out.push_back(std::move(s));
  }
  r.network = Network(net.name(), std::move(out));
  return r;
}

/// Total kernel K = prod_v K_v together with the letter periods r_a.
struct KernelData {
  std::vector<IntLattice> vertex_lattices;  // K_v over Z^{A_v}
  std::vector<Int> group_orders;            // |H_v|
  std::vector<Int> periods;                 // r_a, global alphabet order

  /// K as one lattice over Z^A (block diagonal, already in Hermite form).
  IntLattice global() const {
    std::size_t n = 0;
    for (const auto& l : vertex_lattices) n += l.dim();
    IntMatrix b(n, n);
    std::size_t off = 0;
    for (const auto& l : vertex_lattices) {
      for (std::size_t i = 0; i < l.dim(); ++i)
        for (std::size_t j = 0; j < l.dim(); ++j) b(off + i, off + j) = l.basis()(i, j);
      off += l.dim();
    }
    return IntLattice(std::move(b));
  }

  bool contains(const Network& net, const LetterVec& k) const {
    for (VertexId v = 0; v < net.num_vertices(); ++v) {
      std::vector<Int> part;
      for (auto a : net.vertex(v).letters()) part.push_back(k.at(a));
      if (!vertex_lattices[v].contains(part)) return false;
    }
    return true;
  }
};

namespace detail {

using Perm = std::vector<StateIndex>;

struct PermHash {
  std::size_t operator()(const Perm& p) const { return TransformationHash{}(Transformation{p}); }
};

/// K_v from the Cayley graph of H_v (the letter permutations of e_v Q_v):
/// each edge g -> sigma_a g contributes witness(g) + 1_a - witness(sigma_a g).
inline std::tuple<IntLattice, Int, std::vector<Int>> vertex_kernel(const Processor& p, const RecurrentStructure& rs,
                                                                   std::size_t budget) {
  const auto& eq = rs.recurrent;
  const std::size_t k = p.num_letters();
  std::vector<StateIndex> pos(p.num_states(), 0);
  for (std::size_t i = 0; i < eq.size(); ++i) pos[eq[i]] = static_cast<StateIndex>(i);
  std::vector<Perm> sigma;
  for (std::size_t a = 0; a < k; ++a) {
    Perm s(eq.size());
    std::vector<bool> hit(eq.size(), false);
    for (std::size_t i = 0; i < eq.size(); ++i) {
      const StateIndex target = p.next(a, eq[i]);
      if (!rs.is_recurrent(target)) throw InternalInconsistency("letter leaves the recurrent states");
      s[i] = pos[target];
      if (hit[s[i]]) throw InternalInconsistency("letter does not act invertibly on recurrent states");
      hit[s[i]] = true;
    }
    sigma.push_back(std::move(s));
  }
  Perm id(eq.size());
  for (std::size_t i = 0; i < id.size(); ++i) id[i] = static_cast<StateIndex>(i);
  std::unordered_map<Perm, std::size_t, PermHash> index{{id, 0}};
  std::vector<Perm> elems{id};
  std::vector<std::vector<Int>> witness{std::vector<Int>(k, Int(0))};
  std::vector<std::vector<Int>> relations;
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (std::size_t a = 0; a < k; ++a) {
      Perm h(eq.size());
      for (std::size_t i = 0; i < eq.size(); ++i) h[i] = sigma[a][elems[head][i]];
      auto w = witness[head];
      w[a] += 1;
      auto [it, fresh] = index.emplace(h, elems.size());
      if (fresh) {
        if (elems.size() >= budget) throw MonoidBudgetExceeded("recurrent group exceeds the monoid budget");
        elems.push_back(std::move(h));
        witness.push_back(std::move(w));
      } else {
        for (std::size_t j = 0; j < k; ++j) w[j] -= witness[it->second][j];
        relations.push_back(std::move(w));
      }
    }
  }
  auto lattice = hnf(relations, k);
  const Int order(elems.size());
  if (lattice.index() != order) throw InternalInconsistency("kernel index differs from the recurrent group order");
  std::vector<Int> periods;
  for (std::size_t a = 0; a < k; ++a) {
    Perm g = sigma[a];
    Int r = 1;
    while (g != id) {
      for (auto& x : g) x = sigma[a][x];
      ++r;
    }
    std::vector<Int> unit(k, Int(0));
    unit[a] = r;
    if (!lattice.contains(unit)) throw InternalInconsistency("period multiple is not in the kernel");
    periods.push_back(r);
  }
  return {std::move(lattice), order, std::move(periods)};
}

}  // namespace detail

/// Kernel computed on e_v Q_v of the processors as given. Entry points that
/// take a state restrict to its local component first.
inline KernelData total_kernel(const Network& net, const LocalStructure& ls,
                               std::size_t budget = default_monoid_budget()) {
  KernelData kd;
  kd.periods.assign(net.num_letters(), Int(0));
  for (VertexId v = 0; v < net.num_vertices(); ++v) {
    auto [lattice, order, periods] = detail::vertex_kernel(net.vertex(v), ls.recurrent[v], budget);
    for (std::size_t i = 0; i < periods.size(); ++i) kd.periods[net.vertex(v).letters()[i]] = periods[i];
    kd.vertex_lattices.push_back(std::move(lattice));
    kd.group_orders.push_back(order);
  }
  return kd;
}

inline KernelData total_kernel(const Network& net) { return total_kernel(net, local_structure(net)); }

/// Kernel of the local component N_q.
inline KernelData total_kernel(const Network& net, const StateTuple& q) {
  return total_kernel(restrict_to_component(net, q).network);
}

struct ProductionData {
  RatMatrix P;
  StateTuple base_state;  // the locally recurrent q-hat, in the caller's indexing
  std::vector<Int> periods;
  IntMatrix D;
  IntMatrix L;
};

/// Column b of P is the output of (r_b 1_b) |> q-hat divided by r_b. The state
/// must come back to q-hat exactly; L = (I - P) D must be integral.
inline ProductionData production_at(const Network& net, const StateTuple& qhat, const std::vector<Int>& periods) {
  const std::size_t n = net.num_letters();
  ProductionData pd;
  pd.base_state = qhat;
  pd.periods = periods;
  pd.P = RatMatrix(n, n);
  pd.D = IntMatrix(n, n);
  for (LetterId b = 0; b < n; ++b) {
    LetterVec x = net.zero_vector();
    x[b] = periods[b];
    const auto out = local_action(net, x, qhat);
    if (out.state != qhat)
      throw InternalInconsistency("kernel vector r_b 1_b did not return to the base state for letter '" +
                                  net.letter(b).id + "'");
    for (LetterId a = 0; a < n; ++a) pd.P(a, b) = make_rational(out.letters[a], periods[b]);
    pd.D(b, b) = periods[b];
  }
  RatMatrix l = (RatMatrix::identity(n) - pd.P) * to_rational(pd.D);
  auto li = to_integer(l);
  if (!li) throw InternalInconsistency("Laplacian has a non-integer entry");
  pd.L = std::move(*li);
  return pd;
}

/// P_q, D_q and L_q of the local component containing q.
inline ProductionData production_matrix(const Network& net, const StateTuple& q) {
  auto r = restrict_to_component(net, q);
  const auto ls = local_structure(r.network);
  const auto kd = total_kernel(r.network, ls);
  const auto qhat = locally_recurrent(ls, r.project(q));
  auto pd = production_at(r.network, qhat, kd.periods);
  pd.base_state = r.lift(qhat);
  return pd;
}

namespace detail {

/// Calls f(q) for locally recurrent states of the restricted network: all of
/// them when there are at most `exhaustive_limit`, otherwise `samples` drawn
/// with a fixed seed.
inline void for_recurrent_states(const LocalStructure& ls, std::size_t exhaustive_limit, std::size_t samples,
                                 const std::function<void(const StateTuple&)>& f) {
  std::size_t total = 1;
  bool big = false;
  for (const auto& rs : ls.recurrent) {
    if (total > exhaustive_limit / std::max<std::size_t>(rs.recurrent.size(), 1)) big = true;
    total *= std::max<std::size_t>(rs.recurrent.size(), 1);
  }
  const std::size_t nv = ls.recurrent.size();
  if (!big && total <= exhaustive_limit) {
    std::vector<std::size_t> idx(nv, 0);
    while (true) {
      StateTuple q(nv);
      for (std::size_t v = 0; v < nv; ++v) q[v] = ls.recurrent[v].recurrent[idx[v]];
      f(q);
      std::size_t v = 0;
      while (v < nv && ++idx[v] == ls.recurrent[v].recurrent.size()) idx[v++] = 0;
      if (v == nv) return;
    }
  }
  std::mt19937_64 rng(0x5eed);
  for (std::size_t s = 0; s < samples; ++s) {
    StateTuple q(nv);
    for (std::size_t v = 0; v < nv; ++v) {
      const auto& rec = ls.recurrent[v].recurrent;
      q[v] = rec[std::uniform_int_distribution<std::size_t>(0, rec.size() - 1)(rng)];
    }
    f(q);
  }
}

/// One representative state per local component (at most `limit`).
inline std::vector<StateTuple> component_representatives(const ComponentData& cd, std::size_t limit) {
  const std::size_t nv = cd.labels.size();
  std::vector<std::vector<StateIndex>> first(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    first[v].assign(cd.counts[v], 0);
    for (StateIndex x = cd.labels[v].size(); x-- > 0;) first[v][cd.labels[v][x]] = x;
  }
  std::vector<StateTuple> out;
  std::vector<std::size_t> idx(nv, 0);
  while (out.size() < limit) {
    StateTuple q(nv);
    for (std::size_t v = 0; v < nv; ++v) q[v] = first[v][idx[v]];
    out.push_back(std::move(q));
    std::size_t v = 0;
    while (v < nv && ++idx[v] == cd.counts[v]) idx[v++] = 0;
    if (v == nv) break;
  }
  return out;
}

}  // namespace detail

inline constexpr std::size_t kExhaustiveStateLimit = 10'000;
inline constexpr std::size_t kSampledStates = 100;

/// True iff P agrees exactly at every checked locally recurrent state within
/// each local component.
inline bool production_independence_check(const Network& net, std::size_t max_components = 1000) {
  const auto cd = local_components(net);
  for (const auto& rep : detail::component_representatives(cd, max_components)) {
    const auto r = restrict_to_component(net, rep, cd);
    const auto ls = local_structure(r.network);
    const auto kd = total_kernel(r.network, ls);
    std::optional<RatMatrix> reference;
    bool same = true;
    detail::for_recurrent_states(ls, kExhaustiveStateLimit, kSampledStates, [&](const StateTuple& q) {
      auto p = production_at(r.network, q, kd.periods).P;
      if (!reference) reference = std::move(p);
      else if (p != *reference) same = false;
    });
    if (!same) return false;
  }
  return true;
}

struct StrongComponent {
  std::vector<LetterId> letters;       // ascending global ids
  RatMatrix block;                     // P_ii
  RatMatrix restricted_production;     // production matrix of the alphabet-restricted subnetwork
  IntLattice kernel_from_parent;       // K intersected with Z^{A^i}
  IntLattice kernel_recomputed;        // total kernel of the restricted subnetwork's local component
  bool block_matches = false;
  bool kernel_matches = false;
};

struct StrongComponentData {
  ProductionData production;
  std::vector<std::pair<LetterId, LetterId>> edges;  // (a, b) with p_ba > 0
  std::vector<StrongComponent> components;           // A^i reaching A^j implies i >= j
  std::vector<LetterId> block_order;
  RatMatrix permuted;                                // P in block order
  bool block_triangular = false;
};

/// Tarjan SCCs of the production graph. Tarjan emits a component only after
/// every component it reaches, which is exactly the required labelling.
inline std::vector<std::vector<LetterId>> production_graph_components(const RatMatrix& p) {
  const std::size_t n = p.rows();
  std::vector<std::ptrdiff_t> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<LetterId> stack;
  std::vector<std::vector<LetterId>> out;
  std::ptrdiff_t counter = 0;
  std::function<void(LetterId)> visit = [&](LetterId a) {
    index[a] = low[a] = counter++;
    stack.push_back(a);
    on_stack[a] = true;
    for (LetterId b = 0; b < n; ++b) {
      if (p(b, a) <= 0) continue;  // edge a -> b
      if (index[b] < 0) {
        visit(b);
        low[a] = std::min(low[a], low[b]);
      } else if (on_stack[b]) {
        low[a] = std::min(low[a], index[b]);
      }
    }
    if (low[a] == index[a]) {
      std::vector<LetterId> comp;
      LetterId b;
      do {
        b = stack.back();
        stack.pop_back();
        on_stack[b] = false;
        comp.push_back(b);
      } while (b != a);
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (LetterId a = 0; a < n; ++a)
    if (index[a] < 0) visit(a);
  return out;
}

inline StrongComponentData strong_components(const Network& net, const StateTuple& q) {
  StrongComponentData sd;
  const auto parent = restrict_to_component(net, q);
  const auto parent_kernel = total_kernel(parent.network).global();
  sd.production = production_matrix(net, q);
  const auto& p = sd.production.P;
  const std::size_t n = p.rows();
  for (LetterId a = 0; a < n; ++a)
    for (LetterId b = 0; b < n; ++b)
      if (p(b, a) > 0) sd.edges.emplace_back(a, b);

  std::vector<std::size_t> block_of(n, 0);
  const auto comps = production_graph_components(p);
  for (std::size_t i = 0; i < comps.size(); ++i)
    for (auto a : comps[i]) {
      block_of[a] = i;
      sd.block_order.push_back(a);
    }
  sd.permuted = p.select(sd.block_order, sd.block_order);
  sd.block_triangular = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (block_of[sd.block_order[i]] > block_of[sd.block_order[j]] && sd.permuted(i, j) != 0)
        sd.block_triangular = false;

  for (const auto& letters : comps) {
    StrongComponent sc;
    sc.letters = letters;
    sc.block = p.select(letters, letters);
    const auto sub = restrict_alphabet(parent.network, letters);
    const auto parent_q = parent.project(q);
    StateTuple sub_q;
    for (auto v : sub.vertex_to_parent) sub_q.push_back(parent_q[v]);
    sc.restricted_production = production_matrix(sub.network, sub_q).P;
    sc.block_matches = sc.restricted_production == sc.block;
    sc.kernel_from_parent = intersect_coordinates(parent_kernel, letters);
    sc.kernel_recomputed = total_kernel(sub.network, sub_q).global();
    sc.kernel_matches = sc.kernel_from_parent == sc.kernel_recomputed;
    sd.components.push_back(std::move(sc));
  }
  return sd;
}

/// Same total kernel and same production matrix, each computed on the local
/// component of the given state. Throws if the alphabets differ.
inline bool homotopic(const Network& n1, const Network& n2, const StateTuple& q1, const StateTuple& q2) {
  if (n1.letter_names() != n2.letter_names()) throw InvalidArgument("homotopic: networks have different alphabets");
  const auto k1 = total_kernel(n1, q1).global();
  const auto k2 = total_kernel(n2, q2).global();
  if (!(k1 == k2)) return false;
  return production_matrix(n1, q1).P == production_matrix(n2, q2).P;
}

}  // namespace abnet

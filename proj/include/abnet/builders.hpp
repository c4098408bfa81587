#pragma once

#include "abnet/algebra.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace abnet {

/// Directed multigraph. Undirected edges are stored as both directions.
struct GraphSpec {
  std::vector<std::string> vertices;
  std::vector<std::pair<std::string, std::string>> edges;
  std::map<std::string, std::vector<std::string>> rotor_order;  // rotor networks only

  void add_undirected(const std::string& u, const std::string& v) {
    edges.emplace_back(u, v);
    edges.emplace_back(v, u);
  }
};

/// rows x cols square grid, vertices named "r,c".
inline GraphSpec grid_graph(std::size_t rows, std::size_t cols) {
  GraphSpec g;
  auto id = [](std::size_t r, std::size_t c) { return std::to_string(r) + "," + std::to_string(c); };
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) g.vertices.push_back(id(r, c));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (r + 1 < rows) g.add_undirected(id(r, c), id(r + 1, c));
      if (c + 1 < cols) g.add_undirected(id(r, c), id(r, c + 1));
    }
  return g;
}

namespace detail {

/// Unary network: vertex a has states 0..r_a-1, t(q) = q+1 mod r_a, and on the
/// wrap from r_a-1 to 0 it sends emit(b, a) letters b.
inline Network threshold_network(std::string name, const std::vector<std::string>& names,
                                 const std::vector<Int>& thresholds, const IntMatrix& emit) {
  std::vector<ProcessorSpec> specs;
  for (std::size_t a = 0; a < names.size(); ++a) {
    if (thresholds[a] < 1) throw InvalidArgument("threshold of '" + names[a] + "' must be positive");
    const auto r = thresholds[a].convert_to<std::size_t>();
    ProcessorSpec s;
    s.id = names[a];
    s.alphabet = {names[a]};
    std::vector<StateIndex> t(r);
    std::vector<std::map<std::string, Int>> e(r);
    for (std::size_t q = 0; q < r; ++q) {
      s.states.push_back(std::to_string(q));
      t[q] = (q + 1) % r;
    }
    for (std::size_t b = 0; b < names.size(); ++b)
      if (emit(b, a) != 0) e[r - 1][names[b]] = emit(b, a);
    s.transition.push_back(std::move(t));
    s.emit.push_back(std::move(e));
    specs.push_back(std::move(s));
  }
  return Network(std::move(name), std::move(specs));
}

inline std::vector<std::string> default_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("v" + std::to_string(i));
  return out;
}

}  // namespace detail

/// Topp(L): the locally recurrent toppling network of L (positive diagonal,
/// nonpositive off-diagonal).
inline Network build_toppling(const IntMatrix& l, std::vector<std::string> names = {}, std::string name = "topp") {
  if (!l.square()) throw InvalidArgument("build_toppling: matrix is not square");
  const std::size_t n = l.rows();
  if (names.empty()) names = detail::default_names(n);
  if (names.size() != n) throw InvalidArgument("build_toppling: wrong number of names");
  std::vector<Int> thresholds;
  IntMatrix emit(n, n);
  for (std::size_t v = 0; v < n; ++v) {
    if (l(v, v) <= 0) throw InvalidArgument("build_toppling: diagonal entries must be positive");
    thresholds.push_back(l(v, v));
    for (std::size_t u = 0; u < n; ++u) {
      if (u == v) continue;
      if (l(u, v) > 0) throw InvalidArgument("build_toppling: off-diagonal entries must be nonpositive");
      emit(u, v) = -l(u, v);
    }
  }
  return detail::threshold_network(std::move(name), names, thresholds, emit);
}

namespace detail {

inline std::map<std::string, std::size_t> vertex_positions(const GraphSpec& g) {
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < g.vertices.size(); ++i)
    if (!pos.emplace(g.vertices[i], i).second) throw InvalidArgument("graph: duplicate vertex '" + g.vertices[i] + "'");
  for (const auto& [from, to] : g.edges) {
    if (!pos.count(from) || !pos.count(to)) throw InvalidArgument("graph: edge references an unknown vertex");
    if (from == to) throw InvalidArgument("graph: self-loop at '" + from + "'");
  }
  return pos;
}

}  // namespace detail

/// Sand(G): L_vv = outdeg(v), -L_uv = #edges v -> u. Vertices with outdegree
/// zero act as sinks and are left out of the network.
inline Network build_sandpile(const GraphSpec& g, std::string name = "sand") {
  const auto pos = detail::vertex_positions(g);
  std::vector<Int> outdeg(g.vertices.size(), Int(0));
  for (const auto& e : g.edges) outdeg[pos.at(e.first)] += 1;
  std::vector<std::string> names;
  std::vector<std::size_t> keep_index(g.vertices.size(), SIZE_MAX);
  for (std::size_t i = 0; i < g.vertices.size(); ++i)
    if (outdeg[i] > 0) {
      keep_index[i] = names.size();
      names.push_back(g.vertices[i]);
    }
  IntMatrix l(names.size(), names.size());
  for (std::size_t i = 0; i < g.vertices.size(); ++i)
    if (keep_index[i] != SIZE_MAX) l(keep_index[i], keep_index[i]) = outdeg[i];
  for (const auto& [from, to] : g.edges) {
    const auto v = keep_index[pos.at(from)], u = keep_index[pos.at(to)];
    if (u != SIZE_MAX) l(u, v) -= 1;
  }
  return build_toppling(l, names, std::move(name));
}

/// Rotor(G): vertex v has rotor positions 0..outdeg(v)-1; each letter advances
/// the rotor and sends one letter along the edge at the new position.
inline Network build_rotor(const GraphSpec& g, std::string name = "rotor") {
  const auto pos = detail::vertex_positions(g);
  std::vector<std::vector<std::string>> out(g.vertices.size());
  for (const auto& [from, to] : g.edges) out[pos.at(from)].push_back(to);
  std::vector<ProcessorSpec> specs;
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    const auto& v = g.vertices[i];
    auto order = out[i];
    if (auto it = g.rotor_order.find(v); it != g.rotor_order.end()) {
      auto given = it->second, expected = order;
      std::sort(given.begin(), given.end());
      std::sort(expected.begin(), expected.end());
      if (given != expected) throw InvalidArgument("rotor_order of '" + v + "' does not match its out-edges");
      order = it->second;
    }
    if (order.empty()) throw InvalidArgument("rotor network: vertex '" + v + "' has no out-edges");
    const std::size_t d = order.size();
    ProcessorSpec s;
    s.id = v;
    s.alphabet = {v};
    std::vector<StateIndex> t(d);
    std::vector<std::map<std::string, Int>> e(d);
    for (std::size_t q = 0; q < d; ++q) {
      s.states.push_back(std::to_string(q));
      t[q] = (q + 1) % d;
      e[q][order[(q + 1) % d]] += 1;
    }
    s.transition.push_back(std::move(t));
    s.emit.push_back(std::move(e));
    specs.push_back(std::move(s));
  }
  return Network(std::move(name), std::move(specs));
}

/// S(N): one unary processor per letter a with thresholds r_a that sends
/// r_a P_ba letters b on each wrap. Its Laplacian is L_q of N, so it equals
/// Topp(L_q) whenever P has zero diagonal. Letter and vertex ids are the
/// letter ids of N.
inline Network sandpilize(const Network& net, const StateTuple& q) {
  const auto pd = production_matrix(net, q);
  const std::size_t n = net.num_letters();
  IntMatrix emit(n, n);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t a = 0; a < n; ++a) emit(b, a) = numerator(pd.P(b, a) * pd.periods[a]);
  return detail::threshold_network("S(" + net.name() + ")", net.letter_names(), pd.periods, emit);
}

}  // namespace abnet

#pragma once

#include "abnet/network.hpp"

#include <array>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace abnet {

inline constexpr std::size_t kDefaultMonoidBudget = 1'000'000;

class MonoidBudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Size guard for monoid generation; ABNET_MONOID_BUDGET overrides the default.
inline std::size_t default_monoid_budget() {
  if (const char* env = std::getenv("ABNET_MONOID_BUDGET")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultMonoidBudget;
}

/// A set map Q -> Q stored as a table of state indices.
struct Transformation {
  std::vector<StateIndex> table;

  static Transformation identity(std::size_t n) {
    Transformation t;
    t.table.resize(n);
    std::iota(t.table.begin(), t.table.end(), StateIndex{0});
    return t;
  }

  std::size_t size() const { return table.size(); }
  StateIndex operator()(StateIndex q) const { return table[q]; }
  bool is_idempotent() const { return then(*this) == *this; }

  /// The composite "this after g": q -> this(g(q)).
  Transformation after(const Transformation& g) const {
    Transformation r;
    r.table.resize(g.size());
    for (std::size_t q = 0; q < g.size(); ++q) r.table[q] = table[g.table[q]];
    return r;
  }
  /// The composite "g after this".
  Transformation then(const Transformation& g) const { return g.after(*this); }

  friend bool operator==(const Transformation&, const Transformation&) = default;
};

struct TransformationHash {
  std::size_t operator()(const Transformation& t) const {
    std::size_t h = 1469598103934665603ull;
    for (auto v : t.table) h = (h ^ v) * 1099511628211ull;
    return h;
  }
};

/// Finite commutative monoid of maps on {0..n-1} generated by one map per
/// letter. Each element remembers the exponent vector that first reached it.
class TransformationMonoid {
 public:
  std::size_t size() const { return elements_.size(); }
  std::size_t num_states() const { return num_states_; }
  std::size_t num_generators() const { return generators_.size(); }
  const Transformation& element(std::size_t i) const { return elements_[i]; }
  const std::vector<Transformation>& elements() const { return elements_; }
  const std::vector<std::uint64_t>& witness(std::size_t i) const { return witnesses_[i]; }
  std::size_t generator(std::size_t letter) const { return generators_[letter]; }
  std::size_t identity() const { return 0; }

  std::optional<std::size_t> index_of(const Transformation& t) const {
    auto it = index_.find(t);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t product(std::size_t i, std::size_t j) const {
    return index_.at(elements_[i].after(elements_[j]));
  }

 private:
  friend TransformationMonoid generate_monoid(const std::vector<Transformation>&, std::size_t, std::size_t);
  std::size_t num_states_ = 0;
  std::vector<Transformation> elements_;
  std::vector<std::vector<std::uint64_t>> witnesses_;
  std::vector<std::size_t> generators_;
  std::unordered_map<Transformation, std::size_t, TransformationHash> index_;
};

/// BFS closure of the generators under composition. Throws InvalidArgument
/// for non-commuting generators and MonoidBudgetExceeded past `budget` elements.
inline TransformationMonoid generate_monoid(const std::vector<Transformation>& gens, std::size_t num_states,
                                            std::size_t budget = default_monoid_budget()) {
  for (const auto& g : gens)
    if (g.size() != num_states) throw InvalidArgument("generator does not act on the state space");
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j)
      if (gens[i].after(gens[j]) != gens[j].after(gens[i]))
        throw InvalidArgument("generators " + std::to_string(i) + " and " + std::to_string(j) + " do not commute");

  TransformationMonoid m;
  m.num_states_ = num_states;
  auto insert = [&](Transformation t, std::vector<std::uint64_t> w) -> std::pair<std::size_t, bool> {
    auto [it, fresh] = m.index_.emplace(t, m.elements_.size());
    if (fresh) {
      if (m.elements_.size() >= budget)
        throw MonoidBudgetExceeded("transition monoid exceeds " + std::to_string(budget) + " elements");
      m.elements_.push_back(std::move(t));
      m.witnesses_.push_back(std::move(w));
    }
    return {it->second, fresh};
  };
  insert(Transformation::identity(num_states), std::vector<std::uint64_t>(gens.size(), 0));
  for (std::size_t a = 0; a < gens.size(); ++a) {
    auto w = std::vector<std::uint64_t>(gens.size(), 0);
    w[a] = 1;
    m.generators_.push_back(insert(gens[a], std::move(w)).first);
  }
  // Every element is reachable from the identity by generator steps.
  for (std::size_t head = 0; head < m.elements_.size(); ++head) {
    for (std::size_t a = 0; a < gens.size(); ++a) {
      auto w = m.witnesses_[head];
      w[a] += 1;
      insert(gens[a].after(m.elements_[head]), std::move(w));
    }
  }
  return m;
}

inline std::vector<Transformation> letter_maps(const Processor& p) {
  std::vector<Transformation> gens;
  for (std::size_t i = 0; i < p.num_letters(); ++i) gens.push_back(Transformation{p.transition(i)});
  return gens;
}

inline TransformationMonoid generate_monoid(const Processor& p, std::size_t budget = default_monoid_budget()) {
  return generate_monoid(letter_maps(p), p.num_states(), budget);
}

/// e = product of all idempotents. It is idempotent and lies in mM for every m.
inline Transformation minimal_idempotent(const TransformationMonoid& m) {
  Transformation e = Transformation::identity(m.num_states());
  for (const auto& f : m.elements())
    if (f.is_idempotent()) e = e.after(f);
  return e;
}

/// Labels the classes of x ~ x' (mx = m'x' for some m, m'). Only generator
/// steps are needed: the classes are the connected components of the
/// undirected graph with edges {x, t_a x}. Labels follow smallest member order.
inline std::vector<std::size_t> irreducible_components(const std::vector<Transformation>& gens,
                                                       std::size_t num_states) {
  std::vector<std::size_t> parent(num_states);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& g : gens)
    for (StateIndex q = 0; q < num_states; ++q) {
      auto a = find(q), b = find(g(q));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::size_t> label(num_states);
  std::unordered_map<std::size_t, std::size_t> renumber;
  for (StateIndex q = 0; q < num_states; ++q) {
    auto [it, fresh] = renumber.emplace(find(q), renumber.size());
    label[q] = it->second;
  }
  return label;
}

inline std::vector<std::size_t> irreducible_components(const TransformationMonoid& m) {
  std::vector<Transformation> gens;
  for (std::size_t a = 0; a < m.num_generators(); ++a) gens.push_back(m.element(m.generator(a)));
  return irreducible_components(gens, m.num_states());
}

inline std::size_t count_labels(const std::vector<std::size_t>& labels) {
  std::size_t n = 0;
  for (auto l : labels) n = std::max(n, l + 1);
  return n;
}

/// Idempotent/recurrence data of one processor.
struct RecurrentStructure {
  Transformation e;
  std::vector<StateIndex> recurrent;        // eQ, ascending
  std::vector<std::size_t> group;           // element indices of eM
  std::vector<std::size_t> component_of;    // irreducible component label per state
  std::size_t num_components = 0;

  bool is_recurrent(StateIndex q) const { return e(q) == q; }
};

inline RecurrentStructure recurrent_structure(const TransformationMonoid& m) {
  RecurrentStructure rs;
  rs.e = minimal_idempotent(m);
  for (StateIndex q = 0; q < m.num_states(); ++q)
    if (rs.e(q) == q) rs.recurrent.push_back(q);
  std::vector<bool> in_group(m.size(), false);
  for (const auto& x : m.elements()) {
    auto idx = m.index_of(rs.e.after(x));
    if (!idx) throw InternalInconsistency("eM is not contained in M");
    in_group[*idx] = true;
  }
  for (std::size_t i = 0; i < m.size(); ++i)
    if (in_group[i]) rs.group.push_back(i);
  rs.component_of = irreducible_components(m);
  rs.num_components = count_labels(rs.component_of);
  return rs;
}

/// eQ = {x : ex = x}.
inline std::vector<StateIndex> recurrent_states(const TransformationMonoid& m) {
  return recurrent_structure(m).recurrent;
}

/// The five characterizations of a recurrent x, evaluated for the action of
/// M on the invariant subset X (one irreducible class):
///   (1) x in My for all y in X      (2) x in M(mx) for all m
///   (3) x in mX for all m           (4) x in eX        (5) x = ex
inline std::vector<std::array<bool, 5>> recurrence_conditions(const TransformationMonoid& m,
                                                              std::span<const StateIndex> subset) {
  const auto e = minimal_idempotent(m);
  std::vector<bool> in_x(m.num_states(), false);
  for (auto x : subset) in_x[x] = true;
  auto orbit = [&](StateIndex y) {
    std::vector<bool> hit(m.num_states(), false);
    for (const auto& g : m.elements()) hit[g(y)] = true;
    return hit;
  };
  std::vector<std::vector<bool>> orbits(m.num_states());
  for (auto y : subset) orbits[y] = orbit(y);
  std::vector<std::array<bool, 5>> out;
  for (auto x : subset) {
    std::array<bool, 5> c{true, true, true, false, false};
    for (auto y : subset) c[0] = c[0] && orbits[y][x];
    for (const auto& g : m.elements()) {
      c[1] = c[1] && orbit(g(x))[x];
      bool image = false;
      for (auto y : subset) image = image || g(y) == x;
      c[2] = c[2] && image;
    }
    for (auto y : subset) c[3] = c[3] || e(y) == x;
    c[4] = e(x) == x;
    out.push_back(c);
  }
  return out;
}

struct TorsorReport {
  bool transitive = false;
  bool free = false;
  bool faithful = false;
  std::size_t group_order = 0;  // |eM| as maps on the subset
  std::size_t orbit_size = 0;   // |eX|
};

/// Examines the group action eM x eX -> eX for M acting on the invariant,
/// irreducible subset X (the whole state space by default). Throws
/// InvalidArgument when X splits into several classes.
inline TorsorReport check_torsor(const TransformationMonoid& m, std::span<const StateIndex> subset) {
  std::vector<bool> in_x(m.num_states(), false);
  for (auto x : subset) in_x[x] = true;
  for (std::size_t a = 0; a < m.num_generators(); ++a)
    for (auto x : subset)
      if (!in_x[m.element(m.generator(a))(x)]) throw InvalidArgument("check_torsor: subset is not invariant");
  {
    std::vector<Transformation> gens;
    std::vector<StateIndex> local(m.num_states(), 0);
    for (std::size_t i = 0; i < subset.size(); ++i) local[subset[i]] = static_cast<StateIndex>(i);
    for (std::size_t a = 0; a < m.num_generators(); ++a) {
      Transformation g;
      for (auto x : subset) g.table.push_back(local[m.element(m.generator(a))(x)]);
      gens.push_back(std::move(g));
    }
    if (subset.empty() || count_labels(irreducible_components(gens, subset.size())) != 1)
      throw InvalidArgument("check_torsor: action is reducible");
  }
  auto restrict = [&](const Transformation& t) {
    std::vector<StateIndex> r;
    for (auto x : subset) r.push_back(t(x));
    return r;
  };

  TorsorReport rep;
  {
    std::vector<std::vector<StateIndex>> seen;
    rep.faithful = true;
    for (const auto& g : m.elements()) {
      auto r = restrict(g);
      if (std::find(seen.begin(), seen.end(), r) != seen.end()) {
        rep.faithful = false;
        break;
      }
      seen.push_back(std::move(r));
    }
  }
  const auto e = minimal_idempotent(m);
  std::vector<StateIndex> ex;
  for (auto x : subset)
    if (e(x) == x) ex.push_back(x);
  rep.orbit_size = ex.size();

  std::vector<std::vector<StateIndex>> group;  // distinct actions of eM on eX
  for (const auto& g : m.elements()) {
    const auto eg = e.after(g);
    std::vector<StateIndex> act;
    for (auto x : ex) act.push_back(eg(x));
    if (std::find(group.begin(), group.end(), act) == group.end()) group.push_back(std::move(act));
  }
  rep.group_order = group.size();

  rep.transitive = true;
  if (!ex.empty()) {
    std::vector<bool> reached(m.num_states(), false);
    for (const auto& act : group) reached[act[0]] = true;
    for (auto x : ex) rep.transitive = rep.transitive && reached[x];
  }
  rep.free = true;
  for (const auto& act : group) {
    bool is_identity = true;
    bool has_fixed = false;
    for (std::size_t i = 0; i < ex.size(); ++i) {
      if (act[i] == ex[i]) has_fixed = true;
      else is_identity = false;
    }
    if (!is_identity && has_fixed) rep.free = false;
  }
  return rep;
}

inline TorsorReport check_torsor(const TransformationMonoid& m) {
  std::vector<StateIndex> all(m.num_states());
  std::iota(all.begin(), all.end(), StateIndex{0});
  return check_torsor(m, all);
}

inline bool dominated_by(const LetterVec& lo, const LetterVec& hi) {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (lo[i] > hi[i]) return false;
  return true;
}

/// Earliest pair m < n (ordered by n, then m) with seq[m] <= seq[n]
/// coordinatewise, or nullopt if the sequence is still a bad sequence.
inline std::optional<std::pair<std::size_t, std::size_t>> dickson_find(std::span<const LetterVec> seq) {
  for (std::size_t n = 1; n < seq.size(); ++n)
    for (std::size_t m = 0; m < n; ++m)
      if (dominated_by(seq[m], seq[n])) return std::make_pair(m, n);
  return std::nullopt;
}

/// Online variant of dickson_find. Keeps only the minimal elements seen so
/// far: any later vector that dominates some earlier one also dominates a
/// retained minimal element.
class DicksonTracker {
 public:
  /// Returns the index m of a retained vector dominated by `v`, if any;
  /// otherwise records (index, v).
  std::optional<std::size_t> push(std::size_t index, const LetterVec& v) {
    for (const auto& [m, x] : antichain_)
      if (dominated_by(x, v)) return m;
    std::erase_if(antichain_, [&](const auto& entry) { return dominated_by(v, entry.second); });
    antichain_.emplace_back(index, v);
    return std::nullopt;
  }
  std::size_t retained() const { return antichain_.size(); }

 private:
  std::vector<std::pair<std::size_t, LetterVec>> antichain_;
};

}  // namespace abnet

#pragma once

#include "abnet/numeric.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace abnet {

using LetterId = std::size_t;
using VertexId = std::size_t;
using StateIndex = std::size_t;

/// Letter counts in global alphabet order. Entries may be negative.
using LetterVec = std::vector<Int>;
/// One state index per vertex.
using StateTuple = std::vector<StateIndex>;

struct Emission {
  LetterId letter;
  Int count;
  friend bool operator==(const Emission&, const Emission&) = default;
};
/// Sparse emission vector, sorted by letter, zero counts omitted.
using EmitList = std::vector<Emission>;

struct Letter {
  std::string id;
  VertexId owner;
  std::size_t local;  // position inside the owner's alphabet
};

/// A processor as written by a user or a builder: everything by name except
/// transition targets, which are state indices.
struct ProcessorSpec {
  std::string id;
  std::vector<std::string> alphabet;
  std::vector<std::string> states;
  std::vector<std::vector<StateIndex>> transition;                  // [local letter][state]
  std::vector<std::vector<std::map<std::string, Int>>> emit;        // [local letter][state]
};

class Processor {
 public:
  const std::string& id() const { return id_; }
  const std::vector<LetterId>& letters() const { return letters_; }
  const std::vector<std::string>& states() const { return states_; }
  std::size_t num_states() const { return states_.size(); }
  std::size_t num_letters() const { return letters_.size(); }

  StateIndex next(std::size_t local, StateIndex q) const { return transition_[local][q]; }
  const std::vector<StateIndex>& transition(std::size_t local) const { return transition_[local]; }
  const EmitList& emit(std::size_t local, StateIndex q) const { return emit_[local][q]; }

  std::optional<StateIndex> find_state(const std::string& label) const {
    auto it = std::find(states_.begin(), states_.end(), label);
    if (it == states_.end()) return std::nullopt;
    return static_cast<StateIndex>(it - states_.begin());
  }

 private:
  friend class Network;
  std::string id_;
  std::vector<LetterId> letters_;
  std::vector<std::string> states_;
  std::vector<std::vector<StateIndex>> transition_;
  std::vector<std::vector<EmitList>> emit_;
};

/// The dynamic state x.q of a network.
struct Config {
  LetterVec letters;
  StateTuple state;
  friend bool operator==(const Config&, const Config&) = default;
};

/// Immutable description of a finite abelian network. The global alphabet is
/// the concatenation of the vertex alphabets in vertex order.
class Network {
 public:
  Network() = default;

  /// Throws InvalidArgument on structural defects (unknown letters, partial
  /// transition tables, negative counts, duplicate ids). Commutativity is not
  /// checked here; see validate_abelian().
  Network(std::string name, std::vector<ProcessorSpec> specs,
          std::map<std::string, std::string> initial_state = {})
      : name_(std::move(name)) {
    for (VertexId v = 0; v < specs.size(); ++v) {
      const auto& s = specs[v];
      if (vertex_index_.count(s.id)) throw InvalidArgument("duplicate vertex id '" + s.id + "'");
      vertex_index_.emplace(s.id, v);
      if (s.states.empty()) throw InvalidArgument("vertex '" + s.id + "' has no states");
      for (std::size_t i = 0; i < s.alphabet.size(); ++i) {
        const auto& a = s.alphabet[i];
        if (letter_index_.count(a)) throw InvalidArgument("duplicate letter id '" + a + "'");
        letter_index_.emplace(a, letters_.size());
        letters_.push_back(Letter{a, v, i});
      }
    }
    for (VertexId v = 0; v < specs.size(); ++v) {
      auto& s = specs[v];
      Processor p;
      p.id_ = s.id;
      p.states_ = s.states;
      const std::size_t nq = s.states.size();
      if (s.transition.size() != s.alphabet.size())
        throw InvalidArgument("vertex '" + s.id + "': transition table count does not match alphabet");
      if (!s.emit.empty() && s.emit.size() != s.alphabet.size())
        throw InvalidArgument("vertex '" + s.id + "': emit table count does not match alphabet");
      for (std::size_t i = 0; i < s.alphabet.size(); ++i) {
        p.letters_.push_back(letter_index_.at(s.alphabet[i]));
        const auto& t = s.transition[i];
        if (t.size() != nq)
          throw InvalidArgument("vertex '" + s.id + "': transition for '" + s.alphabet[i] +
                                "' is not total");
        for (auto target : t)
          if (target >= nq)
            throw InvalidArgument("vertex '" + s.id + "': transition for '" + s.alphabet[i] +
                                  "' leaves the state space");
        p.transition_.push_back(t);
        std::vector<EmitList> rows(nq);
        if (!s.emit.empty()) {
          if (s.emit[i].size() != nq)
            throw InvalidArgument("vertex '" + s.id + "': emit for '" + s.alphabet[i] +
                                  "' must list one entry per state");
          for (std::size_t q = 0; q < nq; ++q) {
            for (const auto& [name, count] : s.emit[i][q]) {
              auto it = letter_index_.find(name);
              if (it == letter_index_.end())
                throw InvalidArgument("vertex '" + s.id + "': emit references unknown letter '" + name + "'");
              if (count < 0) throw InvalidArgument("vertex '" + s.id + "': negative emit count");
              if (count != 0) rows[q].push_back(Emission{it->second, count});
            }
            std::sort(rows[q].begin(), rows[q].end(),
                      [](const Emission& x, const Emission& y) { return x.letter < y.letter; });
          }
        }
        p.emit_.push_back(std::move(rows));
      }
      vertices_.push_back(std::move(p));
    }
    initial_.assign(vertices_.size(), 0);
    for (const auto& [vid, label] : initial_state) {
      auto v = find_vertex(vid);
      if (!v) throw InvalidArgument("initial_state names unknown vertex '" + vid + "'");
      auto q = vertices_[*v].find_state(label);
      if (!q) throw InvalidArgument("initial_state: vertex '" + vid + "' has no state '" + label + "'");
      initial_[*v] = *q;
    }
  }

  const std::string& name() const { return name_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_letters() const { return letters_.size(); }
  const Processor& vertex(VertexId v) const { return vertices_.at(v); }
  const std::vector<Processor>& vertices() const { return vertices_; }
  const Letter& letter(LetterId a) const { return letters_.at(a); }
  const std::vector<Letter>& letters() const { return letters_; }
  const StateTuple& initial_state() const { return initial_; }

  std::optional<LetterId> find_letter(const std::string& id) const {
    auto it = letter_index_.find(id);
    if (it == letter_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<VertexId> find_vertex(const std::string& id) const {
    auto it = vertex_index_.find(id);
    if (it == vertex_index_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::string> letter_names() const {
    std::vector<std::string> out;
    for (const auto& l : letters_) out.push_back(l.id);
    return out;
  }

  /// Number of total states, saturating at SIZE_MAX.
  std::size_t state_space_size() const {
    std::size_t n = 1;
    for (const auto& p : vertices_) {
      if (n > SIZE_MAX / p.num_states()) return SIZE_MAX;
      n *= p.num_states();
    }
    return n;
  }

  LetterVec zero_vector() const { return LetterVec(letters_.size(), Int(0)); }
  Config empty_config(StateTuple q) const { return Config{zero_vector(), std::move(q)}; }

  /// Converts back to the authored form (used by restriction and serialization).
  std::vector<ProcessorSpec> to_specs() const {
    std::vector<ProcessorSpec> out;
    for (const auto& p : vertices_) {
      ProcessorSpec s;
      s.id = p.id_;
      s.states = p.states_;
      s.transition = p.transition_;
      for (std::size_t i = 0; i < p.letters_.size(); ++i) {
        s.alphabet.push_back(letters_[p.letters_[i]].id);
        std::vector<std::map<std::string, Int>> rows;
        for (const auto& row : p.emit_[i]) {
          std::map<std::string, Int> m;
          for (const auto& e : row) m[letters_[e.letter].id] = e.count;
          rows.push_back(std::move(m));
        }
        s.emit.push_back(std::move(rows));
      }
      out.push_back(std::move(s));
    }
    return out;
  }

  std::map<std::string, std::string> state_labels(const StateTuple& q) const {
    std::map<std::string, std::string> out;
    for (VertexId v = 0; v < vertices_.size(); ++v) out[vertices_[v].id_] = vertices_[v].states_.at(q.at(v));
    return out;
  }

  /// Underlying directed graph: (v, u) whenever some letter of v can emit a
  /// letter of u.
  std::vector<std::pair<VertexId, VertexId>> edges() const {
    std::vector<std::pair<VertexId, VertexId>> out;
    for (VertexId v = 0; v < vertices_.size(); ++v) {
      std::vector<bool> seen(vertices_.size(), false);
      for (const auto& rows : vertices_[v].emit_)
        for (const auto& row : rows)
          for (const auto& e : row) seen[letters_[e.letter].owner] = true;
      for (VertexId u = 0; u < vertices_.size(); ++u)
        if (seen[u]) out.emplace_back(v, u);
    }
    return out;
  }

  bool is_unary() const {
    return std::all_of(vertices_.begin(), vertices_.end(),
                       [](const Processor& p) { return p.num_letters() == 1; });
  }

 private:
  std::string name_;
  std::vector<Processor> vertices_;
  std::vector<Letter> letters_;
  StateTuple initial_;
  std::unordered_map<std::string, LetterId> letter_index_;
  std::unordered_map<std::string, VertexId> vertex_index_;
};

/// A failure of one of the two pairwise commutation identities.
struct Violation {
  enum class Kind { transition, emission };
  std::string vertex;
  std::string a;
  std::string b;
  std::string state;
  Kind kind;
  friend bool operator==(const Violation&, const Violation&) = default;
};

inline const char* to_string(Violation::Kind k) {
  return k == Violation::Kind::transition ? "transition" : "emission";
}

namespace detail {

inline void add_emission(LetterVec& acc, const EmitList& e) {
  for (const auto& [letter, count] : e) acc[letter] += count;
}

}  // namespace detail

/// Checks t_a t_b = t_b t_a and N(a,q) + N(b,t_a q) = N(b,q) + N(a,t_b q) for
/// every vertex, unordered letter pair and state. Longer words follow from
/// these length-2 exchanges by induction.
inline std::vector<Violation> validate_abelian(const Network& net) {
  std::vector<Violation> out;
  for (const auto& p : net.vertices()) {
    for (std::size_t i = 0; i < p.num_letters(); ++i) {
      for (std::size_t j = i + 1; j < p.num_letters(); ++j) {
        for (StateIndex q = 0; q < p.num_states(); ++q) {
          const auto qa = p.next(i, q);
          const auto qb = p.next(j, q);
          const auto& ai = net.letter(p.letters()[i]).id;
          const auto& bj = net.letter(p.letters()[j]).id;
          if (p.next(i, qb) != p.next(j, qa))
            out.push_back({p.id(), ai, bj, p.states()[q], Violation::Kind::transition});
          LetterVec lhs = net.zero_vector(), rhs = net.zero_vector();
          detail::add_emission(lhs, p.emit(i, q));
          detail::add_emission(lhs, p.emit(j, qa));
          detail::add_emission(rhs, p.emit(j, q));
          detail::add_emission(rhs, p.emit(i, qb));
          if (lhs != rhs) out.push_back({p.id(), ai, bj, p.states()[q], Violation::Kind::emission});
        }
      }
    }
  }
  return out;
}

}  // namespace abnet

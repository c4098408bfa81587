#pragma once

#include "abnet/builders.hpp"
#include "abnet/halting.hpp"

#include <json.hpp>

#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace abnet {

/// Keys are kept sorted, so dump() without indentation is canonical.
using Json = nlohmann::json;

/// Malformed JSON text or a document that does not fit the expected schema.
class ParseError : public Error {
 public:
  using Error::Error;
};

inline Json parse_json_text(const std::string& text, const std::string& origin = "<input>") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

inline std::string canonical_dump(const Json& j) { return j.dump(); }

namespace detail {

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

inline const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) schema_error(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where, std::string("missing field '") + key + "'");
  return *it;
}

inline std::string string_of(const Json& j, const std::string& where) {
  if (!j.is_string()) schema_error(where, "expected a string");
  return j.get<std::string>();
}

inline std::vector<std::string> strings_of(const Json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& s : j) out.push_back(string_of(s, where));
  return out;
}

inline std::map<std::string, std::string> string_map_of(const Json& j, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an object of strings");
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : j.items()) out[k] = string_of(v, where + "." + k);
  return out;
}

}  // namespace detail

/// Integers may be JSON numbers or decimal strings (for values beyond 64 bits).
inline Int int_from_json(const Json& j, const std::string& where = "integer") {
  if (j.is_number_unsigned()) return Int(j.get<std::uint64_t>());
  if (j.is_number_integer()) return Int(j.get<std::int64_t>());
  if (j.is_string()) {
    try {
      return parse_int(j.get<std::string>());
    } catch (const InvalidArgument& e) {
      detail::schema_error(where, e.what());
    }
  }
  detail::schema_error(where, "expected an integer");
}

inline Rational rational_from_json(const Json& j, const std::string& where = "rational") {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const InvalidArgument& e) {
      detail::schema_error(where, e.what());
    }
  }
  return Rational(int_from_json(j, where));
}

/// Plain number when it fits in 64 bits, decimal string otherwise.
inline Json count_to_json(const Int& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
    return Json(v.convert_to<std::int64_t>());
  return Json(v.str());
}

inline Json to_json(const Int& v) { return Json(to_string(v)); }
inline Json to_json(const Rational& v) { return Json(to_string(v)); }

template <class T>
Json to_json(const std::vector<T>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(to_json(x));
  return out;
}

template <class T>
Json to_json(const Matrix<T>& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(to_json(m.row(i)));
  return out;
}

inline IntMatrix int_matrix_from_json(const Json& j, const std::string& where = "matrix") {
  if (!j.is_array()) detail::schema_error(where, "expected an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j[0].size() : 0;
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) detail::schema_error(where, "ragged or malformed row");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = int_from_json(j[i][k], where);
  }
  return m;
}

inline RatMatrix rat_matrix_from_json(const Json& j, const std::string& where = "matrix") {
  if (!j.is_array()) detail::schema_error(where, "expected an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j[0].size() : 0;
  RatMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) detail::schema_error(where, "ragged or malformed row");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = rational_from_json(j[i][k], where);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Network, input and graph documents

inline Network network_from_json(const Json& j) {
  const auto name = detail::string_of(detail::field(j, "name", "network"), "network.name");
  const auto& vs = detail::field(j, "vertices", "network");
  if (!vs.is_array()) detail::schema_error("network.vertices", "expected an array");
  std::vector<ProcessorSpec> specs;
  for (std::size_t v = 0; v < vs.size(); ++v) {
    const std::string where = "network.vertices[" + std::to_string(v) + "]";
    const auto& jv = vs[v];
    ProcessorSpec s;
    s.id = detail::string_of(detail::field(jv, "id", where), where + ".id");
    s.alphabet = detail::strings_of(detail::field(jv, "alphabet", where), where + ".alphabet");
    s.states = detail::strings_of(detail::field(jv, "states", where), where + ".states");
    const auto& jt = detail::field(jv, "transition", where);
    if (!jt.is_object()) detail::schema_error(where + ".transition", "expected an object");
    const Json empty_emit = Json::object();
    const auto& je = jv.contains("emit") ? jv["emit"] : empty_emit;
    if (!je.is_object()) detail::schema_error(where + ".emit", "expected an object");
    for (const auto& key : jt.items())
      if (std::find(s.alphabet.begin(), s.alphabet.end(), key.key()) == s.alphabet.end())
        detail::schema_error(where + ".transition", "letter '" + key.key() + "' is not in the alphabet");
    for (const auto& key : je.items())
      if (std::find(s.alphabet.begin(), s.alphabet.end(), key.key()) == s.alphabet.end())
        detail::schema_error(where + ".emit", "letter '" + key.key() + "' is not in the alphabet");
    for (const auto& a : s.alphabet) {
      const std::string tw = where + ".transition." + a;
      auto it = jt.find(a);
      if (it == jt.end()) detail::schema_error(where + ".transition", "missing letter '" + a + "'");
      if (!it->is_array() || it->size() != s.states.size())
        detail::schema_error(tw, "expected one target index per state");
      std::vector<StateIndex> row;
      for (const auto& t : *it) {
        if (!t.is_number_unsigned() && !(t.is_number_integer() && t.get<std::int64_t>() >= 0))
          detail::schema_error(tw, "expected a nonnegative state index");
        const auto idx = t.get<std::uint64_t>();
        if (idx >= s.states.size()) detail::schema_error(tw, "state index out of range");
        row.push_back(static_cast<StateIndex>(idx));
      }
      s.transition.push_back(std::move(row));

      std::vector<std::map<std::string, Int>> rows(s.states.size());
      if (auto ie = je.find(a); ie != je.end()) {
        const std::string ew = where + ".emit." + a;
        if (!ie->is_array() || ie->size() != s.states.size())
          detail::schema_error(ew, "expected one emission object per state");
        for (std::size_t q = 0; q < s.states.size(); ++q) {
          if (!(*ie)[q].is_object()) detail::schema_error(ew, "expected an object of letter counts");
          for (const auto& [letter, count] : (*ie)[q].items()) rows[q][letter] = int_from_json(count, ew);
        }
      }
      s.emit.push_back(std::move(rows));
    }
    specs.push_back(std::move(s));
  }
  std::map<std::string, std::string> initial;
  if (j.contains("initial_state")) initial = detail::string_map_of(j["initial_state"], "network.initial_state");
  try {
    return Network(name, std::move(specs), std::move(initial));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("network: ") + e.what());
  }
}

inline Json state_to_json(const Network& net, const StateTuple& q) {
  Json out = Json::object();
  for (const auto& [k, v] : net.state_labels(q)) out[k] = v;
  return out;
}

inline Json network_to_json(const Network& net) {
  Json j;
  j["name"] = net.name();
  j["vertices"] = Json::array();
  for (const auto& s : net.to_specs()) {
    Json v;
    v["id"] = s.id;
    v["alphabet"] = s.alphabet;
    v["states"] = s.states;
    v["transition"] = Json::object();
    v["emit"] = Json::object();
    for (std::size_t i = 0; i < s.alphabet.size(); ++i) {
      v["transition"][s.alphabet[i]] = s.transition[i];
      Json rows = Json::array();
      for (const auto& row : s.emit[i]) {
        Json m = Json::object();
        for (const auto& [letter, count] : row)
          if (count != 0) m[letter] = count_to_json(count);
        rows.push_back(std::move(m));
      }
      v["emit"][s.alphabet[i]] = std::move(rows);
    }
    j["vertices"].push_back(std::move(v));
  }
  j["initial_state"] = state_to_json(net, net.initial_state());
  return j;
}

inline Network load_network(const std::string& path) { return network_from_json(read_json_file(path)); }

/// {vertex: label}; vertices not mentioned keep their initial state.
inline StateTuple state_from_json(const Network& net, const Json& j, const std::string& where = "state") {
  StateTuple q = net.initial_state();
  for (const auto& [vid, label] : detail::string_map_of(j, where)) {
    auto v = net.find_vertex(vid);
    if (!v) detail::schema_error(where, "unknown vertex '" + vid + "'");
    auto s = net.vertex(*v).find_state(label);
    if (!s) detail::schema_error(where, "vertex '" + vid + "' has no state '" + label + "'");
    q[*v] = *s;
  }
  return q;
}

/// {letter: count}; omitted letters are zero. Negative counts are rejected.
inline LetterVec letters_from_json(const Network& net, const Json& j, const std::string& where = "letters") {
  if (!j.is_object()) detail::schema_error(where, "expected an object of letter counts");
  LetterVec x = net.zero_vector();
  for (const auto& [letter, count] : j.items()) {
    auto a = net.find_letter(letter);
    if (!a) detail::schema_error(where, "unknown letter '" + letter + "'");
    x[*a] = int_from_json(count, where + "." + letter);
    if (x[*a] < 0) detail::schema_error(where + "." + letter, "letter counts must be nonnegative");
  }
  return x;
}

/// Input document {"state"?: {...}, "letters": {...}}.
inline Config input_from_json(const Network& net, const Json& j) {
  if (!j.is_object()) detail::schema_error("input", "expected an object");
  Config c;
  c.state = j.contains("state") ? state_from_json(net, j["state"], "input.state") : net.initial_state();
  c.letters = j.contains("letters") ? letters_from_json(net, j["letters"], "input.letters") : net.zero_vector();
  return c;
}

inline Json config_to_json(const Network& net, const Config& c) {
  return Json{{"state", state_to_json(net, c.state)}, {"letters", to_json(c.letters)}};
}

inline GraphSpec graph_from_json(const Json& j) {
  GraphSpec g;
  g.vertices = detail::strings_of(detail::field(j, "vertices", "graph"), "graph.vertices");
  const auto& es = detail::field(j, "edges", "graph");
  if (!es.is_array()) detail::schema_error("graph.edges", "expected an array of [from, to] pairs");
  for (const auto& e : es) {
    if (!e.is_array() || e.size() != 2) detail::schema_error("graph.edges", "expected [from, to]");
    g.edges.emplace_back(detail::string_of(e[0], "graph.edges"), detail::string_of(e[1], "graph.edges"));
  }
  if (j.contains("rotor_order")) {
    const auto& ro = j["rotor_order"];
    if (!ro.is_object()) detail::schema_error("graph.rotor_order", "expected an object");
    for (const auto& [v, order] : ro.items()) g.rotor_order[v] = detail::strings_of(order, "graph.rotor_order." + v);
  }
  return g;
}

inline Json graph_to_json(const GraphSpec& g) {
  Json j;
  j["vertices"] = g.vertices;
  j["edges"] = Json::array();
  for (const auto& [from, to] : g.edges) j["edges"].push_back(Json::array({from, to}));
  if (!g.rotor_order.empty()) j["rotor_order"] = g.rotor_order;
  return j;
}

// ---------------------------------------------------------------------------
// Report fragments

inline Json violations_to_json(const std::vector<Violation>& vs) {
  Json out = Json::array();
  for (const auto& v : vs)
    out.push_back({{"vertex", v.vertex}, {"a", v.a}, {"b", v.b}, {"state", v.state}, {"kind", to_string(v.kind)}});
  return out;
}

inline Json pf_to_json(const PfReport& pf) {
  return {{"estimate", pf.lambda},  {"lower", pf.lower},         {"upper", pf.upper},
          {"vector", pf.vector},    {"converged", pf.converged}, {"iterations", pf.iterations}};
}

/// Per-vertex kernel HNF bases over the vertex alphabet, plus periods.
inline Json kernel_to_json(const Network& net, const KernelData& kd) {
  Json vs = Json::array();
  for (VertexId v = 0; v < net.num_vertices(); ++v) {
    const auto& p = net.vertex(v);
    std::vector<std::string> letters;
    for (auto a : p.letters()) letters.push_back(net.letter(a).id);
    vs.push_back({{"vertex", p.id()},
                  {"letters", letters},
                  {"hnf", to_json(kd.vertex_lattices[v].basis())},
                  {"index", to_json(kd.vertex_lattices[v].index())}});
  }
  return vs;
}

inline Json amplifier_to_json(const Network& net, const Amplifier& amp) {
  return {{"x", to_json(amp.x)}, {"state", state_to_json(net, amp.q)}, {"y", to_json(amp.y)}, {"strong", amp.strong}};
}

inline Json toppling_certificate_to_json(const ToppingCertificate& c) {
  Json j{{"leading_minors", to_json(c.minors)}, {"minors_positive", c.minors_positive},
         {"inverse_nonneg", c.inverse_nonneg}};
  if (c.inverse) j["inverse"] = to_json(*c.inverse);
  if (c.witness) j["witness"] = to_json(*c.witness);
  if (c.all_minors_positive) j["all_principal_minors_positive"] = *c.all_minors_positive;
  if (c.semipositive) j["semipositive"] = *c.semipositive;
  return j;
}

inline Json halt_verdict_to_json(const Network& net, const HaltVerdict& hv) {
  Json j{{"halts_all", hv.halts_all}};
  if (const auto* c = std::get_if<ToppingCertificate>(&hv.evidence)) {
    j["certificate"] = toppling_certificate_to_json(*c);
    j["certificate"]["kind"] = "toppling_matrix";
  } else {
    j["certificate"] = amplifier_to_json(net, std::get<Amplifier>(hv.evidence));
    j["certificate"]["kind"] = "strong_amplifier";
  }
  j["pf"] = pf_to_json(hv.pf);
  return j;
}

inline Json local_components_to_json(const Network& net, const ComponentData& cd) {
  Json vs = Json::array();
  for (VertexId v = 0; v < net.num_vertices(); ++v) {
    Json classes = Json::array();
    for (std::size_t c = 0; c < cd.counts[v]; ++c) {
      std::vector<std::string> members;
      for (StateIndex q = 0; q < cd.labels[v].size(); ++q)
        if (cd.labels[v][q] == c) members.push_back(net.vertex(v).states()[q]);
      classes.push_back(members);
    }
    vs.push_back({{"vertex", net.vertex(v).id()}, {"classes", classes}});
  }
  return {{"vertices", vs}, {"total", cd.total()}, {"locally_irreducible", cd.locally_irreducible()}};
}

inline Json strong_components_to_json(const Network& net, const StrongComponentData& sd) {
  auto names = [&](const std::vector<LetterId>& ls) {
    std::vector<std::string> out;
    for (auto a : ls) out.push_back(net.letter(a).id);
    return out;
  };
  Json comps = Json::array();
  for (const auto& c : sd.components)
    comps.push_back({{"letters", names(c.letters)},
                     {"block", to_json(c.block)},
                     {"block_matches", c.block_matches},
                     {"kernel_from_parent", to_json(c.kernel_from_parent.basis())},
                     {"kernel_recomputed", to_json(c.kernel_recomputed.basis())},
                     {"kernel_matches", c.kernel_matches}});
  return {{"components", comps},
          {"block_order", names(sd.block_order)},
          {"permuted_P", to_json(sd.permuted)},
          {"block_triangular", sd.block_triangular}};
}

inline Json input_verdict_to_json(const Network& net, const InputVerdict& iv) {
  Json j{{"rounds", iv.rounds}};
  if (iv.note) j["note"] = *iv.note;
  if (const auto* h = std::get_if<Halts>(&iv.outcome)) {
    j["outcome"] = "halts";
    j["odometer"] = to_json(h->odometer);
    j["final"] = config_to_json(net, h->final);
  } else if (const auto* n = std::get_if<NeverHalts>(&iv.outcome)) {
    j["outcome"] = "never_halts";
    j["odometer"] = to_json(n->odometer);
    j["state"] = state_to_json(net, n->state);
    if (n->reason == NeverHalts::Reason::dickson_pair) {
      j["reason"] = "dickson_pair";
      j["pair"] = {n->pair->first, n->pair->second};
      j["x_m"] = to_json(n->earlier);
      j["x_n"] = to_json(n->later);
    } else {
      j["reason"] = "amplifier_threshold";
    }
  } else {
    j["outcome"] = "inconclusive";
  }
  return j;
}

// ---------------------------------------------------------------------------
// Whole reports

inline Json alphabet_json(const Network& net) { return net.letter_names(); }

/// Periods, kernels, P, D, L, components and the halting verdict at state q.
inline Json analyze_report(const Network& net, const StateTuple& q, bool debug_all_minors = false) {
  const auto r = restrict_to_component(net, q);
  const auto hv = halts_on_all_inputs(net, q, debug_all_minors);
  const auto sd = strong_components(net, q);
  const auto& pd = hv.production;
  Json j;
  j["alphabet"] = alphabet_json(net);
  j["state"] = state_to_json(net, q);
  j["base_state"] = state_to_json(net, pd.base_state);
  j["periods"] = to_json(pd.periods);
  j["kernel_hnf"] = kernel_to_json(r.network, hv.kernel);
  j["P"] = to_json(pd.P);
  j["D"] = to_json(pd.D);
  j["L"] = to_json(pd.L);
  j["local_components"] = local_components_to_json(net, local_components(net));
  j["strong_components"] = strong_components_to_json(net, sd);
  j["block_order"] = j["strong_components"]["block_order"];
  j["halting"] = halt_verdict_to_json(net, hv);
  return j;
}

inline Json components_report(const Network& net, const StateTuple& q) {
  const auto sd = strong_components(net, q);
  Json j;
  j["alphabet"] = alphabet_json(net);
  j["local_components"] = local_components_to_json(net, local_components(net));
  j["strong_components"] = strong_components_to_json(net, sd);
  return j;
}

/// Per-vertex transition monoid summary: size, minimal idempotent, eQ,
/// irreducible classes and the torsor check on each class.
inline Json monoid_report(const Network& net, std::size_t budget = default_monoid_budget()) {
  Json vs = Json::array();
  for (VertexId v = 0; v < net.num_vertices(); ++v) {
    const auto& p = net.vertex(v);
    const auto m = generate_monoid(p, budget);
    const auto rs = recurrent_structure(m);
    std::vector<std::string> e, rec;
    for (StateIndex q = 0; q < p.num_states(); ++q) e.push_back(p.states()[rs.e(q)]);
    for (auto q : rs.recurrent) rec.push_back(p.states()[q]);
    Json classes = Json::array();
    for (std::size_t c = 0; c < rs.num_components; ++c) {
      std::vector<StateIndex> members;
      std::vector<std::string> labels;
      for (StateIndex q = 0; q < p.num_states(); ++q)
        if (rs.component_of[q] == c) {
          members.push_back(q);
          labels.push_back(p.states()[q]);
        }
      const auto t = check_torsor(m, members);
      classes.push_back({{"states", labels},
                         {"torsor",
                          {{"transitive", t.transitive},
                           {"free", t.free},
                           {"faithful", t.faithful},
                           {"group_order", t.group_order},
                           {"orbit_size", t.orbit_size}}}});
    }
    vs.push_back({{"vertex", p.id()},
                  {"monoid_size", m.size()},
                  {"idempotent", e},
                  {"recurrent", rec},
                  {"group_order", rs.group.size()},
                  {"classes", classes}});
  }
  return {{"vertices", vs}};
}

}  // namespace abnet

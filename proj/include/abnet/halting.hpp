#pragma once

#include "abnet/algebra.hpp"
#include "abnet/simplex.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace abnet {

/// Evidence gathered by is_toppling_matrix. The decision is the exact
/// nonnegative-inverse test; the leading minors and the positive witness
/// x = L^-1 1 (with L x = 1) must agree with it.
struct ToppingCertificate {
  std::vector<Rational> minors;  // leading principal minors
  bool minors_positive = false;
  std::optional<RatMatrix> inverse;
  bool inverse_nonneg = false;
  std::optional<std::vector<Rational>> witness;  // x with x > 0 and L x > 0
  std::optional<bool> all_minors_positive;       // debug cross-check
  std::optional<bool> semipositive;              // debug: LP for x >= 0, L x >= 1
};

struct TopplingCheck {
  bool verdict = false;
  ToppingCertificate evidence;
};

inline constexpr std::size_t kAllMinorsLimit = 12;

inline TopplingCheck is_toppling_matrix(const RatMatrix& l, bool debug_all_minors = false) {
  if (!l.square()) throw InvalidArgument("is_toppling_matrix: matrix is not square");
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && l(i, j) > 0)
        throw InvalidArgument("is_toppling_matrix: positive off-diagonal entry at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
  TopplingCheck out;
  auto& ev = out.evidence;
  ev.inverse = inverse(l);
  if (ev.inverse) {
    ev.inverse_nonneg = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) ev.inverse_nonneg = ev.inverse_nonneg && (*ev.inverse)(i, j) >= 0;
  }
  out.verdict = ev.inverse_nonneg;

  ev.minors = leading_principal_minors(l);
  ev.minors_positive = std::all_of(ev.minors.begin(), ev.minors.end(), [](const Rational& m) { return m > 0; });
  if (ev.minors_positive != out.verdict)
    throw InternalInconsistency("toppling conditions disagree: leading minors vs. nonnegative inverse");

  if (out.verdict) {
    const std::vector<Rational> ones(n, Rational(1));
    auto x = (*ev.inverse) * ones;
    if (!std::all_of(x.begin(), x.end(), [](const Rational& v) { return v > 0; }) || l * x != ones)
      throw InternalInconsistency("toppling conditions disagree: L^-1 1 is not a positive witness");
    ev.witness = std::move(x);
  }

  if (debug_all_minors) {
    if (n <= kAllMinorsLimit) {
      const auto all = principal_minors(l);
      ev.all_minors_positive = std::all_of(all.begin(), all.end(), [](const auto& m) { return m.second > 0; });
      if (*ev.all_minors_positive != out.verdict)
        throw InternalInconsistency("toppling conditions disagree: all principal minors vs. nonnegative inverse");
    }
    // x >= 0, L x - s = 1, s >= 0.
    RatMatrix a(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) a(i, j) = l(i, j);
      a(i, n + i) = -1;
    }
    ev.semipositive = find_feasible(a, std::vector<Rational>(n, Rational(1))).has_value();
    if (*ev.semipositive != out.verdict)
      throw InternalInconsistency("toppling conditions disagree: semipositivity vs. nonnegative inverse");
  }
  return out;
}

inline TopplingCheck is_toppling_matrix(const IntMatrix& l, bool debug_all_minors = false) {
  return is_toppling_matrix(to_rational(l), debug_all_minors);
}

/// x.q with x |> q = y.q. Strong when y >= x.
struct Amplifier {
  LetterVec x;
  StateTuple q;
  bool strong = false;
  LetterVec y;
};

/// Runs x |> (0.q) and records y; true iff the state returns to q and y >= x.
inline bool verify_strong_amplifier(const Network& net, Amplifier& amp) {
  if (amp.x.size() != net.num_letters() || !detail::nonnegative(amp.x) || detail::is_zero(amp.x))
    throw InvalidArgument("verify_strong_amplifier: x must be nonnegative and nonzero");
  const auto out = local_action(net, amp.x, amp.q);
  amp.y = out.letters;
  amp.strong = out.state == amp.q && dominated_by(amp.x, amp.y);
  return amp.strong;
}

namespace detail {

/// y >= 0, sum y = 1, (P - I) y >= 0 as an equality system with slacks.
inline std::optional<std::vector<Rational>> amplifier_direction(const RatMatrix& p) {
  const std::size_t n = p.rows();
  RatMatrix a(n + 1, 2 * n);
  std::vector<Rational> b(n + 1, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = p(i, j) - (i == j ? 1 : 0);
    a(i, n + i) = -1;
    a(n, i) = 1;
  }
  b[n] = 1;
  auto sol = find_feasible(a, b);
  if (!sol) return std::nullopt;
  sol->resize(n);
  return sol;
}

}  // namespace detail

/// Strong amplifier for the component network `net` at its locally recurrent
/// state `qhat`, given its production matrix and kernel. Scales the LP
/// direction by the least n that lands in K.
inline Amplifier find_amplifier(const Network& net, const StateTuple& qhat, const RatMatrix& p,
                                const KernelData& kernel) {
  auto dir = detail::amplifier_direction(p);
  if (!dir) throw InternalInconsistency("find_amplifier: no y >= 0 with P y >= y although L is not a toppling matrix");
  Int den = 1;
  for (const auto& v : *dir) den = lcm(den, denominator(v));
  LetterVec base;
  Int g = 0;
  for (const auto& v : *dir) {
    base.push_back(numerator(v * den));
    g = gcd(g, base.back());
  }
  for (auto& v : base) v /= g;
  Int cap = 1;
  for (const auto& o : kernel.group_orders) cap *= o;
  for (Int n = 1; n <= cap; ++n) {
    LetterVec x = base;
    for (auto& v : x) v *= n;
    if (!kernel.contains(net, x)) continue;
    Amplifier amp{std::move(x), qhat, false, {}};
    if (!verify_strong_amplifier(net, amp)) throw InternalInconsistency("find_amplifier: scaled vector is not a strong amplifier");
    return amp;
  }
  throw InternalInconsistency("find_amplifier: no multiple of the direction lies in the kernel");
}

struct HaltVerdict {
  bool halts_all = false;
  std::variant<ToppingCertificate, Amplifier> evidence;
  PfReport pf;
  ProductionData production;
  KernelData kernel;
};

/// Decides halting on all inputs to initial state q: L_q of the local
/// component N_q is a toppling matrix, or else a verified strong amplifier is
/// returned. The floating PF bracket is informational only.
inline HaltVerdict halts_on_all_inputs(const Network& net, const StateTuple& q, bool debug_all_minors = false) {
  const auto r = restrict_to_component(net, q);
  const auto ls = local_structure(r.network);
  HaltVerdict hv;
  hv.kernel = total_kernel(r.network, ls);
  const auto qhat = locally_recurrent(ls, r.project(q));
  hv.production = production_at(r.network, qhat, hv.kernel.periods);
  hv.pf = pf_estimate(hv.production.P);
  auto check = is_toppling_matrix(hv.production.L, debug_all_minors);
  hv.halts_all = check.verdict;
  if (check.verdict) {
    hv.evidence = std::move(check.evidence);
  } else {
    auto amp = find_amplifier(r.network, qhat, hv.production.P, hv.kernel);
    amp.q = r.lift(amp.q);
    hv.evidence = std::move(amp);
  }
  hv.production.base_state = r.lift(qhat);
  return hv;
}

/// Convenience wrapper computing production data and kernel for N_q.
inline Amplifier find_amplifier(const Network& net, const StateTuple& q) {
  const auto r = restrict_to_component(net, q);
  const auto ls = local_structure(r.network);
  const auto kd = total_kernel(r.network, ls);
  const auto qhat = locally_recurrent(ls, r.project(q));
  const auto pd = production_at(r.network, qhat, kd.periods);
  if (is_toppling_matrix(pd.L).verdict) throw InvalidArgument("find_amplifier: the network halts on all inputs");
  auto amp = find_amplifier(r.network, qhat, pd.P, kd);
  amp.q = r.lift(amp.q);
  return amp;
}

inline constexpr std::size_t kDefaultMaxRounds = 10'000;

struct Halts {
  LetterVec odometer;
  Config final;
};

struct NeverHalts {
  enum class Reason { dickson_pair, amplifier_threshold };
  Reason reason;
  std::optional<std::pair<std::size_t, std::size_t>> pair;  // rounds m < n
  LetterVec earlier;   // x_m
  LetterVec later;     // x_n
  StateTuple state;    // q_m = q_n
  LetterVec odometer;  // letters processed so far
};

struct Inconclusive {
  std::size_t rounds;
};

struct InputVerdict {
  std::variant<Halts, NeverHalts, Inconclusive> outcome;
  std::size_t rounds = 0;
  std::optional<std::string> note;

  bool halts() const { return std::holds_alternative<Halts>(outcome); }
  bool never_halts() const { return std::holds_alternative<NeverHalts>(outcome); }
  bool inconclusive() const { return std::holds_alternative<Inconclusive>(outcome); }
};

struct HaltOptions {
  std::size_t max_rounds = kDefaultMaxRounds;
  std::optional<Amplifier> amplifier;
};

/// Iterates x_n.q_n = x_{n-1} |> q_{n-1}. Stops when x_n = 0 (halts), when an
/// earlier round with the same state has x_m <= x_n (never halts), when the
/// odometer reaches a supplied strong amplifier from a locally recurrent
/// start (never halts), or after max_rounds (inconclusive).
inline InputVerdict halt_on_input(const Network& net, const Config& cfg, const HaltOptions& opts = {}) {
  detail::require_dimension(net, cfg.letters, "halt_on_input");
  if (!detail::nonnegative(cfg.letters)) throw InvalidArgument("halt_on_input: negative letter count");
  InputVerdict verdict;

  std::optional<LetterVec> threshold;
  if (opts.amplifier) {
    const auto cd = local_components(net);
    const auto ls = local_structure(net);
    Amplifier amp = *opts.amplifier;
    if (!cd.same_component(amp.q, cfg.state))
      verdict.note = "amplifier ignored: its state lies in a different local component";
    else if (!is_locally_recurrent(ls, cfg.state))
      verdict.note = "amplifier ignored: initial state is not locally recurrent";
    else if (!verify_strong_amplifier(net, amp))
      verdict.note = "amplifier ignored: not a strong amplifier";
    else
      threshold = amp.x;
  }

  LetterVec odometer = net.zero_vector();
  Config cur = cfg;
  if (detail::is_zero(cur.letters)) {
    verdict.outcome = Halts{odometer, cur};
    return verdict;
  }
  std::map<StateTuple, DicksonTracker> history;
  history[cur.state].push(0, cur.letters);
  for (std::size_t round = 1; round <= opts.max_rounds; ++round) {
    const LetterVec x = cur.letters;
    for (std::size_t a = 0; a < x.size(); ++a) odometer[a] += x[a];
    cur = local_action(net, x, cur.state);
    verdict.rounds = round;
    if (detail::is_zero(cur.letters)) {
      verdict.outcome = Halts{odometer, cur};
      return verdict;
    }
    if (auto m = history[cur.state].push(round, cur.letters)) {
      // Recompute x_m by replaying from the start; histories keep only minimal elements.
      Config replay = cfg;
      for (std::size_t k = 0; k < *m; ++k) replay = local_action(net, replay.letters, replay.state);
      verdict.outcome = NeverHalts{NeverHalts::Reason::dickson_pair, std::make_pair(*m, round), replay.letters,
                                   cur.letters, cur.state, odometer};
      return verdict;
    }
    if (threshold && dominated_by(*threshold, odometer)) {
      verdict.outcome = NeverHalts{NeverHalts::Reason::amplifier_threshold, std::nullopt, {}, {}, cur.state, odometer};
      return verdict;
    }
  }
  verdict.outcome = Inconclusive{verdict.rounds};
  return verdict;
}

/// Toppling counts of Topp(L) given the start state and letters processed:
/// vertex v wraps from L_vv - 1 to 0 once per L_vv letters.
inline std::vector<Int> topple_counts(const Network& net, const StateTuple& q, const LetterVec& processed) {
  if (!net.is_unary()) throw InvalidArgument("topple_counts: network is not unary");
  std::vector<Int> out;
  for (VertexId v = 0; v < net.num_vertices(); ++v) {
    const auto a = net.vertex(v).letters()[0];
    out.push_back((Int(q[v]) + processed[a]) / Int(net.vertex(v).num_states()));
  }
  return out;
}

/// Classical non-halting test for toppling networks: with y >= 0, y != 0 and
/// L y <= 0, a legal execution in which every vertex v topples at least y_v
/// times never halts. Undirected or Eulerian graphs take y = 1.
inline bool classic_criteria(const Network& net, const std::vector<Int>& y, const std::vector<Int>& topples) {
  if (!net.is_unary()) throw InvalidArgument("classic_criteria: network is not unary");
  const std::size_t n = net.num_vertices();
  if (y.size() != n || topples.size() != n) throw InvalidArgument("classic_criteria: dimension mismatch");
  if (!detail::nonnegative(y) || detail::is_zero(y)) throw InvalidArgument("classic_criteria: y must be nonnegative and nonzero");
  const auto pd = production_matrix(net, net.initial_state());
  const auto ly = pd.L * y;
  for (const auto& v : ly)
    if (v > 0) throw InvalidArgument("classic_criteria: L y <= 0 does not hold");
  for (std::size_t v = 0; v < n; ++v)
    if (topples[v] < y[v]) return false;
  return true;
}

}  // namespace abnet

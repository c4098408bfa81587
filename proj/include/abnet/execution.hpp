#pragma once

#include "abnet/network.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace abnet {

inline constexpr std::uint64_t kDefaultMaxSteps = 1'000'000;

namespace detail {

inline void require_letter(const Network& net, LetterId a) {
  if (a >= net.num_letters()) throw InvalidArgument("unknown letter id " + std::to_string(a));
}

inline void require_dimension(const Network& net, const LetterVec& v, const char* what) {
  if (v.size() != net.num_letters())
    throw InvalidArgument(std::string(what) + ": vector dimension does not match the alphabet");
}

inline bool nonnegative(const LetterVec& v) {
  return std::all_of(v.begin(), v.end(), [](const Int& c) { return c >= 0; });
}

inline bool is_zero(const LetterVec& v) {
  return std::all_of(v.begin(), v.end(), [](const Int& c) { return c == 0; });
}

/// Processes `count` copies of one letter at a single processor starting in
/// state q, adding the emitted letters to `out`. Long runs are fast-forwarded
/// over the eventual cycle of t_a, so the cost is O(|Q_v|) for any count.
inline StateIndex advance_letter(const Network& net, const Processor& p, std::size_t local,
                                 StateIndex q, const Int& count, LetterVec& out) {
  if (count <= Int(p.num_states())) {
    for (Int k = 0; k < count; ++k) {
      add_emission(out, p.emit(local, q));
      q = p.next(local, q);
    }
    return q;
  }
  // Walk until the first repeated state; prefix[i] is the total emitted by the
  // first i letters.
  std::vector<std::ptrdiff_t> first_visit(p.num_states(), -1);
  std::vector<StateIndex> seq;
  std::vector<LetterVec> prefix{net.zero_vector()};
  StateIndex s = q;
  while (first_visit[s] < 0) {
    first_visit[s] = static_cast<std::ptrdiff_t>(seq.size());
    seq.push_back(s);
    LetterVec next = prefix.back();
    add_emission(next, p.emit(local, s));
    prefix.push_back(std::move(next));
    s = p.next(local, s);
  }
  const auto tail = static_cast<std::size_t>(first_visit[s]);
  const std::size_t period = seq.size() - tail;
  const Int remaining = count - tail;
  const Int full = remaining / period;
  const auto rest = static_cast<std::size_t>(remaining % period);
  for (std::size_t a = 0; a < out.size(); ++a) {
    const Int cycle = prefix[tail + period][a] - prefix[tail][a];
    out[a] += prefix[tail + rest][a] + full * cycle;
  }
  return seq[tail + rest];
}

}  // namespace detail

/// Processes one letter a in place: t_a on its owner, x_a -= 1, and the
/// emission N(a, q) read at the pre-transition state is added.
inline void apply_step(const Network& net, Config& cfg, LetterId a) {
  detail::require_letter(net, a);
  const auto& l = net.letter(a);
  const auto& p = net.vertex(l.owner);
  const StateIndex q = cfg.state[l.owner];
  cfg.letters[a] -= 1;
  detail::add_emission(cfg.letters, p.emit(l.local, q));
  cfg.state[l.owner] = p.next(l.local, q);
}

inline Config step(const Network& net, Config cfg, LetterId a) {
  apply_step(net, cfg, a);
  return cfg;
}

struct WordResult {
  Config config;
  bool legal;
};

/// Executes w left to right. Legal iff each letter was present (count >= 1)
/// right before it was processed.
inline WordResult execute_word(const Network& net, Config cfg, std::span<const LetterId> word) {
  bool legal = true;
  for (auto a : word) {
    detail::require_letter(net, a);
    if (cfg.letters[a] < 1) legal = false;
    apply_step(net, cfg, a);
  }
  return {std::move(cfg), legal};
}

/// pi_y: processes y_a letters a for every a. The result does not depend on
/// order for abelian networks, so each vertex runs its letters in alphabet order.
inline Config execute_counts(const Network& net, Config cfg, const LetterVec& y) {
  detail::require_dimension(net, y, "execute_counts");
  if (!detail::nonnegative(y)) throw InvalidArgument("execute_counts: negative letter count");
  LetterVec produced = net.zero_vector();
  for (VertexId v = 0; v < net.num_vertices(); ++v) {
    const auto& p = net.vertex(v);
    StateIndex q = cfg.state[v];
    for (std::size_t i = 0; i < p.num_letters(); ++i) {
      const LetterId a = p.letters()[i];
      if (y[a] == 0) continue;
      q = detail::advance_letter(net, p, i, q, y[a], produced);
    }
    cfg.state[v] = q;
  }
  for (std::size_t a = 0; a < y.size(); ++a) cfg.letters[a] += produced[a] - y[a];
  return cfg;
}

/// x |> (z.q) = pi_x((x + z).q): add x and process each added letter once.
inline Config local_action(const Network& net, const LetterVec& x, Config cfg) {
  detail::require_dimension(net, x, "local_action");
  if (!detail::nonnegative(x)) throw InvalidArgument("local_action: negative letter count");
  for (std::size_t a = 0; a < x.size(); ++a) cfg.letters[a] += x[a];
  return execute_counts(net, std::move(cfg), x);
}

inline Config local_action(const Network& net, const LetterVec& x, const StateTuple& q) {
  return local_action(net, x, net.empty_config(q));
}

enum class Scheduler {
  round_robin,  // cycle through the alphabet, one letter per visit
  fifo,         // process letters in arrival order
};

struct RunOptions {
  std::uint64_t max_steps = kDefaultMaxSteps;
  Scheduler scheduler = Scheduler::round_robin;
  bool record_trace = false;
};

struct ExecRecord {
  LetterVec odometer;
  Config final;
  std::optional<std::vector<LetterId>> trace;
};

struct BudgetExceeded {
  std::uint64_t steps;
  Config partial;
};

using RunOutcome = std::variant<ExecRecord, BudgetExceeded>;

/// Runs a legal execution until no letters remain or the budget is spent.
inline RunOutcome run_to_completion(const Network& net, Config cfg, const RunOptions& opts = {}) {
  detail::require_dimension(net, cfg.letters, "run_to_completion");
  if (!detail::nonnegative(cfg.letters)) throw InvalidArgument("run_to_completion: negative letter count");
  ExecRecord rec;
  rec.odometer = net.zero_vector();
  if (opts.record_trace) rec.trace.emplace();
  std::uint64_t steps = 0;
  auto process = [&](LetterId a) {
    apply_step(net, cfg, a);
    rec.odometer[a] += 1;
    if (rec.trace) rec.trace->push_back(a);
    ++steps;
  };

  if (opts.scheduler == Scheduler::round_robin) {
    const std::size_t n = net.num_letters();
    std::size_t idle = 0;  // consecutive visits that found nothing
    for (std::size_t a = 0; n > 0 && idle < n; a = (a + 1) % n) {
      if (cfg.letters[a] < 1) {
        ++idle;
        continue;
      }
      if (steps == opts.max_steps) return BudgetExceeded{steps, std::move(cfg)};
      idle = 0;
      process(a);
    }
  } else {
    std::deque<std::pair<LetterId, Int>> queue;
    for (LetterId a = 0; a < net.num_letters(); ++a)
      if (cfg.letters[a] > 0) queue.emplace_back(a, cfg.letters[a]);
    while (!queue.empty()) {
      if (steps == opts.max_steps) return BudgetExceeded{steps, std::move(cfg)};
      const LetterId a = queue.front().first;
      if (--queue.front().second == 0) queue.pop_front();
      const auto& l = net.letter(a);
      for (const auto& e : net.vertex(l.owner).emit(l.local, cfg.state[l.owner]))
        queue.emplace_back(e.letter, e.count);
      process(a);
    }
  }
  rec.final = std::move(cfg);
  return rec;
}

}  // namespace abnet

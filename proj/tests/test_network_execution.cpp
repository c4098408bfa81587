#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace abnet;
namespace fx = fixtures;

namespace {

LetterVec vec(std::initializer_list<long> xs) {
  LetterVec v;
  for (auto x : xs) v.push_back(x);
  return v;
}

std::vector<LetterId> word(const Network& net, const std::string& s) {
  std::vector<LetterId> w;
  for (char c : s) w.push_back(*net.find_letter(std::string(1, c)));
  return w;
}

}  // namespace

TEST(Network, AlphabetIsVertexOrderConcatenation) {
  const auto net = fx::mixed_two_vertex();
  EXPECT_EQ(net.letter_names(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(net.letter(2).owner, 1u);
  EXPECT_EQ(net.letter(1).local, 1u);
}

TEST(Network, RejectsStructuralDefects) {
  using fx::proc;
  EXPECT_THROW(Network("x", {proc("v", {"a"}, 2, {{0, 2}})}), InvalidArgument);  // target out of range
  EXPECT_THROW(Network("x", {proc("v", {"a"}, 2, {{0}})}), InvalidArgument);     // partial table
  EXPECT_THROW(Network("x", {proc("v", {"a"}, 1, {{0}}), proc("v", {"b"}, 1, {{0}})}), InvalidArgument);
  EXPECT_THROW(Network("x", {proc("v", {"a"}, 1, {{0}}), proc("w", {"a"}, 1, {{0}})}), InvalidArgument);
  std::vector<fx::EmitRow> e(1);
  e[0]["zz"] = 1;
  EXPECT_THROW(Network("x", {proc("v", {"a"}, 1, {{0}}, {e})}), InvalidArgument);
  e[0].clear();
  e[0]["a"] = -1;
  EXPECT_THROW(Network("x", {proc("v", {"a"}, 1, {{0}}, {e})}), InvalidArgument);
  EXPECT_THROW(Network("x", {proc("v", {"a"}, 1, {{0}})}, {{"v", "7"}}), InvalidArgument);
}

TEST(Network, InducedEdges) {
  const auto net = fx::mixed_two_vertex();
  EXPECT_EQ(net.edges(), (std::vector<std::pair<VertexId, VertexId>>{{0, 1}, {1, 0}}));
}

TEST(ValidateAbelian, UnaryNetworksAreValid) { EXPECT_TRUE(validate_abelian(fx::ex3()).empty()); }

TEST(ValidateAbelian, IdentityMapsWithoutOutputAreValid) {
  const Network net("id", {fx::proc("v", {"a", "b"}, 2, {{0, 1}, {0, 1}})});
  EXPECT_TRUE(validate_abelian(net).empty());
}

TEST(ValidateAbelian, SwapAgainstConstantFailsAtBothStates) {
  // t_a = swap, t_b = const 0: t_a t_b(0) = 1 but t_b t_a(0) = 0, and
  // t_a t_b(1) = 1 but t_b t_a(1) = 0.
  const Network net("swap", {fx::proc("v", {"a", "b"}, 2, {{1, 0}, {0, 0}})});
  const auto vs = validate_abelian(net);
  ASSERT_EQ(vs.size(), 2u);
  for (const auto& v : vs) {
    EXPECT_EQ(v.kind, Violation::Kind::transition);
    EXPECT_EQ(v.vertex, "v");
  }
  EXPECT_EQ(vs[0].state, "0");
  EXPECT_EQ(vs[1].state, "1");
}

TEST(ValidateAbelian, EmissionOnlyViolation) {
  std::vector<fx::EmitRow> eb(3);
  eb[2]["a"] = 1;
  const Network net("emit", {fx::proc("v", {"a", "b"}, 3, {{0, 0, 0}, {0, 1, 2}}, {std::vector<fx::EmitRow>(3), eb})});
  const auto vs = validate_abelian(net);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].kind, Violation::Kind::emission);
  EXPECT_EQ(vs[0].state, "2");
}

TEST(ValidateAbelian, RandomGeneratedNetworksAreValid) {
  fx::Rng rng(11);
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(validate_abelian(fx::random_network(rng)).empty());
}

TEST(Step, ToppleOnWrap) {
  const auto net = fx::ex3();
  const Config cfg{vec({3, 0, 0}), {2, 0, 0}};
  const auto out = step(net, cfg, 0);
  EXPECT_EQ(out.letters, vec({2, 2, 2}));
  EXPECT_EQ(out.state, (StateTuple{0, 0, 0}));
}

TEST(Step, BelowThresholdNoEmission) {
  const auto net = fx::ex3();
  const auto out = step(net, Config{vec({1, 0, 0}), {0, 0, 0}}, 0);
  EXPECT_EQ(out.letters, vec({0, 0, 0}));
  EXPECT_EQ(out.state, (StateTuple{1, 0, 0}));
}

TEST(Step, ZeroEmitOnlyAdvancesState) {
  const auto net = fx::zero_emit();
  const auto out = step(net, Config{vec({2, 5}), {3}}, 0);
  EXPECT_EQ(out.letters, vec({1, 5}));
  EXPECT_EQ(out.state, (StateTuple{2}));
}

TEST(Step, UnknownLetter) {
  const auto net = fx::ex3();
  EXPECT_THROW(step(net, net.empty_config({0, 0, 0}), 7), InvalidArgument);
}

TEST(ExecuteWord, ThirdStepTopples) {
  const auto net = fx::ex3();
  const auto w = word(net, "aaa");
  const auto r = execute_word(net, Config{vec({3, 0, 0}), {0, 0, 0}}, w);
  EXPECT_TRUE(r.legal);
  EXPECT_EQ(r.config.letters, vec({0, 2, 2}));
}

TEST(ExecuteWord, EmptyWordAndIllegalWord) {
  const auto net = fx::ex3();
  const Config cfg{vec({0, 1, 0}), {1, 2, 3}};
  const auto r = execute_word(net, cfg, {});
  EXPECT_TRUE(r.legal);
  EXPECT_EQ(r.config, cfg);
  const auto w = word(net, "a");
  const auto r2 = execute_word(net, cfg, w);
  EXPECT_FALSE(r2.legal);
  EXPECT_EQ(r2.config.letters[0], -1);
}

TEST(ExecuteCounts, MatchesWordAndRejectsNegative) {
  const auto net = fx::ex3();
  const auto cfg = net.empty_config({0, 0, 0});
  const auto w = word(net, "aaa");
  EXPECT_EQ(execute_counts(net, cfg, vec({3, 0, 0})), execute_word(net, cfg, w).config);
  EXPECT_EQ(execute_counts(net, cfg, vec({0, 0, 0})), cfg);
  EXPECT_THROW(execute_counts(net, cfg, vec({-1, 0, 0})), InvalidArgument);
}

TEST(ExecuteCounts, AgreesWithStepByStepOnLargeCounts) {
  // Exercises the cycle fast-forward against single steps.
  const auto net = fx::rho();
  for (long y = 0; y < 40; ++y) {
    LetterVec x = vec({0});
    StateTuple q{0};
    for (long i = 0; i < y; ++i) oracles::process(net, x, q, 0);
    const auto got = execute_counts(net, net.empty_config({0}), vec({y}));
    EXPECT_EQ(got.letters, x) << y;
    EXPECT_EQ(got.state, q) << y;
  }
}

TEST(ExecuteCounts, ExchangeAndPaddingIdentities) {
  fx::Rng rng(5);
  std::uniform_int_distribution<int> cnt(0, 7);
  for (int i = 0; i < 200; ++i) {
    const auto net = fx::random_network(rng);
    StateTuple q;
    for (VertexId v = 0; v < net.num_vertices(); ++v)
      q.push_back(std::uniform_int_distribution<std::size_t>(0, net.vertex(v).num_states() - 1)(rng));
    LetterVec y, z, x, pad;
    for (std::size_t a = 0; a < net.num_letters(); ++a) {
      y.push_back(cnt(rng));
      z.push_back(cnt(rng));
      x.push_back(cnt(rng) - 3);
      pad.push_back(cnt(rng) - 3);
    }
    const Config cfg{x, q};
    LetterVec yz = y;
    for (std::size_t a = 0; a < yz.size(); ++a) yz[a] += z[a];
    EXPECT_EQ(execute_counts(net, cfg, yz), execute_counts(net, execute_counts(net, cfg, z), y));

    // Against an explicit word.
    std::vector<LetterId> w;
    for (std::size_t a = 0; a < y.size(); ++a)
      for (int k = 0; k < y[a]; ++k) w.push_back(a);
    std::shuffle(w.begin(), w.end(), rng);
    EXPECT_EQ(execute_counts(net, cfg, y), execute_word(net, cfg, w).config);

    Config padded = cfg;
    for (std::size_t a = 0; a < pad.size(); ++a) padded.letters[a] += pad[a];
    auto lhs = execute_counts(net, padded, y);
    auto rhs = execute_counts(net, cfg, y);
    for (std::size_t a = 0; a < pad.size(); ++a) rhs.letters[a] += pad[a];
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(LocalAction, DegreeVectorOnSandK2) {
  const auto net = fx::sand_k2();
  const auto out = local_action(net, vec({1, 1}), StateTuple{0, 0});
  EXPECT_EQ(out.letters, vec({1, 1}));
  EXPECT_EQ(out.state, (StateTuple{0, 0}));
}

TEST(LocalAction, Ex3EachVertexWrapsOnce) {
  const auto net = fx::ex3();
  const auto out = local_action(net, vec({3, 4, 5}), StateTuple{0, 0, 0});
  // Brute force: an explicit word processing 3 a, 4 b, 5 c from (3,4,5).(0,0,0).
  LetterVec x = vec({3, 4, 5});
  StateTuple q{0, 0, 0};
  for (LetterId a = 0; a < 3; ++a)
    for (int k = 0; k < std::vector<int>{3, 4, 5}[a]; ++k) oracles::process(net, x, q, a);
  EXPECT_EQ(out.letters, x);
  EXPECT_EQ(out.state, q);
  // Received letters are minus the off-diagonal row sums of L.
  EXPECT_EQ(out.letters, vec({1, 4, 4}));
}

TEST(LocalAction, ZeroIsIdentityAndAssociative) {
  const auto net = fx::shared_counter();
  const Config cfg{vec({2, -1, 3}), {1, 0}};
  EXPECT_EQ(local_action(net, vec({0, 0, 0}), cfg), cfg);
  const auto x = vec({2, 5, 1}), y = vec({4, 0, 3});
  LetterVec xy = x;
  for (std::size_t a = 0; a < 3; ++a) xy[a] += y[a];
  EXPECT_EQ(local_action(net, xy, cfg), local_action(net, x, local_action(net, y, cfg)));
  EXPECT_THROW(local_action(net, vec({-1, 0, 0}), cfg), InvalidArgument);
}

TEST(RunToCompletion, SingleStepBelowThreshold) {
  const auto net = fx::ex3();
  const auto out = run_to_completion(net, Config{vec({1, 0, 0}), {0, 0, 0}});
  const auto& rec = std::get<ExecRecord>(out);
  EXPECT_EQ(rec.odometer, vec({1, 0, 0}));
  EXPECT_EQ(rec.final.letters, vec({0, 0, 0}));
  EXPECT_EQ(rec.final.state, (StateTuple{1, 0, 0}));
}

TEST(RunToCompletion, ZeroInput) {
  const auto net = fx::ex3();
  const auto rec = std::get<ExecRecord>(run_to_completion(net, net.empty_config({2, 1, 0})));
  EXPECT_EQ(rec.odometer, vec({0, 0, 0}));
}

TEST(RunToCompletion, SandK2ExhaustsAnyBudget) {
  const auto net = fx::sand_k2();
  for (std::uint64_t budget : {1u, 10u, 1000u}) {
    for (auto s : {Scheduler::round_robin, Scheduler::fifo}) {
      const auto out = run_to_completion(net, Config{vec({1, 1}), {0, 0}}, {budget, s, false});
      ASSERT_TRUE(std::holds_alternative<BudgetExceeded>(out));
      EXPECT_EQ(std::get<BudgetExceeded>(out).steps, budget);
    }
  }
}

TEST(RunToCompletion, SchedulersAgreeOnFixtures) {
  for (const auto& f : fx::all()) {
    if (!f.halts) continue;
    LetterVec x(f.net.num_letters(), Int(7));
    const Config cfg{x, f.net.initial_state()};
    const auto rr = run_to_completion(f.net, cfg, {kDefaultMaxSteps, Scheduler::round_robin, true});
    const auto ff = run_to_completion(f.net, cfg, {kDefaultMaxSteps, Scheduler::fifo, false});
    ASSERT_TRUE(std::holds_alternative<ExecRecord>(rr)) << f.name;
    ASSERT_TRUE(std::holds_alternative<ExecRecord>(ff)) << f.name;
    const auto& a = std::get<ExecRecord>(rr);
    const auto& b = std::get<ExecRecord>(ff);
    EXPECT_EQ(a.odometer, b.odometer) << f.name;
    EXPECT_EQ(a.final, b.final) << f.name;
    // The trace replays to the same configuration and is legal.
    const auto replay = execute_word(f.net, cfg, *a.trace);
    EXPECT_TRUE(replay.legal);
    EXPECT_EQ(replay.config, a.final);
  }
}

TEST(RunToCompletion, NegativeInputRejected) {
  const auto net = fx::ex3();
  EXPECT_THROW(run_to_completion(net, Config{vec({-1, 0, 0}), {0, 0, 0}}), InvalidArgument);
}

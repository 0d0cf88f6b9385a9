#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "splitmax/billboard.hpp"
#include "splitmax/combined.hpp"
#include "splitmax/diffusion.hpp"

using namespace splitmax;
using fixtures::HandSpec;

namespace {

SocialGraph graph_of(std::size_t n, const std::vector<fixtures::HandEdge>& edges) {
  std::vector<UserId> nodes;
  for (std::size_t i = 1; i <= n; ++i) nodes.push_back(UserId{std::int64_t(i)});
  std::vector<EdgeRecord> recs;
  for (const auto& e : edges) recs.push_back({UserId{e.src}, UserId{e.dst}, e.p});
  return SocialGraph(nodes, recs);
}

ProblemInstance small(std::size_t slots, std::size_t nodes, std::size_t edges,
                      std::uint64_t seed, double coverage = 0.5) {
  SmallInstanceParams p;
  p.slots = slots;
  p.nodes = nodes;
  p.edges = edges;
  p.coverage = coverage;
  return random_small_instance(p, seed);
}

}  // namespace

// ---- billboard

TEST_CASE("matrix from trajectories") {
  const UserUniverse universe({UserId{1}, UserId{2}});
  const std::vector<Billboard> boards{{BillboardId{1}, {0, 0}, 50.0},
                                      {BillboardId{2}, {5000, 0}, 100.0}};
  SlotSet slots;
  slots.slots.push_back({SlotId{1}, BillboardId{1}, {0, 100}, 1.0});
  slots.slots.push_back({SlotId{2}, BillboardId{2}, {0, 100}, 1.0});
  TrajectoryDB db;
  db.coords = CoordinateSystem::kPlanar;
  db.horizon = {0, 1000};

  SUBCASE("size ratio on the smaller panel") {
    db.records.push_back({UserId{1}, {10, 0}, {20, 30}});
    auto m = build_matrix(db, boards, slots, 100.0, universe);
    REQUIRE(m.row(0).size() == 1);
    CHECK(m.row(0)[0].prob == 0.5);
    CHECK(m.row(1).empty());
  }
  SUBCASE("equal panels give 1") {
    const std::vector<Billboard> same{{BillboardId{1}, {0, 0}, 3.0},
                                      {BillboardId{2}, {5000, 0}, 3.0}};
    db.records.push_back({UserId{2}, {0, 10}, {50, 60}});
    auto m = build_matrix(db, same, slots, 100.0, universe);
    REQUIRE(m.row(0).size() == 1);
    CHECK(m.row(0)[0].user == 1);
    CHECK(m.row(0)[0].prob == 1.0);
  }
  SUBCASE("disjoint in time gives nothing") {
    db.records.push_back({UserId{1}, {10, 0}, {100, 200}});  // slot is [0, 100)
    auto m = build_matrix(db, boards, slots, 100.0, universe);
    CHECK(m.entry_count() == 0);
  }
  SUBCASE("too far gives nothing") {
    db.records.push_back({UserId{1}, {0, 150}, {20, 30}});
    CHECK(build_matrix(db, boards, slots, 100.0, universe).entry_count() == 0);
  }
}

TEST_CASE("influence") {
  const SlotUserMatrix one({{{0, 0.5}}, {{0, 0.5}}, {}}, 1);
  const std::vector<SlotIndex> none, a{0}, ab{0, 1};
  CHECK(influence(one, none) == 0.0);
  CHECK(influence(one, a) == 0.5);
  CHECK(influence(one, ab) == 0.75);
  CHECK(marginal_influence(one, none, 1) == influence(one, std::vector<SlotIndex>{1}));
  CHECK(marginal_influence(one, a, 2) == 0.0);
  CHECK_THROWS_AS(marginal_influence(one, a, 0), std::invalid_argument);

  SUBCASE("matches the per-user product") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto inst = small(6, 4, 0, seed, 0.7);
      const auto& m = inst.matrix();
      for (std::uint32_t mask = 0; mask < 64; ++mask) {
        auto s = fixtures::slots_of(mask);
        CHECK(std::abs(influence(m, s) - fixtures::naive_influence(m, s)) < 1e-12);
        for (SlotIndex c = 0; c < 6; ++c) {
          if (mask >> c & 1) continue;
          auto t = s;
          t.push_back(c);
          CHECK(std::abs(marginal_influence(m, s, c) -
                         (fixtures::naive_influence(m, t) - fixtures::naive_influence(m, s))) <
                1e-12);
        }
      }
    }
  }
}

TEST_CASE("coverage state") {
  auto inst = small(5, 6, 0, 3, 0.6);
  CoverageState cs(inst.matrix());
  std::vector<SlotIndex> chosen;
  for (SlotIndex s : {3u, 0u, 4u}) {
    const double before = fixtures::naive_influence(inst.matrix(), chosen);
    const double g = cs.gain(s);
    cs.add(s);
    chosen.push_back(s);
    CHECK(g == doctest::Approx(fixtures::naive_influence(inst.matrix(), chosen) - before));
    CHECK(cs.value() == doctest::Approx(fixtures::naive_influence(inst.matrix(), chosen)));
  }
  CHECK(cs.contains(0));
  CHECK_FALSE(cs.contains(1));
}

// ---- diffusion

TEST_CASE("probability models") {
  // node 4 has in-degree 4 from the two-hop star
  auto g = graph_of(5, {{1, 4, 1}, {2, 4, 1}, {3, 4, 1}, {5, 4, 1}, {4, 1, 1}});
  auto wc = assign_probabilities(g, WeightedCascade{});
  for (const auto& e : wc.edges()) {
    if (e.dst == 3) CHECK(e.prob == 0.25);
    if (e.dst == 0) CHECK(e.prob == 1.0);
  }
  auto uni = assign_probabilities(g, UniformProbability{0.1});
  for (const auto& e : uni.edges()) CHECK(e.prob == 0.1);

  auto t1 = assign_probabilities(g, Trivalency{7});
  auto t2 = assign_probabilities(g, Trivalency{7});
  CHECK(t1 == t2);
  for (const auto& e : t1.edges()) {
    CHECK((e.prob == 0.1 || e.prob == 0.01 || e.prob == 0.001));
  }
  CHECK_THROWS_AS(parse_probability_model("nope", 0.1, 0), ConfigError);
  CHECK_THROWS_AS(assign_probabilities(g, UniformProbability{0.0}), ConfigError);
}

TEST_CASE("single cascade") {
  auto g = graph_of(3, {{1, 2, 1.0}});
  SimulationStream stream(1, 0);
  CHECK(simulate_once(g, {}, stream).empty());
  const std::vector<NodeId> s0{0}, s2{2};
  CHECK(simulate_once(g, s0, stream) == std::vector<NodeId>{0, 1});
  CHECK(simulate_once(g, s2, stream) == std::vector<NodeId>{2});
}

TEST_CASE("spread estimates") {
  auto path = graph_of(2, {{1, 2, 0.5}});
  const std::vector<NodeId> u{0}, none;

  auto e0 = estimate_spread(path, none, 100, 1);
  CHECK(e0.mean == 0.0);
  CHECK(e0.std_error == 0.0);

  auto iso = graph_of(2, {});
  CHECK(estimate_spread(iso, u, 100, 1).mean == 1.0);

  auto e = estimate_spread(path, u, 10000, 17);
  CHECK(std::abs(e.mean - 1.5) <= 3.0 * e.std_error);
  CHECK(e.std_error > 0.0);

  auto again = estimate_spread(path, u, 10000, 17);
  CHECK(again.mean == e.mean);
}

TEST_CASE("exact spread oracle") {
  const std::vector<NodeId> u{0}, none;
  CHECK(exact_spread(graph_of(2, {{1, 2, 0.5}}), none) == 0.0);
  CHECK(exact_spread(graph_of(2, {{1, 2, 0.5}}), u) == doctest::Approx(1.5).epsilon(1e-15));

  auto cycle = graph_of(3, {{1, 2, 0.5}, {2, 3, 0.5}, {3, 1, 0.5}});
  CHECK(exact_spread(cycle, u) == doctest::Approx(1.75).epsilon(1e-15));

  // both directions on every side; pinned from the live-edge enumeration
  auto tri = graph_of(3, {{1, 2, 0.5}, {2, 1, 0.5}, {2, 3, 0.5}, {3, 2, 0.5},
                          {1, 3, 0.5}, {3, 1, 0.5}});
  CHECK(exact_spread(tri, u) == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(fixtures::naive_spread(tri, {0}) == doctest::Approx(2.25).epsilon(1e-15));

  std::vector<fixtures::HandEdge> many;
  for (int i = 1; i <= 7; ++i) {
    for (int j = 1; j <= 7; ++j) {
      if (i != j && many.size() < 21) many.push_back({i, j, 0.5});
    }
  }
  CHECK_THROWS_AS(exact_spread(graph_of(7, many), u), ConfigError);
}

TEST_CASE("activation probabilities") {
  auto path = graph_of(3, {{1, 2, 0.5}});
  auto exact = exact_activation_probability(path, 0);
  REQUIRE(exact.size() == 2);
  CHECK(exact[0] == std::pair<NodeId, double>{0, 1.0});
  CHECK(exact[1].second == doctest::Approx(0.5));

  auto mc = activation_probability(path, 0, 10000, 3);
  REQUIRE(mc.size() == 2);
  CHECK(mc[0].second == 1.0);
  CHECK(std::abs(mc[1].second - 0.5) <= 3.0 * std::sqrt(0.25 / 10000));
  // unreachable node never appears
  for (auto [v, p] : mc) CHECK(v != 2);
}

TEST_CASE("engines agree with the oracle") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto inst = small(0, 6, 8, seed);
    const auto& g = inst.graph();
    auto engine = make_exact_engine(g);
    for (std::uint32_t mask = 0; mask < 64; ++mask) {
      auto s = fixtures::seeds_of(mask);
      CHECK(engine->spread(s).mean == doctest::Approx(fixtures::naive_spread(g, s)).epsilon(1e-12));
    }
    for (NodeId v = 0; v < g.node_count(); ++v) {
      const auto reach = fixtures::naive_reach(g, {v});
      for (auto [x, p] : *engine->activation(v)) CHECK(p == doctest::Approx(reach[x]));
    }
  }
}

TEST_CASE("spread cursors") {
  auto inst = small(0, 6, 9, 11);
  const auto& g = inst.graph();
  std::vector<std::unique_ptr<SpreadEngine>> engines;
  engines.push_back(make_exact_engine(g));
  engines.push_back(make_monte_carlo_engine(g, 500, 4));
  for (const auto& engine : engines) {
    auto cur = engine->cursor();
    std::vector<NodeId> seeds;
    for (NodeId v : {2u, 5u, 0u}) {
      const double before = engine->spread(seeds).mean;
      const auto gain = cur->gain(v);
      cur->add(v);
      seeds.push_back(v);
      CHECK(gain.mean == doctest::Approx(engine->spread(seeds).mean - before).epsilon(1e-9));
      CHECK(cur->value().mean == doctest::Approx(engine->spread(seeds).mean).epsilon(1e-9));
    }
    auto copy = cur->clone();
    copy->add(1);
    CHECK(cur->value().mean <= copy->value().mean);
  }
}

TEST_CASE("activation cache") {
  auto inst = small(0, 5, 6, 2);
  ActivationCache cache(inst.graph(), 2);
  auto a = cache.get(0, 100, 1);
  auto b = cache.get(0, 100, 1);
  CHECK(a == b);
  CHECK(cache.misses() == 1);
  cache.get(1, 100, 1);
  cache.get(2, 100, 1);
  CHECK(cache.size() == 2);
  cache.get(0, 100, 1);
  CHECK(cache.misses() == 4);
}

// ---- combined

TEST_CASE("interaction effect") {
  const SlotUserMatrix m({{{0, 1.0}}}, 1);
  const UserActivation act{{0, 1.0}};
  const UserActivation* one[] = {&act};
  const std::vector<SlotIndex> s{0}, none;
  CHECK(interaction_effect(m, s, one) == 1.0);
  CHECK(interaction_effect(m, none, one) == 0.0);
  CHECK(interaction_effect(m, s, {}) == 0.0);
}

TEST_CASE("additive bundle") {
  // two slots covering 2 and 4 disjoint users, two seeds reaching 10 and 13
  HandSpec h;
  h.users = 29;
  h.nodes = 23;
  for (int v = 2; v <= 10; ++v) h.edges.push_back({1, v, 1.0});
  for (int v = 12; v <= 23; ++v) h.edges.push_back({11, v, 1.0});
  h.rows = {{{24, 1.0}, {25, 1.0}}, {{26, 1.0}, {27, 1.0}, {28, 1.0}, {29, 1.0}}};
  auto inst = fixtures::build(h);
  auto engine_mc = [&] { return EvalMode::monte_carlo(50, 1); };
  const CombinedModel model(inst, engine_mc(), {true, true, false});
  const std::vector<SlotIndex> s{0, 1};
  const std::vector<NodeId> n{0, 10};
  auto v = model.phi(s, n);
  CHECK(v.billboard == 6.0);
  CHECK(v.social == 23.0);
  CHECK(v.interaction == 0.0);
  CHECK(v.phi == 29.0);
}

TEST_CASE("hand-computed objective") {
  // users 1, 2; edge 1 -> 2 with p = 0.5; slot 1 covers user 1 (0.5) and
  // user 2 (1.0). Seed 1 alone:
  //   I = 0.5 + 1 = 1.5, I_G = 1.5, Psi = 0.5 * 1 + 1 * 0.5 = 1.0
  HandSpec h;
  h.users = 2;
  h.nodes = 2;
  h.edges = {{1, 2, 0.5}};
  h.rows = {{{1, 0.5}, {2, 1.0}}};
  auto inst = fixtures::build(h);
  const CombinedModel model(inst, EvalMode::exact());
  const std::vector<SlotIndex> s{0};
  const std::vector<NodeId> n{0};
  auto v = model.phi(s, n);
  CHECK(v.billboard == doctest::Approx(1.5));
  CHECK(v.social == doctest::Approx(1.5));
  CHECK(v.interaction == doctest::Approx(1.0));
  CHECK(v.phi == doctest::Approx(4.0));
  CHECK(model.phi({}, {}).phi == 0.0);
}

TEST_CASE("objective against the naive oracle") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    auto inst = small(5, 5, 7, seed);
    const CombinedModel model(inst, EvalMode::exact());
    for (std::uint32_t sm = 0; sm < 32; ++sm) {
      for (std::uint32_t nm = 0; nm < 32; nm += 3) {
        auto s = fixtures::slots_of(sm);
        auto n = fixtures::seeds_of(nm);
        auto v = model.phi(s, n);
        auto o = fixtures::naive_phi(inst, s, n);
        CHECK(std::abs(v.billboard - o.billboard) < 1e-12);
        CHECK(std::abs(v.social - o.social) < 1e-12);
        CHECK(std::abs(v.interaction - o.interaction) < 1e-12);
        CHECK(v.phi == doctest::Approx(v.billboard + v.social + v.interaction));
        // bounded by either channel's coverage mass
        CHECK(v.interaction >= 0.0);
        CHECK(v.interaction <= v.billboard + 1e-12);
        CHECK(v.interaction <= fixtures::naive_social_mass(inst, n) + 1e-12);
      }
    }
  }
}

TEST_CASE("marginal phi is the direct difference") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto inst = small(6, 5, 7, seed);
    const CombinedModel model(inst, EvalMode::exact());
    const std::vector<SlotIndex> s{1, 4};
    const std::vector<NodeId> n{2};
    const double base = model.phi(s, n).phi;
    for (SlotIndex c : {0u, 2u, 3u, 5u}) {
      auto t = s;
      t.push_back(c);
      CHECK(std::abs(model.marginal_phi(s, n, Candidate::slot(c)).value -
                     (model.phi(t, n).phi - base)) < 1e-12);
    }
    for (NodeId c : {0u, 1u, 3u, 4u}) {
      auto m = n;
      m.push_back(c);
      CHECK(std::abs(model.marginal_phi(s, n, Candidate::seed(c)).value -
                     (model.phi(s, m).phi - base)) < 1e-12);
    }
    CHECK_THROWS_AS(model.marginal_phi(s, n, Candidate::slot(1)), std::invalid_argument);
    // first element equals its singleton value
    CHECK(model.marginal_phi({}, {}, Candidate::seed(3)).value ==
          doctest::Approx(model.phi({}, std::vector<NodeId>{3}).phi));
  }
}

TEST_CASE("selection state tracks phi") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto inst = small(6, 5, 7, seed);
    const CombinedModel model(inst, EvalMode::exact());
    auto state = model.start();
    for (Candidate c : {Candidate::seed(1), Candidate::slot(2), Candidate::slot(0),
                        Candidate::seed(4), Candidate::slot(5)}) {
      const auto direct = model.marginal_phi(state.slots(), state.seeds(), c);
      double bound = 0.0;
      const auto g = state.gain(c, bound);
      CHECK(g.value == doctest::Approx(direct.value).epsilon(1e-12));
      CHECK(state.gain(c).value == g.value);
      CHECK(bound == doctest::Approx(state.gain_bound(c)));
      CHECK(bound >= g.value - 1e-12);
      state.add(c);
      CHECK(state.contains(c));
      CHECK(state.value().phi ==
            doctest::Approx(model.phi(state.slots(), state.seeds()).phi).epsilon(1e-12));
    }
  }
}

TEST_CASE("gain bounds hold for supersets") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto inst = small(5, 5, 8, seed, 0.7);
    const CombinedModel model(inst, EvalMode::exact());
    auto state = model.start();
    std::vector<double> bounds;
    for (SlotIndex s = 0; s < 5; ++s) bounds.push_back(state.gain_bound(Candidate::slot(s)));
    for (NodeId v = 0; v < 5; ++v) bounds.push_back(state.gain_bound(Candidate::seed(v)));
    state.add(Candidate::slot(0));
    state.add(Candidate::seed(0));
    state.add(Candidate::seed(3));
    for (SlotIndex s = 1; s < 5; ++s) {
      CHECK(state.gain(Candidate::slot(s)).value <= bounds[s] + 1e-12);
    }
    for (NodeId v : {1u, 2u, 4u}) {
      CHECK(state.gain(Candidate::seed(v)).value <= bounds[5 + v] + 1e-12);
    }
  }
}

TEST_CASE("exact mode limits") {
  auto big = small(13, 3, 2, 1);
  CHECK_THROWS_AS(CombinedModel(big, EvalMode::exact()), ConfigError);
  auto dense = small(2, 7, 21, 1);
  CHECK_THROWS_AS(CombinedModel(dense, EvalMode::exact()), ConfigError);
  CHECK_NOTHROW(CombinedModel(dense, EvalMode::monte_carlo(10, 1)));
}

TEST_CASE("monte carlo objective is deterministic and close") {
  auto inst = small(4, 6, 8, 5);
  const CombinedModel mc(inst, EvalMode::monte_carlo(20000, 9));
  const CombinedModel ex(inst, EvalMode::exact());
  const std::vector<SlotIndex> s{0, 2};
  const std::vector<NodeId> n{1, 3};
  auto a = mc.phi(s, n);
  CHECK(a.phi == mc.phi(s, n).phi);
  auto b = ex.phi(s, n);
  CHECK(a.billboard == doctest::Approx(b.billboard).epsilon(1e-12));
  CHECK(std::abs(a.social - b.social) <= 4.0 * a.std_error + 1e-9);
  CHECK(std::abs(a.interaction - b.interaction) < 0.05);
}

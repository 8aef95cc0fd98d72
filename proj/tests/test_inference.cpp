#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sonarfusion/error.hpp"
#include "sonarfusion/inference.hpp"

using namespace sonarfusion;

namespace {

oracle::LabelModel toy_model(double prior = 0.4) {
  oracle::LabelModel m;
  m.readings.push_back({0, 0.9, 0.1, 0.05});
  m.regions.push_back({0, prior, {{0, Symbol::Sector}}});
  m.regions.push_back({1, prior, {{0, Symbol::Arc}}});
  return m;
}

std::vector<bool> observed_mask(const oracle::LabelModel& m, const Evidence& ev, const BayesNetwork& net) {
  std::vector<bool> mask;
  for (const auto& r : m.readings) mask.push_back(ev.leaves.contains(net.reading_nodes(r.id).leaf));
  return mask;
}

void check_against_oracle(const oracle::LabelModel& m, const BayesNetwork& net, const Evidence& ev,
                          const Posterior& post, double tol) {
  const oracle::Marginals want = oracle::enumerate(m, observed_mask(m, ev, net));
  CHECK(post.evidence_probability == doctest::Approx(want.evidence).epsilon(tol));
  for (std::size_t k = 0; k < m.regions.size(); ++k) {
    CHECK(std::abs(post.occupied.at(m.regions[k].id) - want.occupied[k]) <= tol);
  }
}

/// Many regions, each in the cone of many readings: wide elimination clusters.
oracle::LabelModel dense_model(int regions, int readings, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  oracle::LabelModel m;
  for (int r = 0; r < readings; ++r) m.readings.push_back({r, 0.9, 0.1, 0.05});
  for (int k = 0; k < regions; ++k) {
    oracle::LabelModel::Region region{k, 0.3, {}};
    for (int r = 0; r < readings; ++r) {
      const auto u = rng() % 4;
      if (u == 0) region.labels[r] = Symbol::Arc;
      if (u == 1) region.labels[r] = Symbol::Sector;
    }
    m.regions.push_back(std::move(region));
  }
  return m;
}

}  // namespace

TEST_CASE("toy posteriors") {
  const auto m = toy_model();
  const BayesNetwork net = oracle::to_network(m);
  const Evidence ev = Evidence::all_observed(net);
  const double pe = 0.6 * (0.4 * 0.9 + 0.6 * 0.05) + 0.4 * 0.1;
  CHECK(pe == doctest::Approx(0.274).epsilon(1e-12));
  for (const Posterior& post :
       {enumerate_posterior(net, ev), variable_elimination(net, ev)}) {
    CHECK(post.evidence_probability == doctest::Approx(0.274).epsilon(1e-12));
    CHECK(post.occupied.at(1) == doctest::Approx(0.8467).epsilon(1e-4));
    CHECK(post.occupied.at(0) == doctest::Approx(0.1460).epsilon(1e-3));
  }
  CHECK(variable_elimination(net, ev).induced_width == 1);
}

TEST_CASE("deterministic priors") {
  BayesNetwork none = oracle::to_network(toy_model(0.0));
  CHECK(variable_elimination(none, Evidence::all_observed(none)).evidence_probability ==
        doctest::Approx(0.05).epsilon(1e-14));
  // Everything occupied: the sector dominates, giving a dropout.
  BayesNetwork all = oracle::to_network(toy_model(1.0));
  const Posterior p = variable_elimination(all, Evidence::all_observed(all));
  CHECK(p.evidence_probability == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(p.occupied.at(0) == doctest::Approx(1.0));
}

TEST_CASE("variable elimination agrees with enumeration on random networks") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 250; ++trial) {
    const oracle::LabelModel m = oracle::random_model(rng, 12, 6);
    const BayesNetwork net = oracle::to_network(m);
    Evidence ev = Evidence::all_observed(net);
    if (trial % 3 == 0) {
      // Leave some leaves unobserved.
      for (auto it = ev.leaves.begin(); it != ev.leaves.end();) {
        it = rng() & 1U ? ev.leaves.erase(it) : std::next(it);
      }
    }
    CAPTURE(trial);
    check_against_oracle(m, net, ev, variable_elimination(net, ev), 1e-9);
    check_against_oracle(m, net, ev, enumerate_posterior(net, ev), 1e-9);
  }
}

TEST_CASE("query restricts the returned regions") {
  const auto m = toy_model();
  const BayesNetwork net = oracle::to_network(m);
  const Posterior p = variable_elimination(net, Evidence::all_observed(net), {1});
  CHECK(p.occupied.size() == 1);
  CHECK(p.occupied.at(1) == doctest::Approx(0.8467).epsilon(1e-4));
}

TEST_CASE("a region outside every cone keeps its prior") {
  auto m = toy_model();
  m.regions.push_back({7, 0.37, {}});
  const BayesNetwork net = oracle::to_network(m);
  const auto ev = Evidence::all_observed(net);
  CHECK(variable_elimination(net, ev).occupied.at(7) == doctest::Approx(0.37).epsilon(1e-14));
  CHECK(likelihood_weighting(net, ev, 50000, 3).occupied.at(7) == doctest::Approx(0.37).epsilon(0.03));
}

TEST_CASE("impossible evidence and guards") {
  BayesNetwork base = oracle::to_network(toy_model(0.0));
  // Make the empty-cone row impossible.
  std::string text = base.dump();
  const std::string from = "cpt=0.050000000000000003,";
  REQUIRE(text.find(from) != std::string::npos);
  text.replace(text.find(from), from.size(), "cpt=0,");
  const BayesNetwork net = BayesNetwork::parse_dump(text);
  const auto ev = Evidence::all_observed(net);
  CHECK_THROWS_AS(enumerate_posterior(net, ev), InferenceError);
  CHECK_THROWS_AS(variable_elimination(net, ev), InferenceError);
  CHECK_THROWS_AS(likelihood_weighting(net, ev, 1000, 1), InferenceError);

  const BayesNetwork big = oracle::to_network(dense_model(25, 2, 1));
  CHECK_THROWS_AS(enumerate_posterior(big, Evidence::all_observed(big)), InferenceError);

  Evidence bad;
  bad.leaves[net.region_node(0)] = true;
  CHECK_THROWS_AS(variable_elimination(net, bad), InferenceError);
}

TEST_CASE("likelihood weighting") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    const oracle::LabelModel m = oracle::random_model(rng, 10, 5);
    const BayesNetwork net = oracle::to_network(m);
    const auto ev = Evidence::all_observed(net);
    const Posterior exact = variable_elimination(net, ev);
    const Posterior lw = likelihood_weighting(net, ev, 200000, 17);
    CHECK(lw.samples == 200000);
    for (const auto& [id, p] : exact.occupied) CHECK(std::abs(lw.occupied.at(id) - p) <= 0.02);
  }

  const BayesNetwork net = oracle::to_network(toy_model());
  SUBCASE("no evidence gives the prior") {
    const Posterior lw = likelihood_weighting(net, Evidence{}, 100000, 5);
    CHECK(lw.evidence_probability == 1.0);
    CHECK(lw.occupied.at(0) == doctest::Approx(0.4).epsilon(0.03));
  }
  SUBCASE("deterministic per seed and independent of threads") {
    const auto ev = Evidence::all_observed(net);
    const Posterior a = likelihood_weighting(net, ev, 100000, 5, 1);
    const Posterior b = likelihood_weighting(net, ev, 100000, 5, 1);
    const Posterior c = likelihood_weighting(net, ev, 100000, 5, 4);
    const Posterior d = likelihood_weighting(net, ev, 100000, 6, 1);
    CHECK(a.occupied == b.occupied);
    CHECK(a.occupied == c.occupied);
    CHECK(a.evidence_probability == c.evidence_probability);
    CHECK(a.occupied != d.occupied);
  }
  SUBCASE("zero samples") {
    CHECK_THROWS_AS(likelihood_weighting(net, Evidence::all_observed(net), 0, 1), InferenceError);
  }
}

TEST_CASE("infer strategy selection") {
  const BayesNetwork small = oracle::to_network(toy_model());
  InferenceOptions opt;
  CHECK(infer(small, Evidence::all_observed(small), opt).method == Method::VariableElimination);

  const BayesNetwork dense = oracle::to_network(dense_model(120, 40, 2));
  const auto ev = Evidence::all_observed(dense);
  const EliminationPlan plan = plan_elimination(dense, ev);
  REQUIRE(plan.induced_width > 24);
  opt.samples = 20000;
  const Posterior p = infer(dense, ev, opt);
  CHECK(p.method == Method::LikelihoodWeighting);
  CHECK(p.induced_width == plan.induced_width);
  CHECK(p.occupied.size() == 120);

  opt.strategy = Strategy::Exact;
  CHECK_THROWS_AS(infer(dense, ev, opt), InferenceError);
  opt.strategy = Strategy::Sampling;
  CHECK(infer(small, Evidence::all_observed(small), opt).method == Method::LikelihoodWeighting);
}

TEST_CASE("elimination plan") {
  const BayesNetwork net = oracle::to_network(toy_model());
  const EliminationPlan plan = plan_elimination(net, Evidence::all_observed(net));
  // Two roots and two OR-nodes; the observed leaf is instantiated.
  CHECK(plan.order.size() == 4);
  CHECK(plan.induced_width == 1);
  // An unobserved leaf is dropped; its OR-nodes stay.
  const EliminationPlan open = plan_elimination(net, Evidence{});
  CHECK(open.order.size() == 4);
  CHECK(open.induced_width == 1);
}

TEST_CASE("a second arc on the same region corroborates it") {
  oracle::LabelModel m;
  m.readings.push_back({0, 0.9, 0.1, 0.05});
  m.readings.push_back({1, 0.9, 0.1, 0.05});
  m.regions.push_back({0, 0.3, {{0, Symbol::Arc}, {1, Symbol::Arc}}});
  m.regions.push_back({1, 0.3, {{0, Symbol::Arc}}});
  m.regions.push_back({2, 0.3, {{0, Symbol::Sector}, {1, Symbol::Sector}}});
  const BayesNetwork both = oracle::to_network(m);
  const BayesNetwork first = oracle::to_network(m, {true, false});
  const double one = variable_elimination(first, Evidence::all_observed(first)).occupied.at(0);
  const double two = variable_elimination(both, Evidence::all_observed(both)).occupied.at(0);
  CHECK(one > 0.3);
  CHECK(two > one);
  const Posterior p = variable_elimination(both, Evidence::all_observed(both));
  const double pro_r0 = p.node_true[static_cast<std::size_t>(both.reading_nodes(0).pro)];
  CHECK(pro_r0 > 0.9);
}

TEST_CASE("a dropout sector over an arc does not clear it") {
  // Region 0 is on the arc of a true echo and inside the sector of a
  // max-range dropout that crosses it.
  oracle::LabelModel m;
  m.readings.push_back({0, 0.9, 0.1, 0.05});
  m.readings.push_back({1, 0.9, 0.1, 0.05, true});
  m.regions.push_back({0, 0.3, {{0, Symbol::Arc}, {1, Symbol::Sector}}});
  m.regions.push_back({1, 0.3, {{0, Symbol::Arc}}});
  m.regions.push_back({2, 0.3, {{1, Symbol::Sector}}});
  m.regions.push_back({3, 0.3, {{0, Symbol::Sector}, {1, Symbol::Sector}}});
  const BayesNetwork net = oracle::to_network(m);
  const Posterior p = variable_elimination(net, Evidence::all_observed(net));
  check_against_oracle(m, net, Evidence::all_observed(net), p, 1e-12);
  CHECK(p.occupied.at(0) > 0.3);
}

TEST_CASE("overlapping arcs raise the shared region") {
  // Two echoes whose arcs cross: the crossing explains both.
  oracle::LabelModel m;
  m.readings.push_back({1, 0.9, 0.1, 0.05});
  m.readings.push_back({2, 0.9, 0.1, 0.05});
  m.regions.push_back({0, 0.3, {{1, Symbol::Arc}, {2, Symbol::Arc}}});
  m.regions.push_back({1, 0.3, {{1, Symbol::Arc}}});
  m.regions.push_back({2, 0.3, {{2, Symbol::Arc}}});
  m.regions.push_back({3, 0.3, {{1, Symbol::Arc}, {2, Symbol::Sector}}});
  m.regions.push_back({4, 0.3, {{1, Symbol::Sector}, {2, Symbol::Sector}}});
  const BayesNetwork both = oracle::to_network(m);
  const BayesNetwork one = oracle::to_network(m, {true, false});
  const double with = variable_elimination(both, Evidence::all_observed(both)).occupied.at(0);
  const double without = variable_elimination(one, Evidence::all_observed(one)).occupied.at(0);
  CHECK(with - without >= 1e-6);
}

TEST_CASE("an arc inside another reading's sector lowers that reading's arc") {
  // R3's arc lies in S1, which makes R1 look like a dropout.
  oracle::LabelModel m;
  m.readings.push_back({1, 0.9, 0.1, 0.05});
  m.readings.push_back({3, 0.9, 0.1, 0.05});
  m.regions.push_back({0, 0.3, {{1, Symbol::Arc}}});
  m.regions.push_back({1, 0.3, {{1, Symbol::Sector}, {3, Symbol::Arc}}});
  m.regions.push_back({2, 0.3, {{1, Symbol::Sector}}});
  m.regions.push_back({3, 0.3, {{3, Symbol::Arc}}});
  m.regions.push_back({4, 0.3, {{3, Symbol::Sector}}});
  const BayesNetwork with_r3 = oracle::to_network(m);
  const BayesNetwork without_r3 = oracle::to_network(m, {true, false});
  const double with = variable_elimination(with_r3, Evidence::all_observed(with_r3)).occupied.at(0);
  const double without =
      variable_elimination(without_r3, Evidence::all_observed(without_r3)).occupied.at(0);
  CHECK(without - with >= 1e-6);
  // The confirming arc inside S1 makes R1's con chain more likely true.
  const auto con = [](const BayesNetwork& net) {
    return variable_elimination(net, Evidence::all_observed(net))
        .node_true[static_cast<std::size_t>(net.reading_nodes(1).con)];
  };
  CHECK(con(with_r3) > con(without_r3));
  check_against_oracle(m, with_r3, Evidence::all_observed(with_r3),
                       variable_elimination(with_r3, Evidence::all_observed(with_r3)), 1e-12);
}

TEST_CASE("trace output") {
  const BayesNetwork net = oracle::to_network(toy_model());
  const std::string t = variable_elimination(net, Evidence::all_observed(net)).trace();
  CHECK(t.find("method=exact") != std::string::npos);
  CHECK(t.find("induced_width=1") != std::string::npos);
  CHECK(t.find("evidence_prob=") != std::string::npos);
}

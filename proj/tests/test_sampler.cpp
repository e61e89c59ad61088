#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "doctest.h"
#include "feras/graph.hpp"
#include "feras/rng.hpp"
#include "feras/sampler.hpp"
#include "support.hpp"

using namespace feras;

namespace {

// tiny controlled graph: explicit edges, every node train unless listed
Graph tiny_graph(int n, std::vector<std::pair<int, int>> edges,
                 std::vector<int> non_train = {}) {
  Matrix feats(n, 2);
  Matrix labels(n, 2);
  std::vector<Role> roles(n, Role::kTrain);
  for (int v = 0; v < n; ++v) {
    feats(v, 0) = 1.0;
    labels(v, v % 2) = 1.0;
  }
  for (int v : non_train) roles[v] = Role::kVal;
  return make_graph(n, std::move(edges), std::move(feats), std::move(labels),
                    std::move(roles), Task::kSinglelabel);
}

bool sorted_unique(const std::vector<int>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i - 1] >= v[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("all samplers return nonempty sorted unique subsets of the train set") {
  Graph g = testsup::random_graph(80, 0.06, 3, 2, Task::kSinglelabel, 12);
  auto train = g.nodes_with_role(Role::kTrain);
  std::set<int> train_set(train.begin(), train.end());
  Rng rng(derive_seed(900, 0x5a3f));
  std::vector<SamplerConfig> cfgs(5);
  cfgs[0] = {SamplerKind::kNode, 12, 1, 1, 1};
  cfgs[1] = {SamplerKind::kEdge, 1, 9, 1, 1};
  cfgs[2] = {SamplerKind::kRandomWalk, 1, 1, 4, 3};
  cfgs[3] = {SamplerKind::kMultiRandomWalk, 10, 1, 1, 1};
  cfgs[4] = {SamplerKind::kFull, 1, 1, 1, 1};
  for (const auto& cfg : cfgs) {
    for (int rep = 0; rep < 25; ++rep) {
      auto s = sample(g, train, cfg, rng);
      CHECK_FALSE(s.empty());
      CHECK(sorted_unique(s));
      for (int v : s) CHECK(train_set.count(v) == 1);
      switch (cfg.kind) {
        case SamplerKind::kNode: CHECK(s.size() <= 12); break;
        case SamplerKind::kEdge: CHECK(s.size() <= 18); break;
        case SamplerKind::kRandomWalk: CHECK(s.size() <= 16); break;
        case SamplerKind::kMultiRandomWalk: CHECK(s.size() <= 10); break;
        case SamplerKind::kFull: CHECK(s.size() == train.size()); break;
      }
    }
  }
}

TEST_CASE("full sampler returns the deduplicated sorted train set") {
  Graph g = tiny_graph(5, {{0, 1}, {1, 2}});
  Rng rng(1);
  SamplerConfig cfg;
  cfg.kind = SamplerKind::kFull;
  auto s = sample(g, {4, 2, 0, 2}, cfg, rng);
  CHECK(s == std::vector<int>{0, 2, 4});
}

TEST_CASE("node sampler draws with probability proportional to 1 + train degree") {
  // star S4: center weight 4, each leaf weight 2 => p = .4 / .2 / .2 / .2
  Graph g = tiny_graph(4, {{0, 1}, {0, 2}, {0, 3}});
  auto train = g.nodes_with_role(Role::kTrain);
  SamplerConfig cfg;
  cfg.kind = SamplerKind::kNode;
  cfg.node_budget = 1;
  Rng rng(derive_seed(31, 0x5a3f));
  const int T = 20000;
  std::vector<int> hits(4, 0);
  for (int t = 0; t < T; ++t) {
    auto s = sample(g, train, cfg, rng);
    REQUIRE(s.size() == 1);
    hits[s[0]]++;
  }
  auto within = [&](int count, double p) {
    double sd = std::sqrt(T * p * (1 - p));
    return std::abs(count - T * p) < 3.5 * sd;
  };
  CHECK(within(hits[0], 0.4));
  for (int v = 1; v < 4; ++v) CHECK(within(hits[v], 0.2));
}

TEST_CASE("node sampler uses train-restricted degrees, not global ones") {
  // P3 with node 2 held out: the train subgraph is the single edge 0-1,
  // so both train nodes get weight 2 and the draw is uniform. Global
  // degrees would tilt node 1 to 0.6.
  Graph g = tiny_graph(3, {{0, 1}, {1, 2}}, /*non_train=*/{2});
  auto train = g.nodes_with_role(Role::kTrain);
  REQUIRE(train == std::vector<int>{0, 1});
  SamplerConfig cfg;
  cfg.kind = SamplerKind::kNode;
  cfg.node_budget = 1;
  Rng rng(derive_seed(77, 0x5a3f));
  const int T = 20000;
  int ones = 0;
  for (int t = 0; t < T; ++t) ones += sample(g, train, cfg, rng)[0] == 1 ? 1 : 0;
  double sd = std::sqrt(T * 0.25);
  CHECK(std::abs(ones - T * 0.5) < 3.5 * sd);
  CHECK(std::abs(ones - T * 0.6) > 3.5 * sd);  // the wrong model is rejected
}

TEST_CASE("edge sampler picks edges with p proportional to 1/deg(u) + 1/deg(v)") {
  // P4: weights 1.5, 1.0, 1.5 for edges (0,1), (1,2), (2,3)
  Graph g = tiny_graph(4, {{0, 1}, {1, 2}, {2, 3}});
  auto train = g.nodes_with_role(Role::kTrain);
  SamplerConfig cfg;
  cfg.kind = SamplerKind::kEdge;
  cfg.edge_budget = 1;
  Rng rng(derive_seed(41, 0x5a3f));
  const int T = 20000;
  std::map<std::vector<int>, int> hits;
  for (int t = 0; t < T; ++t) hits[sample(g, train, cfg, rng)]++;
  REQUIRE(hits.size() == 3);
  auto within = [&](int count, double p) {
    double sd = std::sqrt(T * p * (1 - p));
    return std::abs(count - T * p) < 3.5 * sd;
  };
  CHECK(within(hits[{0, 1}], 0.375));
  CHECK(within(hits[{1, 2}], 0.25));
  CHECK(within(hits[{2, 3}], 0.375));
}

TEST_CASE("edge sampler on an edgeless train set falls back to node draws") {
  Graph g = tiny_graph(3, {{0, 1}, {1, 2}}, /*non_train=*/{1});
  auto train = g.nodes_with_role(Role::kTrain);  // {0, 2}, no internal edge
  SamplerConfig cfg;
  cfg.kind = SamplerKind::kEdge;
  cfg.edge_budget = 4;
  Rng rng(derive_seed(5, 0x5a3f));
  for (int t = 0; t < 50; ++t) {
    auto s = sample(g, train, cfg, rng);
    CHECK_FALSE(s.empty());
    for (int v : s) CHECK((v == 0 || v == 2));
  }
}

TEST_CASE("random walks stay inside the train-induced subgraph and truncate when stuck") {
  Graph g = tiny_graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}},
                       /*non_train=*/{2, 5});
  auto train = g.nodes_with_role(Role::kTrain);  // {0,1} -- {3,4} two components
  SamplerConfig cfg;
  cfg.kind = SamplerKind::kRandomWalk;
  cfg.roots = 2;
  cfg.depth = 5;
  Rng rng(derive_seed(6, 0x5a3f));
  for (int t = 0; t < 200; ++t) {
    auto s = sample(g, train, cfg, rng);
    for (int v : s) CHECK(g.roles[v] == Role::kTrain);
    CHECK(s.size() <= 4);
  }

  // fully isolated train set: every walk stops at its root immediately
  Graph iso = tiny_graph(4, {{0, 1}, {2, 3}}, /*non_train=*/{1, 3});
  auto iso_train = iso.nodes_with_role(Role::kTrain);  // {0, 2}, edgeless
  for (int t = 0; t < 50; ++t) {
    auto s = sample(iso, iso_train, cfg, rng);
    CHECK(s.size() <= 2);
    for (int v : s) CHECK((v == 0 || v == 2));
  }
}

TEST_CASE("mrw emits exactly node_budget frontier picks") {
  Graph g = testsup::random_graph(40, 0.12, 2, 2, Task::kSinglelabel, 55);
  auto train = g.nodes_with_role(Role::kTrain);
  SamplerConfig cfg;
  cfg.kind = SamplerKind::kMultiRandomWalk;
  cfg.node_budget = 6;
  Rng rng(derive_seed(8, 0x5a3f));
  for (int t = 0; t < 100; ++t) {
    auto s = sample(g, train, cfg, rng);
    CHECK_FALSE(s.empty());
    CHECK(s.size() <= 6);
  }
}

TEST_CASE("sampling is deterministic in the rng stream") {
  Graph g = testsup::random_graph(60, 0.08, 2, 2, Task::kSinglelabel, 70);
  auto train = g.nodes_with_role(Role::kTrain);
  for (SamplerKind kind : {SamplerKind::kNode, SamplerKind::kEdge,
                           SamplerKind::kRandomWalk, SamplerKind::kMultiRandomWalk}) {
    SamplerConfig cfg;
    cfg.kind = kind;
    cfg.node_budget = 8;
    cfg.edge_budget = 6;
    cfg.roots = 3;
    cfg.depth = 2;
    Rng a(derive_seed(123, 0x5a3f, 1)), b(derive_seed(123, 0x5a3f, 1));
    Rng c(derive_seed(123, 0x5a3f, 2));
    bool any_diff = false;
    for (int t = 0; t < 20; ++t) {
      auto sa = sample(g, train, cfg, a);
      CHECK(sa == sample(g, train, cfg, b));
      any_diff |= sa != sample(g, train, cfg, c);
    }
    CHECK(any_diff);
  }
}

TEST_CASE("sampler config validation and kind strings") {
  SamplerConfig cfg;
  cfg.kind = SamplerKind::kNode;
  cfg.node_budget = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.kind = SamplerKind::kEdge;
  cfg.edge_budget = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.kind = SamplerKind::kRandomWalk;
  cfg.roots = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  Graph g = tiny_graph(3, {{0, 1}});
  Rng rng(1);
  CHECK_THROWS_AS(sample(g, {}, SamplerConfig{}, rng), std::invalid_argument);

  for (const char* name : {"node", "edge", "rw", "mrw", "full"})
    CHECK(to_string(sampler_kind_from_string(name)) == name);
  CHECK_THROWS_AS(sampler_kind_from_string("bogus"), std::invalid_argument);
}

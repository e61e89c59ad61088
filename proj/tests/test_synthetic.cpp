#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "feras/matrix.hpp"
#include "feras/synthetic.hpp"

using namespace feras;

namespace {

bool has_edge(const Graph& g, int u, int v) {
  for (int p = g.edges.indptr[u]; p < g.edges.indptr[u + 1]; ++p)
    if (g.edges.indices[p] == v) return true;
  return false;
}

}  // namespace

TEST_CASE("generate_sbm is deterministic per spec and moves with the seed") {
  SyntheticSpec spec;
  spec.blocks = 3;
  spec.nodes_per_block = 25;
  spec.p_in = 0.2;
  spec.p_out = 0.03;
  spec.seed = 5;
  Graph a = generate_sbm(spec);
  Graph b = generate_sbm(spec);
  CHECK(a.edges.indices == b.edges.indices);
  CHECK(max_abs_diff(a.features, b.features) == 0.0);
  CHECK(a.roles == b.roles);

  spec.seed = 6;
  Graph c = generate_sbm(spec);
  CHECK((a.edges.indices != c.edges.indices || a.roles != c.roles));
}

TEST_CASE("p_in=1, p_out=0 yields disjoint cliques with block labels") {
  SyntheticSpec spec;
  spec.blocks = 3;
  spec.nodes_per_block = 8;
  spec.p_in = 1.0;
  spec.p_out = 0.0;
  spec.noise = 0.0;
  Graph g = generate_sbm(spec);
  REQUIRE(g.num_nodes == 24);
  CHECK(g.task == Task::kSinglelabel);
  for (int u = 0; u < g.num_nodes; ++u)
    for (int v = u + 1; v < g.num_nodes; ++v) {
      const bool same_block = u / 8 == v / 8;
      CHECK(has_edge(g, u, v) == same_block);
    }
  for (int v = 0; v < g.num_nodes; ++v) {
    CHECK(g.labels(v, v / 8) == 1.0);
    for (int c = 0; c < g.num_classes(); ++c)
      if (c != v / 8) CHECK(g.labels(v, c) == 0.0);
  }
}

TEST_CASE("noise-free features are the block one-hot signal") {
  SyntheticSpec spec;
  spec.blocks = 5;
  spec.nodes_per_block = 4;
  spec.feature_dim = 3;  // blocks wrap around the feature dim
  spec.noise = 0.0;
  Graph g = generate_sbm(spec);
  for (int v = 0; v < g.num_nodes; ++v)
    for (int c = 0; c < 3; ++c)
      CHECK(g.features(v, c) == ((v / 4) % 3 == c ? 1.0 : 0.0));
}

TEST_CASE("edge frequencies track p_in and p_out") {
  SyntheticSpec spec;
  spec.blocks = 2;
  spec.nodes_per_block = 60;
  spec.p_in = 0.30;
  spec.p_out = 0.10;
  spec.seed = 11;
  Graph g = generate_sbm(spec);
  int within = 0, across = 0;
  for (int u = 0; u < g.num_nodes; ++u)
    for (int p = g.edges.indptr[u]; p < g.edges.indptr[u + 1]; ++p) {
      int v = g.edges.indices[p];
      if (u < v) (u / 60 == v / 60 ? within : across)++;
    }
  const double n_within_pairs = 2 * (60.0 * 59.0 / 2.0);
  const double n_across_pairs = 60.0 * 60.0;
  auto within_band = [](int count, double n, double p) {
    const double sd = std::sqrt(n * p * (1 - p));
    return std::abs(count - n * p) < 3.5 * sd;
  };
  CHECK(within_band(within, n_within_pairs, 0.30));
  CHECK(within_band(across, n_across_pairs, 0.10));
}

TEST_CASE("roles are stratified per block near 0.66/0.10/0.24") {
  SyntheticSpec spec;
  spec.blocks = 4;
  spec.nodes_per_block = 50;
  Graph g = generate_sbm(spec);
  for (int b = 0; b < 4; ++b) {
    int tr = 0, va = 0, te = 0;
    for (int v = b * 50; v < (b + 1) * 50; ++v) {
      switch (g.roles[v]) {
        case Role::kTrain: ++tr; break;
        case Role::kVal: ++va; break;
        case Role::kTest: ++te; break;
      }
    }
    CHECK(tr == 33);  // floor(50 * 0.66)
    CHECK(va == 5);
    CHECK(te == 12);
  }
}

TEST_CASE("custom split fractions are honored per block") {
  SyntheticSpec spec;
  spec.blocks = 2;
  spec.nodes_per_block = 125;
  spec.train_frac = 0.10;
  spec.val_frac = 0.10;
  Graph g = generate_sbm(spec);
  for (int b = 0; b < 2; ++b) {
    int tr = 0, va = 0;
    for (int v = b * 125; v < (b + 1) * 125; ++v) {
      tr += g.roles[v] == Role::kTrain;
      va += g.roles[v] == Role::kVal;
    }
    CHECK(tr == 12);
    CHECK(va == 12);
  }
}

TEST_CASE("spec validation rejects inconsistent parameters") {
  SyntheticSpec spec;
  spec.p_in = 0.1;
  spec.p_out = 0.2;  // denser across than within
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = SyntheticSpec{};
  spec.blocks = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = SyntheticSpec{};
  spec.noise = -0.1;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = SyntheticSpec{};
  spec.p_in = 1.5;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = SyntheticSpec{};
  spec.train_frac = 0.8;
  spec.val_frac = 0.3;  // sums past 1
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

#include "feras/federation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "feras/rng.hpp"

namespace feras {

FederationPlan assign_visibility(const Graph& g, int n_hosts, double pi_private,
                                 std::uint64_t seed, bool exact_split) {
  if (n_hosts < 1) throw std::invalid_argument("assign_visibility: n_hosts must be >= 1");
  if (pi_private < 0.0 || pi_private > 1.0)
    throw std::invalid_argument("assign_visibility: pi_private must be in [0,1]");

  FederationPlan plan;
  plan.n_hosts = n_hosts;
  plan.pi_private = pi_private;
  plan.kappa = (n_hosts - 1.0) / n_hosts * pi_private;
  plan.seed = seed;
  plan.views.resize(n_hosts);
  for (int h = 0; h < n_hosts; ++h) {
    plan.views[h].host_id = h;
    plan.views[h].visible.assign(g.num_nodes, 1);
  }
  if (n_hosts == 1) return plan;  // everything visible to the single host

  Rng rng(derive_seed(seed, /*stream=*/0xfedu));
  const int n_private = static_cast<int>(std::llround(pi_private * g.num_nodes));

  // Fisher-Yates prefix picks the private nodes without replacement
  std::vector<int> perm(g.num_nodes);
  for (int i = 0; i < g.num_nodes; ++i) perm[i] = i;
  for (int i = 0; i < n_private; ++i) {
    const int j = i + static_cast<int>(rng.uniform_int(g.num_nodes - i));
    std::swap(perm[i], perm[j]);
  }

  for (int i = 0; i < n_private; ++i) {
    const int v = perm[i];
    const int owner = exact_split ? i % n_hosts
                                  : static_cast<int>(rng.uniform_int(n_hosts));
    for (int h = 0; h < n_hosts; ++h) plan.views[h].visible[v] = (h == owner) ? 1 : 0;
  }
  return plan;
}

FederationPlan load_visibility_csv(const Graph& g, int n_hosts, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);

  FederationPlan plan;
  plan.n_hosts = n_hosts;
  plan.views.resize(n_hosts);
  for (int h = 0; h < n_hosts; ++h) {
    plan.views[h].host_id = h;
    plan.views[h].visible.assign(g.num_nodes, 0);
  }

  std::string line;
  int v = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (v >= g.num_nodes) throw std::runtime_error(path + ": more lines than nodes");
    std::istringstream ss(line);
    std::string tok;
    bool any = false;
    while (std::getline(ss, tok, ',')) {
      const int h = std::stoi(tok);
      if (h < 0 || h >= n_hosts) throw std::runtime_error(path + ": host id out of range");
      plan.views[h].visible[v] = 1;
      any = true;
    }
    if (!any) throw std::runtime_error(path + ": node " + std::to_string(v) +
                                       " visible to no host");
    ++v;
  }
  if (v != g.num_nodes) throw std::runtime_error(path + ": fewer lines than nodes");

  int n_private = 0;
  for (int u = 0; u < g.num_nodes; ++u) {
    int owners = 0;
    for (int h = 0; h < n_hosts; ++h) owners += plan.views[h].visible[u];
    if (owners == 1) ++n_private;
  }
  plan.pi_private = static_cast<double>(n_private) / g.num_nodes;
  plan.kappa = (n_hosts - 1.0) / n_hosts * plan.pi_private;
  return plan;
}

MaskedInputs mask_inputs(const Subgraph& sg, const HostView& view,
                         const Matrix& features, const Matrix& labels) {
  const int k = sg.size();
  MaskedInputs out;
  out.features = Matrix(k, features.cols);
  out.labels = Matrix(k, labels.cols);
  out.visible.assign(k, 0);
  for (int i = 0; i < k; ++i) {
    const int v = sg.nodes[i];
    if (!view.sees(v)) continue;  // unseen rows stay zero
    out.visible[i] = 1;
    std::copy(features.row_ptr(v), features.row_ptr(v) + features.cols,
              out.features.row_ptr(i));
    std::copy(labels.row_ptr(v), labels.row_ptr(v) + labels.cols, out.labels.row_ptr(i));
  }
  return out;
}

}  // namespace feras

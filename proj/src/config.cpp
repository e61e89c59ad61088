#include "feras/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "feras/federation.hpp"

namespace feras {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }

  ExperimentConfig cfg;
  try {
    if (j.contains("dataset")) {
      const json& d = j.at("dataset");
      if (d.contains("path")) cfg.dataset_path = d.at("path").get<std::string>();
      if (d.contains("synthetic")) {
        cfg.has_synthetic = true;
        const json& s = d.at("synthetic");
        cfg.synthetic.blocks = get_or(s, "blocks", cfg.synthetic.blocks);
        cfg.synthetic.nodes_per_block =
            get_or(s, "nodes_per_block", cfg.synthetic.nodes_per_block);
        cfg.synthetic.p_in = get_or(s, "p_in", cfg.synthetic.p_in);
        cfg.synthetic.p_out = get_or(s, "p_out", cfg.synthetic.p_out);
        cfg.synthetic.feature_dim = get_or(s, "feature_dim", cfg.synthetic.feature_dim);
        cfg.synthetic.noise = get_or(s, "noise", cfg.synthetic.noise);
        cfg.synthetic.train_frac = get_or(s, "train_frac", cfg.synthetic.train_frac);
        cfg.synthetic.val_frac = get_or(s, "val_frac", cfg.synthetic.val_frac);
        cfg.synthetic.seed = get_or(s, "seed", cfg.synthetic.seed);
      }
    }
    if (cfg.dataset_path.empty() && !cfg.has_synthetic)
      throw ConfigError("config: dataset.path or dataset.synthetic is required");
    if (!cfg.dataset_path.empty() && cfg.has_synthetic)
      throw ConfigError("config: dataset.path and dataset.synthetic are exclusive");

    cfg.variant = variant_from_string(get_or<std::string>(j, "variant", "feras"));
    cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir);

    const json t = j.contains("train") ? j.at("train") : json::object();
    cfg.epochs = get_or(t, "epochs", cfg.epochs);
    cfg.n_hosts = get_or(t, "n_hosts", cfg.n_hosts);
    cfg.q = get_or(t, "q", cfg.q);
    cfg.mode = train_mode_from_string(get_or<std::string>(t, "mode", "sequential"));
    cfg.eval_every = get_or(t, "eval_every", cfg.eval_every);
    cfg.seed = get_or(t, "seed", cfg.seed);
    cfg.pi_private = get_or(t, "pi_private", cfg.pi_private);
    cfg.exact_split = get_or(t, "exact_split", cfg.exact_split);
    cfg.visibility_csv = get_or<std::string>(t, "visibility_csv", "");

    const json s = t.contains("sampler") ? t.at("sampler") : json::object();
    cfg.sampler.kind = sampler_kind_from_string(get_or<std::string>(s, "kind", "node"));
    cfg.sampler.node_budget = get_or(s, "node_budget", cfg.sampler.node_budget);
    cfg.sampler.edge_budget = get_or(s, "edge_budget", cfg.sampler.edge_budget);
    cfg.sampler.roots = get_or(s, "roots", cfg.sampler.roots);
    cfg.sampler.depth = get_or(s, "depth", cfg.sampler.depth);

    const json gc = t.contains("gcn") ? t.at("gcn") : json::object();
    if (gc.contains("hidden_dims")) {
      const auto dims = gc.at("hidden_dims").get<std::vector<int>>();
      if (dims.size() != 2) throw ConfigError("config: hidden_dims must be [m2, m3]");
      cfg.hidden1 = dims[0];
      cfg.hidden2 = dims[1];
    }
    cfg.hyper.eta = get_or(gc, "eta", cfg.hyper.eta);
    cfg.hyper.lambda = get_or(gc, "lambda", cfg.hyper.lambda);
    cfg.hyper.loss_kind =
        loss_kind_from_string(get_or<std::string>(gc, "loss_kind", "ce_singlelabel"));
    cfg.p_share = get_or(gc, "p_share_layer", cfg.p_share);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json j;
  if (cfg.has_synthetic) {
    j["dataset"]["synthetic"] = {
        {"blocks", cfg.synthetic.blocks},
        {"nodes_per_block", cfg.synthetic.nodes_per_block},
        {"p_in", cfg.synthetic.p_in},
        {"p_out", cfg.synthetic.p_out},
        {"feature_dim", cfg.synthetic.feature_dim},
        {"noise", cfg.synthetic.noise},
        {"train_frac", cfg.synthetic.train_frac},
        {"val_frac", cfg.synthetic.val_frac},
        {"seed", cfg.synthetic.seed},
    };
  } else {
    j["dataset"]["path"] = cfg.dataset_path;
  }
  j["variant"] = to_string(cfg.variant);
  j["output_dir"] = cfg.output_dir;

  json t;
  t["epochs"] = cfg.epochs;
  t["n_hosts"] = cfg.n_hosts;
  t["q"] = cfg.q;
  t["mode"] = to_string(cfg.mode);
  t["eval_every"] = cfg.eval_every;
  t["seed"] = cfg.seed;
  t["pi_private"] = cfg.pi_private;
  t["exact_split"] = cfg.exact_split;
  if (!cfg.visibility_csv.empty()) t["visibility_csv"] = cfg.visibility_csv;
  t["sampler"] = {
      {"kind", to_string(cfg.sampler.kind)},
      {"node_budget", cfg.sampler.node_budget},
      {"edge_budget", cfg.sampler.edge_budget},
      {"roots", cfg.sampler.roots},
      {"depth", cfg.sampler.depth},
  };
  t["gcn"] = {
      {"hidden_dims", {cfg.hidden1, cfg.hidden2}},
      {"eta", cfg.hyper.eta},
      {"lambda", cfg.hyper.lambda},
      {"loss_kind", to_string(cfg.hyper.loss_kind)},
      {"p_share_layer", cfg.p_share},
  };
  j["train"] = std::move(t);
  return j.dump(2);
}

Graph realize_dataset(const ExperimentConfig& cfg) {
  if (cfg.has_synthetic) return generate_sbm(cfg.synthetic);
  if (!std::filesystem::is_directory(cfg.dataset_path))
    throw ConfigError("config: dataset path not found: " + cfg.dataset_path);
  return load_graph(cfg.dataset_path);
}

TrainConfig make_train_config(const ExperimentConfig& cfg, const Graph& g) {
  TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.n_hosts = cfg.n_hosts;
  tc.q = cfg.q;
  tc.p_share = cfg.p_share;
  tc.hidden1 = cfg.hidden1;
  tc.hidden2 = cfg.hidden2;
  tc.sampler = cfg.sampler;
  tc.hyper = cfg.hyper;
  tc.mode = cfg.mode;
  tc.eval_every = cfg.eval_every;
  tc.seed = cfg.seed;
  tc.plan = cfg.visibility_csv.empty()
                ? assign_visibility(g, cfg.n_hosts, cfg.pi_private, cfg.seed,
                                    cfg.exact_split)
                : load_visibility_csv(g, cfg.n_hosts, cfg.visibility_csv);
  return tc;
}

}  // namespace feras

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "feras/runner.hpp"
#include "feras/synthetic.hpp"

namespace {

// applies the shared --out/--seed/--mode overrides
void apply_overrides(feras::ExperimentConfig& cfg, const std::string& out,
                     std::int64_t seed, const std::string& mode) {
  if (!out.empty()) cfg.output_dir = out;
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (!mode.empty()) cfg.mode = feras::train_mode_from_string(mode);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feras: federated GCN training with shared embeddings"};
  app.require_subcommand(1);

  std::string config_path, out_dir, mode;
  std::int64_t seed = -1;

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic SBM dataset");
  feras::SyntheticSpec spec;
  std::string gen_out = "data/sbm";
  gen->add_option("--blocks", spec.blocks, "number of blocks");
  gen->add_option("--nodes-per-block", spec.nodes_per_block, "nodes per block");
  gen->add_option("--p-in", spec.p_in, "within-block edge probability");
  gen->add_option("--p-out", spec.p_out, "between-block edge probability");
  gen->add_option("--feature-dim", spec.feature_dim, "feature dimension");
  gen->add_option("--noise", spec.noise, "feature noise scale");
  gen->add_option("--train-frac", spec.train_frac, "train split fraction");
  gen->add_option("--val-frac", spec.val_frac, "val split fraction");
  gen->add_option("--seed", spec.seed, "generator seed");
  gen->add_option("--out", gen_out, "output directory");

  // run
  auto* run = app.add_subcommand("run", "train one experiment from a config");
  run->add_option("--config", config_path, "config JSON path")->required();
  run->add_option("--out", out_dir, "override output_dir");
  run->add_option("--seed", seed, "override seed");
  run->add_option("--mode", mode, "override mode (sequential|parallel)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a sensitivity sweep");
  std::string axis = "kappa";
  std::vector<double> values;
  int n_seeds = 3;
  double threshold = 0.8;
  sweep->add_option("--config", config_path, "config JSON path")->required();
  sweep->add_option("--axis", axis, "kappa | q | n_hosts")->required();
  sweep->add_option("--values", values, "axis values")->required()->expected(-1);
  sweep->add_option("--seeds", n_seeds, "seeds per point");
  sweep->add_option("--threshold", threshold, "val F1 threshold for epochs-to-threshold");
  sweep->add_option("--out", out_dir, "override output_dir");
  sweep->add_option("--seed", seed, "override base seed");
  sweep->add_option("--mode", mode, "override mode");

  // certify
  auto* cert = app.add_subcommand("certify", "check the contraction constraints");
  cert->add_option("--config", config_path, "config JSON path")->required();
  cert->add_option("--out", out_dir, "override output_dir");
  cert->add_option("--seed", seed, "override seed");
  cert->add_option("--mode", mode, "override mode");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      feras::write_dataset(feras::generate_sbm(spec), gen_out);
      std::cout << "wrote " << gen_out << '\n';
      return feras::kExitOk;
    }
    feras::ExperimentConfig cfg = feras::load_config(config_path);
    apply_overrides(cfg, out_dir, seed, mode);
    if (run->parsed()) return feras::run_experiment(cfg);
    if (sweep->parsed()) return feras::run_sweep(cfg, axis, values, n_seeds, threshold);
    if (cert->parsed()) return feras::run_certify(cfg);
  } catch (const feras::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return feras::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#include "feras/runner.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "feras/theory.hpp"

namespace feras {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

TrainResult dispatch(const Graph& g, const TrainConfig& tc, Variant variant) {
  return variant == Variant::kFeras ? train(g, tc) : train_baseline(g, tc, variant);
}

void write_summary(const fs::path& path, const ExperimentConfig& cfg,
                   const TrainResult& res) {
  json j;
  j["final_mean_test_f1"] = res.final_mean_test_f1;
  j["wall_seconds"] = res.wall_seconds;
  j["diverged"] = res.diverged;
  if (res.diverged) j["diagnostic"] = res.diagnostic;
  j["config"] = json::parse(serialize_config(cfg));
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << j.dump(2) << '\n';
}

// First eval epoch whose mean val F1 reaches the threshold, or -1.
int epochs_to_threshold(const std::vector<MetricsRecord>& recs, double threshold) {
  for (const auto& r : recs)
    if (r.host == -1 && r.split == Role::kVal && r.f1_micro >= threshold)
      return r.epoch;
  return -1;
}

struct RunStat {
  double f1 = 0.0;
  int reach_epoch = -1;
};

void aggregate(std::vector<double> xs, double& mean, double& ci95) {
  const int n = static_cast<int>(xs.size());
  mean = 0.0;
  ci95 = 0.0;
  if (n == 0) return;
  for (double x : xs) mean += x;
  mean /= n;
  if (n < 2) return;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= n - 1;
  ci95 = 1.96 * std::sqrt(var / n);
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  const Graph g = realize_dataset(cfg);
  const TrainConfig tc = make_train_config(cfg, g);
  const TrainResult res = dispatch(g, tc, cfg.variant);

  fs::create_directories(cfg.output_dir);
  write_metrics_csv((fs::path(cfg.output_dir) / "metrics.csv").string(), res.metrics);
  write_summary(fs::path(cfg.output_dir) / "summary.json", cfg, res);
  if (res.diverged) {
    std::cerr << "diverged: " << res.diagnostic << '\n';
    return kExitDiverged;
  }
  return kExitOk;
}

int run_sweep(const ExperimentConfig& cfg, const std::string& axis,
              const std::vector<double>& values, int n_seeds, double f1_threshold) {
  if (values.empty()) throw ConfigError("sweep: no axis values");
  if (n_seeds < 1) throw ConfigError("sweep: n_seeds must be >= 1");
  if (axis != "kappa" && axis != "q" && axis != "n_hosts")
    throw ConfigError("sweep: axis must be kappa, q or n_hosts");

  const Variant variants[] = {Variant::kFeras, Variant::kIsolated,
                              Variant::kShareWeightsOnly};
  fs::create_directories(fs::path(cfg.output_dir) / "runs");

  std::ofstream sweep_csv(fs::path(cfg.output_dir) / "sweep.csv");
  sweep_csv << "axis,value,variant,n_seeds,mean_f1,ci95_f1,n_reached,"
               "mean_epochs_to_threshold,ci95_epochs_to_threshold\n";

  int rc = kExitOk;
  char buf[64];
  for (double value : values) {
    for (Variant variant : variants) {
      std::vector<double> f1s, reach;
      for (int s = 0; s < n_seeds; ++s) {
        ExperimentConfig run_cfg = cfg;
        run_cfg.variant = variant;
        run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(s);
        if (axis == "kappa") {
          if (run_cfg.n_hosts < 2 && value != 0.0)
            throw ConfigError("sweep: kappa > 0 needs n_hosts >= 2");
          run_cfg.pi_private =
              run_cfg.n_hosts < 2
                  ? 0.0
                  : value * run_cfg.n_hosts / (run_cfg.n_hosts - 1);
        } else if (axis == "q") {
          run_cfg.q = static_cast<int>(value);
        } else {
          run_cfg.n_hosts = static_cast<int>(value);
        }
        std::snprintf(buf, sizeof buf, "%g", value);
        run_cfg.output_dir =
            (fs::path(cfg.output_dir) / "runs" /
             (axis + "=" + buf + "_" + to_string(variant) + "_seed" +
              std::to_string(run_cfg.seed)))
                .string();
        const int code = run_experiment(run_cfg);
        if (code != kExitOk) rc = code;

        // re-read what run_experiment wrote so aggregates provably derive
        // from the raw per-run outputs
        std::ifstream sj(fs::path(run_cfg.output_dir) / "summary.json");
        json summary = json::parse(sj);
        f1s.push_back(summary.at("final_mean_test_f1").get<double>());

        std::ifstream mc(fs::path(run_cfg.output_dir) / "metrics.csv");
        std::vector<MetricsRecord> recs;
        std::string line;
        std::getline(mc, line);  // header
        while (std::getline(mc, line)) {
          MetricsRecord r{};
          char host[16], split[16];
          if (std::sscanf(line.c_str(), "%d,%15[^,],%15[^,],%lf,%lf", &r.epoch, host,
                          split, &r.f1_micro, &r.loss) != 5)
            continue;
          r.host = std::string(host) == "mean" ? -1 : std::atoi(host);
          r.split = std::string(split) == "train"
                        ? Role::kTrain
                        : (std::string(split) == "val" ? Role::kVal : Role::kTest);
          recs.push_back(r);
        }
        const int e = epochs_to_threshold(recs, f1_threshold);
        if (e >= 0) reach.push_back(e);
      }
      double mean_f1, ci_f1, mean_e, ci_e;
      aggregate(f1s, mean_f1, ci_f1);
      aggregate(reach, mean_e, ci_e);
      std::snprintf(buf, sizeof buf, "%g", value);
      sweep_csv << axis << ',' << buf << ',' << to_string(variant) << ',' << n_seeds
                << ',';
      std::snprintf(buf, sizeof buf, "%.17g", mean_f1);
      sweep_csv << buf << ',';
      std::snprintf(buf, sizeof buf, "%.17g", ci_f1);
      sweep_csv << buf << ',' << reach.size() << ',';
      std::snprintf(buf, sizeof buf, "%.17g", mean_e);
      sweep_csv << buf << ',';
      std::snprintf(buf, sizeof buf, "%.17g", ci_e);
      sweep_csv << buf << '\n';
    }
  }
  return rc;
}

int run_certify(const ExperimentConfig& cfg) {
  try {
    const Graph g = realize_dataset(cfg);
    const TrainConfig tc = make_train_config(cfg, g);
    Rng rng(derive_seed(cfg.seed, 0xce27u));
    const FixedInstance inst = make_fixed_instance(g, tc, rng);
    const ModelParams at = random_nonneg_params(g.feature_dim(), tc.hidden1,
                                                tc.hidden2, g.num_classes(), 0.1, rng);

    // stacked linear-regime pushes, for the B1/M2 terms
    int total = 0;
    for (const auto& sg : inst.sgs) total += sg.size();
    Matrix x_hat(total, tc.hidden1);
    for (std::size_t n = 0; n < inst.sgs.size(); ++n) {
      ForwardTape tape;
      const Matrix e = forward_pre(at, inst.sgs[n].norm_adj, inst.mis[n].features,
                                   inst.p_share, tape);
      for (int i = 0; i < e.rows; ++i) {
        if (!inst.mis[n].visible[i]) continue;
        for (int c = 0; c < e.cols; ++c)
          x_hat(inst.block_offset[n] + i, c) = e(i, c);
      }
    }

    json hosts = json::array();
    for (std::size_t n = 0; n < inst.sgs.size(); ++n) {
      const int off = inst.block_offset[n];
      const int k = inst.sgs[n].size();
      Matrix others = x_hat;
      for (int i = 0; i < k; ++i)
        for (int c = 0; c < others.cols; ++c) others(off + i, c) = 0.0;

      const LinearizationPack pack = build_linearization(
          inst.sgs[n], inst.thetas[n], off, inst.mis[n].features, at, &others);
      const ConstraintReport rep = certify(pack, tc.hyper);

      std::vector<double> theta_star(k);
      for (int i = 0; i < k; ++i) theta_star[i] = inst.thetas[n](i, off + i);
      const SharedPlainComparison cmp =
          compare_shared_vs_plain(inst.sgs[n], theta_star, inst.mis[n].features);

      json h;
      h["host"] = static_cast<int>(n);
      h["subgraph_nodes"] = k;
      h["rho_m1"] = rep.rho_m1;
      h["rho_m2"] = rep.rho_m2;
      h["lambda"] = rep.lambda;
      h["c_star"] = rep.c_star;
      h["eta"] = rep.eta;
      h["eta_max"] = rep.eta_max;
      h["rho_m1_bound"] = rep.rho_m1_bound;
      h["rho_ok"] = rep.rho_ok;
      h["eta_ok"] = rep.eta_ok;
      h["satisfied"] = rep.rho_ok && rep.eta_ok;
      h["contraction_constant"] = rep.contraction_constant;
      h["rho_shared"] = cmp.rho_shared;
      h["rho_plain"] = cmp.rho_plain;
      h["connected"] = cmp.connected;
      hosts.push_back(std::move(h));
    }

    json out;
    out["hosts"] = std::move(hosts);
    out["instance"] = json::parse(serialize_config(cfg));
    fs::create_directories(cfg.output_dir);
    std::ofstream os(fs::path(cfg.output_dir) / "certify.json");
    os << out.dump(2) << '\n';
    return kExitOk;
  } catch (const SizeGuardError& e) {
    std::cerr << e.what() << '\n';
    return kExitSizeGuard;
  }
}

}  // namespace feras

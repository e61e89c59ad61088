#include "feras/theory.hpp"

#include <cmath>
#include <stdexcept>

#include "feras/aggregator.hpp"
#include "feras/kernels.hpp"
#include "feras/rng.hpp"
#include "feras/sampler.hpp"

namespace feras {

using kernels::gemm;
using kernels::gemm_nt;
using kernels::gemm_tn;
using kernels::spmm;

std::vector<double> vec(const Matrix& m) {
  std::vector<double> v(static_cast<std::size_t>(m.rows) * m.cols);
  for (int j = 0; j < m.cols; ++j)
    for (int i = 0; i < m.rows; ++i) v[static_cast<std::size_t>(j) * m.rows + i] = m(i, j);
  return v;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows * b.rows, a.cols * b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) {
      const double aij = a(i, j);
      if (aij == 0.0) continue;
      for (int k = 0; k < b.rows; ++k)
        for (int l = 0; l < b.cols; ++l)
          out(i * b.rows + k, j * b.cols + l) = aij * b(k, l);
    }
  return out;
}

namespace {

constexpr int kSizeGuard = 2000;

Matrix csr_to_dense(const Csr& a) {
  Matrix d(a.n_rows, a.n_cols);
  for (int i = 0; i < a.n_rows; ++i)
    for (int p = a.indptr[i]; p < a.indptr[i + 1]; ++p) d(i, a.indices[p]) = a.values[p];
  return d;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  return t;
}

Matrix identity(int n) {
  Matrix id(n, n);
  for (int i = 0; i < n; ++i) id(i, i) = 1.0;
  return id;
}

}  // namespace

LinearizationPack build_linearization(const Subgraph& sg, const Matrix& theta,
                                      int block_offset, const Matrix& x,
                                      const ModelParams& params,
                                      const Matrix* x_hat_others) {
  const int k = static_cast<int>(sg.nodes.size());
  const int m1 = params.w1.rows, m2 = params.w1.cols, m3 = params.w2.cols;
  if (theta.rows != k || x.rows != k || x.cols != m1)
    throw std::invalid_argument("build_linearization: shape mismatch");
  if (block_offset < 0 || block_offset + k > theta.cols)
    throw std::invalid_argument("build_linearization: bad block offset");
  if (k * m3 > kSizeGuard || m1 * m2 > kSizeGuard || m2 * m3 > kSizeGuard ||
      theta.cols > kSizeGuard)
    throw SizeGuardError("build_linearization: instance exceeds dense size guard");

  LinearizationPack pack;
  const Matrix adj = csr_to_dense(sg.norm_adj);
  const Matrix ax = gemm(adj, x);  // A x, reused by both cores

  // Theta E_n: the host's own-block columns
  Matrix theta_own(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) theta_own(i, j) = theta(i, block_offset + j);

  pack.m_core = gemm(adj, gemm(theta_own, ax));
  pack.m_plain_core = gemm(adj, ax);
  pack.m1 = kron(transpose(params.w2), pack.m_core);
  pack.b1.assign(static_cast<std::size_t>(k) * m3, 0.0);

  // x_tilde = Theta x_hat with the own block filled by this host's own
  // linear-regime push A x w1
  Matrix x_hat(theta.cols, m2);
  if (x_hat_others) {
    if (x_hat_others->rows != theta.cols || x_hat_others->cols != m2)
      throw std::invalid_argument("build_linearization: x_hat_others shape mismatch");
    x_hat = *x_hat_others;
    const std::vector<double> b1_mat = vec(gemm(adj, gemm(gemm(theta, x_hat), params.w2)));
    pack.b1 = b1_mat;
  }
  const Matrix own_push = gemm(ax, params.w1);
  for (int i = 0; i < k; ++i)
    for (int c = 0; c < m2; ++c) x_hat(block_offset + i, c) += own_push(i, c);
  const Matrix x_tilde = gemm(theta, x_hat);
  pack.m2 = kron(identity(m3), gemm(adj, x_tilde));
  return pack;
}

double spectral_radius(const Matrix& sym_psd) {
  if (sym_psd.rows != sym_psd.cols)
    throw std::invalid_argument("spectral_radius: matrix not square");
  const int n = sym_psd.rows;
  double scale = 0.0;
  for (double v : sym_psd.data) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(sym_psd(i, j) - sym_psd(j, i)) > 1e-12 * std::max(1.0, scale))
        throw std::invalid_argument("spectral_radius: matrix not symmetric");
  if (scale == 0.0) return 0.0;

  Rng rng(0x9e3779b97f4a7c15ULL);
  Matrix v(n, 1);
  for (double& x : v.data) x = rng.uniform(-1.0, 1.0);

  double lambda_prev = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Matrix av = gemm(sym_psd, v);
    double norm = 0.0;
    for (double x : av.data) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;  // start vector hit the null space
    for (double& x : av.data) x /= norm;
    double lambda = 0.0;  // Rayleigh quotient v^T A v
    {
      Matrix av2 = gemm(sym_psd, av);
      for (int i = 0; i < n; ++i) lambda += av.data[i] * av2.data[i];
    }
    v = std::move(av);
    if (it > 0 && std::abs(lambda - lambda_prev) < 1e-12 * std::max(1.0, std::abs(lambda)))
      return lambda;
    lambda_prev = lambda;
  }
  return lambda_prev;
}

ConstraintReport certify(const LinearizationPack& pack, const Hyper& hyper) {
  hyper.validate();
  ConstraintReport r;
  r.rho_m1 = spectral_radius(gemm_tn(pack.m1, pack.m1));
  r.rho_m2 = spectral_radius(gemm_tn(pack.m2, pack.m2));
  r.lambda = hyper.lambda;
  r.c_star = hyper.c_star();
  r.eta = hyper.eta;
  r.eta_max = 4.0 / (2.0 * r.c_star * r.rho_m2 + 3.0 * r.lambda);
  r.rho_m1_bound = r.lambda / (2.0 * r.c_star);
  r.rho_ok = r.rho_m1 <= r.rho_m1_bound;
  r.eta_ok = r.eta <= r.eta_max;
  r.contraction_constant = 1.0 - r.eta * r.lambda / 2.0;
  return r;
}

SharedPlainComparison compare_shared_vs_plain(const Subgraph& sg,
                                              const std::vector<double>& theta_star,
                                              const Matrix& x) {
  const int k = static_cast<int>(sg.nodes.size());
  if (static_cast<int>(theta_star.size()) != k || x.rows != k)
    throw std::invalid_argument("compare_shared_vs_plain: shape mismatch");
  if (k * std::max(x.cols, 1) > kSizeGuard)
    throw SizeGuardError("compare_shared_vs_plain: instance exceeds size guard");

  const Matrix adj = csr_to_dense(sg.norm_adj);
  const Matrix ax = gemm(adj, x);
  Matrix scaled = ax;
  for (int i = 0; i < k; ++i)
    for (int c = 0; c < ax.cols; ++c) scaled(i, c) *= theta_star[i];

  const Matrix m = gemm(adj, scaled);
  const Matrix m_plain = gemm(adj, ax);

  SharedPlainComparison cmp;
  cmp.rho_shared = spectral_radius(gemm_nt(m, m));
  cmp.rho_plain = spectral_radius(gemm_nt(m_plain, m_plain));
  cmp.connected = is_connected(sg);
  return cmp;
}

FixedInstance make_fixed_instance(const Graph& g, const TrainConfig& cfg, Rng& rng) {
  cfg.validate(g);
  const std::vector<int> train_nodes = g.nodes_with_role(Role::kTrain);

  FixedInstance inst;
  inst.g = &g;
  inst.p_share = cfg.p_share;
  inst.hyper = cfg.hyper;

  std::vector<std::vector<int>> all_nodes;
  for (int n = 0; n < cfg.n_hosts; ++n) {
    const std::vector<int> nodes = sample(g, train_nodes, cfg.sampler, rng);
    inst.sgs.push_back(induce_subgraph(g, nodes));
    inst.mis.push_back(
        mask_inputs(inst.sgs.back(), cfg.plan.views[n], g.features, g.labels));
    all_nodes.push_back(nodes);
  }
  inst.thetas = build_theta(all_nodes, cfg.plan.views);
  int offset = 0;
  for (const auto& nodes : all_nodes) {
    inst.block_offset.push_back(offset);
    offset += static_cast<int>(nodes.size());
  }
  return inst;
}

ModelParams feras_map(const FixedInstance& inst, const ModelParams& start, int q) {
  if (q < 1) throw std::invalid_argument("feras_map: q must be >= 1");
  const int n_hosts = static_cast<int>(inst.sgs.size());
  const int m2 = start.w1.cols;
  int total = 0;
  for (const auto& sg : inst.sgs) total += static_cast<int>(sg.nodes.size());

  std::vector<ModelParams> params(n_hosts, start);
  std::vector<ForwardTape> tapes(n_hosts);

  for (int it = 0; it < q; ++it) {
    // phase 1: every host's first block, stacked into x_hat (blank rows for
    // invisible nodes)
    Matrix x_hat(total, m2);
    for (int n = 0; n < n_hosts; ++n) {
      const Matrix e = forward_pre(params[n], inst.sgs[n].norm_adj,
                                   inst.mis[n].features, inst.p_share, tapes[n]);
      const int off = inst.block_offset[n];
      for (int i = 0; i < e.rows; ++i) {
        if (!inst.mis[n].visible[i]) continue;
        for (int c = 0; c < m2; ++c) x_hat(off + i, c) = e(i, c);
      }
    }
    // phase 2: pull through Theta, finish, step
    for (int n = 0; n < n_hosts; ++n) {
      const Matrix x_tilde = gemm(inst.thetas[n], x_hat);
      const int k = static_cast<int>(inst.sgs[n].nodes.size());
      std::vector<double> coeff(k);
      for (int i = 0; i < k; ++i)
        coeff[i] = inst.thetas[n](i, inst.block_offset[n] + i);
      tapes[n].visible = inst.mis[n].visible;
      forward_post(params[n], inst.sgs[n].norm_adj, x_tilde, coeff, tapes[n]);
      const Gradients grads =
          backward(tapes[n], inst.mis[n].labels, params[n], inst.hyper);
      sgd_step(params[n], grads, inst.hyper.eta);
    }
  }
  return average_params(params);
}

ModelParams random_nonneg_params(int m1, int m2, int m3, int classes, double scale,
                                 Rng& rng) {
  ModelParams p;
  p.w1 = Matrix(m1, m2);
  p.w2 = Matrix(m2, m3);
  p.w_dense = Matrix(m3, classes);
  for (double& v : p.w1.data) v = rng.uniform(0.0, scale);
  for (double& v : p.w2.data) v = rng.uniform(0.0, scale);
  for (double& v : p.w_dense.data) v = rng.uniform(0.0, scale);
  return p;
}

namespace {

// Certify the Appendix constraints for every host at this parameter point.
void require_certified(const FixedInstance& inst, const ModelParams& at) {
  const int n_hosts = static_cast<int>(inst.sgs.size());
  const int m2 = at.w1.cols;
  int total = 0;
  for (const auto& sg : inst.sgs) total += static_cast<int>(sg.nodes.size());

  Matrix x_hat(total, m2);
  std::vector<ForwardTape> tapes(n_hosts);
  for (int n = 0; n < n_hosts; ++n) {
    const Matrix e = forward_pre(at, inst.sgs[n].norm_adj, inst.mis[n].features,
                                 inst.p_share, tapes[n]);
    const int off = inst.block_offset[n];
    for (int i = 0; i < e.rows; ++i) {
      if (!inst.mis[n].visible[i]) continue;
      for (int c = 0; c < m2; ++c) x_hat(off + i, c) = e(i, c);
    }
  }
  for (int n = 0; n < n_hosts; ++n) {
    Matrix others = x_hat;
    const int off = inst.block_offset[n];
    const int k = static_cast<int>(inst.sgs[n].nodes.size());
    for (int i = 0; i < k; ++i)
      for (int c = 0; c < m2; ++c) others(off + i, c) = 0.0;
    const LinearizationPack pack =
        build_linearization(inst.sgs[n], inst.thetas[n], off, inst.mis[n].features,
                            at, &others);
    const ConstraintReport rep = certify(pack, inst.hyper);
    if (!rep.rho_ok || !rep.eta_ok)
      throw std::invalid_argument(
          "empirical_contraction: hyperparameters not certified on instance");
  }
}

}  // namespace

double empirical_contraction(const Graph& g, const TrainConfig& cfg, int trials,
                             double param_scale) {
  if (trials < 1) throw std::invalid_argument("empirical_contraction: trials >= 1");
  if (cfg.hyper.loss_kind != LossKind::kSquared)
    throw std::invalid_argument("empirical_contraction: squared loss required");

  double max_ratio = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(cfg.seed, 0xc04au, static_cast<std::uint64_t>(trial)));
    const FixedInstance inst = make_fixed_instance(g, cfg, rng);

    const ModelParams w = random_nonneg_params(g.feature_dim(), cfg.hidden1,
                                               cfg.hidden2, g.num_classes(),
                                               param_scale, rng);
    const ModelParams v = random_nonneg_params(g.feature_dim(), cfg.hidden1,
                                               cfg.hidden2, g.num_classes(),
                                               param_scale, rng);
    const double dist = w.distance(v);
    if (dist == 0.0) continue;  // degenerate pair

    require_certified(inst, w);
    require_certified(inst, v);

    const ModelParams pw = feras_map(inst, w, cfg.q);
    const ModelParams pv = feras_map(inst, v, cfg.q);
    max_ratio = std::max(max_ratio, pw.distance(pv) / dist);
  }
  return max_ratio;
}

}  // namespace feras

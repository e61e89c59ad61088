#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "feras/federation.hpp"
#include "feras/gcn.hpp"
#include "feras/graph.hpp"
#include "feras/matrix.hpp"
#include "feras/rng.hpp"
#include "feras/trainer.hpp"

namespace feras {

struct SizeGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// vec() stacks columns (the convention under vec(AXB) = (B^T (x) A) vec(X)).
std::vector<double> vec(const Matrix& m);
Matrix kron(const Matrix& a, const Matrix& b);

// Linearization of one host's two-layer forward map in the linear (all-ReLU-
// active) regime. With A the normalized adjacency, E_n the block injection of
// the host's rows into the concatenated sample list, and x the masked input:
//   m_core       = A Theta E_n A x            (k x m1)
//   m_plain_core = A A x                      (no sharing, own block as-is)
//   m1 = w2^T (x) m_core                      vec(y) = b1 + m1 vec(w1)
//   m2 = I_{m3} (x) (A x_tilde)               vec(y) = m2 vec(w2)
//   b1 = vec(A Theta x_hat_others w2)         other hosts' pushes, constant
struct LinearizationPack {
  Matrix m_core;
  Matrix m_plain_core;
  Matrix m1;
  Matrix m2;
  std::vector<double> b1;
};

// theta: this host's k x K_t matrix; block_offset: column where its own block
// starts; x_hat_others: K_t x m2 stacked pushes with the own block zeroed
// (null = single host, b1 = 0). Dense construction, hard size guard.
LinearizationPack build_linearization(const Subgraph& sg, const Matrix& theta,
                                      int block_offset, const Matrix& x,
                                      const ModelParams& params,
                                      const Matrix* x_hat_others = nullptr);

// Power iteration on a symmetric PSD matrix; 1000 iterations or relative
// change < 1e-12. Throws on non-symmetric input.
double spectral_radius(const Matrix& sym_psd);

struct ConstraintReport {
  double rho_m1 = 0.0;   // rho(M1^T M1)
  double rho_m2 = 0.0;   // rho(M2^T M2)
  double lambda = 0.0;
  double c_star = 1.0;
  double eta = 0.0;
  double eta_max = 0.0;        // 4 / (2 c* rho_m2 + 3 lambda)
  double rho_m1_bound = 0.0;   // lambda / (2 c*)
  bool rho_ok = false;
  bool eta_ok = false;
  double contraction_constant = 1.0;  // 1 - eta lambda / 2
};

ConstraintReport certify(const LinearizationPack& pack, const Hyper& hyper);

struct SharedPlainComparison {
  double rho_shared = 0.0;  // rho(M M^T), M = A diag(theta*) A x
  double rho_plain = 0.0;   // rho with theta* = I
  bool connected = true;    // precondition flag; comparison computed anyway
};

// theta_star: the host's own averaging weight per sampled node (the diagonal
// of Theta restricted to its own block).
SharedPlainComparison compare_shared_vs_plain(const Subgraph& sg,
                                              const std::vector<double>& theta_star,
                                              const Matrix& x);

// One frozen multi-host scenario: subgraphs, masks and thetas sampled once so
// the federated update becomes a deterministic map over parameters.
struct FixedInstance {
  const Graph* g = nullptr;
  int p_share = 1;
  Hyper hyper;
  std::vector<Subgraph> sgs;
  std::vector<MaskedInputs> mis;
  std::vector<Matrix> thetas;
  std::vector<int> block_offset;
};

FixedInstance make_fixed_instance(const Graph& g, const TrainConfig& cfg, Rng& rng);

// q federated iterations (embedding share every iteration, weight merge at
// the end) from a common start; returns the merged parameters.
ModelParams feras_map(const FixedInstance& inst, const ModelParams& start, int q);

// Max over trials of |Phi(w) - Phi(v)| / |w - v| for random nonnegative
// parameter pairs, Phi = feras_map with cfg.q. Every instance/point pair is
// certified first; throws if the constraints fail.
double empirical_contraction(const Graph& g, const TrainConfig& cfg, int trials,
                             double param_scale = 0.1);

// Uniform [0, scale] entries: keeps every ReLU on its linear branch for
// nonnegative inputs, the regime all theory statements assume.
ModelParams random_nonneg_params(int m1, int m2, int m3, int classes, double scale,
                                 Rng& rng);

}  // namespace feras

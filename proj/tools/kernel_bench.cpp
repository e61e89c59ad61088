// Compares the serial reference kernels against the OpenMP versions on the
// shapes the trainer actually hits, and checks they agree bitwise.
#include <chrono>
#include <cstdio>
#include <vector>

#include <omp.h>

#include "feras/kernels.hpp"
#include "feras/matrix.hpp"
#include "feras/rng.hpp"

using namespace feras;

namespace {

Matrix random_matrix(int r, int c, Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.uniform(-1.0, 1.0);
  return m;
}

Csr random_sparse(int n, double density, Rng& rng) {
  Csr a;
  a.n_rows = a.n_cols = n;
  a.indptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (rng.uniform() < density) {
        a.indices.push_back(j);
        a.values.push_back(rng.uniform(-1.0, 1.0));
      }
    a.indptr[i + 1] = static_cast<int>(a.indices.size());
  }
  return a;
}

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main() {
  Rng rng(42);
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-28s %10s %10s %8s %s\n", "kernel", "serial_ms", "omp_ms", "speedup",
              "bitwise");

  const int reps = 5;
  for (int n : {128, 256, 512}) {
    const Matrix a = random_matrix(n, n, rng);
    const Matrix b = random_matrix(n, n, rng);
    Matrix out_ref, out_par;
    const double ts = time_best_of(reps, [&] { out_ref = kernels::reference::gemm(a, b); });
    const double tp = time_best_of(reps, [&] { out_par = kernels::gemm(a, b); });
    std::printf("%-28s %10.3f %10.3f %8.2f %s\n",
                ("gemm " + std::to_string(n) + "x" + std::to_string(n)).c_str(),
                ts * 1e3, tp * 1e3, ts / tp,
                max_abs_diff(out_ref, out_par) == 0.0 ? "yes" : "NO");
  }
  for (int n : {512, 2048}) {
    const Csr s = random_sparse(n, 0.01, rng);
    const Matrix x = random_matrix(n, 64, rng);
    Matrix out_ref, out_par;
    const double ts = time_best_of(reps, [&] { out_ref = kernels::reference::spmm(s, x); });
    const double tp = time_best_of(reps, [&] { out_par = kernels::spmm(s, x); });
    std::printf("%-28s %10.3f %10.3f %8.2f %s\n",
                ("spmm " + std::to_string(n) + " d=0.01 k=64").c_str(), ts * 1e3,
                tp * 1e3, ts / tp, max_abs_diff(out_ref, out_par) == 0.0 ? "yes" : "NO");
  }
  return 0;
}

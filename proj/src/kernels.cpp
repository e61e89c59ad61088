#include "feras/kernels.hpp"

#include <stdexcept>

namespace feras::kernels {

namespace {
// parallelizing tiny products costs more than it saves
constexpr long kParallelCutoff = 1 << 14;
}  // namespace

namespace reference {

Matrix gemm(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("gemm: inner dimension mismatch");
  Matrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.cols; ++j) {
      double s = 0.0;
      for (int k = 0; k < a.cols; ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

Matrix gemm_tn(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) throw std::invalid_argument("gemm_tn: inner dimension mismatch");
  Matrix c(a.cols, b.cols);
  for (int i = 0; i < a.cols; ++i)
    for (int j = 0; j < b.cols; ++j) {
      double s = 0.0;
      for (int k = 0; k < a.rows; ++k) s += a(k, i) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

Matrix gemm_nt(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols) throw std::invalid_argument("gemm_nt: inner dimension mismatch");
  Matrix c(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.rows; ++j) {
      double s = 0.0;
      for (int k = 0; k < a.cols; ++k) s += a(i, k) * b(j, k);
      c(i, j) = s;
    }
  return c;
}

Matrix spmm(const Csr& a, const Matrix& b) {
  if (a.n_cols != b.rows) throw std::invalid_argument("spmm: inner dimension mismatch");
  Matrix c(a.n_rows, b.cols);
  for (int i = 0; i < a.n_rows; ++i) {
    double* out = c.row_ptr(i);
    for (int p = a.indptr[i]; p < a.indptr[i + 1]; ++p) {
      const double v = a.values[p];
      const double* in = b.row_ptr(a.indices[p]);
      for (int j = 0; j < b.cols; ++j) out[j] += v * in[j];
    }
  }
  return c;
}

}  // namespace reference

Matrix gemm(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("gemm: inner dimension mismatch");
  Matrix c(a.rows, b.cols);
  const long work = static_cast<long>(a.rows) * a.cols * b.cols;
#pragma omp parallel for schedule(static) if (work > kParallelCutoff)
  for (int i = 0; i < a.rows; ++i) {
    double* out = c.row_ptr(i);
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* in = b.row_ptr(k);
      for (int j = 0; j < b.cols; ++j) out[j] += aik * in[j];
    }
  }
  return c;
}

Matrix gemm_tn(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) throw std::invalid_argument("gemm_tn: inner dimension mismatch");
  Matrix c(a.cols, b.cols);
  const long work = static_cast<long>(a.rows) * a.cols * b.cols;
#pragma omp parallel for schedule(static) if (work > kParallelCutoff)
  for (int i = 0; i < a.cols; ++i) {
    double* out = c.row_ptr(i);
    for (int k = 0; k < a.rows; ++k) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      const double* in = b.row_ptr(k);
      for (int j = 0; j < b.cols; ++j) out[j] += aki * in[j];
    }
  }
  return c;
}

Matrix gemm_nt(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols) throw std::invalid_argument("gemm_nt: inner dimension mismatch");
  Matrix c(a.rows, b.rows);
  const long work = static_cast<long>(a.rows) * a.cols * b.rows;
#pragma omp parallel for schedule(static) if (work > kParallelCutoff)
  for (int i = 0; i < a.rows; ++i) {
    const double* ra = a.row_ptr(i);
    double* out = c.row_ptr(i);
    for (int j = 0; j < b.rows; ++j) {
      const double* rb = b.row_ptr(j);
      double s = 0.0;
      for (int k = 0; k < a.cols; ++k) s += ra[k] * rb[k];
      out[j] = s;
    }
  }
  return c;
}

Matrix spmm(const Csr& a, const Matrix& b) {
  if (a.n_cols != b.rows) throw std::invalid_argument("spmm: inner dimension mismatch");
  Matrix c(a.n_rows, b.cols);
  const long work = static_cast<long>(a.nnz()) * b.cols;
#pragma omp parallel for schedule(static) if (work > kParallelCutoff)
  for (int i = 0; i < a.n_rows; ++i) {
    double* out = c.row_ptr(i);
    for (int p = a.indptr[i]; p < a.indptr[i + 1]; ++p) {
      const double v = a.values[p];
      const double* in = b.row_ptr(a.indices[p]);
      for (int j = 0; j < b.cols; ++j) out[j] += v * in[j];
    }
  }
  return c;
}

Matrix relu(const Matrix& in) {
  Matrix out(in.rows, in.cols);
  const long n = static_cast<long>(in.size());
#pragma omp parallel for schedule(static) if (n > kParallelCutoff)
  for (long i = 0; i < n; ++i) out.data[i] = in.data[i] > 0.0 ? in.data[i] : 0.0;
  return out;
}

Matrix relu_backward(const Matrix& grad, const Matrix& pre) {
  if (!grad.same_shape(pre)) throw std::invalid_argument("relu_backward: shape mismatch");
  Matrix out(grad.rows, grad.cols);
  const long n = static_cast<long>(grad.size());
#pragma omp parallel for schedule(static) if (n > kParallelCutoff)
  for (long i = 0; i < n; ++i) out.data[i] = pre.data[i] > 0.0 ? grad.data[i] : 0.0;
  return out;
}

void axpy(Matrix& a, double alpha, const Matrix& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("axpy: shape mismatch");
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += alpha * b.data[i];
}

void scale(Matrix& a, double alpha) {
  for (double& v : a.data) v *= alpha;
}

}  // namespace feras::kernels

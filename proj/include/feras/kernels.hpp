#pragma once

#include "feras/csr.hpp"
#include "feras/matrix.hpp"

// Dense and sparse linear-algebra kernels. The default entry points are
// OpenMP-parallel; the serial versions in kernels::reference are kept as the
// oracle for tests and for the kernel benchmark.
namespace feras::kernels {

namespace reference {
Matrix gemm(const Matrix& a, const Matrix& b);     // a * b
Matrix gemm_tn(const Matrix& a, const Matrix& b);  // a^T * b
Matrix gemm_nt(const Matrix& a, const Matrix& b);  // a * b^T
Matrix spmm(const Csr& a, const Matrix& b);
}  // namespace reference

Matrix gemm(const Matrix& a, const Matrix& b);
Matrix gemm_tn(const Matrix& a, const Matrix& b);
Matrix gemm_nt(const Matrix& a, const Matrix& b);

// Sparse-dense product; throws on an inner-dimension mismatch.
Matrix spmm(const Csr& a, const Matrix& b);

// out = relu(in), elementwise
Matrix relu(const Matrix& in);

// grad masked by the relu activation pattern: out = grad .* (pre > 0)
Matrix relu_backward(const Matrix& grad, const Matrix& pre);

// a += alpha * b
void axpy(Matrix& a, double alpha, const Matrix& b);

void scale(Matrix& a, double alpha);

}  // namespace feras::kernels

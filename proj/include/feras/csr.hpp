#pragma once

#include <utility>
#include <vector>

namespace feras {

// Compressed sparse row matrix. Adjacency structures keep values at 1.0,
// normalized adjacencies carry the actual weights.
struct Csr {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<int> indptr;   // size n_rows + 1
  std::vector<int> indices;  // column ids, sorted within each row
  std::vector<double> values;

  Csr() : indptr(1, 0) {}
  Csr(int r, int c) : n_rows(r), n_cols(c), indptr(static_cast<std::size_t>(r) + 1, 0) {}

  int nnz() const { return static_cast<int>(indices.size()); }

  int row_degree(int r) const { return indptr[r + 1] - indptr[r]; }
};

// Builds a structurally symmetric CSR from an undirected edge list.
// Duplicate and reversed pairs collapse to one edge; self loops are dropped.
Csr csr_from_undirected_edges(int n, std::vector<std::pair<int, int>> edges);

// Identity CSR of size n.
Csr csr_identity(int n);

}  // namespace feras

#pragma once

#include "cgvariants/types.hpp"

#include <span>
#include <tuple>
#include <vector>

namespace cgv {

/// Symmetric matrix in CSR format with full (expanded) storage.
///
/// Invariants: row_ptr has length n+1, is non-decreasing, starts at 0 and
/// ends at nnz; column indices are strictly increasing within each row; the
/// stored pattern and values are symmetric bit-for-bit.
struct SparseMatrix {
    Index n = 0;
    std::vector<Index> row_ptr;
    std::vector<Index> col_idx;
    std::vector<double> values;

    Index nnz() const { return static_cast<Index>(values.size()); }
};

using Triplet = std::tuple<Index, Index, double>;

/// Builds CSR from unordered triplets: duplicates are summed in input order,
/// entries whose final value is exactly zero are dropped.
SparseMatrix csr_from_triplets(Index n, std::vector<Triplet> triplets);

/// Builds CSR from a dense row-major array, dropping exact zeros.
SparseMatrix csr_from_dense(Index n, const std::vector<double>& dense_row_major);

/// Checks the structural CSR invariants, throws std::invalid_argument on violation.
void validate_csr(const SparseMatrix& a);

/// True when the stored pattern and values equal their transpose bit-for-bit.
bool is_symmetric(const SparseMatrix& a);

/// y = A*x with fixed left-to-right accumulation per row (reference path).
void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
DenseVector spmv(const SparseMatrix& a, const DenseVector& x);

/// (y1, y2) = (A*x1, A*x2) in a single traversal of A. Each output is
/// bit-identical to the corresponding spmv call.
void block_spmv(const SparseMatrix& a, std::span<const double> x1, std::span<const double> x2,
                std::span<double> y1, std::span<double> y2);

/// Row-partitioned threaded product. Per-row accumulation order is unchanged,
/// so results match the reference path; still excluded from reference runs.
void spmv_parallel(const SparseMatrix& a, std::span<const double> x, std::span<double> y,
                   int threads);

/// sqrt(<x, Ax>). A slightly negative quadratic form (roundoff near
/// convergence) is clamped to zero; *clamped reports when that happened.
double a_norm(const SparseMatrix& a, const DenseVector& x, bool* clamped = nullptr);

double frobenius_norm(const SparseMatrix& a);

} // namespace cgv

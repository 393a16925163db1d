#include "cgvariants/sparse_matrix.hpp"

#include "cgvariants/vector_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace cgv {

SparseMatrix csr_from_triplets(Index n, std::vector<Triplet> triplets) {
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });

    SparseMatrix a;
    a.n = n;
    a.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);

    // sum duplicate positions in input order, then drop exact zeros
    std::size_t i = 0;
    while (i < triplets.size()) {
        const auto [row, col, first] = triplets[i];
        if (row < 0 || row >= n || col < 0 || col >= n)
            throw std::invalid_argument("triplet index out of range");
        double sum = first;
        std::size_t j = i + 1;
        while (j < triplets.size() && std::get<0>(triplets[j]) == row &&
               std::get<1>(triplets[j]) == col) {
            sum += std::get<2>(triplets[j]);
            ++j;
        }
        if (sum != 0.0) {
            a.col_idx.push_back(col);
            a.values.push_back(sum);
            ++a.row_ptr[static_cast<std::size_t>(row) + 1];
        }
        i = j;
    }
    for (Index r = 0; r < n; ++r) a.row_ptr[r + 1] += a.row_ptr[r];
    return a;
}

SparseMatrix csr_from_dense(Index n, const std::vector<double>& dense_row_major) {
    if (dense_row_major.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
        throw std::invalid_argument("dense array size does not match dimension");
    SparseMatrix a;
    a.n = n;
    a.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const double v = dense_row_major[static_cast<std::size_t>(i) * n + j];
            if (v != 0.0) {
                a.col_idx.push_back(j);
                a.values.push_back(v);
            }
        }
        a.row_ptr[i + 1] = static_cast<Index>(a.values.size());
    }
    return a;
}

void validate_csr(const SparseMatrix& a) {
    if (a.n < 0) throw std::invalid_argument("negative dimension");
    if (a.row_ptr.size() != static_cast<std::size_t>(a.n) + 1)
        throw std::invalid_argument("row_ptr length must be n+1");
    if (a.row_ptr.front() != 0) throw std::invalid_argument("row_ptr[0] must be 0");
    if (a.row_ptr.back() != a.nnz())
        throw std::invalid_argument("row_ptr[n] must equal number of stored entries");
    if (a.col_idx.size() != a.values.size())
        throw std::invalid_argument("col_idx and values length mismatch");
    for (Index i = 0; i < a.n; ++i) {
        if (a.row_ptr[i] > a.row_ptr[i + 1]) throw std::invalid_argument("row_ptr not monotone");
        for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            if (a.col_idx[k] < 0 || a.col_idx[k] >= a.n)
                throw std::invalid_argument("column index out of range");
            if (k > a.row_ptr[i] && a.col_idx[k] <= a.col_idx[k - 1])
                throw std::invalid_argument("column indices not strictly increasing");
        }
    }
}

bool is_symmetric(const SparseMatrix& a) {
    // build the transpose pattern and compare bit-for-bit
    const Index n = a.n;
    std::vector<Index> count(static_cast<std::size_t>(n) + 1, 0);
    for (Index k = 0; k < a.nnz(); ++k) ++count[a.col_idx[k] + 1];
    for (Index i = 0; i < n; ++i) count[i + 1] += count[i];
    std::vector<Index> t_col(a.col_idx.size());
    std::vector<double> t_val(a.values.size());
    std::vector<Index> next(count.begin(), count.end() - 1);
    for (Index i = 0; i < n; ++i) {
        for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            const Index pos = next[a.col_idx[k]]++;
            t_col[pos] = i;
            t_val[pos] = a.values[k];
        }
    }
    if (!std::equal(count.begin(), count.end(), a.row_ptr.begin())) return false;
    if (t_col != a.col_idx) return false;
    for (std::size_t k = 0; k < t_val.size(); ++k) {
        // bit comparison: NaN != NaN would reject, but values are finite here
        if (t_val[k] != a.values[k]) return false;
    }
    return true;
}

void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
    if (x.size() != static_cast<std::size_t>(a.n) || y.size() != static_cast<std::size_t>(a.n))
        throw std::invalid_argument("spmv dimension mismatch");
    for (Index i = 0; i < a.n; ++i) {
        double sum = 0.0;
        for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            sum += a.values[k] * x[a.col_idx[k]];
        y[i] = sum;
    }
}

DenseVector spmv(const SparseMatrix& a, const DenseVector& x) {
    DenseVector y(static_cast<std::size_t>(a.n));
    spmv(a, x, y);
    return y;
}

void block_spmv(const SparseMatrix& a, std::span<const double> x1, std::span<const double> x2,
                std::span<double> y1, std::span<double> y2) {
    if (x1.size() != static_cast<std::size_t>(a.n) || x2.size() != static_cast<std::size_t>(a.n) ||
        y1.size() != static_cast<std::size_t>(a.n) || y2.size() != static_cast<std::size_t>(a.n))
        throw std::invalid_argument("block_spmv dimension mismatch");
    for (Index i = 0; i < a.n; ++i) {
        double sum1 = 0.0;
        double sum2 = 0.0;
        for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            const double v = a.values[k];
            const Index c = a.col_idx[k];
            sum1 += v * x1[c];
            sum2 += v * x2[c];
        }
        y1[i] = sum1;
        y2[i] = sum2;
    }
}

void spmv_parallel(const SparseMatrix& a, std::span<const double> x, std::span<double> y,
                   int threads) {
    if (x.size() != static_cast<std::size_t>(a.n) || y.size() != static_cast<std::size_t>(a.n))
        throw std::invalid_argument("spmv dimension mismatch");
    if (threads < 1) threads = 1;
    const Index n = a.n;
    const Index chunk = (n + threads - 1) / threads;
    std::vector<std::thread> workers;
    for (int t = 0; t < threads; ++t) {
        const Index lo = t * chunk;
        const Index hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([&, lo, hi] {
            for (Index i = lo; i < hi; ++i) {
                double sum = 0.0;
                for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
                    sum += a.values[k] * x[a.col_idx[k]];
                y[i] = sum;
            }
        });
    }
    for (auto& w : workers) w.join();
}

double a_norm(const SparseMatrix& a, const DenseVector& x, bool* clamped) {
    DenseVector ax = spmv(a, x);
    double q = dot(x, ax);
    if (clamped) *clamped = false;
    if (q < 0.0) {
        if (clamped) *clamped = true;
        q = 0.0;
    }
    return std::sqrt(q);
}

double frobenius_norm(const SparseMatrix& a) {
    double acc = 0.0;
    for (double v : a.values) acc += v * v;
    return std::sqrt(acc);
}

} // namespace cgv

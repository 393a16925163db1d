#pragma once

#include "cgvariants/sparse_matrix.hpp"
#include "cgvariants/types.hpp"

#include <cstdint>

namespace cgv {

/// Synthetic SPD test matrix with a geometrically clustered spectrum:
/// lambda_1 = 1/kappa, lambda_n = 1, and in between
///   lambda_i = lambda_1 + ((i-1)/(n-1)) * (lambda_n - lambda_1) * rho^(n-i).
/// Eigenvectors are a Haar-distributed orthogonal matrix drawn from the seed.
struct ModelProblemSpec {
    Index n = 48;
    double rho = 0.8;
    double kappa = 1e3;
    std::uint64_t seed = 0;
};

struct ModelProblem {
    SparseMatrix a; // dense operator held in CSR storage
    DenseVector eigenvalues;
};

/// Eigenvalues only (no matrix assembly).
DenseVector model_spectrum(Index n, double rho, double kappa);

/// Haar-distributed orthogonal matrix (row-major): QR of a seeded Gaussian
/// matrix with the signs of diag(R) folded into the columns of Q.
std::vector<double> haar_orthogonal(Index n, std::uint64_t seed);

/// Throws std::invalid_argument unless n >= 2, kappa > 1, 0 < rho <= 1.
ModelProblem build_model_problem(const ModelProblemSpec& spec);

} // namespace cgv

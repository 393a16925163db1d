#include "oracles.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace oracle {

cgv::SparseMatrix random_spd(cgv::Index n, double kappa, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd g(n, n);
    for (cgv::Index i = 0; i < n; ++i)
        for (cgv::Index j = 0; j < n; ++j) g(i, j) = gauss(eng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);

    std::vector<double> lambda(static_cast<std::size_t>(n));
    for (cgv::Index i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        lambda[i] = 1.0 / kappa + t * (1.0 - 1.0 / kappa); // uniform in [1/kappa, 1]
    }

    Eigen::MatrixXd b = q;
    for (cgv::Index j = 0; j < n; ++j) b.col(j) *= lambda[j];

    std::vector<double> dense(static_cast<std::size_t>(n) * n, 0.0);
    for (cgv::Index i = 0; i < n; ++i) {
        for (cgv::Index j = i; j < n; ++j) {
            double sum = 0.0;
            for (cgv::Index l = 0; l < n; ++l) sum += b(i, l) * q(j, l);
            dense[static_cast<std::size_t>(i) * n + j] = sum;
            dense[static_cast<std::size_t>(j) * n + i] = sum;
        }
    }
    return cgv::csr_from_dense(n, dense);
}

} // namespace oracle

#include "cgvariants/model_problem.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>

namespace cgv {

namespace {

// Gaussian draws via Box-Muller on top of mt19937_64 so the stream does not
// depend on the standard library's distribution implementation.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    double uniform01() {
        // in (0,1); never 0 so log() stays finite
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace

DenseVector model_spectrum(Index n, double rho, double kappa) {
    if (n < 2) throw std::invalid_argument("model problem needs n >= 2");
    if (!(kappa > 1.0)) throw std::invalid_argument("model problem needs kappa > 1");
    if (!(rho > 0.0) || rho > 1.0) throw std::invalid_argument("model problem needs 0 < rho <= 1");

    DenseVector lambda(static_cast<std::size_t>(n));
    const double lambda1 = 1.0 / kappa;
    const double lambdan = 1.0;
    lambda[0] = lambda1;
    lambda[n - 1] = lambdan;
    for (Index i = 2; i < n; ++i) {
        lambda[i - 1] = lambda1 + (static_cast<double>(i - 1) / static_cast<double>(n - 1)) *
                                      (lambdan - lambda1) *
                                      std::pow(rho, static_cast<double>(n - i));
    }
    return lambda;
}

std::vector<double> haar_orthogonal(Index n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("haar_orthogonal needs n >= 1");
    GaussianStream gauss(seed);
    Eigen::MatrixXd g(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) g(i, j) = gauss.next();

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);

    std::vector<double> out(static_cast<std::size_t>(n) * n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) out[static_cast<std::size_t>(i) * n + j] = q(i, j);
    return out;
}

ModelProblem build_model_problem(const ModelProblemSpec& spec) {
    const Index n = spec.n;
    DenseVector lambda = model_spectrum(n, spec.rho, spec.kappa);
    const std::vector<double> q = haar_orthogonal(n, spec.seed);

    // A = Q diag(lambda) Q^T assembled on the upper triangle and mirrored so
    // the stored operator is symmetric bit-for-bit.
    std::vector<double> b(q);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) b[static_cast<std::size_t>(i) * n + j] *= lambda[j];

    std::vector<double> dense(static_cast<std::size_t>(n) * n, 0.0);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i; j < n; ++j) {
            double sum = 0.0;
            for (Index l = 0; l < n; ++l)
                sum += b[static_cast<std::size_t>(i) * n + l] *
                       q[static_cast<std::size_t>(j) * n + l];
            dense[static_cast<std::size_t>(i) * n + j] = sum;
            dense[static_cast<std::size_t>(j) * n + i] = sum;
        }
    }

    ModelProblem problem;
    problem.a = csr_from_dense(n, dense);
    problem.eigenvalues = std::move(lambda);
    return problem;
}

} // namespace cgv

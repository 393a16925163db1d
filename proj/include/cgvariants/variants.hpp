#pragma once

#include "cgvariants/preconditioner.hpp"
#include "cgvariants/sparse_matrix.hpp"
#include "cgvariants/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cgv {

/// The seven conjugate gradient variants. All are equivalent in exact
/// arithmetic; they differ in how many reductions an iteration needs and in
/// which quantities are carried by recurrence instead of recomputed.
enum class Variant {
    HS,        // two reductions, fully sequential iteration
    CG_CG,     // one reduction
    M,         // one reduction, predicted scalar with Meurant's expression
    PR,        // one reduction, predicted scalar, recomputed
    GV,        // reduction overlapped with the matrix product
    PIPE_PR_M, // pipelined predict-and-recompute, Meurant scalar
    PIPE_PR,   // pipelined predict-and-recompute
};

/// Which expression produces the predicted scalar nu' each iteration.
enum class NuExpression {
    Expanded,   // nu - a*(<r~,s> + <s~,r>) + a^2*<s~,s>
    Simplified, // nu - 2a*<r~,s> + a^2*<s~,s>
    Meurant,    // -nu + a^2*<s~,s>
};

struct VariantConfig {
    Variant variant = Variant::HS;
    /// Recompute nu = <r~,r> after the prediction (predictor variants). With
    /// this off the predicted value is carried into the next iteration.
    bool recompute_nu = true;
    /// Recompute w = A r~ after the prediction (pipelined PR variants only).
    bool recompute_w = true;
    NuExpression nu_expression = NuExpression::Simplified;
    /// Experimental: keep the mu recurrence of CG_CG/GV unsimplified
    /// (mu = eta + beta*(<r~,s_prev> + <p_prev,w>) + beta^2*mu_prev).
    /// Derived algebraically; not one of the printed recurrences.
    bool unsimplified_mu = false;
    /// Keep delta = <r~,s> even when the Meurant expression does not need it.
    bool track_delta = false;

    static VariantConfig make(Variant v);

    /// Throws std::invalid_argument on flag combinations that do not apply
    /// to the chosen variant.
    void validate() const;

    bool is_predictor() const;
    bool is_pipelined() const;
};

std::string_view variant_name(Variant v);
std::optional<Variant> variant_from_name(std::string_view name);

enum class BreakdownReason {
    None,
    NuPrimeNonPositive,
    NuNonPositive,
    MuNonPositive,
    NonFinite,
};

enum class ConvergedBy {
    ZeroResidual,    // updated residual became exactly zero
    ErrorThreshold,  // stop rule: relative A-norm error below threshold
    Stagnation,      // stop rule: true residual stopped improving
};

struct SolveStatus {
    enum class State { Running, Breakdown, MaxIterations, Converged };

    State state = State::Running;
    BreakdownReason breakdown = BreakdownReason::None;
    ConvergedBy criterion = ConvergedBy::ZeroResidual;

    bool running() const { return state == State::Running; }
};

std::string describe(const SolveStatus& status);

struct SolverStats {
    std::uint64_t spmv_calls = 0;       // single products by the solver
    std::uint64_t block_spmv_calls = 0; // fused two-vector products
    std::uint64_t precond_applies = 0;
    std::uint64_t reductions = 0; // inner products
};

/// Working state of one variant. Single-owner: advanced by exactly one
/// thread; A and M are borrowed read-only and may be shared between solvers.
///
/// Only the vectors the variant needs are allocated. In unpreconditioned mode
/// the tilde vectors alias their plain counterparts (rt()/st()/wt()/ut())
/// and no storage is spent on them.
struct SolverState {
    VariantConfig config;
    const SparseMatrix* a = nullptr;
    const Preconditioner* m = nullptr;
    bool preconditioned = false;
    Index n = 0;
    int k = 0;
    SolveStatus status;
    SolverStats stats;

    DenseVector x, r, p, s; // every variant
    DenseVector w;          // CG_CG, GV, pipelined
    DenseVector u, t;       // GV (t), pipelined (u)
    DenseVector r_tilde, s_tilde, w_tilde, u_tilde; // preconditioned mode only

    /// Predicted w stashed before the recompute overwrites it, so the
    /// diagnostics probe can measure the prediction. Allocated only when
    /// track_predictions is set; not part of the variant's working set.
    bool track_predictions = false;
    DenseVector w_pred;

    double alpha = 0.0;
    double beta = 0.0;
    double nu = 0.0;
    double nu_prime = 0.0;
    double mu = 0.0;
    double delta = 0.0;
    double delta_hat = 0.0; // Expanded expression only
    double gamma = 0.0;
    double eta = 0.0;

    DenseVector& rt() { return preconditioned ? r_tilde : r; }
    DenseVector& st() { return preconditioned ? s_tilde : s; }
    DenseVector& wt() { return preconditioned ? w_tilde : w; }
    DenseVector& ut() { return preconditioned ? u_tilde : u; }
    const DenseVector& rt() const { return preconditioned ? r_tilde : r; }
    const DenseVector& st() const { return preconditioned ? s_tilde : s; }
    const DenseVector& wt() const { return preconditioned ? w_tilde : w; }
    const DenseVector& ut() const { return preconditioned ? u_tilde : u; }

    /// Number of allocated working vectors (excludes the diagnostics stash).
    int allocated_vectors() const;
};

/// Shared initialization: r0 = b - A x0, r~0 = M^-1 r0, nu0, p0 = r~0,
/// s0 = A p0, alpha0 = nu0/<p0,s0>, plus the quantities the variant needs
/// (s~0, delta0, gamma0, w0, w~0, u0, u~0). A zero initial residual reports
/// Converged; nonpositive nu0 or mu0 reports Breakdown.
SolverState initialize(const VariantConfig& config, const SparseMatrix& a,
                       const Preconditioner& m, const DenseVector& b, const DenseVector& x0);

/// Advances one iteration of the configured variant. Requires status Running.
void step(SolverState& state);

} // namespace cgv

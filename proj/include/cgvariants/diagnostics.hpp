#pragma once

#include "cgvariants/preconditioner.hpp"
#include "cgvariants/sparse_matrix.hpp"
#include "cgvariants/variants.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cgv {

/// Per-iteration measurements. Everything here is recomputed from first
/// principles (fresh products and reductions in the reference order), never
/// taken from the solver's recursed values; the recursed values only appear
/// on the right-hand side of the gaps they are being measured against.
/// Fields that do not apply to a variant are absent, not zero.
struct IterationRecord {
    int k = 0;
    std::optional<double> rel_err_a_norm;    // ||e_k||_A / ||e_0||_A (needs x*)
    std::optional<double> true_res_norm;     // ||b - A x_k||
    std::optional<double> upd_res_norm;      // ||r_k||
    std::optional<double> residual_gap_norm; // ||(b - A x_k) - r_k||
    std::optional<double> nu_gap;            // <r~_k, r_k> - nu'_k
    std::optional<double> w_gap_norm;        // ||A r~_k - w'_k||
    std::optional<double> s_gap_norm;        // ||A p_k - s_k||
    std::optional<double> lanczos_res_norm;
    std::optional<double> succ_orth;         // <r_k, r_{k-1}>/(||r_k|| ||r_{k-1}||)
    std::optional<double> alpha, beta, nu, nu_prime;
};

struct ProbeContext {
    const SparseMatrix* a = nullptr;
    const Preconditioner* m = nullptr;
    const DenseVector* b = nullptr;
    const DenseVector* x_star = nullptr; // enables rel_err_a_norm
    double e0_a_norm = 0.0;
    const DenseVector* prev_r = nullptr; // enables succ_orth
};

IterationRecord probe(const SolverState& state, const ProbeContext& ctx);

/// Residual of the three-term recurrence the normalized updated residuals
/// satisfy in exact arithmetic, evaluated with the solver's computed scalars:
///   A q_k - [ (1/a_{k-1})(||r_k||/||r_{k-1}||) q_{k+1}
///           + (1/a_{k-1} + b_{k-1}/a_{k-2}) q_k
///           + (1/a_{k-2})(||r_{k-1}||/||r_{k-2}||) q_{k-1} ]
/// with q_{j+1} = (-1)^j r_j/||r_j||. Requires k >= 2 and nonzero residual
/// norms; throws std::invalid_argument otherwise.
double lanczos_recurrence_residual(const SparseMatrix& a, const DenseVector& r_km2,
                                   const DenseVector& r_km1, const DenseVector& r_k,
                                   double alpha_km2, double alpha_km1, double beta_km1, int k);

struct Summary {
    std::optional<int> iters_to_1e5; // first k with ||e_k||_A/||e_0||_A < 1e-5
    double min_log10_err = 0.0;      // min_k log10 of the ratio
};

/// Throws std::invalid_argument when no record carries rel_err_a_norm.
Summary summarize(const std::vector<IterationRecord>& records);

struct ConvergenceHistory {
    std::string problem_id;
    VariantConfig config;
    Preconditioner::Kind precond = Preconditioner::Kind::Identity;
    std::vector<IterationRecord> records;
    SolveStatus final_status;
    std::optional<Summary> summary;
};

} // namespace cgv

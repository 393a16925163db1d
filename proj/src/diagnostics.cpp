#include "cgvariants/diagnostics.hpp"

#include "cgvariants/vector_ops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cgv {

IterationRecord probe(const SolverState& st, const ProbeContext& ctx) {
    if (!ctx.a || !ctx.b) throw std::invalid_argument("probe context needs A and b");
    const SparseMatrix& a = *ctx.a;
    const DenseVector& b = *ctx.b;

    IterationRecord rec;
    rec.k = st.k;

    // true residual and residual gap from a fresh product
    DenseVector ax = spmv(a, st.x);
    DenseVector true_res(ax.size());
    for (std::size_t i = 0; i < ax.size(); ++i) true_res[i] = b[i] - ax[i];
    rec.true_res_norm = norm2(true_res);
    rec.upd_res_norm = norm2(st.r);
    DenseVector gap(ax.size());
    for (std::size_t i = 0; i < ax.size(); ++i) gap[i] = true_res[i] - st.r[i];
    rec.residual_gap_norm = norm2(gap);

    if (ctx.x_star) {
        if (ctx.e0_a_norm <= 0.0)
            throw std::invalid_argument("probe context needs ||e_0||_A with x*");
        DenseVector e(st.x.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = (*ctx.x_star)[i] - st.x[i];
        rec.rel_err_a_norm = a_norm(a, e) / ctx.e0_a_norm;
    }

    if (st.config.is_predictor() && st.k >= 1) {
        rec.nu_gap = dot(st.rt(), st.r) - st.nu_prime;
        rec.nu_prime = st.nu_prime;
    }

    if (st.config.is_pipelined()) {
        // predicted w: the recursed w for GV and for the no-recompute
        // ablation; the stashed prediction once the recompute overwrote it
        const DenseVector* w_predicted = nullptr;
        if (st.config.variant == Variant::GV || !st.config.recompute_w || st.k == 0)
            w_predicted = &st.w;
        else if (st.track_predictions)
            w_predicted = &st.w_pred;
        if (w_predicted && !w_predicted->empty()) {
            DenseVector ar = spmv(a, st.rt());
            DenseVector wgap(ar.size());
            for (std::size_t i = 0; i < ar.size(); ++i) wgap[i] = ar[i] - (*w_predicted)[i];
            rec.w_gap_norm = norm2(wgap);
        }
        DenseVector ap = spmv(a, st.p);
        DenseVector sgap(ap.size());
        for (std::size_t i = 0; i < ap.size(); ++i) sgap[i] = ap[i] - st.s[i];
        rec.s_gap_norm = norm2(sgap);
    }

    if (ctx.prev_r && st.k >= 1) {
        const double nr = norm2(st.r);
        const double np = norm2(*ctx.prev_r);
        if (nr > 0.0 && np > 0.0) rec.succ_orth = dot(st.r, *ctx.prev_r) / (nr * np);
    }

    rec.alpha = st.alpha;
    if (st.k >= 1) rec.beta = st.beta;
    rec.nu = st.nu;
    return rec;
}

double lanczos_recurrence_residual(const SparseMatrix& a, const DenseVector& r_km2,
                                   const DenseVector& r_km1, const DenseVector& r_k,
                                   double alpha_km2, double alpha_km1, double beta_km1, int k) {
    if (k < 2) throw std::invalid_argument("lanczos residual needs k >= 2");
    const double n_k = norm2(r_k);
    const double n_km1 = norm2(r_km1);
    const double n_km2 = norm2(r_km2);
    if (n_k == 0.0 || n_km1 == 0.0 || n_km2 == 0.0)
        throw std::invalid_argument("lanczos residual window has a zero residual");
    if (alpha_km1 == 0.0 || alpha_km2 == 0.0)
        throw std::invalid_argument("lanczos residual window has a zero alpha");

    // q_{j+1} = (-1)^j r_j / ||r_j||
    const double sign_kp1 = (k % 2 == 0) ? 1.0 : -1.0;   // (-1)^k
    const double sign_k = -sign_kp1;                     // (-1)^(k-1)
    const double sign_km1 = sign_kp1;                    // (-1)^(k-2)

    const std::size_t n = r_k.size();
    DenseVector q_k(n);
    for (std::size_t i = 0; i < n; ++i) q_k[i] = sign_k * r_km1[i] / n_km1;

    DenseVector lhs = spmv(a, q_k);

    const double c_kp1 = (1.0 / alpha_km1) * (n_k / n_km1);
    const double c_k = 1.0 / alpha_km1 + beta_km1 / alpha_km2;
    const double c_km1 = (1.0 / alpha_km2) * (n_km1 / n_km2);

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double q_kp1_i = sign_kp1 * r_k[i] / n_k;
        const double q_km1_i = sign_km1 * r_km2[i] / n_km2;
        const double d = lhs[i] - (c_kp1 * q_kp1_i + c_k * q_k[i] + c_km1 * q_km1_i);
        acc += d * d;
    }
    return std::sqrt(acc);
}

Summary summarize(const std::vector<IterationRecord>& records) {
    if (records.empty()) throw std::invalid_argument("summarize: empty history");
    Summary out;
    bool any = false;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (const auto& rec : records) {
        if (!rec.rel_err_a_norm) continue;
        const double ratio = *rec.rel_err_a_norm;
        any = true;
        if (!out.iters_to_1e5 && ratio < 1e-5) out.iters_to_1e5 = rec.k;
        if (ratio < min_ratio) min_ratio = ratio;
    }
    if (!any) throw std::invalid_argument("summarize: records carry no error ratios");
    out.min_log10_err = std::log10(min_ratio);
    return out;
}

} // namespace cgv

#include "cgvariants/runner.hpp"

#include "cgvariants/vector_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace cgv {

namespace {

// ring of the last few residuals and scalars for succ_orth and the
// three-term recurrence residual
struct Window {
    DenseVector r_km1, r_km2;
    double alpha_km1 = 0.0, alpha_km2 = 0.0;
    double beta_km1 = 0.0;
    int filled = 0;

    void push(const DenseVector& r, double alpha, double beta) {
        r_km2 = std::move(r_km1);
        alpha_km2 = alpha_km1;
        r_km1 = r;
        alpha_km1 = alpha;
        beta_km1 = beta;
        if (filled < 2) ++filled;
    }
};

} // namespace

ConvergenceHistory run(const VariantConfig& config, const SparseMatrix& a,
                       const Preconditioner& m, const DenseVector& b, const DenseVector& x0,
                       int max_iter, const StopRule& stop, const ProbeOptions& probe_opts) {
    if (max_iter < 0) throw std::invalid_argument("max_iter must be >= 0");
    if (stop.kind == StopRule::Kind::ErrorReduction && !probe_opts.x_star)
        throw std::invalid_argument("error-reduction stop rule needs x*");

    ConvergenceHistory history;
    history.config = config;
    history.precond = m.kind;

    SolverState st = initialize(config, a, m, b, x0);
    if (st.config.is_pipelined() && probe_opts.enabled) st.track_predictions = true;

    ProbeContext ctx;
    ctx.a = &a;
    ctx.m = &m;
    ctx.b = &b;
    ctx.x_star = probe_opts.x_star;
    if (probe_opts.x_star) {
        DenseVector e0(x0.size());
        for (std::size_t i = 0; i < e0.size(); ++i) e0[i] = (*probe_opts.x_star)[i] - x0[i];
        ctx.e0_a_norm = a_norm(a, e0);
        if (ctx.e0_a_norm == 0.0)
            throw std::invalid_argument("x0 already equals x*; error ratios undefined");
    }

    const int cadence = probe_opts.cadence >= 1 ? probe_opts.cadence : 1;
    if (probe_opts.enabled) history.records.push_back(probe(st, ctx));

    Window window;
    window.push(st.r, st.alpha, 0.0);

    // stagnation bookkeeping on the true residual norm
    double best_true_res = history.records.empty()
                               ? 0.0
                               : history.records.front().true_res_norm.value_or(0.0);
    if (!probe_opts.enabled) {
        DenseVector ax = spmv(a, st.x);
        DenseVector res(ax.size());
        for (std::size_t i = 0; i < ax.size(); ++i) res[i] = b[i] - ax[i];
        best_true_res = norm2(res);
    }
    int last_improvement_k = 0;

    const int budget = stop.kind == StopRule::Kind::FixedIterations
                           ? std::min(max_iter, stop.fixed_count)
                           : max_iter;

    while (st.status.running() && st.k < budget) {
        step(st);
        const bool terminal = !st.status.running();

        // quantities the stop rules watch, evaluated every iteration
        std::optional<double> err_ratio;
        std::optional<double> true_res;
        if (stop.kind == StopRule::Kind::ErrorReduction) {
            DenseVector e(st.x.size());
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = (*probe_opts.x_star)[i] - st.x[i];
            err_ratio = a_norm(a, e) / ctx.e0_a_norm;
        } else if (stop.kind == StopRule::Kind::ResidualStagnation) {
            DenseVector ax = spmv(a, st.x);
            DenseVector res(ax.size());
            for (std::size_t i = 0; i < ax.size(); ++i) res[i] = b[i] - ax[i];
            true_res = norm2(res);
        }

        bool stop_now = false;
        SolveStatus stop_status;
        if (err_ratio && *err_ratio < stop.error_threshold) {
            stop_now = true;
            stop_status.state = SolveStatus::State::Converged;
            stop_status.criterion = ConvergedBy::ErrorThreshold;
        }
        if (true_res) {
            if (*true_res < best_true_res * (1.0 - stop.stagnation_improvement)) {
                best_true_res = *true_res;
                last_improvement_k = st.k;
            } else if (st.k - last_improvement_k >= stop.stagnation_window) {
                stop_now = true;
                stop_status.state = SolveStatus::State::Converged;
                stop_status.criterion = ConvergedBy::Stagnation;
            }
        }

        if (probe_opts.enabled && (terminal || stop_now || st.k % cadence == 0)) {
            ctx.prev_r = window.filled >= 1 ? &window.r_km1 : nullptr;
            IterationRecord rec = probe(st, ctx);
            if (window.filled >= 2 && rec.upd_res_norm.value_or(0.0) > 0.0 &&
                norm2(window.r_km1) > 0.0 && norm2(window.r_km2) > 0.0 &&
                window.alpha_km1 != 0.0 && window.alpha_km2 != 0.0) {
                rec.lanczos_res_norm = lanczos_recurrence_residual(
                    a, window.r_km2, window.r_km1, st.r, window.alpha_km2, window.alpha_km1,
                    window.beta_km1, st.k);
            }
            history.records.push_back(std::move(rec));
        }

        window.push(st.r, st.alpha, st.beta);

        if (stop_now && st.status.running()) {
            st.status = stop_status;
            break;
        }
    }

    if (st.status.running()) st.status.state = SolveStatus::State::MaxIterations;
    history.final_status = st.status;
    if (probe_opts.enabled && probe_opts.x_star && !history.records.empty()) {
        bool any = false;
        for (const auto& rec : history.records)
            if (rec.rel_err_a_norm) any = true;
        if (any) history.summary = summarize(history.records);
    }
    return history;
}

} // namespace cgv

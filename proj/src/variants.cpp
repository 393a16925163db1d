#include "cgvariants/variants.hpp"

#include "cgvariants/vector_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace cgv {

VariantConfig VariantConfig::make(Variant v) {
    VariantConfig c;
    c.variant = v;
    switch (v) {
        case Variant::M:
        case Variant::PIPE_PR_M:
            c.nu_expression = NuExpression::Meurant;
            break;
        default:
            c.nu_expression = NuExpression::Simplified;
            break;
    }
    return c;
}

bool VariantConfig::is_predictor() const {
    return variant == Variant::M || variant == Variant::PR || variant == Variant::PIPE_PR_M ||
           variant == Variant::PIPE_PR;
}

bool VariantConfig::is_pipelined() const {
    return variant == Variant::GV || variant == Variant::PIPE_PR_M ||
           variant == Variant::PIPE_PR;
}

void VariantConfig::validate() const {
    const bool pipe_pr = variant == Variant::PIPE_PR || variant == Variant::PIPE_PR_M;
    if (!recompute_w && !pipe_pr)
        throw std::invalid_argument("recompute_w only applies to the pipelined PR variants");
    if (!recompute_nu && !is_predictor())
        throw std::invalid_argument("recompute_nu only applies to predictor variants");
    if (!is_predictor() && nu_expression != NuExpression::Simplified)
        throw std::invalid_argument("nu_expression only applies to predictor variants");
    if (unsimplified_mu && variant != Variant::CG_CG && variant != Variant::GV)
        throw std::invalid_argument("unsimplified_mu only applies to CG_CG and GV");
    if (track_delta && !is_predictor())
        throw std::invalid_argument("track_delta only applies to predictor variants");
}

std::string_view variant_name(Variant v) {
    switch (v) {
        case Variant::HS: return "hs";
        case Variant::CG_CG: return "cg";
        case Variant::M: return "m";
        case Variant::PR: return "pr";
        case Variant::GV: return "gv";
        case Variant::PIPE_PR_M: return "pipe-pr-m";
        case Variant::PIPE_PR: return "pipe-pr";
    }
    return "?";
}

std::optional<Variant> variant_from_name(std::string_view name) {
    if (name == "hs") return Variant::HS;
    if (name == "cg" || name == "cg-cg") return Variant::CG_CG;
    if (name == "m") return Variant::M;
    if (name == "pr") return Variant::PR;
    if (name == "gv") return Variant::GV;
    if (name == "pipe-pr-m" || name == "pprm") return Variant::PIPE_PR_M;
    if (name == "pipe-pr" || name == "ppr") return Variant::PIPE_PR;
    return std::nullopt;
}

std::string describe(const SolveStatus& status) {
    switch (status.state) {
        case SolveStatus::State::Running: return "running";
        case SolveStatus::State::MaxIterations: return "max-iterations";
        case SolveStatus::State::Converged:
            switch (status.criterion) {
                case ConvergedBy::ZeroResidual: return "converged(zero-residual)";
                case ConvergedBy::ErrorThreshold: return "converged(error-threshold)";
                case ConvergedBy::Stagnation: return "converged(stagnation)";
            }
            return "converged";
        case SolveStatus::State::Breakdown:
            switch (status.breakdown) {
                case BreakdownReason::NuPrimeNonPositive: return "breakdown(nu'<=0)";
                case BreakdownReason::NuNonPositive: return "breakdown(nu<=0)";
                case BreakdownReason::MuNonPositive: return "breakdown(mu<=0)";
                case BreakdownReason::NonFinite: return "breakdown(non-finite)";
                case BreakdownReason::None: break;
            }
            return "breakdown";
    }
    return "?";
}

int SolverState::allocated_vectors() const {
    int count = 0;
    for (const DenseVector* v : {&x, &r, &p, &s, &w, &u, &t, &r_tilde, &s_tilde, &w_tilde,
                                 &u_tilde})
        if (!v->empty()) ++count;
    return count;
}

namespace {

void apply_a(SolverState& st, const DenseVector& in, DenseVector& out) {
    spmv(*st.a, in, out);
    ++st.stats.spmv_calls;
}

void apply_a_block(SolverState& st, const DenseVector& in1, const DenseVector& in2,
                   DenseVector& out1, DenseVector& out2) {
    block_spmv(*st.a, in1, in2, out1, out2);
    ++st.stats.block_spmv_calls;
}

void apply_m(SolverState& st, const DenseVector& in, DenseVector& out) {
    st.m->apply(in, out);
    ++st.stats.precond_applies;
}

double reduce_dot(SolverState& st, const DenseVector& x, const DenseVector& y) {
    ++st.stats.reductions;
    return dot(x, y);
}

void fail(SolverState& st, BreakdownReason reason) {
    st.status.state = SolveStatus::State::Breakdown;
    st.status.breakdown = reason;
}

void converge_zero_residual(SolverState& st) {
    st.status.state = SolveStatus::State::Converged;
    st.status.criterion = ConvergedBy::ZeroResidual;
}

// Shared handling for a nonpositive scalar that drives beta: an exactly zero
// value together with an exactly zero residual is clean convergence, anything
// else is the breakdown the predictor variants are known for.
bool settle_nonpositive(SolverState& st, double value, BreakdownReason reason) {
    if (!std::isfinite(value)) {
        fail(st, BreakdownReason::NonFinite);
        return true;
    }
    if (value > 0.0) return false;
    if (value == 0.0 && dot(st.r, st.r) == 0.0)
        converge_zero_residual(st);
    else
        fail(st, reason);
    return true;
}

bool settle_mu(SolverState& st) {
    if (!std::isfinite(st.mu)) {
        fail(st, BreakdownReason::NonFinite);
        return true;
    }
    if (st.mu <= 0.0) {
        fail(st, BreakdownReason::MuNonPositive);
        return true;
    }
    return false;
}

bool finalize_alpha(SolverState& st) {
    st.alpha = st.nu / st.mu;
    if (!std::isfinite(st.alpha) || !std::isfinite(st.beta)) {
        fail(st, BreakdownReason::NonFinite);
        return true;
    }
    return false;
}

double predicted_nu(const SolverState& st) {
    // all operands are the values of iteration k-1
    switch (st.config.nu_expression) {
        case NuExpression::Simplified:
            return st.nu - 2.0 * st.alpha * st.delta + st.alpha * st.alpha * st.gamma;
        case NuExpression::Meurant:
            return -st.nu + st.alpha * st.alpha * st.gamma;
        case NuExpression::Expanded:
            return st.nu - st.alpha * (st.delta + st.delta_hat) +
                   st.alpha * st.alpha * st.gamma;
    }
    return 0.0;
}

void step_hs(SolverState& st) {
    add_scaled(st.x, st.alpha, st.p);  // x_k = x_{k-1} + a p_{k-1}
    sub_scaled(st.r, st.alpha, st.s);  // r_k = r_{k-1} - a s_{k-1}
    if (st.preconditioned) apply_m(st, st.r, st.r_tilde);
    const double nu_next = reduce_dot(st, st.rt(), st.r);
    if (settle_nonpositive(st, nu_next, BreakdownReason::NuNonPositive)) {
        st.nu = nu_next;
        return;
    }
    st.beta = nu_next / st.nu;
    st.nu = nu_next;
    xpby(st.p, st.beta, st.rt()); // p_k = r~_k + b p_{k-1}
    apply_a(st, st.p, st.s);      // s_k = A p_k
    st.mu = reduce_dot(st, st.p, st.s);
    if (settle_mu(st)) return;
    finalize_alpha(st);
}

void step_cg_cg(SolverState& st) {
    add_scaled(st.x, st.alpha, st.p);
    sub_scaled(st.r, st.alpha, st.s);
    if (st.preconditioned) apply_m(st, st.r, st.r_tilde);
    apply_a(st, st.rt(), st.w); // w_k = A r~_k
    const double nu_next = reduce_dot(st, st.rt(), st.r);
    st.eta = reduce_dot(st, st.rt(), st.w);
    if (settle_nonpositive(st, nu_next, BreakdownReason::NuNonPositive)) {
        st.nu = nu_next;
        return;
    }
    st.beta = nu_next / st.nu;
    double d_rs = 0.0;
    double d_pw = 0.0;
    if (st.config.unsimplified_mu) {
        d_rs = reduce_dot(st, st.rt(), st.s); // <r~_k, s_{k-1}>
        d_pw = reduce_dot(st, st.p, st.w);    // <p_{k-1}, w_k>
    }
    const double mu_prev = st.mu;
    st.nu = nu_next;
    xpby(st.p, st.beta, st.rt());
    xpby(st.s, st.beta, st.w); // s_k = w_k + b s_{k-1}
    st.mu = st.config.unsimplified_mu
                ? st.eta + st.beta * (d_rs + d_pw) + st.beta * st.beta * mu_prev
                : st.eta - (st.beta / st.alpha) * st.nu;
    if (settle_mu(st)) return;
    finalize_alpha(st);
}

// PR and (with the Meurant expression) M share this stepper.
void step_pr(SolverState& st) {
    add_scaled(st.x, st.alpha, st.p);
    sub_scaled(st.r, st.alpha, st.s);
    if (st.preconditioned) sub_scaled(st.r_tilde, st.alpha, st.s_tilde);
    st.nu_prime = predicted_nu(st);
    if (settle_nonpositive(st, st.nu_prime, BreakdownReason::NuPrimeNonPositive)) return;
    st.beta = st.nu_prime / st.nu;
    xpby(st.p, st.beta, st.rt());
    apply_a(st, st.p, st.s); // s_k = A p_k
    if (st.preconditioned) apply_m(st, st.s, st.s_tilde);
    st.mu = reduce_dot(st, st.p, st.s);
    if (st.config.nu_expression != NuExpression::Meurant || st.config.track_delta)
        st.delta = reduce_dot(st, st.rt(), st.s);
    if (st.config.nu_expression == NuExpression::Expanded)
        st.delta_hat = reduce_dot(st, st.st(), st.r);
    st.gamma = reduce_dot(st, st.st(), st.s);
    if (settle_mu(st)) return;
    if (st.config.recompute_nu) {
        const double nu_next = reduce_dot(st, st.rt(), st.r);
        if (settle_nonpositive(st, nu_next, BreakdownReason::NuNonPositive)) {
            st.nu = nu_next;
            return;
        }
        st.nu = nu_next;
    } else {
        st.nu = st.nu_prime;
    }
    finalize_alpha(st);
}

void step_gv(SolverState& st) {
    add_scaled(st.x, st.alpha, st.p);
    sub_scaled(st.r, st.alpha, st.s);
    if (st.preconditioned) sub_scaled(st.r_tilde, st.alpha, st.s_tilde);
    sub_scaled(st.w, st.alpha, st.u); // w_k = w_{k-1} - a u_{k-1}
    if (st.preconditioned) apply_m(st, st.w, st.w_tilde);
    const double nu_next = reduce_dot(st, st.rt(), st.r);
    st.eta = reduce_dot(st, st.rt(), st.w);
    apply_a(st, st.wt(), st.t); // t_k = A w~_k
    if (settle_nonpositive(st, nu_next, BreakdownReason::NuNonPositive)) {
        st.nu = nu_next;
        return;
    }
    st.beta = nu_next / st.nu;
    double d_rs = 0.0;
    double d_pw = 0.0;
    if (st.config.unsimplified_mu) {
        d_rs = reduce_dot(st, st.rt(), st.s);
        d_pw = reduce_dot(st, st.p, st.w);
    }
    const double mu_prev = st.mu;
    st.nu = nu_next;
    xpby(st.p, st.beta, st.rt());
    xpby(st.s, st.beta, st.w); // s_k = w_k + b s_{k-1}
    if (st.preconditioned) xpby(st.s_tilde, st.beta, st.w_tilde);
    xpby(st.u, st.beta, st.t); // u_k = t_k + b u_{k-1}
    st.mu = st.config.unsimplified_mu
                ? st.eta + st.beta * (d_rs + d_pw) + st.beta * st.beta * mu_prev
                : st.eta - (st.beta / st.alpha) * st.nu;
    if (settle_mu(st)) return;
    finalize_alpha(st);
}

// pipe-PR and (with the Meurant expression) pipe-PR-M share this stepper.
// Scalars are produced first, then all vector updates, then the fused matrix
// products together with the recomputation, then the reductions.
void step_pipe_pr(SolverState& st) {
    st.nu_prime = predicted_nu(st);
    const double beta_next = st.nu_prime / st.nu;

    add_scaled(st.x, st.alpha, st.p);
    sub_scaled(st.r, st.alpha, st.s);
    if (st.preconditioned) sub_scaled(st.r_tilde, st.alpha, st.s_tilde);
    sub_scaled(st.w, st.alpha, st.u); // w'_k kept in w storage
    if (st.preconditioned) sub_scaled(st.w_tilde, st.alpha, st.u_tilde);
    if (st.track_predictions && st.config.recompute_w) st.w_pred = st.w;

    if (settle_nonpositive(st, st.nu_prime, BreakdownReason::NuPrimeNonPositive)) return;
    st.beta = beta_next;

    xpby(st.p, st.beta, st.rt());
    xpby(st.s, st.beta, st.w); // s_k = w'_k + b s_{k-1}
    if (st.preconditioned) xpby(st.s_tilde, st.beta, st.w_tilde);

    if (st.config.recompute_w) {
        apply_a_block(st, st.st(), st.rt(), st.u, st.w); // u_k = A s~_k, w_k = A r~_k
        if (st.preconditioned) {
            apply_m(st, st.u, st.u_tilde);
            apply_m(st, st.w, st.w_tilde);
        }
    } else {
        apply_a(st, st.st(), st.u); // u_k = A s~_k; w stays at the prediction
        if (st.preconditioned) apply_m(st, st.u, st.u_tilde);
    }

    st.mu = reduce_dot(st, st.p, st.s);
    if (st.config.nu_expression != NuExpression::Meurant || st.config.track_delta)
        st.delta = reduce_dot(st, st.rt(), st.s);
    if (st.config.nu_expression == NuExpression::Expanded)
        st.delta_hat = reduce_dot(st, st.st(), st.r);
    st.gamma = reduce_dot(st, st.st(), st.s);
    if (settle_mu(st)) return;
    if (st.config.recompute_nu) {
        const double nu_next = reduce_dot(st, st.rt(), st.r);
        if (settle_nonpositive(st, nu_next, BreakdownReason::NuNonPositive)) {
            st.nu = nu_next;
            return;
        }
        st.nu = nu_next;
    } else {
        st.nu = st.nu_prime;
    }
    finalize_alpha(st);
}

} // namespace

SolverState initialize(const VariantConfig& config, const SparseMatrix& a,
                       const Preconditioner& m, const DenseVector& b, const DenseVector& x0) {
    config.validate();
    if (b.size() != static_cast<std::size_t>(a.n) || x0.size() != static_cast<std::size_t>(a.n))
        throw std::invalid_argument("right-hand side or initial guess dimension mismatch");
    if (m.kind == Preconditioner::Kind::Jacobi &&
        m.inv_diag.size() != static_cast<std::size_t>(a.n))
        throw std::invalid_argument("preconditioner dimension mismatch");

    SolverState st;
    st.config = config;
    st.a = &a;
    st.m = &m;
    st.preconditioned = !m.is_identity();
    st.n = a.n;

    const Variant v = config.variant;
    const bool pipelined_pr = v == Variant::PIPE_PR || v == Variant::PIPE_PR_M;
    const bool needs_s_tilde = st.preconditioned && v != Variant::HS && v != Variant::CG_CG;

    st.x = x0;
    st.r.resize(st.n);
    apply_a(st, st.x, st.r); // r0 = b - A x0
    for (Index i = 0; i < st.n; ++i) st.r[i] = b[i] - st.r[i];
    if (st.preconditioned) {
        st.r_tilde.resize(st.n);
        apply_m(st, st.r, st.r_tilde);
    }

    st.nu = reduce_dot(st, st.rt(), st.r);
    if (settle_nonpositive(st, st.nu, BreakdownReason::NuNonPositive)) return st;

    st.p = st.rt();
    st.s.resize(st.n);
    apply_a(st, st.p, st.s); // s0 = A p0
    st.mu = reduce_dot(st, st.p, st.s);
    if (settle_mu(st)) return st;
    st.alpha = st.nu / st.mu;

    if (needs_s_tilde) {
        st.s_tilde.resize(st.n);
        apply_m(st, st.s, st.s_tilde);
    }

    switch (v) {
        case Variant::HS:
            break;
        case Variant::CG_CG:
            st.w.resize(st.n); // filled by the first step
            break;
        case Variant::M:
        case Variant::PR:
            if (v == Variant::PR || config.nu_expression != NuExpression::Meurant ||
                config.track_delta)
                st.delta = reduce_dot(st, st.rt(), st.s);
            if (config.nu_expression == NuExpression::Expanded)
                st.delta_hat = reduce_dot(st, st.st(), st.r);
            st.gamma = reduce_dot(st, st.st(), st.s);
            break;
        case Variant::GV:
            st.w.resize(st.n);
            apply_a(st, st.rt(), st.w); // w0 = A r~0
            st.u.resize(st.n);
            apply_a(st, st.st(), st.u); // u0 = A s~0
            st.t.resize(st.n);
            if (st.preconditioned) st.w_tilde.resize(st.n);
            break;
        case Variant::PIPE_PR_M:
        case Variant::PIPE_PR:
            st.w.resize(st.n);
            apply_a(st, st.rt(), st.w);
            if (st.preconditioned) {
                st.w_tilde.resize(st.n);
                apply_m(st, st.w, st.w_tilde);
            }
            st.u.resize(st.n);
            apply_a(st, st.st(), st.u);
            if (st.preconditioned) {
                st.u_tilde.resize(st.n);
                apply_m(st, st.u, st.u_tilde);
            }
            if (config.nu_expression != NuExpression::Meurant || config.track_delta)
                st.delta = reduce_dot(st, st.rt(), st.s);
            if (config.nu_expression == NuExpression::Expanded)
                st.delta_hat = reduce_dot(st, st.st(), st.r);
            st.gamma = reduce_dot(st, st.st(), st.s);
            break;
    }
    (void)pipelined_pr;
    return st;
}

void step(SolverState& st) {
    if (!st.status.running()) throw std::logic_error("step() on a terminated solver");
    ++st.k;
    switch (st.config.variant) {
        case Variant::HS: step_hs(st); break;
        case Variant::CG_CG: step_cg_cg(st); break;
        case Variant::M:
        case Variant::PR: step_pr(st); break;
        case Variant::GV: step_gv(st); break;
        case Variant::PIPE_PR_M:
        case Variant::PIPE_PR: step_pipe_pr(st); break;
    }
}

} // namespace cgv

#pragma once

#include "cgvariants/diagnostics.hpp"
#include "cgvariants/variants.hpp"

namespace cgv {

struct StopRule {
    enum class Kind { FixedIterations, ErrorReduction, ResidualStagnation };

    Kind kind = Kind::ResidualStagnation;
    int fixed_count = 0;
    double error_threshold = 1e-5; // on ||e_k||_A/||e_0||_A, needs x*
    int stagnation_window = 50;
    double stagnation_improvement = 0.01;

    static StopRule fixed(int count) {
        StopRule r;
        r.kind = Kind::FixedIterations;
        r.fixed_count = count;
        return r;
    }
    static StopRule error_reduction(double threshold) {
        StopRule r;
        r.kind = Kind::ErrorReduction;
        r.error_threshold = threshold;
        return r;
    }
    static StopRule stagnation(int window = 50, double improvement = 0.01) {
        StopRule r;
        r.kind = Kind::ResidualStagnation;
        r.stagnation_window = window;
        r.stagnation_improvement = improvement;
        return r;
    }
};

struct ProbeOptions {
    int cadence = 1;                     // record every m-th iteration
    const DenseVector* x_star = nullptr; // exact solution, enables error ratios
    bool enabled = true;
};

/// Drives the stepper for up to max_iter iterations, probing per cadence
/// (iteration 0 and the final iteration are always probed) and applying the
/// stop rule. Breakdown is reported in the returned history, not thrown.
ConvergenceHistory run(const VariantConfig& config, const SparseMatrix& a,
                       const Preconditioner& m, const DenseVector& b, const DenseVector& x0,
                       int max_iter, const StopRule& stop, const ProbeOptions& probe_opts);

} // namespace cgv

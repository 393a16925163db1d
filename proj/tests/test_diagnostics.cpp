#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cgvariants/diagnostics.hpp"
#include "cgvariants/model_problem.hpp"
#include "cgvariants/runner.hpp"
#include "cgvariants/vector_ops.hpp"
#include "oracles.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace cgv;

namespace {

struct ModelSetup {
    SparseMatrix a;
    Preconditioner m = Preconditioner::identity();
    DenseVector x_star, b, x0;

    explicit ModelSetup(std::uint64_t seed, Index n = 48, double rho = 0.8,
                        double kappa = 1e3) {
        a = build_model_problem({.n = n, .rho = rho, .kappa = kappa, .seed = seed}).a;
        x_star.assign(static_cast<std::size_t>(n), 1.0 / std::sqrt(static_cast<double>(n)));
        b.resize(static_cast<std::size_t>(n));
        spmv(a, x_star, b);
        x0.assign(static_cast<std::size_t>(n), 0.0);
    }

    ProbeOptions probe() {
        ProbeOptions p;
        p.x_star = &x_star;
        return p;
    }
};

double max_abs_nu_gap(const ConvergenceHistory& h) {
    double m = 0.0;
    for (const auto& rec : h.records)
        if (rec.nu_gap) m = std::max(m, std::abs(*rec.nu_gap));
    return m;
}

double max_w_gap(const ConvergenceHistory& h) {
    double m = 0.0;
    for (const auto& rec : h.records)
        if (rec.w_gap_norm) m = std::max(m, *rec.w_gap_norm);
    return m;
}

} // namespace

TEST_CASE("residual gap at initialization is at roundoff scale") {
    ModelSetup setup(3);
    SolverState st =
        initialize(VariantConfig::make(Variant::HS), setup.a, setup.m, setup.b, setup.x0);
    ProbeContext ctx{.a = &setup.a, .m = &setup.m, .b = &setup.b};
    const IterationRecord rec = probe(st, ctx);
    const double bound = 48 * 0x1.0p-53 *
                         (norm2(setup.b) + frobenius_norm(setup.a) * norm2(setup.x0));
    CHECK(rec.residual_gap_norm.value() <= bound);
    CHECK(rec.k == 0);
    CHECK_FALSE(rec.beta.has_value());
    CHECK_FALSE(rec.nu_gap.has_value());
    CHECK_FALSE(rec.w_gap_norm.has_value()); // not a pipelined variant
}

TEST_CASE("residual gap agrees with a dense-path recomputation to 0 ulp") {
    ModelSetup setup(5, 32, 0.9, 100.0);
    SolverState st =
        initialize(VariantConfig::make(Variant::PR), setup.a, setup.m, setup.b, setup.x0);
    const auto dense = oracle::DenseMatrix::from_sparse(setup.a);
    ProbeContext ctx{.a = &setup.a, .m = &setup.m, .b = &setup.b};
    for (int k = 0; k < 25; ++k) {
        const IterationRecord rec = probe(st, ctx);
        // independent dense implementation, same per-term order
        const DenseVector ax = dense.multiply(st.x);
        DenseVector gap(ax.size());
        for (std::size_t i = 0; i < ax.size(); ++i) gap[i] = (setup.b[i] - ax[i]) - st.r[i];
        CHECK(rec.residual_gap_norm.value() == norm2(gap));
        step(st);
        REQUIRE(st.status.running());
    }
}

TEST_CASE("probe fields are marked absent per variant") {
    ModelSetup setup(6, 24, 0.9, 100.0);
    ProbeContext ctx{.a = &setup.a, .m = &setup.m, .b = &setup.b};

    SolverState hs =
        initialize(VariantConfig::make(Variant::HS), setup.a, setup.m, setup.b, setup.x0);
    step(hs);
    const IterationRecord hs_rec = probe(hs, ctx);
    CHECK_FALSE(hs_rec.nu_gap.has_value());
    CHECK_FALSE(hs_rec.w_gap_norm.has_value());
    CHECK_FALSE(hs_rec.s_gap_norm.has_value());
    CHECK_FALSE(hs_rec.rel_err_a_norm.has_value()); // no x* in context

    SolverState gv =
        initialize(VariantConfig::make(Variant::GV), setup.a, setup.m, setup.b, setup.x0);
    step(gv);
    const IterationRecord gv_rec = probe(gv, ctx);
    CHECK_FALSE(gv_rec.nu_gap.has_value()); // GV has no predicted scalar
    CHECK(gv_rec.w_gap_norm.has_value());
    CHECK(gv_rec.s_gap_norm.has_value());

    SolverState ppr =
        initialize(VariantConfig::make(Variant::PIPE_PR), setup.a, setup.m, setup.b, setup.x0);
    ppr.track_predictions = true;
    step(ppr);
    const IterationRecord ppr_rec = probe(ppr, ctx);
    CHECK(ppr_rec.nu_gap.has_value());
    CHECK(ppr_rec.w_gap_norm.has_value());
    CHECK(ppr_rec.s_gap_norm.has_value());
}

TEST_CASE("probe requires x* for error ratios") {
    ModelSetup setup(8, 16, 0.9, 50.0);
    SolverState st =
        initialize(VariantConfig::make(Variant::HS), setup.a, setup.m, setup.b, setup.x0);
    ProbeContext ctx{.a = &setup.a, .m = &setup.m, .b = &setup.b, .x_star = &setup.x_star};
    CHECK_THROWS_AS((void)probe(st, ctx), std::invalid_argument); // e0 norm missing
    ctx.e0_a_norm = a_norm(setup.a, setup.x_star);
    CHECK(probe(st, ctx).rel_err_a_norm.value() == doctest::Approx(1.0));
}

TEST_CASE("nu recomputation keeps the nu gap at local roundoff") {
    ModelSetup setup(11);
    const int budget = 400;

    VariantConfig with = VariantConfig::make(Variant::PR);
    VariantConfig without = VariantConfig::make(Variant::PR);
    without.recompute_nu = false;

    const auto h_with = run(with, setup.a, setup.m, setup.b, setup.x0, budget,
                            StopRule::fixed(budget), setup.probe());
    const auto h_without = run(without, setup.a, setup.m, setup.b, setup.x0, budget,
                               StopRule::fixed(budget), setup.probe());

    CHECK(max_abs_nu_gap(h_with) <= max_abs_nu_gap(h_without));

    // during convergence (before stagnation) the recomputed gap tracks nu
    // within a modest multiple of machine precision
    const int until = h_with.summary && h_with.summary->iters_to_1e5
                          ? *h_with.summary->iters_to_1e5
                          : budget / 2;
    for (const auto& rec : h_with.records) {
        if (rec.k == 0 || rec.k > until) continue;
        REQUIRE(rec.nu_gap.has_value());
        CHECK(std::abs(*rec.nu_gap) <= 1e3 * 0x1.0p-53 * rec.nu.value());
    }
}

TEST_CASE("w recomputation resets the w gap while the ablation accumulates it") {
    ModelSetup setup(12);
    const int budget = 300;

    VariantConfig with = VariantConfig::make(Variant::PIPE_PR);
    VariantConfig without = VariantConfig::make(Variant::PIPE_PR);
    without.recompute_w = false;

    const auto h_with = run(with, setup.a, setup.m, setup.b, setup.x0, budget,
                            StopRule::fixed(budget), setup.probe());
    const auto h_without = run(without, setup.a, setup.m, setup.b, setup.x0, budget,
                               StopRule::fixed(budget), setup.probe());

    // dominance of the overall maximum (both runs share the early peak)
    CHECK(max_w_gap(h_with) <= max_w_gap(h_without));

    // the reset shows in the tail: recomputation lets the gap decay with the
    // residual, the ablation sits on its accumulated floor
    const int end = std::min(h_with.records.back().k, h_without.records.back().k);
    auto tail_max = [&](const ConvergenceHistory& h) {
        double m = 0.0;
        for (const auto& rec : h.records)
            if (rec.k >= end / 2 && rec.k <= end && rec.w_gap_norm)
                m = std::max(m, *rec.w_gap_norm);
        return m;
    };
    CHECK(tail_max(h_with) * 10.0 <= tail_max(h_without));
}

TEST_CASE("lanczos residual vanishes on an exact-arithmetic window") {
    // run the 512-bit reference CG and evaluate the recurrence on its
    // rounded-to-double residuals and scalars
    const SparseMatrix a = oracle::random_spd(24, 100.0, 4);
    const Preconditioner m = Preconditioner::identity();
    std::mt19937_64 eng(9);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DenseVector b(24);
    for (auto& v : b) v = dist(eng);
    const DenseVector x0(24, 0.0);

    oracle::HighPrecCg ref(a, m, b, x0);
    const DenseVector r0 = ref.r();
    const double alpha0 = ref.alpha();
    ref.step();
    const DenseVector r1 = ref.r();
    const double alpha1 = ref.alpha();
    ref.step();
    const DenseVector r2 = ref.r();

    // beta_1 = <r1,r1>/<r0,r0> evaluated in extended precision
    const double beta1 = oracle::exact_dot_ratio(r1, r1, r0, r0);
    const double res = lanczos_recurrence_residual(a, r0, r1, r2, alpha0, alpha1, beta1, 2);
    CHECK(res <= 1e-12);
}

TEST_CASE("degenerate window stays finite") {
    const SparseMatrix a = oracle::random_spd(8, 10.0, 3);
    DenseVector r(8, 0.5);
    // r_{k-1} = r_{k-2}, consistent alpha and beta = 1
    const double res = lanczos_recurrence_residual(a, r, r, r, 1.0, 1.0, 1.0, 4);
    CHECK(std::isfinite(res));
    CHECK_THROWS_AS(
        (void)lanczos_recurrence_residual(a, DenseVector(8, 0.0), r, r, 1.0, 1.0, 1.0, 4),
        std::invalid_argument);
    CHECK_THROWS_AS((void)lanczos_recurrence_residual(a, r, r, r, 1.0, 1.0, 1.0, 1),
                    std::invalid_argument);
}

TEST_CASE("hs keeps successive residuals nearly orthogonal on the model problem") {
    ModelSetup setup(14);
    const auto h = run(VariantConfig::make(Variant::HS), setup.a, setup.m, setup.b, setup.x0,
                       400, StopRule::fixed(400), setup.probe());
    const int until = h.summary && h.summary->iters_to_1e5 ? *h.summary->iters_to_1e5 : 200;
    for (const auto& rec : h.records) {
        if (!rec.succ_orth || rec.k > until) continue;
        CHECK(std::abs(*rec.succ_orth) <= 1e-2);
    }
}

TEST_CASE("summarize finds the crossing and the minimum") {
    SUBCASE("geometric sequence 10^(-k/4)") {
        std::vector<IterationRecord> records;
        for (int k = 0; k <= 40; ++k) {
            IterationRecord rec;
            rec.k = k;
            rec.rel_err_a_norm = std::pow(10.0, -k / 4.0);
            records.push_back(rec);
        }
        const Summary s = summarize(records);
        REQUIRE(s.iters_to_1e5.has_value());
        CHECK(*s.iters_to_1e5 == 21); // first k with k/4 > 5
        CHECK(s.min_log10_err == doctest::Approx(-10.0));
    }
    SUBCASE("never crossing") {
        std::vector<IterationRecord> records;
        for (int k = 0; k <= 5; ++k) {
            IterationRecord rec;
            rec.k = k;
            rec.rel_err_a_norm = 0.5 / (k + 1);
            records.push_back(rec);
        }
        const Summary s = summarize(records);
        CHECK_FALSE(s.iters_to_1e5.has_value());
        CHECK(s.min_log10_err == doctest::Approx(std::log10(0.5 / 6)));
    }
    SUBCASE("empty history throws") {
        CHECK_THROWS_AS((void)summarize({}), std::invalid_argument);
    }
}

TEST_CASE("gv violates the three-term recurrence more than hs on a hard problem") {
    // paired runs on the clustered model problem; the claim is directional
    ModelSetup setup(15);
    const auto h_hs = run(VariantConfig::make(Variant::HS), setup.a, setup.m, setup.b,
                          setup.x0, 120, StopRule::fixed(120), setup.probe());
    const auto h_gv = run(VariantConfig::make(Variant::GV), setup.a, setup.m, setup.b,
                          setup.x0, 120, StopRule::fixed(120), setup.probe());
    auto median_lanczos = [](const ConvergenceHistory& h) {
        std::vector<double> vals;
        for (const auto& rec : h.records)
            if (rec.lanczos_res_norm) vals.push_back(*rec.lanczos_res_norm);
        REQUIRE(!vals.empty());
        std::sort(vals.begin(), vals.end());
        return vals[vals.size() / 2];
    };
    CHECK(median_lanczos(h_gv) >= 10.0 * median_lanczos(h_hs));
}

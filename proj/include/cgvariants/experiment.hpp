#pragma once

#include "cgvariants/diagnostics.hpp"
#include "cgvariants/fetch.hpp"
#include "cgvariants/model_problem.hpp"
#include "cgvariants/runner.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cgv {

struct ProblemSource {
    enum class Kind { MatrixMarketName, MatrixMarketFile, Model };

    Kind kind = Kind::MatrixMarketName;
    std::string name;            // matrix name, or a label for the other kinds
    std::filesystem::path file;  // MatrixMarketFile
    ModelProblemSpec model;      // Model

    static ProblemSource by_name(std::string n);
    static ProblemSource from_file(std::filesystem::path p, std::string label = "");
    static ProblemSource from_model(const ModelProblemSpec& spec);
};

struct ExperimentConfig {
    ProblemSource problem;
    Preconditioner::Kind precond = Preconditioner::Kind::Identity;
    std::vector<VariantConfig> variants; // empty means all seven
    /// 0 means automatic: 4x the reference iteration budget for bundled
    /// problems, 10n otherwise.
    int max_iter = 0;
    StopRule stop = StopRule::stagnation();
    int probe_cadence = 1;
    /// Default right-hand side: b = A x* with x* = (1/sqrt(n),...,1/sqrt(n)),
    /// x0 = 0. The alternative drops x* (b = ones), disabling error ratios.
    enum class RhsRule { SolutionInvSqrtN, OnesRhs } rhs = RhsRule::SolutionInvSqrtN;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";
    std::filesystem::path cache_dir = "matrices";
    std::string base_url = kDefaultBaseUrl;
    int jobs = 1; // variants solved in parallel; output is written serially
};

/// Reads a JSON experiment file ("//" and "/* */" comments allowed).
ExperimentConfig load_config(const std::filesystem::path& path);

struct SummaryCell {
    std::optional<int> iterations; // absent: never reached the accuracy
    double min_log10_err = 0.0;
    bool bold_iterations = false; // differs from HS by more than ten percent
    bool bold_err = false;
    bool breakdown = false;
};

struct SummaryRow {
    std::string problem;
    Preconditioner::Kind precond = Preconditioner::Kind::Identity;
    Index n = 0;
    Index nnz = 0;
    std::vector<std::string> variant_names;
    std::vector<SummaryCell> cells;
};

/// Recomputes the bold flags of `row` against its HS column (no-op when HS
/// is not among the variants).
void apply_deviation_flags(SummaryRow& row);

struct ExperimentResult {
    std::vector<ConvergenceHistory> histories;
    SummaryRow row;
    std::vector<std::filesystem::path> csv_paths;
};

/// Runs every requested variant on the same A, M, b, x0, writes one CSV per
/// variant into output_dir and produces the summary row. A breakdown in one
/// variant is recorded in the row and does not abort the batch.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                Transport* transport = nullptr);

/// CSV with the fixed column set
///   k,rel_err_a_norm,true_res_norm,upd_res_norm,residual_gap_norm,nu_gap,
///   w_gap_norm,s_gap_norm,lanczos_res_norm,succ_orth,alpha,beta,nu,nu_prime
/// Absent fields are empty cells; doubles round-trip exactly.
void emit_csv(const ConvergenceHistory& history, std::ostream& out);
void emit_csv_file(const ConvergenceHistory& history, const std::filesystem::path& path);
std::vector<IterationRecord> parse_csv(std::istream& in);

void emit_table(const std::vector<SummaryRow>& rows, std::ostream& out);

/// Long-format CSV (variant,k,metric,value) for plotting tools.
void emit_plot_data(const std::vector<ConvergenceHistory>& histories, std::ostream& out);

/// Name used for output files: <problem>_<precond>_<variant-with-flags>.csv
std::string history_file_stem(const ConvergenceHistory& history);

/// Reference iteration budget for the bundled problems (HS iteration counts
/// observed at 1e-5 error reduction); used to bound run-to-stagnation loops.
std::optional<int> reference_iterations(const std::string& problem,
                                        Preconditioner::Kind precond);

} // namespace cgv

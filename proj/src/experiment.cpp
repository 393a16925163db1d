#include "cgvariants/experiment.hpp"

#include "cgvariants/matrix_market.hpp"
#include "cgvariants/vector_ops.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>

namespace cgv {

using nlohmann::json;

ProblemSource ProblemSource::by_name(std::string n) {
    ProblemSource p;
    p.kind = Kind::MatrixMarketName;
    p.name = std::move(n);
    return p;
}

ProblemSource ProblemSource::from_file(std::filesystem::path path, std::string label) {
    ProblemSource p;
    p.kind = Kind::MatrixMarketFile;
    p.file = std::move(path);
    p.name = label.empty() ? p.file.stem().string() : std::move(label);
    return p;
}

ProblemSource ProblemSource::from_model(const ModelProblemSpec& spec) {
    ProblemSource p;
    p.kind = Kind::Model;
    p.model = spec;
    std::ostringstream label;
    label << "model-n" << spec.n << "-rho" << spec.rho << "-kappa" << spec.kappa;
    p.name = label.str();
    return p;
}

namespace {

// HS iteration counts at the 1e-5 error reduction for the bundled problems,
// keyed (name, preconditioned). Used only to size iteration budgets.
struct RefEntry {
    const char* name;
    int plain;
    int jacobi;
};
constexpr RefEntry kReferenceIterations[] = {
    {"1138_bus", 1721, 734}, {"494_bus", 898, 371},   {"662_bus", 443, 166},
    {"685_bus", 437, 192},   {"bcsstk03", 364, 118},  {"bcsstk14", 3982, 198},
    {"bcsstk15", 5702, 442}, {"bcsstk16", 429, 132},  {"bcsstk17", 17568, 2203},
    {"bcsstk18", 42525, 536},{"bcsstk27", 519, 173},  {"bcsstm19", 274, -1},
    {"bcsstm20", 203, -1},   {"bcsstm21", 3, -1},     {"bcsstm22", 43, -1},
    {"bcsstm23", 1325, -1},  {"bcsstm24", 1573, -1},  {"bcsstm25", 10089, -1},
    {"model_48_8_3", 43, 49},{"nos1", 1846, 306},     {"nos2", 29829, 3047},
    {"nos3", 221, 186},      {"nos4", 72, 67},        {"nos5", 315, 136},
    {"nos6", 551, 71},       {"nos7", 2869, 67},      {"s1rmq4m1", 3406, 595},
    {"s1rmt3m1", 3890, 674}, {"s2rmq4m1", 10476, 1437},{"s2rmt3m1", 14484, 2030},
    {"s3dkq4m2", -1, 25527}, {"s3dkt3m2", -1, 36195}, {"s3rmq4m1", 26628, 5743},
    {"s3rmt3m1", 38459, 8827},{"s3rmt3m3", 69095, 10251},
};

std::vector<VariantConfig> all_variants() {
    std::vector<VariantConfig> out;
    for (Variant v : {Variant::HS, Variant::CG_CG, Variant::M, Variant::PR, Variant::GV,
                      Variant::PIPE_PR_M, Variant::PIPE_PR})
        out.push_back(VariantConfig::make(v));
    return out;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void append_cell(std::string& line, const std::optional<double>& v) {
    line.push_back(',');
    if (v) line += format_double(*v);
}

std::string config_suffix(const VariantConfig& c) {
    std::string s(variant_name(c.variant));
    const VariantConfig defaults = VariantConfig::make(c.variant);
    if (c.recompute_nu != defaults.recompute_nu) s += "_nonurec";
    if (c.recompute_w != defaults.recompute_w) s += "_nowrec";
    if (c.nu_expression != defaults.nu_expression) {
        switch (c.nu_expression) {
            case NuExpression::Expanded: s += "_expanded"; break;
            case NuExpression::Simplified: s += "_simplified"; break;
            case NuExpression::Meurant: s += "_meurant"; break;
        }
    }
    if (c.unsimplified_mu) s += "_unsimpl-mu";
    return s;
}

} // namespace

std::optional<int> reference_iterations(const std::string& problem,
                                        Preconditioner::Kind precond) {
    for (const auto& e : kReferenceIterations) {
        if (problem == e.name) {
            const int v = precond == Preconditioner::Kind::Jacobi ? e.jacobi : e.plain;
            if (v > 0) return v;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::string history_file_stem(const ConvergenceHistory& history) {
    std::string stem = history.problem_id;
    for (char& c : stem)
        if (c == '/' || c == ' ') c = '-';
    stem += "_";
    stem += preconditioner_name(history.precond);
    stem += "_";
    stem += config_suffix(history.config);
    return stem;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path.string());
    json j = json::parse(in, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);

    ExperimentConfig cfg;
    const auto& problem = j.at("problem");
    if (problem.contains("matrix")) {
        cfg.problem = ProblemSource::by_name(problem.at("matrix").get<std::string>());
    } else if (problem.contains("file")) {
        cfg.problem = ProblemSource::from_file(problem.at("file").get<std::string>(),
                                               problem.value("label", std::string{}));
    } else if (problem.contains("model")) {
        const auto& m = problem.at("model");
        ModelProblemSpec spec;
        spec.n = m.value("n", 48);
        spec.rho = m.value("rho", 0.8);
        spec.kappa = m.value("kappa", 1e3);
        spec.seed = m.value("seed", 0);
        cfg.problem = ProblemSource::from_model(spec);
    } else {
        throw std::invalid_argument("config: problem needs 'matrix', 'file' or 'model'");
    }

    const std::string precond = j.value("preconditioner", "none");
    if (precond == "none")
        cfg.precond = Preconditioner::Kind::Identity;
    else if (precond == "jacobi")
        cfg.precond = Preconditioner::Kind::Jacobi;
    else
        throw std::invalid_argument("config: unknown preconditioner '" + precond + "'");

    if (j.contains("variants")) {
        for (const auto& v : j.at("variants")) {
            std::string name;
            VariantConfig vc;
            if (v.is_string()) {
                name = v.get<std::string>();
            } else {
                name = v.at("name").get<std::string>();
            }
            const auto variant = variant_from_name(name);
            if (!variant)
                throw std::invalid_argument("config: unknown variant '" + name + "'");
            vc = VariantConfig::make(*variant);
            if (v.is_object()) {
                vc.recompute_nu = v.value("recompute_nu", vc.recompute_nu);
                vc.recompute_w = v.value("recompute_w", vc.recompute_w);
                vc.unsimplified_mu = v.value("unsimplified_mu", vc.unsimplified_mu);
                if (v.contains("nu_expression")) {
                    const std::string e = v.at("nu_expression").get<std::string>();
                    if (e == "expanded")
                        vc.nu_expression = NuExpression::Expanded;
                    else if (e == "simplified")
                        vc.nu_expression = NuExpression::Simplified;
                    else if (e == "meurant")
                        vc.nu_expression = NuExpression::Meurant;
                    else
                        throw std::invalid_argument("config: unknown nu_expression '" + e + "'");
                }
            }
            vc.validate();
            cfg.variants.push_back(vc);
        }
    }

    cfg.max_iter = j.value("max_iter", 0);
    if (j.contains("stop")) {
        const auto& s = j.at("stop");
        const std::string kind = s.value("kind", "stagnation");
        if (kind == "fixed")
            cfg.stop = StopRule::fixed(s.value("count", 0));
        else if (kind == "error")
            cfg.stop = StopRule::error_reduction(s.value("threshold", 1e-5));
        else if (kind == "stagnation")
            cfg.stop = StopRule::stagnation(s.value("window", 50), s.value("improvement", 0.01));
        else
            throw std::invalid_argument("config: unknown stop rule '" + kind + "'");
    }
    cfg.probe_cadence = j.value("probe_cadence", 1);
    const std::string rhs = j.value("rhs", "solution-inv-sqrt-n");
    if (rhs == "solution-inv-sqrt-n")
        cfg.rhs = ExperimentConfig::RhsRule::SolutionInvSqrtN;
    else if (rhs == "ones")
        cfg.rhs = ExperimentConfig::RhsRule::OnesRhs;
    else
        throw std::invalid_argument("config: unknown rhs rule '" + rhs + "'");
    cfg.seed = j.value("seed", 0);
    cfg.output_dir = j.value("output_dir", std::string("out"));
    cfg.cache_dir = j.value("cache_dir", std::string("matrices"));
    cfg.base_url = j.value("base_url", std::string(kDefaultBaseUrl));
    cfg.jobs = j.value("jobs", 1);
    return cfg;
}

void apply_deviation_flags(SummaryRow& row) {
    int hs_index = -1;
    for (std::size_t i = 0; i < row.variant_names.size(); ++i)
        if (row.variant_names[i] == "hs") hs_index = static_cast<int>(i);
    if (hs_index < 0) return;
    const SummaryCell& hs = row.cells[hs_index];
    for (auto& cell : row.cells) {
        cell.bold_iterations = false;
        cell.bold_err = false;
        if (hs.iterations && cell.iterations) {
            const double ref = static_cast<double>(*hs.iterations);
            cell.bold_iterations = std::abs(*cell.iterations - ref) > 0.1 * ref;
        } else if (hs.iterations && !cell.iterations) {
            cell.bold_iterations = true;
        }
        cell.bold_err =
            std::abs(cell.min_log10_err - hs.min_log10_err) > 0.1 * std::abs(hs.min_log10_err);
    }
}

ExperimentResult run_experiment(const ExperimentConfig& config, Transport* transport) {
    // resolve the operator
    SparseMatrix a;
    switch (config.problem.kind) {
        case ProblemSource::Kind::MatrixMarketName: {
            const std::filesystem::path cached =
                config.cache_dir / (config.problem.name + ".mtx");
            if (std::filesystem::exists(cached)) {
                a = read_matrix_market_file(cached);
            } else {
                std::unique_ptr<Transport> owned;
                if (!transport) {
                    owned = make_https_transport();
                    transport = owned.get();
                }
                a = read_matrix_market_file(fetch_matrix(config.problem.name, config.cache_dir,
                                                         *transport, config.base_url));
            }
            break;
        }
        case ProblemSource::Kind::MatrixMarketFile:
            a = read_matrix_market_file(config.problem.file);
            break;
        case ProblemSource::Kind::Model: {
            ModelProblemSpec spec = config.problem.model;
            if (spec.seed == 0) spec.seed = config.seed;
            a = build_model_problem(spec).a;
            break;
        }
    }

    const Index n = a.n;
    const Preconditioner m = config.precond == Preconditioner::Kind::Jacobi
                                 ? Preconditioner::jacobi(a)
                                 : Preconditioner::identity();

    DenseVector x_star;
    DenseVector b(static_cast<std::size_t>(n));
    if (config.rhs == ExperimentConfig::RhsRule::SolutionInvSqrtN) {
        x_star.assign(static_cast<std::size_t>(n), 1.0 / std::sqrt(static_cast<double>(n)));
        spmv(a, x_star, b);
    } else {
        b.assign(static_cast<std::size_t>(n), 1.0);
    }
    const DenseVector x0(static_cast<std::size_t>(n), 0.0);

    int max_iter = config.max_iter;
    if (max_iter <= 0) {
        const auto ref = reference_iterations(config.problem.name, config.precond);
        max_iter = ref ? 4 * *ref : static_cast<int>(10 * n);
    }

    std::vector<VariantConfig> variants =
        config.variants.empty() ? all_variants() : config.variants;

    ProbeOptions probe;
    probe.cadence = config.probe_cadence;
    probe.x_star = x_star.empty() ? nullptr : &x_star;

    auto solve_one = [&](const VariantConfig& vc) {
        ConvergenceHistory h = run(vc, a, m, b, x0, max_iter, config.stop, probe);
        h.problem_id = config.problem.name;
        return h;
    };

    ExperimentResult result;
    result.histories.resize(variants.size());
    if (config.jobs > 1) {
        std::vector<std::future<ConvergenceHistory>> futures;
        futures.reserve(variants.size());
        for (const auto& vc : variants)
            futures.push_back(std::async(std::launch::async, solve_one, vc));
        for (std::size_t i = 0; i < futures.size(); ++i) result.histories[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < variants.size(); ++i)
            result.histories[i] = solve_one(variants[i]);
    }

    // single collector writes all outputs
    std::filesystem::create_directories(config.output_dir);
    for (const auto& h : result.histories) {
        const std::filesystem::path path = config.output_dir / (history_file_stem(h) + ".csv");
        emit_csv_file(h, path);
        result.csv_paths.push_back(path);
    }

    SummaryRow& row = result.row;
    row.problem = config.problem.name;
    row.precond = config.precond;
    row.n = n;
    row.nnz = a.nnz();
    for (const auto& h : result.histories) {
        row.variant_names.push_back(config_suffix(h.config));
        SummaryCell cell;
        if (h.summary) {
            cell.iterations = h.summary->iters_to_1e5;
            cell.min_log10_err = h.summary->min_log10_err;
        }
        cell.breakdown = h.final_status.state == SolveStatus::State::Breakdown;
        row.cells.push_back(cell);
    }
    apply_deviation_flags(row);
    return result;
}

void emit_csv(const ConvergenceHistory& history, std::ostream& out) {
    out << "k,rel_err_a_norm,true_res_norm,upd_res_norm,residual_gap_norm,nu_gap,"
           "w_gap_norm,s_gap_norm,lanczos_res_norm,succ_orth,alpha,beta,nu,nu_prime\n";
    for (const auto& rec : history.records) {
        std::string line = std::to_string(rec.k);
        append_cell(line, rec.rel_err_a_norm);
        append_cell(line, rec.true_res_norm);
        append_cell(line, rec.upd_res_norm);
        append_cell(line, rec.residual_gap_norm);
        append_cell(line, rec.nu_gap);
        append_cell(line, rec.w_gap_norm);
        append_cell(line, rec.s_gap_norm);
        append_cell(line, rec.lanczos_res_norm);
        append_cell(line, rec.succ_orth);
        append_cell(line, rec.alpha);
        append_cell(line, rec.beta);
        append_cell(line, rec.nu);
        append_cell(line, rec.nu_prime);
        line.push_back('\n');
        out << line;
    }
}

void emit_csv_file(const ConvergenceHistory& history, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    emit_csv(history, out);
}

std::vector<IterationRecord> parse_csv(std::istream& in) {
    std::vector<IterationRecord> records;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::optional<double>> cells;
        IterationRecord rec;
        std::size_t pos = 0;
        int column = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            const std::string_view tok(line.data() + pos, comma - pos);
            if (column == 0) {
                int k = 0;
                std::from_chars(tok.data(), tok.data() + tok.size(), k);
                rec.k = k;
            } else {
                std::optional<double> v;
                if (!tok.empty()) {
                    double d = 0.0;
                    if (tok == "inf")
                        d = std::numeric_limits<double>::infinity();
                    else if (tok == "-inf")
                        d = -std::numeric_limits<double>::infinity();
                    else if (tok == "nan")
                        d = std::numeric_limits<double>::quiet_NaN();
                    else
                        std::from_chars(tok.data(), tok.data() + tok.size(), d);
                    v = d;
                }
                cells.push_back(v);
            }
            ++column;
            pos = comma + 1;
        }
        if (cells.size() != 13) throw std::invalid_argument("CSV row has wrong column count");
        rec.rel_err_a_norm = cells[0];
        rec.true_res_norm = cells[1];
        rec.upd_res_norm = cells[2];
        rec.residual_gap_norm = cells[3];
        rec.nu_gap = cells[4];
        rec.w_gap_norm = cells[5];
        rec.s_gap_norm = cells[6];
        rec.lanczos_res_norm = cells[7];
        rec.succ_orth = cells[8];
        rec.alpha = cells[9];
        rec.beta = cells[10];
        rec.nu = cells[11];
        rec.nu_prime = cells[12];
        records.push_back(rec);
    }
    return records;
}

void emit_table(const std::vector<SummaryRow>& rows, std::ostream& out) {
    // iterations and min error per variant; '*' marks a >10% deviation from
    // HS, '-' marks a variant that never reached the accuracy
    out << std::left << std::setw(16) << "matrix" << std::setw(8) << "prec." << std::setw(8)
        << "n" << std::setw(10) << "nnz";
    if (!rows.empty()) {
        for (const auto& name : rows.front().variant_names)
            out << std::right << std::setw(12) << ("it:" + name);
        for (const auto& name : rows.front().variant_names)
            out << std::right << std::setw(12) << ("err:" + name);
    }
    out << "\n";
    for (const auto& row : rows) {
        out << std::left << std::setw(16) << row.problem << std::setw(8)
            << std::string(preconditioner_name(row.precond)) << std::setw(8) << row.n
            << std::setw(10) << row.nnz;
        for (const auto& cell : row.cells) {
            std::string s;
            if (cell.breakdown && !cell.iterations)
                s = "-";
            else if (!cell.iterations)
                s = "-";
            else
                s = std::to_string(*cell.iterations);
            if (cell.bold_iterations) s += "*";
            out << std::right << std::setw(12) << s;
        }
        for (const auto& cell : row.cells) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.2f", cell.min_log10_err);
            std::string s(buf);
            if (cell.bold_err) s += "*";
            out << std::right << std::setw(12) << s;
        }
        out << "\n";
    }
}

void emit_plot_data(const std::vector<ConvergenceHistory>& histories, std::ostream& out) {
    out << "variant,k,metric,value\n";
    const auto emit = [&](const std::string& variant, int k, const char* metric,
                          const std::optional<double>& v) {
        if (v) out << variant << ',' << k << ',' << metric << ',' << format_double(*v) << '\n';
    };
    for (const auto& h : histories) {
        const std::string name = config_suffix(h.config);
        for (const auto& rec : h.records) {
            emit(name, rec.k, "rel_err_a_norm", rec.rel_err_a_norm);
            emit(name, rec.k, "true_res_norm", rec.true_res_norm);
            emit(name, rec.k, "upd_res_norm", rec.upd_res_norm);
            emit(name, rec.k, "residual_gap_norm", rec.residual_gap_norm);
            emit(name, rec.k, "nu_gap", rec.nu_gap);
            emit(name, rec.k, "w_gap_norm", rec.w_gap_norm);
            emit(name, rec.k, "s_gap_norm", rec.s_gap_norm);
            emit(name, rec.k, "lanczos_res_norm", rec.lanczos_res_norm);
            emit(name, rec.k, "succ_orth", rec.succ_orth);
        }
    }
}

} // namespace cgv

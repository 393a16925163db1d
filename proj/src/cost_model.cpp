#include "cgvariants/cost_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace cgv {

void CostParams::validate() const {
    if (c_gr < 0.0 || t_mv < 0.0 || c_mv < 0.0 || t_2mv < 0.0)
        throw std::invalid_argument("cost parameters must be nonnegative");
    if (t_mv > t_2mv || t_2mv > 2.0 * t_mv)
        throw std::invalid_argument("need t_mv <= t_2mv <= 2*t_mv");
}

double iteration_time(Variant v, const CostParams& p) {
    switch (v) {
        case Variant::HS:
            return 2.0 * p.c_gr + p.t_mv + p.c_mv;
        case Variant::CG_CG:
        case Variant::M:
        case Variant::PR:
            return p.c_gr + p.t_mv + p.c_mv;
        case Variant::GV:
            return std::max(p.c_gr, p.t_mv + p.c_mv);
        case Variant::PIPE_PR_M:
        case Variant::PIPE_PR:
            return std::max(p.c_gr, p.t_2mv + p.c_mv);
    }
    return 0.0;
}

namespace {

void check_scenario(const ScalingScenario& scenario) {
    if (scenario.nodes.empty()) throw std::invalid_argument("empty scaling scenario");
    if (scenario.nodes.size() != scenario.params.size())
        throw std::invalid_argument("scenario node and parameter counts differ");
    for (std::size_t i = 1; i < scenario.nodes.size(); ++i)
        if (scenario.nodes[i] <= scenario.nodes[i - 1])
            throw std::invalid_argument("node counts must be strictly increasing");
    for (const auto& p : scenario.params) p.validate();
}

} // namespace

std::vector<ScalingPoint> predict_scaling(Variant v, const ScalingScenario& scenario,
                                          int iterations) {
    check_scenario(scenario);
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    std::vector<ScalingPoint> out;
    out.reserve(scenario.nodes.size());
    for (std::size_t i = 0; i < scenario.nodes.size(); ++i)
        out.push_back({scenario.nodes[i],
                       static_cast<double>(iterations) * iteration_time(v, scenario.params[i])});
    return out;
}

std::optional<int> crossover_nodes(Variant candidate, Variant baseline,
                                   const ScalingScenario& scenario) {
    check_scenario(scenario);
    for (std::size_t i = 0; i < scenario.nodes.size(); ++i) {
        if (iteration_time(candidate, scenario.params[i]) <
            iteration_time(baseline, scenario.params[i]))
            return scenario.nodes[i];
    }
    return std::nullopt;
}

} // namespace cgv

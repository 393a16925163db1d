#pragma once

#include "cgvariants/variants.hpp"

#include <optional>
#include <vector>

namespace cgv {

/// Machine abstraction for the per-iteration runtime of each variant.
/// Communication time is taken to be independent of message size.
struct CostParams {
    double c_gr = 0.0;  // global reduction communication time
    double t_mv = 0.0;  // matrix-vector computation time
    double c_mv = 0.0;  // matrix-vector communication time
    double t_2mv = 0.0; // fused two-product computation time

    /// Throws std::invalid_argument unless all >= 0 and t_mv <= t_2mv <= 2*t_mv.
    void validate() const;
};

/// Dominant per-iteration cost (vector updates and local inner-product work
/// are ignored):
///   HS:            2*c_gr + t_mv + c_mv
///   CG_CG, M, PR:    c_gr + t_mv + c_mv
///   GV:            max(c_gr, t_mv  + c_mv)
///   pipelined PR:  max(c_gr, t_2mv + c_mv)
double iteration_time(Variant v, const CostParams& p);

struct ScalingScenario {
    std::vector<int> nodes;         // strictly increasing
    std::vector<CostParams> params; // one per node count
};

struct ScalingPoint {
    int nodes = 0;
    double seconds = 0.0;
};

/// Predicted wall time for `iterations` iterations at every node count.
/// Throws std::invalid_argument on an empty or non-increasing scenario.
std::vector<ScalingPoint> predict_scaling(Variant v, const ScalingScenario& scenario,
                                          int iterations = 1500);

/// First node count at which `candidate` is strictly faster than `baseline`.
std::optional<int> crossover_nodes(Variant candidate, Variant baseline,
                                   const ScalingScenario& scenario);

} // namespace cgv

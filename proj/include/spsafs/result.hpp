#pragma once

#include <cstddef>
#include <vector>

#include "spsafs/measurement.hpp"

namespace spsafs {

enum class Termination { max_iterations, stalled };

inline std::string termination_name(Termination t) {
    return t == Termination::stalled ? "stalled" : "max_iterations";
}

// One row per iteration (or generation / accepted move, depending on the
// search). Loss-oriented: lower is better regardless of the metric.
// y_plus / y_minus are NaN for searches without paired probes.
struct TraceRow {
    std::size_t iteration = 0;
    double y_plus = 0.0;
    double y_minus = 0.0;
    double y_iterate = 0.0;
    double best_so_far = 0.0;
    std::size_t selected_count = 0;
};

struct FSResult {
    FeatureMask best_mask;
    LossMeasurement best_measurement;
    std::size_t evaluations = 0;
    Termination termination = Termination::max_iterations;
    std::vector<TraceRow> trace;
};

}  // namespace spsafs

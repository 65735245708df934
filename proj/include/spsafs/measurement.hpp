#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spsafs/mask.hpp"

namespace spsafs {

enum class Metric { error_rate, auc };

inline std::string metric_name(Metric m) {
    return m == Metric::auc ? "auc" : "error_rate";
}

// One noisy evaluation of a feature subset: the metric mean across
// cross-validation repetitions plus its spread.
struct LossMeasurement {
    FeatureMask mask;
    Metric metric = Metric::error_rate;
    double mean = 0.0;       // mean of the metric itself
    double std_error = 0.0;  // standard error across repetitions
    std::vector<double> per_repetition;

    // Orientation-adjusted value that search always minimizes.
    double loss() const { return metric == Metric::auc ? 1.0 - mean : mean; }
};

inline std::pair<double, double> mean_and_se(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean_and_se: empty sample");
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    return {mean, sd / std::sqrt(static_cast<double>(xs.size()))};
}

using Objective = std::function<LossMeasurement(const FeatureMask&)>;

// Raised when an evaluation cannot complete; carries the offending mask.
struct ObjectiveError : std::runtime_error {
    FeatureMask mask;
    ObjectiveError(const std::string& what, FeatureMask m)
        : std::runtime_error(what + " (mask " + mask_to_string(m) + ")"),
          mask(std::move(m)) {}
};

}  // namespace spsafs

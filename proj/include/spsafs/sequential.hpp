#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spsafs/mask.hpp"
#include "spsafs/measurement.hpp"
#include "spsafs/result.hpp"

namespace spsafs {

enum class Direction { forward, backward };

struct SequentialConfig {
    bool floating = false;
    // Loss assigned to the empty starting subset in forward mode; no
    // evaluation is spent on it.
    double empty_subset_loss = 1.0;
    // Metric carried by the synthetic empty-subset measurement when a
    // forward run accepts no move at all.
    Metric metric = Metric::error_rate;
    // Hard budget on objective calls; the run stops as soon as it trips.
    std::optional<std::size_t> max_evaluations;
};

// Greedy sequential selection. Forward grows from the empty subset,
// backward shrinks from the full one and never drops the last feature.
// Each sweep evaluates every single-bit change and accepts the best
// candidate only on strict improvement, ties going to the lowest feature
// index. With floating enabled, every accepted move is followed by
// opposite moves for as long as they keep strictly improving.
inline FSResult run_sequential(const Objective& objective, std::size_t n_features,
                               Direction direction, const SequentialConfig& config = {}) {
    if (n_features == 0) throw std::invalid_argument("run_sequential: no features");

    FSResult result;
    result.termination = Termination::stalled;
    std::size_t evaluations = 0;
    bool budget_hit = false;

    auto can_spend = [&] {
        if (config.max_evaluations && evaluations >= *config.max_evaluations) {
            budget_hit = true;
            return false;
        }
        return true;
    };

    FeatureMask mask(n_features, direction == Direction::forward ? 0 : 1);
    double incumbent_loss;
    std::optional<LossMeasurement> incumbent;

    if (direction == Direction::forward) {
        incumbent_loss = config.empty_subset_loss;
    } else {
        incumbent = objective(mask);
        ++evaluations;
        incumbent_loss = incumbent->loss();
    }

    struct Move {
        bool found = false;
        std::size_t feature = 0;
        LossMeasurement measurement;
        double loss = std::numeric_limits<double>::infinity();
    };

    // Best single-bit change; adding ? 0->1 : 1->0. Removal sweeps are only
    // requested with at least two selected features, so caller guarantees
    // the subset cannot empty out.
    auto sweep = [&](bool adding) {
        Move best;
        for (std::size_t j = 0; j < n_features; ++j) {
            if ((mask[j] != 0) == adding) continue;
            if (!can_spend()) return best;
            FeatureMask candidate = mask;
            candidate[j] ^= 1;
            LossMeasurement m = objective(candidate);
            ++evaluations;
            if (m.loss() < best.loss) {
                best.found = true;
                best.feature = j;
                best.loss = m.loss();
                best.measurement = std::move(m);
            }
        }
        return best;
    };

    std::size_t step = 0;
    auto accept = [&](const Move& move) {
        mask[move.feature] ^= 1;
        incumbent = move.measurement;
        incumbent_loss = move.loss;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        result.trace.push_back(
            {++step, nan, nan, incumbent_loss, incumbent_loss, selected_count(mask)});
    };

    const bool forward = direction == Direction::forward;
    while (!budget_hit) {
        if (!forward && selected_count(mask) < 2) break;
        const Move move = sweep(forward);
        if (budget_hit) break;
        if (!move.found || move.loss >= incumbent_loss) break;
        accept(move);

        if (config.floating) {
            while (!budget_hit) {
                if (forward && selected_count(mask) < 2) break;
                if (!forward && selected_count(mask) == n_features) break;
                const Move back = sweep(!forward);
                if (budget_hit || !back.found || back.loss >= incumbent_loss) break;
                accept(back);
            }
        }
    }
    if (budget_hit) result.termination = Termination::max_iterations;

    if (!incumbent) {
        // Forward run that never accepted a move: report the empty subset
        // without spending another evaluation on it.
        LossMeasurement m;
        m.mask = mask;
        m.metric = config.metric;
        m.mean = config.metric == Metric::auc ? 1.0 - config.empty_subset_loss
                                              : config.empty_subset_loss;
        incumbent = std::move(m);
    }
    result.best_mask = mask;
    result.best_measurement = *incumbent;
    result.evaluations = evaluations;
    return result;
}

}  // namespace spsafs

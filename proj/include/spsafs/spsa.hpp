#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "spsafs/mask.hpp"
#include "spsafs/measurement.hpp"
#include "spsafs/random.hpp"
#include "spsafs/result.hpp"

namespace spsafs {

enum class GainMode { binary, continuous };

// Gain sequences a_k = a / (A + k)^alpha and c_k = c / k^gamma, with k
// counted from 1. Binary mode pins the perturbation size: c_k = c.
struct GainSchedule {
    GainMode mode = GainMode::binary;
    double a = 0.75;
    double A = 100.0;
    double alpha = 0.6;
    double c = 0.05;
    double gamma = 0.1;  // ignored in binary mode

    void validate() const {
        if (a <= 0.0 || c <= 0.0) throw std::invalid_argument("gains: a and c must be positive");
        if (A < 0.0) throw std::invalid_argument("gains: A must be nonnegative");
        if (alpha <= 0.0 || alpha > 1.0)
            throw std::invalid_argument("gains: alpha must be in (0, 1]");
        if (mode == GainMode::continuous && (gamma <= 0.0 || gamma >= 0.5))
            throw std::invalid_argument("gains: gamma must be in (0, 0.5)");
    }

    static GainSchedule binary_defaults(bool large_problem = false) {
        GainSchedule s;
        if (large_problem) {
            s.a = 1.5;
            s.A = 300.0;
        }
        return s;
    }

    static GainSchedule continuous_defaults() {
        GainSchedule s;
        s.mode = GainMode::continuous;
        s.a = 0.75;
        s.A = 0.0;
        s.c = 0.01;
        s.gamma = 0.1;
        return s;
    }
};

inline double gain_a(std::size_t k, const GainSchedule& s) {
    return s.a / std::pow(s.A + static_cast<double>(k), s.alpha);
}

inline double gain_c(std::size_t k, const GainSchedule& s) {
    if (s.mode == GainMode::binary) return s.c;
    return s.c / std::pow(static_cast<double>(k), s.gamma);
}

// Probe vector: one value per feature, kept inside [0, 1].
using ProbeVector = std::vector<double>;
// Simultaneous perturbation direction, entries in {-1, +1}.
using PerturbationVector = std::vector<int>;

inline PerturbationVector sample_perturbation(std::size_t p, RandomStream& rng) {
    PerturbationVector delta(p);
    for (auto& d : delta) d = rng.next_sign();
    return delta;
}

inline std::pair<ProbeVector, ProbeVector> perturb(const ProbeVector& w, double ck,
                                                   const PerturbationVector& delta) {
    ProbeVector plus(w.size()), minus(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        plus[i] = w[i] + ck * delta[i];
        minus[i] = w[i] - ck * delta[i];
    }
    return {plus, minus};
}

inline ProbeVector bound(ProbeVector w) {
    for (double& v : w) v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    return w;
}

// Components at or above one half round to selected.
inline FeatureMask round_mask(const ProbeVector& w) {
    FeatureMask m(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) m[i] = w[i] >= 0.5 ? 1 : 0;
    return m;
}

// ghat_i = (y_plus - y_minus) / (2 c_k delta_i); with delta_i in {-1, +1}
// division and multiplication coincide.
inline std::vector<double> estimate_gradient(double y_plus, double y_minus, double ck,
                                             const PerturbationVector& delta) {
    const double scale = (y_plus - y_minus) / (2.0 * ck);
    std::vector<double> g(delta.size());
    for (std::size_t i = 0; i < delta.size(); ++i) g[i] = scale * delta[i];
    return g;
}

inline ProbeVector update(const ProbeVector& w, double ak, const std::vector<double>& ghat) {
    ProbeVector next(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) next[i] = w[i] - ak * ghat[i];
    return next;
}

struct RunConfig {
    std::size_t max_iterations = 1000;
    double stall_fraction = 0.25;  // stall limit = ceil(fraction * max_iterations)
    std::uint64_t master_seed = 1;
    double initial_component = 0.5;
    // Reuse measurements for already-seen masks. Off by default: with a
    // noisy objective a cache would freeze the first noise draw.
    bool cache_evaluations = false;
    // Test hook: when set, supplies the perturbation for each iteration
    // (1-based) instead of the random stream.
    std::function<PerturbationVector(std::size_t)> perturbation_source;

    std::size_t stall_limit() const {
        return static_cast<std::size_t>(
            std::ceil(stall_fraction * static_cast<double>(max_iterations)));
    }
};

namespace detail {

struct MaskHasher {
    std::size_t operator()(const FeatureMask& m) const {
        return static_cast<std::size_t>(mask_hash(m));
    }
};

class EvalCache {
public:
    EvalCache(const Objective& objective, bool enabled)
        : objective_(&objective), enabled_(enabled) {}

    const LossMeasurement& eval(const FeatureMask& mask) {
        if (enabled_) {
            auto it = cache_.find(mask);
            if (it != cache_.end()) return it->second;
            ++count_;
            return cache_.emplace(mask, (*objective_)(mask)).first->second;
        }
        ++count_;
        last_ = (*objective_)(mask);
        return last_;
    }

    std::size_t count() const { return count_; }

private:
    const Objective* objective_;
    bool enabled_;
    std::size_t count_ = 0;
    LossMeasurement last_;
    std::unordered_map<FeatureMask, LossMeasurement, MaskHasher> cache_;
};

}  // namespace detail

// Simultaneous perturbation stochastic approximation over feature subsets.
// Each iteration costs three evaluations: the two gradient probes and the
// rounded iterate, which is tracked for best-so-far only and never fed back
// into the recursion. The run stops early after stall_limit consecutive
// iterations without strict improvement of the best loss.
inline FSResult run_spsa(const Objective& objective, std::size_t n_features,
                         const GainSchedule& schedule, const RunConfig& config) {
    schedule.validate();
    if (n_features == 0) throw std::invalid_argument("run_spsa: no features");
    if (config.max_iterations == 0)
        throw std::invalid_argument("run_spsa: max_iterations must be positive");
    if (config.initial_component < 0.0 || config.initial_component > 1.0)
        throw std::invalid_argument("run_spsa: initial component outside [0, 1]");

    RandomStream rng(config.master_seed);
    detail::EvalCache evals(objective, config.cache_evaluations);

    ProbeVector w(n_features, config.initial_component);
    FSResult result;
    bool have_best = false;
    std::size_t stall = 0;
    const std::size_t stall_limit = config.stall_limit();
    result.termination = Termination::max_iterations;

    for (std::size_t k = 1; k <= config.max_iterations; ++k) {
        const PerturbationVector delta = config.perturbation_source
                                             ? config.perturbation_source(k)
                                             : sample_perturbation(n_features, rng);
        if (delta.size() != n_features)
            throw std::invalid_argument("run_spsa: perturbation length mismatch");

        const double ck = gain_c(k, schedule);
        auto [w_plus, w_minus] = perturb(w, ck, delta);
        const FeatureMask mask_plus = round_mask(bound(std::move(w_plus)));
        const FeatureMask mask_minus = round_mask(bound(std::move(w_minus)));
        const LossMeasurement y_plus = evals.eval(mask_plus);
        const LossMeasurement y_minus = evals.eval(mask_minus);

        const auto ghat = estimate_gradient(y_plus.loss(), y_minus.loss(), ck, delta);
        w = bound(update(w, gain_a(k, schedule), ghat));

        const FeatureMask mask_iterate = round_mask(w);
        const LossMeasurement y_iterate = evals.eval(mask_iterate);

        bool improved = false;
        for (const LossMeasurement* m : {&y_plus, &y_minus, &y_iterate}) {
            if (!have_best || m->loss() < result.best_measurement.loss()) {
                result.best_measurement = *m;
                result.best_mask = m->mask;
                have_best = true;
                improved = true;
            }
        }

        result.trace.push_back({k, y_plus.loss(), y_minus.loss(), y_iterate.loss(),
                                result.best_measurement.loss(),
                                selected_count(result.best_mask)});

        stall = improved ? 0 : stall + 1;
        if (stall >= stall_limit) {
            result.termination = Termination::stalled;
            break;
        }
    }

    result.evaluations = evals.count();
    return result;
}

}  // namespace spsafs

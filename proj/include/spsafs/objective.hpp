#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "spsafs/classifier.hpp"
#include "spsafs/dataset.hpp"
#include "spsafs/mask.hpp"
#include "spsafs/measurement.hpp"
#include "spsafs/random.hpp"

namespace spsafs {

struct CVConfig {
    int folds = 5;
    int repetitions = 10;
    Metric metric = Metric::error_rate;
    bool standardize = true;   // z-score per fold, fit on the training part
    bool stratified = false;
    int threads = 1;           // repetitions may run concurrently
};

// fold_of[row] = fold index in [0, folds).
inline std::vector<int> make_folds(std::size_t n, int folds, RandomStream& rng) {
    if (folds < 2 || static_cast<std::size_t>(folds) > n)
        throw std::invalid_argument("make_folds: need 2 <= folds <= n");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<int> fold_of(n);
    // First n % folds folds take one extra row.
    const std::size_t base = n / static_cast<std::size_t>(folds);
    const std::size_t extra = n % static_cast<std::size_t>(folds);
    std::size_t at = 0;
    for (int f = 0; f < folds; ++f) {
        std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
        for (std::size_t j = 0; j < size; ++j) fold_of[order[at++]] = f;
    }
    return fold_of;
}

inline std::vector<int> make_stratified_folds(std::size_t n, const std::vector<int>& labels,
                                              int class_count, int folds,
                                              RandomStream& rng) {
    if (folds < 2) throw std::invalid_argument("make_stratified_folds: need folds >= 2");
    std::vector<int> fold_of(n);
    int next = 0;
    for (int c = 0; c < class_count; ++c) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < n; ++i)
            if (labels[i] == c) rows.push_back(i);
        rng.shuffle(rows);
        for (std::size_t j = 0; j < rows.size(); ++j) {
            fold_of[rows[j]] = next;
            next = (next + 1) % folds;
        }
    }
    return fold_of;
}

// Probability that a random class-1 score exceeds a random class-0 score,
// ties counting one half. Undefined when either class is absent.
inline std::optional<double> auc_from_scores(const std::vector<double>& scores,
                                             const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("auc_from_scores: size mismatch");
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    if (pairs == 0) return std::nullopt;
    return wins / static_cast<double>(pairs);
}

namespace detail {

inline double run_repetition(const Dataset& data, const std::vector<std::size_t>& columns,
                             ClassifierKind kind, const CVConfig& config,
                             std::uint64_t call_seed, int rep) {
    RandomStream fold_rng(hash_combine(call_seed, "repetition", static_cast<std::uint64_t>(rep)));
    const std::vector<int> fold_of =
        config.stratified ? make_stratified_folds(data.n_rows, data.labels,
                                                  data.class_count(), config.folds, fold_rng)
                          : make_folds(data.n_rows, config.folds, fold_rng);

    const bool want_auc = config.metric == Metric::auc;
    double fold_sum = 0.0;
    int fold_used = 0;
    for (int f = 0; f < config.folds; ++f) {
        std::vector<std::size_t> train_rows, test_rows;
        std::vector<int> train_y, test_y;
        for (std::size_t r = 0; r < data.n_rows; ++r) {
            if (fold_of[r] == f) {
                test_rows.push_back(r);
                test_y.push_back(data.labels[r]);
            } else {
                train_rows.push_back(r);
                train_y.push_back(data.labels[r]);
            }
        }
        std::vector<double> train_x = gather_columns(data.view(), train_rows, columns);
        std::vector<double> test_x = gather_columns(data.view(), test_rows, columns);
        const std::size_t p = columns.size();
        if (config.standardize) {
            const Standardizer z = Standardizer::fit({train_x.data(), train_rows.size(), p});
            z.apply(train_x.data(), train_rows.size(), p);
            z.apply(test_x.data(), test_rows.size(), p);
        }

        RandomStream clf_rng(hash_combine(call_seed, "repetition",
                                          static_cast<std::uint64_t>(rep), "fold",
                                          static_cast<std::uint64_t>(f)));
        const FoldPrediction pred =
            fit_predict(kind, {train_x.data(), train_rows.size(), p}, train_y,
                        data.class_count(), {test_x.data(), test_rows.size(), p}, clf_rng,
                        want_auc);

        if (want_auc) {
            const std::optional<double> auc = auc_from_scores(pred.class1_score, test_y);
            if (auc) {
                fold_sum += *auc;
                ++fold_used;
            }
        } else {
            std::size_t wrong = 0;
            for (std::size_t i = 0; i < test_y.size(); ++i)
                if (pred.labels[i] != test_y[i]) ++wrong;
            fold_sum += static_cast<double>(wrong) / static_cast<double>(test_y.size());
            ++fold_used;
        }
    }
    if (fold_used == 0) return 0.5;  // no fold had both classes; uninformative
    return fold_sum / static_cast<double>(fold_used);
}

}  // namespace detail

// Repeated k-fold cross-validation of one feature subset. The empty subset
// short-circuits to the worst uninformative value without touching a
// classifier. Each repetition derives its own stream from (call_seed, rep),
// so the repetition execution order cannot change the result.
inline LossMeasurement measure(const Dataset& data, const FeatureMask& mask,
                               ClassifierKind kind, const CVConfig& config,
                               std::uint64_t call_seed) {
    if (mask.size() != data.n_features)
        throw ObjectiveError("mask length does not match feature count", mask);
    if (config.repetitions < 1)
        throw std::invalid_argument("measure: need at least one repetition");
    if (config.metric == Metric::auc && data.class_count() != 2)
        throw std::invalid_argument("measure: AUC needs a two-class dataset");

    LossMeasurement out;
    out.mask = mask;
    out.metric = config.metric;

    if (!any_selected(mask)) {
        const double penalty = config.metric == Metric::auc ? 0.5 : 1.0;
        out.per_repetition.assign(static_cast<std::size_t>(config.repetitions), penalty);
        auto [mean, se] = mean_and_se(out.per_repetition);
        out.mean = mean;
        out.std_error = se;
        return out;
    }

    const std::vector<std::size_t> columns = selected_indices(mask);
    out.per_repetition.resize(static_cast<std::size_t>(config.repetitions));

    const int threads = std::max(1, std::min(config.threads, config.repetitions));
    if (threads == 1) {
        for (int r = 0; r < config.repetitions; ++r)
            out.per_repetition[static_cast<std::size_t>(r)] =
                detail::run_repetition(data, columns, kind, config, call_seed, r);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
        std::atomic<int> next{0};
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (int r = next.fetch_add(1); r < config.repetitions;
                         r = next.fetch_add(1))
                        out.per_repetition[static_cast<std::size_t>(r)] =
                            detail::run_repetition(data, columns, kind, config, call_seed, r);
                } catch (...) {
                    errors[static_cast<std::size_t>(t)] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    auto [mean, se] = mean_and_se(out.per_repetition);
    out.mean = mean;
    out.std_error = se;
    return out;
}

// Callable objective bound to one dataset / classifier / configuration.
// Every call draws a fresh seed from an atomic counter, so repeated
// evaluations of the same subset see independent cross-validation noise
// and concurrent calls are safe.
class CrossValObjective {
public:
    CrossValObjective(const Dataset& data, ClassifierKind kind, CVConfig config,
                      std::uint64_t base_seed)
        : data_(&data), kind_(kind), config_(config), base_seed_(base_seed) {}

    LossMeasurement operator()(const FeatureMask& mask) const {
        const std::uint64_t call = calls_.fetch_add(1);
        return measure(*data_, mask, kind_, config_, hash_combine(base_seed_, "call", call));
    }

    std::size_t calls() const { return calls_.load(); }
    const CVConfig& config() const { return config_; }
    Metric metric() const { return config_.metric; }

private:
    const Dataset* data_;
    ClassifierKind kind_;
    CVConfig config_;
    std::uint64_t base_seed_;
    mutable std::atomic<std::uint64_t> calls_{0};
};

}  // namespace spsafs

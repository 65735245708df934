#pragma once

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spsafs/config.hpp"
#include "spsafs/genetic.hpp"
#include "spsafs/sequential.hpp"
#include "spsafs/spsa.hpp"
#include "spsafs/stats.hpp"

namespace spsafs {

struct CellResult {
    std::string dataset;
    std::string classifier;
    std::string method;
    std::uint64_t seed = 0;
    Metric metric = Metric::error_rate;

    bool failed = false;
    std::string error;

    FSResult search;
    // Fresh measurement of the winning subset, independent of the noise the
    // search saw, so reported numbers are not selection-biased.
    LossMeasurement validation;
    double wall_seconds = 0.0;
};

struct MethodComparison {
    std::string dataset;
    std::string classifier;
    std::vector<std::string> methods;
    bool available = false;
    std::string note;
    ComparisonReport stats;
};

struct ExperimentOutcome {
    ExperimentConfig config;
    std::vector<CellResult> cells;
    std::vector<MethodComparison> comparisons;
};

namespace detail {

inline std::string dataset_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

inline double param_double(const MethodSpec& m, const std::string& key, double fallback) {
    auto it = m.params.find(key);
    return it == m.params.end() ? fallback : std::stod(it->second);
}

inline std::size_t param_size(const MethodSpec& m, const std::string& key,
                              std::size_t fallback) {
    auto it = m.params.find(key);
    return it == m.params.end() ? fallback
                                : static_cast<std::size_t>(std::stoull(it->second));
}

inline bool param_bool(const MethodSpec& m, const std::string& key, bool fallback) {
    auto it = m.params.find(key);
    return it == m.params.end() ? fallback : parse_bool(it->second, key);
}

}  // namespace detail

// Dispatch one method on one prepared objective. `large_problem` selects the
// built-in parameter profile; explicit method parameters win over it.
inline FSResult run_method(const MethodSpec& method, const CrossValObjective& objective,
                           std::size_t n_features, bool large_problem,
                           std::uint64_t cell_seed) {
    const Objective fn = [&objective](const FeatureMask& m) { return objective(m); };

    if (method.name == "full") {
        FSResult r;
        r.best_mask = full_mask(n_features);
        r.best_measurement = objective(r.best_mask);
        r.evaluations = 1;
        r.termination = Termination::max_iterations;
        return r;
    }

    if (method.name == "bspsa" || method.name == "cspsa") {
        GainSchedule s = method.name == "cspsa" ? GainSchedule::continuous_defaults()
                                                : GainSchedule::binary_defaults(large_problem);
        s.a = detail::param_double(method, "a", s.a);
        s.A = detail::param_double(method, "A", s.A);
        s.alpha = detail::param_double(method, "alpha", s.alpha);
        s.c = detail::param_double(method, "c", s.c);
        s.gamma = detail::param_double(method, "gamma", s.gamma);

        RunConfig cfg;
        cfg.max_iterations = detail::param_size(method, "iterations",
                                                large_problem ? 3000 : 1000);
        cfg.stall_fraction = detail::param_double(method, "stall_fraction", 0.25);
        cfg.initial_component = detail::param_double(method, "initial", 0.5);
        cfg.cache_evaluations = detail::param_bool(method, "cache", false);
        cfg.master_seed = cell_seed;
        return run_spsa(fn, n_features, s, cfg);
    }

    if (method.name == "bga") {
        GAConfig cfg;
        cfg.population_size = detail::param_size(method, "population", large_problem ? 45 : 30);
        cfg.max_generations =
            detail::param_size(method, "generations", large_problem ? 200 : 100);
        cfg.stall_generations = detail::param_size(method, "stall", large_problem ? 50 : 25);
        cfg.elite_count = detail::param_size(method, "elites", 2);
        cfg.tournament_size = detail::param_size(method, "tournament", 2);
        cfg.crossover_prob = detail::param_double(method, "crossover", 0.8);
        cfg.mutation_prob = detail::param_double(method, "mutation", 0.1);
        cfg.master_seed = cell_seed;
        return run_bga(fn, n_features, cfg);
    }

    // Sequential family.
    SequentialConfig cfg;
    cfg.floating = method.name == "sffs" || method.name == "sbfs";
    cfg.metric = objective.metric();
    cfg.empty_subset_loss = objective.metric() == Metric::auc ? 0.5 : 1.0;
    if (method.params.count("max_evaluations"))
        cfg.max_evaluations = detail::param_size(method, "max_evaluations", 0);
    const Direction dir = (method.name == "sfs" || method.name == "sffs")
                              ? Direction::forward
                              : Direction::backward;
    return run_sequential(fn, n_features, dir, cfg);
}

inline ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                        std::ostream* log = nullptr) {
    {
        const auto errors = validate_config(config);
        if (!errors.empty()) {
            std::string joined = "invalid configuration:";
            for (const auto& e : errors) joined += "\n  " + e;
            throw std::runtime_error(joined);
        }
    }

    ExperimentOutcome out;
    out.config = config;

    for (const auto& path : config.dataset_paths) {
        CsvOptions csv;
        csv.has_header = config.csv_has_header;
        csv.label_column = config.label_column;
        const Dataset data = load_csv(path, csv);
        const std::string dname = detail::dataset_stem(path);
        const bool large_problem =
            config.profile == "auto" ? data.n_features >= 100 : config.profile == "large";

        for (const auto& cname : config.classifiers) {
            const ClassifierKind kind = *parse_classifier(cname);
            GroupSamples groups;
            std::vector<std::size_t> group_cells;

            for (const auto& method : config.methods) {
                CellResult cell;
                cell.dataset = dname;
                cell.classifier = classifier_name(kind);
                cell.method = method.name;
                cell.metric = config.cv.metric;
                cell.seed = hash_combine(config.seed, dname, classifier_name(kind),
                                         method.name);
                if (log)
                    *log << "running " << dname << " / " << cell.classifier << " / "
                         << method.name << " ..." << std::endl;

                const auto start = std::chrono::steady_clock::now();
                try {
                    CrossValObjective objective(data, kind, config.cv, cell.seed);
                    cell.search = run_method(method, objective, data.n_features,
                                             large_problem, cell.seed);
                    cell.validation =
                        measure(data, cell.search.best_mask, kind, config.cv,
                                hash_combine(cell.seed, "validation"));
                } catch (const std::exception& e) {
                    cell.failed = true;
                    cell.error = e.what();
                }
                cell.wall_seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                        .count();

                if (!cell.failed) {
                    groups.names.push_back(method.name);
                    groups.values.push_back(cell.validation.per_repetition);
                    group_cells.push_back(out.cells.size());
                }
                out.cells.push_back(std::move(cell));
            }

            MethodComparison cmp;
            cmp.dataset = dname;
            cmp.classifier = classifier_name(kind);
            cmp.methods = groups.names;
            if (groups.values.size() < 2) {
                cmp.note = "needs at least two successful methods";
            } else {
                try {
                    cmp.stats = compare_groups(groups, 0.05,
                                               config.cv.metric == Metric::error_rate);
                    cmp.available = true;
                } catch (const std::exception& e) {
                    cmp.note = e.what();
                }
            }
            out.comparisons.push_back(std::move(cmp));
        }
    }
    return out;
}

inline void emit_trace(const std::vector<TraceRow>& trace, std::ostream& os) {
    os << "iteration,y_plus,y_minus,y_iterate,best_so_far,selected_count\n";
    auto cell = [&](double v) {
        if (std::isnan(v)) {
            os << "nan";
        } else {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.10g", v);
            os << buf;
        }
    };
    for (const auto& row : trace) {
        os << row.iteration << ',';
        cell(row.y_plus);
        os << ',';
        cell(row.y_minus);
        os << ',';
        cell(row.y_iterate);
        os << ',';
        cell(row.best_so_far);
        os << ',' << row.selected_count << '\n';
    }
}

namespace detail {

inline nlohmann::json measurement_json(const LossMeasurement& m) {
    return {{"mean", m.mean},
            {"std_error", m.std_error},
            {"loss", m.loss()},
            {"per_repetition", m.per_repetition},
            {"selected", selected_count(m.mask)}};
}

inline nlohmann::json cell_json(const CellResult& c) {
    nlohmann::json j{{"dataset", c.dataset},
                     {"classifier", c.classifier},
                     {"method", c.method},
                     {"seed", c.seed},
                     {"metric", metric_name(c.metric)},
                     {"wall_seconds", c.wall_seconds}};
    if (c.failed) {
        j["failed"] = true;
        j["error"] = c.error;
        return j;
    }
    j["mask"] = mask_to_string(c.search.best_mask);
    j["selected"] = selected_count(c.search.best_mask);
    j["evaluations"] = c.search.evaluations;
    j["termination"] = termination_name(c.search.termination);
    j["search_estimate"] = measurement_json(c.search.best_measurement);
    j["validation"] = measurement_json(c.validation);
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& r : c.search.trace) {
        auto num = [](double v) {
            return std::isnan(v) ? nlohmann::json() : nlohmann::json(v);
        };
        trace.push_back(nlohmann::json::array({r.iteration, num(r.y_plus), num(r.y_minus),
                                               num(r.y_iterate), num(r.best_so_far),
                                               r.selected_count}));
    }
    j["trace"] = std::move(trace);
    return j;
}

inline std::vector<TraceRow> trace_from_json(const nlohmann::json& j) {
    std::vector<TraceRow> trace;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : j) {
        auto num = [&](const nlohmann::json& v) {
            return v.is_null() ? nan : v.get<double>();
        };
        trace.push_back({row.at(0).get<std::size_t>(), num(row.at(1)), num(row.at(2)),
                         num(row.at(3)), num(row.at(4)), row.at(5).get<std::size_t>()});
    }
    return trace;
}

inline nlohmann::json comparison_json(const MethodComparison& c) {
    nlohmann::json j{{"dataset", c.dataset},
                     {"classifier", c.classifier},
                     {"methods", c.methods},
                     {"available", c.available}};
    if (!c.available) {
        j["note"] = c.note;
        return j;
    }
    j["bartlett_stat"] = c.stats.bartlett_stat;
    j["bartlett_p"] = c.stats.bartlett_p;
    j["variant"] = c.stats.heteroscedastic ? "welch" : "classic";
    j["anova"] = {{"f", c.stats.anova.f},
                  {"df1", c.stats.anova.df1},
                  {"df2", c.stats.anova.df2},
                  {"p", c.stats.anova.p}};
    nlohmann::json pw = nlohmann::json::array();
    for (const auto& p : c.stats.pairwise)
        pw.push_back({{"first", c.methods[p.first]},
                      {"second", c.methods[p.second]},
                      {"difference", p.difference},
                      {"ci_low", p.ci_low},
                      {"ci_high", p.ci_high},
                      {"p", p.p},
                      {"significant", p.significant}});
    j["pairwise"] = std::move(pw);
    j["best_method"] = c.methods[c.stats.best_index];
    j["best_distinguished"] = c.stats.best_distinguished;
    return j;
}

inline std::string sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return out;
}

}  // namespace detail

// Write report.json, an aligned report.txt, one JSON file per cell with the
// raw repetition samples and trace, and one trace CSV per search method.
inline void write_outputs(const ExperimentOutcome& outcome, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "cells");
    if (outcome.config.write_traces) fs::create_directories(fs::path(dir) / "traces");

    nlohmann::json report{{"seed", outcome.config.seed},
                          {"metric", metric_name(outcome.config.cv.metric)},
                          {"folds", outcome.config.cv.folds},
                          {"repetitions", outcome.config.cv.repetitions},
                          {"profile", outcome.config.profile},
                          {"datasets", outcome.config.dataset_paths}};
    report["cells"] = nlohmann::json::array();
    report["comparisons"] = nlohmann::json::array();

    for (const auto& cell : outcome.cells) {
        const nlohmann::json j = detail::cell_json(cell);
        report["cells"].push_back(j);
        const std::string base = detail::sanitize(cell.dataset) + "_" +
                                 detail::sanitize(cell.classifier) + "_" +
                                 detail::sanitize(cell.method);
        std::ofstream((fs::path(dir) / "cells" / (base + ".json")).string())
            << j.dump(2) << '\n';
        if (outcome.config.write_traces && !cell.failed && !cell.search.trace.empty()) {
            std::ofstream tf((fs::path(dir) / "traces" / (base + ".csv")).string());
            emit_trace(cell.search.trace, tf);
        }
    }
    for (const auto& cmp : outcome.comparisons)
        report["comparisons"].push_back(detail::comparison_json(cmp));

    std::ofstream((fs::path(dir) / "report.json").string()) << report.dump(2) << '\n';

    std::ofstream txt((fs::path(dir) / "report.txt").string());
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-14s %-6s %-6s %10s %10s %9s %8s %-9s %9s\n",
                  "dataset", "clf", "method", "mean", "se", "selected", "evals", "term",
                  "seconds");
    txt << buf;
    for (const auto& cell : outcome.cells) {
        if (cell.failed) {
            std::snprintf(buf, sizeof buf, "%-14s %-6s %-6s failed: %s\n",
                          cell.dataset.c_str(), cell.classifier.c_str(),
                          cell.method.c_str(), cell.error.c_str());
            txt << buf;
            continue;
        }
        std::snprintf(buf, sizeof buf,
                      "%-14s %-6s %-6s %10.4f %10.4f %9zu %8zu %-9s %9.2f\n",
                      cell.dataset.c_str(), cell.classifier.c_str(), cell.method.c_str(),
                      cell.validation.mean, cell.validation.std_error,
                      selected_count(cell.search.best_mask), cell.search.evaluations,
                      termination_name(cell.search.termination).c_str(),
                      cell.wall_seconds);
        txt << buf;
    }
    txt << '\n';
    for (const auto& cmp : outcome.comparisons) {
        if (!cmp.available) {
            txt << cmp.dataset << " / " << cmp.classifier
                << ": no comparison (" << cmp.note << ")\n";
            continue;
        }
        std::snprintf(buf, sizeof buf,
                      "%s / %s: variance-test p=%.4f -> %s, omnibus p=%.4f, best=%s%s\n",
                      cmp.dataset.c_str(), cmp.classifier.c_str(), cmp.stats.bartlett_p,
                      cmp.stats.heteroscedastic ? "welch" : "classic",
                      cmp.stats.anova.p, cmp.methods[cmp.stats.best_index].c_str(),
                      cmp.stats.best_distinguished ? " *" : "");
        txt << buf;
    }
}

}  // namespace spsafs

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spsafs/classifier.hpp"
#include "spsafs/dataset.hpp"
#include "spsafs/objective.hpp"

namespace spsafs {

struct MethodSpec {
    std::string name;
    std::map<std::string, std::string> params;
};

struct ExperimentConfig {
    std::vector<std::string> dataset_paths;
    bool csv_has_header = false;
    int label_column = -1;

    std::vector<std::string> classifiers;
    std::vector<MethodSpec> methods;
    CVConfig cv;

    std::uint64_t seed = 1;
    std::string profile = "auto";  // auto | small | large
    std::string output_dir = "results";
    bool write_traces = true;
};

inline const std::set<std::string>& known_methods() {
    static const std::set<std::string> names{"full", "bspsa", "cspsa", "bga",
                                             "sfs",  "sbs",   "sffs",  "sbfs"};
    return names;
}

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw std::runtime_error(where + ": expected a boolean, got '" + v + "'");
}

inline long long parse_int(const std::string& v, const std::string& where) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw std::runtime_error(where + ": expected an integer, got '" + v + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& v, const std::string& where) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw std::runtime_error(where + ": expected an unsigned integer, got '" + v + "'");
    }
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(v);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace detail

// INI-style configuration:
//   [dataset] path / has_header / label_column
//   [experiment] classifiers / seed / profile
//   [cv] folds / repetitions / metric / standardize / stratified / threads
//   [methods.<name>] per-method parameter overrides
//   [output] directory / traces
// Unknown sections or keys are syntax errors; semantic checks live in
// validate_config so a validation pass can report everything at once.
inline ExperimentConfig parse_config_text(const std::string& text,
                                          const std::string& origin = "<config>") {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> method_index;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = origin + ":" + std::to_string(line_no);
        std::string s = detail::trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;

        if (s.front() == '[') {
            if (s.back() != ']') throw std::runtime_error(where + ": unterminated section");
            section = detail::trim(s.substr(1, s.size() - 2));
            if (section.rfind("methods.", 0) == 0) {
                const std::string name = section.substr(8);
                if (name.empty()) throw std::runtime_error(where + ": empty method name");
                if (!method_index.count(name)) {
                    method_index[name] = cfg.methods.size();
                    cfg.methods.push_back({name, {}});
                }
            } else if (section != "dataset" && section != "experiment" &&
                       section != "cv" && section != "output") {
                throw std::runtime_error(where + ": unknown section [" + section + "]");
            }
            continue;
        }

        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(where + ": expected key = value");
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string value = detail::trim(s.substr(eq + 1));
        if (key.empty()) throw std::runtime_error(where + ": empty key");
        if (section.empty())
            throw std::runtime_error(where + ": key outside any section");

        if (section == "dataset") {
            if (key == "path") {
                for (auto& p : detail::split_list(value)) cfg.dataset_paths.push_back(p);
            } else if (key == "has_header") {
                cfg.csv_has_header = detail::parse_bool(value, where);
            } else if (key == "label_column") {
                cfg.label_column = static_cast<int>(detail::parse_int(value, where));
            } else {
                throw std::runtime_error(where + ": unknown dataset key '" + key + "'");
            }
        } else if (section == "experiment") {
            if (key == "classifiers") {
                cfg.classifiers = detail::split_list(value);
            } else if (key == "seed") {
                cfg.seed = detail::parse_u64(value, where);
            } else if (key == "profile") {
                cfg.profile = value;
            } else {
                throw std::runtime_error(where + ": unknown experiment key '" + key + "'");
            }
        } else if (section == "cv") {
            if (key == "folds") {
                cfg.cv.folds = static_cast<int>(detail::parse_int(value, where));
            } else if (key == "repetitions") {
                cfg.cv.repetitions = static_cast<int>(detail::parse_int(value, where));
            } else if (key == "metric") {
                if (value == "error" || value == "error_rate")
                    cfg.cv.metric = Metric::error_rate;
                else if (value == "auc")
                    cfg.cv.metric = Metric::auc;
                else
                    throw std::runtime_error(where + ": unknown metric '" + value + "'");
            } else if (key == "standardize") {
                cfg.cv.standardize = detail::parse_bool(value, where);
            } else if (key == "stratified") {
                cfg.cv.stratified = detail::parse_bool(value, where);
            } else if (key == "threads") {
                cfg.cv.threads = static_cast<int>(detail::parse_int(value, where));
            } else {
                throw std::runtime_error(where + ": unknown cv key '" + key + "'");
            }
        } else if (section == "output") {
            if (key == "directory") {
                cfg.output_dir = value;
            } else if (key == "traces") {
                cfg.write_traces = detail::parse_bool(value, where);
            } else {
                throw std::runtime_error(where + ": unknown output key '" + key + "'");
            }
        } else {  // methods.<name>
            const std::string name = section.substr(8);
            auto& spec = cfg.methods[method_index[name]];
            if (spec.params.count(key))
                throw std::runtime_error(where + ": duplicate parameter '" + key + "'");
            spec.params[key] = value;
        }
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    ExperimentConfig cfg = parse_config_text(buffer.str(), path);
    // Dataset paths are relative to the config file so configs stay portable.
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    for (auto& p : cfg.dataset_paths) {
        std::filesystem::path dp(p);
        if (dp.is_relative()) p = (base / dp).lexically_normal().string();
    }
    return cfg;
}

inline const std::map<std::string, std::set<std::string>>& method_parameter_names() {
    static const std::map<std::string, std::set<std::string>> table{
        {"full", {}},
        {"bspsa",
         {"iterations", "stall_fraction", "a", "A", "alpha", "c", "initial", "cache"}},
        {"cspsa",
         {"iterations", "stall_fraction", "a", "A", "alpha", "c", "gamma", "initial",
          "cache"}},
        {"bga",
         {"population", "generations", "stall", "elites", "tournament", "crossover",
          "mutation"}},
        {"sfs", {"max_evaluations"}},
        {"sbs", {"max_evaluations"}},
        {"sffs", {"max_evaluations"}},
        {"sbfs", {"max_evaluations"}},
    };
    return table;
}

// Collect every semantic problem instead of stopping at the first one.
inline std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> errors;

    if (cfg.dataset_paths.empty()) errors.push_back("no dataset path given");
    for (const auto& p : cfg.dataset_paths)
        if (!std::filesystem::exists(p)) errors.push_back("dataset file not found: " + p);

    if (cfg.classifiers.empty()) errors.push_back("no classifiers given");
    for (const auto& c : cfg.classifiers)
        if (!parse_classifier(c)) errors.push_back("unknown classifier: " + c);

    if (cfg.methods.empty()) errors.push_back("no methods given");
    for (const auto& m : cfg.methods) {
        if (!known_methods().count(m.name)) {
            errors.push_back("unknown method: " + m.name);
            continue;
        }
        const auto& allowed = method_parameter_names().at(m.name);
        for (const auto& [key, value] : m.params) {
            if (!allowed.count(key)) {
                errors.push_back("method " + m.name + ": unknown parameter '" + key + "'");
                continue;
            }
            try {
                if (key == "cache") {
                    detail::parse_bool(value, m.name);
                } else {
                    std::size_t used = 0;
                    (void)std::stod(value, &used);
                    if (used != value.size()) throw std::invalid_argument("trailing");
                }
            } catch (const std::exception&) {
                errors.push_back("method " + m.name + ": parameter '" + key +
                                 "' has a bad value '" + value + "'");
            }
        }
    }

    if (cfg.cv.folds < 2) errors.push_back("cv.folds must be at least 2");
    if (cfg.cv.repetitions < 1) errors.push_back("cv.repetitions must be at least 1");
    if (cfg.cv.threads < 1) errors.push_back("cv.threads must be at least 1");

    if (cfg.profile != "auto" && cfg.profile != "small" && cfg.profile != "large")
        errors.push_back("profile must be auto, small, or large");
    if (cfg.output_dir.empty()) errors.push_back("output directory is empty");

    return errors;
}

}  // namespace spsafs

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spsafs/spsafs.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int cmd_validate(const std::string& config_path) {
    spsafs::ExperimentConfig cfg;
    try {
        cfg = spsafs::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    const auto errors = spsafs::validate_config(cfg);
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "error: " << e << '\n';
        return kExitConfig;
    }
    std::cout << "configuration ok: " << cfg.dataset_paths.size() << " dataset(s), "
              << cfg.classifiers.size() << " classifier(s), " << cfg.methods.size()
              << " method(s)\n";
    return kExitOk;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed) {
    spsafs::ExperimentConfig cfg;
    try {
        cfg = spsafs::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (seed) cfg.seed = *seed;
    const auto errors = spsafs::validate_config(cfg);
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "error: " << e << '\n';
        return kExitConfig;
    }
    try {
        const spsafs::ExperimentOutcome outcome = spsafs::run_experiment(cfg, &std::cout);
        spsafs::write_outputs(outcome, cfg.output_dir);
        std::cout << "wrote " << cfg.output_dir << "/report.json\n";
        for (const auto& cell : outcome.cells)
            if (cell.failed) {
                std::cerr << "error: cell " << cell.dataset << "/" << cell.classifier
                          << "/" << cell.method << " failed: " << cell.error << '\n';
                return kExitRuntime;
            }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_trace(const std::string& cell_path, const std::string& csv_path) {
    try {
        std::ifstream in(cell_path);
        if (!in) throw std::runtime_error("cannot open result file: " + cell_path);
        nlohmann::json j;
        in >> j;
        if (!j.contains("trace"))
            throw std::runtime_error(cell_path + ": no trace recorded");
        const auto trace = spsafs::detail::trace_from_json(j.at("trace"));
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error("cannot open output file: " + csv_path);
        spsafs::emit_trace(trace, out);
        std::cout << "wrote " << csv_path << " (" << trace.size() << " rows)\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wrapper feature selection experiments"};
    app.require_subcommand(1);

    std::string config_path, cell_path, csv_path;
    std::optional<std::uint64_t> seed;

    CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--seed", seed, "override the master seed");

    CLI::App* validate =
        app.add_subcommand("validate", "check a config file and report every problem");
    validate->add_option("config", config_path, "experiment config file")->required();

    CLI::App* trace =
        app.add_subcommand("trace", "export the search trace of a cell result as CSV");
    trace->add_option("result", cell_path, "cell result JSON")->required();
    trace->add_option("csv", csv_path, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (run->parsed()) return cmd_run(config_path, seed);
    if (validate->parsed()) return cmd_validate(config_path);
    return cmd_trace(cell_path, csv_path);
}

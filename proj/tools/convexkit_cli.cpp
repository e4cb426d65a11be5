#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "convexkit/errors.hpp"
#include "convexkit/harness.hpp"
#include "convexkit/parallel.hpp"

#ifndef CONVEXKIT_CONFIG_DIR
#define CONVEXKIT_CONFIG_DIR "configs"
#endif

namespace ck = convexkit;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

bool is_config_error(const ck::Error& e) { return e.kind() == "ConfigError" || e.kind() == "ParseError"; }

void print_entries(const std::string& title, const std::vector<ck::CatalogEntry>& entries) {
    std::cout << title << ":\n";
    for (const ck::CatalogEntry& e : entries) {
        std::cout << "  " << e.id;
        if (!e.family.empty()) std::cout << " [" << e.family << "]";
        std::cout << "  " << e.description << "\n";
        if (!e.problems.empty()) {
            std::cout << "      problems:";
            for (const std::string& p : e.problems) std::cout << ' ' << p;
            std::cout << "\n      bounds:";
            for (const std::string& b : e.bounds) std::cout << ' ' << b;
            std::cout << "\n";
        }
    }
}

int cmd_list() {
    print_entries("algorithms", ck::algorithm_catalog());
    print_entries("problems", ck::problem_catalog());
    print_entries("bounds", ck::bound_catalog());
    return kOk;
}

std::string summary_line(const ck::ExperimentResult& r) {
    std::string verdict = "no bound checked";
    if (r.verdict) {
        verdict = r.verdict->passed ? "PASS" : "FAIL at t = " + std::to_string(*r.verdict->first_violation);
        verdict += " (" + r.bound->id + ", worst ratio " + ck::format_double(r.verdict->worst_ratio) + ")";
    }
    return r.config.algorithm + " on " + r.config.problem.kind + ": " + verdict;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    const ck::ExperimentConfig config = ck::load_config(config_path);
    const ck::ExperimentResult r = ck::run_experiment(config);
    ck::write_experiment(r, out_dir);
    std::cout << summary_line(r) << "\nwrote " << out_dir << "\n";
    return r.verdict && !r.verdict->passed ? kViolation : kOk;
}

int cmd_suite(const std::string& filter, const std::string& config_dir, const std::string& out_dir) {
    if (!fs::is_directory(config_dir)) throw ck::ConfigError("no such config directory: " + config_dir);
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(config_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());

    // parse everything first so schema errors stop the suite before any run
    std::vector<ck::ExperimentConfig> configs;
    for (const fs::path& p : paths) {
        ck::ExperimentConfig c = ck::load_config(p.string());
        std::string family;
        for (const ck::CatalogEntry& e : ck::algorithm_catalog())
            if (e.id == c.algorithm) family = e.family;
        const std::string stem = p.stem().string();
        if (filter.empty() || filter == "all" || filter == family || filter == c.algorithm ||
            stem.find(filter) != std::string::npos)
            configs.push_back(std::move(c));
    }
    if (configs.empty()) throw ck::ConfigError("no config in " + config_dir + " matches '" + filter + "'");

    // experiments are isolated units; the summary is built after the join
    std::vector<std::string> lines(configs.size());
    std::vector<int> codes(configs.size(), kOk);
    ck::parallel_for(configs.size(), [&](std::size_t i) {
        const std::string stem = fs::path(configs[i].source).stem().string();
        try {
            const ck::ExperimentResult r = ck::run_experiment(configs[i]);
            ck::write_experiment(r, (fs::path(out_dir) / stem).string());
            lines[i] = stem + ": " + summary_line(r);
            if (r.verdict && !r.verdict->passed) codes[i] = kViolation;
        } catch (const ck::Error& e) {
            lines[i] = stem + ": ERROR " + e.what();
            codes[i] = is_config_error(e) ? kConfigError : kRuntimeError;
        }
    });
    int code = kOk;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        std::cout << lines[i] << "\n";
        code = std::max(code, codes[i]);
    }
    std::cout << configs.size() << " experiments, results in " << out_dir << "\n";
    return code;
}

int cmd_report(const std::string& in_dir, const std::string& out_file) {
    const std::string table = ck::markdown_report(ck::collect_results(in_dir));
    if (out_file.empty())
        std::cout << table;
    else
        ck::write_text_file(out_file, table);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"convexkit: convex optimization algorithms with checked convergence guarantees"};
    app.require_subcommand(1);

    app.add_subcommand("list", "print algorithms, problem kinds and bounds");

    auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
    std::string config_path, run_out = "out";
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--out", run_out, "output directory");

    auto* suite = app.add_subcommand("suite", "run every config matching a tag (family, algorithm or file name)");
    std::string filter, config_dir = CONVEXKIT_CONFIG_DIR, suite_out = "suite_out";
    suite->add_option("--filter", filter, "tag; empty or 'all' runs everything");
    suite->add_option("--configs", config_dir, "config directory");
    suite->add_option("--out", suite_out, "output directory");

    auto* report = app.add_subcommand("report", "aggregate result.json files into a Markdown table");
    std::string in_dir, report_out;
    report->add_option("--in", in_dir, "directory searched recursively for result.json")->required();
    report->add_option("--out", report_out, "write the table here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (app.got_subcommand("list")) return cmd_list();
        if (app.got_subcommand("run")) return cmd_run(config_path, run_out);
        if (app.got_subcommand("suite")) return cmd_suite(filter, config_dir, suite_out);
        return cmd_report(in_dir, report_out);
    } catch (const ck::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_config_error(e) ? kConfigError : kRuntimeError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
}

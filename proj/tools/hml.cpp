#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <string>

#include "hml/errors.hpp"
#include "hml/pipeline.hpp"

namespace {

using Runner = void (*)(const hml::ExperimentConfig&, const std::string&);

int parse_workers(const char* text) {
    int value = 0;
    const char* end = text + std::string_view(text).size();
    const auto [ptr, ec] = std::from_chars(text, end, value);
    if (ec != std::errc{} || ptr != end || value < 1)
        throw hml::ConfigError("HML_WORKERS must be a positive integer");
    return value;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"harmonic measure laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "hml 0.1.0");

    std::string config_path;
    std::string out_dir;
    std::int64_t seed = 0;
    int workers = 0;
    Runner runner = nullptr;

    const auto add = [&](const char* name, const char* desc, Runner fn) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "experiment config (JSON)")
            ->required();
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--workers", workers, "worker thread count");
        sub->callback([&runner, fn] { runner = fn; });
        return sub;
    };

    add("generate", "write the model and cube lattice", &hml::cmd_generate);
    add("betas", "scan flatness coefficients over the lattice", &hml::cmd_betas);
    add("harmonic", "estimate harmonic measure by random walks", &hml::cmd_harmonic);
    add("analyze", "extract decay series, jumps and dimension bounds",
        &hml::cmd_analyze);
    add("report", "render report.md and plot data from prior stages",
        &hml::cmd_report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const CLI::App* sub = app.get_subcommands().front();
    try {
        hml::ExperimentConfig cfg = hml::load_config(config_path);
        if (sub->count("--seed") > 0) {
            cfg.seed = seed;
            cfg.walk.seed = seed;
        }
        if (sub->count("--workers") > 0) {
            if (workers < 1) throw hml::ConfigError("--workers must be >= 1");
            cfg.workers = workers;
            cfg.walk.n_workers = workers;
        } else if (const char* env = std::getenv("HML_WORKERS")) {
            cfg.workers = parse_workers(env);
            cfg.walk.n_workers = cfg.workers;
        }
        runner(cfg, out_dir);
        return 0;
    } catch (const hml::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const hml::MissingInput& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 3;
    } catch (const hml::StatError& e) {
        std::cerr << "statistical precondition failed: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

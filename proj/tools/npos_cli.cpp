// npos: config-driven experiment runner for reference-free neural positioning.
//
// Subcommands:
//   simulate   trajectory + displacement + anchor + CSI files
//   featurize  CSI file -> feature file
//   train      one method -> model checkpoint (--method ours|baseline1|baseline2|baseline3)
//   evaluate   checkpoints -> error reports, CDFs, plots
//   sweep      V or L ablation (--param, --values)
//   all        full pipeline for every configured method

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "npos/errors.hpp"
#include "npos/kernels.hpp"
#include "npos/runner.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitMissingFile = 3;
constexpr int kExitUnknownMethod = 4;
constexpr int kExitRuntime = 5;

struct Options {
    std::string config_path;
    std::string method;
    std::string param;
    std::string values_csv;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
};

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::string cur;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

npos::cfg::ExperimentConfig resolve_config(const Options& opt) {
    npos::cfg::ExperimentConfig cfg = opt.config_path.empty()
                                          ? npos::cfg::ExperimentConfig::defaults()
                                          : npos::cfg::ExperimentConfig::load(opt.config_path);
    if (opt.seed_set) cfg.override_seeds(opt.seed);
    // environment overrides output directory and thread count only
    if (const char* env = std::getenv("NPOS_OUT_DIR")) cfg.run.out_dir = env;
    if (const char* env = std::getenv("NPOS_THREADS")) cfg.run.threads = std::atoi(env);
    if (!opt.out_dir.empty()) cfg.run.out_dir = opt.out_dir;
    if (opt.threads > 0) cfg.run.threads = opt.threads;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reference-free neural positioning laboratory"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&opt](CLI::App* cmd) {
        cmd->add_option("--config", opt.config_path, "INI config file (defaults when omitted)");
        cmd->add_option("--out", opt.out_dir, "output directory override");
        cmd->add_option("--seed", opt.seed, "master seed overriding every configured seed")
            ->each([&opt](const std::string&) { opt.seed_set = true; });
        cmd->add_option("--threads", opt.threads, "worker threads for independent runs");
    };

    CLI::App* c_sim = app.add_subcommand("simulate", "generate trajectory, displacements, CSI");
    CLI::App* c_feat = app.add_subcommand("featurize", "convert CSI into feature vectors");
    CLI::App* c_train = app.add_subcommand("train", "train one positioning method");
    CLI::App* c_eval = app.add_subcommand("evaluate", "evaluate trained checkpoints");
    CLI::App* c_sweep = app.add_subcommand("sweep", "V or L ablation sweep");
    CLI::App* c_all = app.add_subcommand("all", "full pipeline");
    for (CLI::App* c : {c_sim, c_feat, c_train, c_eval, c_sweep, c_all}) add_common(c);
    c_train->add_option("--method", opt.method, "ours|baseline1|baseline2|baseline3")->required();
    c_sweep->add_option("--param", opt.param, "V or L")->required();
    c_sweep->add_option("--values", opt.values_csv, "comma-separated sweep values")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        const npos::cfg::ExperimentConfig cfg = resolve_config(opt);
        const std::string& out = cfg.run.out_dir;
        if (c_sim->parsed()) {
            npos::run::stage_simulate(cfg, out);
            std::cout << "simulate: wrote trajectory, displacements, anchors, CSI to " << out
                      << " (kernels: " << npos::kern::backend_name() << ")\n";
        } else if (c_feat->parsed()) {
            npos::run::stage_featurize(cfg, out);
            std::cout << "featurize: wrote " << npos::run::features_path(out) << "\n";
        } else if (c_train->parsed()) {
            npos::run::stage_train(cfg, out, opt.method);
            std::cout << "train: wrote " << npos::run::model_path(out, cfg, opt.method) << "\n";
        } else if (c_eval->parsed()) {
            const auto reports = npos::run::stage_evaluate(cfg, out);
            for (const auto& r : reports)
                std::cout << r.method << ": mean " << r.mean << " m, median " << r.median
                          << " m, p95 " << r.p95 << " m\n";
        } else if (c_sweep->parsed()) {
            const auto rows = npos::run::stage_sweep(cfg, out, opt.param, parse_values(opt.values_csv));
            for (const auto& r : rows)
                std::cout << opt.param << "=" << r.value << ": mean " << r.mean << " m, p95 "
                          << r.p95 << " m\n";
        } else if (c_all->parsed()) {
            npos::run::stage_all(cfg, out);
            std::cout << "all: artifacts in " << out << ", results in "
                      << npos::run::results_path(out) << "\n";
        }
    } catch (const npos::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const npos::MissingFileError& e) {
        std::cerr << "missing input: " << e.what() << "\n";
        return kExitMissingFile;
    } catch (const npos::UnknownMethodError& e) {
        std::cerr << "unknown method: " << e.what() << "\n";
        return kExitUnknownMethod;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}

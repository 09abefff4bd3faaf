#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "csl/cli/config.hpp"
#include "csl/cli/studies.hpp"

namespace cli = csl::cli;

namespace {

int config_error(const cli::ConfigReport& rep, const std::string& context) {
    nlohmann::ordered_json err;
    err["error"]["kind"] = "config";
    err["error"]["message"] = context;
    err["error"]["errors"] = rep.errors;
    err["error"]["exit"] = cli::kExitConfig;
    std::cout << err.dump() << "\n";
    std::cerr << "error (config): " << context << "\n";
    for (const auto& e : rep.errors) std::cerr << "  " << e << "\n";
    return cli::kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scalar-field collapse simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 0;
    bool timestamp = false;

    auto add_study = [&](const char* name, const char* desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "scenario config (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--threads", threads, "worker threads (default: SIM_THREADS or 1)");
        sub->add_flag("--timestamp", timestamp, "stamp artifact headers with generation time");
        return sub;
    };

    CLI::App* sub_dec = add_study("decoherence", "clump-basis decoherence curve");
    CLI::App* sub_pro = add_study("production", "particle production per mode");
    CLI::App* sub_ker = add_study("kernel", "closed-form kernel summary at the first mode");
    CLI::App* sub_fex = add_study("field-exponent", "field-basis density-matrix exponents");
    CLI::App* sub_orc = add_study("oracle-check", "invariant suites of the reference integrator");

    CLI::App* sub_val = app.add_subcommand("validate", "check a config without running");
    sub_val->add_option("--config", config_path, "scenario config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : cli::kExitConfig;
    }

    if (sub_val->parsed()) return cli::validate_config(config_path);

    cli::Study want = cli::Study::decoherence;
    if (sub_dec->parsed()) want = cli::Study::decoherence;
    if (sub_pro->parsed()) want = cli::Study::production;
    if (sub_ker->parsed()) want = cli::Study::kernel;
    if (sub_fex->parsed()) want = cli::Study::field_exponent;
    if (sub_orc->parsed()) want = cli::Study::oracle_check;

    cli::ScenarioConfig cfg;
    cli::ConfigReport rep = cli::check_config(config_path, &cfg);
    if (!rep.ok()) return config_error(rep, "config rejected: " + config_path);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";

    if (cfg.study != want) {
        cli::ConfigReport mismatch;
        mismatch.errors.push_back(std::string("study: config says '") + study_name(cfg.study) +
                                  "' but the subcommand is '" + study_name(want) + "'");
        return config_error(mismatch, "study mismatch");
    }

    cli::RunOptions opts;
    opts.out_override = out_dir;
    opts.threads = cli::resolve_threads(threads);
    opts.timestamp = timestamp;
    return cli::run_scenario(cfg, opts);
}

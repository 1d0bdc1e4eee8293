#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "peqs/peqs.h"

namespace {

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSkipped = 3;
constexpr int kExitViolation = 4;

int exit_code_for(peqs_status status) {
    switch (status) {
        case PEQS_OK: return 0;
        case PEQS_ERR_INVALID_ARGUMENT: return kExitConfig;
        default: return kExitIo;
    }
}

int fail(peqs_status status) {
    std::cerr << "error: " << peqs_last_error() << "\n";
    return exit_code_for(status);
}

struct ConfigHandle {
    peqs_config* ptr = nullptr;
    ~ConfigHandle() { peqs_config_free(ptr); }
};

struct OwnedString {
    char* ptr = nullptr;
    ~OwnedString() { peqs_string_free(ptr); }
};

// Remaining tokens mirror config field paths: --noise.sigma 0.05,0.1 or
// --realizations=1000.
int apply_overrides(peqs_config* config, const std::vector<std::string>& extras) {
    std::size_t i = 0;
    while (i < extras.size()) {
        std::string key = extras[i];
        if (key.rfind("--", 0) != 0 || key.size() == 2) {
            std::cerr << "error: expected --<field.path>, got '" << key << "'\n";
            return kExitConfig;
        }
        key = key.substr(2);
        std::string value;
        const std::size_t eq = key.find('=');
        if (eq != std::string::npos) {
            value = key.substr(eq + 1);
            key = key.substr(0, eq);
            ++i;
        } else {
            if (i + 1 >= extras.size()) {
                std::cerr << "error: --" << key << " needs a value\n";
                return kExitConfig;
            }
            value = extras[i + 1];
            i += 2;
        }
        if (const peqs_status s = peqs_config_override(config, key.c_str(), value.c_str());
            s != PEQS_OK)
            return fail(s);
    }
    return 0;
}

using RunFn = peqs_status (*)(const peqs_config*, peqs_run_summary*);

int run_experiment(const std::string& config_path, const std::vector<std::string>& extras,
                   RunFn run) {
    ConfigHandle config;
    if (const peqs_status s = peqs_config_load(config_path.c_str(), &config.ptr); s != PEQS_OK)
        return fail(s);
    if (const int rc = apply_overrides(config.ptr, extras); rc != 0) return rc;

    OwnedString hash;
    if (const peqs_status s = peqs_config_validate(config.ptr, nullptr, &hash.ptr); s != PEQS_OK)
        return fail(s);

    peqs_run_summary summary{};
    const peqs_status s = run(config.ptr, &summary);
    if (s != PEQS_OK) return fail(s);

    std::cout << "wrote " << summary.csv_path << " (" << summary.rows << " rows, "
              << summary.skipped << " skipped, config " << hash.ptr << ")\n";
    int rc = 0;
    if (summary.violations > 0) {
        std::cerr << "error: " << summary.violations
                  << " invariant violation(s); see the violations list in " << summary.meta_path
                  << "\n";
        rc = kExitViolation;
    } else if (summary.rows > 0 && summary.skipped == summary.rows) {
        std::cerr << "warning: every cell was skipped; see skipped_reason in "
                  << summary.csv_path << "\n";
        rc = kExitSkipped;
    }
    peqs_run_summary_clear(&summary);
    return rc;
}

int emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text << "\n";
        return 0;
    }
    std::ofstream f(output_path, std::ios::binary);
    f << text << "\n";
    f.flush();
    if (!f.good()) {
        std::cerr << "error: cannot write " << output_path << "\n";
        return kExitIo;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Precision-error QAOA simulation toolkit"};
    app.set_version_flag("--version", peqs_version());
    app.require_subcommand(1);

    std::string config_path;
    const auto add_run = [&](const char* name, const char* desc) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        cmd->add_option("-c,--config", config_path, "experiment config (JSON)")->required();
        cmd->allow_extras();
        return cmd;
    };
    CLI::App* sweep = add_run("sweep", "noise-grid expectation sweep (CSV)");
    CLI::App* bounds = add_run("bounds", "measured deviations against error bounds (CSV)");
    CLI::App* digitize = add_run("digitize", "digitized-schedule gap and mitigation runs (CSV)");

    CLI::App* fit = app.add_subcommand("fit", "fit a scaling law to a sweep CSV");
    std::string fit_csv, fit_kind, fit_axis, fit_output;
    std::vector<double> fit_window;
    int fit_n = 0;
    double fit_saturation = 0.0;
    fit->add_option("csv", fit_csv, "sweep CSV produced by this tool")->required();
    fit->add_option("-k,--kind", fit_kind,
                    "exp-decay | squared-exp | power-law | saturation | layer-growth | "
                    "unitary-distance")
        ->required();
    fit->add_option("--x-axis", fit_axis, "gamma_p | eta_p | eta2_p (default: per kind)");
    fit->add_option("--window", fit_window, "fit window x_min x_max")->expected(2);
    CLI::Option* fit_n_opt = fit->add_option("-n", fit_n, "keep only this problem size");
    fit->add_option("--saturation", fit_saturation, "saturation value subtracted from means");
    fit->add_option("-o,--output", fit_output, "write the fit JSON here instead of stdout");

    CLI::App* angles = app.add_subcommand("optimal-angles", "optimized ring schedule (JSON)");
    int angles_n = 0;
    std::string angles_output;
    angles->add_option("-n", angles_n, "ring size (even)")->required();
    angles->add_option("-o,--output", angles_output, "write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    if (sweep->parsed()) return run_experiment(config_path, sweep->remaining(), peqs_run_sweep);
    if (bounds->parsed()) return run_experiment(config_path, bounds->remaining(), peqs_run_bounds);
    if (digitize->parsed())
        return run_experiment(config_path, digitize->remaining(), peqs_run_digitization);

    if (fit->parsed()) {
        const double window[2] = {fit_window.empty() ? 0.0 : fit_window[0],
                                  fit_window.empty() ? 0.0 : fit_window[1]};
        OwnedString doc;
        int flagged = 0;
        const peqs_status s = peqs_run_fit(
            fit_csv.c_str(), fit_kind.c_str(), fit_axis.empty() ? nullptr : fit_axis.c_str(),
            fit_window.empty() ? nullptr : window, fit_n_opt->count() > 0 ? &fit_n : nullptr,
            fit_saturation, &doc.ptr, &flagged);
        if (s != PEQS_OK) return fail(s);
        if (const int rc = emit(doc.ptr, fit_output); rc != 0) return rc;
        if (flagged != 0) {
            std::cerr << "warning: fit window selected no usable points; result is flagged\n";
            return kExitSkipped;
        }
        return 0;
    }

    OwnedString doc;
    if (const peqs_status s = peqs_optimal_angles(angles_n, &doc.ptr); s != PEQS_OK)
        return fail(s);
    return emit(doc.ptr, angles_output);
}

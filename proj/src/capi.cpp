#include "peqs/peqs.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "json.hpp"
#include "peqs/error.hpp"
#include "peqs/experiments.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

peqs_status status_of(peqs::errc code) {
    switch (code) {
        case peqs::errc::invalid_argument:
        case peqs::errc::model_mismatch:
        case peqs::errc::dimension_mismatch:
        case peqs::errc::decomposition: return PEQS_ERR_INVALID_ARGUMENT;
        case peqs::errc::capacity: return PEQS_ERR_CAPACITY;
        case peqs::errc::io: return PEQS_ERR_IO;
        case peqs::errc::window: return PEQS_ERR_WINDOW;
        case peqs::errc::optimization_failure: return PEQS_ERR_OPTIMIZATION;
        case peqs::errc::truncation_warning: return PEQS_ERR_TRUNCATION;
    }
    return PEQS_ERR_INTERNAL;
}

template <typename Fn>
peqs_status guarded(Fn&& fn) {
    try {
        fn();
        return PEQS_OK;
    } catch (const peqs::error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return PEQS_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PEQS_ERR_INTERNAL;
    }
}

peqs_status require_arg(bool ok, const char* msg) {
    if (ok) return PEQS_OK;
    g_last_error = msg;
    return PEQS_ERR_INVALID_ARGUMENT;
}

void fill_summary(peqs_run_summary* out, const peqs::RunSummary& s) {
    out->csv_path = dup_string(s.csv_path.string());
    out->meta_path = dup_string(s.meta_path.string());
    out->rows = s.rows;
    out->skipped = s.skipped;
    out->violations = s.violations.size();
}

}  // namespace

struct peqs_config {
    nlohmann::json doc;
};

namespace {

template <typename Run>
peqs_status run_op(const peqs_config* config, peqs_run_summary* out, Run&& run) {
    if (const peqs_status s = require_arg(config != nullptr && out != nullptr,
                                          "config and summary must not be null");
        s != PEQS_OK)
        return s;
    *out = peqs_run_summary{};
    return guarded([&] {
        const peqs::ExperimentConfig parsed = peqs::parse_config(config->doc);
        fill_summary(out, run(parsed));
    });
}

}  // namespace

extern "C" {

const char* peqs_version(void) { return peqs::kToolVersion; }

const char* peqs_last_error(void) { return g_last_error.c_str(); }

peqs_status peqs_config_load(const char* path, peqs_config** out) {
    if (const peqs_status s =
            require_arg(path != nullptr && out != nullptr, "path and out must not be null");
        s != PEQS_OK)
        return s;
    *out = nullptr;
    return guarded([&] {
        peqs::ExperimentConfig parsed = peqs::load_config(path);
        *out = new peqs_config{std::move(parsed.canonical)};
    });
}

peqs_status peqs_config_parse(const char* json_text, peqs_config** out) {
    if (const peqs_status s =
            require_arg(json_text != nullptr && out != nullptr, "text and out must not be null");
        s != PEQS_OK)
        return s;
    *out = nullptr;
    return guarded([&] {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(json_text);
        } catch (const nlohmann::json::parse_error& e) {
            peqs::raise(peqs::errc::invalid_argument, std::string("config parse: ") + e.what());
        }
        peqs::ExperimentConfig parsed = peqs::parse_config(doc);
        *out = new peqs_config{std::move(parsed.canonical)};
    });
}

peqs_status peqs_config_override(peqs_config* config, const char* key, const char* value) {
    if (const peqs_status s =
            require_arg(config != nullptr && key != nullptr && value != nullptr,
                        "config, key, and value must not be null");
        s != PEQS_OK)
        return s;
    return guarded([&] { peqs::apply_override(config->doc, key, value); });
}

peqs_status peqs_config_validate(const peqs_config* config, char** canonical_out,
                                 char** hash_out) {
    if (const peqs_status s = require_arg(config != nullptr, "config must not be null");
        s != PEQS_OK)
        return s;
    return guarded([&] {
        const peqs::ExperimentConfig parsed = peqs::parse_config(config->doc);
        if (canonical_out != nullptr) *canonical_out = dup_string(parsed.canonical.dump(2));
        if (hash_out != nullptr) *hash_out = dup_string(parsed.config_hash);
    });
}

void peqs_config_free(peqs_config* config) { delete config; }

peqs_status peqs_run_sweep(const peqs_config* config, peqs_run_summary* out) {
    return run_op(config, out, [](const peqs::ExperimentConfig& c) { return peqs::run_sweep(c); });
}

peqs_status peqs_run_bounds(const peqs_config* config, peqs_run_summary* out) {
    return run_op(config, out,
                  [](const peqs::ExperimentConfig& c) { return peqs::run_bounds(c); });
}

peqs_status peqs_run_digitization(const peqs_config* config, peqs_run_summary* out) {
    return run_op(config, out,
                  [](const peqs::ExperimentConfig& c) { return peqs::run_digitization(c); });
}

void peqs_run_summary_clear(peqs_run_summary* summary) {
    if (summary == nullptr) return;
    std::free(summary->csv_path);
    std::free(summary->meta_path);
    *summary = peqs_run_summary{};
}

peqs_status peqs_run_fit(const char* csv_path, const char* kind, const char* x_axis,
                         const double* window, const int* n_filter, double saturation,
                         char** json_out, int* flagged_out) {
    if (const peqs_status s =
            require_arg(csv_path != nullptr && kind != nullptr && json_out != nullptr &&
                            flagged_out != nullptr,
                        "csv_path, kind, json_out, and flagged_out must not be null");
        s != PEQS_OK)
        return s;
    *json_out = nullptr;
    *flagged_out = 0;
    return guarded([&] {
        peqs::FitRequest request;
        request.kind = peqs::parse_fit_kind(kind);
        if (x_axis != nullptr) request.x_axis = x_axis;
        if (window != nullptr) request.window = peqs::FitWindow{window[0], window[1]};
        if (n_filter != nullptr) request.n_filter = *n_filter;
        request.saturation = saturation;
        const peqs::FitOutcome outcome = peqs::run_fit(csv_path, request);
        *json_out = dup_string(outcome.document.dump(2));
        *flagged_out = outcome.window_error.has_value() ? 1 : 0;
    });
}

peqs_status peqs_optimal_angles(int n, char** json_out) {
    if (const peqs_status s = require_arg(json_out != nullptr, "json_out must not be null");
        s != PEQS_OK)
        return s;
    *json_out = nullptr;
    return guarded([&] { *json_out = dup_string(peqs::optimal_angles_report(n).dump(2)); });
}

void peqs_string_free(char* s) { std::free(s); }

}  // extern "C"

#ifndef PEQS_EXPERIMENTS_HPP
#define PEQS_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "peqs/fitting.hpp"

namespace peqs {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum class ProblemKind { grover, ising_ring };

const char* problem_name(ProblemKind kind);

struct DigitizationSpec {
    int n_bits_gamma = 8;
    int n_bits_beta = 8;
    // n_bits range swept (both channels together) for the gap rows.
    int sweep_lo = 2;
    int sweep_hi = 12;
};

// One experiment grid. Noise cells are the cross product sigma_list x
// eta_list; sigma = sqrt(Gamma) and eta are applied to the cost and mixer
// channels alike.
struct ExperimentConfig {
    std::string name;
    ProblemKind problem = ProblemKind::grover;
    std::vector<int> n_list;
    bool p_optimal = true;
    int p_lo = 1;
    int p_hi = 1;
    std::vector<double> sigma_list;
    std::vector<double> eta_list;
    std::size_t realizations = 1;
    std::uint64_t base_seed = 1;
    std::string outputs = ".";
    bool distance = false;  // fill the unitary-distance columns (costly)
    std::optional<DigitizationSpec> digitization;

    // Normalized echo of the parsed document; its dump is what gets hashed,
    // so two configs agree on outputs iff they agree here.
    nlohmann::json canonical;
    std::string config_hash;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

// One dotted-path CLI override, e.g. ("noise.sigma", "0.05,0.1"). Comma lists
// become arrays; elements parse as JSON scalars and fall back to strings.
void apply_override(nlohmann::json& doc, const std::string& path, const std::string& value);

std::uint64_t fnv1a64(std::string_view bytes);

struct RunSummary {
    std::filesystem::path csv_path;
    std::filesystem::path meta_path;
    std::size_t rows = 0;
    std::size_t skipped = 0;  // rows carrying a nonempty skipped_reason
    std::vector<std::string> violations;
};

// Grid sweep of the noise-averaged objective (and optionally the unitary
// distance). One CSV row per (n, p, sigma, eta) cell; cells that cannot run
// are kept as rows with a skipped_reason, never dropped.
RunSummary run_sweep(const ExperimentConfig& config);

// Measured deviation vs second-cumulant approximation vs the numerical and
// analytic bound flavors, per cell. Relaxation-order breaches (numerical >
// analytic) are recorded in `violations`.
RunSummary run_bounds(const ExperimentConfig& config);

// Digitized-angle rows: an n_bits sweep of the ideal-vs-digitized gap plus,
// for every nonzero sigma, a matched-budget mitigation row comparing noisy
// analog against noisy digitized evolution.
RunSummary run_digitization(const ExperimentConfig& config);

enum class FitKind { exp_decay, squared_exp, power_law, saturation, layer_growth, unitary_distance };

FitKind parse_fit_kind(const std::string& name);
const char* fit_kind_name(FitKind kind);

struct FitRequest {
    FitKind kind = FitKind::exp_decay;
    // x column recipe: "gamma_p" (Gamma * p), "eta_p", or "eta2_p"; empty
    // picks the kind's default.
    std::string x_axis;
    std::optional<FitWindow> window;
    std::optional<int> n_filter;
    double saturation = 0.0;  // subtracted before normalizing decay values
};

struct FitOutcome {
    FitResult fit;
    nlohmann::json document;
    // Set when the requested window left nothing to fit; the result is then
    // a flagged (invalid) placeholder rather than an exception.
    std::optional<std::string> window_error;
};

FitOutcome run_fit(const std::filesystem::path& csv_path, const FitRequest& request);

// Ising optimizer dump: angles, value, ratio, and the stationarity residual.
nlohmann::json optimal_angles_report(int n);

}  // namespace peqs

#endif

#ifndef PEQS_NOISE_HPP
#define PEQS_NOISE_HPP

#include <cstdint>
#include <vector>

#include "peqs/qaoa.hpp"
#include "peqs/statevec.hpp"

namespace peqs {

// Multiplicative angle-error model: every applied sub-block angle is scaled by
// an independent draw from N(1 + eta_kind, sqrt(gamma_kind)). Draws are never
// truncated; negative multipliers are legal.
struct NoiseModel {
    double eta_m = 0.0;
    double eta_c = 0.0;
    double gamma_m = 0.0;
    double gamma_c = 0.0;

    static NoiseModel stochastic(double gamma);
    static NoiseModel coherent(double eta);

    bool is_coherent() const { return gamma_m == 0.0 && gamma_c == 0.0; }
    bool is_stochastic() const { return eta_m == 0.0 && eta_c == 0.0; }
    bool is_zero() const { return is_coherent() && is_stochastic(); }
    void validate() const;
};

struct NoiseRealization {
    std::vector<double> multipliers;
    std::uint64_t seed = 0;
};

struct EnsembleStats {
    double mean = 0.0;
    double variance = 0.0;
    double stderr_mean = 0.0;
    std::size_t count = 0;
};

// One multiplier per sub-block; zero-variance kinds take their mean exactly
// and consume no randomness, so coherent runs are reproducible arithmetic.
NoiseRealization sample_realization(const NoiseModel& model, const Schedule& schedule,
                                    std::uint64_t seed);

// Realization i uses the counter-derived seed split(base_seed, i); aggregation
// uses running sums so the result is independent of evaluation order.
EnsembleStats ensemble_expectation(const DiagonalObservable& cost, const Schedule& schedule,
                                   const NoiseModel& model, const DiagonalObservable& obs,
                                   std::size_t realizations, std::uint64_t base_seed);

struct UnitaryDistanceStats {
    EnsembleStats spectral;       // ||U - U_0||_inf
    EnsembleStats frobenius_sq;   // ||U - U_0||_F^2
};

// Spectral distance of one faulty propagator from the ideal one, evaluated
// without forming either matrix: power iteration on 2I - U0^dag U - U^dag U0
// through gate-sequence applies. Works for any n within the state cap.
double unitary_distance_matrix_free(const DiagonalObservable& cost, const Schedule& schedule,
                                    const std::vector<double>& multipliers);

EnsembleStats accumulate_stats(const std::vector<double>& values);

UnitaryDistanceStats ensemble_unitary_distance(const DiagonalObservable& cost,
                                               const Schedule& schedule, const NoiseModel& model,
                                               std::size_t realizations, std::uint64_t base_seed,
                                               bool frobenius_channel = true);

}  // namespace peqs

#endif

#ifndef PEQS_BOUNDS_HPP
#define PEQS_BOUNDS_HPP

#include <optional>
#include <string>
#include <vector>

#include "peqs/cumulant.hpp"
#include "peqs/noise.hpp"
#include "peqs/qaoa.hpp"
#include "peqs/statevec.hpp"

namespace peqs {

enum class BoundFlavor { numerical, analytic };

const char* flavor_name(BoundFlavor flavor);

struct BoundEntry {
    std::string name;
    double value = 0.0;
    BoundFlavor flavor = BoundFlavor::numerical;
};

struct BoundReport {
    std::string config_id;
    std::vector<BoundEntry> entries;
    std::optional<double> measured;
    std::optional<double> measured_stderr;
};

// Numerical: evaluated from the dense truncated error operator.
// Analytic: norm-level closed form; relaxes the numerical value further, so
// analytic >= numerical whenever both are finite.
struct BoundPair {
    double numerical = 0.0;
    double analytic = 0.0;
};

// Closed-form estimates of ||C1|| and ||C2|| for one observable term.
//   first  = sum_mu |eta_mu| sum_j |g_j^mu| ||H_mu|| (1 + ||O^-1|| ||O||)
//   second = sum_mu Gamma_mu sum_j |g_j^mu| ||H_mu|| (1 + 3 ||O^-1|| ||O||)
// The `second` form carries continuous-time weights (linear in |g_j|); it is
// the reporting estimate and is a valid bound only when |g_j| ||H_mu|| <= 1.
struct CumulantNormBounds {
    double first = 0.0;
    double second = 0.0;

    // Bound on the generator norm ||-i C1 - C2/2||.
    double generator() const { return first + second / 2.0; }
};

CumulantNormBounds cumulant_norm_bounds(const DiagonalObservable& cost, const Schedule& schedule,
                                        const ObservableTerm& term, const NoiseModel& model);

// Same first-cumulant form, but the variance part uses the discrete
// per-sub-block weights Gamma_mu g_j^2 ||H_mu||^2 that the sampled model
// actually accumulates. This variant upper-bounds the exact cumulant norms
// unconditionally and backs every analytic bound flavor.
CumulantNormBounds cumulant_norm_bounds_discrete(const DiagonalObservable& cost,
                                                 const Schedule& schedule,
                                                 const ObservableTerm& term,
                                                 const NoiseModel& model);

// Bound on |noise-averaged <O> - ideal <O>|.
//   numerical: || sum_i O_i Lambda_i - O ||_inf
//   analytic:  sum_i ||O_i||_inf (e^{B_i} - 1) with B_i the discrete
//              generator-norm bound.
// Both flavors are clipped at ||O||_inf, the physical ceiling on the
// deviation itself; this keeps analytic >= numerical even where the raw
// operator norm overshoots the ceiling.
BoundPair abs_error_bound(const DiagonalObservable& cost, const Schedule& schedule,
                          const ObservableSum& obs_sum, const NoiseModel& model);

// Search-instance analytic estimate min[2(e^{4 pi p* Gamma} - 1), ||H_C||],
// quoted directly from the continuous-weight second-cumulant estimate
// 8 pi p* Gamma. Reporting path only; not comparable to the numerical flavor.
double grover_paper_abs_bound(int p_star, double gamma, double cost_norm);

// |approximation-ratio error| <= abs_error_bound / C_max.
BoundPair approx_ratio_bound(const DiagonalObservable& cost, const Schedule& schedule,
                             const ObservableSum& obs_sum, const NoiseModel& model);

// MSE(O) <= 2 ||O||^2 (1 + 2 h_E^2) for constant (coherent) angle errors,
// with h_E = |eta_M| sum|beta_j| ||H_M|| + |eta_C| sum|gamma_j| ||H_C||.
struct MseCoherentBound {
    double bound = 0.0;
    double h_e = 0.0;
};

MseCoherentBound mse_bound_coherent(const DiagonalObservable& cost, const Schedule& schedule,
                                    const DiagonalObservable& obs, const NoiseModel& model);

// General MSE bound: variance part ||L||(||L|| ||O rho||_1^2 + ||O^2 rho||_1)
// plus squared-bias part; the bias uses ||Lambda - 1||^2 ||O rho||_1^2 for an
// invertible target and the numerical absolute-error bound squared otherwise.
struct MseGeneralBound {
    double variance_bound = 0.0;
    double bias_bound = 0.0;

    double total() const { return variance_bound + bias_bound; }
};

MseGeneralBound mse_bound_general(const DiagonalObservable& cost, const Schedule& schedule,
                                  const ObservableSum& obs_sum, const NoiseModel& model);

// Bound on |d(noise-averaged <O> - ideal <O>) / d angle| for the sub-block at
// `index` (0-based). Combines the error-operator derivative estimate
//   e^{||C||} (e^{2||C||}-1)/(2||C||) ||dC||
// (with ||dC|| from layer-resolved closed forms) against ||O rho||_1, plus
// ||Lambda - 1||_inf times the exact trace norm of the toggled commutator
// term. Layered schedules only.
double gradient_error_bound(const DiagonalObservable& cost, const Schedule& schedule,
                            const ObservableTerm& term, const NoiseModel& model,
                            std::size_t index);

// Bound on the ensemble-mean dimension-normalized squared Frobenius distance
// E ||U - U_0||_F^2 / 2^n <= 2 (e^{||C||_inf} - 1), from the observable-free
// series. Saturates the exact distance's maximum value 2 as ||C|| grows.
double unitary_distance_bound(const CumulantSeries& series);

// Additive shot-noise corrections to the absolute-error and MSE bounds for
// N_s measurement shots, via kappa(O) = ||L|| ||O^2 rho||_1 + ||L||^2 ||O rho||_1^2:
//   abs: sqrt(kappa(O)) / sqrt(N_s)
//   mse: kappa(O)/N_s + [kappa(O^2) + 2 ||L|| ||O rho||_1 sqrt(kappa(O))] / sqrt(N_s)
struct FiniteSamplingCorrections {
    double abs_correction = 0.0;
    double mse_correction = 0.0;
};

FiniteSamplingCorrections finite_sampling_corrections(const DenseOperator& lambda,
                                                      const StateVector& psi,
                                                      const DiagonalObservable& obs,
                                                      std::size_t n_s);

}  // namespace peqs

#endif

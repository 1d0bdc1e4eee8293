#ifndef PEQS_FITTING_HPP
#define PEQS_FITTING_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace peqs {

enum class FitModel { exp_decay, squared_exp_decay, power_law, saturation, layer_growth };

const char* fit_model_name(FitModel model);

// Half-bounded windows use +-infinity. A fit records the x-range of the points
// it actually used, so refitting with the recorded window is bit-for-bit
// reproducible.
struct FitWindow {
    double x_min = 0.0;
    double x_max = 0.0;
};

struct FitResult {
    FitModel model = FitModel::exp_decay;
    std::map<std::string, double> params;
    double r_squared = 0.0;
    FitWindow window;
    std::size_t points = 0;
    bool valid = false;  // r_squared >= 0.9; invalid fits are still returned
};

// y = a e^{-r x}, via linear regression on log y. Default window keeps
// x < 0.5 (the weak-noise regime); passing a window keeps x in [x_min, x_max].
// Emits both the free amplitude fit ("amplitude", "rate") and the
// amplitude-pinned-at-1 variant ("rate_constrained"). Needs >= 4 points;
// nonpositive y inside the window is a window error.
FitResult fit_exp_decay(const std::vector<double>& x, const std::vector<double>& y,
                        std::optional<FitWindow> window = std::nullopt);

// y = e^{-c x^k}, via regression of log(-log y) on log x. Default window keeps
// 0 < x <= 1; y must lie strictly inside (0, 1). Params "prefactor" (c) and
// "exponent" (k).
FitResult fit_squared_exp(const std::vector<double>& x, const std::vector<double>& y,
                          std::optional<FitWindow> window = std::nullopt);

// y = c x^{-alpha}, log-log regression. Default window keeps x > 1 (the
// strong-noise regime). Params "prefactor" and "alpha". Needs >= 4 points.
FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                        std::optional<FitWindow> window = std::nullopt);

// y = a 2^{-xi n}, linear regression of log2 y on n. Needs >= 3 sizes.
// Params "prefactor" and "xi".
FitResult fit_saturation(const std::vector<double>& n, const std::vector<double>& y,
                         std::optional<FitWindow> window = std::nullopt);

// p* = a1 2^{n/2} + a2, linear regression against 2^{n/2}. Needs >= 3 sizes.
// Params "a1" and "a2".
FitResult fit_layer_growth(const std::vector<double>& n, const std::vector<double>& p_star,
                           std::optional<FitWindow> window = std::nullopt);

// y = c x^{exponent}, log-log regression restricted to the pre-saturation
// points 0 < y < 1 (distances saturate at their maximum). Params "prefactor"
// and "exponent".
FitResult fit_unitary_distance(const std::vector<double>& x, const std::vector<double>& y,
                               std::optional<FitWindow> window = std::nullopt);

// Decay function (y - y_sat) / (y0 - y_sat): rescales raw means so the
// noiseless value maps to 1 and the saturated value to 0.
std::vector<double> normalized_decay(const std::vector<double>& y, double y0, double y_sat);

}  // namespace peqs

#endif

#include "peqs/fitting.hpp"

#include <cmath>
#include <limits>

#include "peqs/error.hpp"

namespace peqs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Points {
    std::vector<double> x, y;
    FitWindow window;  // actual range of the kept x values
};

// Keeps (x, y) pairs inside the window. With an explicit window the bounds are
// inclusive; model defaults use strict bounds (x < 0.5, x > 1) so the recorded
// range refits to the same subset.
Points select(const std::vector<double>& x, const std::vector<double>& y,
              const std::optional<FitWindow>& window, double lo, double hi, bool keep_x_zero) {
    require(x.size() == y.size(), errc::dimension_mismatch, "x and y lengths differ");
    Points out;
    out.window.x_min = kInf;
    out.window.x_max = -kInf;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        if (!keep_x_zero && xi <= 0.0) continue;
        const bool inside = window ? (xi >= window->x_min && xi <= window->x_max)
                                   : (xi > lo && xi < hi);
        if (!inside) continue;
        out.x.push_back(xi);
        out.y.push_back(y[i]);
        out.window.x_min = std::min(out.window.x_min, xi);
        out.window.x_max = std::max(out.window.x_max, xi);
    }
    return out;
}

struct Line {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    require(sxx > 0.0, errc::window, "fit window has no x spread");
    Line line;
    line.slope = sxy / sxx;
    line.intercept = my - line.slope * mx;
    if (syy <= 0.0) {
        line.r_squared = 1.0;
    } else {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - (line.intercept + line.slope * x[i]);
            ss_res += r * r;
        }
        line.r_squared = std::max(0.0, 1.0 - ss_res / syy);
    }
    return line;
}

FitResult package(FitModel model, const Points& pts, const Line& line) {
    FitResult out;
    out.model = model;
    out.r_squared = line.r_squared;
    out.window = pts.window;
    out.points = pts.x.size();
    out.valid = line.r_squared >= 0.9;
    return out;
}

void require_positive(const std::vector<double>& y) {
    for (double v : y)
        require(v > 0.0, errc::window, "nonpositive decay value inside the fit window");
}

}  // namespace

const char* fit_model_name(FitModel model) {
    switch (model) {
        case FitModel::exp_decay: return "ExpDecay";
        case FitModel::squared_exp_decay: return "SquaredExpDecay";
        case FitModel::power_law: return "PowerLaw";
        case FitModel::saturation: return "Saturation";
        case FitModel::layer_growth: return "LayerGrowth";
    }
    return "ExpDecay";
}

FitResult fit_exp_decay(const std::vector<double>& x, const std::vector<double>& y,
                        std::optional<FitWindow> window) {
    const Points pts = select(x, y, window, -kInf, 0.5, true);
    require(pts.x.size() >= 4, errc::window, "exponential fit needs at least 4 points");
    require_positive(pts.y);
    std::vector<double> log_y(pts.y.size());
    for (std::size_t i = 0; i < pts.y.size(); ++i) log_y[i] = std::log(pts.y[i]);
    const Line line = least_squares(pts.x, log_y);

    double sxx = 0.0, sxl = 0.0;
    for (std::size_t i = 0; i < pts.x.size(); ++i) {
        sxx += pts.x[i] * pts.x[i];
        sxl += pts.x[i] * log_y[i];
    }

    FitResult out = package(FitModel::exp_decay, pts, line);
    out.params["amplitude"] = std::exp(line.intercept);
    out.params["rate"] = -line.slope;
    out.params["rate_constrained"] = sxx > 0.0 ? -sxl / sxx : 0.0;
    return out;
}

FitResult fit_squared_exp(const std::vector<double>& x, const std::vector<double>& y,
                          std::optional<FitWindow> window) {
    const Points pts = select(x, y, window, 0.0, 1.0 + 1e-12, false);
    require(pts.x.size() >= 4, errc::window, "stretched-exponential fit needs at least 4 points");
    std::vector<double> log_x(pts.x.size()), log_neg_log_y(pts.y.size());
    for (std::size_t i = 0; i < pts.y.size(); ++i) {
        require(pts.y[i] > 0.0 && pts.y[i] < 1.0, errc::window,
                "decay value outside (0, 1) inside the fit window");
        log_x[i] = std::log(pts.x[i]);
        log_neg_log_y[i] = std::log(-std::log(pts.y[i]));
    }
    const Line line = least_squares(log_x, log_neg_log_y);
    FitResult out = package(FitModel::squared_exp_decay, pts, line);
    out.params["prefactor"] = std::exp(line.intercept);
    out.params["exponent"] = line.slope;
    return out;
}

FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                        std::optional<FitWindow> window) {
    const Points pts = select(x, y, window, 1.0, kInf, false);
    require(pts.x.size() >= 4, errc::window, "power-law fit needs at least 4 points");
    require_positive(pts.y);
    std::vector<double> log_x(pts.x.size()), log_y(pts.y.size());
    for (std::size_t i = 0; i < pts.x.size(); ++i) {
        log_x[i] = std::log(pts.x[i]);
        log_y[i] = std::log(pts.y[i]);
    }
    const Line line = least_squares(log_x, log_y);
    FitResult out = package(FitModel::power_law, pts, line);
    out.params["prefactor"] = std::exp(line.intercept);
    out.params["alpha"] = -line.slope;
    return out;
}

FitResult fit_saturation(const std::vector<double>& n, const std::vector<double>& y,
                         std::optional<FitWindow> window) {
    const Points pts = select(n, y, window, -kInf, kInf, true);
    require(pts.x.size() >= 3, errc::window, "saturation fit needs at least 3 sizes");
    require_positive(pts.y);
    std::vector<double> log2_y(pts.y.size());
    for (std::size_t i = 0; i < pts.y.size(); ++i) log2_y[i] = std::log2(pts.y[i]);
    const Line line = least_squares(pts.x, log2_y);
    FitResult out = package(FitModel::saturation, pts, line);
    out.params["prefactor"] = std::exp2(line.intercept);
    out.params["xi"] = -line.slope;
    return out;
}

FitResult fit_layer_growth(const std::vector<double>& n, const std::vector<double>& p_star,
                           std::optional<FitWindow> window) {
    const Points pts = select(n, p_star, window, -kInf, kInf, true);
    require(pts.x.size() >= 3, errc::window, "layer-growth fit needs at least 3 sizes");
    std::vector<double> scale(pts.x.size());
    for (std::size_t i = 0; i < pts.x.size(); ++i) scale[i] = std::exp2(pts.x[i] / 2.0);
    const Line line = least_squares(scale, pts.y);
    FitResult out = package(FitModel::layer_growth, pts, line);
    out.params["a1"] = line.slope;
    out.params["a2"] = line.intercept;
    return out;
}

FitResult fit_unitary_distance(const std::vector<double>& x, const std::vector<double>& y,
                               std::optional<FitWindow> window) {
    Points pts = select(x, y, window, 0.0, kInf, false);
    // Saturated points carry no scaling information; keep the growing flank.
    std::vector<double> fx, fy;
    double lo = kInf, hi = -kInf;
    for (std::size_t i = 0; i < pts.x.size(); ++i) {
        if (pts.y[i] <= 0.0 || pts.y[i] >= 1.0) continue;
        fx.push_back(pts.x[i]);
        fy.push_back(pts.y[i]);
        lo = std::min(lo, pts.x[i]);
        hi = std::max(hi, pts.x[i]);
    }
    require(fx.size() >= 2, errc::window, "no pre-saturation points inside the fit window");
    std::vector<double> log_x(fx.size()), log_y(fy.size());
    for (std::size_t i = 0; i < fx.size(); ++i) {
        log_x[i] = std::log(fx[i]);
        log_y[i] = std::log(fy[i]);
    }
    const Line line = least_squares(log_x, log_y);
    pts.x = std::move(fx);
    pts.y = std::move(fy);
    pts.window = {lo, hi};
    FitResult out = package(FitModel::power_law, pts, line);
    out.params["prefactor"] = std::exp(line.intercept);
    out.params["exponent"] = line.slope;
    return out;
}

std::vector<double> normalized_decay(const std::vector<double>& y, double y0, double y_sat) {
    require(y0 != y_sat, errc::invalid_argument,
            "noiseless and saturated values coincide; decay function undefined");
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = (y[i] - y_sat) / (y0 - y_sat);
    return out;
}

}  // namespace peqs

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "doctest.h"
#include "peqs/error.hpp"
#include "peqs/fitting.hpp"

using peqs::FitModel;
using peqs::FitResult;
using peqs::FitWindow;

namespace {

peqs::errc thrown_code(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const peqs::error& e) {
        return e.code();
    }
    return peqs::errc::io;  // sentinel: nothing thrown
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return out;
}

std::vector<double> map_values(const std::vector<double>& x, double (*fn)(double)) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = fn(x[i]);
    return out;
}

}  // namespace

TEST_CASE("exponential decay fit recovers synthetic ground truth") {
    const std::vector<double> x = linspace(0.02, 0.8, 14);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::exp(-3.0 * x[i]);

    const FitResult fit = peqs::fit_exp_decay(x, y);
    CHECK(fit.model == FitModel::exp_decay);
    CHECK(fit.params.at("rate") == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(fit.params.at("amplitude") == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.params.at("rate_constrained") == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.valid);
    // Default window keeps the weak-noise flank only.
    CHECK(fit.window.x_max < 0.5);
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < 0.5) CHECK(fit.points >= 1);
    CHECK(fit.points == 8);

    // Free amplitude departs from 1 when the data does.
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 0.9 * std::exp(-3.0 * x[i]);
    const FitResult scaled = peqs::fit_exp_decay(x, y);
    CHECK(scaled.params.at("amplitude") == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(scaled.params.at("rate") == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(scaled.params.at("rate_constrained") != doctest::Approx(3.0).epsilon(1e-4));
}

TEST_CASE("exponential decay fit rejects bad windows") {
    const std::vector<double> x = {0.1, 0.2, 0.3, 0.6, 0.7};
    const std::vector<double> y = {0.9, 0.8, 0.7, 0.5, 0.4};
    // Only three points fall below the default cutoff.
    CHECK(thrown_code([&] { peqs::fit_exp_decay(x, y); }) == peqs::errc::window);

    const std::vector<double> x4 = {0.1, 0.2, 0.3, 0.4};
    CHECK(thrown_code([&] { peqs::fit_exp_decay(x4, {0.9, -0.1, 0.7, 0.6}); }) ==
          peqs::errc::window);
    CHECK(thrown_code([&] { peqs::fit_exp_decay(x4, {0.9, 0.8}); }) ==
          peqs::errc::dimension_mismatch);
}

TEST_CASE("recorded windows refit bit-for-bit") {
    const std::vector<double> x = linspace(0.05, 1.4, 20);
    std::vector<double> y(x.size());
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> jitter(-0.02, 0.02);
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = 0.95 * std::exp(-2.4 * x[i]) * std::exp(jitter(rng));

    const FitResult first = peqs::fit_exp_decay(x, y);
    const FitResult again = peqs::fit_exp_decay(x, y, first.window);
    CHECK(again.points == first.points);
    CHECK(again.params.at("rate") == first.params.at("rate"));
    CHECK(again.params.at("amplitude") == first.params.at("amplitude"));
    CHECK(again.r_squared == first.r_squared);

    std::vector<double> xs = linspace(1.2, 6.0, 12), ys(12);
    for (std::size_t i = 0; i < xs.size(); ++i)
        ys[i] = 0.05 * std::pow(xs[i], -1.5) * std::exp(jitter(rng));
    const FitResult pfirst = peqs::fit_power_law(xs, ys);
    const FitResult pagain = peqs::fit_power_law(xs, ys, pfirst.window);
    CHECK(pagain.params.at("alpha") == pfirst.params.at("alpha"));
    CHECK(pagain.params.at("prefactor") == pfirst.params.at("prefactor"));
}

TEST_CASE("stretched exponential fit recovers the squared exponent") {
    const std::vector<double> x = linspace(0.05, 1.4, 16);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::exp(-2.0 * x[i] * x[i]);

    const FitResult fit = peqs::fit_squared_exp(x, y);
    CHECK(fit.model == FitModel::squared_exp_decay);
    CHECK(fit.params.at("exponent") == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(fit.params.at("prefactor") == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(fit.window.x_max <= 1.0 + 1e-12);
    CHECK(fit.valid);

    CHECK(thrown_code([&] {
              peqs::fit_squared_exp({0.1, 0.2, 0.3, 0.4}, {0.99, 1.2, 0.9, 0.8});
          }) == peqs::errc::window);
}

TEST_CASE("power law fit recovers the strong-noise tail") {
    const std::vector<double> x = linspace(0.5, 6.0, 18);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 0.05 * std::pow(x[i], -1.6);

    const FitResult fit = peqs::fit_power_law(x, y);
    CHECK(fit.params.at("alpha") == doctest::Approx(1.6).epsilon(1e-9));
    CHECK(fit.params.at("prefactor") == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(fit.window.x_min > 1.0);  // default window drops the weak flank

    CHECK(thrown_code([&] { peqs::fit_power_law({1.5, 2.0, 2.5}, {0.1, 0.05, 0.03}); }) ==
          peqs::errc::window);
}

TEST_CASE("saturation fit recovers the size exponent") {
    const std::vector<double> n = {4, 6, 8, 10};
    std::vector<double> y(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) y[i] = 0.5 * std::exp2(-0.7 * n[i]);

    const FitResult fit = peqs::fit_saturation(n, y);
    CHECK(fit.model == FitModel::saturation);
    CHECK(fit.params.at("xi") == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(fit.params.at("prefactor") == doctest::Approx(0.5).epsilon(1e-9));

    CHECK(thrown_code([&] { peqs::fit_saturation({4, 6}, {0.1, 0.01}); }) == peqs::errc::window);
}

TEST_CASE("layer growth fit recovers the square-root-of-N law") {
    const std::vector<double> n = {4, 6, 8, 10};
    std::vector<double> p(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) p[i] = 0.3 * std::exp2(n[i] / 2.0) + 0.2;

    const FitResult fit = peqs::fit_layer_growth(n, p);
    CHECK(fit.model == FitModel::layer_growth);
    CHECK(fit.params.at("a1") == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(fit.params.at("a2") == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(thrown_code([&] { peqs::fit_layer_growth({4, 6}, {2.0, 3.0}); }) == peqs::errc::window);
}

TEST_CASE("unitary distance fit keeps only the growing flank") {
    std::vector<double> x = linspace(1e-4, 0.05, 12);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 4.0 * std::sqrt(x[i]);
    // Saturated tail: distances pinned at their maximum carry no slope.
    x.push_back(0.5);
    y.push_back(2.0);
    x.push_back(1.0);
    y.push_back(2.0);

    const FitResult fit = peqs::fit_unitary_distance(x, y);
    CHECK(fit.model == FitModel::power_law);
    CHECK(fit.params.at("exponent") == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(fit.params.at("prefactor") == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(fit.points == 12);
    CHECK(fit.window.x_max <= 0.05 + 1e-12);

    CHECK(thrown_code([&] { peqs::fit_unitary_distance({0.5, 1.0}, {2.0, 2.0}); }) ==
          peqs::errc::window);
}

TEST_CASE("poor fits are flagged instead of dropped") {
    const std::vector<double> x = linspace(0.02, 0.45, 10);
    std::vector<double> y(x.size());
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> scatter(-1.5, 1.5);
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = std::exp(-3.0 * x[i]) * std::exp(scatter(rng));

    const FitResult fit = peqs::fit_exp_decay(x, y);
    CHECK_FALSE(fit.valid);
    CHECK(fit.r_squared >= 0.0);
    CHECK(fit.r_squared < 0.9);
    CHECK(fit.params.count("rate") == 1);
    CHECK(std::isfinite(fit.params.at("rate")));
}

TEST_CASE("decay normalization pins the endpoints") {
    const std::vector<double> y = {0.33, 0.2, 0.1, 0.05};
    const std::vector<double> s = peqs::normalized_decay(y, 0.33, 0.05);
    CHECK(s.front() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.back() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s[1] > s[2]);

    CHECK(thrown_code([&] { peqs::normalized_decay(y, 0.2, 0.2); }) ==
          peqs::errc::invalid_argument);
}

TEST_CASE("fit models serialize to stable names") {
    CHECK(std::string(peqs::fit_model_name(FitModel::exp_decay)) == "ExpDecay");
    CHECK(std::string(peqs::fit_model_name(FitModel::squared_exp_decay)) == "SquaredExpDecay");
    CHECK(std::string(peqs::fit_model_name(FitModel::power_law)) == "PowerLaw");
    CHECK(std::string(peqs::fit_model_name(FitModel::saturation)) == "Saturation");
    CHECK(std::string(peqs::fit_model_name(FitModel::layer_growth)) == "LayerGrowth");
}

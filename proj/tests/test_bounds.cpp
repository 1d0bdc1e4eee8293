#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "peqs/bounds.hpp"
#include "peqs/cumulant.hpp"
#include "peqs/error.hpp"
#include "peqs/noise.hpp"
#include "peqs/problems.hpp"
#include "peqs/qaoa.hpp"

using peqs::BoundEntry;
using peqs::BoundFlavor;
using peqs::BoundPair;
using peqs::BoundReport;
using peqs::CumulantNormBounds;
using peqs::DenseOperator;
using peqs::DiagonalObservable;
using peqs::GroverInstance;
using peqs::IsingRingInstance;
using peqs::NoiseModel;
using peqs::ObservableSum;
using peqs::ObservableTerm;
using peqs::Schedule;
using peqs::StateVector;

namespace {

double second_moment(const StateVector& psi, const DiagonalObservable& obs) {
    double sum = 0.0;
    for (std::size_t z = 0; z < psi.amps.size(); ++z)
        sum += obs.diag[z] * obs.diag[z] * std::norm(psi.amps[z]);
    return sum;
}

double exact_variance(const StateVector& psi, const DiagonalObservable& obs) {
    const double ev = peqs::expectation(psi, obs);
    return second_moment(psi, obs) - ev * ev;
}

// Deterministic faulty expectation for a constant multiplier on every angle.
double constant_error_value(const DiagonalObservable& cost, const Schedule& sched,
                            double multiplier) {
    std::vector<double> mult(sched.blocks.size(), multiplier);
    return peqs::expectation(peqs::evolve(cost, sched, &mult), cost);
}

DiagonalObservable random_invertible_cost(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> val(0.3, 2.0);
    std::vector<double> d(std::size_t{1} << n);
    for (double& x : d) x = val(rng);
    return DiagonalObservable(n, std::move(d));
}

}  // namespace

TEST_CASE("zero noise collapses every bound to its floor") {
    const IsingRingInstance inst = peqs::ising_ring_instance(4);
    const Schedule sched = Schedule::layered({0.4, 0.7}, {0.9, 0.3});
    const ObservableSum sum = peqs::decompose_observable(inst.cost);
    const NoiseModel none{};

    const BoundPair abs = peqs::abs_error_bound(inst.cost, sched, sum, none);
    CHECK(abs.numerical == 0.0);
    CHECK(abs.analytic == 0.0);

    const BoundPair ratio = peqs::approx_ratio_bound(inst.cost, sched, sum, none);
    CHECK(ratio.numerical == 0.0);
    CHECK(ratio.analytic == 0.0);

    const CumulantNormBounds nb = peqs::cumulant_norm_bounds(inst.cost, sched, sum.terms[0], none);
    CHECK(nb.first == 0.0);
    CHECK(nb.second == 0.0);
    CHECK(peqs::cumulant_norm_bounds_discrete(inst.cost, sched, sum.terms[0], none).generator() ==
          0.0);

    CHECK(peqs::gradient_error_bound(inst.cost, sched, sum.terms[0], none, 0) == 0.0);
    CHECK(peqs::unitary_distance_bound(peqs::unitary_cumulant(inst.cost, sched, none)) == 0.0);

    const auto mse = peqs::mse_bound_coherent(inst.cost, sched, inst.cost, none);
    CHECK(mse.h_e == 0.0);
    CHECK(mse.bound == doctest::Approx(2.0 * inst.cost.norm_inf() * inst.cost.norm_inf()));

    const auto gen = peqs::mse_bound_general(inst.cost, sched, sum, none);
    CHECK(gen.bias_bound == 0.0);
    CHECK(gen.total() == gen.variance_bound);
}

TEST_CASE("absolute-error bound dominates the Monte Carlo error") {
    const IsingRingInstance inst = peqs::ising_ring_instance(2);
    const Schedule sched = Schedule::layered({0.5}, {0.6});
    const ObservableSum sum = peqs::decompose_observable(inst.cost);
    const double ideal = peqs::expectation(peqs::evolve(inst.cost, sched), inst.cost);

    const NoiseModel stoch = NoiseModel::stochastic(0.01);
    const BoundPair bp = peqs::abs_error_bound(inst.cost, sched, sum, stoch);
    const auto mc = oracle::mc_expectation(inst.cost, sched, inst.cost, 0.0, 0.01, 0.0, 0.01,
                                           4000, 42);
    CHECK(bp.numerical >= std::abs(mc.mean - ideal) - 3.0 * mc.stderr_mean);
    CHECK(bp.analytic >= bp.numerical - 1e-9);

    // Mixed-channel model on the search instance.
    const GroverInstance grover = peqs::grover_instance(4);
    const Schedule gsched = peqs::grover_schedule(4, 1);
    const ObservableSum gsum = peqs::decompose_observable(grover.cost);
    NoiseModel mixed;
    mixed.eta_m = 0.01;
    mixed.eta_c = -0.005;
    mixed.gamma_m = 4e-4;
    mixed.gamma_c = 2e-4;
    const double gideal = peqs::expectation(peqs::evolve(grover.cost, gsched), grover.cost);
    const BoundPair gb = peqs::abs_error_bound(grover.cost, gsched, gsum, mixed);
    const auto gmc = oracle::mc_expectation(grover.cost, gsched, grover.cost, mixed.eta_c,
                                            mixed.gamma_c, mixed.eta_m, mixed.gamma_m, 4000, 77);
    CHECK(gb.numerical >= std::abs(gmc.mean - gideal) - 3.0 * gmc.stderr_mean);
    CHECK(gb.analytic >= gb.numerical - 1e-9);
}

TEST_CASE("search-instance closed form matches its printed estimate") {
    const double gamma = 1e-3;
    CHECK(peqs::grover_paper_abs_bound(3, gamma, 1.0) ==
          doctest::Approx(2.0 * std::expm1(12.0 * M_PI * gamma)).epsilon(1e-12));
    // Strong noise pins the value at the observable norm.
    CHECK(peqs::grover_paper_abs_bound(5, 1.0, 1.0) == 1.0);
    CHECK_THROWS_AS(peqs::grover_paper_abs_bound(0, gamma, 1.0), peqs::error);
    CHECK_THROWS_AS(peqs::grover_paper_abs_bound(2, -1e-4, 1.0), peqs::error);
}

TEST_CASE("analytic flavor dominates numerical on weak-noise configurations") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ang(-0.8, 0.8), gdist(1e-4, 3e-3);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + 2 * static_cast<int>(rng() % 3);
        const IsingRingInstance inst = peqs::ising_ring_instance(n);
        const int p = 1 + static_cast<int>(rng() % 2);
        std::vector<double> gs(p), bs(p);
        for (auto& v : gs) v = ang(rng);
        for (auto& v : bs) v = ang(rng);
        const Schedule sched = Schedule::layered(gs, bs);
        NoiseModel model;
        model.gamma_m = gdist(rng);
        model.gamma_c = gdist(rng);
        model.eta_m = 0.01 * ang(rng);
        model.eta_c = 0.01 * ang(rng);
        const ObservableSum sum = peqs::decompose_observable(inst.cost);
        const BoundPair bp = peqs::abs_error_bound(inst.cost, sched, sum, model);
        CHECK(bp.analytic >= bp.numerical - 1e-9);
        CHECK(bp.numerical > 0.0);

        // Both flavors decay toward zero with the noise strength.
        NoiseModel weak = model;
        weak.gamma_m /= 100.0;
        weak.gamma_c /= 100.0;
        weak.eta_m /= 100.0;
        weak.eta_c /= 100.0;
        const BoundPair wp = peqs::abs_error_bound(inst.cost, sched, sum, weak);
        CHECK(wp.numerical < bp.numerical / 10.0);
        CHECK(wp.analytic < bp.analytic / 10.0);
    }
}

TEST_CASE("analytic absolute-error bound is clipped at the observable norm") {
    const IsingRingInstance inst = peqs::ising_ring_instance(4);
    const Schedule sched = Schedule::layered({0.5, 0.8}, {0.7, 0.4});
    const ObservableSum sum = peqs::decompose_observable(inst.cost);
    const BoundPair bp = peqs::abs_error_bound(inst.cost, sched, sum, NoiseModel::stochastic(0.5));
    CHECK(bp.analytic == inst.cost.norm_inf());
}

TEST_CASE("ring cumulant norm estimates match the closed form") {
    const IsingRingInstance inst = peqs::ising_ring_instance(10);
    const Schedule sched = peqs::ising_optimal_schedule(10);
    const ObservableSum sum = peqs::decompose_observable(inst.cost);
    REQUIRE(sum.terms.size() == 1);  // spectrum {±2, ±6, ±10} misses zero

    const double gamma = 1e-3;
    const CumulantNormBounds nb =
        peqs::cumulant_norm_bounds(inst.cost, sched, sum.terms[0], NoiseModel::stochastic(gamma));
    const double sigma_min = 2.0;
    const double closed = 10.0 * gamma * (1.0 + 3.0 * 10.0 / sigma_min) * sched.total_time();
    CHECK(nb.second == doctest::Approx(closed).epsilon(1e-12));
    CHECK(nb.first == 0.0);

    NoiseModel coh;
    coh.eta_m = 0.02;
    coh.eta_c = -0.01;
    const CumulantNormBounds cb = peqs::cumulant_norm_bounds(inst.cost, sched, sum.terms[0], coh);
    double sum_gamma = 0.0, sum_beta = 0.0;
    for (int j = 1; j <= sched.num_layers(); ++j) {
        sum_gamma += std::abs(sched.gamma(j));
        sum_beta += std::abs(sched.beta(j));
    }
    const double kappa = 10.0 / sigma_min;
    CHECK(cb.first == doctest::Approx((0.02 * sum_beta * 10.0 + 0.01 * sum_gamma * 10.0) *
                                      (1.0 + kappa))
                          .epsilon(1e-12));
    CHECK(cb.second == 0.0);
}

TEST_CASE("norm estimates dominate exactly computed cumulants") {
    // Continuous-weight estimate: valid once |angle| * ||H|| <= 1.
    const DiagonalObservable cost = random_invertible_cost(3, 23);
    const double cap = 1.0 / std::max(cost.norm_inf(), 3.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ang(-cap, cap);
    const Schedule sched = Schedule::layered({ang(rng), ang(rng)}, {ang(rng), ang(rng)});
    const ObservableSum sum = peqs::decompose_observable(cost);
    const ObservableTerm& term = sum.terms[0];

    NoiseModel coh;
    coh.eta_m = 0.03;
    coh.eta_c = 0.07;
    const double c1_norm =
        peqs::spectral_norm(peqs::first_cumulant(cost, sched, term, coh.eta_m, coh.eta_c));
    CHECK(peqs::cumulant_norm_bounds(cost, sched, term, coh).first >= c1_norm);

    NoiseModel stoch;
    stoch.gamma_m = 3e-3;
    stoch.gamma_c = 7e-3;
    const double c2_norm = peqs::spectral_norm(
        peqs::second_cumulant(cost, sched, term, stoch.gamma_m, stoch.gamma_c));
    CHECK(peqs::cumulant_norm_bounds(cost, sched, term, stoch).second >= c2_norm);

    // Discrete-weight estimate: valid for any angles.
    const Schedule wild = Schedule::layered({1.9, -2.4}, {2.8, 1.1});
    const double c2_wild = peqs::spectral_norm(
        peqs::second_cumulant(cost, wild, term, stoch.gamma_m, stoch.gamma_c));
    CHECK(peqs::cumulant_norm_bounds_discrete(cost, wild, term, stoch).second >= c2_wild);
    const double c1_wild =
        peqs::spectral_norm(peqs::first_cumulant(cost, wild, term, coh.eta_m, coh.eta_c));
    CHECK(peqs::cumulant_norm_bounds_discrete(cost, wild, term, coh).first >= c1_wild);
}

TEST_CASE("constant-error MSE bound carries the h_E closed form") {
    const IsingRingInstance inst = peqs::ising_ring_instance(2);
    const Schedule sched = Schedule::layered({0.5}, {0.6});

    NoiseModel coh;
    coh.eta_m = 0.1;
    coh.eta_c = 0.1;
    const auto mse = peqs::mse_bound_coherent(inst.cost, sched, inst.cost, coh);
    const double h_e = 0.1 * 0.6 * 2.0 + 0.1 * 0.5 * 2.0;
    CHECK(mse.h_e == doctest::Approx(h_e).epsilon(1e-12));
    const double o_norm = inst.cost.norm_inf();
    CHECK(mse.bound == doctest::Approx(2.0 * o_norm * o_norm * (1.0 + 2.0 * h_e * h_e))
                           .epsilon(1e-12));

    // Dominates the exact faulty MSE (variance plus squared bias).
    const double ideal = peqs::expectation(peqs::evolve(inst.cost, sched), inst.cost);
    std::vector<double> mult(sched.blocks.size(), 1.1);
    const StateVector noisy = peqs::evolve(inst.cost, sched, &mult);
    const double ev = peqs::expectation(noisy, inst.cost);
    const double measured = exact_variance(noisy, inst.cost) + (ev - ideal) * (ev - ideal);
    CHECK(mse.bound >= measured);

    CHECK_THROWS_AS(
        peqs::mse_bound_coherent(inst.cost, sched, inst.cost, NoiseModel::stochastic(0.01)),
        peqs::error);
    try {
        peqs::mse_bound_coherent(inst.cost, sched, inst.cost, NoiseModel::stochastic(0.01));
    } catch (const peqs::error& e) {
        CHECK(e.code() == peqs::errc::model_mismatch);
    }
}

TEST_CASE("general MSE bound covers variance and bias") {
    const IsingRingInstance inst = peqs::ising_ring_instance(2);
    const Schedule sched = Schedule::layered({0.5}, {0.6});
    const ObservableSum sum = peqs::decompose_observable(inst.cost);

    const auto clean = peqs::mse_bound_general(inst.cost, sched, sum, NoiseModel{});
    const StateVector psi = peqs::evolve(inst.cost, sched);
    CHECK(clean.bias_bound == 0.0);
    CHECK(clean.variance_bound >= exact_variance(psi, inst.cost));

    // Monte Carlo MSE under stochastic noise: noise-averaged variance plus
    // squared bias of the noise-averaged mean.
    const NoiseModel stoch = NoiseModel::stochastic(0.004);
    const double ideal = peqs::expectation(psi, inst.cost);
    double mean = 0.0, mean_sq = 0.0;
    const std::size_t reps = 3000;
    for (std::size_t i = 0; i < reps; ++i) {
        const auto real = peqs::sample_realization(stoch, sched, 1000 + i);
        const StateVector noisy = peqs::evolve(inst.cost, sched, &real.multipliers);
        mean += peqs::expectation(noisy, inst.cost);
        mean_sq += second_moment(noisy, inst.cost);
    }
    mean /= static_cast<double>(reps);
    mean_sq /= static_cast<double>(reps);
    const double measured = (mean_sq - mean * mean) + (mean - ideal) * (mean - ideal);
    const auto noisy_bound = peqs::mse_bound_general(inst.cost, sched, sum, stoch);
    CHECK(noisy_bound.total() >= measured);
    CHECK(noisy_bound.bias_bound > 0.0);
}

TEST_CASE("gradient bound dominates finite-difference comparators") {
    const IsingRingInstance inst = peqs::ising_ring_instance(2);
    const Schedule sched = Schedule::layered({0.5}, {0.6});
    const ObservableSum sum = peqs::decompose_observable(inst.cost);
    const ObservableTerm& term = sum.terms[0];
    const double h = 1e-5;

    const NoiseModel coh = NoiseModel::coherent(0.05);
    auto ideal_at = [&](double g, double b) {
        const Schedule s = Schedule::layered({g}, {b});
        return peqs::expectation(peqs::evolve(inst.cost, s), inst.cost);
    };
    auto faulty_at = [&](double g, double b) {
        const Schedule s = Schedule::layered({g}, {b});
        return constant_error_value(inst.cost, s, 1.05);
    };
    const double fd_gamma = ((faulty_at(0.5 + h, 0.6) - faulty_at(0.5 - h, 0.6)) -
                             (ideal_at(0.5 + h, 0.6) - ideal_at(0.5 - h, 0.6))) /
                            (2.0 * h);
    const double fd_beta = ((faulty_at(0.5, 0.6 + h) - faulty_at(0.5, 0.6 - h)) -
                            (ideal_at(0.5, 0.6 + h) - ideal_at(0.5, 0.6 - h))) /
                           (2.0 * h);
    CHECK(peqs::gradient_error_bound(inst.cost, sched, term, coh, 0) >= std::abs(fd_gamma));
    CHECK(peqs::gradient_error_bound(inst.cost, sched, term, coh, 1) >= std::abs(fd_beta));

    // Stochastic model: common random numbers make the Monte Carlo mean smooth
    // in the angle, so a central difference is well conditioned.
    const NoiseModel stoch = NoiseModel::stochastic(0.005);
    const double hs = 1e-3;
    auto mc_at = [&](double g) {
        const Schedule s = Schedule::layered({g}, {0.6});
        return oracle::mc_expectation(inst.cost, s, inst.cost, 0.0, stoch.gamma_c, 0.0,
                                      stoch.gamma_m, 3000, 31)
            .mean;
    };
    const double fd_mc = ((mc_at(0.5 + hs) - mc_at(0.5 - hs)) -
                          (ideal_at(0.5 + hs, 0.6) - ideal_at(0.5 - hs, 0.6))) /
                         (2.0 * hs);
    CHECK(peqs::gradient_error_bound(inst.cost, sched, term, stoch, 0) >= std::abs(fd_mc));

    CHECK(peqs::gradient_error_bound(inst.cost, sched, term, NoiseModel{}, 0) == 0.0);
    ObservableTerm identity = term;
    identity.is_identity = true;
    CHECK(peqs::gradient_error_bound(inst.cost, sched, identity, coh, 0) == 0.0);

    CHECK_THROWS_AS(peqs::gradient_error_bound(inst.cost, sched, term, coh, 99), peqs::error);
    Schedule unlayered;
    unlayered.blocks = {sched.blocks[0], sched.blocks[0]};
    CHECK_THROWS_AS(peqs::gradient_error_bound(inst.cost, unlayered, term, coh, 0), peqs::error);
}

TEST_CASE("gradient bound scales linearly as the noise vanishes") {
    const IsingRingInstance inst = peqs::ising_ring_instance(4);
    const Schedule sched = Schedule::layered({0.4, 0.7}, {0.9, 0.3});
    const ObservableSum sum = peqs::decompose_observable(inst.cost);
    const double b1 =
        peqs::gradient_error_bound(inst.cost, sched, sum.terms[0], NoiseModel::coherent(1e-5), 2);
    const double b2 =
        peqs::gradient_error_bound(inst.cost, sched, sum.terms[0], NoiseModel::coherent(5e-6), 2);
    CHECK(b1 / b2 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("unitary distance bound covers the ensemble mean square distance") {
    const GroverInstance inst = peqs::grover_instance(4);
    const Schedule sched = peqs::grover_schedule(4, 2);
    const double dim = 16.0;

    double previous = 0.0;
    for (const double gamma : {1e-4, 1e-3, 1e-2}) {
        const NoiseModel model = NoiseModel::stochastic(gamma);
        const double bound = peqs::unitary_distance_bound(peqs::unitary_cumulant(inst.cost, sched, model));
        const auto stats = peqs::ensemble_unitary_distance(inst.cost, sched, model, 600, 99);
        CHECK(bound >= stats.frobenius_sq.mean / dim - 3.0 * stats.frobenius_sq.stderr_mean / dim);
        CHECK(bound > previous);  // monotone in the cumulant norm
        previous = bound;
    }
}

TEST_CASE("finite sampling corrections shrink with the shot budget") {
    const IsingRingInstance inst = peqs::ising_ring_instance(2);
    const StateVector psi = peqs::plus_state(2);
    const DenseOperator eye = DenseOperator::Identity(4, 4);

    const auto one = peqs::finite_sampling_corrections(eye, psi, inst.cost, 1);
    const double o1 = std::sqrt(second_moment(psi, inst.cost));
    double o2 = 0.0;
    for (std::size_t z = 0; z < psi.amps.size(); ++z) {
        const double d2 = inst.cost.diag[z] * inst.cost.diag[z];
        o2 += d2 * d2 * std::norm(psi.amps[z]);
    }
    o2 = std::sqrt(o2);
    CHECK(one.abs_correction == doctest::Approx(std::sqrt(o2 + o1 * o1)).epsilon(1e-12));

    const auto big = peqs::finite_sampling_corrections(eye, psi, inst.cost, 1000000);
    CHECK(big.abs_correction < 3e-3);
    CHECK(big.mse_correction < 5e-2);
    const auto quarter = peqs::finite_sampling_corrections(eye, psi, inst.cost, 400);
    const auto full = peqs::finite_sampling_corrections(eye, psi, inst.cost, 100);
    CHECK(full.abs_correction == doctest::Approx(2.0 * quarter.abs_correction).epsilon(1e-12));

    CHECK_THROWS_AS(peqs::finite_sampling_corrections(eye, psi, inst.cost, 0), peqs::error);
    const StateVector wrong = peqs::plus_state(3);
    CHECK_THROWS_AS(peqs::finite_sampling_corrections(eye, wrong, inst.cost, 10), peqs::error);
}

TEST_CASE("shot-sampling deviations stay within the sampling correction") {
    const IsingRingInstance inst = peqs::ising_ring_instance(2);
    const Schedule sched = Schedule::layered({0.45}, {0.55});
    const StateVector psi = peqs::evolve(inst.cost, sched);
    const double exact = peqs::expectation(psi, inst.cost);
    const DenseOperator eye = DenseOperator::Identity(4, 4);
    const auto fs = peqs::finite_sampling_corrections(eye, psi, inst.cost, 100);

    int covered = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double shot = oracle::sampled_expectation(psi, inst.cost, 100, 1000 + trial);
        if (std::abs(shot - exact) <= fs.abs_correction) ++covered;
    }
    CHECK(covered >= 950);
}

TEST_CASE("approximation ratio bound is the absolute bound over c_max") {
    const IsingRingInstance inst = peqs::ising_ring_instance(6);
    const Schedule sched = peqs::ising_optimal_schedule(6);
    const ObservableSum sum = peqs::decompose_observable(inst.cost);
    const NoiseModel stoch = NoiseModel::stochastic(1e-3);
    const BoundPair abs = peqs::abs_error_bound(inst.cost, sched, sum, stoch);
    const BoundPair ratio = peqs::approx_ratio_bound(inst.cost, sched, sum, stoch);
    CHECK(ratio.numerical == doctest::Approx(abs.numerical / 6.0).epsilon(1e-12));
    CHECK(ratio.analytic == doctest::Approx(abs.analytic / 6.0).epsilon(1e-12));

    // Search instance at its first optimum, sqrt(Gamma) = 0.05.
    const GroverInstance grover = peqs::grover_instance(6);
    const int p_star = peqs::grover_p_star(6);
    const Schedule gsched = peqs::grover_schedule(6, p_star);
    const ObservableSum gsum = peqs::decompose_observable(grover.cost);
    const NoiseModel gmodel = NoiseModel::stochastic(0.0025);
    const double ideal = peqs::expectation(peqs::evolve(grover.cost, gsched), grover.cost);
    const auto mc = oracle::mc_expectation(grover.cost, gsched, grover.cost, 0.0, 0.0025, 0.0,
                                           0.0025, 2000, 555);
    const BoundPair gratio = peqs::approx_ratio_bound(grover.cost, gsched, gsum, gmodel);
    const double c_max = grover.cost.c_max;
    CHECK(gratio.numerical >=
          std::abs(mc.mean - ideal) / c_max - 3.0 * mc.stderr_mean / c_max);

    ObservableSum degenerate = sum;
    degenerate.target = DiagonalObservable(1, {0.0, -1.0});
    CHECK_THROWS_AS(peqs::approx_ratio_bound(inst.cost, sched, degenerate, stoch), peqs::error);
}

TEST_CASE("bound reports carry flavored entries") {
    CHECK(std::string(peqs::flavor_name(BoundFlavor::numerical)) == "Numerical");
    CHECK(std::string(peqs::flavor_name(BoundFlavor::analytic)) == "Analytic");

    BoundReport report;
    report.config_id = "ising4-weak";
    report.entries.push_back({"abs_error", 0.05, BoundFlavor::numerical});
    report.entries.push_back({"abs_error", 0.09, BoundFlavor::analytic});
    report.measured = 0.03;
    report.measured_stderr = 0.002;
    REQUIRE(report.entries.size() == 2);
    CHECK(report.entries[0].value <= report.entries[1].value);
    CHECK(*report.measured <= report.entries[0].value + 3.0 * *report.measured_stderr);
}

#include "peqs/noise.hpp"

#include <cmath>
#include <random>

#include "peqs/rng.hpp"

namespace peqs {

namespace {

void apply_schedule_vec(StateVector& state, const DiagonalObservable& cost,
                        const Schedule& schedule, const std::vector<double>& multipliers,
                        bool adjoint) {
    const std::size_t count = schedule.blocks.size();
    for (std::size_t step = 0; step < count; ++step) {
        const std::size_t i = adjoint ? count - 1 - step : step;
        const SubBlock& block = schedule.blocks[i];
        const double angle = block.effective_angle() * multipliers[i] * (adjoint ? -1.0 : 1.0);
        if (block.kind == SubBlockKind::cost) {
            apply_phase(state, cost, angle);
        } else {
            apply_mixer(state, angle);
        }
    }
}

StateVector random_unit_state(int num_qubits, std::uint64_t seed) {
    rng_engine gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    StateVector v;
    v.num_qubits = num_qubits;
    v.amps.resize(std::size_t{1} << num_qubits);
    for (cplx& a : v.amps) a = cplx(normal(gen), normal(gen));
    const double norm = state_norm(v);
    for (cplx& a : v.amps) a /= norm;
    return v;
}

}  // namespace

NoiseModel NoiseModel::stochastic(double gamma) {
    NoiseModel m;
    m.gamma_m = gamma;
    m.gamma_c = gamma;
    m.validate();
    return m;
}

NoiseModel NoiseModel::coherent(double eta) {
    NoiseModel m;
    m.eta_m = eta;
    m.eta_c = eta;
    return m;
}

void NoiseModel::validate() const {
    require(gamma_m >= 0.0 && gamma_c >= 0.0, errc::invalid_argument,
            "noise variances must be nonnegative");
}

NoiseRealization sample_realization(const NoiseModel& model, const Schedule& schedule,
                                    std::uint64_t seed) {
    model.validate();
    NoiseRealization out;
    out.seed = seed;
    out.multipliers.resize(schedule.blocks.size());
    rng_engine gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < schedule.blocks.size(); ++i) {
        const bool is_cost = schedule.blocks[i].kind == SubBlockKind::cost;
        const double eta = is_cost ? model.eta_c : model.eta_m;
        const double gamma = is_cost ? model.gamma_c : model.gamma_m;
        double m = 1.0 + eta;
        if (gamma > 0.0) m += std::sqrt(gamma) * normal(gen);
        out.multipliers[i] = m;
    }
    return out;
}

EnsembleStats accumulate_stats(const std::vector<double>& values) {
    require(!values.empty(), errc::invalid_argument, "empty ensemble");
    double sum = 0.0;
    double sum_sq = 0.0;
    bool all_equal = true;
    for (double v : values) {
        sum += v;
        sum_sq += v * v;
        all_equal = all_equal && v == values.front();
    }
    EnsembleStats s;
    s.count = values.size();
    const double r = static_cast<double>(values.size());
    s.mean = sum / r;
    // A constant ensemble (coherent noise) has exactly zero spread; the
    // running-sum formula would leave cancellation dust there.
    s.variance = all_equal ? 0.0 : std::max(0.0, sum_sq / r - s.mean * s.mean);
    s.stderr_mean = std::sqrt(s.variance / r);
    return s;
}

EnsembleStats ensemble_expectation(const DiagonalObservable& cost, const Schedule& schedule,
                                   const NoiseModel& model, const DiagonalObservable& obs,
                                   std::size_t realizations, std::uint64_t base_seed) {
    require(realizations >= 1, errc::invalid_argument, "need at least one realization");
    std::vector<double> values(realizations);
    for (std::size_t r = 0; r < realizations; ++r) {
        const NoiseRealization real =
            sample_realization(model, schedule, derive_seed(base_seed, r));
        values[r] = expectation(evolve(cost, schedule, &real.multipliers), obs);
    }
    return accumulate_stats(values);
}

double unitary_distance_matrix_free(const DiagonalObservable& cost, const Schedule& schedule,
                                    const std::vector<double>& multipliers) {
    require(multipliers.size() == schedule.blocks.size(), errc::dimension_mismatch,
            "multiplier count does not match sub-block count");
    const std::vector<double> ones(schedule.blocks.size(), 1.0);
    // B = (U - U0)^dag (U - U0) = 2I - U0^dag U - U^dag U0 is Hermitian PSD
    // with top eigenvalue ||U - U0||_inf^2.
    const auto apply_b = [&](const StateVector& v) {
        StateVector t = v;
        apply_schedule_vec(t, cost, schedule, multipliers, false);
        apply_schedule_vec(t, cost, schedule, ones, true);
        StateVector s = v;
        apply_schedule_vec(s, cost, schedule, ones, false);
        apply_schedule_vec(s, cost, schedule, multipliers, true);
        StateVector w = v;
        for (std::size_t z = 0; z < w.amps.size(); ++z)
            w.amps[z] = 2.0 * v.amps[z] - t.amps[z] - s.amps[z];
        return w;
    };

    StateVector v = random_unit_state(cost.num_qubits, 0x9e3779b97f4a7c15ULL);
    double lambda = 0.0;
    const int max_iters = 2000;
    for (int it = 0; it < max_iters; ++it) {
        StateVector w = apply_b(v);
        const double next = inner_product(v, w).real();
        const double scale = state_norm(w);
        if (scale < 1e-14) return 0.0;
        for (cplx& a : w.amps) a /= scale;
        v = w;
        if (it > 0 && std::abs(next - lambda) <= 1e-9 * std::max(1.0, std::abs(next))) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::sqrt(std::max(0.0, lambda));
}

UnitaryDistanceStats ensemble_unitary_distance(const DiagonalObservable& cost,
                                               const Schedule& schedule, const NoiseModel& model,
                                               std::size_t realizations, std::uint64_t base_seed,
                                               bool frobenius_channel) {
    require(cost.num_qubits <= kMaxDenseQubits, errc::capacity,
            "unitary distance limited to " + std::to_string(kMaxDenseQubits) + " qubits");
    require(realizations >= 1, errc::invalid_argument, "need at least one realization");
    const bool dense_route = cost.num_qubits <= 8;
    DenseOperator ideal;
    if (dense_route) ideal = dense_propagator(cost, schedule);

    std::vector<double> spectral(realizations);
    std::vector<double> frob_sq;
    if (frobenius_channel && dense_route) frob_sq.resize(realizations);

    for (std::size_t r = 0; r < realizations; ++r) {
        const NoiseRealization real =
            sample_realization(model, schedule, derive_seed(base_seed, r));
        if (dense_route) {
            const DenseOperator faulty = dense_propagator(cost, schedule, &real.multipliers);
            spectral[r] = spectral_norm(faulty - ideal);
            if (!frob_sq.empty()) {
                const double d = frobenius_distance(faulty, ideal);
                frob_sq[r] = d * d;
            }
        } else {
            spectral[r] = unitary_distance_matrix_free(cost, schedule, real.multipliers);
        }
    }

    UnitaryDistanceStats out;
    out.spectral = accumulate_stats(spectral);
    if (!frob_sq.empty()) {
        out.frobenius_sq = accumulate_stats(frob_sq);
    } else if (frobenius_channel && !dense_route) {
        // Exact trace route above the dense threshold: ||U-U0||_F^2 summed
        // over basis-state columns. Costly but available on request.
        std::vector<double> values(realizations);
        for (std::size_t r = 0; r < realizations; ++r) {
            const NoiseRealization real =
                sample_realization(model, schedule, derive_seed(base_seed, r));
            const std::size_t dim = std::size_t{1} << cost.num_qubits;
            double overlap_re = 0.0;
            for (std::size_t z = 0; z < dim; ++z) {
                StateVector faulty = basis_state(cost.num_qubits, z);
                apply_schedule_vec(faulty, cost, schedule, real.multipliers, false);
                StateVector idl = basis_state(cost.num_qubits, z);
                const std::vector<double> ones(schedule.blocks.size(), 1.0);
                apply_schedule_vec(idl, cost, schedule, ones, false);
                overlap_re += inner_product(idl, faulty).real();
            }
            values[r] = 2.0 * static_cast<double>(dim) - 2.0 * overlap_re;
        }
        out.frobenius_sq = accumulate_stats(values);
    }
    return out;
}

}  // namespace peqs

#include "peqs/qaoa.hpp"

#include <cmath>

namespace peqs {

namespace {

void apply_subblock_state(StateVector& state, const DiagonalObservable& cost,
                          const SubBlock& block, double multiplier) {
    const double angle = block.effective_angle() * multiplier;
    if (block.kind == SubBlockKind::cost) {
        apply_phase(state, cost, angle);
    } else {
        apply_mixer(state, angle);
    }
}

void unapply_subblock_state(StateVector& state, const DiagonalObservable& cost,
                            const SubBlock& block) {
    const double angle = -block.effective_angle();
    if (block.kind == SubBlockKind::cost) {
        apply_phase(state, cost, angle);
    } else {
        apply_mixer(state, angle);
    }
}

// out[z] = sum_q in[z ^ (1<<q)]  (mixer generator sum_q X_q).
StateVector apply_mixer_generator(const StateVector& in) {
    StateVector out;
    out.num_qubits = in.num_qubits;
    out.amps.assign(in.amps.size(), cplx(0.0, 0.0));
    for (int q = 0; q < in.num_qubits; ++q) {
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t z = 0; z < in.amps.size(); ++z) out.amps[z] += in.amps[z ^ bit];
    }
    return out;
}

StateVector apply_cost_generator(const StateVector& in, const DiagonalObservable& cost) {
    StateVector out = in;
    for (std::size_t z = 0; z < out.amps.size(); ++z) out.amps[z] *= cost.diag[z];
    return out;
}

void check_dense_capacity(const DiagonalObservable& cost) {
    require(cost.num_qubits <= kMaxDenseQubits, errc::capacity,
            "dense propagator limited to " + std::to_string(kMaxDenseQubits) + " qubits");
}

}  // namespace

Schedule Schedule::layered(const std::vector<double>& gammas, const std::vector<double>& betas) {
    require(gammas.size() == betas.size(), errc::invalid_argument,
            "gamma/beta count mismatch");
    Schedule s;
    s.blocks.reserve(2 * gammas.size());
    for (std::size_t j = 0; j < gammas.size(); ++j) {
        s.blocks.push_back({SubBlockKind::cost, gammas[j], 1});
        s.blocks.push_back({SubBlockKind::mixer, betas[j], 1});
    }
    return s;
}

double Schedule::total_time() const {
    double t = 0.0;
    for (const SubBlock& b : blocks) t += std::abs(b.angle);
    return t;
}

bool Schedule::is_layered() const {
    if (blocks.size() % 2 != 0) return false;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const SubBlockKind want = (i % 2 == 0) ? SubBlockKind::cost : SubBlockKind::mixer;
        if (blocks[i].kind != want) return false;
    }
    return true;
}

int Schedule::num_layers() const {
    require(is_layered(), errc::invalid_argument, "schedule is not layered");
    return static_cast<int>(blocks.size() / 2);
}

double Schedule::gamma(int layer) const {
    require(layer >= 1 && layer <= num_layers(), errc::invalid_argument, "layer out of range");
    return blocks[2 * (layer - 1)].effective_angle();
}

double Schedule::beta(int layer) const {
    require(layer >= 1 && layer <= num_layers(), errc::invalid_argument, "layer out of range");
    return blocks[2 * (layer - 1) + 1].effective_angle();
}

StateVector evolve(const DiagonalObservable& cost, const Schedule& schedule,
                   const std::vector<double>* multipliers) {
    if (multipliers)
        require(multipliers->size() == schedule.blocks.size(), errc::dimension_mismatch,
                "multiplier count does not match sub-block count");
    StateVector state = plus_state(cost.num_qubits);
    for (std::size_t i = 0; i < schedule.blocks.size(); ++i)
        apply_subblock_state(state, cost, schedule.blocks[i],
                             multipliers ? (*multipliers)[i] : 1.0);
    return state;
}

double approximation_ratio(double value, double c_max) {
    require(c_max != 0.0, errc::invalid_argument, "c_max is zero");
    return value / c_max;
}

std::vector<double> gradient_all(const DiagonalObservable& cost, const Schedule& schedule,
                                 const DiagonalObservable& obs) {
    StateVector phi = evolve(cost, schedule);
    StateVector lambda = apply_cost_generator(phi, obs);
    std::vector<double> grads(schedule.blocks.size(), 0.0);
    for (std::size_t i = schedule.blocks.size(); i-- > 0;) {
        const SubBlock& block = schedule.blocks[i];
        const StateVector gphi = block.kind == SubBlockKind::cost
                                     ? apply_cost_generator(phi, cost)
                                     : apply_mixer_generator(phi);
        grads[i] = 2.0 * block.sign * std::imag(inner_product(lambda, gphi));
        unapply_subblock_state(phi, cost, block);
        unapply_subblock_state(lambda, cost, block);
    }
    return grads;
}

double gradient(const DiagonalObservable& cost, const Schedule& schedule,
                const DiagonalObservable& obs, std::size_t index) {
    require(index < schedule.blocks.size(), errc::invalid_argument, "sub-block index out of range");
    return gradient_all(cost, schedule, obs)[index];
}

void apply_subblock_dense(DenseOperator& u, const DiagonalObservable& cost,
                          const SubBlock& block, double multiplier) {
    const double angle = block.effective_angle() * multiplier;
    const Eigen::Index dim = u.rows();
    if (block.kind == SubBlockKind::cost) {
        for (Eigen::Index z = 0; z < dim; ++z) {
            const double phi = -angle * cost.diag[static_cast<std::size_t>(z)];
            u.row(z) *= cplx(std::cos(phi), std::sin(phi));
        }
        return;
    }
    const double c = std::cos(angle);
    const cplx mis(0.0, -std::sin(angle));
    Eigen::RowVectorXcd tmp(dim);
    for (int q = 0; q < cost.num_qubits; ++q) {
        const Eigen::Index bit = Eigen::Index{1} << q;
        for (Eigen::Index z = 0; z < dim; ++z) {
            if (z & bit) continue;
            tmp = u.row(z);
            u.row(z) = c * tmp + mis * u.row(z | bit);
            u.row(z | bit) = mis * tmp + c * u.row(z | bit);
        }
    }
}

DenseOperator dense_propagator(const DiagonalObservable& cost, const Schedule& schedule,
                               const std::vector<double>* multipliers) {
    check_dense_capacity(cost);
    if (multipliers)
        require(multipliers->size() == schedule.blocks.size(), errc::dimension_mismatch,
                "multiplier count does not match sub-block count");
    const Eigen::Index dim = Eigen::Index{1} << cost.num_qubits;
    DenseOperator u = DenseOperator::Identity(dim, dim);
    for (std::size_t i = 0; i < schedule.blocks.size(); ++i)
        apply_subblock_dense(u, cost, schedule.blocks[i],
                             multipliers ? (*multipliers)[i] : 1.0);
    return u;
}

DenseOperator partial_propagator(const DiagonalObservable& cost, const Schedule& schedule,
                                 int from_layer, int to_layer) {
    check_dense_capacity(cost);
    const int p = schedule.num_layers();
    require(from_layer >= 1 && to_layer <= p, errc::invalid_argument,
            "layer range outside schedule");
    const Eigen::Index dim = Eigen::Index{1} << cost.num_qubits;
    DenseOperator u = DenseOperator::Identity(dim, dim);
    for (int layer = from_layer; layer <= to_layer; ++layer) {
        apply_subblock_dense(u, cost, schedule.blocks[2 * (layer - 1)]);
        apply_subblock_dense(u, cost, schedule.blocks[2 * (layer - 1) + 1]);
    }
    return u;
}

std::vector<DenseOperator> suffix_propagators(const DiagonalObservable& cost,
                                              const Schedule& schedule) {
    check_dense_capacity(cost);
    const int p = schedule.num_layers();
    const Eigen::Index dim = Eigen::Index{1} << cost.num_qubits;
    std::vector<DenseOperator> q(static_cast<std::size_t>(p) + 2);
    q[static_cast<std::size_t>(p) + 1] = DenseOperator::Identity(dim, dim);
    for (int j = p; j >= 1; --j) {
        DenseOperator u = q[static_cast<std::size_t>(j) + 1];
        // Q_{p:j} = Q_{p:j+1} U_M(beta_j) U_C(gamma_j): right-multiply by the
        // layer-j unitary, built as its own left product.
        DenseOperator layer = DenseOperator::Identity(dim, dim);
        apply_subblock_dense(layer, cost, schedule.blocks[2 * (j - 1)]);
        apply_subblock_dense(layer, cost, schedule.blocks[2 * (j - 1) + 1]);
        q[static_cast<std::size_t>(j)] = u * layer;
    }
    return q;
}

}  // namespace peqs

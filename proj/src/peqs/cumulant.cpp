#include "peqs/cumulant.hpp"

#include <algorithm>
#include <cmath>

#include "peqs/error.hpp"

namespace peqs {

namespace {

void check_cumulant_capacity(const DiagonalObservable& cost) {
    require(cost.num_qubits <= kMaxDenseQubits, errc::capacity,
            "dense cumulant supports at most " + std::to_string(kMaxDenseQubits) + " qubits");
}

// s <- s * exp(-i * theta * diag(d)): pure column scaling.
void right_multiply_phase(DenseOperator& s, const std::vector<double>& d, double theta) {
    const Eigen::Index dim = s.cols();
    for (Eigen::Index z = 0; z < dim; ++z) {
        const double phi = -theta * d[static_cast<std::size_t>(z)];
        s.col(z) *= cplx(std::cos(phi), std::sin(phi));
    }
}

// s <- s * exp(-i * theta * sum_q X_q): pairwise column mixing per qubit.
void right_multiply_mixer(DenseOperator& s, int num_qubits, double theta) {
    const double c = std::cos(theta);
    const cplx mis(0.0, -std::sin(theta));
    const Eigen::Index dim = s.cols();
    Eigen::VectorXcd tmp(s.rows());
    for (int q = 0; q < num_qubits; ++q) {
        const Eigen::Index bit = Eigen::Index{1} << q;
        for (Eigen::Index z = 0; z < dim; ++z) {
            if (z & bit) continue;
            tmp = s.col(z);
            s.col(z) = c * tmp + mis * s.col(z | bit);
            s.col(z | bit) = mis * tmp + c * s.col(z | bit);
        }
    }
}

void right_multiply_block(DenseOperator& s, const DiagonalObservable& cost,
                          const SubBlock& block) {
    if (block.kind == SubBlockKind::cost)
        right_multiply_phase(s, cost.diag, block.effective_angle());
    else
        right_multiply_mixer(s, cost.num_qubits, block.effective_angle());
}

// s * sum_q X_q: each X_q permutes computational-basis columns.
DenseOperator times_mixer_hamiltonian(const DenseOperator& s, int num_qubits) {
    DenseOperator w = DenseOperator::Zero(s.rows(), s.cols());
    const Eigen::Index dim = s.cols();
    for (int q = 0; q < num_qubits; ++q) {
        const Eigen::Index bit = Eigen::Index{1} << q;
        for (Eigen::Index z = 0; z < dim; ++z) w.col(z) += s.col(z ^ bit);
    }
    return w;
}

// s * diag(d).
DenseOperator times_diag(const DenseOperator& s, const std::vector<double>& d) {
    DenseOperator v = s;
    for (Eigen::Index z = 0; z < v.cols(); ++z) v.col(z) *= d[static_cast<std::size_t>(z)];
    return v;
}

// O^-1 X O for diagonal O: entrywise inv[a] * X(a,b) * d[b].
DenseOperator conjugate_by_diag(const DenseOperator& x, const std::vector<double>& d,
                                const std::vector<double>& inv) {
    DenseOperator out = x;
    for (Eigen::Index b = 0; b < out.cols(); ++b) out.col(b) *= d[static_cast<std::size_t>(b)];
    for (Eigen::Index a = 0; a < out.rows(); ++a) out.row(a) *= inv[static_cast<std::size_t>(a)];
    return out;
}

// Single downward sweep over sub-blocks accumulating the piece sums; the
// suffix product is maintained by cheap column operations and each sub-block
// costs a handful of dense products. Passing term == nullptr skips the
// O-conjugated piece (unitary-series mode).
CumulantPieces build_pieces(const DiagonalObservable& cost, const Schedule& schedule,
                            const ObservableTerm* term) {
    check_cumulant_capacity(cost);
    CumulantPieces pieces;
    pieces.num_qubits = cost.num_qubits;
    const Eigen::Index dim = Eigen::Index{1} << cost.num_qubits;
    pieces.m1_mixer = DenseOperator::Zero(dim, dim);
    pieces.m1_cost = DenseOperator::Zero(dim, dim);
    pieces.p1_mixer = DenseOperator::Zero(dim, dim);
    pieces.p1_cost = DenseOperator::Zero(dim, dim);
    pieces.p3_mixer = DenseOperator::Zero(dim, dim);
    pieces.p3_cost = DenseOperator::Zero(dim, dim);
    if (term) {
        require(term->op.num_qubits == cost.num_qubits, errc::dimension_mismatch,
                "observable term and cost qubit counts differ");
        pieces.diag = term->op.diag;
        pieces.inv_diag = term->inv_diag;
        if (term->is_identity) {
            pieces.identity_term = true;
            return pieces;
        }
    }

    DenseOperator suffix = DenseOperator::Identity(dim, dim);
    for (std::size_t i = schedule.blocks.size(); i-- > 0;) {
        const SubBlock& block = schedule.blocks[i];
        const double w = block.effective_angle();
        const bool is_cost = block.kind == SubBlockKind::cost;
        // V = S H_b, so A_b = V S^dag and A_b^2 enters as V V^dag.
        const DenseOperator v = is_cost ? times_diag(suffix, cost.diag)
                                        : times_mixer_hamiltonian(suffix, cost.num_qubits);
        const DenseOperator a = v * suffix.adjoint();
        DenseOperator& m1 = is_cost ? pieces.m1_cost : pieces.m1_mixer;
        DenseOperator& p1 = is_cost ? pieces.p1_cost : pieces.p1_mixer;
        m1.noalias() += w * a;
        p1.noalias() += (w * w) * (v * v.adjoint());
        if (term) {
            DenseOperator& p3 = is_cost ? pieces.p3_cost : pieces.p3_mixer;
            p3.noalias() +=
                (w * w) * (conjugate_by_diag(a, pieces.diag, pieces.inv_diag) * a);
        }
        right_multiply_block(suffix, cost, block);
    }
    return pieces;
}

bool ring_pattern_matches(const DiagonalObservable& obs) {
    const int n = obs.num_qubits;
    if (n < 3) return false;
    const std::size_t dim = obs.diag.size();
    for (std::size_t z = 0; z < dim; ++z) {
        double sum = 0.0;
        for (int q = 0; q < n; ++q) {
            const int s_a = ((z >> q) & 1U) ? -1 : 1;
            const int s_b = ((z >> ((q + 1) % n)) & 1U) ? -1 : 1;
            sum += s_a * s_b;
        }
        if (std::abs(obs.diag[z] - sum) > 1e-9) return false;
    }
    return true;
}

}  // namespace

ObservableSum decompose_observable(const DiagonalObservable& obs) {
    const std::size_t dim = obs.diag.size();
    double max_abs = 0.0, min_abs = 0.0;
    for (std::size_t z = 0; z < dim; ++z) {
        const double m = std::abs(obs.diag[z]);
        max_abs = std::max(max_abs, m);
        min_abs = (z == 0) ? m : std::min(min_abs, m);
    }
    require(max_abs > 0.0, errc::decomposition, "observable is identically zero");

    ObservableSum out;
    out.target = obs;
    if (min_abs > 1e-8 * max_abs) {
        ObservableTerm term;
        term.op = obs;
        term.label = "full";
        term.inv_diag.resize(dim);
        for (std::size_t z = 0; z < dim; ++z) term.inv_diag[z] = 1.0 / obs.diag[z];
        out.terms.push_back(std::move(term));
        return out;
    }

    // Search projector |t><t|: identity/N plus an invertible remainder.
    std::size_t ones = 0, zeros = 0, hit = 0;
    for (std::size_t z = 0; z < dim; ++z) {
        if (std::abs(obs.diag[z] - 1.0) <= 1e-12) {
            ++ones;
            hit = z;
        } else if (std::abs(obs.diag[z]) <= 1e-12) {
            ++zeros;
        }
    }
    if (ones == 1 && zeros == dim - 1) {
        const double inv_dim = 1.0 / static_cast<double>(dim);
        ObservableTerm ident;
        ident.op = DiagonalObservable(obs.num_qubits, std::vector<double>(dim, inv_dim));
        ident.inv_diag.assign(dim, static_cast<double>(dim));
        ident.label = "identity";
        ident.is_identity = true;
        ObservableTerm rest;
        std::vector<double> rest_diag(dim, -inv_dim);
        rest_diag[hit] = 1.0 - inv_dim;
        rest.op = DiagonalObservable(obs.num_qubits, std::move(rest_diag));
        rest.inv_diag.resize(dim);
        for (std::size_t z = 0; z < dim; ++z) rest.inv_diag[z] = 1.0 / rest.op.diag[z];
        rest.label = "residual";
        out.terms.push_back(std::move(ident));
        out.terms.push_back(std::move(rest));
        return out;
    }

    if (ring_pattern_matches(obs)) {
        const int n = obs.num_qubits;
        for (int q = 0; q < n; ++q) {
            std::vector<double> bond_diag(dim);
            for (std::size_t z = 0; z < dim; ++z) {
                const int s_a = ((z >> q) & 1U) ? -1 : 1;
                const int s_b = ((z >> ((q + 1) % n)) & 1U) ? -1 : 1;
                bond_diag[z] = s_a * s_b;
            }
            ObservableTerm bond;
            bond.op = DiagonalObservable(n, bond_diag);
            bond.inv_diag = bond_diag;
            bond.label = "bond " + std::to_string(q);
            out.terms.push_back(std::move(bond));
        }
        return out;
    }

    raise(errc::decomposition, "no invertible decomposition known for this observable");
}

CumulantPieces cumulant_pieces(const DiagonalObservable& cost, const Schedule& schedule,
                               const ObservableTerm& term) {
    return build_pieces(cost, schedule, &term);
}

DenseOperator first_cumulant(const CumulantPieces& pieces, double eta_m, double eta_c) {
    const Eigen::Index dim = pieces.m1_mixer.rows();
    if (pieces.identity_term || (eta_m == 0.0 && eta_c == 0.0))
        return DenseOperator::Zero(dim, dim);
    const DenseOperator x = eta_m * pieces.m1_mixer + eta_c * pieces.m1_cost;
    return x - conjugate_by_diag(x, pieces.diag, pieces.inv_diag);
}

DenseOperator first_cumulant(const DiagonalObservable& cost, const Schedule& schedule,
                             const ObservableTerm& term, double eta_m, double eta_c) {
    return first_cumulant(cumulant_pieces(cost, schedule, term), eta_m, eta_c);
}

DenseOperator second_cumulant(const CumulantPieces& pieces, double gamma_m, double gamma_c) {
    const Eigen::Index dim = pieces.p1_mixer.rows();
    if (pieces.identity_term || (gamma_m == 0.0 && gamma_c == 0.0))
        return DenseOperator::Zero(dim, dim);
    const DenseOperator p1 = gamma_m * pieces.p1_mixer + gamma_c * pieces.p1_cost;
    const DenseOperator p3 = gamma_m * pieces.p3_mixer + gamma_c * pieces.p3_cost;
    return p1 + conjugate_by_diag(p1, pieces.diag, pieces.inv_diag) - 2.0 * p3;
}

DenseOperator second_cumulant(const DiagonalObservable& cost, const Schedule& schedule,
                              const ObservableTerm& term, double gamma_m, double gamma_c) {
    return second_cumulant(cumulant_pieces(cost, schedule, term), gamma_m, gamma_c);
}

DenseOperator CumulantSeries::generator() const {
    return cplx(0.0, -1.0) * c1 - 0.5 * c2;
}

double CumulantSeries::generator_norm() const { return spectral_norm(generator()); }

CumulantSeries observable_cumulant(const DiagonalObservable& cost, const Schedule& schedule,
                                   const ObservableTerm& term, const NoiseModel& model) {
    model.validate();
    const CumulantPieces pieces = cumulant_pieces(cost, schedule, term);
    CumulantSeries series;
    series.c1 = first_cumulant(pieces, model.eta_m, model.eta_c);
    series.c2 = second_cumulant(pieces, model.gamma_m, model.gamma_c);
    series.term_label = term.label;
    return series;
}

DenseOperator error_operator(const CumulantSeries& series) {
    return matrix_exp(series.generator());
}

double approx_expectation(const DiagonalObservable& cost, const Schedule& schedule,
                          const ObservableSum& obs_sum, const NoiseModel& model) {
    model.validate();
    require(!obs_sum.terms.empty(), errc::invalid_argument, "empty observable decomposition");
    const StateVector psi = evolve(cost, schedule);
    const Eigen::Index dim = Eigen::Index{1} << cost.num_qubits;
    const Eigen::Map<const Eigen::VectorXcd> amp(psi.amps.data(), dim);
    cplx acc(0.0, 0.0);
    for (const ObservableTerm& term : obs_sum.terms) {
        if (term.is_identity) {
            acc += expectation(psi, term.op);
            continue;
        }
        const CumulantSeries series = observable_cumulant(cost, schedule, term, model);
        const Eigen::VectorXcd shifted = error_operator(series) * amp;
        for (Eigen::Index z = 0; z < dim; ++z)
            acc += std::conj(amp[z]) * term.op.diag[static_cast<std::size_t>(z)] * shifted[z];
    }
    if (std::abs(acc.imag()) > 1e-6 * std::abs(acc.real()) + 1e-12)
        raise(errc::truncation_warning,
              "imaginary residue " + std::to_string(acc.imag()) +
                  " exceeds tolerance; cumulant truncation unreliable here");
    return acc.real();
}

CumulantSeries unitary_cumulant(const DiagonalObservable& cost, const Schedule& schedule,
                                const NoiseModel& model) {
    model.validate();
    const CumulantPieces pieces = build_pieces(cost, schedule, nullptr);
    CumulantSeries series;
    series.c1 = model.eta_m * pieces.m1_mixer + model.eta_c * pieces.m1_cost;
    series.c2 = model.gamma_m * pieces.p1_mixer + model.gamma_c * pieces.p1_cost;
    series.term_label = "unitary";
    return series;
}

double toggling_frame_equivalence_check(const DiagonalObservable& cost, const Schedule& schedule,
                                        const NoiseRealization& realization) {
    require(cost.num_qubits <= 8, errc::capacity,
            "toggling-frame check is a dense diagnostic, use at most 8 qubits");
    require(realization.multipliers.size() == schedule.blocks.size(), errc::dimension_mismatch,
            "multiplier count does not match sub-block count");
    const Eigen::Index dim = Eigen::Index{1} << cost.num_qubits;

    // Error factors commuted left: U = [prod_b S_b E_b S_b^dag] U0 with S_b
    // the ideal suffix after sub-block b, iterated last-to-first.
    DenseOperator suffix = DenseOperator::Identity(dim, dim);
    DenseOperator left_errors = DenseOperator::Identity(dim, dim);
    for (std::size_t i = schedule.blocks.size(); i-- > 0;) {
        const SubBlock& block = schedule.blocks[i];
        const double excess = realization.multipliers[i] - 1.0;
        DenseOperator v = suffix;
        if (block.kind == SubBlockKind::cost)
            right_multiply_phase(v, cost.diag, excess * block.effective_angle());
        else
            right_multiply_mixer(v, cost.num_qubits, excess * block.effective_angle());
        left_errors = left_errors * (v * suffix.adjoint());
        right_multiply_block(suffix, cost, block);
    }
    const DenseOperator left = left_errors * suffix;  // suffix is now U0

    // Error factors commuted right: U = U0 [prod_b P_b^dag E_b P_b] with P_b
    // the ideal prefix through sub-block b, iterated first-to-last.
    DenseOperator prefix = DenseOperator::Identity(dim, dim);
    DenseOperator right_errors = DenseOperator::Identity(dim, dim);
    for (std::size_t i = 0; i < schedule.blocks.size(); ++i) {
        const SubBlock& block = schedule.blocks[i];
        apply_subblock_dense(prefix, cost, block);
        DenseOperator g = prefix;
        apply_subblock_dense(g, cost, block, realization.multipliers[i] - 1.0);
        right_errors = (prefix.adjoint() * g) * right_errors;
    }
    const DenseOperator right = suffix * right_errors;

    return spectral_norm(left - right);
}

}  // namespace peqs

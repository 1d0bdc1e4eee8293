#include "peqs/bounds.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>

#include <Eigen/Dense>

namespace peqs {

namespace {

struct AngleSums {
    double abs_mixer = 0.0;
    double abs_cost = 0.0;
    double sq_mixer = 0.0;
    double sq_cost = 0.0;
};

AngleSums angle_sums(const Schedule& schedule) {
    AngleSums s;
    for (const auto& block : schedule.blocks) {
        const double w = std::abs(block.effective_angle());
        if (block.kind == SubBlockKind::mixer) {
            s.abs_mixer += w;
            s.sq_mixer += w * w;
        } else {
            s.abs_cost += w;
            s.sq_cost += w * w;
        }
    }
    return s;
}

double term_condition(const ObservableTerm& term) {
    double inv_norm = 0.0;
    for (double v : term.inv_diag) inv_norm = std::max(inv_norm, std::abs(v));
    return term.op.norm_inf() * inv_norm;
}

// ||O^k rho||_1 for a pure state and diagonal O is just ||O^k psi||_2.
double diag_state_trace_norm(const std::vector<double>& diag, const StateVector& psi, int power) {
    double sum = 0.0;
    for (std::size_t z = 0; z < psi.amps.size(); ++z) {
        const double d = std::pow(diag[z], power);
        sum += d * d * std::norm(psi.amps[z]);
    }
    return std::sqrt(sum);
}

// Trace norm of the rank-2 operator a v1^dag - b v2^dag, via thin QR of both
// factor pairs and a 2x2 SVD.
double rank2_trace_norm(const Eigen::VectorXcd& a, const Eigen::VectorXcd& v1,
                        const Eigen::VectorXcd& b, const Eigen::VectorXcd& v2) {
    Eigen::MatrixXcd uf(a.size(), 2), vf(a.size(), 2);
    uf.col(0) = a;
    uf.col(1) = -b;
    vf.col(0) = v1;
    vf.col(1) = v2;
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qu(uf), qv(vf);
    const Eigen::Matrix2cd ru = qu.matrixQR().topRows(2).triangularView<Eigen::Upper>();
    const Eigen::Matrix2cd rv = qv.matrixQR().topRows(2).triangularView<Eigen::Upper>();
    const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(ru * rv.adjoint());
    return svd.singularValues().sum();
}

Eigen::VectorXcd to_eigen(const StateVector& psi) {
    return Eigen::Map<const Eigen::VectorXcd>(psi.amps.data(),
                                              static_cast<Eigen::Index>(psi.dim()));
}

Eigen::VectorXcd mixer_ham_state(const StateVector& psi) {
    const std::size_t dim = psi.dim();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    for (int q = 0; q < psi.num_qubits; ++q) {
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t z = 0; z < dim; ++z) out[static_cast<Eigen::Index>(z)] += psi.amps[z ^ bit];
    }
    return out;
}

Eigen::VectorXcd cost_ham_state(const DiagonalObservable& cost, const StateVector& psi) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(psi.dim()));
    for (std::size_t z = 0; z < psi.dim(); ++z)
        out[static_cast<Eigen::Index>(z)] = cost.diag[z] * psi.amps[z];
    return out;
}

DenseOperator suffix_operator(const DiagonalObservable& cost, const Schedule& schedule,
                              std::size_t from) {
    const Eigen::Index dim = Eigen::Index{1} << cost.num_qubits;
    DenseOperator s = DenseOperator::Identity(dim, dim);
    for (std::size_t i = from; i < schedule.blocks.size(); ++i)
        apply_subblock_dense(s, cost, schedule.blocks[i]);
    return s;
}

StateVector prefix_state(const DiagonalObservable& cost, const Schedule& schedule,
                         std::size_t upto) {
    Schedule head;
    head.blocks.assign(schedule.blocks.begin(),
                       schedule.blocks.begin() + static_cast<std::ptrdiff_t>(upto));
    return evolve(cost, head);
}

CumulantNormBounds norm_bounds_impl(const DiagonalObservable& cost, const Schedule& schedule,
                                    const ObservableTerm& term, const NoiseModel& model,
                                    bool discrete) {
    model.validate();
    if (term.is_identity || model.is_zero()) return {};
    const double h_c = cost.norm_inf();
    const double h_m = static_cast<double>(cost.num_qubits);
    const double kappa = term_condition(term);
    const AngleSums s = angle_sums(schedule);

    CumulantNormBounds out;
    out.first = (std::abs(model.eta_m) * s.abs_mixer * h_m +
                 std::abs(model.eta_c) * s.abs_cost * h_c) *
                (1.0 + kappa);
    const double variance_part =
        discrete ? model.gamma_m * s.sq_mixer * h_m * h_m + model.gamma_c * s.sq_cost * h_c * h_c
                 : model.gamma_m * s.abs_mixer * h_m + model.gamma_c * s.abs_cost * h_c;
    out.second = variance_part * (1.0 + 3.0 * kappa);
    return out;
}

double numerical_abs_error(const DiagonalObservable& cost, const Schedule& schedule,
                           const ObservableSum& obs_sum, const NoiseModel& model) {
    const Eigen::Index dim = Eigen::Index{1} << obs_sum.target.num_qubits;
    DenseOperator shifted = DenseOperator::Zero(dim, dim);
    for (Eigen::Index z = 0; z < dim; ++z) shifted(z, z) -= obs_sum.target.diag[z];
    for (const auto& term : obs_sum.terms) {
        if (term.is_identity) {
            for (Eigen::Index z = 0; z < dim; ++z) shifted(z, z) += term.op.diag[z];
            continue;
        }
        const DenseOperator lambda = error_operator(observable_cumulant(cost, schedule, term, model));
        for (Eigen::Index a = 0; a < dim; ++a) shifted.row(a) += term.op.diag[a] * lambda.row(a);
    }
    return std::min(spectral_norm(shifted), obs_sum.target.norm_inf());
}

double analytic_abs_error(const DiagonalObservable& cost, const Schedule& schedule,
                          const ObservableSum& obs_sum, const NoiseModel& model) {
    double sum = 0.0;
    for (const auto& term : obs_sum.terms) {
        if (term.is_identity) continue;
        const double gen = cumulant_norm_bounds_discrete(cost, schedule, term, model).generator();
        sum += term.op.norm_inf() * std::expm1(gen);
    }
    return std::min(sum, obs_sum.target.norm_inf());
}

}  // namespace

const char* flavor_name(BoundFlavor flavor) {
    return flavor == BoundFlavor::numerical ? "Numerical" : "Analytic";
}

CumulantNormBounds cumulant_norm_bounds(const DiagonalObservable& cost, const Schedule& schedule,
                                        const ObservableTerm& term, const NoiseModel& model) {
    return norm_bounds_impl(cost, schedule, term, model, false);
}

CumulantNormBounds cumulant_norm_bounds_discrete(const DiagonalObservable& cost,
                                                 const Schedule& schedule,
                                                 const ObservableTerm& term,
                                                 const NoiseModel& model) {
    return norm_bounds_impl(cost, schedule, term, model, true);
}

BoundPair abs_error_bound(const DiagonalObservable& cost, const Schedule& schedule,
                          const ObservableSum& obs_sum, const NoiseModel& model) {
    model.validate();
    require(cost.num_qubits == obs_sum.target.num_qubits, errc::dimension_mismatch,
            "cost and observable qubit counts differ");
    if (model.is_zero()) return {};
    BoundPair out;
    out.numerical = numerical_abs_error(cost, schedule, obs_sum, model);
    out.analytic = analytic_abs_error(cost, schedule, obs_sum, model);
    return out;
}

double grover_paper_abs_bound(int p_star, double gamma, double cost_norm) {
    require(p_star >= 1, errc::invalid_argument, "p* must be positive");
    require(gamma >= 0.0, errc::invalid_argument, "variance must be non-negative");
    return std::min(2.0 * std::expm1(4.0 * std::numbers::pi * p_star * gamma), cost_norm);
}

BoundPair approx_ratio_bound(const DiagonalObservable& cost, const Schedule& schedule,
                             const ObservableSum& obs_sum, const NoiseModel& model) {
    require(obs_sum.target.c_max != 0.0, errc::invalid_argument,
            "approximation ratio undefined for C_max = 0");
    BoundPair out = abs_error_bound(cost, schedule, obs_sum, model);
    out.numerical /= obs_sum.target.c_max;
    out.analytic /= obs_sum.target.c_max;
    return out;
}

MseCoherentBound mse_bound_coherent(const DiagonalObservable& cost, const Schedule& schedule,
                                    const DiagonalObservable& obs, const NoiseModel& model) {
    model.validate();
    require(cost.num_qubits == obs.num_qubits, errc::dimension_mismatch,
            "cost and observable qubit counts differ");
    require(model.is_coherent(), errc::model_mismatch,
            "constant-error MSE bound requires a coherent model");
    const AngleSums s = angle_sums(schedule);
    MseCoherentBound out;
    out.h_e = std::abs(model.eta_m) * s.abs_mixer * static_cast<double>(cost.num_qubits) +
              std::abs(model.eta_c) * s.abs_cost * cost.norm_inf();
    const double o_norm = obs.norm_inf();
    out.bound = 2.0 * o_norm * o_norm * (1.0 + 2.0 * out.h_e * out.h_e);
    return out;
}

MseGeneralBound mse_bound_general(const DiagonalObservable& cost, const Schedule& schedule,
                                  const ObservableSum& obs_sum, const NoiseModel& model) {
    model.validate();
    require(cost.num_qubits == obs_sum.target.num_qubits, errc::dimension_mismatch,
            "cost and observable qubit counts differ");
    const StateVector psi = evolve(cost, schedule);
    const double o_rho = diag_state_trace_norm(obs_sum.target.diag, psi, 1);
    const double o2_rho = diag_state_trace_norm(obs_sum.target.diag, psi, 2);

    double lam_norm = 1.0;
    double lam_shift = 0.0;
    const bool single_full = obs_sum.terms.size() == 1 && !obs_sum.terms.front().is_identity;
    for (const auto& term : obs_sum.terms) {
        if (term.is_identity) continue;
        const DenseOperator lambda =
            error_operator(observable_cumulant(cost, schedule, term, model));
        lam_norm = std::max(lam_norm, spectral_norm(lambda));
        if (single_full) {
            const DenseOperator eye = DenseOperator::Identity(lambda.rows(), lambda.cols());
            lam_shift = spectral_norm(lambda - eye);
        }
    }

    MseGeneralBound out;
    out.variance_bound = lam_norm * (lam_norm * o_rho * o_rho + o2_rho);
    if (single_full) {
        out.bias_bound = lam_shift * lam_shift * o_rho * o_rho;
    } else {
        const double abs_err = model.is_zero()
                                   ? 0.0
                                   : numerical_abs_error(cost, schedule, obs_sum, model);
        out.bias_bound = abs_err * abs_err;
    }
    return out;
}

double gradient_error_bound(const DiagonalObservable& cost, const Schedule& schedule,
                            const ObservableTerm& term, const NoiseModel& model,
                            std::size_t index) {
    model.validate();
    require(index < schedule.blocks.size(), errc::invalid_argument,
            "sub-block index out of range");
    require(schedule.is_layered(), errc::invalid_argument,
            "gradient bound requires a layered schedule");
    if (model.is_zero() || term.is_identity) return 0.0;

    const double h_c = cost.norm_inf();
    const double h_m = static_cast<double>(cost.num_qubits);
    const double kappa = term_condition(term);
    const int layer = static_cast<int>(index) / 2 + 1;

    double gamma_prefix = 0.0, beta_prefix = 0.0, beta_strict = 0.0;
    for (int j = 1; j <= layer; ++j) {
        gamma_prefix += std::abs(schedule.gamma(j));
        beta_prefix += std::abs(schedule.beta(j));
        if (j < layer) beta_strict += std::abs(schedule.beta(j));
    }

    // Layer-resolved closed forms for ||d C1|| and ||d C2||; the differentiated
    // kind carries the direct-weight term, the other kind enters through the
    // rotated frames of earlier sub-blocks.
    double dc1 = 0.0, di1 = 0.0, di3 = 0.0;
    if (schedule.blocks[index].kind == SubBlockKind::cost) {
        dc1 = (1.0 + kappa) * h_c *
              (std::abs(model.eta_c) * (1.0 + 2.0 * h_c * gamma_prefix) +
               2.0 * std::abs(model.eta_m) * h_m * beta_strict);
        di1 = model.gamma_c * h_c * h_c * (1.0 + 2.0 * h_c * gamma_prefix) +
              2.0 * model.gamma_m * h_m * h_m * h_c * beta_strict;
        di3 = kappa * h_c *
              (model.gamma_c * h_c * (1.0 + 4.0 * h_c * gamma_prefix) +
               4.0 * model.gamma_m * h_m * h_m * beta_strict);
    } else {
        dc1 = (1.0 + kappa) * h_m *
              (std::abs(model.eta_m) * (1.0 + 2.0 * h_m * beta_prefix) +
               2.0 * std::abs(model.eta_c) * h_c * gamma_prefix);
        di1 = model.gamma_m * h_m * h_m * (1.0 + 2.0 * h_m * beta_prefix) +
              2.0 * model.gamma_c * h_c * h_c * h_m * gamma_prefix;
        di3 = kappa * h_m *
              (model.gamma_m * h_m * (1.0 + 4.0 * h_m * beta_prefix) +
               4.0 * model.gamma_c * h_c * h_c * gamma_prefix);
    }
    const double dc2 = di1 * (1.0 + kappa) + 2.0 * di3;
    const double d_gen = dc1 + dc2 / 2.0;

    const CumulantSeries series = observable_cumulant(cost, schedule, term, model);
    const double c_norm = series.generator_norm();
    const double lam_factor =
        c_norm < 1e-12 ? 1.0 : std::exp(c_norm) * std::expm1(2.0 * c_norm) / (2.0 * c_norm);

    const DenseOperator lambda = error_operator(series);
    const DenseOperator eye = DenseOperator::Identity(lambda.rows(), lambda.cols());
    const double lam_shift = spectral_norm(lambda - eye);

    const StateVector psi_final = evolve(cost, schedule);
    const double o_rho = diag_state_trace_norm(term.op.diag, psi_final, 1);

    // Exact trace norm of (S^dag O S)[H, rho_pre] with S the suffix from the
    // differentiated sub-block and rho_pre the pure state entering it.
    const DenseOperator suffix = suffix_operator(cost, schedule, index);
    DenseOperator toggled = suffix;
    for (Eigen::Index a = 0; a < toggled.rows(); ++a) toggled.row(a) *= term.op.diag[a];
    toggled = suffix.adjoint() * toggled;

    const StateVector pre = prefix_state(cost, schedule, index);
    const Eigen::VectorXcd psi_pre = to_eigen(pre);
    const Eigen::VectorXcd h_pre = schedule.blocks[index].kind == SubBlockKind::cost
                                       ? cost_ham_state(cost, pre)
                                       : mixer_ham_state(pre);
    const Eigen::VectorXcd a = toggled * h_pre;
    const Eigen::VectorXcd b = toggled * psi_pre;
    const double commutator_norm = rank2_trace_norm(a, psi_pre, b, h_pre);

    return lam_factor * d_gen * o_rho + lam_shift * commutator_norm;
}

double unitary_distance_bound(const CumulantSeries& series) {
    return 2.0 * std::expm1(series.generator_norm());
}

FiniteSamplingCorrections finite_sampling_corrections(const DenseOperator& lambda,
                                                      const StateVector& psi,
                                                      const DiagonalObservable& obs,
                                                      std::size_t n_s) {
    require(n_s >= 1, errc::invalid_argument, "shot count must be positive");
    require(obs.num_qubits == psi.num_qubits, errc::dimension_mismatch,
            "observable and state qubit counts differ");
    require(lambda.rows() == static_cast<Eigen::Index>(psi.dim()), errc::dimension_mismatch,
            "error operator dimension does not match the state");
    const double lam = spectral_norm(lambda);
    const double o1 = diag_state_trace_norm(obs.diag, psi, 1);
    const double o2 = diag_state_trace_norm(obs.diag, psi, 2);
    const double o4 = diag_state_trace_norm(obs.diag, psi, 4);
    const double kappa_o = lam * o2 + lam * lam * o1 * o1;
    const double kappa_o2 = lam * o4 + lam * lam * o2 * o2;
    const double root = std::sqrt(static_cast<double>(n_s));

    FiniteSamplingCorrections out;
    out.abs_correction = std::sqrt(kappa_o) / root;
    out.mse_correction = kappa_o / static_cast<double>(n_s) +
                         (kappa_o2 + 2.0 * lam * o1 * std::sqrt(kappa_o)) / root;
    return out;
}

}  // namespace peqs

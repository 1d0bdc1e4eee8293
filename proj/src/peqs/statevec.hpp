#ifndef PEQS_STATEVEC_HPP
#define PEQS_STATEVEC_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "peqs/error.hpp"

namespace peqs {

using cplx = std::complex<double>;
using DenseOperator = Eigen::MatrixXcd;

// Statevector Monte Carlo is allowed past the dense-operator cap; dense paths
// (propagators, cumulants, bounds) stop at kMaxDenseQubits.
inline constexpr int kMaxStateQubits = 20;
inline constexpr int kMaxDenseQubits = 12;
inline constexpr Eigen::Index kMaxDenseDim = 4096;

struct StateVector {
    int num_qubits = 0;
    std::vector<cplx> amps;

    std::size_t dim() const { return amps.size(); }
};

struct DiagonalObservable {
    int num_qubits = 0;
    std::vector<double> diag;
    double c_max = 0.0;

    DiagonalObservable() = default;
    DiagonalObservable(int n, std::vector<double> values);

    double norm_inf() const;
    DenseOperator dense() const;
};

StateVector plus_state(int num_qubits);
StateVector basis_state(int num_qubits, std::size_t index);

// In-place gate kernels. Effective unitaries: exp(-i*angle*H_C) and
// exp(-i*angle*sum_j X_j).
void apply_phase(StateVector& state, const DiagonalObservable& obs, double angle);
void apply_mixer(StateVector& state, double angle);
// exp(-i*angle*X) on one qubit.
void apply_rx(StateVector& state, int qubit, double angle);

double expectation(const StateVector& state, const DiagonalObservable& obs);
double state_norm(const StateVector& state);
cplx inner_product(const StateVector& a, const StateVector& b);

double spectral_norm(const DenseOperator& a);
double trace_norm(const DenseOperator& a);
double frobenius_distance(const DenseOperator& a, const DenseOperator& b);
DenseOperator matrix_exp(const DenseOperator& a);
// Eigendecomposition path for Hermitian inputs.
DenseOperator matrix_exp_hermitian(const DenseOperator& a);

}  // namespace peqs

#endif

#include "peqs/statevec.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace peqs {

namespace {

void check_state_capacity(int n) {
    require(n >= 1 && n <= kMaxStateQubits, errc::capacity,
            "qubit count " + std::to_string(n) + " outside [1, " +
                std::to_string(kMaxStateQubits) + "]");
}

void check_finite(const DenseOperator& a) {
    require(a.allFinite(), errc::invalid_argument, "operator has non-finite entries");
}

// Largest singular value by power iteration on A^dagger A.
double spectral_norm_power(const DenseOperator& a) {
    const Eigen::Index dim = a.cols();
    Eigen::VectorXcd v(dim);
    std::uint64_t s = 0x5eedULL;
    for (Eigen::Index i = 0; i < dim; ++i) {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        const double re = static_cast<double>(s >> 33) / 4294967296.0 - 0.5;
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        const double im = static_cast<double>(s >> 33) / 4294967296.0 - 0.5;
        v(i) = cplx(re, im);
    }
    v.normalize();
    double lambda = 0.0;
    const int max_iters = 10000;
    const double tol = 1e-10;
    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXcd w = a.adjoint() * (a * v);
        const double next = std::sqrt(std::abs(v.dot(w).real()));
        const double scale = w.norm();
        if (scale == 0.0) return 0.0;
        v = w / scale;
        if (it > 0 && std::abs(next - lambda) <= tol * std::max(1.0, next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return lambda;
}

Eigen::VectorXd singular_values(const DenseOperator& a) {
    if (a.rows() < 32) {
        Eigen::JacobiSVD<DenseOperator> svd(a);
        return svd.singularValues();
    }
    Eigen::BDCSVD<DenseOperator> svd(a);
    return svd.singularValues();
}

}  // namespace

DiagonalObservable::DiagonalObservable(int n, std::vector<double> values)
    : num_qubits(n), diag(std::move(values)) {
    check_state_capacity(n);
    require(diag.size() == (std::size_t{1} << n), errc::dimension_mismatch,
            "diagonal length does not match qubit count");
    c_max = *std::max_element(diag.begin(), diag.end());
}

double DiagonalObservable::norm_inf() const {
    double m = 0.0;
    for (double d : diag) m = std::max(m, std::abs(d));
    return m;
}

DenseOperator DiagonalObservable::dense() const {
    const Eigen::Index dim = static_cast<Eigen::Index>(diag.size());
    DenseOperator out = DenseOperator::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) out(i, i) = diag[static_cast<std::size_t>(i)];
    return out;
}

StateVector plus_state(int num_qubits) {
    check_state_capacity(num_qubits);
    StateVector state;
    state.num_qubits = num_qubits;
    const std::size_t dim = std::size_t{1} << num_qubits;
    state.amps.assign(dim, cplx(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
    return state;
}

StateVector basis_state(int num_qubits, std::size_t index) {
    check_state_capacity(num_qubits);
    StateVector state;
    state.num_qubits = num_qubits;
    const std::size_t dim = std::size_t{1} << num_qubits;
    require(index < dim, errc::invalid_argument, "basis index out of range");
    state.amps.assign(dim, cplx(0.0, 0.0));
    state.amps[index] = cplx(1.0, 0.0);
    return state;
}

void apply_phase(StateVector& state, const DiagonalObservable& obs, double angle) {
    require(state.dim() == obs.diag.size(), errc::dimension_mismatch,
            "state/observable dimension mismatch");
    for (std::size_t z = 0; z < state.amps.size(); ++z) {
        const double phi = -angle * obs.diag[z];
        state.amps[z] *= cplx(std::cos(phi), std::sin(phi));
    }
}

void apply_rx(StateVector& state, int qubit, double angle) {
    const std::size_t bit = std::size_t{1} << qubit;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const cplx mis(0.0, -s);
    for (std::size_t z = 0; z < state.amps.size(); ++z) {
        if (z & bit) continue;
        const cplx a = state.amps[z];
        const cplx b = state.amps[z | bit];
        state.amps[z] = c * a + mis * b;
        state.amps[z | bit] = mis * a + c * b;
    }
}

void apply_mixer(StateVector& state, double angle) {
    for (int q = 0; q < state.num_qubits; ++q) apply_rx(state, q, angle);
}

double expectation(const StateVector& state, const DiagonalObservable& obs) {
    require(state.dim() == obs.diag.size(), errc::dimension_mismatch,
            "state/observable dimension mismatch");
    double sum = 0.0;
    for (std::size_t z = 0; z < state.amps.size(); ++z)
        sum += obs.diag[z] * std::norm(state.amps[z]);
    return sum;
}

double state_norm(const StateVector& state) {
    double sum = 0.0;
    for (const cplx& a : state.amps) sum += std::norm(a);
    return std::sqrt(sum);
}

cplx inner_product(const StateVector& a, const StateVector& b) {
    require(a.dim() == b.dim(), errc::dimension_mismatch, "state dimension mismatch");
    cplx sum(0.0, 0.0);
    for (std::size_t z = 0; z < a.amps.size(); ++z) sum += std::conj(a.amps[z]) * b.amps[z];
    return sum;
}

double spectral_norm(const DenseOperator& a) {
    require(a.rows() <= kMaxDenseDim && a.cols() <= kMaxDenseDim, errc::capacity,
            "operator dimension exceeds dense cap");
    check_finite(a);
    if (a.rows() <= 1024 && a.cols() <= 1024) return singular_values(a).maxCoeff();
    return spectral_norm_power(a);
}

double trace_norm(const DenseOperator& a) {
    require(a.rows() <= kMaxDenseDim && a.cols() <= kMaxDenseDim, errc::capacity,
            "operator dimension exceeds dense cap");
    check_finite(a);
    if (a.rows() <= 1024 && a.cols() <= 1024) return singular_values(a).sum();
    // Above the SVD threshold: singular values are sqrt eigenvalues of the
    // Hermitian product A^dagger A.
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(a.adjoint() * a);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        sum += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
    return sum;
}

double frobenius_distance(const DenseOperator& a, const DenseOperator& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), errc::dimension_mismatch,
            "operator dimension mismatch");
    return (a - b).norm();
}

DenseOperator matrix_exp(const DenseOperator& a) {
    require(a.rows() <= kMaxDenseDim, errc::capacity, "operator dimension exceeds dense cap");
    check_finite(a);
    return a.exp();
}

DenseOperator matrix_exp_hermitian(const DenseOperator& a) {
    check_finite(a);
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(a);
    return es.eigenvectors() *
           es.eigenvalues().array().exp().matrix().asDiagonal() *
           es.eigenvectors().adjoint();
}

}  // namespace peqs

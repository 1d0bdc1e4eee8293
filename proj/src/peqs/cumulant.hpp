#ifndef PEQS_CUMULANT_HPP
#define PEQS_CUMULANT_HPP

#include <string>
#include <vector>

#include "peqs/noise.hpp"
#include "peqs/qaoa.hpp"
#include "peqs/statevec.hpp"

namespace peqs {

// One invertible summand O_i of a diagonal observable. All supported targets
// decompose into diagonal terms, so the inverse is entrywise.
struct ObservableTerm {
    DiagonalObservable op;
    std::vector<double> inv_diag;
    std::string label;
    bool is_identity = false;
};

struct ObservableSum {
    std::vector<ObservableTerm> terms;
    DiagonalObservable target;
};

// Splits a diagonal observable into invertible terms: already-invertible
// observables stay whole, the search projector becomes I/N plus a traceless
// remainder, and a ring-Ising spectrum with a zero eigenvalue is split into
// its (involutory) bond terms.
ObservableSum decompose_observable(const DiagonalObservable& obs);

// Noise-strength-independent sub-block sums entering the cumulants. With
// A_b the toggled generator of sub-block b (conjugated by the ideal suffix
// evolution) and w_b its signed ideal angle:
//   m1 = sum_b w_b A_b            (per noise channel)
//   p1 = sum_b w_b^2 A_b^2
//   p3 = sum_b w_b^2 (O^-1 A_b O) A_b
// Cumulants at any (eta, Gamma) are linear assemblies of these, so sweeps
// reuse one build.
struct CumulantPieces {
    int num_qubits = 0;
    DenseOperator m1_mixer, m1_cost;
    DenseOperator p1_mixer, p1_cost;
    DenseOperator p3_mixer, p3_cost;
    std::vector<double> diag, inv_diag;
    bool identity_term = false;
};

CumulantPieces cumulant_pieces(const DiagonalObservable& cost, const Schedule& schedule,
                               const ObservableTerm& term);

// C1 = sum_mu eta_mu sum_b w_b (A_b - O^-1 A_b O); exactly zero for
// zero-mean (stochastic) models.
DenseOperator first_cumulant(const CumulantPieces& pieces, double eta_m, double eta_c);
DenseOperator first_cumulant(const DiagonalObservable& cost, const Schedule& schedule,
                             const ObservableTerm& term, double eta_m, double eta_c);

// C2 = 2 (I1 + O^-1 I1 O - 2 I3) with per-sub-block variance Gamma_mu w_b^2;
// exactly zero when both variances vanish.
DenseOperator second_cumulant(const CumulantPieces& pieces, double gamma_m, double gamma_c);
DenseOperator second_cumulant(const DiagonalObservable& cost, const Schedule& schedule,
                              const ObservableTerm& term, double gamma_m, double gamma_c);

struct CumulantSeries {
    DenseOperator c1;
    DenseOperator c2;
    std::string term_label;

    DenseOperator generator() const;  // -i c1 - c2/2
    double generator_norm() const;    // spectral norm of the generator
};

CumulantSeries observable_cumulant(const DiagonalObservable& cost, const Schedule& schedule,
                                   const ObservableTerm& term, const NoiseModel& model);

// Lambda = exp(-i C1 - C2/2).
DenseOperator error_operator(const CumulantSeries& series);

// Second-cumulant estimate of the noise-averaged expectation value,
// sum_i Tr[Lambda_i rho_S O_i] with rho_S the ideal evolved pure state.
double approx_expectation(const DiagonalObservable& cost, const Schedule& schedule,
                          const ObservableSum& obs_sum, const NoiseModel& model);

// Observable-free series for unitary-distance bounds: C1 = sum eta w A,
// C2 = sum Gamma w^2 A^2, no O-conjugated counterparts.
CumulantSeries unitary_cumulant(const DiagonalObservable& cost, const Schedule& schedule,
                                const NoiseModel& model);

// Rebuilds the faulty propagator from both toggling-frame factorizations
// (error factors commuted to the left and to the right of the ideal
// evolution) and returns the spectral distance between the two
// reconstructions.
double toggling_frame_equivalence_check(const DiagonalObservable& cost, const Schedule& schedule,
                                        const NoiseRealization& realization);

}  // namespace peqs

#endif

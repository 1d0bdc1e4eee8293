#ifndef PEQS_QAOA_HPP
#define PEQS_QAOA_HPP

#include <vector>

#include "peqs/statevec.hpp"

namespace peqs {

enum class SubBlockKind { cost, mixer };

struct SubBlock {
    SubBlockKind kind = SubBlockKind::cost;
    double angle = 0.0;
    int sign = 1;

    double effective_angle() const { return sign * angle; }
};

// Ordered sub-blocks, applied left to right. A "layer" is a (cost, mixer)
// pair; problem-specific sign patterns ride on the sign field so one evolution
// path serves every circuit family.
struct Schedule {
    std::vector<SubBlock> blocks;

    static Schedule layered(const std::vector<double>& gammas,
                            const std::vector<double>& betas);

    std::size_t size() const { return blocks.size(); }
    double total_time() const;
    bool is_layered() const;
    int num_layers() const;
    // Signed angles of 1-based layer j; schedule must be layered.
    double gamma(int layer) const;
    double beta(int layer) const;
};

StateVector evolve(const DiagonalObservable& cost, const Schedule& schedule,
                   const std::vector<double>* multipliers = nullptr);

double approximation_ratio(double value, double c_max);

// Exact derivative of <obs> after ideal evolution with respect to the stored
// angle of one sub-block (0-based index).
double gradient(const DiagonalObservable& cost, const Schedule& schedule,
                const DiagonalObservable& obs, std::size_t index);
std::vector<double> gradient_all(const DiagonalObservable& cost, const Schedule& schedule,
                                 const DiagonalObservable& obs);

DenseOperator dense_propagator(const DiagonalObservable& cost, const Schedule& schedule,
                               const std::vector<double>* multipliers = nullptr);

// Q_{k:j}: product of layers j..k (ideal angles); j > k gives the identity.
DenseOperator partial_propagator(const DiagonalObservable& cost, const Schedule& schedule,
                                 int from_layer, int to_layer);
// All suffix products Q_{P:j}, returned as entries [j] for j = 1..P+1 with
// entry [P+1] the identity (entry [0] unused).
std::vector<DenseOperator> suffix_propagators(const DiagonalObservable& cost,
                                              const Schedule& schedule);

// Left-multiplies the dense operator by one sub-block unitary.
void apply_subblock_dense(DenseOperator& u, const DiagonalObservable& cost,
                          const SubBlock& block, double multiplier = 1.0);

}  // namespace peqs

#endif

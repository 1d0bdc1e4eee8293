#ifndef PEQS_PROBLEMS_HPP
#define PEQS_PROBLEMS_HPP

#include <cstdint>
#include <vector>

#include "peqs/qaoa.hpp"
#include "peqs/statevec.hpp"

namespace peqs {

struct GroverInstance {
    int n = 0;
    std::size_t big_n = 0;
    DiagonalObservable cost;  // |0...0><0...0|
};

struct IsingRingInstance {
    int n = 0;
    DiagonalObservable cost;  // sum_i Z_i Z_{i+1}, periodic
};

GroverInstance grover_instance(int n);
IsingRingInstance ising_ring_instance(int n);

// 2p alternating-sign cost applications (first applied is +pi) with a fixed
// pi/n mixer after each. p counts W-layers, so the schedule has 4p sub-blocks.
Schedule grover_schedule(int n, int p);

// First local maximum of the noiseless <H_C> over p inside a window centered
// at round(0.32*2^{n/2} + 0.24) +- 2; the fitted formula only places the
// window, simulation settles the integer.
int grover_p_star(int n);

// p = n/2 schedule maximizing <H_C>, from multi-start BFGS ascent on the
// analytic gradients (20 random starts plus a linear ramp). Deterministic:
// best value wins, earlier start index breaks ties. Cached per n.
Schedule ising_optimal_schedule(int n);

struct DigitizedAngle {
    std::vector<int> bits;       // LSB first
    double reconstructed = 0.0;  // (2*pi/2^N) * sum_j bits[j] 2^j, wrapped to [0, 2*pi)
    double residual = 0.0;       // reduced angle minus nearest grid point (circular)
};

DigitizedAngle digitize_angle(double angle, int n_bits);

// Expands every sub-block into one building block per set bit, angle
// (2*pi/2^N)*2^j, preserving kind and sign. Bit width chosen by kind.
Schedule digitized_schedule(const Schedule& schedule, int n_bits_gamma, int n_bits_beta);

}  // namespace peqs

#endif

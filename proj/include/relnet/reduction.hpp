#pragma once

// Reductions from a Gaussian relay network to its two finite-field
// companions: the linear deterministic model (bit-pipe levels, GF(2)) and
// the discrete superposition model (truncated gains, exact integer
// arithmetic on dyadic inputs).

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "relnet/network.hpp"

namespace relnet {

// exact floor(log2(re^2 + im^2)) for a nonzero complex gain; never forms
// the square in floating point, so gains near power-of-two magnitudes are
// classified correctly
int floor_log2_abs2(ComplexGain h);

// per-edge bit-pipe count: max(0, floor(log2 |h|^2)); zero gain gives 0
int ld_levels(ComplexGain h);

struct LinearDeterministicEdge {
    NodeId from;
    NodeId to;
    int levels;
};

struct LinearDeterministicNetwork {
    int num_nodes = 0;
    int q = 0;  // max levels over all edges; every pipe carries q bits
    std::vector<LinearDeterministicEdge> edges;
};

LinearDeterministicNetwork ld_reduce(const GaussianNetwork& net);

// gaussian integer, exact
struct GaussianInteger {
    std::int64_t re = 0;
    std::int64_t im = 0;

    friend GaussianInteger operator+(GaussianInteger a, GaussianInteger b) {
        return {a.re + b.re, a.im + b.im};
    }
    bool operator==(const GaussianInteger&) const = default;
};

struct DiscreteSuperpositionEdge {
    NodeId from;
    NodeId to;
    GaussianInteger qgain;  // components of h truncated toward zero
};

struct DiscreteSuperpositionNetwork {
    int num_nodes = 0;
    int n = 0;  // input resolution in bits, >= 1
    std::vector<DiscreteSuperpositionEdge> edges;
};

DiscreteSuperpositionNetwork ds_reduce(const GaussianNetwork& net);

// transmit symbol: numerator pairs of dyadic values k / 2^n with
// 0 <= k < 2^n per component
struct DSInput {
    std::int64_t re_bits = 0;
    std::int64_t im_bits = 0;
};

// keep the n most significant binary fraction bits of a real x in [0, 1);
// the result sits on the grid at or just below x. Throws outside [0, 1).
DSInput ds_quantize_input(double x, int n);

// exact reception at one node: the sum over its incoming edges of the
// componentwise floor of qgain * input. Noise free and fully deterministic.
// Throws if an in-neighbor of `receiver` has no input assigned.
GaussianInteger ds_transmit(const DiscreteSuperpositionNetwork& ds,
                            NodeId receiver,
                            const std::map<NodeId, DSInput>& inputs);

}  // namespace relnet

#include "relnet/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace relnet {

namespace {

// a squared component as mant * 2^exp with an exact integer mantissa
struct ScaledSquare {
    unsigned __int128 mant = 0;  // zero iff the component is zero
    int exp = 0;
};

ScaledSquare square_decompose(double v) {
    if (v == 0.0) return {};
    int e = 0;
    const double m = std::frexp(std::fabs(v), &e);
    // m in [0.5, 1) carries at most 53 significant bits, so this is exact
    const auto mi = static_cast<std::uint64_t>(std::ldexp(m, 53));
    return {static_cast<unsigned __int128>(mi) * mi, 2 * (e - 53)};
}

int bit_length(unsigned __int128 v) {
    const auto hi = static_cast<std::uint64_t>(v >> 64);
    if (hi) return 128 - __builtin_clzll(hi);
    return 64 - __builtin_clzll(static_cast<std::uint64_t>(v));
}

// floor division by 2^n, exact for negative values too
std::int64_t floor_shift(std::int64_t v, int n) { return v >> n; }

}  // namespace

int floor_log2_abs2(ComplexGain h) {
    ScaledSquare a = square_decompose(h.real());
    ScaledSquare b = square_decompose(h.imag());
    if (a.mant == 0 && b.mant == 0)
        throw std::invalid_argument("floor_log2_abs2 requires a nonzero gain");
    if (a.mant == 0) return bit_length(b.mant) - 1 + b.exp;
    if (b.mant == 0) return bit_length(a.mant) - 1 + a.exp;
    if (a.exp < b.exp) std::swap(a, b);
    const int d = a.exp - b.exp;
    if (d <= 20) {
        // mantissas stay below 2^106, so the aligned sum fits in 128 bits
        const unsigned __int128 sum = (a.mant << d) + b.mant;
        return bit_length(sum) - 1 + b.exp;
    }
    // the larger square dominates; the sum crosses the next power of two
    // only if the smaller square fills the gap up to it
    const int la = bit_length(a.mant);
    const unsigned __int128 gap =
        (static_cast<unsigned __int128>(1) << la) - a.mant;
    const bool carry = bit_length(gap) + d <= 127 && (gap << d) <= b.mant;
    return la - 1 + (carry ? 1 : 0) + a.exp;
}

int ld_levels(ComplexGain h) {
    if (h == ComplexGain{0.0, 0.0}) return 0;
    return std::max(0, floor_log2_abs2(h));
}

LinearDeterministicNetwork ld_reduce(const GaussianNetwork& net) {
    validate_network(net);
    LinearDeterministicNetwork ld;
    ld.num_nodes = net.num_nodes;
    ld.edges.reserve(net.edges.size());
    for (const auto& e : net.edges) {
        const int levels = ld_levels(e.gain);
        ld.edges.push_back({e.from, e.to, levels});
        ld.q = std::max(ld.q, levels);
    }
    return ld;
}

DiscreteSuperpositionNetwork ds_reduce(const GaussianNetwork& net) {
    validate_network(net);
    DiscreteSuperpositionNetwork ds;
    ds.num_nodes = net.num_nodes;
    ds.edges.reserve(net.edges.size());
    int n = 1;
    for (const auto& e : net.edges) {
        for (double c : {e.gain.real(), e.gain.imag()})
            if (c != 0.0) n = std::max(n, std::ilogb(c));
        ds.edges.push_back({e.from, e.to,
                            {static_cast<std::int64_t>(std::trunc(e.gain.real())),
                             static_cast<std::int64_t>(std::trunc(e.gain.imag()))}});
    }
    ds.n = n;
    return ds;
}

DSInput ds_quantize_input(double x, int n) {
    if (!(x >= 0.0 && x < 1.0))
        throw std::invalid_argument("ds_quantize_input requires x in [0, 1)");
    if (n < 1 || n > 62)
        throw std::invalid_argument("ds_quantize_input requires 1 <= n <= 62");
    const std::int64_t top = (std::int64_t{1} << n) - 1;
    const auto k = static_cast<std::int64_t>(std::floor(std::ldexp(x, n)));
    // ldexp can land exactly on 2^n for x just below 1; clamp back onto grid
    return {std::min(k, top), 0};
}

GaussianInteger ds_transmit(const DiscreteSuperpositionNetwork& ds,
                            NodeId receiver,
                            const std::map<NodeId, DSInput>& inputs) {
    GaussianInteger acc;
    for (const auto& e : ds.edges) {
        if (e.to != receiver) continue;
        const auto it = inputs.find(e.from);
        if (it == inputs.end())
            throw std::invalid_argument("ds_transmit: no input for node " +
                                        std::to_string(e.from));
        const DSInput& x = it->second;
        // componentwise floor of qgain * (x / 2^n), computed exactly
        acc = acc + GaussianInteger{floor_shift(e.qgain.re * x.re_bits -
                                                    e.qgain.im * x.im_bits,
                                                ds.n),
                                    floor_shift(e.qgain.re * x.im_bits +
                                                    e.qgain.im * x.re_bits,
                                                ds.n)};
    }
    return acc;
}

}  // namespace relnet

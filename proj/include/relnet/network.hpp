#pragma once

// Directed relay networks with complex channel gains.
// Node 0 is the source, node M = num_nodes - 1 the destination; every other
// node is a relay. All types are plain values and are treated as immutable
// once built.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace relnet {

using NodeId = std::int32_t;
using ComplexGain = std::complex<double>;

struct Edge {
    NodeId from = 0;
    NodeId to = 0;
    ComplexGain gain{};
};

struct GaussianNetwork {
    int num_nodes = 0;  // nodes are 0 .. num_nodes-1
    std::vector<Edge> edges;

    NodeId source() const { return 0; }
    NodeId destination() const { return num_nodes - 1; }
};

// thrown when a network or file fails structural validation
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// thrown when an enumeration would exceed a hard size limit
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "infinite" link strength is modelled as a large finite gain
inline constexpr double kDefaultStrongGain = 1073741824.0;  // 2^30

// checks structure: node range, no self loops, no duplicate directed edges,
// finite gains, no all-zero gain, source has an outgoing and destination an
// incoming edge. Throws ValidationError naming the offender.
void validate_network(const GaussianNetwork& net);

// validates and returns the network (builder entry point)
GaussianNetwork make_network(int num_nodes, std::vector<Edge> edges);

// JSON form: {"nodes": N, "edges": [{"from", "to", "re", "im"}]}.
// "re"/"im" accept the strings "inf"/"-inf", replaced by +-strong_gain.
GaussianNetwork load_network(const std::string& path,
                             double strong_gain = kDefaultStrongGain);
GaussianNetwork parse_network(const std::string& json_text,
                              double strong_gain = kDefaultStrongGain);
void save_network(const GaussianNetwork& net, const std::string& path);
std::string network_to_json(const GaussianNetwork& net);

std::vector<Edge> in_edges(const GaussianNetwork& net, NodeId node);
std::vector<Edge> out_edges(const GaussianNetwork& net, NodeId node);

// A source-destination cut: omega contains the source side. Encoded as a
// bitmask over node ids (bit 0 always set, destination bit always clear).
struct Cut {
    std::uint32_t omega_mask = 1;
    int num_nodes = 0;

    bool in_omega(NodeId v) const { return (omega_mask >> v) & 1u; }
    std::vector<NodeId> omega() const;
    std::vector<NodeId> omega_c() const;
    // mask restricted to relay nodes 1..M-1, the canonical enumeration index
    std::uint32_t interior_mask() const { return (omega_mask >> 1); }
};

Cut make_cut(int num_nodes, std::uint32_t omega_mask);
Cut make_cut(const GaussianNetwork& net, std::uint32_t omega_mask);

// all 2^(M-1) source-destination cuts, ascending in interior bitmask.
// Refuses networks with more than 24 relay nodes.
std::vector<Cut> enumerate_cuts(int num_nodes);
std::vector<Cut> enumerate_cuts(const GaussianNetwork& net);

// edges from omega into omega_c
std::vector<Edge> crossing_edges(const GaussianNetwork& net, const Cut& cut);

}  // namespace relnet

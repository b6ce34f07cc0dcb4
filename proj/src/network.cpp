#include "relnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace relnet {

using nlohmann::json;

void validate_network(const GaussianNetwork& net) {
    if (net.num_nodes < 2)
        throw ValidationError("network needs at least 2 nodes, got " +
                              std::to_string(net.num_nodes));
    std::set<std::pair<NodeId, NodeId>> seen;
    for (std::size_t i = 0; i < net.edges.size(); ++i) {
        const Edge& e = net.edges[i];
        const std::string where = "edge #" + std::to_string(i) + " (" +
                                  std::to_string(e.from) + "->" +
                                  std::to_string(e.to) + ")";
        if (e.from < 0 || e.from >= net.num_nodes || e.to < 0 ||
            e.to >= net.num_nodes)
            throw ValidationError(where + ": node id out of range [0, " +
                                  std::to_string(net.num_nodes - 1) + "]");
        if (e.from == e.to)
            throw ValidationError(where + ": self loop");
        if (!seen.insert({e.from, e.to}).second)
            throw ValidationError(where + ": duplicate directed edge");
        if (!std::isfinite(e.gain.real()) || !std::isfinite(e.gain.imag()))
            throw ValidationError(where + ": non-finite gain");
        if (e.gain == ComplexGain{0.0, 0.0})
            throw ValidationError(where + ": zero gain");
    }
    bool src_out = false, dst_in = false;
    for (const Edge& e : net.edges) {
        src_out |= (e.from == net.source());
        dst_in |= (e.to == net.destination());
    }
    if (!src_out)
        throw ValidationError("source node 0 has no outgoing edge");
    if (!dst_in)
        throw ValidationError("destination node " +
                              std::to_string(net.destination()) +
                              " has no incoming edge");
}

GaussianNetwork make_network(int num_nodes, std::vector<Edge> edges) {
    GaussianNetwork net{num_nodes, std::move(edges)};
    validate_network(net);
    return net;
}

namespace {

double parse_component(const json& v, double strong_gain, const char* name,
                       std::size_t idx) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf") return strong_gain;
        if (s == "-inf") return -strong_gain;
    }
    throw ValidationError("edge #" + std::to_string(idx) + ": field '" + name +
                          "' must be a number or \"inf\"/\"-inf\"");
}

}  // namespace

GaussianNetwork parse_network(const std::string& json_text,
                              double strong_gain) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("network JSON parse error: ") +
                              e.what());
    }
    if (!j.is_object() || !j.contains("nodes") || !j.contains("edges"))
        throw ValidationError(
            "network JSON must be an object with 'nodes' and 'edges'");
    if (!j["nodes"].is_number_integer())
        throw ValidationError("'nodes' must be an integer");
    GaussianNetwork net;
    net.num_nodes = j["nodes"].get<int>();
    if (!j["edges"].is_array())
        throw ValidationError("'edges' must be an array");
    std::size_t idx = 0;
    for (const json& je : j["edges"]) {
        for (const char* key : {"from", "to", "re", "im"})
            if (!je.contains(key))
                throw ValidationError("edge #" + std::to_string(idx) +
                                      ": missing field '" + key + "'");
        Edge e;
        e.from = je["from"].get<NodeId>();
        e.to = je["to"].get<NodeId>();
        e.gain = ComplexGain(parse_component(je["re"], strong_gain, "re", idx),
                             parse_component(je["im"], strong_gain, "im", idx));
        net.edges.push_back(e);
        ++idx;
    }
    validate_network(net);
    return net;
}

GaussianNetwork load_network(const std::string& path, double strong_gain) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open network file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_network(ss.str(), strong_gain);
}

std::string network_to_json(const GaussianNetwork& net) {
    json j;
    j["nodes"] = net.num_nodes;
    j["edges"] = json::array();
    for (const Edge& e : net.edges)
        j["edges"].push_back({{"from", e.from},
                              {"to", e.to},
                              {"re", e.gain.real()},
                              {"im", e.gain.imag()}});
    return j.dump(2);
}

void save_network(const GaussianNetwork& net, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write network file: " + path);
    out << network_to_json(net) << '\n';
}

std::vector<Edge> in_edges(const GaussianNetwork& net, NodeId node) {
    std::vector<Edge> r;
    for (const Edge& e : net.edges)
        if (e.to == node) r.push_back(e);
    return r;
}

std::vector<Edge> out_edges(const GaussianNetwork& net, NodeId node) {
    std::vector<Edge> r;
    for (const Edge& e : net.edges)
        if (e.from == node) r.push_back(e);
    return r;
}

std::vector<NodeId> Cut::omega() const {
    std::vector<NodeId> r;
    for (NodeId v = 0; v < num_nodes; ++v)
        if (in_omega(v)) r.push_back(v);
    return r;
}

std::vector<NodeId> Cut::omega_c() const {
    std::vector<NodeId> r;
    for (NodeId v = 0; v < num_nodes; ++v)
        if (!in_omega(v)) r.push_back(v);
    return r;
}

Cut make_cut(int num_nodes, std::uint32_t omega_mask) {
    if (num_nodes > 32)
        throw CapacityError("cut bitmask supports at most 32 nodes");
    if (!(omega_mask & 1u))
        throw ValidationError("cut must contain the source (bit 0)");
    if ((omega_mask >> (num_nodes - 1)) & 1u)
        throw ValidationError("cut must not contain the destination");
    if (num_nodes < 32 && (omega_mask >> num_nodes) != 0)
        throw ValidationError("cut bitmask has bits beyond the node range");
    return Cut{omega_mask, num_nodes};
}

Cut make_cut(const GaussianNetwork& net, std::uint32_t omega_mask) {
    return make_cut(net.num_nodes, omega_mask);
}

std::vector<Cut> enumerate_cuts(int num_nodes) {
    const int relays = num_nodes - 2;
    if (relays > 24)
        throw CapacityError("refusing to enumerate 2^" +
                            std::to_string(relays) + " cuts (limit 2^24)");
    std::vector<Cut> cuts;
    cuts.reserve(std::size_t{1} << relays);
    for (std::uint32_t m = 0; m < (std::uint32_t{1} << relays); ++m)
        cuts.push_back(Cut{1u | (m << 1), num_nodes});
    return cuts;
}

std::vector<Cut> enumerate_cuts(const GaussianNetwork& net) {
    return enumerate_cuts(net.num_nodes);
}

std::vector<Edge> crossing_edges(const GaussianNetwork& net, const Cut& cut) {
    std::vector<Edge> r;
    for (const Edge& e : net.edges)
        if (cut.in_omega(e.from) && !cut.in_omega(e.to)) r.push_back(e);
    return r;
}

}  // namespace relnet

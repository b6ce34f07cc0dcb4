#include "relnet/cutbounds.hpp"

#include <charconv>
#include <cmath>
#include <map>

#include <Eigen/SVD>
#include <json.hpp>

#include "relnet/bitmatrix.hpp"
#include "relnet/infotheory.hpp"

namespace relnet {

using nlohmann::json;

const char* model_name(Model m) {
    switch (m) {
        case Model::gaussian: return "gaussian";
        case Model::ld: return "ld";
        case Model::ds: return "ds";
    }
    throw std::logic_error("unreachable model tag");
}

Model parse_model(const std::string& s) {
    if (s == "gaussian") return Model::gaussian;
    if (s == "ld") return Model::ld;
    if (s == "ds") return Model::ds;
    throw ValidationError("unknown model '" + s +
                          "' (expected gaussian, ld or ds)");
}

namespace {

// how a report names its value; the gaussian engine computes the iid-input
// weakening of the cut-set bound, not the supremum over input laws
const char* model_label(Model m) {
    switch (m) {
        case Model::gaussian: return "iid-Gaussian cut bound";
        case Model::ld: return "min-cut rank capacity";
        case Model::ds: return "product-input cut capacity";
    }
    throw std::logic_error("unreachable model tag");
}

void check_cut(int num_nodes, const Cut& cut, const char* what) {
    if (cut.num_nodes != num_nodes)
        throw ValidationError(std::string(what) + ": cut was built for " +
                              std::to_string(cut.num_nodes) +
                              " nodes, network has " +
                              std::to_string(num_nodes));
}

// min over cuts, first attaining cut wins ties (reproducible reports)
template <class F>
BoundReport min_report(const std::vector<Cut>& cuts, F&& value_of) {
    BoundReport rep;
    rep.per_cut.reserve(cuts.size());
    for (const Cut& c : cuts) rep.per_cut.push_back(value_of(c));
    rep.min_cut = rep.per_cut.front().cut;
    rep.bound_bits = rep.per_cut.front().value_bits;
    for (const CutValue& cv : rep.per_cut) {
        if (cv.value_bits < rep.bound_bits) {
            rep.bound_bits = cv.value_bits;
            rep.min_cut = cv.cut;
        }
    }
    return rep;
}

std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

Eigen::MatrixXcd cut_gain_matrix(const GaussianNetwork& net, const Cut& cut) {
    check_cut(net.num_nodes, cut, "cut_gain_matrix");
    const std::vector<NodeId> rx = cut.omega_c();  // rows, ascending
    const std::vector<NodeId> tx = cut.omega();    // cols, ascending
    std::vector<int> row(net.num_nodes, -1), col(net.num_nodes, -1);
    for (std::size_t i = 0; i < rx.size(); ++i) row[rx[i]] = int(i);
    for (std::size_t j = 0; j < tx.size(); ++j) col[tx[j]] = int(j);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(Eigen::Index(rx.size()),
                                                Eigen::Index(tx.size()));
    for (const Edge& e : net.edges)
        if (cut.in_omega(e.from) && !cut.in_omega(e.to))
            h(row[e.to], col[e.from]) = e.gain;
    return h;
}

CutValue gaussian_cut_value(const GaussianNetwork& net, const Cut& cut) {
    const Eigen::MatrixXcd h = cut_gain_matrix(net, cut);
    double v = 0.0;
    if (h.rows() > 0 && h.cols() > 0) {
        // log2 det(I + H H*) = sum log2(1 + sigma^2); the svd route never
        // squares the matrix, so gains near 2^30 stay well conditioned
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
        const auto& s = svd.singularValues();
        for (Eigen::Index i = 0; i < s.size(); ++i)
            v += std::log2(1.0 + s[i] * s[i]);
    }
    if (!std::isfinite(v))
        throw NumericError("gaussian cut value is not finite for cut mask " +
                           std::to_string(cut.omega_mask));
    return {cut, v, Model::gaussian};
}

BoundReport gaussian_cutset_bound(const GaussianNetwork& net) {
    return min_report(enumerate_cuts(net), [&](const Cut& c) {
        return gaussian_cut_value(net, c);
    });
}

CutValue ld_cut_value(const LinearDeterministicNetwork& ldnet, const Cut& cut) {
    check_cut(ldnet.num_nodes, cut, "ld_cut_value");
    const int r = rank_gf2(cut_transfer_matrix_ld(ldnet, cut));
    return {cut, double(r), Model::ld};
}

BoundReport ld_capacity(const LinearDeterministicNetwork& ldnet) {
    return min_report(enumerate_cuts(ldnet.num_nodes), [&](const Cut& c) {
        return ld_cut_value(ldnet, c);
    });
}

CutValue ds_cut_value(const DiscreteSuperpositionNetwork& dsnet,
                      const Cut& cut) {
    check_cut(dsnet.num_nodes, cut, "ds_cut_value");
    const int n = dsnet.n;
    const std::vector<NodeId> receivers = cut.omega_c();

    // crossing senders drive the histogram; omega_c senders that also feed
    // an omega_c receiver only shift the output by a constant, but they are
    // still charged by the admission test below
    std::vector<char> crossing(dsnet.num_nodes, 0), shifting(dsnet.num_nodes, 0);
    for (const DiscreteSuperpositionEdge& e : dsnet.edges)
        if (!cut.in_omega(e.to))
            (cut.in_omega(e.from) ? crossing : shifting)[e.from] = 1;
    std::vector<NodeId> cross, shift;
    for (NodeId v = 0; v < dsnet.num_nodes; ++v) {
        if (crossing[v]) cross.push_back(v);
        if (shifting[v]) shift.push_back(v);
    }

    const long exponent = 2L * n * long(cross.size() + shift.size());
    if (exponent > 26)
        throw CapacityError("ds cut enumeration needs 2^" +
                            std::to_string(exponent) +
                            " input tuples (limit 2^26)");

    // pin every non-enumerated sender to input zero: that realizes one
    // conditioning value, and all conditioning values share the entropy
    std::map<NodeId, DSInput> inputs;
    for (NodeId v : shift) inputs[v] = DSInput{0, 0};
    for (NodeId v : cross) inputs[v] = DSInput{0, 0};
    std::vector<std::map<NodeId, DSInput>::iterator> slot;
    for (NodeId v : cross) slot.push_back(inputs.find(v));

    const std::uint64_t comp_mask = (std::uint64_t{1} << n) - 1;
    const std::uint64_t total = std::uint64_t{1} << (2 * n * int(cross.size()));
    std::map<std::vector<std::int64_t>, std::uint64_t> hist;
    std::vector<std::int64_t> key(2 * receivers.size());
    for (std::uint64_t t = 0; t < total; ++t) {
        std::uint64_t rest = t;
        for (auto& it : slot) {
            it->second.re_bits = std::int64_t(rest & comp_mask);
            it->second.im_bits = std::int64_t((rest >> n) & comp_mask);
            rest >>= 2 * n;
        }
        for (std::size_t i = 0; i < receivers.size(); ++i) {
            const GaussianInteger y = ds_transmit(dsnet, receivers[i], inputs);
            key[2 * i] = y.re;
            key[2 * i + 1] = y.im;
        }
        ++hist[key];
    }

    std::vector<std::uint64_t> counts;
    counts.reserve(hist.size());
    for (const auto& kv : hist) counts.push_back(kv.second);
    return {cut, entropy_from_counts(counts), Model::ds};
}

BoundReport ds_cutset_bound(const DiscreteSuperpositionNetwork& dsnet) {
    return min_report(enumerate_cuts(dsnet.num_nodes), [&](const Cut& c) {
        return ds_cut_value(dsnet, c);
    });
}

std::string report_to_json(const BoundReport& report) {
    if (report.per_cut.empty())
        throw std::invalid_argument("report has no cuts");
    const Model m = report.per_cut.front().model;
    json j;
    j["model"] = model_name(m);
    j["label"] = model_label(m);
    j["num_nodes"] = report.min_cut.num_nodes;
    j["bound_bits"] = report.bound_bits;
    j["min_cut_bitmask"] = report.min_cut.omega_mask;
    json cuts = json::array();
    for (const CutValue& cv : report.per_cut)
        cuts.push_back(json{{"cut_bitmask", cv.cut.omega_mask},
                            {"value_bits", cv.value_bits}});
    j["per_cut"] = std::move(cuts);
    return j.dump(2) + "\n";
}

std::string report_to_csv(const BoundReport& report) {
    if (report.per_cut.empty())
        throw std::invalid_argument("report has no cuts");
    std::string out = "cut_bitmask,model,value_bits\n";
    for (const CutValue& cv : report.per_cut) {
        out += std::to_string(cv.cut.omega_mask);
        out += ',';
        out += model_name(cv.model);
        out += ',';
        out += fmt_double(cv.value_bits);
        out += '\n';
    }
    return out;
}

}  // namespace relnet

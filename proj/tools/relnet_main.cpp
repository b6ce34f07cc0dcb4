// relnet: deterministic reductions, cut-set bounds, and reduction
// certificates for layered relay networks.
//
//   relnet reduce --model ld|ds <network.json>
//   relnet bound --model gaussian|ld|ds <network.json>
//   relnet verify-theorem --matrix <json> [--n <bits>] [--samples <N>]
//   relnet exp counterexample|positive-gains|mimo
//
// global flags: --seed, --inf-gain, --out, --format csv|json. The exit
// code is 0 only when every property the invoked command asserts holds.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "relnet/cutbounds.hpp"
#include "relnet/experiments.hpp"
#include "relnet/network.hpp"
#include "relnet/reduction.hpp"
#include "relnet/theoremtrace.hpp"

using namespace relnet;
using nlohmann::json;

namespace {

void write_text(const std::string& path, const std::string& body) {
    if (path.empty() || path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << body;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// inline JSON (starts with '[') or a path to a file holding it; cells are
// numbers or [re, im] pairs
Eigen::MatrixXcd parse_matrix_arg(const std::string& arg) {
    if (arg.empty()) throw std::invalid_argument("empty matrix argument");
    const std::string text = (arg[0] == '[') ? arg : slurp(arg);
    const json j = json::parse(text);
    if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
        throw std::invalid_argument("matrix must be a JSON array of rows");
    const std::size_t rows = j.size(), cols = j[0].size();
    Eigen::MatrixXcd h(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw std::invalid_argument("matrix rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) {
            const json& cell = j[i][c];
            if (cell.is_number())
                h(i, c) = ComplexGain(cell.get<double>(), 0.0);
            else if (cell.is_array() && cell.size() == 2)
                h(i, c) = ComplexGain(cell[0].get<double>(),
                                      cell[1].get<double>());
            else
                throw std::invalid_argument(
                    "matrix cells must be numbers or [re, im] pairs");
        }
    }
    return h;
}

std::string ld_to_text(const LinearDeterministicNetwork& ld,
                       const std::string& format) {
    if (format == "json") {
        json edges = json::array();
        for (const LinearDeterministicEdge& e : ld.edges)
            edges.push_back(
                {{"from", e.from}, {"to", e.to}, {"levels", e.levels}});
        return json{{"model", "ld"},
                    {"nodes", ld.num_nodes},
                    {"q", ld.q},
                    {"edges", std::move(edges)}}
                   .dump(2) +
               "\n";
    }
    std::ostringstream out;
    out << "# model: ld\n# nodes: " << ld.num_nodes << "\n# q: " << ld.q
        << "\nfrom,to,levels\n";
    for (const LinearDeterministicEdge& e : ld.edges)
        out << e.from << "," << e.to << "," << e.levels << "\n";
    return out.str();
}

std::string ds_to_text(const DiscreteSuperpositionNetwork& ds,
                       const std::string& format) {
    if (format == "json") {
        json edges = json::array();
        for (const DiscreteSuperpositionEdge& e : ds.edges)
            edges.push_back({{"from", e.from},
                             {"to", e.to},
                             {"qgain", {e.qgain.re, e.qgain.im}}});
        return json{{"model", "ds"},
                    {"nodes", ds.num_nodes},
                    {"n", ds.n},
                    {"edges", std::move(edges)}}
                   .dump(2) +
               "\n";
    }
    std::ostringstream out;
    out << "# model: ds\n# nodes: " << ds.num_nodes << "\n# n: " << ds.n
        << "\nfrom,to,qgain_re,qgain_im\n";
    for (const DiscreteSuperpositionEdge& e : ds.edges)
        out << e.from << "," << e.to << "," << e.qgain.re << ","
            << e.qgain.im << "\n";
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "deterministic reductions, cut-set bounds, and reduction "
        "certificates for layered relay networks"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    double inf_gain = kDefaultStrongGain;
    std::string out_path = "-";
    std::string format = "json";
    app.add_option("--seed", seed, "sampling seed recorded in provenance");
    app.add_option("--inf-gain", inf_gain,
                   "finite stand-in gain for links marked \"inf\"");
    app.add_option("--out", out_path, "output path, '-' for stdout");
    app.add_option("--format", format, "report format")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* reduce = app.add_subcommand(
        "reduce", "quantize a Gaussian network into a deterministic model");
    reduce->fallthrough();
    std::string reduce_model, reduce_path;
    reduce->add_option("--model", reduce_model, "target model")
        ->required()
        ->check(CLI::IsMember({"ld", "ds"}));
    reduce->add_option("network", reduce_path, "network JSON file")
        ->required();

    auto* bound = app.add_subcommand(
        "bound", "cut-set bound of a network in one of the three models");
    bound->fallthrough();
    std::string bound_model, bound_path;
    bound->add_option("--model", bound_model, "evaluation model")
        ->required()
        ->check(CLI::IsMember({"gaussian", "ld", "ds"}));
    bound->add_option("network", bound_path, "network JSON file")->required();

    auto* verify = app.add_subcommand(
        "verify-theorem",
        "certify the bounded-loss reduction chain on one cut matrix "
        "(output is always JSON)");
    verify->fallthrough();
    std::string verify_matrix;
    int verify_n = 0;
    std::uint64_t verify_samples = 200000;
    verify
        ->add_option("--matrix", verify_matrix,
                     "cut matrix as inline JSON rows or a file path; "
                     "[re, im] cells run through the real expansion")
        ->required();
    verify->add_option("--n", verify_n,
                       "grid resolution in bits (default: derived)");
    verify->add_option("--samples", verify_samples, "samples per estimate");

    auto* exp = app.add_subcommand("exp", "run a packaged experiment");
    exp->require_subcommand(1);
    exp->fallthrough();

    auto* ce = exp->add_subcommand(
        "counterexample",
        "sweep where the deterministic-model gap grows like 2k");
    ce->fallthrough();
    int ce_kmin = 1, ce_kmax = 14;
    ce->add_option("--k-min", ce_kmin, "first exponent");
    ce->add_option("--k-max", ce_kmax, "last exponent");

    auto* pg = exp->add_subcommand(
        "positive-gains",
        "paired sweep with one deterministic image and diverging bounds");
    pg->fallthrough();
    int pg_kmin = 3, pg_kmax = 12;
    pg->add_option("--k-min", pg_kmin, "first exponent");
    pg->add_option("--k-max", pg_kmax, "last exponent");

    auto* mimo = exp->add_subcommand(
        "mimo", "two-antenna bank evaluated in all three models");
    mimo->fallthrough();
    double mimo_h = 16.0;
    std::string mimo_matrix;
    int mimo_n_override = 0;
    double mimo_threshold = 6.0;
    mimo->add_option("--gain", mimo_h, "bank strength h for [[h,-h],[h,h]]");
    mimo->add_option("--matrix", mimo_matrix,
                     "explicit bank matrix (overrides --h)");
    mimo->add_option("--n-override", mimo_n_override,
                     "force the superposition resolution");
    mimo->add_option("--ld-gap-threshold", mimo_threshold,
                     "asserted lower bound on gaussian - ld");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*reduce) {
            const GaussianNetwork net = load_network(reduce_path, inf_gain);
            write_text(out_path, reduce_model == "ld"
                                     ? ld_to_text(ld_reduce(net), format)
                                     : ds_to_text(ds_reduce(net), format));
            return 0;
        }
        if (*bound) {
            const GaussianNetwork net = load_network(bound_path, inf_gain);
            BoundReport rep;
            if (bound_model == "gaussian")
                rep = gaussian_cutset_bound(net);
            else if (bound_model == "ld")
                rep = ld_capacity(ld_reduce(net));
            else
                rep = ds_cutset_bound(ds_reduce(net));
            write_text(out_path, format == "csv" ? report_to_csv(rep)
                                                 : report_to_json(rep));
            return 0;
        }
        if (*verify) {
            const Eigen::MatrixXcd hc = parse_matrix_arg(verify_matrix);
            const Eigen::MatrixXd h = hc.imag().isZero(0.0)
                                          ? Eigen::MatrixXd(hc.real())
                                          : complex_to_real_expand(hc);
            const int n = verify_n > 0 ? verify_n : chain_bit_depth(h);
            const ForwardChainResult fwd =
                ds_forward_chain(h, n, verify_samples, seed);
            json out = json::parse(forward_chain_to_json(fwd));
            bool certified = fwd.holds;
            try {
                const SampleBoundReport sb = verify_sample_bounds(fwd.trace);
                out["sample_bounds"] = json::parse(sample_bounds_to_json(sb));
            } catch (const CertificationError& e) {
                out["sample_bounds"] = {{"violation", e.what()}};
                certified = false;
            }
            out["certified"] = certified;
            write_text(out_path, out.dump(2) + "\n");
            return certified ? 0 : 1;
        }

        ExperimentOptions opt;
        opt.seed = seed;
        opt.inf_gain = inf_gain;
        ExperimentReport rep;
        if (ce->parsed()) {
            rep = exp_counterexample(ce_kmin, ce_kmax, opt);
        } else if (pg->parsed()) {
            rep = exp_positive_gains(pg_kmin, pg_kmax, opt);
        } else {
            Eigen::MatrixXcd bank;
            if (!mimo_matrix.empty()) {
                bank = parse_matrix_arg(mimo_matrix);
            } else {
                bank.resize(2, 2);
                bank << ComplexGain{mimo_h, 0}, ComplexGain{-mimo_h, 0},
                    ComplexGain{mimo_h, 0}, ComplexGain{mimo_h, 0};
            }
            rep = exp_mimo(bank, mimo_n_override, mimo_threshold, opt);
        }
        emit_report(rep, format, out_path);
        return rep.holds ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

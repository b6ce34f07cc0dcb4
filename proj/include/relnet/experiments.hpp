#pragma once

// Headline experiment drivers over the cut-bound engines: the unbounded
// deterministic-model gap on a two-layer network, the positive-gain pair
// sharing one deterministic image, and the two-antenna bank where only
// the superposition model tracks the Gaussian value. Reports carry fixed
// columns, named checks, and a provenance block, and serialize to CSV or
// JSON losslessly; superposition cells outside the enumeration budget are
// marked "n/a (budget)" rather than estimated.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "relnet/network.hpp"

namespace relnet {

// six-node layered network: the source feeds two relays over links of
// gain `strong`, middle(i, j) connects first-layer relay j+1 to
// second-layer relay i+3, and both second-layer relays reach the
// destination over `strong` links again
GaussianNetwork two_layer_network(const Eigen::Matrix2cd& middle,
                                  double strong = kDefaultStrongGain);

// k senders wired straight into m receivers with gains bank(i, j) from
// sender j to receiver i; the last receiver is the destination, so the
// cut keeping exactly the senders is the whole channel. zero entries are
// omitted from the edge list
GaussianNetwork bank_network(const Eigen::MatrixXcd& bank);

// the sender-side cut of bank_network(bank): mask 2^k - 1
Cut bank_cut(const Eigen::MatrixXcd& bank);

struct ExperimentProvenance {
    std::uint64_t seed = 0;
    double inf_gain = kDefaultStrongGain;
    std::string truncation = "trunc-toward-zero";
    std::string prng;
};

struct ExperimentCheck {
    std::string name;
    bool pass = false;
};

// one table per experiment: fixed columns, one row per grid point, nan
// cells meaning "n/a (budget)", and named checks whose conjunction is
// `holds`
struct ExperimentReport {
    std::string id;
    std::vector<std::string> notes;  // single-line header notes
    ExperimentProvenance provenance;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<ExperimentCheck> checks;
    bool holds = false;
};

struct ExperimentOptions {
    std::uint64_t seed = 0;
    double inf_gain = kDefaultStrongGain;
};

// sweep h = 2^k over [k_min, k_max] on the two-layer network with middle
// matrix [[h, -h], [h, h]];
// columns k, gaussian_bits, ld_bits, ds_bits, gap_bits with
// gap = gaussian - ld. Checks: |gap - 2k| <= 3 at every k, gap strictly
// increasing, least-squares slope within 2 +/- 0.5 on the window
// [max(4, k_min), min(14, k_max)] when it has two or more points, and the
// minimizing cuts never cross a link of gain >= inf_gain
ExperimentReport exp_counterexample(int k_min, int k_max,
                                    const ExperimentOptions& opt = {});

// paired sweep on the same topology: network A has middle
// [[h, h],[h, 1.4h]], network B has [[h, h],[h, h]], h = 2^k. Checks: the
// two deterministic reductions are field-identical at every k,
// |gaussian_a - 4k| <= 4, |gaussian_b - 2k| <= 4, B's middle matrix has
// rank one, and the minimizing cuts avoid strong links. The construction
// note in the report header carries the hand proof
ExperimentReport exp_positive_gains(int k_min, int k_max,
                                    const ExperimentOptions& opt = {});

// evaluate the single sender-side cut of a bank network (at most 2x2) in
// all three models; n_override > 0 replaces the derived superposition
// resolution. Checks: gaussian - ld > ld_gap_threshold, and the
// superposition value lies in [gaussian - 15, gaussian + 28]
ExperimentReport exp_mimo(const Eigen::MatrixXcd& bank, int n_override = 0,
                          double ld_gap_threshold = 6.0,
                          const ExperimentOptions& opt = {});

std::string report_to_json(const ExperimentReport& report);
std::string report_to_csv(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);
ExperimentReport report_from_csv(const std::string& text);

// true when every gap column equals the difference of its source columns
// cell for cell (nan matching nan)
bool gap_columns_consistent(const ExperimentReport& report);

// write in the named format ("csv" or "json"); path "-" means stdout
void emit_report(const ExperimentReport& report, const std::string& format,
                 const std::string& path);

}  // namespace relnet

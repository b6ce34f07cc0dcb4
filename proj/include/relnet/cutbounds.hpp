#pragma once

// Cut-set bound engines for the three channel models.
//
// gaussian: log2 det(I + H H*) per cut with iid Gaussian inputs. This is a
//   deliberate weakening of the information-theoretic cut-set bound (it
//   skips the supremum over input distributions), so reports label it
//   "iid-Gaussian cut bound".
// ld: GF(2) rank of the cut transfer matrix; the minimum over cuts is the
//   exact capacity of the linear deterministic model.
// ds: exact conditional output entropy of the cut under independent uniform
//   inputs, by enumeration. The minimum over cuts is reported as the model
//   capacity per the cited achievability of product distributions.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "relnet/network.hpp"
#include "relnet/reduction.hpp"

namespace relnet {

// thrown when a floating-point computation produced a non-finite value
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Model { gaussian, ld, ds };

const char* model_name(Model m);          // "gaussian" | "ld" | "ds"
Model parse_model(const std::string& s);  // inverse, throws ValidationError

struct CutValue {
    Cut cut;
    double value_bits = 0.0;  // always >= 0; an integer when model == ld
    Model model = Model::gaussian;
};

struct BoundReport {
    std::vector<CutValue> per_cut;  // cut enumeration order
    Cut min_cut;                    // first cut attaining the minimum
    double bound_bits = 0.0;
};

// complex gain matrix across the cut: one row per receiver (omega_c,
// ascending id), one column per sender (omega, ascending id), zero where
// the network has no edge
Eigen::MatrixXcd cut_gain_matrix(const GaussianNetwork& net, const Cut& cut);

// log2 det(I + H H*) via singular values of H; never forms the raw
// determinant (gains up to 2^30 appear squared). Throws NumericError naming
// the cut if the result is not finite.
CutValue gaussian_cut_value(const GaussianNetwork& net, const Cut& cut);
BoundReport gaussian_cutset_bound(const GaussianNetwork& net);

CutValue ld_cut_value(const LinearDeterministicNetwork& ldnet, const Cut& cut);
BoundReport ld_capacity(const LinearDeterministicNetwork& ldnet);

// Exact I(X_omega; Y_omega_c | X_omega_c) with every node sending an
// independent uniform n-bit dyadic pair. Outputs are deterministic, so this
// equals H(Y_omega_c | X_omega_c); and conditioning fixes the omega_c
// senders' contribution to an additive constant, so every conditioning
// value yields the same entropy and one histogram over the crossing
// senders' inputs suffices. The admission test still budgets for the
// conditioning senders: with S the crossing senders and T the omega_c
// senders with an edge into omega_c, it requires
// 2^(2n(|S|+|T|)) <= 2^26, else CapacityError with the computed size.
CutValue ds_cut_value(const DiscreteSuperpositionNetwork& dsnet, const Cut& cut);
BoundReport ds_cutset_bound(const DiscreteSuperpositionNetwork& dsnet);

// serialization; float formatting is shortest-round-trip and deterministic.
// csv columns: cut_bitmask, model, value_bits
std::string report_to_json(const BoundReport& report);
std::string report_to_csv(const BoundReport& report);

}  // namespace relnet

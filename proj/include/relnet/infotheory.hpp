#pragma once

// Entropy and mutual-information computations: discrete entropy, integer
// coarsenings of the standard normal, the closed-form Gaussian-input MI of
// a cut matrix, and a Monte Carlo MI estimator for discrete inputs on an
// AWGN cut. Everything is in bits (base-2 logs).

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace relnet {

struct Pmf {
    std::vector<std::int64_t> labels;
    std::vector<double> probs;
};

struct MIEstimate {
    double value_bits = 0.0;
    double std_error_bits = 0.0;  // 0 for exact methods
    std::string method;           // "exact" | "quadrature" | "monte-carlo"
    std::string prng;             // algorithm name for monte-carlo, else ""
};

// -sum p log2 p with 0 log 0 = 0; throws if probabilities are negative or
// do not sum to 1 within 1e-9
double discrete_entropy(const Pmf& p);

// entropy of a positive count histogram (exact rational weights c / total)
double entropy_from_counts(const std::vector<std::uint64_t>& counts);

// standard normal cdf
double normal_cdf(double t);

// law of sign(X) * floor(|X|) for X ~ N(0,1), labels -max_k .. max_k with
// the tails folded into the extreme labels; requires max_k >= 10
Pmf normal_integer_part_pmf(int max_k = 40);

// law of floor(X) for X ~ N(0,1), same folding convention
Pmf normal_floor_pmf(int max_k = 40);

// P(frac-part variable of a standard normal lies in [a, b)), where the
// variable is X - sign(X)*floor(|X|), supported on (-1, 1); requires
// -1 <= a <= b <= 1
double frac_normal_mass(double a, double b);

// closed-form MI of Y = HX + Z with X iid unit Gaussian and unit-variance
// noise: real convention (1/2) log2 det(I + H H^t), complex convention
// log2 det(I + H H^dag). Computed from singular values.
double gaussian_mi_closed_form(const Eigen::MatrixXd& H);
double gaussian_mi_closed_form(const Eigen::MatrixXcd& H);

// one sender's finite real input alphabet
struct DiscreteDist {
    std::vector<double> values;
    std::vector<double> probs;
};

// Monte Carlo estimate of I(X; Y) for Y = H X + Z, X a product of finite
// real alphabets, Z iid N(0, noise_var) per receiver. h(Y) is averaged
// over samples against the exact Gaussian-mixture density, so the
// estimator carries sampling error only. Deterministic given the seed and
// independent of thread count. Requires samples >= 10^4. The general path
// requires a product alphabet of at most 2^20 points; two-sender
// two-receiver inputs instead factorize the mixture and accept up to 2^16
// points per sender.
MIEstimate mimo_mi_discrete_input(const Eigen::MatrixXd& H,
                                  const std::vector<DiscreteDist>& inputs,
                                  double noise_var, std::int64_t samples,
                                  std::uint64_t seed);

// same estimator with an explicit joint law over input vectors
MIEstimate mimo_mi_discrete_joint(const Eigen::MatrixXd& H,
                                  const std::vector<Eigen::VectorXd>& points,
                                  const std::vector<double>& probs,
                                  double noise_var, std::int64_t samples,
                                  std::uint64_t seed);

}  // namespace relnet

#include "relnet/infotheory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "relnet/network.hpp"
#include "relnet/rng.hpp"

namespace relnet {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void check_probs(const std::vector<double>& probs, const char* what) {
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= -1e-15) || !std::isfinite(p))
            throw std::invalid_argument(std::string(what) +
                                        ": negative or non-finite probability");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw std::invalid_argument(std::string(what) +
                                    ": probabilities sum to " +
                                    std::to_string(sum));
}

double entropy_bits(const std::vector<double>& probs) {
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

// deterministic block-parallel mean/stderr of f(sample_index) over n samples
template <typename F>
std::pair<double, double> mc_mean(std::int64_t n, F&& f) {
    constexpr std::int64_t kBlock = 4096;
    const std::int64_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<double> s1(blocks, 0.0), s2(blocks, 0.0);
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::int64_t b = next.fetch_add(1);
            if (b >= blocks) return;
            const std::int64_t lo = b * kBlock;
            const std::int64_t hi = std::min(n, lo + kBlock);
            double a1 = 0.0, a2 = 0.0;
            for (std::int64_t s = lo; s < hi; ++s) {
                const double t = f(s);
                a1 += t;
                a2 += t * t;
            }
            s1[b] = a1;
            s2[b] = a2;
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned nt = unsigned(std::min<std::int64_t>(hw, blocks));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < nt; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    // merge in block order so the result never depends on scheduling
    double t1 = 0.0, t2 = 0.0;
    for (std::int64_t b = 0; b < blocks; ++b) {
        t1 += s1[b];
        t2 += s2[b];
    }
    const double mean = t1 / double(n);
    const double var =
        n > 1 ? std::max(0.0, (t2 - double(n) * mean * mean) / double(n - 1))
              : 0.0;
    return {mean, std::sqrt(var / double(n))};
}

int pick_component(const std::vector<double>& cdf, double u) {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return int(std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1));
}

std::vector<double> cumulative(const std::vector<double>& probs) {
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    return cdf;
}

double differential_noise_entropy(int m, double noise_var) {
    return 0.5 * double(m) *
           std::log2(2.0 * std::numbers::pi * std::numbers::e * noise_var);
}

// dense mixture: means as columns, weights strictly positive
MIEstimate mc_mixture_mi(const Eigen::MatrixXd& means,
                         const std::vector<double>& weights, double noise_var,
                         std::int64_t samples, std::uint64_t seed) {
    const int m = int(means.rows());
    const auto cdf = cumulative(weights);
    std::vector<double> logw(weights.size());
    for (std::size_t j = 0; j < weights.size(); ++j)
        logw[j] = std::log(weights[j]);
    const double sigma = std::sqrt(noise_var);

    auto one = [&](std::int64_t s) {
        SampleRng rng(seed, std::uint64_t(s));
        const int j = pick_component(cdf, rng.uniform());
        Eigen::VectorXd y = means.col(j);
        for (int r = 0; r < m; ++r) y[r] += sigma * rng.normal();
        // log-sum-exp over all components; the generating component keeps
        // the sum strictly positive
        double best = -std::numeric_limits<double>::infinity();
        thread_local std::vector<double> expo;
        expo.resize(weights.size());
        for (std::size_t c = 0; c < weights.size(); ++c) {
            const double d2 = (y - means.col(c)).squaredNorm();
            expo[c] = logw[c] - d2 / (2.0 * noise_var);
            best = std::max(best, expo[c]);
        }
        double acc = 0.0;
        for (double e : expo) acc += std::exp(e - best);
        const double logf = best + std::log(acc) -
                            0.5 * double(m) *
                                std::log(2.0 * std::numbers::pi * noise_var);
        return -logf / kLn2;
    };
    const auto [mean, se] = mc_mean(samples, one);
    return {mean - differential_noise_entropy(m, noise_var), se,
            "monte-carlo", kPrngName};
}

struct Atom {
    double center;     // coordinate along the perpendicular axis
    double par_shift;  // contribution along the parallel axis
    double logw;
    int index;
};

// factorized two-sender two-receiver mixture: rotate so sender 2 moves the
// output along one axis only, precompute its 1-D mixture on a grid, and
// sum over sender-1 atoms near the sample in the orthogonal coordinate
MIEstimate mc_mixture_mi_2x2(const Eigen::MatrixXd& H,
                             const DiscreteDist& in1, const DiscreteDist& in2,
                             double noise_var, std::int64_t samples,
                             std::uint64_t seed) {
    const double a = H(0, 0), b = H(0, 1), c = H(1, 0), d = H(1, 1);
    const double kappa = std::hypot(b, d);
    const double det = a * d - b * c;
    const double q = (a * b + c * d) / kappa;
    const double sigma = std::sqrt(noise_var);

    // sender-1 atoms sorted by their coordinate along the perpendicular axis
    std::vector<Atom> atoms1;
    for (std::size_t j = 0; j < in1.values.size(); ++j)
        if (in1.probs[j] > 0.0)
            atoms1.push_back({in1.values[j] * det / kappa,
                              q * in1.values[j], std::log(in1.probs[j]),
                              int(j)});
    std::sort(atoms1.begin(), atoms1.end(),
              [](const Atom& x, const Atom& y) { return x.center < y.center; });

    // 1-D mixture of sender 2 along the parallel axis, tabulated
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t j = 0; j < in2.values.size(); ++j) {
        if (in2.probs[j] <= 0.0) continue;
        lo = std::min(lo, kappa * in2.values[j]);
        hi = std::max(hi, kappa * in2.values[j]);
    }
    const double pad = 10.0 * sigma;
    const double step = sigma / 64.0;
    const double g0 = lo - pad;
    const std::size_t gn = std::size_t((hi + pad - g0) / step) + 2;
    std::vector<double> table(gn, 0.0);
    const double norm1d = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t j = 0; j < in2.values.size(); ++j) {
        if (in2.probs[j] <= 0.0) continue;
        const double center = kappa * in2.values[j];
        const std::size_t i_lo =
            std::size_t(std::max(0.0, (center - pad - g0) / step));
        const std::size_t i_hi =
            std::min(gn - 1, std::size_t((center + pad - g0) / step) + 1);
        for (std::size_t i = i_lo; i <= i_hi; ++i) {
            const double t = g0 + double(i) * step - center;
            table[i] +=
                in2.probs[j] * norm1d * std::exp(-t * t / (2.0 * noise_var));
        }
    }
    auto g_interp = [&](double t) {
        const double pos = (t - g0) / step;
        if (pos < 0.0 || pos >= double(gn - 1)) return 0.0;
        const std::size_t i = std::size_t(pos);
        const double frac = pos - double(i);
        return table[i] * (1.0 - frac) + table[i + 1] * frac;
    };

    const auto cdf1 = cumulative(in1.probs);
    const auto cdf2 = cumulative(in2.probs);
    const double window = 12.0 * sigma;
    const double log_norm_perp = std::log(norm1d);

    auto one = [&](std::int64_t s) {
        SampleRng rng(seed, std::uint64_t(s));
        const int j1 = pick_component(cdf1, rng.uniform());
        const int j2 = pick_component(cdf2, rng.uniform());
        const double x1 = in1.values[j1], x2 = in2.values[j2];
        const double y1 = a * x1 + b * x2 + sigma * rng.normal();
        const double y2 = c * x1 + d * x2 + sigma * rng.normal();
        const double yperp = (d * y1 - b * y2) / kappa;
        const double ypar = (b * y1 + d * y2) / kappa;

        const auto first = std::lower_bound(
            atoms1.begin(), atoms1.end(), yperp - window,
            [](const Atom& x, double v) { return x.center < v; });
        const auto last = std::upper_bound(
            atoms1.begin(), atoms1.end(), yperp + window,
            [](double v, const Atom& x) { return v < x.center; });
        double f = 0.0;
        bool saw_generator = false;
        for (auto it = first; it != last; ++it) {
            const double r = yperp - it->center;
            const double phi = norm1d * std::exp(-r * r / (2.0 * noise_var));
            f += std::exp(it->logw) * phi * g_interp(ypar - it->par_shift);
            saw_generator |= (it->index == j1);
        }
        if (!saw_generator || !(f > 0.0)) {
            // exact generating-tuple term: never lets the density vanish
            const double rp = yperp - x1 * det / kappa;
            const double rq = ypar - q * x1 - kappa * x2;
            const double gen =
                std::exp(std::log(in1.probs[j1]) + std::log(in2.probs[j2]) +
                         log_norm_perp + log_norm_perp -
                         rp * rp / (2.0 * noise_var) -
                         rq * rq / (2.0 * noise_var));
            if (!(f > 0.0))
                f = gen;
            else if (!saw_generator)
                f += gen;
        }
        return -std::log2(f);
    };
    const auto [mean, se] = mc_mean(samples, one);
    return {mean - differential_noise_entropy(2, noise_var), se,
            "monte-carlo", kPrngName};
}

}  // namespace

double discrete_entropy(const Pmf& p) {
    if (p.labels.size() != p.probs.size())
        throw std::invalid_argument("pmf labels and probabilities disagree");
    check_probs(p.probs, "pmf");
    return entropy_bits(p.probs);
}

double entropy_from_counts(const std::vector<std::uint64_t>& counts) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw std::invalid_argument("empty histogram");
    double acc = 0.0;
    for (auto c : counts)
        if (c > 0) acc += double(c) * std::log2(double(c));
    return std::log2(double(total)) - acc / double(total);
}

double normal_cdf(double t) {
    return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

Pmf normal_integer_part_pmf(int max_k) {
    if (max_k < 10)
        throw std::invalid_argument("normal_integer_part_pmf needs max_k >= 10");
    Pmf pmf;
    for (int k = -max_k; k <= max_k; ++k) {
        pmf.labels.push_back(k);
        double p;
        const int m = std::abs(k);
        if (m == 0)
            p = normal_cdf(1.0) - normal_cdf(-1.0);
        else if (m == max_k)
            p = 1.0 - normal_cdf(double(m));  // fold the tail
        else
            p = normal_cdf(double(m) + 1.0) - normal_cdf(double(m));
        pmf.probs.push_back(p);
    }
    return pmf;
}

Pmf normal_floor_pmf(int max_k) {
    if (max_k < 10)
        throw std::invalid_argument("normal_floor_pmf needs max_k >= 10");
    Pmf pmf;
    for (int k = -max_k; k <= max_k; ++k) {
        pmf.labels.push_back(k);
        double p;
        if (k == -max_k)
            p = normal_cdf(double(k) + 1.0);
        else if (k == max_k)
            p = 1.0 - normal_cdf(double(k));
        else
            p = normal_cdf(double(k) + 1.0) - normal_cdf(double(k));
        pmf.probs.push_back(p);
    }
    return pmf;
}

double frac_normal_mass(double a, double b) {
    if (!(a >= -1.0 && a <= b && b <= 1.0))
        throw std::invalid_argument("frac_normal_mass needs -1 <= a <= b <= 1");
    constexpr int kShifts = 40;
    auto positive_side = [&](double x, double y) {  // [x, y) inside [0, 1]
        double acc = 0.0;
        for (int k = 0; k <= kShifts; ++k)
            acc += normal_cdf(double(k) + y) - normal_cdf(double(k) + x);
        return acc;
    };
    auto negative_side = [&](double x, double y) {  // [x, y) inside [-1, 0]
        double acc = 0.0;
        for (int k = 0; k <= kShifts; ++k)
            acc += normal_cdf(y - double(k)) - normal_cdf(x - double(k));
        return acc;
    };
    double mass = 0.0;
    if (a < 0.0) mass += negative_side(a, std::min(b, 0.0));
    if (b > 0.0) mass += positive_side(std::max(a, 0.0), b);
    return mass;
}

double gaussian_mi_closed_form(const Eigen::MatrixXd& H) {
    if (H.size() == 0) return 0.0;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(H);
    double bits = 0.0;
    for (double s : svd.singularValues()) bits += std::log2(1.0 + s * s);
    return 0.5 * bits;
}

double gaussian_mi_closed_form(const Eigen::MatrixXcd& H) {
    if (H.size() == 0) return 0.0;
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H);
    double bits = 0.0;
    for (double s : svd.singularValues()) bits += std::log2(1.0 + s * s);
    return bits;
}

MIEstimate mimo_mi_discrete_input(const Eigen::MatrixXd& H,
                                  const std::vector<DiscreteDist>& inputs,
                                  double noise_var, std::int64_t samples,
                                  std::uint64_t seed) {
    if (!(noise_var > 0.0))
        throw std::invalid_argument("noise variance must be positive");
    if (samples < 10000)
        throw std::invalid_argument("at least 10^4 samples required");
    if (int(inputs.size()) != H.cols())
        throw std::invalid_argument("one input alphabet per sender required");
    std::size_t product = 1;
    for (const auto& in : inputs) {
        if (in.values.empty() || in.values.size() != in.probs.size())
            throw std::invalid_argument("malformed input alphabet");
        check_probs(in.probs, "input alphabet");
        product *= in.values.size();
    }

    constexpr std::size_t kDenseLimit = std::size_t{1} << 20;
    constexpr std::size_t kDensePreferred = 4096;
    const bool can_factorize =
        H.rows() == 2 && H.cols() == 2 &&
        std::hypot(H(0, 1), H(1, 1)) > 0.0 &&
        inputs[0].values.size() <= (std::size_t{1} << 16) &&
        inputs[1].values.size() <= (std::size_t{1} << 16);
    if (can_factorize && product > kDensePreferred)
        return mc_mixture_mi_2x2(H, inputs[0], inputs[1], noise_var, samples,
                                 seed);
    if (product > kDenseLimit)
        throw CapacityError("input alphabet too large: " +
                            std::to_string(product) + " > 2^20 points");

    // dense product mixture
    const int m = int(H.rows());
    Eigen::MatrixXd means(m, product);
    std::vector<double> weights(product);
    std::vector<std::size_t> idx(inputs.size(), 0);
    for (std::size_t j = 0; j < product; ++j) {
        Eigen::VectorXd x(H.cols());
        double w = 1.0;
        for (std::size_t s = 0; s < inputs.size(); ++s) {
            x[Eigen::Index(s)] = inputs[s].values[idx[s]];
            w *= inputs[s].probs[idx[s]];
        }
        means.col(Eigen::Index(j)) = H * x;
        weights[j] = w;
        for (std::size_t s = inputs.size(); s-- > 0;) {
            if (++idx[s] < inputs[s].values.size()) break;
            idx[s] = 0;
        }
    }
    // drop zero-probability tuples so logs stay finite
    std::vector<double> w2;
    Eigen::MatrixXd m2(m, product);
    Eigen::Index kept = 0;
    for (std::size_t j = 0; j < product; ++j) {
        if (weights[j] <= 0.0) continue;
        m2.col(kept) = means.col(Eigen::Index(j));
        w2.push_back(weights[j]);
        ++kept;
    }
    return mc_mixture_mi(m2.leftCols(kept), w2, noise_var, samples, seed);
}

MIEstimate mimo_mi_discrete_joint(const Eigen::MatrixXd& H,
                                  const std::vector<Eigen::VectorXd>& points,
                                  const std::vector<double>& probs,
                                  double noise_var, std::int64_t samples,
                                  std::uint64_t seed) {
    if (!(noise_var > 0.0))
        throw std::invalid_argument("noise variance must be positive");
    if (samples < 10000)
        throw std::invalid_argument("at least 10^4 samples required");
    if (points.empty() || points.size() != probs.size())
        throw std::invalid_argument("malformed joint distribution");
    if (points.size() > (std::size_t{1} << 20))
        throw CapacityError("joint alphabet too large: " +
                            std::to_string(points.size()) + " > 2^20 points");
    check_probs(probs, "joint distribution");
    const int m = int(H.rows());
    Eigen::MatrixXd means(m, points.size());
    std::vector<double> weights;
    Eigen::Index kept = 0;
    for (std::size_t j = 0; j < points.size(); ++j) {
        if (probs[j] <= 0.0) continue;
        if (points[j].size() != H.cols())
            throw std::invalid_argument("joint point dimension mismatch");
        means.col(kept) = H * points[j];
        weights.push_back(probs[j]);
        ++kept;
    }
    return mc_mixture_mi(means.leftCols(kept), weights, noise_var, samples,
                         seed);
}

}  // namespace relnet

#include "relnet/theoremtrace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Dense>
#include <json.hpp>

#include "relnet/rng.hpp"

namespace relnet {

using nlohmann::json;

namespace {

// floor-convention fractional part, in [0, 1)
double frac_floor(double t) { return t - std::floor(t); }

// cdf of the floor-convention fractional part of a unit normal at t
double floor_frac_cdf(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    // z - floor(z) < t means: signed frac in [0, t) for z >= 0, or signed
    // frac below t - 1 for z < 0
    return frac_normal_mass(0.0, t) + frac_normal_mass(-1.0, t - 1.0);
}

Eigen::MatrixXd truncate_gains(const Eigen::MatrixXd& h) {
    return h.unaryExpr([](double g) { return std::trunc(g); });
}

double entropy_of_masses(const std::map<std::vector<std::int64_t>, double>& m) {
    double acc = 0.0;
    for (const auto& kv : m)
        if (kv.second > 0.0) acc -= kv.second * std::log2(kv.second);
    return acc;
}

void check_chain_matrix(const Eigen::MatrixXd& h, int lo, int hi) {
    if (h.rows() < lo || h.rows() > hi || h.cols() < lo || h.cols() > hi)
        throw std::invalid_argument(
            "cut matrix must be between " + std::to_string(lo) + "x" +
            std::to_string(lo) + " and " + std::to_string(hi) + "x" +
            std::to_string(hi));
    if (!h.allFinite())
        throw std::invalid_argument("cut matrix has non-finite entries");
}

}  // namespace

DiscreteDist chain_input_dist(int n) {
    if (n < 1 || n > 16)
        throw std::invalid_argument("chain bit depth must be 1..16");
    const int cells = 1 << n;
    const double step = std::exp2(1 - n);  // cell width on [-1, 1)
    DiscreteDist d;
    d.values.reserve(cells);
    d.probs.reserve(cells);
    for (int j = 0; j < cells; ++j) {
        const double lo = -1.0 + j * step;
        d.values.push_back(double(j) * std::exp2(-n));  // shifted form
        d.probs.push_back(frac_normal_mass(lo, lo + step));
    }
    return d;
}

int chain_bit_depth(const Eigen::MatrixXd& h) {
    int n = 1;
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j)
            if (h(i, j) != 0.0)
                n = std::max(n, int(std::floor(std::log2(std::abs(h(i, j))))));
    return n;
}

ReductionTrace generate_trace(const Eigen::MatrixXd& h, int n,
                              std::uint64_t samples, std::uint64_t seed) {
    check_chain_matrix(h, 1, 8);
    if (n < 1 || n > 40) throw std::invalid_argument("bit depth must be 1..40");
    if (samples == 0) throw std::invalid_argument("need at least one sample");
    const int m = int(h.rows()), k = int(h.cols());
    const Eigen::MatrixXd hq = truncate_gains(h);
    const double scale = std::exp2(n), inv = std::exp2(-n);

    ReductionTrace trace;
    trace.gains = h;
    trace.n = n;
    trace.seed = seed;
    trace.records.reserve(std::size_t(std::min<std::uint64_t>(samples, kTraceRecordCap)));
    TraceSummary& sum = trace.summary;
    sum.samples = samples;
    sum.min_xtilde = std::numeric_limits<double>::infinity();
    sum.max_xtilde = -std::numeric_limits<double>::infinity();
    sum.vhat_min = sum.carry_min = sum.zhat_min = std::numeric_limits<int>::max();
    sum.vhat_max = sum.carry_max = sum.zhat_max = std::numeric_limits<int>::min();
    sum.sum_w.assign(m, 0.0);
    sum.sum_w_sq.assign(m, 0.0);

    TraceRecord rec;
    rec.x.resize(k);
    rec.xhat.resize(k);
    rec.xbar.resize(k);
    rec.xtilde.resize(k);
    rec.xdet.resize(k);
    rec.z.resize(m);
    rec.yprime.resize(m);
    rec.ybar.resize(m);
    rec.ytilde.resize(m);
    rec.ydet.resize(m);
    rec.eps.resize(m);
    rec.w.resize(std::size_t(m) * k);
    rec.v.resize(std::size_t(m) * k);
    rec.vhat.resize(std::size_t(m) * k);
    rec.zhat.resize(m);
    rec.carry.resize(m);

    auto flag = [&](std::uint64_t s, const std::string& what) {
        if (sum.first_violation_sample < 0) {
            sum.first_violation_sample = std::int64_t(s);
            sum.first_violation = "sample " + std::to_string(s) + ": " + what;
        }
    };

    for (std::uint64_t s = 0; s < samples; ++s) {
        SampleRng rng(seed, s);
        rec.sample = s;
        for (int j = 0; j < k; ++j) {
            const double x = rng.normal();
            const double xh = std::trunc(x);  // sign(x) * floor(|x|)
            const double xb = x - xh;
            const double xt = 0.5 * (xb + 1.0);
            rec.x[j] = x;
            rec.xhat[j] = xh;
            rec.xbar[j] = xb;
            rec.xtilde[j] = xt;
            rec.xdet[j] = std::floor(xt * scale) * inv;
            sum.min_xtilde = std::min(sum.min_xtilde, xt);
            sum.max_xtilde = std::max(sum.max_xtilde, xt);
            if (!(xt >= 0.0 && xt < 1.0))
                flag(s, "xtilde[" + std::to_string(j) + "] = " +
                            std::to_string(xt) + " outside [0, 1)");
        }
        for (int i = 0; i < m; ++i) rec.z[i] = rng.normal();

        for (int i = 0; i < m; ++i) {
            double yp = rec.z[i], yb = rec.z[i], row = 0.0, yd = 0.0;
            double eps = rec.z[i], vsum = 0.0, sfrac = 0.0;
            int vhat_sum = 0;
            for (int j = 0; j < k; ++j) {
                const double hp = 0.5 * h(i, j);
                yp += hp * rec.x[j];
                yb += hp * rec.xbar[j];
                row += hp;
                yd += std::floor(hq(i, j) * rec.xdet[j]);

                const double w = h(i, j) * (rec.xtilde[j] - rec.xdet[j]) +
                                 (h(i, j) - hq(i, j)) * rec.xdet[j] +
                                 frac_floor(hq(i, j) * rec.xdet[j]);
                rec.w[std::size_t(i) * k + j] = w;
                eps += w;
                const double aw = std::abs(w);
                if (aw > sum.max_abs_w) {
                    sum.max_abs_w = aw;
                    sum.max_abs_w_sample = s;
                }
                if (aw > 4.0)
                    flag(s, "|w[" + std::to_string(i) + "][" +
                                std::to_string(j) + "]| = " +
                                std::to_string(aw) + " exceeds 4");

                const double v = (h(i, j) - hq(i, j)) * rec.xdet[j] +
                                 frac_floor(hq(i, j) * rec.xdet[j]);
                const int vh = int(std::floor(v));
                rec.v[std::size_t(i) * k + j] = v;
                rec.vhat[std::size_t(i) * k + j] = vh;
                vsum += v;
                vhat_sum += vh;
                sfrac += v - std::floor(v);
                sum.vhat_min = std::min(sum.vhat_min, vh);
                sum.vhat_max = std::max(sum.vhat_max, vh);
                if (vh < -2 || vh > 2)
                    flag(s, "vhat[" + std::to_string(i) + "][" +
                                std::to_string(j) + "] = " +
                                std::to_string(vh) + " outside [-2, 2]");
            }
            rec.yprime[i] = yp;
            rec.ybar[i] = yb;
            rec.ytilde[i] = yb + row;
            rec.ydet[i] = yd;
            rec.eps[i] = eps;

            const int zh = int(std::floor(rec.z[i]));
            rec.zhat[i] = zh;
            sum.zhat_min = std::min(sum.zhat_min, zh);
            sum.zhat_max = std::max(sum.zhat_max, zh);
            const double zfrac = rec.z[i] - std::floor(rec.z[i]);
            const int c = int(std::floor(sfrac + zfrac));
            rec.carry[i] = c;
            sum.carry_min = std::min(sum.carry_min, c);
            sum.carry_max = std::max(sum.carry_max, c);
            if (c < -2 || c > 2)
                flag(s, "carry[" + std::to_string(i) + "] = " +
                            std::to_string(c) + " outside [-2, 2]");

            // reconstruction identities
            double direct = rec.z[i], yconv = rec.z[i];
            for (int j = 0; j < k; ++j) {
                direct += h(i, j) * rec.xtilde[j];
                yconv += h(i, j) * rec.xdet[j];
            }
            const double r_tilde = std::abs(rec.ytilde[i] - direct);
            const double r_eps = std::abs(rec.ytilde[i] - (yd + eps));
            const double r_conv = std::abs(yconv - (yd + vsum + rec.z[i]));
            // integer recovery leaves the residual fraction in [0, 1)
            const double rho = yconv - yd - vhat_sum - zh - c;
            const double r_rho = std::max(std::max(-rho, rho - 1.0), 0.0);
            sum.max_identity_residual =
                std::max({sum.max_identity_residual, r_tilde, r_eps, r_conv,
                          r_rho});

            const double s_i = eps - rec.z[i];  // sum of w terms
            sum.sum_w[i] += s_i;
            sum.sum_w_sq[i] += s_i * s_i;
        }

        if (trace.records.size() < kTraceRecordCap) trace.records.push_back(rec);
    }
    return trace;
}

SampleBoundReport verify_sample_bounds(const ReductionTrace& trace) {
    const TraceSummary& sum = trace.summary;
    if (sum.samples == 0 && trace.records.empty())
        throw std::invalid_argument("trace is empty");
    if (sum.first_violation_sample >= 0)
        throw CertificationError(sum.first_violation);

    SampleBoundReport r;
    bool seen = false;
    if (sum.samples > 0) {
        r.samples = sum.samples;
        r.max_abs_w = sum.max_abs_w;
        r.vhat_min = sum.vhat_min;
        r.vhat_max = sum.vhat_max;
        r.carry_min = sum.carry_min;
        r.carry_max = sum.carry_max;
        r.zhat_min = sum.zhat_min;
        r.zhat_max = sum.zhat_max;
        r.max_identity_residual = sum.max_identity_residual;
        seen = true;
    }

    // stored records re-checked directly; hand-built traces may carry
    // records without summary backing
    for (const TraceRecord& rec : trace.records) {
        const std::string at = "sample " + std::to_string(rec.sample) + ": ";
        for (std::size_t t = 0; t < rec.w.size(); ++t)
            if (std::abs(rec.w[t]) > 4.0)
                throw CertificationError(at + "|w| = " +
                                         std::to_string(std::abs(rec.w[t])) +
                                         " exceeds 4");
        for (int vh : rec.vhat)
            if (vh < -2 || vh > 2)
                throw CertificationError(at + "vhat = " + std::to_string(vh) +
                                         " outside [-2, 2]");
        for (int c : rec.carry)
            if (c < -2 || c > 2)
                throw CertificationError(at + "carry = " + std::to_string(c) +
                                         " outside [-2, 2]");
        for (double xt : rec.xtilde)
            if (!(xt >= 0.0 && xt < 1.0))
                throw CertificationError(at + "xtilde = " +
                                         std::to_string(xt) +
                                         " outside [0, 1)");
        if (!seen) {
            r.samples = trace.records.size();
            r.vhat_min = r.vhat_max = rec.vhat.empty() ? 0 : rec.vhat[0];
            r.carry_min = r.carry_max = rec.carry.empty() ? 0 : rec.carry[0];
            r.zhat_min = r.zhat_max = rec.zhat.empty() ? 0 : rec.zhat[0];
            seen = true;
        }
        for (double w : rec.w) r.max_abs_w = std::max(r.max_abs_w, std::abs(w));
        for (int vh : rec.vhat) {
            r.vhat_min = std::min(r.vhat_min, vh);
            r.vhat_max = std::max(r.vhat_max, vh);
        }
        for (int c : rec.carry) {
            r.carry_min = std::min(r.carry_min, c);
            r.carry_max = std::max(r.carry_max, c);
        }
        for (int zh : rec.zhat) {
            r.zhat_min = std::min(r.zhat_min, zh);
            r.zhat_max = std::max(r.zhat_max, zh);
        }
    }
    return r;
}

double real_ds_mi_exact(const Eigen::MatrixXd& h, int n,
                        const std::vector<double>& sender_probs) {
    check_chain_matrix(h, 1, 8);
    if (n < 1 || n > 22) throw std::invalid_argument("bit depth must be 1..22");
    const int m = int(h.rows()), k = int(h.cols());
    if (std::int64_t(n) * k > 22)
        throw CapacityError("noise-free cut enumeration needs 2^" +
                            std::to_string(std::int64_t(n) * k) +
                            " input tuples (limit 2^22)");
    if (sender_probs.size() != std::size_t(1) << n)
        throw std::invalid_argument("sender pmf must cover the 2^n grid");
    double total = 0.0;
    for (double p : sender_probs) {
        if (!(p >= 0.0)) throw std::invalid_argument("negative probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("sender pmf must sum to 1");

    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> hq(m, k);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) hq(i, j) = std::int64_t(std::trunc(h(i, j)));

    const std::uint64_t per = std::uint64_t{1} << n;
    const std::uint64_t tuples = std::uint64_t{1} << (std::uint64_t(n) * k);
    std::map<std::vector<std::int64_t>, double> mass;
    std::vector<std::int64_t> key(m);
    std::vector<std::uint64_t> digit(k);
    for (std::uint64_t t = 0; t < tuples; ++t) {
        std::uint64_t rest = t;
        double p = 1.0;
        for (int j = 0; j < k; ++j) {
            digit[j] = rest % per;
            rest /= per;
            p *= sender_probs[digit[j]];
        }
        if (p == 0.0) continue;
        for (int i = 0; i < m; ++i) {
            std::int64_t y = 0;
            for (int j = 0; j < k; ++j)
                y += (hq(i, j) * std::int64_t(digit[j])) >> n;
            key[i] = y;
        }
        mass[key] += p;
    }
    // outputs are a deterministic function of the inputs, so I(X;Y) = H(Y)
    return entropy_of_masses(mass);
}

ForwardChainResult ds_forward_chain(const Eigen::MatrixXd& h, int n,
                                    std::uint64_t samples,
                                    std::uint64_t seed) {
    check_chain_matrix(h, 2, 4);
    if (n < 1 || n > 16) throw std::invalid_argument("bit depth must be 1..16");
    if (samples < 100000)
        throw std::invalid_argument("forward chain needs at least 1e5 samples");
    const int m = int(h.rows()), k = int(h.cols());

    const double mi0 = gaussian_mi_closed_form(h);
    const Eigen::MatrixXd half = 0.5 * h;
    const double mi1 = gaussian_mi_closed_form(half);

    const DiscreteDist xdet_dist = chain_input_dist(n);
    DiscreteDist xbar_dist = xdet_dist;
    for (double& v : xbar_dist.values) v = 2.0 * v - 1.0;

    const MIEstimate e2 = mimo_mi_discrete_input(
        half, std::vector<DiscreteDist>(k, xbar_dist), 1.0,
        std::int64_t(samples), seed);
    const MIEstimate e3 = mimo_mi_discrete_input(
        h, std::vector<DiscreteDist>(k, xdet_dist), 1.0,
        std::int64_t(samples), seed);

    const double mi4 = real_ds_mi_exact(h, n, xdet_dist.probs);
    const std::vector<double> uniform(std::size_t(1) << n, std::exp2(-n));
    const double mi_uniform = real_ds_mi_exact(h, n, uniform);

    ForwardChainResult r;
    r.gains = h;
    r.n = n;
    r.samples = samples;
    r.seed = seed;
    r.trace = generate_trace(h, n, samples, splitmix64_at(seed, 0x7ace));

    const bool paper_size = (m == 2 && k == 2);
    const double final_cap =
        paper_size ? 6.0 : 0.5 * m * std::log2(1.0 + 16.0 * k);

    StepLossReport scale;
    scale.step = "scale";
    scale.mi_before_bits = mi0;
    scale.mi_after_bits = mi1;
    scale.loss_bits = mi0 - mi1;
    scale.paper_bound_bits = 1.0;
    scale.assert_bound_bits = double(m);
    scale.bound_kind = "derived";
    scale.std_error_bits = 0.0;
    scale.holds = scale.loss_bits <= scale.assert_bound_bits + 1e-9;
    scale.note =
        "stated constant is 1 bit; the psd scaling identity gives the "
        "receiver count (" +
        std::to_string(m) + " bits) for a log-det cut, asserted here";

    StepLossReport discard;
    discard.step = "integer-discard";
    discard.mi_before_bits = mi1;
    discard.mi_after_bits = e2.value_bits;
    discard.loss_bits = mi1 - e2.value_bits;
    discard.paper_bound_bits = 8.0;
    discard.assert_bound_bits = 4.0 * k;
    discard.bound_kind = (k == 2) ? "stated" : "derived";
    discard.std_error_bits = e2.std_error_bits;
    discard.holds = discard.loss_bits <=
                    discard.assert_bound_bits + 3.0 * e2.std_error_bits;
    discard.note =
        "each discarded integer part costs under 4 bits; the retained "
        "fraction is also placed on the n-bit chain grid at this stage, so "
        "later stages share its alphabet";

    StepLossReport shift;
    shift.step = "positivity-shift";
    shift.mi_before_bits = e2.value_bits;
    shift.mi_after_bits = e3.value_bits;
    shift.loss_bits = e2.value_bits - e3.value_bits;
    shift.paper_bound_bits = 0.0;
    shift.assert_bound_bits = 0.0;
    shift.bound_kind = "stated";
    shift.std_error_bits = e2.std_error_bits + e3.std_error_bits;
    shift.holds = std::abs(shift.loss_bits) <=
                  3.0 * shift.std_error_bits + 1e-9;
    shift.note =
        "invertible affine change of inputs and outputs; both estimates "
        "share one seed";

    StepLossReport disc;
    disc.step = "discretization";
    disc.mi_before_bits = e3.value_bits;
    disc.mi_after_bits = mi4;
    disc.loss_bits = e3.value_bits - mi4;
    disc.paper_bound_bits = 6.0;
    disc.assert_bound_bits = final_cap;
    disc.bound_kind = paper_size ? "stated" : "derived";
    disc.std_error_bits = e3.std_error_bits;
    disc.holds = disc.loss_bits <= final_cap + 3.0 * e3.std_error_bits;
    disc.note = paper_size
                    ? "per-receiver extraction information is under 3 bits"
                    : "cap recomputed as (m/2) log2(1+16k) for this size";

    r.steps = {scale, discard, shift, disc};
    r.mi_gauss_bits = mi0;
    r.mi_ds_chain_bits = mi4;
    r.mi_ds_uniform_bits = mi_uniform;
    r.total_loss_bits = mi0 - mi4;
    r.total_bound_bits = scale.assert_bound_bits + discard.assert_bound_bits +
                         disc.assert_bound_bits;
    r.miso_bits.resize(m);
    for (int i = 0; i < m; ++i) {
        const double mean = r.trace.summary.sum_w[i] / double(samples);
        const double var =
            std::max(0.0, r.trace.summary.sum_w_sq[i] / double(samples) -
                              mean * mean);
        r.miso_bits[i] = 0.5 * std::log2(1.0 + var);
    }
    r.holds = scale.holds && discard.holds && shift.holds && disc.holds;
    return r;
}

ConverseChainResult ds_converse_chain(const Eigen::MatrixXd& h, int n,
                                      const std::vector<Eigen::VectorXd>& points,
                                      const std::vector<double>& probs,
                                      std::uint64_t samples,
                                      std::uint64_t seed) {
    check_chain_matrix(h, 1, 8);
    if (n < 1 || n > 22) throw std::invalid_argument("bit depth must be 1..22");
    if (points.empty() || points.size() != probs.size())
        throw std::invalid_argument("need matching nonempty points and probs");
    if (points.size() > (std::size_t{1} << 16))
        throw CapacityError("joint input alphabet of " +
                            std::to_string(points.size()) +
                            " points exceeds 2^16");
    const int m = int(h.rows()), k = int(h.cols());
    const double scale = std::exp2(n);
    double total = 0.0;
    std::vector<std::vector<std::int64_t>> nums(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        if (points[p].size() != k)
            throw std::invalid_argument("input point dimension mismatch");
        if (!(probs[p] >= 0.0))
            throw std::invalid_argument("negative probability");
        total += probs[p];
        nums[p].resize(k);
        for (int j = 0; j < k; ++j) {
            const double x = points[p][j];
            const double num = x * scale;
            const std::int64_t r = std::llround(num);
            if (!(x >= 0.0 && x < 1.0) || std::abs(num - double(r)) > 1e-6)
                throw std::invalid_argument(
                    "converse inputs must sit on the n-bit grid in [0, 1)");
            nums[p][j] = r;
        }
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("input probabilities must sum to 1");

    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> hq(m, k);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) hq(i, j) = std::int64_t(std::trunc(h(i, j)));

    // exact discrete-channel MI: deterministic outputs, so H(Y_det)
    std::map<std::vector<std::int64_t>, double> ymass;
    std::vector<std::int64_t> key(m);
    for (std::size_t p = 0; p < points.size(); ++p) {
        if (probs[p] == 0.0) continue;
        for (int i = 0; i < m; ++i) {
            std::int64_t y = 0;
            for (int j = 0; j < k; ++j) y += (hq(i, j) * nums[p][j]) >> n;
            key[i] = y;
        }
        ymass[key] += probs[p];
    }
    const double mi_ds = entropy_of_masses(ymass);

    const MIEstimate gauss = mimo_mi_discrete_joint(
        h, points, probs, 1.0, std::int64_t(samples), seed);

    // embedding budget components
    auto map_entropy = [](const std::map<int, double>& pmf) {
        double acc = 0.0;
        for (const auto& kv : pmf)
            if (kv.second > 0.0) acc -= kv.second * std::log2(kv.second);
        return acc;
    };

    ConverseChainResult r;
    r.vhat_entropy_bits.resize(std::size_t(m) * k);
    r.carry_entropy_bits.resize(m);
    for (int i = 0; i < m; ++i) {
        std::map<int, double> carry_pmf;
        for (int j = 0; j < k; ++j) {
            std::map<int, double> vhat_pmf;
            for (std::size_t p = 0; p < points.size(); ++p) {
                if (probs[p] == 0.0) continue;
                const double x = points[p][j];
                const double v = (h(i, j) - double(hq(i, j))) * x +
                                 frac_floor(double(hq(i, j)) * x);
                vhat_pmf[int(std::floor(v))] += probs[p];
            }
            r.vhat_entropy_bits[std::size_t(i) * k + j] = map_entropy(vhat_pmf);
        }
        for (std::size_t p = 0; p < points.size(); ++p) {
            if (probs[p] == 0.0) continue;
            double sfrac = 0.0;
            for (int j = 0; j < k; ++j) {
                const double x = points[p][j];
                const double v = (h(i, j) - double(hq(i, j))) * x +
                                 frac_floor(double(hq(i, j)) * x);
                sfrac += frac_floor(v);
            }
            const int base = int(std::floor(sfrac));
            const double low = floor_frac_cdf(1.0 - (sfrac - double(base)));
            carry_pmf[base] += probs[p] * low;
            carry_pmf[base + 1] += probs[p] * (1.0 - low);
        }
        r.carry_entropy_bits[i] = map_entropy(carry_pmf);
    }
    r.zhat_entropy_bits = discrete_entropy(normal_floor_pmf());

    r.component_sum_bits = 0.0;
    bool caps = true;
    for (double e : r.vhat_entropy_bits) {
        r.component_sum_bits += e;
        caps = caps && e <= 3.0;
    }
    for (double e : r.carry_entropy_bits) {
        r.component_sum_bits += e;
        caps = caps && e <= 3.0;
    }
    r.component_sum_bits += m * r.zhat_entropy_bits;
    caps = caps && r.zhat_entropy_bits <= 4.0;
    r.component_caps_hold = caps;

    const bool paper_size = (m == 2 && k == 2);
    const double cap_sum = 3.0 * m * k + 3.0 * m + 4.0 * m;
    StepLossReport& st = r.step;
    st.step = "converse-embedding";
    st.mi_before_bits = mi_ds;
    st.mi_after_bits = gauss.value_bits;
    st.loss_bits = mi_ds - gauss.value_bits;
    st.paper_bound_bits = 28.0;
    st.assert_bound_bits = paper_size ? 28.0 : cap_sum;
    st.bound_kind = paper_size ? "stated" : "derived";
    st.std_error_bits = gauss.std_error_bits;
    st.holds = st.loss_bits <= st.assert_bound_bits + 3.0 * gauss.std_error_bits;
    st.note = "per-component caps total " + std::to_string(cap_sum) +
              " bits here; observed components sum to " +
              std::to_string(r.component_sum_bits);

    r.mi_ds_bits = mi_ds;
    r.mi_gauss = gauss;
    r.n = n;
    r.samples = samples;
    r.seed = seed;
    r.alphabet = points.size();
    return r;
}

PsdScalingReport psd_scaling_check(const Eigen::MatrixXd& h, double tol) {
    const Eigen::Index m = h.rows();
    PsdScalingReport r;
    if (m == 0) {
        r.min_eigenvalue = 3.0;
        r.holds = true;
        return r;
    }
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m, m);
    const Eigen::MatrixXd half = 0.5 * h;
    const Eigen::MatrixXd diff = 4.0 * (id + half * half.transpose()) -
                                 (id + h * h.transpose());
    r.max_abs_deviation = (diff - 3.0 * id).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (diff + diff.transpose()), Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    r.holds = r.max_abs_deviation <= tol && r.min_eigenvalue > 0.0;
    return r;
}

Eigen::MatrixXd complex_to_real_expand(const Eigen::MatrixXcd& h) {
    Eigen::MatrixXd r(2 * h.rows(), 2 * h.cols());
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j) {
            const double a = h(i, j).real(), b = h(i, j).imag();
            r(2 * i, 2 * j) = a;
            r(2 * i, 2 * j + 1) = -b;
            r(2 * i + 1, 2 * j) = b;
            r(2 * i + 1, 2 * j + 1) = a;
        }
    return r;
}

namespace {

json step_to_json(const StepLossReport& s) {
    return json{{"step", s.step},
                {"mi_before_bits", s.mi_before_bits},
                {"mi_after_bits", s.mi_after_bits},
                {"loss_bits", s.loss_bits},
                {"paper_bound_bits", s.paper_bound_bits},
                {"assert_bound_bits", s.assert_bound_bits},
                {"bound_kind", s.bound_kind},
                {"std_error_bits", s.std_error_bits},
                {"holds", s.holds},
                {"note", s.note}};
}

json matrix_to_json(const Eigen::MatrixXd& h) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < h.cols(); ++j) row.push_back(h(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json bounds_to_json_obj(const SampleBoundReport& r) {
    return json{{"samples", r.samples},
                {"max_abs_w", r.max_abs_w},
                {"vhat_support", {r.vhat_min, r.vhat_max}},
                {"carry_support", {r.carry_min, r.carry_max}},
                {"zhat_range", {r.zhat_min, r.zhat_max}},
                {"max_identity_residual", r.max_identity_residual}};
}

}  // namespace

std::string forward_chain_to_json(const ForwardChainResult& r) {
    json steps = json::array();
    for (const StepLossReport& s : r.steps) steps.push_back(step_to_json(s));
    json j{{"chain", "forward"},
           {"gains", matrix_to_json(r.gains)},
           {"n", r.n},
           {"samples", r.samples},
           {"seed", r.seed},
           {"prng", kPrngName},
           {"steps", std::move(steps)},
           {"mi_gauss_bits", r.mi_gauss_bits},
           {"mi_ds_chain_bits", r.mi_ds_chain_bits},
           {"mi_ds_uniform_bits", r.mi_ds_uniform_bits},
           {"total_loss_bits", r.total_loss_bits},
           {"total_bound_bits", r.total_bound_bits},
           {"miso_bits", r.miso_bits},
           {"holds", r.holds}};
    return j.dump(2) + "\n";
}

std::string converse_chain_to_json(const ConverseChainResult& r) {
    json j{{"chain", "converse"},
           {"n", r.n},
           {"samples", r.samples},
           {"seed", r.seed},
           {"alphabet", r.alphabet},
           {"prng", kPrngName},
           {"step", step_to_json(r.step)},
           {"mi_ds_bits", r.mi_ds_bits},
           {"mi_gauss_bits", r.mi_gauss.value_bits},
           {"mi_gauss_std_error_bits", r.mi_gauss.std_error_bits},
           {"vhat_entropy_bits", r.vhat_entropy_bits},
           {"carry_entropy_bits", r.carry_entropy_bits},
           {"zhat_entropy_bits", r.zhat_entropy_bits},
           {"component_sum_bits", r.component_sum_bits},
           {"component_caps_hold", r.component_caps_hold}};
    return j.dump(2) + "\n";
}

std::string sample_bounds_to_json(const SampleBoundReport& r) {
    return bounds_to_json_obj(r).dump(2) + "\n";
}

}  // namespace relnet

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "relnet/rng.hpp"
#include "relnet/theoremtrace.hpp"

using namespace relnet;

namespace {

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

Eigen::MatrixXd rot_bank(double h) {
    Eigen::MatrixXd m(2, 2);
    m << h, -h, h, h;
    return m;
}

}  // namespace

TEST_CASE("chain input law") {
    for (int n : {1, 2, 3, 6}) {
        const DiscreteDist d = chain_input_dist(n);
        const std::size_t cells = std::size_t(1) << n;
        REQUIRE(d.values.size() == cells);
        REQUIRE(d.probs.size() == cells);
        double total = 0.0;
        for (std::size_t j = 0; j < cells; ++j) {
            CHECK(d.values[j] == doctest::Approx(double(j) * std::exp2(-n)).epsilon(1e-15));
            CHECK(d.probs[j] >= 0.0);
            total += d.probs[j];
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        // the underlying fractional law is symmetric about zero, which
        // mirrors the shifted cells
        for (std::size_t j = 0; j < cells; ++j)
            CHECK(d.probs[j] ==
                  doctest::Approx(d.probs[cells - 1 - j]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(chain_input_dist(0), std::invalid_argument);
    CHECK_THROWS_AS(chain_input_dist(17), std::invalid_argument);
}

TEST_CASE("chain bit depth") {
    CHECK(chain_bit_depth(rot_bank(8.0)) == 3);
    CHECK(chain_bit_depth(rot_bank(1.0)) == 1);
    CHECK(chain_bit_depth(Eigen::MatrixXd::Zero(2, 2)) == 1);
    Eigen::MatrixXd m(1, 2);
    m << 1024.25, 2.0;
    CHECK(chain_bit_depth(m) == 10);
    m << -7.9, 0.5;
    CHECK(chain_bit_depth(m) == 2);
}

TEST_CASE("trace identities and sample supports") {
    const Eigen::MatrixXd h = rot_bank(8.0);
    const ReductionTrace trace = generate_trace(h, 3, 20000, 101);
    CHECK(trace.summary.samples == 20000);
    CHECK(trace.summary.max_identity_residual <= 1e-9);
    CHECK(trace.summary.min_xtilde >= 0.0);
    CHECK(trace.summary.max_xtilde < 1.0);
    CHECK(trace.summary.first_violation_sample == -1);
    CHECK(trace.records.size() == kTraceRecordCap);

    const SampleBoundReport rep = verify_sample_bounds(trace);
    CHECK(rep.samples == 20000);
    CHECK(rep.max_abs_w <= 4.0);
    CHECK(rep.vhat_min >= -2);
    CHECK(rep.vhat_max <= 2);
    CHECK(rep.carry_min >= -2);
    CHECK(rep.carry_max <= 2);
    CHECK(rep.max_identity_residual <= 1e-9);

    SUBCASE("stored records reproduce the chain variables") {
        const TraceRecord& r = trace.records[7];
        CHECK(r.sample == 7);
        for (int j = 0; j < 2; ++j) {
            CHECK(r.xhat[j] == std::trunc(r.x[j]));
            CHECK(r.xbar[j] == doctest::Approx(r.x[j] - r.xhat[j]).epsilon(1e-15));
            CHECK(r.xtilde[j] ==
                  doctest::Approx(0.5 * (r.xbar[j] + 1.0)).epsilon(1e-15));
            CHECK(r.xdet[j] == std::floor(r.xtilde[j] * 8.0) / 8.0);
        }
        for (int i = 0; i < 2; ++i) {
            double yp = r.z[i], yd = 0.0, eps = r.z[i];
            for (int j = 0; j < 2; ++j) {
                yp += 0.5 * h(i, j) * r.x[j];
                yd += std::floor(std::trunc(h(i, j)) * r.xdet[j]);
                eps += r.w[std::size_t(i) * 2 + j];
            }
            CHECK(r.yprime[i] == doctest::Approx(yp).epsilon(1e-12));
            CHECK(r.ydet[i] == yd);
            CHECK(r.eps[i] == doctest::Approx(eps).epsilon(1e-12));
            CHECK(r.ytilde[i] == doctest::Approx(yd + eps).epsilon(1e-9));
            CHECK(r.zhat[i] == int(std::floor(r.z[i])));
        }
    }

    SUBCASE("same seed reproduces the trace exactly") {
        const ReductionTrace again = generate_trace(h, 3, 20000, 101);
        CHECK(again.summary.max_abs_w == trace.summary.max_abs_w);
        CHECK(again.summary.max_abs_w_sample == trace.summary.max_abs_w_sample);
        CHECK(again.records[123].x[0] == trace.records[123].x[0]);
        CHECK(again.records[123].z[1] == trace.records[123].z[1]);
    }

    SUBCASE("short runs keep every record") {
        const ReductionTrace small = generate_trace(h, 3, 40, 5);
        CHECK(small.records.size() == 40);
        CHECK(verify_sample_bounds(small).samples == 40);
    }
}

TEST_CASE("mismatched bit depth breaks the error bound, matched depth keeps it") {
    // gains of size 8.5 on a 1-bit grid leave errors above 4.25; the
    // matched 3-bit grid keeps every term under the certified 4
    const Eigen::MatrixXd h = rot_bank(8.5);
    const ReductionTrace coarse = generate_trace(h, 1, 20000, 7);
    CHECK(coarse.summary.max_abs_w > 4.0);
    CHECK(coarse.summary.first_violation_sample >= 0);
    CHECK(contains(coarse.summary.first_violation, "exceeds 4"));
    CHECK_THROWS_AS(verify_sample_bounds(coarse), CertificationError);

    const ReductionTrace fine = generate_trace(h, 3, 20000, 7);
    CHECK(fine.summary.max_abs_w <= 4.0);
    CHECK(fine.summary.max_abs_w > 0.0);
    CHECK(fine.summary.max_abs_w < coarse.summary.max_abs_w);
    CHECK(fine.summary.first_violation_sample == -1);
}

TEST_CASE("sample bound violations name the offending sample") {
    ReductionTrace trace;
    trace.gains = Eigen::MatrixXd::Zero(1, 1);
    trace.n = 1;

    SUBCASE("empty trace is rejected") {
        CHECK_THROWS_AS(verify_sample_bounds(trace), std::invalid_argument);
    }

    SUBCASE("record with an oversized error term") {
        TraceRecord rec;
        rec.sample = 3;
        rec.w = {4.5};
        trace.records.push_back(rec);
        try {
            verify_sample_bounds(trace);
            FAIL("expected a certification error");
        } catch (const CertificationError& e) {
            CHECK(contains(e.what(), "sample 3"));
            CHECK(contains(e.what(), "exceeds 4"));
        }
    }

    SUBCASE("record with an out-of-range integer part") {
        TraceRecord rec;
        rec.sample = 11;
        rec.w = {0.5};
        rec.vhat = {-3};
        trace.records.push_back(rec);
        try {
            verify_sample_bounds(trace);
            FAIL("expected a certification error");
        } catch (const CertificationError& e) {
            CHECK(contains(e.what(), "sample 11"));
            CHECK(contains(e.what(), "outside [-2, 2]"));
        }
    }

    SUBCASE("summary violation wins even without records") {
        trace.summary.samples = 5;
        trace.summary.first_violation_sample = 2;
        trace.summary.first_violation = "sample 2: carry[0] = 3 outside [-2, 2]";
        try {
            verify_sample_bounds(trace);
            FAIL("expected a certification error");
        } catch (const CertificationError& e) {
            CHECK(std::string(e.what()) == trace.summary.first_violation);
        }
    }

    SUBCASE("clean hand-built records produce a report") {
        TraceRecord rec;
        rec.sample = 0;
        rec.w = {0.5, -1.25};
        rec.vhat = {1, 0};
        rec.carry = {-1};
        rec.zhat = {2};
        rec.xtilde = {0.25, 0.75};
        trace.records.push_back(rec);
        const SampleBoundReport rep = verify_sample_bounds(trace);
        CHECK(rep.samples == 1);
        CHECK(rep.max_abs_w == 1.25);
        CHECK(rep.vhat_min == 0);
        CHECK(rep.vhat_max == 1);
        CHECK(rep.carry_min == -1);
        CHECK(rep.carry_max == -1);
        CHECK(rep.zhat_max == 2);
    }
}

TEST_CASE("psd scaling identity") {
    SUBCASE("zero gains") {
        const PsdScalingReport r = psd_scaling_check(Eigen::MatrixXd::Zero(2, 2));
        CHECK(r.max_abs_deviation == 0.0);
        CHECK(r.min_eigenvalue == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(r.holds);
    }
    SUBCASE("random square and rectangular gains") {
        SampleRng rng(303, 0);
        for (int t = 0; t < 50; ++t) {
            const int m = 1 + int(rng.uniform() * 4.0);
            const int k = 1 + int(rng.uniform() * 4.0);
            Eigen::MatrixXd h(m, k);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < k; ++j)
                    h(i, j) = (rng.uniform() * 2.0 - 1.0) * 1048576.0;
            const PsdScalingReport r = psd_scaling_check(h);
            CHECK(r.max_abs_deviation <= 1e-9);
            CHECK(r.holds);
        }
    }
    SUBCASE("loose tolerance is honored") {
        Eigen::MatrixXd h(1, 1);
        h << 2.0;
        const PsdScalingReport r = psd_scaling_check(h, 1e-15);
        // 4(1 + 1) - (1 + 4) = 3 exactly in binary floating point
        CHECK(r.max_abs_deviation == 0.0);
        CHECK(r.holds);
    }
}

TEST_CASE("complex gains expand to rotation blocks") {
    Eigen::MatrixXcd unit(1, 1);
    unit << std::complex<double>(0.0, 1.0);
    const Eigen::MatrixXd r = complex_to_real_expand(unit);
    REQUIRE(r.rows() == 2);
    REQUIRE(r.cols() == 2);
    CHECK(r(0, 0) == 0.0);
    CHECK(r(0, 1) == -1.0);
    CHECK(r(1, 0) == 1.0);
    CHECK(r(1, 1) == 0.0);

    SUBCASE("closed-form MI carries across the expansion") {
        SampleRng rng(71, 0);
        for (int t = 0; t < 10; ++t) {
            Eigen::MatrixXcd hc(2, 2);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    hc(i, j) = std::complex<double>(rng.uniform() * 8.0 - 4.0,
                                                    rng.uniform() * 8.0 - 4.0);
            const double complex_bits = gaussian_mi_closed_form(hc);
            const double real_bits =
                gaussian_mi_closed_form(complex_to_real_expand(hc));
            CHECK(real_bits == doctest::Approx(complex_bits).epsilon(1e-9));
        }
    }
}

TEST_CASE("noise-free discretized cut enumeration") {
    const std::vector<double> uni8(8, 0.125);

    SUBCASE("power-of-two gain is lossless") {
        Eigen::MatrixXd h(1, 1);
        h << 8.0;
        CHECK(real_ds_mi_exact(h, 3, uni8) == doctest::Approx(3.0).epsilon(1e-12));
        h << -8.0;
        CHECK(real_ds_mi_exact(h, 3, uni8) == doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("weak gain erases the input") {
        Eigen::MatrixXd h(1, 1);
        h << 1.0;
        CHECK(real_ds_mi_exact(h, 3, uni8) == 0.0);
    }
    SUBCASE("rotation bank is invertible on uniform inputs") {
        const Eigen::MatrixXd h = rot_bank(8.0);
        const std::vector<double> uni(8, 0.125);
        CHECK(real_ds_mi_exact(h, 3, uni) == doctest::Approx(6.0).epsilon(1e-12));
    }
    SUBCASE("agrees with a direct histogram") {
        Eigen::MatrixXd h(2, 2);
        h << 8.5, -3.7, 2.1, 9.7;
        const DiscreteDist d = chain_input_dist(3);
        std::map<std::array<long, 2>, double> mass;
        for (long j1 = 0; j1 < 8; ++j1)
            for (long j2 = 0; j2 < 8; ++j2) {
                const std::array<long, 2> y = {
                    ((8 * j1) >> 3) + ((-3 * j2) >> 3),
                    ((2 * j1) >> 3) + ((9 * j2) >> 3)};
                mass[y] += d.probs[std::size_t(j1)] * d.probs[std::size_t(j2)];
            }
        double oracle = 0.0;
        for (const auto& kv : mass)
            if (kv.second > 0.0) oracle -= kv.second * std::log2(kv.second);
        CHECK(real_ds_mi_exact(h, 3, d.probs) ==
              doctest::Approx(oracle).epsilon(1e-12));
    }
    SUBCASE("guards") {
        Eigen::MatrixXd h(1, 2);
        h << 8.0, 8.0;
        try {
            real_ds_mi_exact(h, 12, std::vector<double>(4096, 1.0 / 4096.0));
            FAIL("expected a capacity error");
        } catch (const CapacityError& e) {
            CHECK(contains(e.what(), "2^24"));
        }
        Eigen::MatrixXd one(1, 1);
        one << 8.0;
        CHECK_THROWS_AS(real_ds_mi_exact(one, 3, std::vector<double>(4, 0.25)),
                        std::invalid_argument);
        CHECK_THROWS_AS(real_ds_mi_exact(one, 3, std::vector<double>(8, 0.2)),
                        std::invalid_argument);
    }
}

TEST_CASE("forward chain certificate" * doctest::timeout(240)) {
    SUBCASE("matched rotation bank") {
        const Eigen::MatrixXd h = rot_bank(4.0);
        const ForwardChainResult r = ds_forward_chain(h, 2, 100000, 404);
        REQUIRE(r.steps.size() == 4);
        CHECK(r.steps[0].step == "scale");
        CHECK(r.steps[1].step == "integer-discard");
        CHECK(r.steps[2].step == "positivity-shift");
        CHECK(r.steps[3].step == "discretization");
        for (const StepLossReport& s : r.steps) CHECK(s.holds);
        CHECK(r.holds);
        CHECK(r.mi_gauss_bits ==
              doctest::Approx(gaussian_mi_closed_form(h)).epsilon(1e-12));
        CHECK(r.total_bound_bits == doctest::Approx(16.0).epsilon(1e-12));
        CHECK(r.total_loss_bits ==
              doctest::Approx(r.mi_gauss_bits - r.mi_ds_chain_bits).epsilon(1e-12));

        // the chain composes: each stage ends where the next begins
        CHECK(r.steps[0].mi_after_bits == r.steps[1].mi_before_bits);
        CHECK(r.steps[1].mi_after_bits == r.steps[2].mi_before_bits);
        CHECK(r.steps[2].mi_after_bits == r.steps[3].mi_before_bits);
        CHECK(r.steps[3].mi_after_bits ==
              doctest::Approx(r.mi_ds_chain_bits).epsilon(1e-12));

        // shared-seed comparison keeps the invertible shift near zero
        CHECK(std::abs(r.steps[2].loss_bits) <=
              3.0 * r.steps[2].std_error_bits + 1e-9);

        // per-receiver extraction channels stay under 3 bits
        REQUIRE(r.miso_bits.size() == 2);
        for (double b : r.miso_bits) {
            CHECK(b >= 0.0);
            CHECK(b < 3.0);
        }

        // overall comparison against the uniform-input endpoint
        CHECK(r.mi_gauss_bits <= r.mi_ds_uniform_bits + 15.0 + 2.0);
        CHECK(verify_sample_bounds(r.trace).max_abs_w <= 4.0);
    }

    SUBCASE("asymmetric gains at depth four") {
        Eigen::MatrixXd h(2, 2);
        h << 16.0, 16.0, 16.0, 22.4;
        const ForwardChainResult r = ds_forward_chain(h, 4, 100000, 913);
        CHECK(r.holds);
        for (double b : r.miso_bits) CHECK(b < 3.0);
        CHECK(r.mi_ds_chain_bits > 0.0);
        CHECK(r.mi_ds_uniform_bits > 0.0);
    }

    SUBCASE("rejects out-of-contract arguments") {
        CHECK_THROWS_AS(ds_forward_chain(Eigen::MatrixXd::Zero(1, 1), 2, 100000, 1),
                        std::invalid_argument);
        CHECK_THROWS_AS(ds_forward_chain(rot_bank(4.0), 0, 100000, 1),
                        std::invalid_argument);
        CHECK_THROWS_AS(ds_forward_chain(rot_bank(4.0), 2, 1000, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("forward chain report is deterministic" * doctest::timeout(240)) {
    const Eigen::MatrixXd h = rot_bank(4.0);
    const std::string a = forward_chain_to_json(ds_forward_chain(h, 2, 100000, 55));
    const std::string b = forward_chain_to_json(ds_forward_chain(h, 2, 100000, 55));
    CHECK(a == b);
    const nlohmann::json j = nlohmann::json::parse(a);
    CHECK(j.at("chain") == "forward");
    CHECK(j.at("steps").size() == 4);
    CHECK(j.at("holds").is_boolean());
    CHECK(j.at("prng") == std::string(kPrngName));
    CHECK(j.at("gains")[0][1] == -4.0);
}

TEST_CASE("converse certificate" * doctest::timeout(240)) {
    const Eigen::MatrixXd h = rot_bank(8.0);

    SUBCASE("uniform product inputs on the matched grid") {
        std::vector<Eigen::VectorXd> points;
        std::vector<double> probs;
        for (int j1 = 0; j1 < 8; ++j1)
            for (int j2 = 0; j2 < 8; ++j2) {
                Eigen::VectorXd p(2);
                p << j1 / 8.0, j2 / 8.0;
                points.push_back(p);
                probs.push_back(1.0 / 64.0);
            }
        const ConverseChainResult r = ds_converse_chain(h, 3, points, probs, 150000, 606);
        // sum and difference recover both inputs, so the discrete channel
        // carries all six input bits
        CHECK(r.mi_ds_bits == doctest::Approx(6.0).epsilon(1e-12));
        CHECK(r.step.holds);
        CHECK(r.component_caps_hold);
        // power-of-two gains embed with zero per-link defect
        for (double e : r.vhat_entropy_bits) CHECK(e == 0.0);
        for (double e : r.carry_entropy_bits) CHECK(e == 0.0);
        CHECK(r.zhat_entropy_bits == doctest::Approx(2.104832666617573).epsilon(1e-12));
        CHECK(r.component_sum_bits ==
              doctest::Approx(2.0 * r.zhat_entropy_bits).epsilon(1e-12));
        CHECK(r.step.paper_bound_bits == 28.0);
        CHECK(r.alphabet == 64);

        const nlohmann::json j = nlohmann::json::parse(converse_chain_to_json(r));
        CHECK(j.at("chain") == "converse");
        CHECK(j.at("mi_ds_bits") == 6.0);
        CHECK(j.at("component_caps_hold") == true);
    }

    SUBCASE("fractional gains still satisfy the component caps") {
        Eigen::MatrixXd g(2, 2);
        g << 9.7, 3.7, -8.5, 9.7;
        std::vector<Eigen::VectorXd> points;
        std::vector<double> probs;
        const DiscreteDist d = chain_input_dist(3);
        for (int j1 = 0; j1 < 8; ++j1)
            for (int j2 = 0; j2 < 8; ++j2) {
                Eigen::VectorXd p(2);
                p << j1 / 8.0, j2 / 8.0;
                points.push_back(p);
                probs.push_back(d.probs[std::size_t(j1)] * d.probs[std::size_t(j2)]);
            }
        const ConverseChainResult r = ds_converse_chain(g, 3, points, probs, 150000, 607);
        CHECK(r.step.holds);
        CHECK(r.component_caps_hold);
        bool some_vhat_spread = false;
        for (double e : r.vhat_entropy_bits) {
            CHECK(e <= 3.0);
            some_vhat_spread = some_vhat_spread || e > 0.0;
        }
        CHECK(some_vhat_spread);
        for (double e : r.carry_entropy_bits) CHECK(e <= 3.0);
        CHECK(r.zhat_entropy_bits <= 4.0);
    }

    SUBCASE("point mass carries nothing") {
        std::vector<Eigen::VectorXd> points;
        Eigen::VectorXd p(2);
        p << 0.25, 0.5;
        points.push_back(p);
        const ConverseChainResult r =
            ds_converse_chain(h, 3, points, {1.0}, 100000, 9);
        CHECK(r.mi_ds_bits == 0.0);
        CHECK(r.step.holds);
    }

    SUBCASE("fully correlated senders") {
        std::vector<Eigen::VectorXd> points;
        std::vector<double> probs;
        for (int j = 0; j < 8; ++j) {
            Eigen::VectorXd p(2);
            p << j / 8.0, j / 8.0;
            points.push_back(p);
            probs.push_back(0.125);
        }
        const ConverseChainResult r = ds_converse_chain(h, 3, points, probs, 100000, 10);
        // the difference output is constant, the sum output is uniform
        CHECK(r.mi_ds_bits == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(r.step.holds);
    }

    SUBCASE("rejects inputs off the grid") {
        std::vector<Eigen::VectorXd> points;
        Eigen::VectorXd p(2);
        p << 0.3, 0.5;
        points.push_back(p);
        CHECK_THROWS_AS(ds_converse_chain(h, 3, points, {1.0}, 100000, 1),
                        std::invalid_argument);
        p << -0.125, 0.5;
        points[0] = p;
        CHECK_THROWS_AS(ds_converse_chain(h, 3, points, {1.0}, 100000, 1),
                        std::invalid_argument);
        p << 0.125, 0.5;
        points[0] = p;
        CHECK_THROWS_AS(ds_converse_chain(h, 3, points, {0.9}, 100000, 1),
                        std::invalid_argument);
        Eigen::VectorXd wrong(3);
        wrong << 0.0, 0.0, 0.0;
        CHECK_THROWS_AS(ds_converse_chain(h, 3, {wrong}, {1.0}, 100000, 1),
                        std::invalid_argument);
    }
}

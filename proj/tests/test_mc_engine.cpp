// Tests for the Monte Carlo engine: plain sampling, recursive stratification,
// accuracy-targeted iteration, and sharded deterministic parallelism.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "purity_mc/domain.hpp"
#include "purity_mc/integrands.hpp"
#include "purity_mc/integrand.hpp"
#include "purity_mc/mc.hpp"
#include "purity_mc/rng.hpp"

using namespace purity_mc;

namespace {

Integrand constant_one(std::size_t dims) {
    return Integrand{dims, "one", 0.0, [](std::span<const double>) { return 1.0; }};
}

Integrand gaussian_nd(std::size_t dims) {
    return Integrand{dims, "gaussian", 0.0, [](std::span<const double> x) {
                         double s = 0.0;
                         for (double v : x) s += v * v;
                         return std::exp(-s);
                     }};
}

// erf(1), needed for the closed form of the 2-D Gaussian box integral.
// std::erf is allowed in tests (the library ships its own approximation).
const double kGauss2dExact = std::numbers::pi * std::erf(1.0) * std::erf(1.0);

}  // namespace

TEST_CASE("plain MC integrates a constant exactly") {
    const Domain dom = Domain::unit_box(12);
    const McEstimate est = integrate_plain(constant_one(12), dom, 4096, RngStream{1, 0});
    CHECK(est.value == 4096.0);  // volume of [-1,1]^12, bit-exact
    CHECK(est.std_error == 0.0);
    CHECK(est.calls == 4096);
}

TEST_CASE("plain MC estimates x^2 on [0,1] without bias") {
    const Integrand f{1, "xsq", 0.0,
                      [](std::span<const double> x) { return x[0] * x[0]; }};
    const Domain dom = Domain::cube(1, 0.0, 1.0);
    double mean = 0.0, se_sq = 0.0;
    const int n_seeds = 100;
    for (int s = 0; s < n_seeds; ++s) {
        const McEstimate est = integrate_plain(f, dom, 4000, RngStream{static_cast<std::uint64_t>(s), 0});
        mean += est.value;
        se_sq += est.std_error * est.std_error;
    }
    mean /= n_seeds;
    const double se_of_mean = std::sqrt(se_sq) / n_seeds;
    CHECK(std::fabs(mean - 1.0 / 3.0) < 4.0 * se_of_mean);
}

TEST_CASE("plain MC agrees with the 2-D Gaussian closed form") {
    const McEstimate est =
        integrate_plain(gaussian_nd(2), Domain::unit_box(2), 1000000, RngStream{7, 0});
    CHECK(est.std_error > 0.0);
    CHECK(std::fabs(est.value - kGauss2dExact) < 3.0 * est.std_error);
    // The relative error at 1e6 calls should be well under a percent.
    CHECK(est.std_error / est.value < 1e-3);
}

TEST_CASE("both integrators evaluate the integrand exactly `calls` times") {
    std::uint64_t evals = 0;
    const Integrand counted{3, "counted", 0.0, [&evals](std::span<const double> x) {
                                ++evals;
                                return x[0] + x[1] * x[2];
                            }};
    const Domain dom = Domain::unit_box(3);

    evals = 0;
    integrate_plain(counted, dom, 12345, RngStream{1, 0});
    CHECK(evals == 12345);

    evals = 0;
    integrate_miser(counted, dom, 50000, MiserParams::defaults_for(3), RngStream{1, 0});
    CHECK(evals == 50000);
}

TEST_CASE("shape and argument validation") {
    const Domain dom3 = Domain::unit_box(3);
    CHECK_THROWS_AS(integrate_plain(constant_one(2), dom3, 100, RngStream{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(integrate_plain(constant_one(3), dom3, 1, RngStream{}),
                    std::invalid_argument);

    const MiserParams params = MiserParams::defaults_for(3);
    CHECK_THROWS_AS(integrate_miser(constant_one(3), dom3, params.min_calls - 1, params,
                                    RngStream{}),
                    std::invalid_argument);

    MiserParams bad = params;
    bad.exploration_fraction = 0.8;
    CHECK_THROWS_AS(integrate_miser(constant_one(3), dom3, 100000, bad, RngStream{}),
                    std::invalid_argument);

    const Integrand nan_f{1, "nan_f", 0.0,
                          [](std::span<const double>) { return std::nan(""); }};
    CHECK_THROWS_AS(integrate_plain(nan_f, Domain::unit_box(1), 16, RngStream{}),
                    std::domain_error);
}

TEST_CASE("stratified MC integrates a constant exactly at every node") {
    std::vector<MiserNode> nodes;
    const MiserObserver observer = [&nodes](const MiserNode& n) { nodes.push_back(n); };
    const McEstimate est = integrate_miser(constant_one(6), Domain::unit_box(6), 100000,
                                           MiserParams::defaults_for(6), RngStream{3, 0}, observer);
    CHECK(est.value == 64.0);
    CHECK(est.std_error == 0.0);
    REQUIRE_FALSE(nodes.empty());
    for (const MiserNode& n : nodes) {
        // A constant has zero variance everywhere, so every region estimate is
        // exactly its volume and every region error vanishes.
        CHECK(n.estimate.value == n.volume);
        CHECK(n.estimate.std_error == 0.0);
    }
}

TEST_CASE("leaf estimates reconstruct the root estimate") {
    std::vector<MiserNode> leaves;
    const MiserObserver observer = [&leaves](const MiserNode& n) {
        if (n.leaf) leaves.push_back(n);
    };
    const McEstimate root = integrate_miser(gaussian_nd(2), Domain::unit_box(2), 20000,
                                            MiserParams::defaults_for(2), RngStream{11, 0},
                                            observer);
    REQUIRE(leaves.size() > 1);
    double value = 0.0, var = 0.0, volume = 0.0;
    std::uint64_t calls = 0;
    for (const MiserNode& n : leaves) {
        value += n.estimate.value;
        var += n.estimate.std_error * n.estimate.std_error;
        volume += n.volume;
        calls += n.estimate.calls;
    }
    CHECK(std::fabs(value - root.value) < 1e-12 * std::fabs(root.value));
    CHECK(std::fabs(std::sqrt(var) - root.std_error) < 1e-12 * root.std_error);
    CHECK(std::fabs(volume - 4.0) < 1e-12);
    CHECK(calls <= 20000);  // exploration samples are not leaf samples
}

TEST_CASE("every sample point lies inside its domain") {
    const Domain dom{{0.5, -2.0, 10.0}, {2.5, -1.0, 30.0}};
    std::uint64_t violations = 0;
    const Integrand checker{3, "checker", 0.0, [&](std::span<const double> x) {
                                if (!(x[0] >= 0.5 && x[0] < 2.5)) ++violations;
                                if (!(x[1] >= -2.0 && x[1] < -1.0)) ++violations;
                                if (!(x[2] >= 10.0 && x[2] < 30.0)) ++violations;
                                return x[0] + x[1] + x[2];
                            }};
    integrate_plain(checker, dom, 20000, RngStream{5, 0});
    MiserParams params = MiserParams::defaults_for(3);
    integrate_miser(checker, dom, 60000, params, RngStream{5, 0});
    params.dither = 0.3;
    integrate_miser(checker, dom, 60000, params, RngStream{6, 0});
    CHECK(violations == 0);
}

TEST_CASE("stratification beats plain sampling on a peaked integrand") {
    // The exponential trace integrand concentrates near the diagonal; this
    // is the workload the stratified sampler exists for. (On mild, nearly
    // flat integrands the discarded exploration samples make it a slight net
    // loss — that is the classic algorithm's documented trade-off.)
    const Integrand f = make_trace_ground(10.0);
    const Domain dom = Domain::unit_box(6);
    const MiserParams params = MiserParams::defaults_for(6);
    int miser_wins = 0;
    for (std::uint64_t s = 42; s < 52; ++s) {
        const McEstimate p = integrate_plain(f, dom, 200000, RngStream{s, 0});
        const McEstimate m = integrate_miser(f, dom, 200000, params, RngStream{s, 1});
        if (m.std_error < p.std_error) ++miser_wins;
        const double tol = 3.0 * std::hypot(p.std_error, m.std_error);
        CHECK(std::fabs(p.value - m.value) < tol);
    }
    CHECK(miser_wins >= 8);
}

TEST_CASE("accuracy-targeted iteration stops when the target is met") {
    TerminationPolicy policy;
    policy.target_rel_error = 0.05;
    policy.max_calls = 1 << 22;
    policy.initial_calls = 4096;

    const MiserParams params = MiserParams::defaults_for(2);
    const TargetedEstimate t =
        integrate_to_target(gaussian_nd(2), Domain::unit_box(2), policy, params, RngStream{8, 0});
    CHECK(t.target_reached);
    CHECK(t.estimate.std_error <= 0.05 * std::fabs(t.estimate.value));
    CHECK(t.estimate.calls >= policy.initial_calls);
    CHECK(t.estimate.calls <= policy.max_calls);

    // A constant meets any target on the first iteration.
    const TargetedEstimate c =
        integrate_to_target(constant_one(2), Domain::unit_box(2), policy, params, RngStream{9, 0});
    CHECK(c.target_reached);
    CHECK(c.estimate.calls == policy.initial_calls);
    CHECK(c.estimate.value == 4.0);
}

TEST_CASE("accuracy-targeted iteration reports an exhausted budget") {
    TerminationPolicy policy;
    policy.target_rel_error = 1e-8;  // unreachable at this budget
    policy.max_calls = 1 << 16;
    policy.initial_calls = 4096;

    const TargetedEstimate t = integrate_to_target(gaussian_nd(3), Domain::unit_box(3), policy,
                                                   MiserParams::defaults_for(3), RngStream{4, 0});
    CHECK_FALSE(t.target_reached);
    CHECK(t.estimate.calls <= policy.max_calls);
    CHECK(t.estimate.calls >= policy.initial_calls);
    CHECK(t.estimate.std_error > 1e-8 * std::fabs(t.estimate.value));
}

TEST_CASE("one shard reproduces the direct stratified run bit for bit") {
    const Integrand f = gaussian_nd(3);
    const Domain dom = Domain::unit_box(3);
    const MiserParams params = MiserParams::defaults_for(3);
    const std::uint64_t seed = 77;

    const McEstimate direct = integrate_miser(f, dom, 120000, params, RngStream{seed, 0});
    const McEstimate sharded = shard_integrate(f, dom, 120000, params, seed, 1);
    CHECK(sharded.value == direct.value);
    CHECK(sharded.std_error == direct.std_error);
    CHECK(sharded.calls == direct.calls);
}

TEST_CASE("sharded runs are deterministic and consistent across shard counts") {
    const Integrand f = gaussian_nd(3);
    const Domain dom = Domain::unit_box(3);
    const MiserParams params = MiserParams::defaults_for(3);

    const McEstimate a = shard_integrate(f, dom, 400000, params, 42, 8);
    const McEstimate b = shard_integrate(f, dom, 400000, params, 42, 8);
    CHECK(a.value == b.value);  // bit-identical replay
    CHECK(a.std_error == b.std_error);
    CHECK(a.calls == 400000);

    const McEstimate c = shard_integrate(f, dom, 400000, params, 42, 4);
    CHECK(std::fabs(a.value - c.value) < 3.0 * (a.std_error + c.std_error));

    // A zero-variance integrand short-circuits the inverse-variance merge.
    const McEstimate z = shard_integrate(constant_one(3), dom, 100000, params, 42, 8);
    CHECK(z.value == 8.0);
    CHECK(z.std_error == 0.0);
}

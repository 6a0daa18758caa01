#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "purity_mc/domain.hpp"
#include "purity_mc/estimate.hpp"
#include "purity_mc/integrand.hpp"
#include "purity_mc/rng.hpp"
#include "purity_mc/sum.hpp"

namespace purity_mc {

// Tuning knobs for recursive stratified sampling.
struct MiserParams {
    // Fraction of a node's budget spent probing per-axis variances. The
    // probe samples only steer the bisection; they are excluded from the
    // estimate itself.
    double exploration_fraction = 0.1;
    // Smallest budget accepted by integrate_miser at the top level.
    std::uint64_t min_calls = 0;
    // Budgets below this are integrated by plain MC instead of bisecting.
    std::uint64_t min_calls_per_bisection = 0;
    // Random perturbation of the bisection point: the cut lands at
    // mid + dither*(2u-1)*halfwidth for one uniform draw u per node.
    double dither = 0.0;

    // The classic reference-implementation ratios: explore with at least
    // 16*dims points, and only bisect nodes with 32 times that many calls.
    // A smaller bisection threshold over-splits, burning the exploration
    // fraction at every level and losing to plain sampling outright.
    static MiserParams defaults_for(std::size_t dims) {
        MiserParams p;
        p.exploration_fraction = 0.1;
        p.min_calls = 16 * static_cast<std::uint64_t>(dims);
        p.min_calls_per_bisection = 32 * p.min_calls;
        p.dither = 0.0;
        return p;
    }

    void validate(std::size_t dims) const {
        if (!(exploration_fraction > 0.0 && exploration_fraction <= 0.5))
            throw std::invalid_argument("MiserParams: exploration_fraction must be in (0, 0.5]");
        if (!(dither >= 0.0 && dither < 0.5))
            throw std::invalid_argument("MiserParams: dither must be in [0, 0.5)");
        if (min_calls == 0 || min_calls_per_bisection == 0)
            throw std::invalid_argument("MiserParams: call thresholds must be positive");
        if (min_calls_per_bisection < 4 * static_cast<std::uint64_t>(dims))
            throw std::invalid_argument(
                "MiserParams: min_calls_per_bisection must be at least 4*dims");
    }
};

// Stopping rule for the budget-doubling loop of integrate_to_target.
struct TerminationPolicy {
    double target_rel_error = 0.01;
    std::uint64_t max_calls = 1 << 24;
    std::uint64_t initial_calls = 1 << 14;
    double growth_factor = 2.0;

    void validate() const {
        if (!(target_rel_error > 0.0 && target_rel_error < 1.0))
            throw std::invalid_argument("TerminationPolicy: target_rel_error must be in (0, 1)");
        if (initial_calls == 0 || max_calls == 0 || initial_calls > max_calls)
            throw std::invalid_argument(
                "TerminationPolicy: need 0 < initial_calls <= max_calls");
        if (!(growth_factor > 1.0))
            throw std::invalid_argument("TerminationPolicy: growth_factor must exceed 1");
    }
};

// One node of the bisection tree, reported to an observer in post-order.
// Lets tests verify the variance bookkeeping without exposing internals.
struct MiserNode {
    std::size_t depth = 0;
    bool leaf = false;
    double volume = 0.0;
    McEstimate estimate;
};

using MiserObserver = std::function<void(const MiserNode&)>;

namespace detail {

inline void sample_point(const Domain& dom, RngStream& stream, double* x) {
    const std::size_t d = dom.dims();
    for (std::size_t i = 0; i < d; ++i) {
        x[i] = dom.lower(i) + next_uniform(stream) * dom.width(i);
        assert(x[i] >= dom.lower(i) && x[i] <= dom.upper(i));
    }
}

inline double checked_eval(const Integrand& f, std::span<const double> x) {
    const double v = f.evaluate(x);
    if (!std::isfinite(v))
        throw std::domain_error("integrand '" + f.label + "' returned a non-finite value");
    return v;
}

// Sample mean/variance estimate over one box. Accumulates f and f^2 with
// compensated sums in sample order, so results are deterministic and exact
// for constant integrands.
inline McEstimate plain_kernel(const Integrand& f, const Domain& dom, std::uint64_t calls,
                               RngStream& stream, std::vector<double>& x) {
    CompensatedSum sum;
    CompensatedSum sum_sq;
    for (std::uint64_t i = 0; i < calls; ++i) {
        sample_point(dom, stream, x.data());
        const double v = checked_eval(f, {x.data(), dom.dims()});
        sum.add(v);
        sum_sq.add(v * v);
    }
    const double n = static_cast<double>(calls);
    const double volume = dom.volume();
    const double total = sum.value();
    double sample_var = 0.0;
    if (calls > 1)
        sample_var = std::max(0.0, sum_sq.value() - total * total / n) / (n - 1.0);
    McEstimate est;
    est.value = volume * (total / n);
    est.std_error = volume * std::sqrt(sample_var / n);
    est.calls = calls;
    est.seed = stream.seed;
    est.integrator = IntegratorId::plain;
    return est;
}

struct MiserContext {
    const Integrand& f;
    const MiserParams& params;
    const MiserObserver& observer;
    std::size_t dims;
    // Scratch reused across the whole traversal (depth-first, one stream,
    // fully consumed before any recursive call returns control).
    std::vector<double> x;
    std::vector<double> cut;
    std::vector<CompensatedSum> half_sum;    // 2*dims: [axis], left then right
    std::vector<CompensatedSum> half_sumsq;  // same layout
    std::vector<std::uint64_t> half_n;       // same layout
};

inline McEstimate miser_recurse(MiserContext& ctx, const Domain& dom, std::uint64_t calls,
                                RngStream& stream, std::size_t depth) {
    const std::size_t d = ctx.dims;

    if (calls < ctx.params.min_calls_per_bisection) {
        McEstimate leaf = plain_kernel(ctx.f, dom, calls, stream, ctx.x);
        leaf.integrator = IntegratorId::miser;
        if (ctx.observer) ctx.observer({depth, true, dom.volume(), leaf});
        return leaf;
    }

    // One uniform draw fixes this node's split fraction on every axis.
    const double u = next_uniform(stream);
    const double frac = 0.5 * (1.0 + ctx.params.dither * (2.0 * u - 1.0));

    std::uint64_t n_explore = static_cast<std::uint64_t>(
        std::llround(ctx.params.exploration_fraction * static_cast<double>(calls)));
    n_explore = std::max<std::uint64_t>(n_explore, 4 * d);
    if (n_explore > calls - 4) n_explore = calls - 4;  // keep >= 2 refinement calls per half

    for (std::size_t a = 0; a < d; ++a) {
        ctx.cut[a] = dom.lower(a) + frac * dom.width(a);
        ctx.half_sum[2 * a] = CompensatedSum{};
        ctx.half_sum[2 * a + 1] = CompensatedSum{};
        ctx.half_sumsq[2 * a] = CompensatedSum{};
        ctx.half_sumsq[2 * a + 1] = CompensatedSum{};
        ctx.half_n[2 * a] = 0;
        ctx.half_n[2 * a + 1] = 0;
    }

    for (std::uint64_t i = 0; i < n_explore; ++i) {
        sample_point(dom, stream, ctx.x.data());
        const double v = checked_eval(ctx.f, {ctx.x.data(), d});
        const double v_sq = v * v;
        for (std::size_t a = 0; a < d; ++a) {
            const std::size_t h = 2 * a + (ctx.x[a] < ctx.cut[a] ? 0 : 1);
            ctx.half_sum[h].add(v);
            ctx.half_sumsq[h].add(v_sq);
            ++ctx.half_n[h];
        }
    }

    // Pick the axis whose bisection minimizes the combined per-half spread
    // (sigma_left + sigma_right); ties resolve to the lowest axis index.
    auto half_sigma = [&](std::size_t h) {
        const double n = static_cast<double>(ctx.half_n[h]);
        const double s = ctx.half_sum[h].value();
        const double var = std::max(0.0, ctx.half_sumsq[h].value() - s * s / n) / (n - 1.0);
        return std::sqrt(var);
    };
    std::size_t best_axis = d;
    double best_score = std::numeric_limits<double>::infinity();
    double sigma_l = 0.0;
    double sigma_r = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
        if (ctx.half_n[2 * a] < 2 || ctx.half_n[2 * a + 1] < 2) continue;
        const double sl = half_sigma(2 * a);
        const double sr = half_sigma(2 * a + 1);
        const double score = sl + sr;
        if (score < best_score) {
            best_score = score;
            best_axis = a;
            sigma_l = sl;
            sigma_r = sr;
        }
    }

    const std::uint64_t n_rem = calls - n_explore;
    // Floor on each half's share. A probe sigma of zero only means the probes
    // missed whatever structure that half contains; in high dimensions a
    // narrow peak routinely evades a few hundred probes, so a half is never
    // starved below a real sampling budget no matter how quiet it looked.
    const std::uint64_t lo =
        std::max<std::uint64_t>(2, std::min<std::uint64_t>(ctx.params.min_calls, n_rem / 4));
    std::size_t axis;
    std::uint64_t n_left;
    if (best_axis == d) {
        // Exploration could not characterize any axis (all probe samples on
        // one side). Fall back to a depth-cycled axis and an even split.
        axis = depth % d;
        n_left = n_rem / 2;
    } else {
        axis = best_axis;
        if (sigma_l == 0.0 && sigma_r == 0.0) {
            n_left = n_rem / 2;
        } else {
            const double share = sigma_l / (sigma_l + sigma_r);
            auto nl = static_cast<std::uint64_t>(
                std::llround(share * static_cast<double>(n_rem)));
            n_left = std::clamp<std::uint64_t>(nl, lo, n_rem - lo);
        }
    }

    auto [dom_left, dom_right] = dom.split(axis, frac);
    McEstimate left = miser_recurse(ctx, dom_left, n_left, stream, depth + 1);
    McEstimate right = miser_recurse(ctx, dom_right, n_rem - n_left, stream, depth + 1);

    McEstimate node;
    node.value = left.value + right.value;
    node.std_error = std::sqrt(left.std_error * left.std_error +
                               right.std_error * right.std_error);
    node.calls = calls;
    node.seed = stream.seed;
    node.integrator = IntegratorId::miser;
    if (ctx.observer) ctx.observer({depth, false, dom.volume(), node});
    return node;
}

inline void check_shape(const Integrand& f, const Domain& dom) {
    if (!f.evaluate) throw std::invalid_argument("integrand has no evaluate function");
    if (f.dimension != dom.dims())
        throw std::invalid_argument("integrand dimension does not match domain");
}

}  // namespace detail

// Uniform-sampling baseline estimator.
inline McEstimate integrate_plain(const Integrand& f, const Domain& domain, std::uint64_t calls,
                                  RngStream stream) {
    detail::check_shape(f, domain);
    if (calls < 2) throw std::invalid_argument("integrate_plain: calls must be at least 2");
    std::vector<double> x(domain.dims());
    return detail::plain_kernel(f, domain, calls, stream, x);
}

// Recursive stratified sampling. A slice of each node's budget probes the
// per-axis, per-half variances; the node then bisects the axis with the
// smallest combined spread, apportions the remaining calls proportionally
// to the per-half standard deviations, and recurses until budgets drop
// below min_calls_per_bisection, where plain MC takes over. Child standard
// errors combine as stderr^2 = stderr_left^2 + stderr_right^2.
inline McEstimate integrate_miser(const Integrand& f, const Domain& domain, std::uint64_t calls,
                                  const MiserParams& params, RngStream stream,
                                  const MiserObserver& observer = {}) {
    detail::check_shape(f, domain);
    params.validate(domain.dims());
    if (calls < params.min_calls)
        throw std::invalid_argument("integrate_miser: calls below params.min_calls");
    detail::MiserContext ctx{f,
                             params,
                             observer,
                             domain.dims(),
                             std::vector<double>(domain.dims()),
                             std::vector<double>(domain.dims()),
                             std::vector<CompensatedSum>(2 * domain.dims()),
                             std::vector<CompensatedSum>(2 * domain.dims()),
                             std::vector<std::uint64_t>(2 * domain.dims())};
    McEstimate est = detail::miser_recurse(ctx, domain, calls, stream, 0);
    est.calls = calls;
    est.seed = stream.seed;
    est.integrator = IntegratorId::miser;
    return est;
}

// Budget-doubling loop: rerun integrate_miser on a fresh sub-stream with a
// growing budget until the relative standard error reaches the target or
// the next step would exceed max_calls. The returned estimate is the final
// (largest-budget) one; its `calls` field records the cumulative total.
inline TargetedEstimate integrate_to_target(const Integrand& f, const Domain& domain,
                                            const TerminationPolicy& policy,
                                            const MiserParams& params, RngStream stream) {
    policy.validate();
    std::uint64_t budget = policy.initial_calls;
    std::uint64_t total = 0;
    TargetedEstimate out;
    for (std::uint64_t iteration = 0;; ++iteration) {
        // Each iteration gets its own counter window; draws never overlap.
        RngStream sub(stream.seed, stream.stream_id,
                      Counter128{0, stream.counter.hi + 1 + iteration});
        out.estimate = integrate_miser(f, domain, budget, params, sub);
        total += budget;
        out.target_reached =
            out.estimate.std_error <= policy.target_rel_error * std::fabs(out.estimate.value);
        if (out.target_reached) break;
        const double grown = std::ceil(static_cast<double>(budget) * policy.growth_factor);
        if (grown > 9.0e18) break;
        const auto next = static_cast<std::uint64_t>(grown);
        if (total + next > policy.max_calls) break;
        budget = next;
    }
    out.estimate.calls = total;
    return out;
}

// Splits a budget across independent sub-streams (stream_id = shard index,
// remainder calls going to the lowest-index shards), integrates each shard
// with MISER (or plain MC), and merges the per-shard estimates by
// inverse-variance weighting in fixed shard order. The result depends only
// on (seed, shards, base), never on scheduling.
inline McEstimate shard_integrate(const Integrand& f, const Domain& domain, std::uint64_t calls,
                                  const MiserParams& params, std::uint64_t seed,
                                  std::uint64_t shards,
                                  IntegratorId integrator = IntegratorId::miser,
                                  Counter128 base = Counter128{}) {
    if (shards < 1) throw std::invalid_argument("shard_integrate: shards must be >= 1");
    detail::check_shape(f, domain);
    auto run_one = [&](std::uint64_t shard, std::uint64_t shard_calls) {
        RngStream stream(seed, shard, base);
        return integrator == IntegratorId::miser
                   ? integrate_miser(f, domain, shard_calls, params, stream)
                   : integrate_plain(f, domain, shard_calls, stream);
    };
    if (shards == 1) {
        McEstimate est = run_one(0, calls);
        est.seed = seed;
        return est;
    }

    const std::uint64_t quota = calls / shards;
    const std::uint64_t remainder = calls % shards;
    std::vector<std::future<McEstimate>> futures;
    futures.reserve(shards);
    for (std::uint64_t s = 0; s < shards; ++s) {
        const std::uint64_t shard_calls = quota + (s < remainder ? 1 : 0);
        futures.push_back(std::async(std::launch::async, run_one, s, shard_calls));
    }
    std::vector<McEstimate> parts;
    parts.reserve(shards);
    for (auto& fut : futures) parts.push_back(fut.get());

    McEstimate merged;
    merged.calls = calls;
    merged.seed = seed;
    merged.integrator = integrator;
    // A zero-variance shard dominates any inverse-variance weighting; take
    // the first such shard as the exact answer.
    for (const McEstimate& part : parts) {
        if (part.std_error == 0.0) {
            merged.value = part.value;
            merged.std_error = 0.0;
            return merged;
        }
    }
    CompensatedSum weight_sum;
    CompensatedSum weighted_value_sum;
    for (const McEstimate& part : parts) {
        const double w = 1.0 / (part.std_error * part.std_error);
        weight_sum.add(w);
        weighted_value_sum.add(w * part.value);
    }
    merged.value = weighted_value_sum.value() / weight_sum.value();
    merged.std_error = std::sqrt(1.0 / weight_sum.value());
    return merged;
}

}  // namespace purity_mc

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "purity_mc/domain.hpp"
#include "purity_mc/estimate.hpp"
#include "purity_mc/integrands.hpp"
#include "purity_mc/mc.hpp"
#include "purity_mc/oracle.hpp"
#include "purity_mc/physics.hpp"
#include "purity_mc/reference.hpp"
#include "purity_mc/rng.hpp"

namespace purity_mc {

enum class Experiment { table1, table2, table3, table4, integrate, bohr, mzphase, verify };
enum class OutputFormat { csv, json };

inline std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::table1: return "table1";
        case Experiment::table2: return "table2";
        case Experiment::table3: return "table3";
        case Experiment::table4: return "table4";
        case Experiment::integrate: return "integrate";
        case Experiment::bohr: return "bohr";
        case Experiment::mzphase: return "mzphase";
        case Experiment::verify: return "verify";
    }
    throw std::logic_error("unreachable Experiment");
}

inline Experiment experiment_from_string(const std::string& s) {
    for (Experiment e : {Experiment::table1, Experiment::table2, Experiment::table3,
                         Experiment::table4, Experiment::integrate, Experiment::bohr,
                         Experiment::mzphase, Experiment::verify})
        if (to_string(e) == s) return e;
    throw std::invalid_argument("unknown experiment: " + s);
}

struct RunConfig {
    Experiment experiment = Experiment::table1;
    std::vector<double> alphas;       // must be nonempty for table experiments
    std::uint64_t calls_budget = 0;   // 0: use the per-row reference budget
    double target_rel_error = 0.01;
    std::uint64_t seed = 42;
    std::uint64_t shards = 1;
    IntegratorId integrator = IntegratorId::miser;
    std::string output_path;          // empty: no file written
    OutputFormat format = OutputFormat::csv;
    bool full = false;                // include full-budget reference rows
    PhysicalConstants constants = PhysicalConstants::paper_rounded();
    std::string data_path;            // reference tables JSON
};

// One computed result line; `target_reached` is in-memory status only and is
// not serialized (the persisted schema is the 9 columns of write_results).
struct ResultRow {
    std::string experiment;
    double alpha = 0.0;
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t calls = 0;
    double entanglement = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t shards = 0;
    double walltime_s = 0.0;
    bool target_reached = true;
};

struct Verdict {
    ReferenceRow row;
    McEstimate ours;
    double combined_tolerance = 0.0;
    bool pass = false;
};

struct ComparisonReport {
    std::vector<Verdict> verdicts;
    std::vector<double> unmatched_alphas;  // informational: no reference row
};

namespace detail {

inline bool is_table(Experiment e) {
    return e == Experiment::table1 || e == Experiment::table2 || e == Experiment::table3 ||
           e == Experiment::table4;
}

inline TableId table_of(Experiment e) {
    switch (e) {
        case Experiment::table1: return TableId::table1;
        case Experiment::table2: return TableId::table2;
        case Experiment::table3: return TableId::table3;
        case Experiment::table4: return TableId::table4;
        default: throw std::invalid_argument("experiment has no reference table");
    }
}

inline Integrand integrand_for(Experiment e, double alpha) {
    switch (e) {
        case Experiment::table1:
        case Experiment::integrate: return make_trace_ground(alpha);
        case Experiment::table2: return make_purity_ground(alpha);
        case Experiment::table3: return make_purity_excited(alpha);
        case Experiment::table4: return make_purity_harmonic(alpha);
        default: throw std::invalid_argument("experiment has no integrand");
    }
}

}  // namespace detail

// Default alpha list for a table experiment: every reference row, minus the
// full-budget ones unless asked for.
inline std::vector<double> default_alphas(const ReferenceTables& refs, Experiment e, bool full) {
    std::vector<double> alphas;
    for (const auto& row : refs.rows_for(detail::table_of(e), full)) alphas.push_back(row.alpha);
    return alphas;
}

// Runs one row per alpha. Table experiments integrate at a fixed budget
// (the reference row's published call count unless cfg.calls_budget
// overrides) across cfg.shards streams; `integrate` runs the single-stream
// budget-doubling loop against cfg.target_rel_error with cfg.calls_budget
// as the call ceiling. A row that misses the relative-error target is
// reported with target_reached = false; the batch always continues.
inline std::vector<ResultRow> run_experiment(const RunConfig& cfg, std::ostream* log = nullptr) {
    if (!(cfg.target_rel_error > 0.0 && cfg.target_rel_error < 1.0))
        throw std::invalid_argument("RunConfig: target_rel_error must be in (0, 1)");
    if (cfg.shards < 1) throw std::invalid_argument("RunConfig: shards must be >= 1");

    std::vector<std::pair<double, std::uint64_t>> jobs;  // (alpha, budget)
    if (detail::is_table(cfg.experiment)) {
        if (cfg.alphas.empty())
            throw std::invalid_argument("RunConfig: alphas must be nonempty for table runs");
        const ReferenceTables refs = ReferenceTables::load(cfg.data_path);
        const TableId tid = detail::table_of(cfg.experiment);
        for (double alpha : cfg.alphas) {
            std::uint64_t budget = cfg.calls_budget;
            if (budget == 0) {
                const auto row = refs.find(tid, alpha);
                if (!row)
                    throw std::invalid_argument(
                        "no reference budget for alpha; pass an explicit call budget");
                budget = row->calls_budget();
            }
            jobs.emplace_back(alpha, budget);
        }
    } else if (cfg.experiment == Experiment::integrate) {
        if (cfg.shards != 1)
            throw std::invalid_argument(
                "integrate runs the single-stream accuracy-targeted loop; use shards = 1");
        if (cfg.integrator != IntegratorId::miser)
            throw std::invalid_argument(
                "integrate always uses the stratified integrator (the targeted loop is "
                "defined over it)");
        std::vector<double> alphas = cfg.alphas.empty() ? std::vector<double>{10.0} : cfg.alphas;
        const std::uint64_t ceiling = cfg.calls_budget ? cfg.calls_budget : (1ull << 28);
        for (double alpha : alphas) jobs.emplace_back(alpha, ceiling);
    } else {
        throw std::invalid_argument("run_experiment handles table and integrate experiments");
    }

    std::vector<ResultRow> rows;
    rows.reserve(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto [alpha, budget] = jobs[i];
        const Integrand f = detail::integrand_for(cfg.experiment, alpha);
        const Domain dom = Domain::unit_box(f.dimension);
        const MiserParams params = MiserParams::defaults_for(f.dimension);
        // Row i draws from the counter window with high word i<<16, so rows
        // never share random numbers no matter how budgets change.
        const Counter128 window{0, static_cast<std::uint64_t>(i) << 16};

        const auto t0 = std::chrono::steady_clock::now();
        McEstimate est;
        bool reached = false;
        if (cfg.experiment == Experiment::integrate) {
            TerminationPolicy policy;
            policy.target_rel_error = cfg.target_rel_error;
            policy.max_calls = budget;
            policy.initial_calls = std::min<std::uint64_t>(
                std::max<std::uint64_t>(params.min_calls, 1ull << 16), budget);
            policy.growth_factor = 2.0;
            const TargetedEstimate t = integrate_to_target(
                f, dom, policy, params, RngStream(cfg.seed, 0, window));
            est = t.estimate;
            reached = t.target_reached;
        } else {
            est = shard_integrate(f, dom, budget, params, cfg.seed, cfg.shards, cfg.integrator,
                                  window);
            reached = est.std_error <= cfg.target_rel_error * std::fabs(est.value);
        }
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;

        ResultRow row;
        row.experiment = to_string(cfg.experiment);
        row.alpha = alpha;
        row.value = est.value;
        row.std_error = est.std_error;
        row.calls = est.calls;
        row.entanglement = entanglement_measure(est.value).value;
        row.seed = cfg.seed;
        row.shards = cfg.shards;
        row.walltime_s = elapsed.count();
        row.target_reached = reached;
        if (log) {
            *log << row.experiment << " alpha=" << alpha << " value=" << est.value
                 << " stderr=" << est.std_error << " calls=" << est.calls
                 << " E=" << row.entanglement << " walltime=" << row.walltime_s << "s";
            if (!reached)
                *log << "  [note: relative-error target " << cfg.target_rel_error
                     << " not reached within the call budget]";
            *log << "\n";
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// Tolerance verdicts against the published rows: pass iff
// |ours - published| <= k_sigma * (stderr_ours + published error).
inline ComparisonReport compare_to_reference(const std::vector<ResultRow>& rows,
                                             const std::vector<ReferenceRow>& references,
                                             double k_sigma) {
    if (references.empty())
        throw std::invalid_argument("compare_to_reference: empty reference set");
    if (!(k_sigma > 0.0)) throw std::invalid_argument("compare_to_reference: k_sigma must be > 0");
    ComparisonReport report;
    for (const ResultRow& row : rows) {
        // `integrate` computes the same quantity as table1.
        const std::string key = row.experiment == "integrate" ? "table1" : row.experiment;
        const ReferenceRow* match = nullptr;
        for (const auto& ref : references)
            if (to_string(ref.table_id) == key && ref.alpha == row.alpha) {
                match = &ref;
                break;
            }
        if (!match) {
            report.unmatched_alphas.push_back(row.alpha);
            continue;
        }
        Verdict v;
        v.row = *match;
        v.ours.value = row.value;
        v.ours.std_error = row.std_error;
        v.ours.calls = row.calls;
        v.ours.seed = row.seed;
        v.combined_tolerance = k_sigma * (row.std_error + match->error);
        v.pass = std::fabs(row.value - match->value) <= v.combined_tolerance;
        report.verdicts.push_back(std::move(v));
    }
    return report;
}

// Full-precision decimal formatting: 17 significant digits round-trip any
// finite double exactly.
inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline const char* kCsvHeader = "experiment,alpha,value,stderr,calls,entanglement,seed,shards,walltime_s";

inline void write_results(const std::vector<ResultRow>& rows, OutputFormat format,
                          const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    if (format == OutputFormat::csv) {
        out << kCsvHeader << "\n";
        for (const ResultRow& r : rows)
            out << r.experiment << ',' << format_full(r.alpha) << ',' << format_full(r.value)
                << ',' << format_full(r.std_error) << ',' << r.calls << ','
                << format_full(r.entanglement) << ',' << r.seed << ',' << r.shards << ','
                << format_full(r.walltime_s) << "\n";
    } else {
        nlohmann::json j = nlohmann::json::array();
        for (const ResultRow& r : rows)
            j.push_back({{"experiment", r.experiment},
                         {"alpha", r.alpha},
                         {"value", r.value},
                         {"stderr", r.std_error},
                         {"calls", r.calls},
                         {"entanglement", r.entanglement},
                         {"seed", r.seed},
                         {"shards", r.shards},
                         {"walltime_s", r.walltime_s}});
        out << j.dump(2) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::vector<ResultRow> read_results(OutputFormat format, const std::string& path) {
    std::vector<ResultRow> rows;
    if (format == OutputFormat::csv) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open for reading: " + path);
        std::string line;
        if (!std::getline(in, line) || line != kCsvHeader)
            throw std::runtime_error("bad results header in " + path);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<std::string> fields;
            std::stringstream ss(line);
            std::string field;
            while (std::getline(ss, field, ',')) fields.push_back(field);
            if (fields.size() != 9) throw std::runtime_error("bad results row in " + path);
            ResultRow r;
            r.experiment = fields[0];
            r.alpha = std::stod(fields[1]);
            r.value = std::stod(fields[2]);
            r.std_error = std::stod(fields[3]);
            r.calls = std::stoull(fields[4]);
            r.entanglement = std::stod(fields[5]);
            r.seed = std::stoull(fields[6]);
            r.shards = std::stoull(fields[7]);
            r.walltime_s = std::stod(fields[8]);
            rows.push_back(std::move(r));
        }
    } else {
        nlohmann::json j = nlohmann::json::parse(read_file_bytes(path));
        for (const auto& e : j) {
            ResultRow r;
            r.experiment = e.at("experiment").get<std::string>();
            r.alpha = e.at("alpha").get<double>();
            r.value = e.at("value").get<double>();
            r.std_error = e.at("stderr").get<double>();
            r.calls = e.at("calls").get<std::uint64_t>();
            r.entanglement = e.at("entanglement").get<double>();
            r.seed = e.at("seed").get<std::uint64_t>();
            r.shards = e.at("shards").get<std::uint64_t>();
            r.walltime_s = e.at("walltime_s").get<double>();
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

// Self-contained cross-checks of the independent code paths. Prints one
// line per check with both compared values; returns the number of failed
// checks. The error-function dependency is injectable so the test suite can
// prove a corrupted implementation is actually caught.
inline int verify(const RunConfig& cfg, std::ostream& out,
                  const std::function<double(double)>& erf_fn = {}) {
    const std::function<double(double)> erf_use =
        erf_fn ? erf_fn : std::function<double(double)>([](double x) { return erf_approx(x); });
    int failures = 0;
    auto report = [&](const char* name, bool ok, double a, double b, const char* tol) {
        out << (ok ? "[ ok ] " : "[FAIL] ") << name << ": " << format_full(a) << " vs "
            << format_full(b) << "  (tolerance " << tol << ")\n";
        if (!ok) ++failures;
    };

    // 1. Error-function reference values (4-decimal published anchors).
    {
        const double e2 = erf_use(2.0);
        const double e3 = erf_use(3.0);
        report("erf(2) reference", std::fabs(e2 - 0.9953) <= 2e-4, e2, 0.9953, "2e-4");
        report("erf(3) reference", std::fabs(e3 - 0.9999) <= 2e-4, e3, 0.9999, "2e-4");
    }

    // 2. Plain MC of e^(-x^2-y^2) on [-1,1]^2 against pi*erf(1)^2.
    {
        Integrand g{2, "gauss2d", 1.0, [](std::span<const double> x) {
                        return std::exp(-x[0] * x[0] - x[1] * x[1]);
                    }};
        const McEstimate mc = integrate_plain(g, Domain::unit_box(2), 1'000'000,
                                              RngStream(cfg.seed, 0, {0, 9001ull << 16}));
        const double ref = std::numbers::pi * erf_use(1.0) * erf_use(1.0);
        report("gaussian MC vs erf quadrature reference",
               std::fabs(mc.value - ref) <= 3.0 * mc.std_error, mc.value, ref, "3*stderr");
    }

    // 3+4. Harmonic purity: deterministic quadrature vs MC, and both under
    // the analytic bound. The 12-D integrand concentrates near a thin
    // diagonal ridge, so the MC needs a few million calls before its error
    // bar is trustworthy enough to gate on.
    {
        const double quad = harmonic_purity_quadrature(10.0, 64);
        const Integrand f = make_purity_harmonic(10.0);
        const McEstimate mc =
            shard_integrate(f, Domain::unit_box(12), 8'000'000, MiserParams::defaults_for(12),
                            cfg.seed, 1, IntegratorId::miser, {0, 9002ull << 16});
        report("harmonic purity quadrature vs MC", std::fabs(quad - mc.value) <= 3.0 * mc.std_error,
               quad, mc.value, "3*stderr");
        const double bound = harmonic_purity_bound(10.0);
        report("harmonic purity below bound",
               quad < bound && mc.value - 3.0 * mc.std_error < bound, quad, bound,
               "strict, minus 3*stderr for MC");
    }

    // 5. Grid purity vs Schmidt purity on random states.
    {
        RngStream stream(cfg.seed, 777);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const GridWavefunction psi = make_random_state(64, 64, stream);
            const double a = grid_purity(psi);
            const double b = schmidt_purity(psi).purity;
            worst = std::max(worst, std::fabs(a - b));
        }
        report("grid vs Schmidt purity (20 random states, worst gap)", worst <= 1e-10, worst,
               0.0, "1e-10");
    }

    // 6. Shard-count consistency on the harmonic family. The plain estimator
    // is used on both sides because its per-shard error bars stay honest on
    // this ridge-shaped integrand even at an eighth of the budget; the check
    // exercises exactly the same stream-splitting and merge logic as the
    // stratified path.
    {
        const Integrand f = make_purity_harmonic(10.0);
        const Domain dom = Domain::unit_box(12);
        const MiserParams params = MiserParams::defaults_for(12);
        const McEstimate one =
            shard_integrate(f, dom, 32'000'000, params, cfg.seed, 1, IntegratorId::plain,
                            {0, 9003ull << 16});
        const McEstimate eight =
            shard_integrate(f, dom, 32'000'000, params, cfg.seed, 8, IntegratorId::plain,
                            {0, 9003ull << 16});
        report("shards 1 vs 8 agreement", std::fabs(one.value - eight.value) <=
                                              3.0 * (one.std_error + eight.std_error),
               one.value, eight.value, "3*(stderr_1+stderr_8)");
    }

    out << (failures == 0 ? "verify: all checks passed\n"
                          : "verify: " + std::to_string(failures) + " check(s) FAILED\n");
    return failures;
}

}  // namespace purity_mc

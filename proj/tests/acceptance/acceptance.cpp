// Acceptance runner: one PASS/FAIL line per criterion.
//
//   rangecap_acceptance [--only 1,3,9] [--threads N] [--rerun-threads M]
//
// Criterion 11 reruns every selected criterion with --rerun-threads and
// compares the canonical JSON payloads byte for byte.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rangecap/backtrack.hpp"
#include "rangecap/capacity.hpp"
#include "rangecap/cli.hpp"
#include "rangecap/equilibrium.hpp"
#include "rangecap/experiments.hpp"
#include "rangecap/green.hpp"
#include "rangecap/json_io.hpp"
#include "rangecap/kernel.hpp"
#include "rangecap/parallel.hpp"
#include "rangecap/rng.hpp"
#include "rangecap/word_metric.hpp"

using namespace rangecap;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
    Json payload;
};

struct Criterion {
    int id;
    std::string title;
    double budget_seconds;
    std::function<Outcome(unsigned)> run;
};

std::string num(double v, int precision = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

std::vector<std::uint64_t> seed_range(std::uint64_t count)
{
    std::vector<std::uint64_t> s(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        s[i] = i + 1;
    }
    return s;
}

CapacityConfig green_solve()
{
    CapacityConfig c;
    c.method = CapacityMethod::GreenSolve;
    return c;
}

Outcome recurrence(unsigned)
{
    const Group z1 = Group::lattice_standard(1);
    const std::vector<GroupElement> origin{{0}};
    Outcome o{true, "", Json::array()};
    double worst = 0.0;
    for (int r : {10, 50, 100}) {
        const CapacityEstimate c = capacity_bracket(z1, origin, r);
        const double err = std::abs(c.bracket->second - 1.0 / r);
        worst = std::max(worst, err);
        o.passed = o.passed && err < 1e-8;
        o.payload.push_back(to_json(c));
    }
    o.detail = "max |upper - 1/R| = " + num(worst) + " (tol 1e-8)";
    return o;
}

Outcome singleton(unsigned threads)
{
    const Group z3 = Group::lattice_standard(3);
    const std::vector<GroupElement> e{z3.identity()};
    const CapacityEstimate cap = capacity_mc(z3, e, 10000, 2000, 1, threads);
    const GreenEstimate g = green_truncated(z3, z3.identity(), 800);
    const double product = cap.point * g.value;
    Outcome o;
    o.passed = product >= 0.9 && product <= 1.1;
    o.detail = "Cap({e}) G(e) = " + num(cap.point) + " * " + num(g.value, 6) + " = " + num(product) +
               " (want [0.9, 1.1])";
    o.payload = Json{{"capacity", to_json(cap)}, {"green", to_json(g)}};
    return o;
}

Outcome slln_transition(unsigned threads)
{
    const std::vector<std::size_t> grid{256, 512, 1024, 2048};
    const auto seeds = seed_range(20);
    Outcome o;

    const Group z5 = Group::lattice_standard(5);
    const LatticeGreen g5(5);
    const auto r5 = slln_experiment(z5, grid, seeds, green_solve(), &g5, threads);
    const double change5 = std::abs(r5.top_octave_relative_change);
    const bool ok5 = r5.mu_hat > 0.0 && change5 < 0.15;

    const Group z4 = Group::lattice_standard(4);
    const LatticeGreen g4(4);
    const auto r4 = slln_experiment(z4, grid, seeds, green_solve(), &g4, threads);
    const bool ok4 = r4.ratio_strictly_decreasing;

    const Group z2 = Group::lattice_standard(2);
    const auto r2 = slln_experiment(z2, grid, seeds, CapacityConfig{}, nullptr, threads);
    const bool ok2 = r2.mu_hat < 1e-3;

    std::string ratios4;
    for (const auto& row : r4.ratio_rows) {
        ratios4 += (ratios4.empty() ? "" : " > ") + num(row.mean);
    }
    o.passed = ok5 && ok4 && ok2;
    o.detail = "d=5 mu=" + num(r5.mu_hat) + " top-octave change " + num(change5) + "; d=4 C_n/n " + ratios4 +
               "; d=2 mu=" + num(r2.mu_hat);
    o.payload = Json{{"d5", to_json(r5)}, {"d4", to_json(r4)}, {"d2", to_json(r2)}};
    return o;
}

Outcome d3_exponent(unsigned threads)
{
    const Group z3 = Group::lattice_standard(3);
    const LatticeGreen g(3);
    const std::vector<std::size_t> grid{128, 256, 512, 1024, 2048, 4096};
    const auto r = exponent_fit(z3, grid, seed_range(20), green_solve(), &g, threads);
    Outcome o;
    o.passed = r.exponent.slope >= 0.40 && r.exponent.slope <= 0.60;
    o.detail = "alpha = " + num(r.exponent.slope) + " +- " + num(r.exponent.slope_stderr, 2) + " on n in [" +
               num(r.exponent.window_first) + ", " + num(r.exponent.window_last) + "] (want [0.40, 0.60])";
    o.payload = to_json(r);
    return o;
}

Outcome clt_proxy(unsigned threads)
{
    const Group z6 = Group::lattice_standard(6);
    const LatticeGreen g(6);
    const auto r = clt_experiment(z6, 1024, 300, 1, green_solve(), &g, threads);
    Outcome o;
    o.passed = r.ks_distance < 0.10 && std::abs(r.skewness) < 0.5 && r.variance_ratio_difference <= 0.25;
    o.detail = "KS " + num(r.ks_distance) + ", skew " + num(r.skewness) + ", Var/n " + num(r.half_variance_over_n) +
               " vs " + num(r.variance_over_n) + " (rel diff " + num(r.variance_ratio_difference) + ")";
    o.payload = to_json(r);
    return o;
}

Outcome dyadic(unsigned threads)
{
    const Group z5 = Group::lattice_standard(5);
    const LatticeGreen g(5);
    const std::vector<int> levels{1, 2, 3};
    const auto r = dyadic_sandwich_experiment(z5, 512, levels, seed_range(100), green_solve(), g, threads);
    std::size_t upper = r.halves_upper_violations;
    std::string margins;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        upper += r.upper_violations[i];
        margins += " L=" + std::to_string(levels[i]) + ":" + num(r.min_lower_margin[i]) + "/" +
                   std::to_string(r.lower_violations[i]);
    }
    Outcome o;
    o.passed = upper == 0;
    o.detail = std::to_string(upper) + " upper violations; min lower margin/violations" + margins;
    o.payload = to_json(r);
    return o;
}

Outcome backtrack(unsigned threads)
{
    constexpr std::uint64_t kSeed = 1;
    // range identity on longer two-dimensional paths
    const Group z2 = Group::lattice_standard(2);
    constexpr std::size_t kIdentitySamples = 10000;
    std::vector<char> identity_ok(kIdentitySamples, 0);
    parallel_for(kIdentitySamples, threads, [&](std::size_t i) {
        const WalkPath b = simulate_no_backtrack(z2, 64, kSeed, stream_id({streams::kBacktrack, 2, i}));
        auto xi = geometric_counts(z2, 32, kSeed, stream_id({streams::kGeometric, 2, i}));
        identity_ok[i] = range_identity_holds(insert_backtracks(b, std::move(xi))) ? 1 : 0;
    });
    std::size_t identity_failures = 0;
    for (char ok : identity_ok) {
        identity_failures += ok ? 0 : 1;
    }

    const Group z1 = Group::lattice_standard(1);
    const KernelTable k = exact_kernel(z1, 4);
    constexpr std::size_t kSamples = 1'000'000;
    constexpr std::size_t kChunks = 100;
    std::vector<std::array<std::size_t, 9>> counts(kChunks);
    parallel_for(kChunks, threads, [&](std::size_t c) {
        auto& local = counts[c];
        local.fill(0);
        for (std::size_t i = c * (kSamples / kChunks); i < (c + 1) * (kSamples / kChunks); ++i) {
            const WalkPath b = simulate_no_backtrack(z1, 4, kSeed, stream_id({streams::kBacktrack, 1, i}));
            auto xi = geometric_counts(z1, 2, kSeed, stream_id({streams::kGeometric, 1, i}));
            const BacktrackDecomposition d = insert_backtracks(b, std::move(xi));
            ++local[static_cast<std::size_t>(d.reconstructed.positions[4][0] + 4)];
        }
    });
    std::array<std::size_t, 9> total{};
    for (const auto& local : counts) {
        for (std::size_t x = 0; x < 9; ++x) {
            total[x] += local[x];
        }
    }
    double tv = 0.0;
    Json law = Json::array();
    for (int x = -4; x <= 4; ++x) {
        const double freq = static_cast<double>(total[static_cast<std::size_t>(x + 4)]) / kSamples;
        tv += std::abs(freq - k.probability(4, {x}));
        law.push_back(Json{{"x", x}, {"empirical", freq}, {"exact", k.probability(4, {x})}});
    }
    tv *= 0.5;
    Outcome o;
    o.passed = identity_failures == 0 && tv < 0.005;
    o.detail = std::to_string(identity_failures) + " range-identity failures in 10^4; TV(S~_4, p_4) = " + num(tv) +
               " (want < 0.005)";
    o.payload = Json{{"identity_failures", identity_failures}, {"tv", tv}, {"law", law}};
    return o;
}

Outcome decay(unsigned)
{
    const std::vector<std::size_t> grid2{4, 8, 16, 32, 64};
    const std::vector<std::size_t> grid3{4, 8, 16, 32};
    const std::vector<std::size_t> gridf{2, 3, 4, 5, 6, 7, 8, 9, 10};
    const auto d2 = kernel_decay_check(Group::lattice_standard(2), grid2);
    const auto d3 = kernel_decay_check(Group::lattice_standard(3), grid3);
    const auto f3 = kernel_decay_check(Group::free_product_z2(3), gridf);
    Outcome o;
    o.passed = std::abs(d2.loglog.slope + 1.0) <= 0.3 && std::abs(d3.loglog.slope + 1.5) <= 0.3 && f3.superpolynomial;
    o.detail = "d=2 slope " + num(d2.loglog.slope) + ", d=3 slope " + num(d3.loglog.slope) +
               ", free product N=3 superpolynomial=" + (f3.superpolynomial ? "yes" : "no");
    o.payload = Json{{"d2", to_json(d2)}, {"d3", to_json(d3)}, {"free_product", to_json(f3)}};
    return o;
}

Outcome variational(unsigned threads)
{
    const Group z3 = Group::lattice_standard(3);
    const Ball b4 = ball(z3, 4);
    const TruncatedGreen truncated(z3, 800);
    const LatticeGreen exact(3);
    constexpr std::size_t kSets = 20;
    std::vector<Json> rows(kSets);
    std::vector<char> inside(kSets, 0);
    std::vector<double> excess(kSets, 0.0);
    parallel_for(kSets, threads, [&](std::size_t s) {
        CounterRng rng(1, stream_id({streams::kExperiment, 9, s}));
        std::set<std::size_t> picked;
        while (picked.size() < 10) {
            picked.insert(rng.uniform_index(static_cast<std::uint32_t>(b4.size())));
        }
        std::vector<GroupElement> a;
        for (std::size_t i : picked) {
            a.push_back(b4.elements[i]);
        }
        const EquilibriumResult fw = equilibrium_measure(z3, a, truncated);
        BracketOptions opts;
        opts.green = &exact;
        const CapacityEstimate br = capacity_bracket(z3, a, 12, opts);
        const double value = 1.0 / fw.energy;
        const double lo = br.bracket->first - 1e-4;
        const double hi = br.bracket->second + 1e-4;
        inside[s] = value >= lo && value <= hi ? 1 : 0;
        excess[s] = std::max(lo - value, value - hi);
        Json members = Json::array();
        for (const auto& g : a) {
            members.push_back(element_to_json(g));
        }
        rows[s] = Json{{"set", members}, {"inverse_energy", value}, {"equilibrium", to_json(fw)},
                       {"bracket", to_json(br)}};
    });
    std::size_t misses = 0;
    double worst = -1e300;
    for (std::size_t s = 0; s < kSets; ++s) {
        misses += inside[s] ? 0 : 1;
        worst = std::max(worst, excess[s]);
    }
    Outcome o;
    o.passed = misses == 0;
    o.detail = std::to_string(misses) + " of 20 sets outside the widened bracket; closest approach " + num(-worst) +
               " inside";
    o.payload = rows;
    return o;
}

Outcome pair_green(unsigned threads)
{
    const std::vector<std::size_t> grid{128, 256, 512, 1024, 2048, 4096};
    const auto seeds = seed_range(20);
    const LatticeGreen g3(3);
    const auto r3 = pair_green_sum_check(Group::lattice_standard(3), grid, seeds, g3, threads);
    const LatticeGreen g5(5);
    const auto r5 = pair_green_sum_check(Group::lattice_standard(5), grid, seeds, g5, threads);
    Outcome o;
    o.passed = r3.exponent.slope >= 1.35 && r3.exponent.slope <= 1.65 && r5.exponent.slope >= 0.9 &&
               r5.exponent.slope <= 1.1;
    o.detail = "d=3 exponent " + num(r3.exponent.slope) + " (want [1.35, 1.65]); d=5 exponent " +
               num(r5.exponent.slope) + " (want [0.9, 1.1])";
    o.payload = Json{{"d3", to_json(r3)}, {"d5", to_json(r5)}};
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"rangecap acceptance criteria"};
    std::string only;
    unsigned threads = default_threads();
    unsigned rerun_threads = 0;
    app.add_option("--only", only, "comma separated criterion numbers");
    app.add_option("--threads", threads, "threads for the first run");
    app.add_option("--rerun-threads", rerun_threads, "threads for the determinism rerun (default: threads + 3)");
    CLI11_PARSE(app, argc, argv);
    if (rerun_threads == 0) {
        rerun_threads = threads + 3;
    }

    const std::vector<Criterion> criteria{
        {1, "recurrence: bracket upper bound is 1/R on Z", 5, recurrence},
        {2, "singleton identity Cap({e}) G(e) = 1 on Z^3", 60, singleton},
        {3, "SLLN phase transition", 600, slln_transition},
        {4, "d=3 capacity exponent", 600, d3_exponent},
        {5, "CLT proxy on Z^6", 1200, clt_proxy},
        {6, "dyadic decomposition inequalities on Z^5", 600, dyadic},
        {7, "double-backtrack construction", 120, backtrack},
        {8, "kernel decay", 120, decay},
        {9, "variational consistency", 300, variational},
        {10, "pair Green sum growth", 600, pair_green},
    };

    std::set<int> selected;
    if (!only.empty()) {
        for (auto v : parse_grid(only)) {
            selected.insert(static_cast<int>(v));
        }
    }
    const auto wanted = [&](int id) { return selected.empty() || selected.count(id) != 0; };

    bool all_passed = true;
    std::map<int, std::string> payloads;
    for (const auto& c : criteria) {
        if (!wanted(c.id)) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run(threads);
        } catch (const std::exception& e) {
            o.passed = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds < c.budget_seconds;
        const bool passed = o.passed && in_time;
        all_passed = all_passed && passed;
        payloads[c.id] = dump_canonical(o.payload);
        std::cout << (passed ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << "): " << o.detail
                  << " [" << num(seconds, 3) << " s, budget " << num(c.budget_seconds, 4) << " s"
                  << (in_time ? "" : ", OVER BUDGET") << "]" << std::endl;
    }

    if (wanted(11)) {
        std::size_t mismatches = 0;
        std::string which;
        const auto start = std::chrono::steady_clock::now();
        for (const auto& c : criteria) {
            if (!wanted(c.id) || payloads.count(c.id) == 0) {
                continue;
            }
            std::string again;
            try {
                again = dump_canonical(c.run(rerun_threads).payload);
            } catch (const std::exception& e) {
                again = std::string("exception: ") + e.what();
            }
            if (again != payloads[c.id]) {
                ++mismatches;
                which += " " + std::to_string(c.id);
            }
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool passed = mismatches == 0 && !payloads.empty();
        all_passed = all_passed && passed;
        std::cout << (passed ? "PASS" : "FAIL") << " criterion 11 (determinism across thread counts): "
                  << payloads.size() << " payloads rerun with " << rerun_threads << " threads vs " << threads << ", "
                  << mismatches << " differ" << (which.empty() ? "" : " (criteria" + which + ")") << " ["
                  << num(seconds, 3) << " s]" << std::endl;
    }
    return all_passed ? 0 : 1;
}

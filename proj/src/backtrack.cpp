#include "rangecap/backtrack.hpp"

#include <algorithm>
#include <string>

#include "rangecap/errors.hpp"
#include "rangecap/rng.hpp"

namespace rangecap {

namespace {

void require_nondegenerate(const Group& group)
{
    if (group.generator_count() < 2) {
        throw DegenerateGenerators("double-backtrack construction needs |Gamma| >= 2");
    }
}

}  // namespace

WalkPath simulate_no_backtrack(const Group& group, std::size_t n, std::uint64_t seed, std::uint64_t stream)
{
    require_nondegenerate(group);
    const auto k = static_cast<std::uint32_t>(group.generator_count());
    CounterRng rng(seed, stream);
    std::vector<std::uint32_t> steps;
    steps.reserve(n + 1);
    while (steps.size() < n) {
        if (steps.size() < 2) {
            steps.push_back(rng.uniform_index(k));
            continue;
        }
        // steps.size() is even here: we are choosing X_{2j+1}, X_{2j+2}
        const std::uint32_t last = steps.back();
        const std::uint32_t excluded = static_cast<std::uint32_t>(group.inverse_generator(last)) * k + last;
        std::uint32_t pair = rng.uniform_index(k * k - 1);
        if (pair >= excluded) {
            ++pair;
        }
        steps.push_back(pair / k);
        steps.push_back(pair % k);
    }
    steps.resize(n);
    WalkPath path = path_from_steps(group, std::move(steps));
    path.seed = seed;
    path.stream = stream;
    return path;
}

double backtrack_success_probability(const Group& group)
{
    const auto k = static_cast<double>(group.generator_count());
    return 1.0 - 1.0 / (k * k);
}

std::vector<std::uint32_t> geometric_counts(const Group& group, std::size_t count, std::uint64_t seed,
                                            std::uint64_t stream)
{
    require_nondegenerate(group);
    const auto k = static_cast<std::uint32_t>(group.generator_count());
    CounterRng rng(seed, stream);
    std::vector<std::uint32_t> out(count, 0);
    for (auto& xi : out) {
        // a failure is one specific pair out of k^2, i.e. probability 1 - p
        while (rng.uniform_index(k * k) == 0) {
            ++xi;
        }
    }
    return out;
}

BacktrackDecomposition insert_backtracks(const WalkPath& backbone, std::vector<std::uint32_t> counts)
{
    const std::size_t n = backbone.length();
    const std::size_t pairs = n / 2;
    if (counts.size() < pairs) {
        throw InsufficientCounts("need " + std::to_string(pairs) + " backtrack counts, got " +
                                 std::to_string(counts.size()));
    }
    counts.resize(pairs);
    const Group& group = backbone.group;

    BacktrackDecomposition d{backbone, std::move(counts), {0}, backbone, {}};
    std::vector<std::uint32_t> steps;
    for (std::size_t i = 0; i < std::min<std::size_t>(2, n); ++i) {
        steps.push_back(backbone.steps[i]);
    }
    for (std::size_t k = 1; k <= pairs; ++k) {
        const std::uint64_t xi = d.counts[k - 1];
        const std::uint64_t before = d.partial_sums.back();
        d.partial_sums.push_back(before + xi);
        d.intervals.emplace_back(2 * k + 2 * before + 1, 2 * k + 2 * (before + xi));
        const std::uint32_t x = backbone.steps[2 * k - 1];
        const auto x_inv = static_cast<std::uint32_t>(group.inverse_generator(x));
        for (std::uint64_t j = 0; j < xi; ++j) {
            steps.push_back(x_inv);
            steps.push_back(x);
        }
        for (std::size_t i = 2 * k; i < std::min(2 * k + 2, n); ++i) {
            steps.push_back(backbone.steps[i]);
        }
    }
    d.reconstructed = path_from_steps(group, std::move(steps), backbone.positions.front());
    d.reconstructed.seed = backbone.seed;
    d.reconstructed.stream = backbone.stream;
    return d;
}

bool range_identity_holds(const BacktrackDecomposition& d)
{
    const auto& hat = d.backbone.positions;
    const auto& tilde = d.reconstructed.positions;
    ElementSet a;
    ElementSet b;
    std::size_t hat_next = 0;
    std::size_t tilde_next = 0;
    for (std::size_t k = 0; k < d.partial_sums.size(); ++k) {
        const std::size_t hat_end = std::min<std::size_t>(2 * k, hat.size() - 1);
        const std::size_t tilde_end = 2 * k + 2 * d.partial_sums[k];
        if (hat_end != 2 * k || tilde_end >= tilde.size()) {
            return false;
        }
        for (; hat_next <= hat_end; ++hat_next) {
            a.insert(hat[hat_next]);
        }
        // b only grows, so checking the newly added members keeps b within a
        for (; tilde_next <= tilde_end; ++tilde_next) {
            if (b.insert(tilde[tilde_next]).second && a.count(tilde[tilde_next]) == 0) {
                return false;
            }
        }
        if (a.size() != b.size()) {
            return false;
        }
    }
    return true;
}

bool has_no_even_double_backtrack(const WalkPath& path)
{
    const auto& s = path.positions;
    for (std::size_t n = 4; n < s.size(); n += 2) {
        if (s[n - 1] == s[n - 3] && s[n] == s[n - 2]) {
            return false;
        }
    }
    return true;
}

}  // namespace rangecap

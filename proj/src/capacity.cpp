#include "rangecap/capacity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "rangecap/errors.hpp"
#include "rangecap/parallel.hpp"
#include "rangecap/rng.hpp"

namespace rangecap {

std::string_view capacity_method_name(CapacityMethod m) noexcept
{
    switch (m) {
    case CapacityMethod::EscapeMc:
        return "escape-mc";
    case CapacityMethod::HarmonicBracket:
        return "harmonic-bracket";
    case CapacityMethod::VariationalLower:
        return "variational-lower";
    case CapacityMethod::JainOreyRange:
        return "jain-orey-range";
    case CapacityMethod::GreenSolve:
        return "green-solve";
    }
    return "unknown";
}

CapacityMethod parse_capacity_method(std::string_view name)
{
    for (auto m : {CapacityMethod::EscapeMc, CapacityMethod::HarmonicBracket, CapacityMethod::VariationalLower,
                   CapacityMethod::JainOreyRange, CapacityMethod::GreenSolve}) {
        if (capacity_method_name(m) == name) {
            return m;
        }
    }
    throw ValidationError("unknown capacity method: " + std::string(name));
}

FiniteSet::FiniteSet(std::span<const GroupElement> elements)
{
    members_.reserve(elements.size());
    lookup_.reserve(elements.size());
    for (const auto& g : elements) {
        if (lookup_.insert(g).second) {
            members_.push_back(g);
        }
    }
    const std::size_t bits = std::bit_ceil(std::max<std::size_t>(64, 16 * members_.size()));
    filter_.assign(bits / 64, 0);
    filter_mask_ = bits - 1;
    for (const auto& g : members_) {
        const std::uint64_t h = g.digest() & filter_mask_;
        filter_[h >> 6] |= std::uint64_t{1} << (h & 63);
    }
}

bool FiniteSet::contains(const GroupElement& g) const
{
    if (members_.empty()) {
        return false;
    }
    const std::uint64_t h = g.digest() & filter_mask_;
    if ((filter_[h >> 6] >> (h & 63) & 1) == 0) {
        return false;
    }
    return lookup_.count(g) != 0;
}

EscapeEstimate escape_mc(const Group& group, const FiniteSet& a, const GroupElement& g, std::size_t horizon,
                         std::size_t trials, std::uint64_t seed)
{
    if (trials == 0) {
        throw ValidationError("escape_mc needs at least one trial");
    }
    const auto k = static_cast<std::uint32_t>(group.generator_count());
    const std::size_t half = horizon / 2;
    const std::uint64_t key = g.digest();
    std::size_t escaped = 0;
    std::size_t escaped_half = 0;
    GroupElement pos;
    for (std::size_t t = 0; t < trials; ++t) {
        CounterRng rng(seed, stream_id({streams::kEscape, key, t}));
        pos = g;
        std::size_t returned_at = 0;
        for (std::size_t step = 1; step <= horizon; ++step) {
            group.step(pos, rng.uniform_index(k));
            if (a.contains(pos)) {
                returned_at = step;
                break;
            }
        }
        if (returned_at == 0) {
            ++escaped;
        }
        if (returned_at == 0 || returned_at > half) {
            ++escaped_half;
        }
    }
    EscapeEstimate est;
    const auto n = static_cast<double>(trials);
    est.probability = static_cast<double>(escaped) / n;
    est.half_horizon_probability = static_cast<double>(escaped_half) / n;
    // binomial standard error with the n - 1 convention; 0 when trials == 1
    est.stderr = trials > 1 ? std::sqrt(est.probability * (1.0 - est.probability) / (n - 1.0)) : 0.0;
    est.horizon = horizon;
    est.trials = trials;
    return est;
}

CapacityEstimate capacity_mc(const Group& group, std::span<const GroupElement> a, std::size_t horizon,
                             std::size_t trials, std::uint64_t seed, unsigned threads)
{
    const FiniteSet set(a);
    CapacityEstimate est;
    est.method = CapacityMethod::EscapeMc;
    est.set_size = set.size();
    est.horizon = horizon;
    est.trials = trials;
    est.seed = seed;
    if (set.empty()) {
        est.half_horizon_point = 0.0;
        return est;
    }
    std::vector<EscapeEstimate> per_point(set.size());
    parallel_for(set.size(), threads, [&](std::size_t i) {
        per_point[i] = escape_mc(group, set, set.members()[i], horizon, trials, seed);
    });
    double point = 0.0, half = 0.0, var = 0.0;
    for (const auto& e : per_point) {
        point += e.probability;
        half += e.half_horizon_probability;
        var += e.stderr * e.stderr;
    }
    est.point = point;
    est.half_horizon_point = half;
    est.stderr = std::sqrt(var);
    return est;
}

namespace {

struct HarmonicGrid {
    // interior nodes rho <= radius - 1, in ball order
    std::size_t interior = 0;
    // neighbours[v * K + j]: interior index, or -1 for the exterior boundary
    std::vector<std::int64_t> neighbours;
    std::vector<char> in_a;
    std::vector<std::size_t> a_nodes;
    std::vector<GroupElement> boundary;
};

HarmonicGrid build_grid(const Group& group, const FiniteSet& a, int radius, std::size_t cap)
{
    const Ball b = ball(group, radius, cap);
    HarmonicGrid grid;
    grid.interior = b.count_within(radius - 1);
    const std::size_t k = group.generator_count();
    grid.neighbours.assign(grid.interior * k, -1);
    grid.in_a.assign(grid.interior, 0);
    ElementSet boundary_seen;
    for (std::size_t v = 0; v < grid.interior; ++v) {
        for (std::size_t j = 0; j < k; ++j) {
            const GroupElement w = group.multiply(b.elements[v], group.generators()[j]);
            const std::size_t idx = b.index.at(w);
            if (idx < grid.interior) {
                grid.neighbours[v * k + j] = static_cast<std::int64_t>(idx);
            } else if (boundary_seen.insert(w).second) {
                grid.boundary.push_back(w);
            }
        }
    }
    for (const auto& g : a.members()) {
        auto it = b.index.find(g);
        if (it == b.index.end() || it->second >= grid.interior) {
            throw ValidationError("capacity_bracket needs A inside the ball of radius " + std::to_string(radius - 1));
        }
        grid.in_a[it->second] = 1;
        grid.a_nodes.push_back(it->second);
    }
    return grid;
}

}  // namespace

CapacityEstimate capacity_bracket(const Group& group, std::span<const GroupElement> a, int radius,
                                  const BracketOptions& options)
{
    if (radius < 1) {
        throw ValidationError("capacity_bracket needs radius >= 1");
    }
    const FiniteSet set(a);
    CapacityEstimate est;
    est.method = CapacityMethod::HarmonicBracket;
    est.set_size = set.size();
    est.radius = radius;
    if (set.empty()) {
        est.bracket = std::pair{0.0, 0.0};
        return est;
    }
    const HarmonicGrid grid = build_grid(group, set, radius, options.cap);
    const std::size_t k = group.generator_count();
    const double inv_k = 1.0 / static_cast<double>(k);

    // h(v) = P_v(hit A before leaving the ball), exits valued 0
    std::vector<double> h(grid.interior, 0.0), next(grid.interior, 0.0);
    for (std::size_t v : grid.a_nodes) {
        h[v] = next[v] = 1.0;
    }
    auto neighbour_value = [&](const std::vector<double>& values, std::size_t v, std::size_t j) {
        const std::int64_t w = grid.neighbours[v * k + j];
        return w < 0 ? 0.0 : values[static_cast<std::size_t>(w)];
    };
    std::size_t sweep = 0;
    double residual = 0.0;
    for (; sweep < options.max_sweeps; ++sweep) {
        residual = 0.0;
        for (std::size_t v = 0; v < grid.interior; ++v) {
            if (grid.in_a[v]) {
                continue;
            }
            double s = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                s += neighbour_value(h, v, j);
            }
            next[v] = s * inv_k;
            residual = std::max(residual, std::abs(next[v] - h[v]));
        }
        h.swap(next);
        if (residual < options.tolerance) {
            ++sweep;
            break;
        }
    }
    est.iterations = sweep;
    if (residual >= options.tolerance) {
        throw NonConvergence("harmonic solver did not reach residual " + std::to_string(options.tolerance) +
                             " within " + std::to_string(options.max_sweeps) + " sweeps");
    }

    double upper = 0.0;
    for (std::size_t v : grid.a_nodes) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            s += neighbour_value(h, v, j);
        }
        upper += 1.0 - s * inv_k;
    }

    // Escaping to infinity means reaching the boundary first and then never
    // coming back; from a boundary point y the return chance is at most
    // sum_b G(y^{-1} b) / G(e).
    double lower = 0.0;
    if (options.green != nullptr) {
        const GreenSource& green = *options.green;
        const double g0 = green(group.identity());
        double worst = 0.0;
        for (const auto& y : grid.boundary) {
            const GroupElement y_inv = group.inverse(y);
            double s = 0.0;
            for (const auto& b : set.members()) {
                s += green(group.multiply(y_inv, b));
            }
            worst = std::max(worst, s / g0);
        }
        lower = upper * std::max(0.0, 1.0 - worst);
    }
    est.bracket = std::pair{lower, upper};
    est.point = 0.5 * (lower + upper);
    return est;
}

CapacityEstimate capacity_green_solve(const Group& group, std::span<const GroupElement> a,
                                      const GreenSource& green, std::vector<double>* equilibrium)
{
    const FiniteSet set(a);
    CapacityEstimate est;
    est.method = CapacityMethod::GreenSolve;
    est.set_size = set.size();
    const auto n = static_cast<Eigen::Index>(set.size());
    if (n == 0) {
        if (equilibrium) {
            equilibrium->clear();
        }
        return est;
    }
    const auto& m = set.members();
    std::vector<GroupElement> inverses;
    inverses.reserve(m.size());
    for (const auto& g : m) {
        inverses.push_back(group.inverse(g));
    }
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) {
            const double v = green(group.multiply(inverses[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(j)]));
            gram(i, j) = v;
            gram(j, i) = v;
        }
    }
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd x;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() == Eigen::Success) {
        x = llt.solve(ones);
    } else {
        x = gram.fullPivLu().solve(ones);
    }
    est.point = x.sum();
    if (equilibrium) {
        equilibrium->assign(x.data(), x.data() + n);
    }
    return est;
}

CapacityEstimate capacity_of_set(const Group& group, std::span<const GroupElement> a, std::size_t time_scale,
                                 const CapacityConfig& config, std::uint64_t seed, const GreenSource* green)
{
    switch (config.method) {
    case CapacityMethod::EscapeMc:
    case CapacityMethod::JainOreyRange: {
        const auto horizon = static_cast<std::size_t>(
            std::ceil(config.horizon_factor * static_cast<double>(std::max<std::size_t>(time_scale, 1))));
        CapacityEstimate est = capacity_mc(group, a, horizon, config.trials, seed, config.threads);
        est.method = config.method;
        return est;
    }
    case CapacityMethod::GreenSolve:
        if (green == nullptr) {
            throw ValidationError("green-solve capacity needs a Green source");
        }
        return capacity_green_solve(group, a, *green);
    case CapacityMethod::HarmonicBracket:
    case CapacityMethod::VariationalLower:
        break;
    }
    throw ValidationError("capacity method " + std::string(capacity_method_name(config.method)) +
                          " is not available for range experiments");
}

CapacityEstimate capacity_of_range(const Group& group, const RangeSet& range, std::size_t path_length,
                                   const CapacityConfig& config, std::uint64_t seed, const GreenSource* green)
{
    return capacity_of_set(group, range.members, path_length, config, seed, green);
}

}  // namespace rangecap

#include "rangecap/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rangecap/errors.hpp"

namespace rangecap {

bool SimplexMeasure::valid(double tolerance) const
{
    if (support.size() != weights.size() || support.empty()) {
        return false;
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) {
            return false;
        }
        total += w;
    }
    return std::abs(total - 1.0) <= tolerance;
}

GreenMatrix green_matrix(const Group& group, std::span<const GroupElement> a, const GreenSource& green)
{
    GreenMatrix m;
    m.size = a.size();
    m.values.assign(m.size * m.size, 0.0);
    for (std::size_t i = 0; i < m.size; ++i) {
        const GroupElement inv = group.inverse(a[i]);
        for (std::size_t j = i; j < m.size; ++j) {
            const double v = green(group.multiply(inv, a[j]));
            m.values[i * m.size + j] = v;
            m.values[j * m.size + i] = v;
        }
    }
    return m;
}

double energy(const GreenMatrix& g, std::span<const double> weights)
{
    if (weights.size() != g.size) {
        throw ValidationError("measure and Green matrix sizes differ");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < g.size; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < g.size; ++j) {
            row += g(i, j) * weights[j];
        }
        total += weights[i] * row;
    }
    return total;
}

double energy(const Group& group, const SimplexMeasure& nu, const GreenSource& green)
{
    return energy(green_matrix(group, nu.support, green), nu.weights);
}

EquilibriumResult equilibrium_measure(const Group& group, std::span<const GroupElement> a,
                                      const GreenSource& green, std::size_t max_iterations, double tolerance)
{
    const FiniteSet set(a);
    if (set.empty()) {
        throw ValidationError("equilibrium measure of an empty set");
    }
    const auto& support = set.members();
    const GreenMatrix g = green_matrix(group, support, green);
    const std::size_t n = g.size;

    // start from the vertex with the smallest diagonal entry
    std::vector<double> nu(n, 0.0);
    std::size_t start = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (g(i, i) < g(start, start)) {
            start = i;
        }
    }
    nu[start] = 1.0;
    std::vector<double> gnu(n);
    for (std::size_t i = 0; i < n; ++i) {
        gnu[i] = g(i, start);
    }

    EquilibriumResult result;
    double e = g(start, start);
    double gap = std::numeric_limits<double>::infinity();
    std::size_t t = 0;
    for (; t < max_iterations; ++t) {
        const auto best = static_cast<std::size_t>(std::min_element(gnu.begin(), gnu.end()) - gnu.begin());
        // <grad, nu - s> with grad = 2 G nu and s the best vertex
        gap = 2.0 * (e - gnu[best]);
        if (gap < tolerance) {
            result.converged = true;
            break;
        }
        const double step = 2.0 / (static_cast<double>(t) + 2.0);
        const double old_gnu_best = gnu[best];
        for (std::size_t i = 0; i < n; ++i) {
            nu[i] *= 1.0 - step;
            gnu[i] = (1.0 - step) * gnu[i] + step * g(i, best);
        }
        nu[best] += step;
        // E((1-s) nu + s delta_b) = (1-s)^2 E + 2 s (1-s) (G nu)_b + s^2 G_bb
        e = (1.0 - step) * (1.0 - step) * e + 2.0 * step * (1.0 - step) * old_gnu_best +
            step * step * g(best, best);
    }
    // refresh from scratch to drop accumulated rounding
    e = energy(g, nu);
    double min_gnu = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row += g(i, j) * nu[j];
        }
        min_gnu = std::min(min_gnu, row);
    }
    gap = 2.0 * (e - min_gnu);
    result.iterations = t;
    result.energy = e;
    result.gap = gap;
    result.measure.support = support;
    result.measure.weights = std::move(nu);

    CapacityEstimate& est = result.estimate;
    est.method = CapacityMethod::VariationalLower;
    est.set_size = n;
    est.point = 1.0 / e;
    est.iterations = t;
    est.converged = result.converged;
    const double floor_energy = e - std::max(0.0, gap);
    if (floor_energy > 0.0) {
        est.bracket = std::pair{1.0 / e, 1.0 / floor_energy};
    }
    return result;
}

SimplexMeasure empirical_measure(const WalkPath& path, std::size_t n)
{
    if (n == 0 || n > path.length()) {
        throw WindowOutOfBounds("empirical measure needs 1 <= n <= path length");
    }
    SimplexMeasure nu;
    ElementMap<std::size_t> slot;
    std::vector<std::size_t> counts;
    for (std::size_t k = 1; k <= n; ++k) {
        auto [it, inserted] = slot.try_emplace(path.positions[k], nu.support.size());
        if (inserted) {
            nu.support.push_back(path.positions[k]);
            counts.push_back(0);
        }
        ++counts[it->second];
    }
    nu.weights.reserve(counts.size());
    for (auto c : counts) {
        nu.weights.push_back(static_cast<double>(c) / static_cast<double>(n));
    }
    return nu;
}

}  // namespace rangecap

#include "rangecap/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "rangecap/errors.hpp"

namespace rangecap {

double KernelTable::probability(std::size_t k, const GroupElement& g) const
{
    if (k >= distributions.size()) {
        return 0.0;
    }
    for (const auto& [h, p] : distributions[k]) {
        if (h == g) {
            return p;
        }
    }
    return 0.0;
}

KernelTable::Distribution KernelTable::sorted(std::size_t k) const
{
    Distribution d = distributions.at(k);
    std::sort(d.begin(), d.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return d;
}

KernelTable exact_kernel(const Group& group, std::size_t n_max, double prune_eps, std::size_t cap)
{
    if (prune_eps < 0.0) {
        throw ValidationError("prune_eps must be >= 0");
    }
    KernelTable table;
    table.horizon = n_max;
    table.distributions.push_back({{group.identity(), 1.0}});
    table.pruned_mass.push_back(0.0);
    const double w = 1.0 / static_cast<double>(group.generator_count());
    for (std::size_t k = 0; k < n_max; ++k) {
        const auto& cur = table.distributions.back();
        KernelTable::Distribution next;
        ElementMap<std::size_t> slot;
        slot.reserve(cur.size() * 2);
        for (const auto& [h, p] : cur) {
            const double share = p * w;
            for (std::size_t s = 0; s < group.generator_count(); ++s) {
                GroupElement g = h;
                group.step(g, s);
                auto [it, inserted] = slot.emplace(g, next.size());
                if (inserted) {
                    if (next.size() >= cap) {
                        throw BallTooLarge("kernel support at step " + std::to_string(k + 1) + " exceeds cap of " +
                                               std::to_string(cap) + " elements",
                                           static_cast<int>(k));
                    }
                    next.emplace_back(std::move(g), share);
                } else {
                    next[it->second].second += share;
                }
            }
        }
        double pruned = table.pruned_mass.back();
        if (prune_eps > 0.0) {
            KernelTable::Distribution kept;
            kept.reserve(next.size());
            for (auto& entry : next) {
                if (entry.second < prune_eps) {
                    pruned += entry.second;
                } else {
                    kept.push_back(std::move(entry));
                }
            }
            next = std::move(kept);
        }
        table.distributions.push_back(std::move(next));
        table.pruned_mass.push_back(pruned);
    }
    return table;
}

LatticeKernelSeries::LatticeKernelSeries(int dim, std::size_t n_max) : dim_(dim), n_max_(n_max)
{
    if (dim < 1) {
        throw ValidationError("lattice dimension must be >= 1");
    }
    log_factorial_.resize(n_max + 1);
    for (std::size_t k = 0; k <= n_max; ++k) {
        log_factorial_[k] = std::lgamma(static_cast<double>(k) + 1.0);
    }
    for (int c = 2; c <= dim; ++c) {
        const double lp = std::log(1.0 / c);
        const double lq = std::log(1.0 - 1.0 / c);
        std::vector<double> table((n_max + 1) * (n_max + 2) / 2);
        for (std::size_t k = 0; k <= n_max; ++k) {
            for (std::size_t m = 0; m <= k; ++m) {
                const double lw = log_factorial_[k] - log_factorial_[m] - log_factorial_[k - m] +
                                  static_cast<double>(m) * lp + static_cast<double>(k - m) * lq;
                table[k * (k + 1) / 2 + m] = std::exp(lw);
            }
        }
        weights_.push_back(std::move(table));
    }
}

std::vector<double> LatticeKernelSeries::one_dim(Coord y) const
{
    std::vector<double> q(n_max_ + 1, 0.0);
    const auto ay = static_cast<std::size_t>(std::abs(y));
    const double log2 = std::log(2.0);
    for (std::size_t m = ay; m <= n_max_; m += 2) {
        const std::size_t up = (m + ay) / 2;
        q[m] = std::exp(log_factorial_[m] - log_factorial_[up] - log_factorial_[m - up] -
                        static_cast<double>(m) * log2);
    }
    return q;
}

std::vector<double> LatticeKernelSeries::series(const GroupElement& x) const
{
    if (x.size() != static_cast<std::size_t>(dim_)) {
        throw ValidationError("target dimension does not match lattice dimension");
    }
    // f holds the kernel of the walk restricted to coordinates j..d-1
    std::vector<double> f = one_dim(x[static_cast<std::size_t>(dim_ - 1)]);
    for (int j = dim_ - 2; j >= 0; --j) {
        const int c = dim_ - j;
        const auto& w = weights_[static_cast<std::size_t>(c - 2)];
        const std::vector<double> q = one_dim(x[static_cast<std::size_t>(j)]);
        std::vector<double> g(n_max_ + 1, 0.0);
        for (std::size_t k = 0; k <= n_max_; ++k) {
            const double* row = &w[k * (k + 1) / 2];
            double acc = 0.0;
            for (std::size_t m = 0; m <= k; ++m) {
                if (q[m] != 0.0) {
                    acc += row[m] * q[m] * f[k - m];
                }
            }
            g[k] = acc;
        }
        f = std::move(g);
    }
    return f;
}

}  // namespace rangecap

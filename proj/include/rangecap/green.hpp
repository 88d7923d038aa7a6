#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "rangecap/group.hpp"
#include "rangecap/kernel.hpp"

namespace rangecap {

enum class GreenMethod { TruncatedKernel, MonteCarlo, LatticeIntegral };

std::string_view green_method_name(GreenMethod m) noexcept;

/// G(g) = sum_k p_k(g), the expected number of visits to g from e, or an
/// estimate of it.
struct GreenEstimate {
    GroupElement target;
    double value = 0.0;
    GreenMethod method = GreenMethod::TruncatedKernel;
    /// Truncation horizon (kernel methods) or walk horizon (Monte Carlo).
    std::size_t horizon = 0;
    std::size_t samples = 0;
    /// Truncated value at twice the horizon; the increment gauges the tail.
    std::optional<double> doubled_horizon_value;
    /// Monte Carlo standard error.
    double stderr = 0.0;
    /// The value is a lower bound of G(g) with an uncontrolled tail.
    bool lower_bound_only = false;
};

/// Source of Green values G(x) for the difference element x = g1^{-1} g2.
/// Implementations are safe to query from several threads.
class GreenSource {
public:
    virtual ~GreenSource() = default;
    virtual double operator()(const GroupElement& x) const = 0;
    virtual GreenMethod method() const noexcept = 0;
    virtual std::size_t horizon() const noexcept { return 0; }
};

/// Truncated Green function G_N(x) = sum_{k <= N} p_k(x).
///
/// Standard lattices use LatticeKernelSeries per target (cached modulo the
/// hyperoctahedral symmetry); other groups run exact_kernel once and keep
/// the summed table.
class TruncatedGreen final : public GreenSource {
public:
    TruncatedGreen(const Group& group, std::size_t horizon, std::size_t cap = kDefaultBallCap);

    double operator()(const GroupElement& x) const override;
    GreenMethod method() const noexcept override { return GreenMethod::TruncatedKernel; }
    std::size_t horizon() const noexcept override { return horizon_; }

private:
    Group group_;
    std::size_t horizon_;
    std::unique_ptr<LatticeKernelSeries> series_;
    ElementMap<double> table_;
    mutable ElementMap<double> cache_;
    mutable std::shared_mutex mutex_;
};

/// Exact (infinite horizon) Green function of Z^d, d >= 3, standard
/// generators, from the continuous-time representation
///   G(x) = d * int_0^inf prod_j e^{-s} I_{x_j}(s) ds
/// evaluated by Gauss-Legendre panels in log s plus an asymptotic tail.
/// Absolute accuracy is about 1e-11.
class LatticeGreen final : public GreenSource {
public:
    explicit LatticeGreen(int dim);

    double operator()(const GroupElement& x) const override;
    GreenMethod method() const noexcept override { return GreenMethod::LatticeIntegral; }

    int dim() const noexcept { return dim_; }
    std::size_t cache_size() const;

private:
    double evaluate(const GroupElement& key) const;
    void grow_table(int max_order) const;

    int dim_;
    std::vector<double> nodes_;    // s values
    std::vector<double> weights_;  // quadrature weight including ds/du = s
    double tail_start_;
    mutable int max_order_ = -1;
    mutable std::vector<double> bessel_;  // [node * (max_order_ + 1) + k] = e^{-s} I_k(s)
    mutable ElementMap<double> cache_;
    mutable std::shared_mutex mutex_;
};

/// Canonical representative of x under coordinate permutations and sign
/// changes (sorted absolute values); G is invariant under these on Z^d.
GroupElement lattice_symmetry_key(const GroupElement& x);

/// G_{n_max}(g) with the value at horizon 2 n_max for comparison.
GreenEstimate green_truncated(const Group& group, const GroupElement& g, std::size_t n_max,
                              std::size_t cap = kDefaultBallCap);

/// Monte Carlo mean number of visits to g during times 0..horizon.
GreenEstimate green_mc(const Group& group, const GroupElement& g, std::size_t horizon, std::size_t trials,
                       std::uint64_t seed);

/// G(A, B) = sum_{a in A, b in B} G(a^{-1} b).
double cross_green(const Group& group, std::span<const GroupElement> a, std::span<const GroupElement> b,
                   const GreenSource& green);

/// Pick the most accurate Green source available: LatticeGreen for standard
/// lattices with d >= 3, otherwise TruncatedGreen at `horizon`.
std::unique_ptr<GreenSource> default_green_source(const Group& group, std::size_t horizon,
                                                  std::size_t cap = kDefaultBallCap);

}  // namespace rangecap

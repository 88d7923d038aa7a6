#include "rangecap/green.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>

#include "rangecap/errors.hpp"
#include "rangecap/rng.hpp"
#include "rangecap/stats.hpp"

namespace rangecap {

std::string_view green_method_name(GreenMethod m) noexcept
{
    switch (m) {
    case GreenMethod::TruncatedKernel:
        return "truncated-kernel";
    case GreenMethod::MonteCarlo:
        return "monte-carlo";
    case GreenMethod::LatticeIntegral:
        return "lattice-integral";
    }
    return "unknown";
}

GroupElement lattice_symmetry_key(const GroupElement& x)
{
    GroupElement key = x;
    for (std::size_t j = 0; j < key.size(); ++j) {
        key[j] = std::abs(key[j]);
    }
    std::sort(key.storage().begin(), key.storage().end());
    return key;
}

TruncatedGreen::TruncatedGreen(const Group& group, std::size_t horizon, std::size_t cap)
    : group_(group), horizon_(horizon)
{
    if (group.is_standard_lattice()) {
        series_ = std::make_unique<LatticeKernelSeries>(group.dim(), horizon);
        return;
    }
    const KernelTable k = exact_kernel(group, horizon, 0.0, cap);
    for (const auto& dist : k.distributions) {
        for (const auto& [g, p] : dist) {
            table_[g] += p;
        }
    }
}

double TruncatedGreen::operator()(const GroupElement& x) const
{
    if (!series_) {
        auto it = table_.find(x);
        return it == table_.end() ? 0.0 : it->second;
    }
    const GroupElement key = lattice_symmetry_key(x);
    {
        std::shared_lock lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) {
            return it->second;
        }
    }
    const std::vector<double> s = series_->series(key);
    double total = 0.0;
    for (double p : s) {
        total += p;
    }
    std::unique_lock lock(mutex_);
    cache_.emplace(key, total);
    return total;
}

namespace {

// log-s integration window and panel layout for LatticeGreen
constexpr double kLogSMin = -30.0;
constexpr double kTailStart = 1e8;
constexpr double kPanelWidth = 0.25;
constexpr std::size_t kPanelPoints = 10;

}  // namespace

LatticeGreen::LatticeGreen(int dim) : dim_(dim), tail_start_(kTailStart)
{
    if (dim < 3) {
        throw ValidationError("the lattice Green function is finite only for d >= 3");
    }
    const double u_max = std::log(kTailStart);
    const auto panels = static_cast<std::size_t>(std::ceil((u_max - kLogSMin) / kPanelWidth));
    const double width = (u_max - kLogSMin) / static_cast<double>(panels);
    gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(kPanelPoints);
    for (std::size_t p = 0; p < panels; ++p) {
        const double a = kLogSMin + width * static_cast<double>(p);
        for (std::size_t i = 0; i < kPanelPoints; ++i) {
            double u = 0, w = 0;
            gsl_integration_glfixed_point(a, a + width, i, &u, &w, table);
            const double s = std::exp(u);
            nodes_.push_back(s);
            weights_.push_back(w * s);
        }
    }
    gsl_integration_glfixed_table_free(table);
    grow_table(32);
}

void LatticeGreen::grow_table(int max_order) const
{
    if (max_order <= max_order_) {
        return;
    }
    // Orders are filled in fixed blocks, each from one downward recurrence
    // ending at the block's last order. A value therefore never depends on
    // how far the table had grown when it was first needed, which keeps
    // cached Green values independent of query order.
    constexpr int kBlock = 64;
    const int new_max = (max_order / kBlock + 1) * kBlock - 1;
    const auto old_width = static_cast<std::size_t>(max_order_ + 1);
    const auto width = static_cast<std::size_t>(new_max + 1);
    std::vector<double> table(nodes_.size() * width, 0.0);
    std::vector<double> scratch(width);
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        std::copy_n(bessel_.begin() + static_cast<std::ptrdiff_t>(i * old_width), old_width, &table[i * width]);
        for (int first = max_order_ + 1; first <= new_max; first += kBlock) {
            const int last = first + kBlock - 1;
            int status = gsl_sf_bessel_In_scaled_array(0, last, nodes_[i], scratch.data());
            for (int k = first; k <= last; ++k) {
                double v = scratch[static_cast<std::size_t>(k)];
                if (status != GSL_SUCCESS) {
                    // underflow of high orders at tiny s: evaluate one by one, zeros allowed
                    gsl_sf_result r;
                    v = gsl_sf_bessel_In_scaled_e(k, nodes_[i], &r) == GSL_SUCCESS ? r.val : 0.0;
                }
                table[i * width + static_cast<std::size_t>(k)] = v;
            }
        }
    }
    gsl_set_error_handler(old);
    bessel_ = std::move(table);
    max_order_ = new_max;
}

double LatticeGreen::evaluate(const GroupElement& key) const
{
    const auto width = static_cast<std::size_t>(max_order_ + 1);
    // Summed from large s down; past the peak the integrand falls like
    // (s/2)^k / k! and the remaining nodes are negligible.
    double integral = 0.0;
    double previous = 0.0;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        const double* row = &bessel_[i * width];
        double prod = weights_[i];
        for (Coord k : key.values()) {
            prod *= row[k];
        }
        integral += prod;
        if (prod < previous && prod < 1e-18 * integral) {
            break;
        }
        previous = prod;
    }
    // int_S^inf (2 pi s)^{-d/2} (1 - c1 / s) ds, from the large-s expansion of
    // e^{-s} I_k(s)
    const double half_d = 0.5 * dim_;
    double c1 = 0.0;
    for (Coord k : key.values()) {
        c1 += (4.0 * k * k - 1.0) / 8.0;
    }
    const double S = tail_start_;
    const double tail = std::pow(2.0 * std::numbers::pi, -half_d) *
                        (std::pow(S, 1.0 - half_d) / (half_d - 1.0) - c1 * std::pow(S, -half_d) / half_d);
    return dim_ * (integral + tail);
}

double LatticeGreen::operator()(const GroupElement& x) const
{
    if (x.size() != static_cast<std::size_t>(dim_)) {
        throw ValidationError("Green target dimension does not match lattice dimension");
    }
    const GroupElement key = lattice_symmetry_key(x);
    {
        std::shared_lock lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) {
            return it->second;
        }
    }
    std::unique_lock lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) {
        return it->second;
    }
    const int order = key[key.size() - 1];
    if (order > max_order_) {
        grow_table(order);
    }
    const double value = evaluate(key);
    cache_.emplace(key, value);
    return value;
}

std::size_t LatticeGreen::cache_size() const
{
    std::shared_lock lock(mutex_);
    return cache_.size();
}

GreenEstimate green_truncated(const Group& group, const GroupElement& g, std::size_t n_max, std::size_t cap)
{
    if (!group.is_element(g)) {
        throw ValidationError("target is not an element of the group");
    }
    GreenEstimate est;
    est.target = g;
    est.method = GreenMethod::TruncatedKernel;
    est.horizon = n_max;
    est.lower_bound_only = true;
    std::vector<double> series;
    if (group.is_standard_lattice()) {
        series = LatticeKernelSeries(group.dim(), 2 * n_max).series(g);
    } else {
        const KernelTable k = exact_kernel(group, 2 * n_max, 0.0, cap);
        for (std::size_t i = 0; i <= 2 * n_max; ++i) {
            series.push_back(k.probability(i, g));
        }
    }
    double total = 0.0;
    for (std::size_t i = 0; i <= 2 * n_max; ++i) {
        total += series[i];
        if (i == n_max) {
            est.value = total;
        }
    }
    est.doubled_horizon_value = total;
    return est;
}

GreenEstimate green_mc(const Group& group, const GroupElement& g, std::size_t horizon, std::size_t trials,
                       std::uint64_t seed)
{
    if (trials == 0) {
        throw ValidationError("green_mc needs at least one trial");
    }
    const auto k = static_cast<std::uint32_t>(group.generator_count());
    RunningMoments visits;
    for (std::size_t t = 0; t < trials; ++t) {
        CounterRng rng(seed, stream_id({streams::kGreenMc, t}));
        GroupElement pos = group.identity();
        std::size_t count = pos == g ? 1 : 0;
        for (std::size_t step = 0; step < horizon; ++step) {
            group.step(pos, rng.uniform_index(k));
            if (pos == g) {
                ++count;
            }
        }
        visits.add(static_cast<double>(count));
    }
    GreenEstimate est;
    est.target = g;
    est.method = GreenMethod::MonteCarlo;
    est.horizon = horizon;
    est.samples = trials;
    est.value = visits.mean();
    est.stderr = visits.stderr_mean();
    est.lower_bound_only = true;
    return est;
}

double cross_green(const Group& group, std::span<const GroupElement> a, std::span<const GroupElement> b,
                   const GreenSource& green)
{
    double total = 0.0;
    for (const auto& x : a) {
        const GroupElement x_inv = group.inverse(x);
        for (const auto& y : b) {
            total += green(group.multiply(x_inv, y));
        }
    }
    return total;
}

std::unique_ptr<GreenSource> default_green_source(const Group& group, std::size_t horizon, std::size_t cap)
{
    if (group.is_standard_lattice() && group.dim() >= 3) {
        return std::make_unique<LatticeGreen>(group.dim());
    }
    return std::make_unique<TruncatedGreen>(group, horizon, cap);
}

}  // namespace rangecap

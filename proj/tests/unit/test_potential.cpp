#include <doctest.h>

#include <cmath>

#include "rangecap/capacity.hpp"
#include "rangecap/equilibrium.hpp"
#include "rangecap/green.hpp"
#include "rangecap/sandwich.hpp"
#include "rangecap/walk.hpp"
#include "rangecap/word_metric.hpp"

using namespace rangecap;

namespace {
// Watson's value of the simple cubic lattice Green function at the origin.
constexpr double kWatson = 1.516386059151978;
}  // namespace

TEST_CASE("truncated Green function on Z^3")
{
    const Group z3 = Group::lattice_standard(3);
    const GreenEstimate g400 = green_truncated(z3, z3.identity(), 400);
    CHECK(g400.value >= 1.45);
    CHECK(g400.value <= 1.52);
    REQUIRE(g400.doubled_horizon_value);
    CHECK(*g400.doubled_horizon_value - g400.value < 0.01);
    CHECK(g400.lower_bound_only);
}

TEST_CASE("truncated Green function diverges on Z")
{
    const Group z1 = Group::lattice_standard(1);
    const double a = green_truncated(z1, {0}, 100).value;
    const double b = green_truncated(z1, {0}, 400).value;
    const double c = green_truncated(z1, {0}, 1600).value;
    CHECK(b - a > 1.0);
    CHECK(c - b > 1.0);
}

TEST_CASE("Green function support and trivial Monte Carlo")
{
    const Group z2 = Group::lattice_standard(2);
    CHECK(green_truncated(z2, {30, 0}, 20).value == 0.0);
    CHECK(green_mc(z2, z2.identity(), 0, 1, 1).value == 1.0);
}

TEST_CASE("lattice Green integral reproduces Watson's constant")
{
    const LatticeGreen g(3);
    const Group z3 = Group::lattice_standard(3);
    CHECK(g({0, 0, 0}) == doctest::Approx(kWatson).epsilon(1e-9));
    // harmonic off the origin, one unit of mass at the origin
    const GroupElement x{2, -1, 3};
    double avg = 0.0;
    for (const GroupElement& s : z3.generators()) {
        avg += g({x[0] + s[0], x[1] + s[1], x[2] + s[2]}) / 6.0;
    }
    CHECK(avg == doctest::Approx(g(x)).epsilon(1e-10));
    double avg0 = 0.0;
    for (const GroupElement& s : z3.generators()) {
        avg0 += g(s) / 6.0;
    }
    CHECK(g({0, 0, 0}) - avg0 == doctest::Approx(1.0).epsilon(1e-10));
    // symmetric under coordinate permutation and sign change
    CHECK(g({1, -2, 3}) == g({3, 2, -1}));
}

TEST_CASE("cross Green of a singleton")
{
    const Group z3 = Group::lattice_standard(3);
    const TruncatedGreen g(z3, 200);
    const std::vector<GroupElement> e{z3.identity()};
    CHECK(cross_green(z3, e, e, g) == doctest::Approx(green_truncated(z3, z3.identity(), 200).value));
}

TEST_CASE("escape probability trivial cases")
{
    const Group z1 = Group::lattice_standard(1);
    const std::vector<GroupElement> ball1{{-1}, {0}, {1}};
    const FiniteSet a(ball1);
    CHECK(escape_mc(z1, a, {0}, 100, 500, 1).probability == 0.0);

    const Group z2 = Group::lattice_standard(2);
    const std::vector<GroupElement> e{z2.identity()};
    CHECK(escape_mc(z2, FiniteSet(e), z2.identity(), 1, 200, 1).probability == 1.0);
}

TEST_CASE("capacity of the empty set and recurrent decay")
{
    const Group z1 = Group::lattice_standard(1);
    const CapacityEstimate empty = capacity_mc(z1, {}, 100, 10, 1);
    CHECK(empty.point == 0.0);
    CHECK(empty.stderr == 0.0);
    const std::vector<GroupElement> a{{0}, {1}, {5}};
    CHECK(capacity_mc(z1, a, 10000, 400, 2).point < 0.05);
}

TEST_CASE("harmonic bracket matches gambler's ruin")
{
    const Group z1 = Group::lattice_standard(1);
    const std::vector<GroupElement> origin{{0}};
    for (int r : {10, 50, 100}) {
        const CapacityEstimate c = capacity_bracket(z1, origin, r);
        REQUIRE(c.bracket);
        CHECK(std::abs(c.bracket->second - 1.0 / r) < 1e-8);
        CHECK(c.bracket->first == 0.0);
    }
    const std::vector<GroupElement> ball1{{-1}, {0}, {1}};
    const CapacityEstimate b = capacity_bracket(z1, ball1, 200);
    CHECK(b.bracket->first == 0.0);
    CHECK(b.bracket->second < 0.02);
}

TEST_CASE("bracket on Z^3 contains the Monte Carlo estimate")
{
    const Group z3 = Group::lattice_standard(3);
    const std::vector<GroupElement> e{z3.identity()};
    const LatticeGreen exact(3);
    BracketOptions opts;
    opts.green = &exact;
    const CapacityEstimate br = capacity_bracket(z3, e, 12, opts);
    const CapacityEstimate mc = capacity_mc(z3, e, 10000, 2000, 5);
    CHECK(br.bracket->first <= mc.point + 3.0 * mc.stderr);
    CHECK(mc.point - 3.0 * mc.stderr <= br.bracket->second);
    CHECK(br.bracket->first <= 1.0 / kWatson);
    CHECK(1.0 / kWatson <= br.bracket->second);
}

TEST_CASE("green solve and Frank-Wolfe agree")
{
    const Group z3 = Group::lattice_standard(3);
    const LatticeGreen g(3);
    const std::vector<GroupElement> e{z3.identity()};
    CHECK(capacity_green_solve(z3, e, g).point == doctest::Approx(1.0 / kWatson).epsilon(1e-9));

    const EquilibriumResult single = equilibrium_measure(z3, e, g);
    CHECK(single.measure.weights == std::vector<double>{1.0});
    CHECK(single.estimate.point == doctest::Approx(1.0 / kWatson));

    const std::vector<GroupElement> pair{{0, 0, 0}, {3, 1, 0}};
    const EquilibriumResult sym = equilibrium_measure(z3, pair, g);
    CHECK(sym.measure.weights[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(sym.measure.weights[1] == doctest::Approx(0.5).epsilon(1e-6));

    const WalkPath p = simulate(z3, 60, 4, 1);
    const RangeSet r = range_of(p, 0, 60);
    const EquilibriumResult fw = equilibrium_measure(z3, r.members, g);
    const double solve = capacity_green_solve(z3, r.members, g).point;
    CHECK(fw.measure.valid());
    CHECK(fw.estimate.bracket->first <= solve + 1e-9);
    CHECK(solve <= fw.estimate.bracket->second + 1e-9);
    // any other measure has higher energy
    const SimplexMeasure nu = empirical_measure(p, 60);
    CHECK(nu.valid());
    CHECK(energy(z3, nu, g) >= fw.energy - 1e-9);
}

TEST_CASE("energy of a point mass")
{
    const Group z3 = Group::lattice_standard(3);
    const TruncatedGreen g(z3, 300);
    const SimplexMeasure delta{{z3.identity()}, {1.0}};
    CHECK(energy(z3, delta, g) == doctest::Approx(green_truncated(z3, z3.identity(), 300).value));
}

TEST_CASE("sandwich inequalities")
{
    const Group z5 = Group::lattice_standard(5);
    const LatticeGreen g(5);
    CapacityConfig solve;
    solve.method = CapacityMethod::GreenSolve;

    const std::vector<GroupElement> a{{0, 0, 0, 0, 0}};
    const std::vector<GroupElement> b{{40, 0, 0, 0, 0}};
    const SandwichReport far = sandwich_for_sets(z5, a, b, 100, solve, 1, g);
    CHECK(far.lower_holds);
    CHECK(far.upper_holds);
    CHECK(std::abs(far.cap_union.point - far.cap_a.point - far.cap_b.point) <= 2.0 * far.cross_green);

    const SandwichReport same = sandwich_for_sets(z5, a, a, 100, solve, 1, g);
    CHECK(same.upper_holds);
    CHECK(same.lower_holds);
    CHECK(same.upper_margin == doctest::Approx(0.0).epsilon(1e-9));

    const WalkPath p = simulate(z5, 128, 9, 1);
    const SandwichReport split = capacity_sandwich_check(p, 64, solve, 1, g);
    CHECK(split.lower_holds);
    CHECK(split.upper_holds);

    CapacityConfig mc;
    mc.trials = 64;
    const SandwichReport noisy = capacity_sandwich_check(p, 64, mc, 3, g);
    CHECK(noisy.upper_holds);
    CHECK(noisy.combined_stderr > 0.0);
}

#include <doctest.h>

#include <cstdlib>

#include "rangecap/errors.hpp"
#include "rangecap/group.hpp"
#include "rangecap/rng.hpp"
#include "rangecap/word_metric.hpp"

using namespace rangecap;

TEST_CASE("philox known answers")
{
    using P = Philox4x32;
    CHECK(P::block({0, 0, 0, 0}, {0, 0}) == P::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(P::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          P::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(P::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          P::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("counter rng replays and separates streams")
{
    CounterRng a(7, 3), b(7, 3), c(7, 4);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u32();
        CHECK(x == b.next_u32());
        differs = differs || x != c.next_u32();
    }
    CHECK(differs);
    CounterRng u(1, 1);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.uniform01();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
        CHECK(u.uniform_index(6) < 6u);
    }
}

TEST_CASE("generator validation")
{
    CHECK(Group::lattice_standard(2).generator_count() == 4);
    CHECK_THROWS_AS(Group::lattice(1, {{2}, {3}}), NonSymmetricGenerators);
    CHECK_THROWS_AS(Group::lattice(1, {}), EmptyGeneratorSet);
    CHECK_THROWS_AS(Group::lattice(1, {{1}, {-1}, {1}}), DuplicateGenerator);
    const Group h = Group::heisenberg({{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}});
    CHECK(h.generator_count() == 4);
}

TEST_CASE("multiplication examples")
{
    const Group z2 = Group::lattice_standard(2);
    CHECK(z2.multiply({1, 2}, {0, -1}) == GroupElement{1, 1});

    const Group h = Group::heisenberg();
    const GroupElement x{1, 0, 0}, y{0, 1, 0};
    CHECK(h.multiply(x, y) == GroupElement{1, 1, 1});
    CHECK(h.multiply(y, x) == GroupElement{1, 1, 0});
    const GroupElement g{2, -3, 5};
    CHECK(h.multiply(g, h.inverse(g)) == h.identity());
    CHECK(h.multiply(h.multiply(x, y), g) == h.multiply(x, h.multiply(y, g)));

    const Group f = Group::free_product_z2(3);
    CHECK(f.multiply({1, 2}, {2, 3}) == GroupElement{1, 3});
    CHECK(f.multiply({1, 2}, {2, 1}) == f.identity());
    CHECK(f.inverse({1, 2, 3}) == GroupElement{3, 2, 1});
}

TEST_CASE("ball sizes match direct enumeration")
{
    const Group z2 = Group::lattice_standard(2);
    CHECK(ball(z2, 1).size() == 5);
    CHECK(ball(z2, 2).size() == 13);

    const Group z3 = Group::lattice_standard(3);
    const Ball b = ball(z3, 6);
    std::size_t count = 0;
    for (int i = -6; i <= 6; ++i) {
        for (int j = -6; j <= 6; ++j) {
            for (int k = -6; k <= 6; ++k) {
                const int l1 = std::abs(i) + std::abs(j) + std::abs(k);
                if (l1 <= 6) {
                    ++count;
                    REQUIRE(b.length_of({i, j, k}) == l1);
                }
            }
        }
    }
    CHECK(b.size() == count);

    // 1 + 3 (2^r - 1) reduced words of length at most r
    const Group f = Group::free_product_z2(3);
    for (int r = 0; r <= 8; ++r) {
        CHECK(ball(f, r).size() == 1 + 3 * ((std::size_t{1} << r) - 1));
    }
}

TEST_CASE("dead end for generators plus-minus 2 and 3")
{
    const Group g = Group::lattice(1, {{2}, {-2}, {3}, {-3}});
    const Ball b = ball(g, 4);
    REQUIRE(b.length_of({1}) == 2);
    for (Coord s : {2, -2, 3, -3}) {
        CHECK(*b.length_of({1 + s}) <= 2);
    }
}

TEST_CASE("growth index")
{
    const auto z3 = growth_profile(Group::lattice_standard(3), 10);
    CHECK(z3.fitted_index >= 2.6);
    CHECK(z3.fitted_index <= 3.4);
    CHECK_FALSE(z3.superpolynomial);

    const auto heis = growth_profile(Group::heisenberg(), 12);
    CHECK(heis.fitted_index >= 3.4);
    CHECK(heis.fitted_index <= 4.6);

    const auto f = growth_profile(Group::free_product_z2(3), 12);
    CHECK(f.superpolynomial);
}

TEST_CASE("ball cap raises BallTooLarge with the completed radius")
{
    try {
        (void)ball(Group::lattice_standard(3), 20, 1000);
        FAIL("expected BallTooLarge");
    } catch (const BallTooLarge& e) {
        CHECK(e.reached_radius() < 20);
    }
}

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rangecap/cli.hpp"
#include "rangecap/errors.hpp"
#include "rangecap/experiments.hpp"
#include "rangecap/green.hpp"
#include "rangecap/json_io.hpp"
#include "rangecap/rng.hpp"
#include "rangecap/stats.hpp"

using namespace rangecap;

TEST_CASE("streaming moments match the two-pass formulas")
{
    CounterRng rng(5, 5);
    std::vector<double> xs(5000);
    RunningMoments m;
    for (double& x : xs) {
        x = std::exp(rng.uniform01() * 3.0);
        m.add(x);
    }
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double c2 = 0.0, c3 = 0.0, c4 = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        c2 += d * d;
        c3 += d * d * d;
        c4 += d * d * d * d;
    }
    CHECK(m.mean() == doctest::Approx(mean).epsilon(1e-12));
    CHECK(m.variance() == doctest::Approx(c2 / (n - 1.0)).epsilon(1e-10));
    const double s2 = c2 / n;
    CHECK(m.skewness() == doctest::Approx(c3 / n / std::pow(s2, 1.5)).epsilon(1e-8));
    CHECK(m.excess_kurtosis() == doctest::Approx(c4 / n / (s2 * s2) - 3.0).epsilon(1e-8));
}

TEST_CASE("least squares and quantiles")
{
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{3, 5, 7, 9};
    const LinearFit f = least_squares(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.rss == doctest::Approx(0.0));
    CHECK(quantile({1, 2, 3, 4, 5}, 0.5) == doctest::Approx(3.0));
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
}

TEST_CASE("KS distance separates normal and skewed samples")
{
    CounterRng rng(3, 3);
    std::vector<double> normal(4000), expo(4000);
    for (std::size_t i = 0; i < normal.size(); ++i) {
        // Box-Muller
        const double u = 1.0 - rng.uniform01();
        const double v = rng.uniform01();
        normal[i] = std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
        expo[i] = -std::log(1.0 - rng.uniform01());
    }
    CHECK(ks_distance_standardized(normal) < 0.03);
    CHECK(ks_distance_standardized(expo) > 0.08);
}

TEST_CASE("pair Green sum of the empty path")
{
    const Group z3 = Group::lattice_standard(3);
    const LatticeGreen g(3);
    const WalkPath p = simulate(z3, 10, 1, 1);
    CHECK(pair_green_sum(p, 0, g) == doctest::Approx(g({0, 0, 0})));
    double brute = 0.0;
    for (std::size_t i = 0; i <= 10; ++i) {
        for (std::size_t j = 0; j <= 10; ++j) {
            brute += g(z3.multiply(z3.inverse(p.positions[i]), p.positions[j]));
        }
    }
    CHECK(pair_green_sum(p, 10, g) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("exit tail boundary cases")
{
    const Group z3 = Group::lattice_standard(3);
    const std::vector<int> radii{1, 30};
    const ExitTailReport r = exit_tail_check(z3, radii, 20, 200, 1);
    CHECK(r.frequency[0] == 1.0);
    CHECK(r.frequency[1] == 0.0);
}

TEST_CASE("kernel decay slopes")
{
    const std::vector<std::size_t> grid2{4, 8, 16, 32, 64};
    const KernelDecayReport d2 = kernel_decay_check(Group::lattice_standard(2), grid2);
    CHECK(d2.loglog.slope >= -1.3);
    CHECK(d2.loglog.slope <= -0.8);
    CHECK_FALSE(d2.superpolynomial);

    const std::vector<std::size_t> grid3{4, 8, 16, 32};
    const KernelDecayReport d3 = kernel_decay_check(Group::lattice_standard(3), grid3);
    CHECK(d3.loglog.slope >= -1.8);
    CHECK(d3.loglog.slope <= -1.2);

    const std::vector<std::size_t> gridf{2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(kernel_decay_check(Group::free_product_z2(3), gridf).superpolynomial);
}

TEST_CASE("series input validation")
{
    const std::vector<std::size_t> grid{64, 32};
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    CHECK_THROWS_AS(check_series_inputs(grid, seeds, 5), ValidationError);
    const std::vector<std::size_t> ok{32, 64};
    const std::vector<std::uint64_t> few{1, 2};
    CHECK_THROWS_AS(check_series_inputs(ok, few, 5), ValidationError);
}

TEST_CASE("series results do not depend on thread count")
{
    const Group z3 = Group::lattice_standard(3);
    const std::vector<std::size_t> grid{32, 64};
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    CapacityConfig cfg;
    cfg.trials = 16;
    const auto a = dump_canonical(to_json(slln_experiment(z3, grid, seeds, cfg, nullptr, 1)));
    const auto b = dump_canonical(to_json(slln_experiment(z3, grid, seeds, cfg, nullptr, 3)));
    CHECK(a == b);
}

TEST_CASE("group and config JSON round trip")
{
    for (const Group& g : {Group::lattice_standard(4), Group::heisenberg(), Group::free_product_z2(5),
                           Group::lattice(1, {{2}, {-2}, {3}, {-3}})}) {
        const Json j = group_to_json(g);
        CHECK(group_to_json(group_from_json(j)) == j);
    }
    ExperimentConfig c;
    c.experiment = "slln";
    c.group = group_to_json(Group::lattice_standard(5));
    c.grid = {256, 512};
    c.seeds = {1, 2, 3};
    c.estimator.method = CapacityMethod::GreenSolve;
    c.estimator.trials = 12;
    c.params["green_horizon"] = 800;
    const std::string text = dump_canonical(to_json(c));
    CHECK(dump_canonical(to_json(experiment_config_from_json(Json::parse(text)))) == text);
    CHECK_THROWS_AS(group_from_json(Json::parse(R"({"backend":"lattice","dim":1,"generators":[[2],[3]]})")),
                    ValidationError);
    CHECK_THROWS_AS(parse_json_text("{", "test"), ValidationError);
}

TEST_CASE("csv and digest")
{
    const std::string csv = to_csv({{8, "1", "capacity", 2.5}});
    CHECK(csv.rfind("n,seed,statistic,value\n", 0) == 0);
    CHECK(csv.find("8,1,capacity,2.5") != std::string::npos);
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("seed and grid lists")
{
    CHECK(parse_seed_list("1..3,7") == std::vector<std::uint64_t>{1, 2, 3, 7});
    CHECK(parse_grid("4, 8,16") == std::vector<std::uint64_t>{4, 8, 16});
    CHECK_THROWS_AS(parse_seed_list("5..2"), ValidationError);
    CHECK_THROWS_AS(parse_grid("a"), ValidationError);
}

namespace {

int cli(std::vector<std::string> args, std::string* out = nullptr)
{
    args.insert(args.begin(), "rangecap");
    std::ostringstream o, e;
    const int code = run_cli(args, o, e);
    if (out) {
        *out = o.str();
    }
    return code;
}

}  // namespace

TEST_CASE("cli exit codes and outputs")
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "rangecap_cli_test";
    fs::remove_all(dir);

    CHECK(cli({"walk", "--group", "{not json", "--out", dir.string()}) == kExitValidation);
    CHECK_FALSE(fs::exists(dir));
    CHECK(cli({"walk", "--group", R"({"backend":"lattice","dim":1,"generators":[[2],[3]]})"}) == kExitValidation);
    CHECK(cli({"walk"}) == kExitValidation);
    CHECK(cli({"nosuch"}) == kExitValidation);
    CHECK(cli({"growth", "--group", R"({"backend":"lattice","dim":4})", "--rmax", "400"}) == kExitResource);
    // two grid points cannot tell exponential from polynomial decay
    CHECK(cli({"decay", "--group", R"({"backend":"free_product_z2","arity":3})", "--grid", "1,2", "--assert"}) ==
          kExitAssertion);

    const std::string z3 = R"({"backend":"lattice","dim":3})";
    REQUIRE(cli({"capacity", "--group", z3, "--n", "100", "--seed", "7", "--horizon", "1600", "--out",
                 dir.string(), "--format", "both"}) == kExitOk);
    CHECK(fs::exists(dir / "capacity.json"));
    CHECK(fs::exists(dir / "capacity.csv"));
    std::ifstream mf(dir / "manifest.json");
    const Json manifest = Json::parse(mf);
    std::ifstream rf(dir / "capacity.json");
    std::stringstream report;
    report << rf.rdbuf();
    CHECK(manifest.at("outputs").at("capacity.json") == sha256_hex(report.str()));
    const Json parsed = Json::parse(report.str());
    CHECK(parsed.at("schema") == 1);
    CHECK(parsed.at("result").at("method") == "escape-mc");

    // the resolved config is itself a valid config file
    const fs::path cfg = dir / "cfg.json";
    std::ofstream(cfg) << parsed.at("config").dump();
    std::string again;
    REQUIRE(cli({"capacity", "--config", cfg.string()}, &again) == kExitOk);
    CHECK(again == report.str());

    std::string t1, t3;
    CHECK(cli({"slln", "--group", z3, "--grid", "32,64", "--seeds", "1..5", "--trials", "8", "--threads", "1"},
              &t1) == kExitOk);
    CHECK(cli({"slln", "--group", z3, "--grid", "32,64", "--seeds", "1..5", "--trials", "8", "--threads", "3"},
              &t3) == kExitOk);
    CHECK(t1 == t3);
    fs::remove_all(dir);
}

#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rangecap/capacity.hpp"
#include "rangecap/cli.hpp"
#include "rangecap/equilibrium.hpp"
#include "rangecap/errors.hpp"
#include "rangecap/experiments.hpp"
#include "rangecap/green.hpp"
#include "rangecap/json_io.hpp"
#include "rangecap/walk.hpp"
#include "rangecap/word_metric.hpp"

namespace py = pybind11;
using namespace rangecap;

// Groups, elements and results cross the boundary as JSON text; the Python
// package turns them into dicts and lists.

namespace {

Group group_of(const std::string& text)
{
    return group_from_json(parse_json_text(text, "group"));
}

std::vector<GroupElement> elements_of(const std::string& text)
{
    std::vector<GroupElement> out;
    for (const auto& e : parse_json_text(text, "elements")) {
        out.push_back(element_from_json(e));
    }
    return out;
}

std::string dump(const Json& j)
{
    return j.dump();
}

}  // namespace

PYBIND11_MODULE(_rangecap, m)
{
    m.doc() = "Random walk range capacity toolkit";
    m.attr("__version__") = RANGECAP_VERSION;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);

    m.def("normalize_group", [](const std::string& g) { return dump(group_to_json(group_of(g))); });

    m.def(
        "simulate",
        [](const std::string& g, std::size_t n, std::uint64_t seed, std::uint64_t index) {
            const Group group = group_of(g);
            py::gil_scoped_release release;
            return dump(to_json(replicate_path(group, n, seed, index)));
        },
        py::arg("group"), py::arg("n"), py::arg("seed"), py::arg("index") = 0);

    m.def(
        "growth",
        [](const std::string& g, int rmax) {
            const Group group = group_of(g);
            py::gil_scoped_release release;
            return dump(to_json(growth_profile(group, rmax)));
        },
        py::arg("group"), py::arg("rmax"));

    m.def(
        "green_truncated",
        [](const std::string& g, const std::string& target, std::size_t horizon) {
            const Group group = group_of(g);
            const GroupElement x = element_from_json(parse_json_text(target, "target"));
            py::gil_scoped_release release;
            return dump(to_json(green_truncated(group, x, horizon)));
        },
        py::arg("group"), py::arg("target"), py::arg("horizon"));

    m.def(
        "green_lattice",
        [](int dim, const std::string& target) {
            const LatticeGreen green(dim);
            return green(element_from_json(parse_json_text(target, "target")));
        },
        py::arg("dim"), py::arg("target"));

    m.def(
        "capacity",
        [](const std::string& g, const std::string& elements, const std::string& method, std::size_t horizon,
           std::size_t trials, std::uint64_t seed, int radius, std::size_t green_horizon, unsigned threads) {
            const Group group = group_of(g);
            const auto a = elements_of(elements);
            const CapacityMethod how = parse_capacity_method(method);
            py::gil_scoped_release release;
            switch (how) {
            case CapacityMethod::EscapeMc:
            case CapacityMethod::JainOreyRange:
                return dump(to_json(capacity_mc(group, a, horizon, trials, seed, threads)));
            case CapacityMethod::HarmonicBracket: {
                BracketOptions opts;
                std::unique_ptr<GreenSource> exact;
                if (group.is_standard_lattice() && group.dim() >= 3) {
                    exact = std::make_unique<LatticeGreen>(group.dim());
                    opts.green = exact.get();
                }
                return dump(to_json(capacity_bracket(group, a, radius, opts)));
            }
            case CapacityMethod::GreenSolve:
                return dump(to_json(capacity_green_solve(group, a, *default_green_source(group, green_horizon))));
            case CapacityMethod::VariationalLower:
                break;
            }
            return dump(to_json(equilibrium_measure(group, a, *default_green_source(group, green_horizon)).estimate));
        },
        py::arg("group"), py::arg("elements"), py::arg("method") = "escape-mc", py::arg("horizon") = 10000,
        py::arg("trials") = 64, py::arg("seed") = 1, py::arg("radius") = 12, py::arg("green_horizon") = 800,
        py::arg("threads") = 1);

    m.def(
        "equilibrium",
        [](const std::string& g, const std::string& elements, std::size_t green_horizon) {
            const Group group = group_of(g);
            const auto a = elements_of(elements);
            py::gil_scoped_release release;
            return dump(to_json(equilibrium_measure(group, a, *default_green_source(group, green_horizon))));
        },
        py::arg("group"), py::arg("elements"), py::arg("green_horizon") = 800);

    m.def(
        "run",
        [](const std::vector<std::string>& args) {
            std::vector<std::string> argv{"rangecap"};
            argv.insert(argv.end(), args.begin(), args.end());
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = run_cli(argv, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}

#include "apm/associated.hpp"
#include "apm/classify.hpp"
#include "apm/expr.hpp"
#include "apm/geometry.hpp"
#include "apm/search.hpp"
#include "apm/specfile.hpp"
#include "apm/theorems.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <vector>

namespace py = pybind11;

namespace {

using namespace apm;

py::dict classification_dict(const ClassificationReport& r) {
    py::dict out;
    out["residual_w0"] = r.residual_w0;
    out["residual_w3"] = r.residual_w3;
    out["residual_w3_twisted"] = r.residual_w3_alt;
    out["residual_nbar"] = r.residual_nbar;
    out["residual_nijenhuis"] = r.residual_nij;
    out["w0"] = r.w0_pass;
    out["w1w2"] = r.w12_pass;
    out["w3"] = r.w3_pass;
    out["forms_agree"] = r.forms_agree;
    out["nbar_agrees_w3"] = r.nbar_agrees_w3;
    out["tolerance"] = r.tolerance;
    out["points_sampled"] = r.points_sampled;
    out["seed"] = r.seed;
    return out;
}

py::list tensor_nested(const TensorComponents& t) {
    const int d = t.dim();
    const int r = t.rank();
    // Recursive nesting of the dense data.
    std::function<py::object(int, std::vector<int>&)> build =
        [&](int depth, std::vector<int>& idx) -> py::object {
        if (depth == r)
            return py::float_(t.at(std::span<const int>(idx.data(), idx.size())));
        py::list level;
        for (int i = 0; i < d; ++i) {
            idx.push_back(i);
            level.append(build(depth + 1, idx));
            idx.pop_back();
        }
        return level;
    };
    std::vector<int> idx;
    return build(0, idx).cast<py::list>();
}

// Value wrapper: the expression tree itself is immutable and shared.
struct PyExpr {
    ExprPtr tree;
};

struct PointPackage {
    PointFrame frame;
    ConnectionAtPoint conn;
    CurvatureAtPoint curv;
};

std::shared_ptr<PointPackage> package_at(const ManifoldSpec& spec,
                                         const std::vector<double>& point) {
    PointFrame frame = frame_at(spec, point);
    ConnectionAtPoint conn = levi_civita(frame);
    CurvatureAtPoint curv = curvature_package(frame, conn);
    return std::make_shared<PointPackage>(
        PointPackage{std::move(frame), std::move(conn), std::move(curv)});
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "numerical engine for Riemannian almost product manifolds";
    m.attr("__version__") = "0.1.0";

    py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ExprParseError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<PyExpr>(m, "Expr")
        .def("__str__", [](const PyExpr& e) { return to_string(*e.tree); })
        .def("__repr__",
             [](const PyExpr& e) { return "Expr(\"" + to_string(*e.tree) + "\")"; })
        .def(
            "value",
            [](const PyExpr& e, const std::vector<double>& point) { return eval(*e.tree, point); },
            py::arg("point"), "plain value at a point")
        .def(
            "jet",
            [](const PyExpr& e, const std::vector<double>& point) {
                const Jet2 jet = eval_jet2(*e.tree, point);
                const int d = jet.dim();
                py::list hess;
                for (int i = 0; i < d; ++i) {
                    py::list row;
                    for (int j = 0; j < d; ++j) row.append(jet.hess(i, j));
                    hess.append(row);
                }
                return py::make_tuple(jet.value, jet.grad, hess);
            },
            py::arg("point"), "(value, gradient, hessian) by forward-mode differentiation");

    m.def(
        "parse_expr",
        [](const std::string& source, int dim) { return PyExpr{parse_expr(source, dim)}; },
        py::arg("source"), py::arg("dim"), "parse an expression over x1..x<dim>");

    py::class_<ManifoldSpec>(m, "ManifoldSpec")
        .def_property_readonly("name", [](const ManifoldSpec& s) { return s.name; })
        .def_property_readonly("dim", &ManifoldSpec::dim)
        .def_property_readonly("backend",
                               [](const ManifoldSpec& s) {
                                   return std::string(s.is_lie() ? "lie_group" : "chart");
                               })
        .def("__repr__", [](const ManifoldSpec& s) {
            return "ManifoldSpec(name='" + s.name + "', dim=" + std::to_string(s.dim()) + ", " +
                   (s.is_lie() ? "lie_group" : "chart") + ")";
        });

    m.def("load_spec", &load_spec_file, py::arg("path"), "load a manifold spec file");
    m.def("parse_spec", &parse_spec_json, py::arg("text"), py::arg("name") = "spec",
          "parse a manifold spec document");
    m.def("spec_to_json", &spec_to_json, py::arg("spec"));
    m.def("write_spec", &write_spec_file, py::arg("spec"), py::arg("path"));

    m.def(
        "validate",
        [](const ManifoldSpec& spec, int points, std::uint64_t seed) {
            const auto report = validate_spec(spec, points, seed);
            py::list items;
            for (const auto& item : report.items) {
                py::dict d;
                d["name"] = item.name;
                d["max_residual"] = item.max_residual;
                d["tolerance"] = item.tolerance;
                d["pass"] = item.pass;
                d["detail"] = item.detail;
                items.append(d);
            }
            py::dict out;
            out["pass"] = report.pass;
            out["items"] = items;
            out["points_sampled"] = report.points_sampled;
            return out;
        },
        py::arg("spec"), py::arg("points") = 20, py::arg("seed") = 0);

    m.def(
        "classify",
        [](const ManifoldSpec& spec, int points, std::uint64_t seed, double tolerance) {
            SampleConfig config;
            config.points = points;
            config.seed = seed;
            config.tolerance = tolerance;
            return classification_dict(classify(spec, config));
        },
        py::arg("spec"), py::arg("points") = 20, py::arg("seed") = 0, py::arg("tolerance") = -1.0);

    m.def(
        "run_suite",
        [](const ManifoldSpec& spec, int points, int tuples, std::uint64_t seed,
           const std::vector<std::string>& only) {
            SuiteConfig config;
            config.points = points;
            config.tuples = tuples;
            config.seed = seed;
            config.only = only;
            const auto report = run_suite(spec, config);
            py::list checks;
            for (const auto& c : report.checks) {
                py::dict d;
                d["id"] = c.id;
                d["reference"] = c.reference;
                d["status"] = std::string(to_string(c.status));
                d["max_residual"] = c.max_residual;
                d["tolerance"] = c.tolerance;
                d["samples"] = c.samples;
                d["note"] = c.note;
                checks.append(d);
            }
            py::dict out;
            out["spec_name"] = report.spec_name;
            out["seed"] = report.seed;
            out["classification"] = classification_dict(report.classification);
            out["checks"] = checks;
            out["any_fail"] = report.any_fail;
            return out;
        },
        py::arg("spec"), py::arg("points") = -1, py::arg("tuples") = 50, py::arg("seed") = 0,
        py::arg("only") = std::vector<std::string>{});

    m.def("check_catalog", [] {
        py::list out;
        for (const auto& [id, ref] : check_catalog()) out.append(py::make_tuple(id, ref));
        return out;
    });

    py::class_<PointPackage, std::shared_ptr<PointPackage>>(m, "PointPackage")
        .def_property_readonly("tau", [](const PointPackage& p) { return p.curv.tau; })
        .def_property_readonly("tau_star",
                               [](const PointPackage& p) { return p.curv.tau_star; })
        .def_property_readonly("tau_star_star",
                               [](const PointPackage& p) { return p.curv.tau_star_star; })
        .def_property_readonly("norm_nabla_P",
                               [](const PointPackage& p) { return p.curv.norm_nabla_P; })
        .def_property_readonly("F", [](const PointPackage& p) { return tensor_nested(p.curv.F); })
        .def_property_readonly("R", [](const PointPackage& p) { return tensor_nested(p.curv.R); })
        .def_property_readonly("ricci",
                               [](const PointPackage& p) { return tensor_nested(p.curv.rho); })
        .def_property_readonly("theta",
                               [](const PointPackage& p) { return tensor_nested(p.curv.theta); })
        .def(
            "sectional",
            [](const PointPackage& p, const std::vector<double>& x, const std::vector<double>& y) {
                return sectional(p.frame, p.curv, x, y);
            },
            py::arg("x"), py::arg("y"))
        .def(
            "bisectional",
            [](const PointPackage& p, const std::vector<double>& x, const std::vector<double>& y) {
                return bisectional(p.frame, p.curv, x, y);
            },
            py::arg("x"), py::arg("y"));

    m.def("at_point", &package_at, py::arg("spec"), py::arg("point"),
          "curvature package of the spec at one point");

    m.def(
        "search",
        [](int dim, const std::string& target, double floor, long budget, std::uint64_t seed,
           bool fd_gradient) {
            SearchProblem problem;
            problem.dim = dim;
            problem.target = parse_target(target);
            problem.floor_f2 = floor;
            problem.fd_gradient = fd_gradient;
            const SearchResult result = synthesize(problem, budget, seed);
            ManifoldSpec spec;
            spec.name = "searched";
            spec.backend = result.best_spec;
            py::dict info;
            info["converged"] = result.converged;
            info["iterations"] = result.iterations;
            info["best_start"] = result.best_start;
            info["jacobi"] = result.terms.jacobi;
            info["class_w3"] = result.terms.class_w3;
            info["f_norm2"] = result.terms.f2;
            info["objective"] = result.terms.objective;
            return py::make_tuple(spec, info);
        },
        py::arg("dim") = 4, py::arg("target") = "w3", py::arg("floor") = 0.1,
        py::arg("budget") = 200000, py::arg("seed") = 0, py::arg("fd_gradient") = false);
}

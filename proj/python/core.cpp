#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "qdetect/audit.hpp"
#include "qdetect/report_json.hpp"
#include "qdetect/simulate.hpp"
#include "qdetect/solver.hpp"

namespace py = pybind11;
using namespace qdetect;

namespace {

using CArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

StateVector to_state(const CArray &a, Space space) {
    if (a.ndim() != 1) {
        throw ContractError("expected a one-dimensional array");
    }
    const auto r = a.unchecked<1>();
    StateVector v(static_cast<std::size_t>(r.shape(0)), space);
    for (py::ssize_t i = 0; i < r.shape(0); ++i) {
        v[static_cast<std::size_t>(i)] = r(i);
    }
    return v;
}

Operator to_operator(const CArray &a, Space space) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1)) {
        throw ContractError("expected a square two-dimensional array");
    }
    const auto r = a.unchecked<2>();
    Operator op(static_cast<std::size_t>(r.shape(0)), space);
    for (py::ssize_t i = 0; i < r.shape(0); ++i) {
        for (py::ssize_t j = 0; j < r.shape(1); ++j) {
            op(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = r(i, j);
        }
    }
    return op;
}

CArray from_state(const StateVector &v) {
    CArray out(static_cast<py::ssize_t>(v.dim()));
    auto w = out.mutable_unchecked<1>();
    for (std::size_t i = 0; i < v.dim(); ++i) {
        w(static_cast<py::ssize_t>(i)) = v[i];
    }
    return out;
}

CArray from_operator(const Operator &op) {
    const auto n = static_cast<py::ssize_t>(op.dim());
    CArray out({n, n});
    auto w = out.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < n; ++i) {
        for (py::ssize_t j = 0; j < n; ++j) {
            w(i, j) = op(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
    }
    return out;
}

py::object to_python(const Json &j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

Tolerances tolerances(double abs_tol, double rel_tol, double warn_tol) {
    Tolerances t{abs_tol, rel_tol, warn_tol};
    t.validate();
    return t;
}

PaperScenario scenario(const std::string &variant, const Tolerances &tol) {
    auto literal = build_literal_scenario(tol);
    if (parse_variant(variant) == Variant::literal) {
        return literal;
    }
    return repair_scenario(literal, tol);
}

CompletionPolicy policy(const std::string &kind, std::size_t target_rank, std::size_t slot,
                        const std::optional<CArray> &reference) {
    if (kind == "none") {
        return CompletionPolicy::none();
    }
    if (kind == "index_order") {
        return CompletionPolicy::index_order(target_rank);
    }
    if (kind == "mixing") {
        return CompletionPolicy::mixing(slot);
    }
    if (kind == "reference") {
        if (!reference) {
            throw ContractError("reference completion needs a reference projector");
        }
        return CompletionPolicy::reference_projector(to_operator(*reference, Space::spatial));
    }
    throw ContractError("unknown completion '" + kind + "'");
}

py::dict solution_dict(const SolverSolution &s) {
    py::dict d;
    d["property"] = from_operator(s.property);
    d["fixed_rank"] = s.fixed_rank;
    d["freedom_dim"] = s.freedom_dim;
    d["certificate"] = to_python(to_json(s.certificate));
    return d;
}

std::vector<Operator> operators(const std::vector<CArray> &dets) {
    std::vector<Operator> out;
    for (const auto &d : dets) {
        out.push_back(to_operator(d, Space::composite));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Three-property detection construction: scenario, audit, solver and simulation";

    py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);

    m.attr("SPATIAL_DIM") = kSpatialDim;
    m.attr("SPIN_DIM") = kSpinDim;
    m.attr("DEFAULT_SEED") = kDefaultSeed;

    m.def("literal_state", [] { return from_state(build_Psi_literal().vector()); },
          "The prepared state exactly as printed (not normalised).");
    m.def("repaired_state", [] { return from_state(repaired_state()); });
    m.def("which_slit", [] { return from_operator(build_E().spatial); });
    m.def("detector", [](std::size_t which) {
        if (which > 2) {
            throw ContractError("detector index must be 0 (T), 1 (Y) or 2 (W)");
        }
        return from_operator(build_detectors().lifted[which]);
    });
    m.def("detector_masks", [] {
        const auto d = build_detectors();
        return std::array<std::uint32_t, 3>{d.subsets[0].mask(), d.subsets[1].mask(), d.subsets[2].mask()};
    });

    m.def(
        "verify",
        [](const std::string &variant, double abs_tol, double rel_tol, double warn_tol) {
            const auto tol = tolerances(abs_tol, rel_tol, warn_tol);
            return to_python(to_json(evaluate_conditions(scenario(variant, tol), tol)));
        },
        py::arg("variant") = "repaired", py::arg("abs_tol") = 1e-10, py::arg("rel_tol") = 1e-10,
        py::arg("warn_tol") = 1e-6);
    m.def(
        "audit",
        [](const std::string &variant) {
            return to_python(to_json(structural_audit(scenario(variant, {}))));
        },
        py::arg("variant") = "literal");

    m.def(
        "derive_property",
        [](const CArray &psi, std::size_t spatial_dim, std::size_t spin_dim, std::uint32_t mask,
           const std::string &completion, std::size_t target_rank, std::size_t slot,
           const std::optional<CArray> &reference) {
            const CompositeSpace space{spatial_dim, spin_dim};
            return solution_dict(derive_property({to_state(psi, Space::composite), space, SpinSubset(mask, spin_dim),
                                                  policy(completion, target_rank, slot, reference)}));
        },
        py::arg("psi"), py::arg("spatial_dim"), py::arg("spin_dim"), py::arg("mask"), py::arg("completion") = "none",
        py::arg("target_rank") = 0, py::arg("slot") = 0, py::arg("reference") = py::none());
    m.def(
        "solve_triple",
        [](const CArray &psi, std::size_t spatial_dim, std::size_t spin_dim, std::array<std::uint32_t, 3> masks) {
            const CompositeSpace space{spatial_dim, spin_dim};
            const std::array<SpinSubset, 3> subsets{SpinSubset(masks[0], spin_dim), SpinSubset(masks[1], spin_dim),
                                                    SpinSubset(masks[2], spin_dim)};
            const auto sol = solve_triple(to_state(psi, Space::composite), space, subsets, {});
            py::dict d;
            py::list sols;
            for (const auto &s : sol.solutions) {
                sols.append(solution_dict(s));
            }
            d["solutions"] = sols;
            d["report"] = to_python(to_json(sol.report));
            return d;
        },
        py::arg("psi"), py::arg("spatial_dim"), py::arg("spin_dim"), py::arg("masks"));
    m.def(
        "enumerate_solutions",
        [](const CArray &psi, std::size_t spatial_dim, std::size_t spin_dim, bool complement_pruning,
           bool absent_channel_pruning) {
            const auto found = enumerate_solutions(to_state(psi, Space::composite), {spatial_dim, spin_dim},
                                                   {complement_pruning, absent_channel_pruning, true});
            std::vector<std::pair<std::array<std::uint32_t, 3>, std::array<double, 10>>> out;
            for (const auto &t : found) {
                out.emplace_back(t.masks, t.measured);
            }
            return out;
        },
        py::arg("psi"), py::arg("spatial_dim"), py::arg("spin_dim"), py::arg("complement_pruning") = true,
        py::arg("absent_channel_pruning") = true);

    m.def(
        "exact_distribution",
        [](const CArray &psi, const std::vector<CArray> &dets) {
            return to_python(to_json(exact_joint_distribution(to_state(psi, Space::composite), operators(dets))));
        },
        py::arg("psi"), py::arg("detectors"));
    m.def(
        "sample",
        [](const CArray &psi, const std::vector<CArray> &dets, std::uint64_t n_trials, std::uint64_t seed,
           std::size_t shards) {
            py::gil_scoped_release release;
            const auto dist = sample(to_state(psi, Space::composite), operators(dets), {seed, n_trials, shards});
            py::gil_scoped_acquire acquire;
            return to_python(to_json(dist));
        },
        py::arg("psi"), py::arg("detectors"), py::arg("n_trials"), py::arg("seed") = kDefaultSeed,
        py::arg("shards") = 1);

    m.def(
        "dump",
        [](const std::string &variant) {
            std::vector<Variant> vs;
            if (variant == "both") {
                vs = {Variant::literal, Variant::repaired};
            } else {
                vs = {parse_variant(variant)};
            }
            return to_python(to_json(build_dump(vs)));
        },
        py::arg("variant") = "both");

    m.def(
        "run_cli",
        [](const std::vector<std::string> &args) {
            std::ostringstream out;
            std::ostringstream err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line in-process; returns (exit_code, stdout, stderr).");
}

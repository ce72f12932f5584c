#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cwls/diagnostics.hpp"
#include "cwls/discrete_measure.hpp"
#include "cwls/domain.hpp"
#include "cwls/errors.hpp"
#include "cwls/experiment.hpp"
#include "cwls/legendre.hpp"
#include "cwls/multi_index.hpp"
#include "cwls/rng.hpp"
#include "cwls/sampler.hpp"
#include "cwls/test_functions.hpp"
#include "cwls/validation.hpp"
#include "cwls/wls.hpp"

namespace py = pybind11;
using namespace cwls;

PYBIND11_MODULE(pycwls, m) {
  m.doc() = "weighted least-squares approximation on irregular domains with "
            "discrete Christoffel sampling";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DataError>(m, "DataError");
  py::register_exception<SamplingError>(m, "SamplingError");
  py::register_exception<FullRankFailure>(m, "FullRankFailure");
  py::register_exception<SolveFailure>(m, "SolveFailure");

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
           py::arg("stream") = 0)
      .def("uniform01", &RngStream::uniform01)
      .def("next_u64", &RngStream::next_u64);

  py::enum_<IndexSetKind>(m, "IndexSetKind")
      .value("hyperbolic_cross", IndexSetKind::HyperbolicCross)
      .value("total_degree", IndexSetKind::TotalDegree)
      .value("tensor_product", IndexSetKind::TensorProduct);

  py::class_<MultiIndexSet>(m, "MultiIndexSet")
      .def_property_readonly("d", &MultiIndexSet::dimension)
      .def_property_readonly("order", &MultiIndexSet::order)
      .def_property_readonly("kind", &MultiIndexSet::kind)
      .def("__len__", &MultiIndexSet::size)
      .def("indices", &MultiIndexSet::indices)
      .def("max_degree", &MultiIndexSet::max_degree)
      .def("__repr__", [](const MultiIndexSet& s) {
        std::ostringstream os;
        os << "<MultiIndexSet " << to_string(s.kind()) << ":d=" << s.dimension()
           << ",n=" << s.order() << " N=" << s.size() << ">";
        return os.str();
      });

  m.def("hyperbolic_cross", &hyperbolic_cross, py::arg("d"), py::arg("n"));
  m.def("total_degree", &total_degree, py::arg("d"), py::arg("n"));
  m.def("tensor_product", &tensor_product, py::arg("d"), py::arg("n"));
  m.def("parse_index_set", &parse_index_set, py::arg("spec"));
  m.def("is_lower_set",
        py::overload_cast<const MultiIndexSet&>(&is_lower_set));

  m.def("legendre_1d", &legendre_1d, py::arg("n"), py::arg("y"));

  py::class_<TensorLegendreBasis>(m, "TensorLegendreBasis")
      .def(py::init<MultiIndexSet>())
      .def_property_readonly("d", &TensorLegendreBasis::dimension)
      .def("__len__", &TensorLegendreBasis::size)
      .def("eval_row", &TensorLegendreBasis::eval_row, py::arg("y"))
      .def("eval_rows", &TensorLegendreBasis::eval_rows, py::arg("points"));

  py::class_<Domain>(m, "Domain")
      .def_readonly("d", &Domain::d)
      .def_readonly("name", &Domain::name)
      .def_readonly("nominal_fraction", &Domain::nominal_fraction)
      .def("contains", &Domain::contains, py::arg("y"))
      .def("__repr__",
           [](const Domain& dom) { return "<Domain " + dom.name + ">"; });

  m.def("cube", &cube_domain, py::arg("d"));
  m.def("annulus", &annulus_domain, py::arg("d"), py::arg("r_min"),
        py::arg("r_max"));
  m.def("halfspace_cut_cube", &halfspace_cut_cube, py::arg("d"));
  m.def("cylinder_complement", &cylinder_complement, py::arg("d"), py::arg("r"));
  m.def("parse_domain", &parse_domain, py::arg("spec"), py::arg("d"));
  m.def("domain_intersect", &domain_intersect);
  m.def("domain_union", &domain_union);
  m.def("domain_minus", &domain_minus);
  m.def(
      "sample_uniform",
      [](const Domain& domain, int count, RngStream& rng, int max_attempts) {
        return sample_uniform(domain, count, rng, max_attempts);
      },
      py::arg("domain"), py::arg("count"), py::arg("rng"),
      py::arg("max_attempts_per_point") = kDefaultMaxAttemptsPerPoint);

  py::class_<KGrid>(m, "KGrid")
      .def(py::init([](Eigen::MatrixXd points) {
             KGrid grid;
             grid.points = std::move(points);
             return grid;
           }),
           py::arg("points"))
      .def_readonly("points", &KGrid::points)
      .def("__len__", &KGrid::size);

  m.def("generate_grid",
        [](const Domain& domain, int K, RngStream& rng) {
          return generate_grid(domain, K, rng);
        },
        py::arg("domain"), py::arg("K"), py::arg("rng"));

  py::class_<OrthoFactorization>(m, "OrthoFactorization")
      .def_property_readonly("Q", &OrthoFactorization::Q)
      .def_property_readonly("R", &OrthoFactorization::R)
      .def_property_readonly("sigma_min", &OrthoFactorization::sigma_min)
      .def_property_readonly("sigma_max", &OrthoFactorization::sigma_max)
      .def("__len__", &OrthoFactorization::size)
      .def("grid_size", &OrthoFactorization::grid_size)
      .def("eval_phi", &OrthoFactorization::eval_phi, py::arg("basis"),
           py::arg("y"))
      .def("eval_phi_rows", &OrthoFactorization::eval_phi_rows, py::arg("basis"),
           py::arg("points"));

  m.def("assemble_and_factor", &assemble_and_factor, py::arg("grid"),
        py::arg("basis"));
  m.def("extend_factorization", &extend_factorization, py::arg("factorization"),
        py::arg("grid"), py::arg("basis"));

  py::class_<WeightFunction>(m, "WeightFunction")
      .def_readonly("w", &WeightFunction::w)
      .def_readonly("inv_w", &WeightFunction::inv_w);

  py::class_<Method1Plan>(m, "Method1Plan")
      .def_readonly("pi", &Method1Plan::pi)
      .def_readonly("M", &Method1Plan::M)
      .def_readonly("indices", &Method1Plan::indices);

  m.def("method1_distribution", &method1_distribution, py::arg("factorization"));
  m.def("draw_method1",
        [](const Eigen::VectorXd& pi, int M, RngStream& rng) {
          return draw_method1(pi, M, rng);
        },
        py::arg("pi"), py::arg("M"), py::arg("rng"));
  m.def("make_method1_plan",
        [](const OrthoFactorization& f, int M, RngStream& rng) {
          return make_method1_plan(f, M, rng);
        },
        py::arg("factorization"), py::arg("M"), py::arg("rng"));

  py::class_<Method2Stage>(m, "Method2Stage")
      .def_readonly("N", &Method2Stage::N)
      .def_readonly("k", &Method2Stage::k)
      .def_readonly("M", &Method2Stage::M)
      .def_readonly("fresh_draws", &Method2Stage::fresh_draws);

  py::class_<DrawRecord>(m, "DrawRecord")
      .def_readonly("stage", &DrawRecord::stage)
      .def_readonly("column", &DrawRecord::column)
      .def_readonly("grid_index", &DrawRecord::grid_index);

  py::class_<Method2Plan>(m, "Method2Plan")
      .def(py::init<>())
      .def("stages", &Method2Plan::stages)
      .def("ledger", &Method2Plan::ledger)
      .def("indices", &Method2Plan::indices)
      .def("current_N", &Method2Plan::current_N)
      .def("current_k", &Method2Plan::current_k)
      .def("current_M", &Method2Plan::current_M);

  m.def("method2_advance",
        [](Method2Plan plan, const OrthoFactorization& f, int k_t, RngStream& rng) {
          return method2_advance(std::move(plan), f, k_t, rng);
        },
        py::arg("plan"), py::arg("factorization"), py::arg("k_t"), py::arg("rng"));
  m.def("mixture_check", &mixture_check, py::arg("plan"), py::arg("factorization"));
  m.def("m_target_nlogn", &m_target_nlogn, py::arg("N"));
  m.def("default_sampling_ratio", &default_sampling_ratio, py::arg("N"),
        py::arg("k_prev"));

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("c", &SolveResult::c)
      .def_readonly("sigma_min", &SolveResult::sigma_min)
      .def_readonly("sigma_max", &SolveResult::sigma_max)
      .def_readonly("residual", &SolveResult::residual);

  py::class_<WlsFit>(m, "WlsFit")
      .def_readonly("indices", &WlsFit::indices)
      .def_readonly("A", &WlsFit::A)
      .def_readonly("b", &WlsFit::b)
      .def_readonly("c", &WlsFit::c)
      .def_readonly("sigma_min", &WlsFit::sigma_min)
      .def_readonly("sigma_max", &WlsFit::sigma_max)
      .def_readonly("residual", &WlsFit::residual)
      .def("kappa", &WlsFit::kappa)
      .def("stability_C", &WlsFit::stability_C);

  m.def("fit_method1", &fit_method1, py::arg("factorization"), py::arg("plan"),
        py::arg("fvals"));
  m.def("fit_method2", &fit_method2, py::arg("factorization"), py::arg("plan"),
        py::arg("fvals"));
  m.def("fit_uniform", &fit_uniform, py::arg("factorization"), py::arg("indices"),
        py::arg("fvals"));
  m.def("fit_summary_json", &fit_summary_json, py::arg("fit"), py::arg("seed"));

  m.def("assemble_method1", &assemble_method1, py::arg("factorization"),
        py::arg("plan"), py::arg("fvals"));
  m.def("assemble_method2", &assemble_method2, py::arg("factorization"),
        py::arg("plan"), py::arg("fvals"));
  m.def("assemble_uniform", &assemble_uniform, py::arg("factorization"),
        py::arg("indices"), py::arg("fvals"));
  m.def("solve", &solve, py::arg("A"), py::arg("b"));
  m.def("evaluate_on_grid", &evaluate_on_grid, py::arg("factorization"),
        py::arg("c"));
  m.def("evaluate_at", &evaluate_at, py::arg("factorization"), py::arg("basis"),
        py::arg("c"), py::arg("y"));
  m.def("evaluate_many", &evaluate_many, py::arg("factorization"),
        py::arg("basis"), py::arg("c"), py::arg("points"));

  m.def("constant_C", &constant_C, py::arg("A"));
  m.def("error_on_grid", &error_on_grid, py::arg("fvals"), py::arg("fit_vals"));
  m.def("weighted_supnorm_gap", &weighted_supnorm_gap, py::arg("fvals"),
        py::arg("pvals"), py::arg("pi"), py::arg("K"));
  m.def("bound_M_method1", &bound_M_method1, py::arg("N"), py::arg("gamma"),
        py::arg("delta"));
  m.def("bound_M_maw1", &bound_M_maw1, py::arg("N"), py::arg("gamma"),
        py::arg("delta"));
  m.def("bound_M_maw2", &bound_M_maw2, py::arg("N"), py::arg("gamma"),
        py::arg("delta"));
  m.def("bound_K", &bound_K, py::arg("N"), py::arg("gamma"), py::arg("delta"),
        py::arg("nikolskii_sq"));
  m.def("bound_k_method2", &bound_k_method2, py::arg("N_t"), py::arg("gamma_t"),
        py::arg("delta"));
  m.def("nikolskii_lambda_rect", &nikolskii_lambda_rect, py::arg("N"),
        py::arg("lambda_"));

  py::class_<EvalGrid>(m, "EvalGrid")
      .def_readonly("points", &EvalGrid::points)
      .def("__len__", &EvalGrid::size);
  m.def("make_eval_grid",
        [](const Domain& domain, int T, RngStream& rng) {
          return make_eval_grid(domain, T, rng);
        },
        py::arg("domain"), py::arg("T"), py::arg("rng"));
  m.def("estimate_D", &estimate_D, py::arg("factorization"), py::arg("basis"),
        py::arg("eval_grid"));

  py::class_<DiagnosticsReport>(m, "DiagnosticsReport")
      .def_readwrite("C", &DiagnosticsReport::C)
      .def_readwrite("kappa", &DiagnosticsReport::kappa)
      .def_readwrite("E_tau", &DiagnosticsReport::E_tau)
      .def_readwrite("E_tau_tilde", &DiagnosticsReport::E_tau_tilde)
      .def_readwrite("D_hat", &DiagnosticsReport::D_hat)
      .def_readonly("delta", &DiagnosticsReport::delta)
      .def_readonly("gamma", &DiagnosticsReport::gamma)
      .def_readonly("theory", &DiagnosticsReport::theory)
      .def_readonly("notes", &DiagnosticsReport::notes)
      .def("to_json", [](const DiagnosticsReport& r) { return report_to_json(r); });
  m.def("make_report", &make_report, py::arg("N"), py::arg("delta"),
        py::arg("gamma"), py::arg("lambda_rect") = std::nullopt);

  py::class_<TargetFunction>(m, "TargetFunction")
      .def_readonly("name", &TargetFunction::name)
      .def_readonly("d", &TargetFunction::d)
      .def_readonly("smoothness", &TargetFunction::smoothness)
      .def_readonly("needs_space", &TargetFunction::needs_space)
      .def_readonly("coefficients", &TargetFunction::coefficients)
      .def("__call__",
           [](const TargetFunction& f, const Eigen::VectorXd& y) { return f(y); })
      .def("values", &TargetFunction::values, py::arg("points"));

  m.def("builtin_function", &builtin_function, py::arg("name"), py::arg("d"));
  m.def("make_in_space", &make_in_space, py::arg("factorization"),
        py::arg("basis"), py::arg("seed"));

  m.def(
      "run_sweep_config",
      [](const std::string& json_text) {
        const ExperimentConfig cfg = parse_config_string(json_text);
        const SweepResult result = run_sweep(cfg);
        py::list rows;
        for (const auto& row : result.rows) {
          py::dict r;
          r["method"] = row.method;
          r["N"] = row.N;
          r["M"] = row.M;
          r["trial"] = row.trial;
          r["kind"] = row.kind;
          if (row.E_tau) r["E_tau"] = *row.E_tau;
          if (row.E_tau_tilde) r["E_tau_tilde"] = *row.E_tau_tilde;
          if (row.C) r["C"] = *row.C;
          if (row.kappa) r["kappa"] = *row.kappa;
          rows.append(std::move(r));
        }
        py::dict out;
        out["rows"] = rows;
        out["summary"] = result.summary_json;
        return out;
      },
      py::arg("config_json"),
      "run a sweep from a JSON config string and return rows + summary");

  m.def("run_validation",
        [](const std::string& suite) {
          const ValidationReport report = run_validation(suite);
          return py::make_tuple(report.passed, report.to_json());
        },
        py::arg("suite"));
}

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "curveot/clustering.hpp"
#include "curveot/error.hpp"
#include "curveot/io.hpp"
#include "curveot/json_codec.hpp"
#include "curveot/measures.hpp"
#include "curveot/oracle.hpp"
#include "curveot/pipeline.hpp"
#include "curveot/transport.hpp"

namespace py = pybind11;
using namespace curveot;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PyObject* g_error_type = nullptr;

Curve2D to_curve(const Array& a, const std::string& id = "curve") {
  if (a.ndim() != 2 || a.shape(1) != 2) {
    throw Error(ErrorCode::DimensionMismatch, "curve '" + id + "' must be an (n, 2) array");
  }
  auto r = a.unchecked<2>();
  std::vector<Point2> pts(static_cast<std::size_t>(r.shape(0)));
  for (py::ssize_t i = 0; i < r.shape(0); ++i) pts[i] = {r(i, 0), r(i, 1)};
  return validate_curve(std::move(pts), id);
}

py::array_t<double> from_curve(const Curve2D& c) {
  py::array_t<double> out({static_cast<py::ssize_t>(c.size()), py::ssize_t{2}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < c.size(); ++i) {
    w(i, 0) = c[i].x1;
    w(i, 1) = c[i].x2;
  }
  return out;
}

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::DimensionMismatch, "expected a 2-D array");
  auto r = a.unchecked<2>();
  Matrix m(static_cast<std::size_t>(r.shape(0)), static_cast<std::size_t>(r.shape(1)));
  for (py::ssize_t i = 0; i < r.shape(0); ++i) {
    for (py::ssize_t j = 0; j < r.shape(1); ++j) m(i, j) = r(i, j);
  }
  return m;
}

py::array_t<double> from_matrix(const Matrix& m) {
  py::array_t<double> out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw Error(ErrorCode::DimensionMismatch, "expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

py::array_t<double> from_vector(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

PipelineConfig config_from_json(const std::string& text) {
  auto cfg = json::decode_config(json::parse(text, "config"));
  cfg.validate();
  return cfg;
}

std::optional<PenaltyVectors> penalties(const std::optional<Array>& nu, const std::optional<Array>& mu) {
  if (!nu && !mu) return std::nullopt;
  if (!nu || !mu) throw Error(ErrorCode::DimensionMismatch, "nu and mu must be given together");
  return PenaltyVectors{to_vector(*nu), to_vector(*mu)};
}

py::dict plan_dict(const TransportPlan& plan) {
  py::dict d;
  d["pi"] = from_matrix(plan.pi);
  d["objective"] = plan.objective;
  d["transported_mass"] = plan.transported_mass;
  d["optimal"] = plan.status == PlanStatus::Optimal;
  d["p"] = from_vector(plan.dual.p);
  d["q"] = from_vector(plan.dual.q);
  d["t"] = plan.dual.t;
  return d;
}

py::dict report_dict(const DualityReport& r) {
  py::dict d;
  d["primal_objective"] = r.primal_objective;
  d["dual_objective"] = r.dual_objective;
  d["duality_gap"] = r.duality_gap;
  d["max_primal_infeasibility"] = r.max_primal_infeasibility;
  d["max_dual_infeasibility"] = r.max_dual_infeasibility;
  d["max_slack_violation"] = r.max_slack_violation;
  d["ok"] = r.ok();
  return d;
}

py::dict solve_impl(bool use_oracle, const Array& cost, const Array& beta, const Array& alpha,
                    const std::string& variant, const std::optional<Array>& nu, const std::optional<Array>& mu) {
  const Matrix c = to_matrix(cost);
  const auto b = to_vector(beta);
  const auto a = to_vector(alpha);
  const Variant v = variant_from_string(variant);
  const auto pen = penalties(nu, mu);
  const PenaltyVectors* pp = pen ? &*pen : nullptr;
  TransportPlan plan;
  {
    py::gil_scoped_release release;
    plan = use_oracle ? oracle_solve(c, b, a, v, pp) : solve(v, c, b, a, pp);
  }
  py::dict d = plan_dict(plan);
  d["verification"] = report_dict(dual_feasibility_check(plan, plan.dual, c, b, a, v, pp));
  return d;
}

// Linkage matrix in the common (N-1) x 4 layout: a, b, height, size.
py::array_t<double> linkage_matrix(const Dendrogram& dg) {
  py::array_t<double> out({static_cast<py::ssize_t>(dg.merges.size()), py::ssize_t{4}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t s = 0; s < dg.merges.size(); ++s) {
    const auto& m = dg.merges[s];
    w(s, 0) = static_cast<double>(m.a);
    w(s, 1) = static_cast<double>(m.b);
    w(s, 2) = m.height;
    w(s, 3) = static_cast<double>(m.size);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_curveot, m) {
  m.doc() = "Weighted optimal-transport distances and hierarchical clustering for 2D curves";

  g_error_type = PyErr_NewException("curveot._curveot.CurveotError", PyExc_ValueError, nullptr);
  m.add_object("CurveotError", py::handle(g_error_type));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::tuple args = py::make_tuple(std::string(to_string(e.code())), std::string(e.what()));
      PyErr_SetObject(g_error_type, args.ptr());
    }
  });

  m.def("euclidean_cost",
        [](const Array& a, const Array& b, double order) {
          return from_matrix(euclidean_cost(to_curve(a, "a"), to_curve(b, "b"), order));
        },
        py::arg("a"), py::arg("b"), py::arg("order") = 1.0);

  m.def("reduced_cost",
        [](const Array& cost, const Array& nu, const Array& mu) {
          return from_matrix(reduced_cost(to_matrix(cost), PenaltyVectors{to_vector(nu), to_vector(mu)}));
        },
        py::arg("cost"), py::arg("nu"), py::arg("mu"));

  m.def("solve",
        [](const Array& cost, const Array& beta, const Array& alpha, const std::string& variant,
           const std::optional<Array>& nu, const std::optional<Array>& mu) {
          return solve_impl(false, cost, beta, alpha, variant, nu, mu);
        },
        py::arg("cost"), py::arg("beta"), py::arg("alpha"), py::arg("variant") = "balanced",
        py::arg("nu") = py::none(), py::arg("mu") = py::none());

  m.def("oracle_solve",
        [](const Array& cost, const Array& beta, const Array& alpha, const std::string& variant,
           const std::optional<Array>& nu, const std::optional<Array>& mu) {
          return solve_impl(true, cost, beta, alpha, variant, nu, mu);
        },
        py::arg("cost"), py::arg("beta"), py::arg("alpha"), py::arg("variant") = "balanced",
        py::arg("nu") = py::none(), py::arg("mu") = py::none());

  m.def("construct_penalties",
        [](const Array& cost, std::size_t rows, std::size_t cols) {
          const auto p = construct_penalties(to_matrix(cost), ActiveBlock{rows, cols});
          return py::make_tuple(from_vector(p.nu), from_vector(p.mu));
        },
        py::arg("cost"), py::arg("rows"), py::arg("cols"));

  m.def("build_measure",
        [](const Array& points, const std::string& scheme) {
          return from_vector(build_measure(to_curve(points), io::parse_scheme_text(scheme)).weights);
        },
        py::arg("points"), py::arg("scheme"));

  m.def("default_config", [] { return json::encode(PipelineConfig{}).dump(); });

  m.def("experiment_preset", [](int n) { return json::encode(experiment_preset(n)).dump(); }, py::arg("number"));

  m.def("normalize_config", [](const std::string& cfg) { return json::encode(config_from_json(cfg)).dump(); },
        py::arg("config"));

  m.def("preprocess",
        [](const Array& points, const std::string& cfg) {
          return from_curve(preprocess(to_curve(points), config_from_json(cfg)));
        },
        py::arg("points"), py::arg("config"));

  m.def("run_pair",
        [](const Array& a, const Array& b, const std::string& cfg_text) {
          const auto cfg = config_from_json(cfg_text);
          const auto ca = to_curve(a, "a");
          const auto cb = to_curve(b, "b");
          std::optional<PairResult> result;
          {
            py::gil_scoped_release release;
            result.emplace(run_pair(ca, cb, cfg));
          }
          const auto& r = *result;
          py::dict d;
          d["distance"] = r.distance;
          d["plan"] = plan_dict(r.plan);
          d["beta"] = from_vector(r.prepared.beta.weights);
          d["alpha"] = from_vector(r.prepared.alpha.weights);
          d["cost"] = from_matrix(r.prepared.cost);
          d["a"] = from_curve(r.prepared.a);
          d["b"] = from_curve(r.prepared.b);
          if (r.prepared.penalties) {
            d["nu"] = from_vector(r.prepared.penalties->nu);
            d["mu"] = from_vector(r.prepared.penalties->mu);
          }
          return d;
        },
        py::arg("a"), py::arg("b"), py::arg("config"));

  m.def("pairwise_matrix",
        [](const std::vector<Array>& curves, const std::vector<std::string>& ids, const std::string& cfg_text,
           unsigned jobs) {
          if (curves.size() != ids.size()) {
            throw Error(ErrorCode::DimensionMismatch, "curves and ids differ in length");
          }
          const auto cfg = config_from_json(cfg_text);
          std::vector<Curve2D> cs;
          for (std::size_t i = 0; i < curves.size(); ++i) cs.push_back(to_curve(curves[i], ids[i]));
          DistanceMatrix d;
          {
            py::gil_scoped_release release;
            d = pairwise_matrix(cs, cfg, jobs);
          }
          return from_matrix(d.entries);
        },
        py::arg("curves"), py::arg("ids"), py::arg("config"), py::arg("jobs") = 0);

  m.def("hierarchical_cluster",
        [](const Array& matrix, const std::vector<std::string>& labels, const std::string& linkage) {
          DistanceMatrix d{to_matrix(matrix), labels};
          d.validate();
          const auto dg = hierarchical_cluster(d, linkage_from_string(linkage));
          py::dict out;
          out["linkage"] = linkage_matrix(dg);
          out["newick"] = to_newick(dg);
          out["leaf_order"] = leaf_order(dg);
          out["json"] = json::encode(dg).dump();
          return out;
        },
        py::arg("matrix"), py::arg("labels"), py::arg("linkage") = "average");

  m.def("dendrogram_svg",
        [](const std::string& dendrogram_json) {
          return to_svg(json::decode_dendrogram(json::parse(dendrogram_json, "dendrogram")));
        },
        py::arg("dendrogram"));

  m.def("cut_clusters",
        [](const std::string& dendrogram_json, std::size_t k) {
          return cut_clusters(json::decode_dendrogram(json::parse(dendrogram_json, "dendrogram")), k);
        },
        py::arg("dendrogram"), py::arg("k"));

  m.def("adjusted_rand_index",
        [](const std::vector<int>& a, const std::vector<int>& b) { return adjusted_rand_index(a, b); },
        py::arg("a"), py::arg("b"));

  m.def("procrustes_distance",
        [](const Array& a, const Array& b, std::size_t k) {
          return procrustes_distance(to_curve(a, "a"), to_curve(b, "b"), k);
        },
        py::arg("a"), py::arg("b"), py::arg("k") = kProcrustesPoints);
}

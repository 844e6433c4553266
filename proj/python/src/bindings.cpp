#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "permclass/classifier.hpp"
#include "permclass/cyclic.hpp"
#include "permclass/datasets.hpp"
#include "permclass/error.hpp"
#include "permclass/io.hpp"
#include "permclass/model_select.hpp"
#include "permclass/permanent.hpp"

namespace py = pybind11;
using namespace permclass;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

PointSet rows_of(const RowMatrix& m) {
  PointSet out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)].assign(m.row(i).begin(), m.row(i).end());
  return out;
}

RowMatrix matrix_of(const PointSet& points) {
  const Eigen::Index d = points.empty() ? 0 : static_cast<Eigen::Index>(points.front().size());
  RowMatrix m(static_cast<Eigen::Index>(points.size()), d);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), j) = points[i][static_cast<std::size_t>(j)];
  }
  return m;
}

LabeledDataset dataset(const RowMatrix& x, const std::vector<int>& labels, int num_classes) {
  LabeledDataset d;
  d.points = rows_of(x);
  d.labels = labels;
  d.num_classes = num_classes > 0 ? num_classes : d.max_label();
  d.validate();
  return d;
}

RowMatrix probabilities(const std::vector<PosteriorRow>& rows) {
  const Eigen::Index c = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().probabilities.size());
  RowMatrix m(static_cast<Eigen::Index>(rows.size()), c);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(static_cast<Eigen::Index>(i), j) = rows[i].probabilities[static_cast<std::size_t>(j)];
  }
  return m;
}

RatioOrder order_of(const py::object& order) {
  if (py::isinstance<py::str>(order)) return RatioOrder::parse(order.cast<std::string>());
  return RatioOrder(ApproxOrder(order.cast<int>()));
}

}  // namespace

PYBIND11_MODULE(_permclass, m) {
  m.doc() = "Permanental-process classification";
  m.attr("__version__") = PERMCLASS_VERSION;

  auto base = py::register_exception<Error>(m, "PermclassError", PyExc_RuntimeError);
  py::register_exception<SizeLimitError>(m, "SizeLimitError", base.ptr());
  py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<Kernel>(m, "Kernel")
      .def_static("exponential", &Kernel::exponential, py::arg("tau"))
      .def_static("gaussian", &Kernel::gaussian, py::arg("tau"))
      .def_static("constant", &Kernel::constant, py::arg("c"))
      .def_static("diagonal", py::overload_cast<std::vector<double>>(&Kernel::diagonal), py::arg("f_by_index"))
      .def_static("block_constant", &Kernel::block_constant, py::arg("levels"))
      .def_static("projection", &Kernel::projection, py::arg("matrix"))
      .def_property_readonly("family", [](const Kernel& k) { return std::string(to_string(k.family)); })
      .def_readonly("tau", &Kernel::tau)
      .def_readonly("c", &Kernel::c)
      .def("__call__", [](const Kernel& k, const Point& s, const Point& t) { return eval(k, s, t); })
      .def("gram", [](const Kernel& k, const RowMatrix& x) { return gram(k, rows_of(x)).entries(); })
      .def("__repr__", [](const Kernel& k) {
        return "Kernel(" + std::string(to_string(k.family)) + ", tau=" + std::to_string(k.tau) +
               ", c=" + std::to_string(k.c) + ")";
      });

  m.def("per_alpha", [](const Eigen::MatrixXd& a, double alpha) { return per_alpha_exact(a, alpha); },
        py::arg("a"), py::arg("alpha"), "Exact alpha-permanent by enumeration.");
  m.def("cyp", [](const Eigen::MatrixXd& a) { return cyp_exact(a); }, py::arg("a"),
        "Sum of single-cycle permutation products.");

  m.def("ratio_exact",
        [](const Point& t, const RowMatrix& x, const Kernel& k, double alpha) {
          return ratio_exact(t, rows_of(x), k, alpha);
        },
        py::arg("t"), py::arg("x"), py::arg("kernel"), py::arg("alpha"));
  m.def("ratio_approx",
        [](const Point& t, const RowMatrix& x, const Kernel& k, double alpha, int order) {
          const RatioTable table = build_ratio_table(gram(k, rows_of(x)), alpha, ApproxOrder(std::max(order - 1, 0)));
          return ratio_approx(k, t, table, ApproxOrder(order));
        },
        py::arg("t"), py::arg("x"), py::arg("kernel"), py::arg("alpha"), py::arg("order") = 3);
  m.def("cyclic_ratio_exact",
        [](const Point& t, const RowMatrix& x, const Kernel& k) { return cyclic_ratio_exact(t, rows_of(x), k); },
        py::arg("t"), py::arg("x"), py::arg("kernel"));
  m.def("cyclic_ratio_approx",
        [](const Point& t, const RowMatrix& x, const Kernel& k, int order) {
          return cyclic_ratio_approx(t, rows_of(x), k, ApproxOrder(order));
        },
        py::arg("t"), py::arg("x"), py::arg("kernel"), py::arg("order") = 3);

  py::class_<FittedModel>(m, "Model")
      .def_property_readonly("num_classes", &FittedModel::num_classes)
      .def("predict_proba",
           [](const FittedModel& f, const RowMatrix& q) { return probabilities(predict_finite(f, rows_of(q))); },
           py::arg("queries"))
      .def("predict",
           [](const FittedModel& f, const RowMatrix& q) {
             std::vector<int> labels;
             for (const PosteriorRow& r : predict_finite(f, rows_of(q))) labels.push_back(r.label);
             return labels;
           },
           py::arg("queries"))
      .def("to_json", [](const FittedModel& f) { return model_to_json(f).dump(); })
      .def_static("from_json",
                  [](const std::string& s) { return model_from_json(nlohmann::json::parse(s)); }, py::arg("text"));

  m.def("fit",
        [](const RowMatrix& x, const std::vector<int>& labels, const Kernel& k, std::vector<double> alphas,
           const py::object& order, int num_classes) {
          ModelParams p;
          p.kernel = k;
          p.alphas = std::move(alphas);
          p.order = order_of(order);
          return fit(dataset(x, labels, num_classes), p);
        },
        py::arg("x"), py::arg("labels"), py::arg("kernel"), py::arg("alphas") = std::vector<double>{1.0},
        py::arg("order") = 3, py::arg("num_classes") = 0);

  m.def("partition",
        [](const RowMatrix& x, const Kernel& k, double lambda, std::optional<std::uint64_t> sample_seed) {
          ModelParams p;
          p.kernel = k;
          p.lambda = lambda;
          const Partition part = sequential_partition(
              rows_of(x), p, sample_seed ? AssignmentRule::sample(*sample_seed) : AssignmentRule::argmax());
          std::vector<int> block(part.element_count());
          for (std::size_t b = 0; b < part.blocks.size(); ++b) {
            for (std::size_t i : part.blocks[b]) block[i] = static_cast<int>(b);
          }
          return block;
        },
        py::arg("x"), py::arg("kernel"), py::arg("lam") = 1.0, py::arg("sample_seed") = py::none());

  m.def("_cross_validate",
        [](const RowMatrix& x, const std::vector<int>& labels, const std::string& grid, int folds,
           const std::string& objective, std::uint64_t seed, bool stratified) {
          CVSpec spec;
          spec.folds = folds;
          spec.objective = parse_objective(objective);
          spec.seed = seed;
          spec.stratified = stratified;
          for (const auto& item : nlohmann::json::parse(grid)) spec.grid.push_back(model_params_from_json(item));
          return to_json(cross_validate(dataset(x, labels, 0), spec)).dump();
        },
        py::arg("x"), py::arg("labels"), py::arg("grid"), py::arg("folds"), py::arg("objective"), py::arg("seed"),
        py::arg("stratified"));

  m.def("chequerboard",
        [](int per_cell, std::uint64_t seed) {
          const LabeledDataset d = gen_chequerboard(per_cell, seed);
          return py::make_tuple(matrix_of(d.points), d.labels);
        },
        py::arg("per_cell"), py::arg("seed"));
}

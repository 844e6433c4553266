#include "permclass/experiments.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "permclass/error.hpp"
#include "permclass/io.hpp"
#include "permclass/parallel.hpp"
#include "permclass/random.hpp"

namespace permclass {

namespace {

std::vector<ModelParams> table1_grid(const Table1Config& config, KernelFamily family) {
  std::vector<ModelParams> grid;
  for (double tau : config.taus) {
    for (double alpha : config.alphas) {
      ModelParams p;
      p.kernel.family = family;
      p.kernel.tau = tau;
      p.alphas = {alpha};
      p.order = RatioOrder(ApproxOrder(config.order));
      grid.push_back(p);
    }
  }
  return grid;
}

int count_errors(const std::vector<PosteriorRow>& rows, const std::vector<int>& truth) {
  int wrong = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) wrong += rows[i].label != truth[i] ? 1 : 0;
  return wrong;
}

struct PermanentalOutcome {
  CVReport cv;
  int train_errors = 0;
  int test_errors = 0;
  std::vector<double> grid_p1;
};

PermanentalOutcome run_permanental(const LabeledDataset& train, const LabeledDataset& test,
                                   const Table1Config& config, KernelFamily family,
                                   std::uint64_t cv_seed) {
  PermanentalOutcome out;
  CVSpec spec;
  spec.folds = config.folds;
  spec.grid = table1_grid(config, family);
  spec.objective = config.objective;
  spec.seed = cv_seed;
  out.cv = cross_validate(train, spec);
  const FittedModel model = fit(train, out.cv.best().params);
  out.train_errors = count_errors(predict_finite(model, train.points), train.labels);
  const auto rows = predict_finite(model, test.points);
  out.test_errors = count_errors(rows, test.labels);
  for (const auto& r : rows) out.grid_p1.push_back(r.probabilities[0]);
  return out;
}

std::string optional_count(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string();
}

}  // namespace

Table1Result reproduce_table1(const Table1Config& config) {
  Table1Result result;
  result.config = config;
  const LabeledDataset train = gen_chequerboard(config.per_cell, derive_seed(config.seed, 1));
  const LabeledDataset test = gen_grid_testset(config.grid_resolution);
  const std::uint64_t cv_seed = derive_seed(config.seed, 2);

  const auto k1 = run_permanental(train, test, config, KernelFamily::Exponential, cv_seed);
  const auto k2 = run_permanental(train, test, config, KernelFamily::Gaussian, cv_seed);
  result.cv_k1 = k1.cv;
  result.cv_k2 = k2.cv;
  result.grid_p1_k1 = k1.grid_p1;
  result.grid_p1_k2 = k2.grid_p1;

  int knn_train = 0;
  for (std::size_t i = 0; i < train.size(); ++i) {
    knn_train += knn_predict(train, train.points[i], config.knn_k) != train.labels[i] ? 1 : 0;
  }
  std::vector<int> knn_wrong(test.size(), 0);
  parallel_for(test.size(), [&](std::size_t i) {
    knn_wrong[i] = knn_predict(train, test.points[i], config.knn_k) != test.labels[i] ? 1 : 0;
  });
  const int knn_test = std::accumulate(knn_wrong.begin(), knn_wrong.end(), 0);

  result.rows = {
      {"permanental K1", k1.train_errors, k1.test_errors, ""},
      {"permanental K2", k2.train_errors, k2.test_errors, ""},
      {"neural network", std::nullopt, std::nullopt, "external"},
      {"support vector machine", std::nullopt, std::nullopt, "external"},
      {"aggregated classification tree", std::nullopt, std::nullopt, "external"},
      {"k-nearest neighbour (k=" + std::to_string(config.knn_k) + ")", knn_train, knn_test, ""},
  };
  return result;
}

nlohmann::json to_json(const Table1Config& c) {
  return {{"per_cell", c.per_cell}, {"grid_resolution", c.grid_resolution},
          {"folds", c.folds},       {"taus", c.taus},
          {"alphas", c.alphas},     {"objective", std::string(to_string(c.objective))},
          {"order", c.order},       {"knn_k", c.knn_k},
          {"seed", c.seed}};
}

std::string table1_csv(const Table1Result& result) {
  const int train_total = 9 * result.config.per_cell;
  const int test_total = result.config.grid_resolution * result.config.grid_resolution;
  std::ostringstream out;
  out << "method,train_errors,train_total,test_errors,test_total,tau,alpha,note\n";
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& row = result.rows[i];
    std::string tau;
    std::string alpha;
    if (i < 2) {
      const auto& p = (i == 0 ? result.cv_k1 : result.cv_k2).best().params;
      tau = format_double(p.kernel.tau);
      alpha = format_double(p.alphas.front());
    }
    out << row.method << ',' << optional_count(row.train_errors) << ',' << train_total << ','
        << optional_count(row.test_errors) << ',' << test_total << ',' << tau << ',' << alpha
        << ',' << row.note << '\n';
  }
  return out.str();
}

std::string grid_probability_csv(const Table1Result& result) {
  const LabeledDataset grid = gen_grid_testset(result.config.grid_resolution);
  std::ostringstream out;
  out << "x1,x2,label,p1_k1,p1_k2\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << format_double(grid.points[i][0]) << ',' << format_double(grid.points[i][1]) << ','
        << grid.labels[i] << ',' << format_double(result.grid_p1_k1[i]) << ','
        << format_double(result.grid_p1_k2[i]) << '\n';
  }
  return out.str();
}

MicroarrayResult reproduce_microarray(const MicroarrayConfig& config, const ExpressionMatrix* expr) {
  MicroarrayResult result;
  result.config = config;
  std::optional<SyntheticExpression> synthetic;
  if (expr == nullptr) {
    synthetic = gen_synthetic_expression(config.synthetic);
    expr = &synthetic->expr;
  }
  if (config.gene_counts.empty()) throw Error("microarray: no gene counts");
  const std::size_t max_genes = *std::max_element(config.gene_counts.begin(), config.gene_counts.end());
  if (max_genes > expr->genes()) throw Error("microarray: more selected genes than available");

  SplitPlan plan = config.splits;
  plan.seed = derive_seed(config.seed, 1);
  const auto splits = make_splits(expr->samples(), plan);
  result.methods = {"permanental K1", "permanental K2",
                    "k-nearest neighbour (k=" + std::to_string(config.knn_k) + ")"};
  const std::size_t methods = result.methods.size();
  const std::size_t counts = config.gene_counts.size();

  // errors[s][m * counts + g]
  std::vector<std::vector<int>> errors(splits.size(), std::vector<int>(methods * counts, 0));
  parallel_for(splits.size(), [&](std::size_t s) {
    const Split& split = splits[s];
    const auto ranking = rank_genes_bw(*expr, split.train);
    for (std::size_t g = 0; g < counts; ++g) {
      std::vector<std::size_t> genes;
      for (std::size_t r = 0; r < config.gene_counts[g]; ++r) genes.push_back(ranking[r].gene);
      const LabeledDataset train = expr->dataset(genes, split.train);
      const LabeledDataset test = expr->dataset(genes, split.test);
      double scale = median_pairwise_distance(train.points);
      if (!(scale > 0.0)) scale = 1.0;
      for (std::size_t m = 0; m < 2; ++m) {
        std::vector<ModelParams> grid;
        for (double ts : config.tau_scales) {
          ModelParams params;
          params.kernel.family = m == 0 ? KernelFamily::Exponential : KernelFamily::Gaussian;
          params.kernel.tau = ts * scale;
          params.alphas = {config.alpha};
          params.order = RatioOrder(ApproxOrder(config.order));
          grid.push_back(params);
        }
        ModelParams chosen = grid.front();
        if (grid.size() > 1) {
          CVSpec spec;
          spec.folds = config.inner_folds;
          spec.grid = grid;
          spec.objective = Objective::ErrorRate;
          spec.seed = derive_seed(config.seed, 1000 + s);
          chosen = cross_validate(train, spec).best().params;
        }
        const FittedModel model = fit(train, chosen);
        errors[s][m * counts + g] = count_errors(predict_finite(model, test.points), test.labels);
      }
      int wrong = 0;
      for (std::size_t i = 0; i < test.size(); ++i) {
        wrong += knn_predict(train, test.points[i], config.knn_k) != test.labels[i] ? 1 : 0;
      }
      errors[s][2 * counts + g] = wrong;
    }
  });

  result.mean_errors.assign(methods, std::vector<double>(counts, 0.0));
  for (const auto& e : errors) {
    for (std::size_t m = 0; m < methods; ++m) {
      for (std::size_t g = 0; g < counts; ++g) result.mean_errors[m][g] += e[m * counts + g];
    }
  }
  for (auto& row : result.mean_errors) {
    for (double& v : row) v /= static_cast<double>(splits.size());
  }

  const auto ranking = rank_genes_bw(*expr);
  std::vector<std::size_t> top;
  for (std::size_t r = 0; r < std::min<std::size_t>(50, ranking.size()); ++r) top.push_back(ranking[r].gene);
  result.projection = project_2d(*expr, top);
  return result;
}

nlohmann::json to_json(const MicroarrayConfig& c) {
  return {{"genes", c.synthetic.genes},
          {"class1_samples", c.synthetic.class1_samples},
          {"class2_samples", c.synthetic.class2_samples},
          {"informative", c.synthetic.informative},
          {"shift", c.synthetic.shift},
          {"synthetic_seed", c.synthetic.seed},
          {"repetitions", c.splits.repetitions},
          {"train_size", c.splits.train_size},
          {"test_size", c.splits.test_size},
          {"gene_counts", c.gene_counts},
          {"alpha", c.alpha},
          {"tau_scales", c.tau_scales},
          {"inner_folds", c.inner_folds},
          {"order", c.order},
          {"knn_k", c.knn_k},
          {"seed", c.seed}};
}

std::string microarray_csv(const MicroarrayResult& result) {
  std::ostringstream out;
  out << "genes";
  for (const auto& m : result.methods) out << ',' << m;
  out << '\n';
  for (std::size_t g = 0; g < result.config.gene_counts.size(); ++g) {
    out << result.config.gene_counts[g];
    for (const auto& row : result.mean_errors) out << ',' << format_double(row[g]);
    out << '\n';
  }
  return out.str();
}

std::string projection_csv(const ExpressionMatrix& expr, const Projection2D& projection) {
  std::ostringstream out;
  out << "sample,label,centroid_axis,principal_component\n";
  for (std::size_t s = 0; s < expr.samples(); ++s) {
    const int label = expr.sample_labels[s];
    out << expr.sample_ids[s] << ',' << expr.class_names.at(static_cast<std::size_t>(label - 1)) << ','
        << format_double(projection.centroid_axis[s]) << ','
        << format_double(projection.principal_component[s]) << '\n';
  }
  return out.str();
}

}  // namespace permclass

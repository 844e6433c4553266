#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "permclass/datasets.hpp"
#include "permclass/model_select.hpp"

namespace permclass {

// ---- chequerboard ---------------------------------------------------------

struct Table1Config {
  int per_cell = 10;
  int grid_resolution = 60;
  int folds = 10;
  std::vector<double> taus{0.25, 0.5, 1.0, 2.0};
  std::vector<double> alphas{0.5, 1.0, 2.0};
  Objective objective = Objective::ErrorRate;
  int order = 3;
  int knn_k = 5;
  std::uint64_t seed = 0;
};

struct Table1Row {
  std::string method;
  /// Missing for classifiers that are not run here.
  std::optional<int> train_errors;
  std::optional<int> test_errors;
  std::string note;
};

struct Table1Result {
  Table1Config config;
  std::vector<Table1Row> rows;
  CVReport cv_k1;
  CVReport cv_k2;
  /// P(class 1 | grid point) under the chosen K1 and K2 models.
  std::vector<double> grid_p1_k1;
  std::vector<double> grid_p1_k2;
};

/// Training and grid test error counts for the CV-tuned K1 and K2
/// permanental classifiers and a kNN baseline on a chequerboard sample.
/// Rows for classifiers not implemented here are marked "external".
Table1Result reproduce_table1(const Table1Config& config);

nlohmann::json to_json(const Table1Config& config);
std::string table1_csv(const Table1Result& result);
std::string grid_probability_csv(const Table1Result& result);

// ---- microarray -----------------------------------------------------------

struct MicroarrayConfig {
  SyntheticExpressionConfig synthetic;
  SplitPlan splits;
  std::vector<std::size_t> gene_counts{1, 2, 5, 10, 20, 50, 100, 200};
  double alpha = 1.0;
  /// tau = scale x median pairwise training distance. With more than one
  /// scale, each split picks one per kernel by inner cross-validation on its
  /// training samples (error rate, ties to the smaller tau).
  std::vector<double> tau_scales{0.1, 0.25, 0.5, 1.0};
  int inner_folds = 5;
  int order = 3;
  int knn_k = 5;
  std::uint64_t seed = 0;
};

struct MicroarrayResult {
  MicroarrayConfig config;
  std::vector<std::string> methods;
  /// mean_errors[m][g]: mean test error count of method m with gene_counts[g] genes.
  std::vector<std::vector<double>> mean_errors;
  Projection2D projection;
};

/// Repeated random train/test splits; in each split genes are ranked on the
/// training samples only and the top genes feed K1, K2 (tau scaled from the
/// median training distance) and kNN classifiers. Uses `expr` when given,
/// otherwise the synthetic generator.
MicroarrayResult reproduce_microarray(const MicroarrayConfig& config,
                                      const ExpressionMatrix* expr = nullptr);

nlohmann::json to_json(const MicroarrayConfig& config);
std::string microarray_csv(const MicroarrayResult& result);
std::string projection_csv(const ExpressionMatrix& expr, const Projection2D& projection);

}  // namespace permclass

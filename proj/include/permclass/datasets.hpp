#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "permclass/classifier.hpp"

namespace permclass {

// ---- synthetic generators -------------------------------------------------

/// Class on the 3x3 chequerboard over [0,3]^2: 1 when the cell's column and
/// row indices sum to an even number (corners and centre), else 2.
int chequerboard_label(double x, double y);

/// per_cell uniform points in each unit cell of [0,3]^2, cell by cell.
LabeledDataset gen_chequerboard(int per_cell, std::uint64_t seed);

/// resolution^2 cell-centred grid points over (0,3)^2, labelled by the
/// chequerboard rule. Row-major in y, then x.
LabeledDataset gen_grid_testset(int resolution);

/// i.i.d. draws from the symmetric triangular density on
/// (center - halfwidth, center + halfwidth) by inverse CDF.
std::vector<double> gen_triangular(std::size_t n, double center, double halfwidth,
                                   std::uint64_t seed);

/// Wraps scalars as 1-D points.
PointSet as_points(std::span<const double> values);

// ---- microarray data ------------------------------------------------------

struct ExpressionMatrix {
  Eigen::MatrixXd values;  // genes x samples
  std::vector<std::string> gene_ids;
  std::vector<std::string> sample_ids;
  std::vector<int> sample_labels;  // 1-based class ids
  std::vector<std::string> class_names;

  std::size_t genes() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t samples() const { return static_cast<std::size_t>(values.cols()); }

  /// Samples as feature vectors restricted to the given genes.
  PointSet sample_points(std::span<const std::size_t> genes,
                         std::span<const std::size_t> samples) const;
  LabeledDataset dataset(std::span<const std::size_t> genes,
                         std::span<const std::size_t> samples) const;
};

struct GeneScore {
  std::size_t gene = 0;
  double score = 0.0;
};

/// Between-group over within-group sum of squares per gene, computed on the
/// given samples (all samples when empty). Sorted by descending score, ties
/// by gene index. Zero within-group variance scores +inf; 0/0 scores 0.
std::vector<GeneScore> rank_genes_bw(const ExpressionMatrix& expr,
                                     std::span<const std::size_t> samples = {});

struct SplitPlan {
  int repetitions = 200;
  int train_size = 48;
  int test_size = 24;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Repetition r shuffles 0..n-1 with seed derive_seed(plan.seed, r) and takes
/// the first train_size indices as training. Both index lists are sorted.
std::vector<Split> make_splits(std::size_t n, const SplitPlan& plan);

struct SyntheticExpressionConfig {
  std::size_t genes = 500;
  std::size_t class1_samples = 47;
  std::size_t class2_samples = 25;
  std::size_t informative = 5;
  /// Class-2 mean shift of informative genes, in noise standard deviations.
  double shift = 2.0;
  std::uint64_t seed = 0;
};

struct SyntheticExpression {
  ExpressionMatrix expr;
  std::vector<std::size_t> informative;
};

/// Unit-normal noise with `informative` randomly placed genes shifted for
/// class 2. Classes are named ALL (1) and AML (2).
SyntheticExpression gen_synthetic_expression(const SyntheticExpressionConfig& config);

/// Per-sample coordinates on the line joining the class centroids and on
/// the first principal component.
struct Projection2D {
  std::vector<double> centroid_axis;
  std::vector<double> principal_component;
};

Projection2D project_2d(const ExpressionMatrix& expr, std::span<const std::size_t> genes = {});

// ---- CSV ingestion --------------------------------------------------------

enum class CsvSchema { FeaturesWithLabel, ExpressionMatrixWithSidecar };

/// Header row of feature names, final column `label` (integer class ids).
LabeledDataset load_features_csv(const std::string& path);
std::string features_csv(const LabeledDataset& data, std::span<const std::string> comments = {});
void save_features_csv(const std::string& path, const LabeledDataset& data,
                       std::span<const std::string> comments = {});

/// Genes-as-rows matrix (`gene,<sample ids...>`) plus a `sample,label`
/// sidecar. Rows with missing values are dropped. When class_names is
/// empty the classes are the sorted distinct sidecar labels; otherwise a
/// label outside class_names is an error.
ExpressionMatrix load_expression_csv(const std::string& matrix_path,
                                     const std::string& sidecar_path,
                                     std::vector<std::string> class_names = {});

std::variant<LabeledDataset, ExpressionMatrix> load_csv(const std::string& path, CsvSchema schema,
                                                        const std::string& sidecar_path = {});

/// Dense numeric CSV without header; `#` comments ignored.
Eigen::MatrixXd load_matrix_csv(const std::string& path);

/// Points from a CSV with a header row; a trailing `label` column is dropped.
PointSet load_points_csv(const std::string& path);

}  // namespace permclass

#include "permclass/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <spdlog/spdlog.h>

#include "permclass/error.hpp"
#include "permclass/random.hpp"

namespace permclass {

int chequerboard_label(double x, double y) {
  const auto cx = static_cast<long>(std::floor(x));
  const auto cy = static_cast<long>(std::floor(y));
  return ((cx + cy) % 2 == 0) ? 1 : 2;
}

LabeledDataset gen_chequerboard(int per_cell, std::uint64_t seed) {
  if (per_cell < 1) throw Error("gen_chequerboard: per_cell must be at least 1");
  Rng rng(seed);
  LabeledDataset data;
  data.num_classes = 2;
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) {
      for (int m = 0; m < per_cell; ++m) {
        const double x = col + rng.uniform();
        const double y = row + rng.uniform();
        data.points.push_back({x, y});
        data.labels.push_back((col + row) % 2 == 0 ? 1 : 2);
      }
    }
  }
  return data;
}

LabeledDataset gen_grid_testset(int resolution) {
  if (resolution < 2) throw Error("gen_grid_testset: resolution must be at least 2");
  LabeledDataset data;
  data.num_classes = 2;
  const double step = 3.0 / resolution;
  for (int b = 0; b < resolution; ++b) {
    for (int a = 0; a < resolution; ++a) {
      const double x = (a + 0.5) * step;
      const double y = (b + 0.5) * step;
      data.points.push_back({x, y});
      data.labels.push_back(chequerboard_label(x, y));
    }
  }
  return data;
}

std::vector<double> gen_triangular(std::size_t n, double center, double halfwidth,
                                   std::uint64_t seed) {
  if (n < 1) throw Error("gen_triangular: n must be at least 1");
  if (!(halfwidth > 0.0)) throw Error("gen_triangular: halfwidth must be positive");
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) {
    const double u = rng.uniform();
    v = u < 0.5 ? center - halfwidth + halfwidth * std::sqrt(2.0 * u)
                : center + halfwidth - halfwidth * std::sqrt(2.0 * (1.0 - u));
  }
  return out;
}

PointSet as_points(std::span<const double> values) {
  PointSet pts;
  pts.reserve(values.size());
  for (double v : values) pts.push_back({v});
  return pts;
}

PointSet ExpressionMatrix::sample_points(std::span<const std::size_t> gene_idx,
                                         std::span<const std::size_t> sample_idx) const {
  PointSet pts;
  pts.reserve(sample_idx.size());
  for (std::size_t s : sample_idx) {
    Point p;
    p.reserve(gene_idx.size());
    for (std::size_t g : gene_idx) {
      p.push_back(values(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(s)));
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

LabeledDataset ExpressionMatrix::dataset(std::span<const std::size_t> gene_idx,
                                         std::span<const std::size_t> sample_idx) const {
  LabeledDataset data;
  data.points = sample_points(gene_idx, sample_idx);
  data.num_classes = static_cast<int>(class_names.size());
  for (std::size_t s : sample_idx) data.labels.push_back(sample_labels.at(s));
  return data;
}

std::vector<GeneScore> rank_genes_bw(const ExpressionMatrix& expr,
                                     std::span<const std::size_t> samples) {
  std::vector<std::size_t> cols(samples.begin(), samples.end());
  if (cols.empty()) {
    cols.resize(expr.samples());
    std::iota(cols.begin(), cols.end(), std::size_t{0});
  }
  int k = 0;
  for (std::size_t s : cols) k = std::max(k, expr.sample_labels.at(s));
  std::vector<std::size_t> counts(static_cast<std::size_t>(k) + 1, 0);
  for (std::size_t s : cols) ++counts[static_cast<std::size_t>(expr.sample_labels[s])];
  int populated = 0;
  for (int r = 1; r <= k; ++r) {
    if (counts[static_cast<std::size_t>(r)] == 0) continue;
    if (counts[static_cast<std::size_t>(r)] < 2) {
      throw Error("rank_genes_bw: class " + std::to_string(r) + " has fewer than 2 samples");
    }
    ++populated;
  }
  if (populated < 2) throw Error("rank_genes_bw: need at least 2 classes");

  std::vector<GeneScore> scores(expr.genes());
  std::size_t infinite = 0;
  std::size_t degenerate = 0;
  std::vector<double> class_sum(static_cast<std::size_t>(k) + 1);
  for (std::size_t g = 0; g < expr.genes(); ++g) {
    const auto row = expr.values.row(static_cast<Eigen::Index>(g));
    std::fill(class_sum.begin(), class_sum.end(), 0.0);
    double total = 0.0;
    for (std::size_t s : cols) {
      const double v = row(static_cast<Eigen::Index>(s));
      class_sum[static_cast<std::size_t>(expr.sample_labels[s])] += v;
      total += v;
    }
    const double grand_mean = total / static_cast<double>(cols.size());
    double bss = 0.0;
    for (int r = 1; r <= k; ++r) {
      const auto n_r = counts[static_cast<std::size_t>(r)];
      if (n_r == 0) continue;
      const double d = class_sum[static_cast<std::size_t>(r)] / static_cast<double>(n_r) - grand_mean;
      bss += static_cast<double>(n_r) * d * d;
    }
    double wss = 0.0;
    for (std::size_t s : cols) {
      const auto r = static_cast<std::size_t>(expr.sample_labels[s]);
      const double d = row(static_cast<Eigen::Index>(s)) - class_sum[r] / static_cast<double>(counts[r]);
      wss += d * d;
    }
    double score;
    if (wss == 0.0) {
      score = bss == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      ++(bss == 0.0 ? degenerate : infinite);
    } else {
      score = bss / wss;
    }
    scores[g] = {g, score};
  }
  if (infinite > 0) {
    spdlog::warn("rank_genes_bw: {} gene(s) with zero within-group variance ranked first", infinite);
  }
  if (degenerate > 0) {
    spdlog::warn("rank_genes_bw: {} constant gene(s) scored 0", degenerate);
  }
  std::stable_sort(scores.begin(), scores.end(), [](const GeneScore& a, const GeneScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.gene < b.gene;
  });
  return scores;
}

std::vector<Split> make_splits(std::size_t n, const SplitPlan& plan) {
  if (plan.train_size < 1 || plan.test_size < 0 ||
      static_cast<std::size_t>(plan.train_size + plan.test_size) != n) {
    throw Error("make_splits: train_size + test_size must equal n = " + std::to_string(n));
  }
  if (plan.repetitions < 1) throw Error("make_splits: repetitions must be positive");
  std::vector<Split> splits;
  splits.reserve(static_cast<std::size_t>(plan.repetitions));
  for (int r = 0; r < plan.repetitions; ++r) {
    Rng rng(derive_seed(plan.seed, static_cast<std::uint64_t>(r)));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);
    Split s;
    const auto cut = perm.begin() + plan.train_size;
    s.train.assign(perm.begin(), cut);
    s.test.assign(cut, perm.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    splits.push_back(std::move(s));
  }
  return splits;
}

SyntheticExpression gen_synthetic_expression(const SyntheticExpressionConfig& config) {
  if (config.informative > config.genes) {
    throw Error("gen_synthetic_expression: more informative genes than genes");
  }
  Rng rng(config.seed);
  const std::size_t samples = config.class1_samples + config.class2_samples;
  SyntheticExpression out;
  ExpressionMatrix& e = out.expr;
  e.values.resize(static_cast<Eigen::Index>(config.genes), static_cast<Eigen::Index>(samples));
  e.class_names = {"ALL", "AML"};
  for (std::size_t s = 0; s < samples; ++s) {
    e.sample_ids.push_back("S" + std::to_string(s + 1));
    e.sample_labels.push_back(s < config.class1_samples ? 1 : 2);
  }
  for (std::size_t g = 0; g < config.genes; ++g) e.gene_ids.push_back("G" + std::to_string(g + 1));

  std::vector<std::size_t> genes(config.genes);
  std::iota(genes.begin(), genes.end(), std::size_t{0});
  rng.shuffle(genes);
  out.informative.assign(genes.begin(), genes.begin() + static_cast<std::ptrdiff_t>(config.informative));
  std::sort(out.informative.begin(), out.informative.end());

  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t g = 0; g < config.genes; ++g) {
      e.values(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(s)) = rng.normal();
    }
  }
  for (std::size_t g : out.informative) {
    for (std::size_t s = config.class1_samples; s < samples; ++s) {
      e.values(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(s)) += config.shift;
    }
  }
  return out;
}

Projection2D project_2d(const ExpressionMatrix& expr, std::span<const std::size_t> genes) {
  std::vector<std::size_t> rows(genes.begin(), genes.end());
  if (rows.empty()) {
    rows.resize(expr.genes());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
  }
  const auto n = static_cast<Eigen::Index>(expr.samples());
  const auto p = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x(n, p);  // samples x genes
  for (Eigen::Index j = 0; j < p; ++j) {
    x.col(j) = expr.values.row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(j)])).transpose();
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;

  Eigen::RowVectorXd c1 = Eigen::RowVectorXd::Zero(p);
  Eigen::RowVectorXd c2 = Eigen::RowVectorXd::Zero(p);
  double n1 = 0;
  double n2 = 0;
  for (Eigen::Index s = 0; s < n; ++s) {
    if (expr.sample_labels[static_cast<std::size_t>(s)] == 1) {
      c1 += x.row(s);
      ++n1;
    } else {
      c2 += x.row(s);
      ++n2;
    }
  }
  if (n1 == 0 || n2 == 0) throw Error("project_2d: need samples from two classes");
  Eigen::RowVectorXd axis = c2 / n2 - c1 / n1;
  if (axis.norm() > 0) axis.normalize();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  Eigen::VectorXd pc = svd.matrixV().col(0);
  Eigen::Index big = 0;
  pc.cwiseAbs().maxCoeff(&big);
  if (pc(big) < 0) pc = -pc;

  Projection2D out;
  const Eigen::VectorXd u = x * axis.transpose();
  const Eigen::VectorXd v = x * pc;
  out.centroid_axis.assign(u.data(), u.data() + u.size());
  out.principal_component.assign(v.data(), v.data() + v.size());
  return out;
}

}  // namespace permclass

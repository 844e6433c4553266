#include "permclass/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include <spdlog/spdlog.h>

#include "permclass/error.hpp"
#include "permclass/parallel.hpp"
#include "permclass/random.hpp"

namespace permclass {

void LabeledDataset::validate() const {
  if (labels.size() != points.size()) {
    throw Error("dataset: " + std::to_string(points.size()) + " points but " +
                std::to_string(labels.size()) + " labels");
  }
  for (const auto& p : points) {
    if (p.size() != points.front().size()) throw Error("dataset: points differ in dimension");
  }
  const int k = num_classes > 0 ? num_classes : max_label();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || labels[i] > k) {
      throw Error("dataset: label " + std::to_string(labels[i]) + " at row " + std::to_string(i) +
                  " outside 1.." + std::to_string(k));
    }
  }
}

int LabeledDataset::max_label() const {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.num_classes = num_classes;
  out.points.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    out.points.push_back(points.at(i));
    out.labels.push_back(labels.at(i));
  }
  return out;
}

std::string RatioOrder::to_string() const {
  return exact_ ? "exact" : std::to_string(approx_.k());
}

RatioOrder RatioOrder::parse(const std::string& s) {
  if (s == "exact") return exact();
  if (s.size() == 1 && s[0] >= '0' && s[0] <= '3') return RatioOrder(ApproxOrder(s[0] - '0'));
  throw Error("order must be 0, 1, 2, 3 or 'exact' (got '" + s + "')");
}

double ModelParams::alpha_for(int class_id) const {
  if (alphas.size() == 1) return alphas.front();
  return alphas.at(static_cast<std::size_t>(class_id - 1));
}

void ModelParams::validate() const {
  if (alphas.empty()) throw Error("model: at least one alpha is required");
  for (double a : alphas) {
    if (!(a > 0.0)) throw Error("model: alphas must be positive");
  }
  if (!(lambda > 0.0)) throw Error("model: lambda must be positive");
  kernel.validate();
}

FittedModel::FittedModel(ModelParams params, std::vector<ClassFit> classes,
                         LabeledDataset training)
    : params_(std::move(params)), classes_(std::move(classes)), training_(std::move(training)) {}

FittedModel fit(const LabeledDataset& data, const ModelParams& params) {
  params.validate();
  data.validate();
  const int k = data.num_classes > 0 ? data.num_classes : data.max_label();
  if (params.alphas.size() != 1 && static_cast<int>(params.alphas.size()) != k) {
    throw Error("model: " + std::to_string(params.alphas.size()) + " alphas for " +
                std::to_string(k) + " classes");
  }
  std::vector<FittedModel::ClassFit> classes(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < data.size(); ++i) {
    classes[static_cast<std::size_t>(data.labels[i] - 1)].points.push_back(data.points[i]);
  }
  for (int r = 1; r <= k; ++r) {
    auto& cls = classes[static_cast<std::size_t>(r - 1)];
    cls.alpha = params.alpha_for(r);
    if (cls.points.empty()) continue;
    GramMatrix g = gram(params.kernel, cls.points);
    if (params.order.is_exact()) {
      if (g.size() + 1 > params.limits.max_n) {
        throw SizeLimitError("fit: class " + std::to_string(r) + " has " +
                             std::to_string(g.size()) + " points, too many for exact ratios");
      }
      cls.gram = std::move(g);
    } else {
      const int k_table = std::max(params.order.approx().k() - 1, 0);
      cls.table = build_ratio_table(g, cls.alpha, ApproxOrder(k_table));
    }
  }
  LabeledDataset training = data;
  training.num_classes = k;
  return FittedModel(params, std::move(classes), std::move(training));
}

PosteriorRow normalize_weights(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total != 0.0) || !std::isfinite(total)) {
    throw DegenerateError("posterior: class weights sum to " + std::to_string(total));
  }
  PosteriorRow row;
  row.probabilities.reserve(weights.size());
  for (double w : weights) row.probabilities.push_back(w / total);
  std::size_t best = 0;
  for (std::size_t r = 1; r < row.probabilities.size(); ++r) {
    if (row.probabilities[r] > row.probabilities[best]) best = r;
  }
  row.label = static_cast<int>(best) + 1;
  row.weights = std::move(weights);
  return row;
}

PosteriorRow predict_finite(const FittedModel& model, const Point& t) {
  const ModelParams& params = model.params();
  std::vector<double> weights;
  weights.reserve(model.classes().size());
  for (const auto& cls : model.classes()) {
    if (cls.points.empty()) {
      weights.push_back(cls.alpha * eval(params.kernel, t, t));
    } else if (params.order.is_exact()) {
      weights.push_back(ratio_exact(*cls.gram, query_column(params.kernel, t, cls.points), cls.alpha,
                                    params.limits));
    } else {
      weights.push_back(ratio_approx(params.kernel, t, *cls.table, params.order.approx()));
    }
  }
  for (std::size_t r = 0; r < weights.size(); ++r) {
    if (weights[r] < 0.0) spdlog::warn("predict: negative weight {} for class {}", weights[r], r + 1);
  }
  return normalize_weights(std::move(weights));
}

std::vector<PosteriorRow> predict_finite(const FittedModel& model, const PointSet& queries) {
  std::vector<PosteriorRow> rows(queries.size());
  parallel_for(queries.size(), [&](std::size_t i) { rows[i] = predict_finite(model, queries[i]); });
  return rows;
}

PosteriorRow predict_infinite(const PointSet& x, const Partition& partition, const Point& t,
                              const ModelParams& params) {
  if (!(params.lambda > 0.0)) throw Error("predict_infinite: lambda must be positive");
  partition.validate(x.size());
  std::vector<double> weights;
  weights.reserve(partition.block_count() + 1);
  for (std::size_t b = 0; b < partition.block_count(); ++b) {
    PointSet members;
    for (std::size_t i : partition.blocks[b]) members.push_back(x[i]);
    try {
      const GramMatrix g = gram(params.kernel, members);
      const QueryColumn q = query_column(params.kernel, t, members);
      if (params.order.is_exact()) {
        weights.push_back(cyclic_ratio_exact(g, q, params.limits));
      } else {
        const ApproxOrder order = params.order.approx();
        const CyclicTable table = build_cyclic_table(g, ApproxOrder(std::max(order.k() - 1, 0)));
        weights.push_back(cyclic_ratio_approx(q, table, order));
      }
    } catch (const DegenerateError& e) {
      throw DegenerateError("block " + std::to_string(b) + ": " + e.what());
    }
  }
  weights.push_back(params.lambda * eval(params.kernel, t, t));
  return normalize_weights(std::move(weights));
}

Partition sequential_partition(const PointSet& stream, const ModelParams& params,
                               AssignmentRule rule) {
  if (!(params.lambda > 0.0)) throw Error("sequential_partition: lambda must be positive");
  Rng rng(rule.seed);
  Partition partition;
  PointSet seen;
  seen.reserve(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    std::size_t choice = 0;
    if (i > 0) {
      const PosteriorRow row = predict_infinite(seen, partition, stream[i], params);
      if (rule.kind == AssignmentRule::Kind::Argmax) {
        choice = static_cast<std::size_t>(row.label - 1);
      } else {
        const double u = rng.uniform();
        double cum = 0.0;
        choice = row.probabilities.size() - 1;
        for (std::size_t b = 0; b < row.probabilities.size(); ++b) {
          cum += row.probabilities[b];
          if (u < cum) {
            choice = b;
            break;
          }
        }
      }
    }
    if (choice == partition.block_count()) {
      partition.blocks.push_back({i});
    } else {
      partition.blocks[choice].push_back(i);
    }
    seen.push_back(stream[i]);
  }
  return partition;
}

int knn_predict(const LabeledDataset& train, const Point& t, int k) {
  if (train.size() == 0) throw Error("knn: empty training set");
  if (k < 1) throw Error("knn: k must be positive");
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    dist.emplace_back(euclidean_distance(train.points[i], t), i);
  }
  const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
  const int classes = std::max(train.num_classes, train.max_label());
  std::vector<int> votes(static_cast<std::size_t>(classes) + 1, 0);
  for (std::size_t m = 0; m < kk; ++m) ++votes[static_cast<std::size_t>(train.labels[dist[m].second])];
  int best = 1;
  for (int c = 2; c <= classes; ++c) {
    if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
  }
  return best;
}

}  // namespace permclass

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "permclass/cyclic.hpp"
#include "permclass/kernel.hpp"
#include "permclass/permanent.hpp"

namespace permclass {

/// Feature vectors with class ids 1..num_classes.
struct LabeledDataset {
  PointSet points;
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const { return points.size(); }
  /// Throws Error on size mismatch, ragged points or labels outside 1..num_classes.
  void validate() const;
  /// Largest label, or 0 when empty.
  int max_label() const;
  LabeledDataset subset(std::span<const std::size_t> indices) const;
};

/// How permanental ratios are evaluated: a cyclic approximation order or
/// exact enumeration.
class RatioOrder {
 public:
  constexpr RatioOrder() = default;
  constexpr explicit RatioOrder(ApproxOrder order) : approx_(order) {}
  static constexpr RatioOrder exact() {
    RatioOrder r;
    r.exact_ = true;
    return r;
  }
  bool is_exact() const { return exact_; }
  ApproxOrder approx() const { return approx_; }
  /// "exact" or the integer order.
  std::string to_string() const;
  static RatioOrder parse(const std::string& s);
  bool operator==(const RatioOrder&) const = default;

 private:
  bool exact_ = false;
  ApproxOrder approx_{3};
};

struct ModelParams {
  Kernel kernel;
  /// One alpha per class, or a single value shared by all classes.
  std::vector<double> alphas{1.0};
  /// Total weight for the infinitely-many-classes model.
  double lambda = 1.0;
  RatioOrder order;
  ExactLimits limits;

  double alpha_for(int class_id) const;
  void validate() const;
};

/// One posterior row: normalized probabilities, the unnormalized weights
/// they came from, and the 1-based argmax (lowest index wins ties).
struct PosteriorRow {
  std::vector<double> probabilities;
  std::vector<double> weights;
  int label = 0;
};

class FittedModel {
 public:
  struct ClassFit {
    PointSet points;
    double alpha = 1.0;
    std::optional<RatioTable> table;
    std::optional<GramMatrix> gram;
  };

  FittedModel(ModelParams params, std::vector<ClassFit> classes, LabeledDataset training);

  const ModelParams& params() const { return params_; }
  int num_classes() const { return static_cast<int>(classes_.size()); }
  const std::vector<ClassFit>& classes() const { return classes_; }
  const LabeledDataset& training() const { return training_; }

 private:
  ModelParams params_;
  std::vector<ClassFit> classes_;
  LabeledDataset training_;
};

/// Builds per-class Gram matrices and ratio tables. Empty classes are
/// allowed. The class count is data.num_classes, or the largest label when
/// that is not positive.
FittedModel fit(const LabeledDataset& data, const ModelParams& params);

/// Class posterior for a new point. Empty classes get weight alpha_r K(t,t).
PosteriorRow predict_finite(const FittedModel& model, const Point& t);
std::vector<PosteriorRow> predict_finite(const FittedModel& model, const PointSet& queries);

/// Block posterior for a new point: entries 0..#B-1 are the existing blocks,
/// entry #B is a new block with weight lambda K(t,t).
PosteriorRow predict_infinite(const PointSet& x, const Partition& partition, const Point& t,
                              const ModelParams& params);

struct AssignmentRule {
  enum class Kind { Argmax, Sample };
  Kind kind = Kind::Argmax;
  std::uint64_t seed = 0;

  static AssignmentRule argmax() { return {}; }
  static AssignmentRule sample(std::uint64_t seed) { return {Kind::Sample, seed}; }
};

/// Grows a partition by assigning the stream one point at a time.
Partition sequential_partition(const PointSet& stream, const ModelParams& params,
                               AssignmentRule rule);

/// Normalizes weights into a posterior row. Throws DegenerateError when the
/// weights sum to zero.
PosteriorRow normalize_weights(std::vector<double> weights);

/// k-nearest-neighbour majority vote (Euclidean); ties go to the lowest class id.
int knn_predict(const LabeledDataset& train, const Point& t, int k);

}  // namespace permclass

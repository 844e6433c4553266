#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "permclass/classifier.hpp"

namespace permclass {

enum class Objective { ErrorRate, CrossEntropy };

std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view name);

struct CVSpec {
  int folds = 10;
  std::vector<ModelParams> grid;
  Objective objective = Objective::ErrorRate;
  std::uint64_t seed = 0;
  bool stratified = false;
  /// Explicit fold id per row; overrides the seeded assignment when nonempty.
  std::vector<int> fold_of;
};

struct CandidateResult {
  ModelParams params;
  bool valid = true;
  std::string error;
  std::vector<double> fold_error_rate;
  std::vector<double> fold_cross_entropy;
  double mean_error_rate = 0.0;
  double mean_cross_entropy = 0.0;
  double mean_objective = 0.0;
};

struct CVReport {
  Objective objective = Objective::ErrorRate;
  int folds = 0;
  std::uint64_t seed = 0;
  std::vector<int> fold_of;
  std::vector<CandidateResult> candidates;
  /// Index into candidates. Ties on the mean objective go to the smaller
  /// tau, then the smaller alpha, then the earlier candidate.
  std::size_t winner = 0;

  const CandidateResult& best() const { return candidates.at(winner); }
};

/// Fold id in [0, folds) for every row: a seeded shuffle dealt round-robin,
/// so fold sizes differ by at most one. With labels, each class is shuffled
/// and dealt in turn (stratified).
std::vector<int> assign_folds(std::size_t n, int folds, std::uint64_t seed,
                              std::span<const int> labels = {});

CVReport cross_validate(const LabeledDataset& data, const CVSpec& spec);

/// Mean of -log p(true class), with p floored at 1e-12.
double cross_entropy(std::span<const PosteriorRow> posteriors, std::span<const int> truth);
double error_rate(std::span<const PosteriorRow> posteriors, std::span<const int> truth);

double median_pairwise_distance(const PointSet& points);

/// tau in {1/4, 1/2, 1, 2, 4} x median pairwise distance, alpha in
/// {1/4, 1/2, 1, 2, 4}, for each family.
std::vector<ModelParams> default_grid(const LabeledDataset& data,
                                      std::span<const KernelFamily> families,
                                      RatioOrder order = RatioOrder());

nlohmann::json to_json(const ModelParams& params);
ModelParams model_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CVReport& report);

}  // namespace permclass

#include "permclass/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <spdlog/spdlog.h>

#include "permclass/error.hpp"
#include "permclass/parallel.hpp"
#include "permclass/random.hpp"

namespace permclass {

namespace {

constexpr double kProbabilityFloor = 1e-12;

bool tie_break_less(const ModelParams& a, const ModelParams& b) {
  if (a.kernel.tau != b.kernel.tau) return a.kernel.tau < b.kernel.tau;
  return a.alphas < b.alphas;
}

}  // namespace

std::string_view to_string(Objective objective) {
  return objective == Objective::ErrorRate ? "error" : "xent";
}

Objective parse_objective(std::string_view name) {
  if (name == "error" || name == "error_rate") return Objective::ErrorRate;
  if (name == "xent" || name == "cross_entropy") return Objective::CrossEntropy;
  throw Error("unknown objective '" + std::string(name) + "' (expected error or xent)");
}

std::vector<int> assign_folds(std::size_t n, int folds, std::uint64_t seed,
                              std::span<const int> labels) {
  if (folds < 2) throw Error("cross-validation: folds must be at least 2");
  if (!labels.empty() && labels.size() != n) throw Error("assign_folds: label count mismatch");
  Rng rng(seed);
  std::vector<std::size_t> order;
  order.reserve(n);
  if (labels.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
  } else {
    std::vector<int> classes(labels.begin(), labels.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    for (int c : classes) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] == c) members.push_back(i);
      }
      rng.shuffle(members);
      order.insert(order.end(), members.begin(), members.end());
    }
  }
  std::vector<int> fold_of(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    fold_of[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(folds));
  }
  return fold_of;
}

double cross_entropy(std::span<const PosteriorRow> posteriors, std::span<const int> truth) {
  if (posteriors.size() != truth.size()) throw Error("cross_entropy: size mismatch");
  if (posteriors.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < posteriors.size(); ++i) {
    const double p = posteriors[i].probabilities.at(static_cast<std::size_t>(truth[i] - 1));
    acc -= std::log(std::max(p, kProbabilityFloor));
  }
  return acc / static_cast<double>(posteriors.size());
}

double error_rate(std::span<const PosteriorRow> posteriors, std::span<const int> truth) {
  if (posteriors.size() != truth.size()) throw Error("error_rate: size mismatch");
  if (posteriors.empty()) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < posteriors.size(); ++i) {
    if (posteriors[i].label != truth[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(posteriors.size());
}

CVReport cross_validate(const LabeledDataset& data, const CVSpec& spec) {
  data.validate();
  if (spec.grid.empty()) throw Error("cross-validation: empty candidate grid");
  if (spec.folds < 2) throw Error("cross-validation: folds must be at least 2");
  if (data.size() < static_cast<std::size_t>(spec.folds)) {
    throw Error("cross-validation: fewer points than folds");
  }
  const int k = data.num_classes > 0 ? data.num_classes : data.max_label();

  CVReport report;
  report.objective = spec.objective;
  report.folds = spec.folds;
  report.seed = spec.seed;
  if (spec.fold_of.empty()) {
    report.fold_of = assign_folds(data.size(), spec.folds, spec.seed,
                                  spec.stratified ? std::span<const int>(data.labels)
                                                  : std::span<const int>());
  } else {
    if (spec.fold_of.size() != data.size()) throw Error("cross-validation: fold_of size mismatch");
    for (int f : spec.fold_of) {
      if (f < 0 || f >= spec.folds) throw Error("cross-validation: fold id out of range");
    }
    report.fold_of = spec.fold_of;
  }

  std::vector<LabeledDataset> train(static_cast<std::size_t>(spec.folds));
  std::vector<LabeledDataset> test(static_cast<std::size_t>(spec.folds));
  for (int f = 0; f < spec.folds; ++f) {
    std::vector<std::size_t> tr;
    std::vector<std::size_t> te;
    for (std::size_t i = 0; i < data.size(); ++i) {
      (report.fold_of[i] == f ? te : tr).push_back(i);
    }
    train[static_cast<std::size_t>(f)] = data.subset(tr);
    train[static_cast<std::size_t>(f)].num_classes = k;
    test[static_cast<std::size_t>(f)] = data.subset(te);
  }

  const std::size_t folds = static_cast<std::size_t>(spec.folds);
  report.candidates.resize(spec.grid.size());
  for (std::size_t c = 0; c < spec.grid.size(); ++c) {
    auto& cand = report.candidates[c];
    cand.params = spec.grid[c];
    cand.fold_error_rate.assign(folds, 0.0);
    cand.fold_cross_entropy.assign(folds, 0.0);
  }
  std::vector<std::string> failures(spec.grid.size() * folds);

  parallel_for(spec.grid.size() * folds, [&](std::size_t job) {
    const std::size_t c = job / folds;
    const std::size_t f = job % folds;
    auto& cand = report.candidates[c];
    try {
      const FittedModel model = fit(train[f], cand.params);
      std::vector<PosteriorRow> rows;
      rows.reserve(test[f].size());
      for (const auto& p : test[f].points) rows.push_back(predict_finite(model, p));
      cand.fold_error_rate[f] = error_rate(rows, test[f].labels);
      cand.fold_cross_entropy[f] = cross_entropy(rows, test[f].labels);
    } catch (const std::exception& e) {
      failures[job] = e.what();
    }
  });

  bool any_valid = false;
  for (std::size_t c = 0; c < report.candidates.size(); ++c) {
    auto& cand = report.candidates[c];
    for (std::size_t f = 0; f < folds; ++f) {
      if (!failures[c * folds + f].empty()) {
        cand.valid = false;
        cand.error = failures[c * folds + f];
        break;
      }
    }
    if (!cand.valid) {
      spdlog::warn("cross-validation: candidate {} invalid: {}", c, cand.error);
      continue;
    }
    const auto mean = [](const std::vector<double>& v) {
      return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    cand.mean_error_rate = mean(cand.fold_error_rate);
    cand.mean_cross_entropy = mean(cand.fold_cross_entropy);
    cand.mean_objective =
        spec.objective == Objective::ErrorRate ? cand.mean_error_rate : cand.mean_cross_entropy;
    if (!any_valid) {
      report.winner = c;
      any_valid = true;
      continue;
    }
    const auto& best = report.candidates[report.winner];
    if (cand.mean_objective < best.mean_objective ||
        (cand.mean_objective == best.mean_objective && tie_break_less(cand.params, best.params))) {
      report.winner = c;
    }
  }
  if (!any_valid) throw Error("cross-validation: every candidate failed");
  return report;
}

double median_pairwise_distance(const PointSet& points) {
  std::vector<double> d;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      d.push_back(euclidean_distance(points[i], points[j]));
    }
  }
  if (d.empty()) return 0.0;
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  if (d.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(d.begin(), mid);
  return 0.5 * (lower + upper);
}

std::vector<ModelParams> default_grid(const LabeledDataset& data,
                                      std::span<const KernelFamily> families, RatioOrder order) {
  double scale = median_pairwise_distance(data.points);
  if (!(scale > 0.0)) scale = 1.0;
  static constexpr double kMultipliers[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<ModelParams> grid;
  for (KernelFamily family : families) {
    for (double tm : kMultipliers) {
      for (double alpha : kMultipliers) {
        ModelParams p;
        p.kernel.family = family;
        p.kernel.tau = tm * scale;
        p.alphas = {alpha};
        p.order = order;
        grid.push_back(p);
      }
    }
  }
  return grid;
}

nlohmann::json to_json(const ModelParams& params) {
  nlohmann::json kernel = {
      {"family", std::string(to_string(params.kernel.family))},
      {"tau", params.kernel.tau},
      {"c", params.kernel.c},
  };
  if (!params.kernel.table.empty()) kernel["table"] = params.kernel.table;
  if (params.kernel.matrix.size() > 0) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < params.kernel.matrix.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(params.kernel.matrix.cols()));
      for (Eigen::Index j = 0; j < params.kernel.matrix.cols(); ++j) {
        row[static_cast<std::size_t>(j)] = params.kernel.matrix(i, j);
      }
      rows.push_back(row);
    }
    kernel["matrix"] = rows;
  }
  return {
      {"kernel", kernel},
      {"alphas", params.alphas},
      {"lambda", params.lambda},
      {"order", params.order.to_string()},
  };
}

ModelParams model_params_from_json(const nlohmann::json& j) {
  ModelParams p;
  const auto& k = j.at("kernel");
  p.kernel.family = parse_kernel_family(k.at("family").get<std::string>());
  p.kernel.tau = k.value("tau", 1.0);
  p.kernel.c = k.value("c", 1.0);
  if (k.contains("table")) p.kernel.table = k.at("table").get<std::vector<double>>();
  if (k.contains("matrix")) {
    const auto rows = k.at("matrix").get<std::vector<std::vector<double>>>();
    p.kernel.matrix.resize(static_cast<Eigen::Index>(rows.size()),
                           static_cast<Eigen::Index>(rows.empty() ? 0 : rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.front().size()) throw Error("kernel matrix rows differ in length");
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        p.kernel.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
      }
    }
  }
  if (j.contains("alphas")) {
    p.alphas = j.at("alphas").get<std::vector<double>>();
  } else if (j.contains("alpha")) {
    p.alphas = {j.at("alpha").get<double>()};
  }
  p.lambda = j.value("lambda", 1.0);
  if (j.contains("order")) {
    const auto& o = j.at("order");
    p.order = RatioOrder::parse(o.is_string() ? o.get<std::string>() : std::to_string(o.get<int>()));
  }
  p.validate();
  return p;
}

nlohmann::json to_json(const CVReport& report) {
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& c : report.candidates) {
    nlohmann::json item = {{"params", to_json(c.params)}, {"valid", c.valid}};
    if (c.valid) {
      item["fold_error_rate"] = c.fold_error_rate;
      item["fold_cross_entropy"] = c.fold_cross_entropy;
      item["mean_error_rate"] = c.mean_error_rate;
      item["mean_cross_entropy"] = c.mean_cross_entropy;
      item["mean_objective"] = c.mean_objective;
    } else {
      item["error"] = c.error;
    }
    cands.push_back(item);
  }
  return {
      {"objective", std::string(to_string(report.objective))},
      {"folds", report.folds},
      {"seed", report.seed},
      {"fold_of", report.fold_of},
      {"candidates", cands},
      {"winner", report.winner},
      {"winner_params", to_json(report.best().params)},
  };
}

}  // namespace permclass

#include "permclass/benchmarks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "permclass/classifier.hpp"
#include "permclass/cyclic.hpp"
#include "permclass/datasets.hpp"
#include "permclass/error.hpp"
#include "permclass/io.hpp"
#include "permclass/parallel.hpp"
#include "permclass/permanent.hpp"
#include "permclass/random.hpp"

namespace permclass {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

// Keeps the optimizer from discarding timed calls.
volatile double sink = 0.0;

ProbabilityCurves probability_curves(const PointSet& class1, double class2_center,
                                     const AccuracyConfig& config, std::uint64_t seed) {
  constexpr double pi = std::numbers::pi;
  ProbabilityCurves out;
  out.class2_center = class2_center;
  LabeledDataset data;
  data.num_classes = 2;
  data.points = class1;
  data.labels.assign(class1.size(), 1);
  for (double v : gen_triangular(config.n, class2_center, pi, seed)) {
    data.points.push_back({v});
    data.labels.push_back(2);
  }
  out.t = linspace(-pi, class2_center + pi, config.probability_grid_points);
  for (int k = 1; k <= 3; ++k) {
    ModelParams params;
    params.kernel = Kernel::gaussian(config.tau);
    params.alphas = {config.alpha};
    params.order = RatioOrder(ApproxOrder(k));
    const FittedModel model = fit(data, params);
    std::vector<double> p(out.t.size());
    parallel_for(out.t.size(), [&](std::size_t i) {
      p[i] = predict_finite(model, Point{out.t[i]}).probabilities[0];
    });
    out.p1.push_back(std::move(p));
  }
  for (std::size_t a = 0; a < out.p1.size(); ++a) {
    for (std::size_t b = a + 1; b < out.p1.size(); ++b) {
      for (std::size_t i = 0; i < out.t.size(); ++i) {
        out.max_abs_difference = std::max(out.max_abs_difference, std::abs(out.p1[a][i] - out.p1[b][i]));
      }
    }
  }
  return out;
}

nlohmann::json to_json(const ProbabilityCurves& c) {
  return {{"class2_center", c.class2_center}, {"max_abs_difference", c.max_abs_difference}};
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("loglog_slope: need at least two points");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error("loglog_slope: values must be positive");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

BenchReport bench_orders(const BenchConfig& config) {
  if (config.sizes.empty() || !std::is_sorted(config.sizes.begin(), config.sizes.end())) {
    throw Error("bench_orders: sizes must be nonempty and ascending");
  }
  if (config.queries < 1) throw Error("bench_orders: need at least one query point");
  constexpr double pi = std::numbers::pi;
  BenchReport report;
  report.config = config;
  for (std::size_t n : config.sizes) {
    const PointSet x = as_points(gen_triangular(n, 0.0, pi, derive_seed(config.seed, n)));
    Rng rng(derive_seed(config.seed, n + 1));
    PointSet queries;
    for (std::size_t q = 0; q < config.queries; ++q) queries.push_back({rng.uniform(-pi, pi)});
    const GramMatrix g = gram(config.kernel, x);

    for (int k : config.orders) {
      const ApproxOrder order(k);
      const auto t0 = Clock::now();
      const RatioTable table = build_ratio_table(g, config.alpha, ApproxOrder(std::max(k - 1, 0)));
      BenchRow row;
      row.n = n;
      row.order = k;
      row.table_seconds = seconds_since(t0);

      // Warm up and size the repeat count on the first query.
      std::size_t repeats = 1;
      for (;;) {
        const auto s = Clock::now();
        for (std::size_t r = 0; r < repeats; ++r) sink = sink + ratio_approx(config.kernel, queries[0], table, order);
        if (seconds_since(s) >= config.min_sample_seconds || repeats >= (std::size_t{1} << 24)) break;
        repeats *= 2;
      }
      std::vector<double> per_query;
      for (const Point& t : queries) {
        const auto s = Clock::now();
        for (std::size_t r = 0; r < repeats; ++r) sink = sink + ratio_approx(config.kernel, t, table, order);
        per_query.push_back(seconds_since(s) / static_cast<double>(repeats));
      }
      row.median_query_seconds = median(per_query);
      row.repeats = repeats;
      report.rows.push_back(row);
    }
  }
  for (int k : config.orders) {
    std::vector<double> ns;
    std::vector<double> ts;
    for (const auto& row : report.rows) {
      if (row.order != k) continue;
      ns.push_back(static_cast<double>(row.n));
      ts.push_back(row.median_query_seconds);
    }
    report.slopes.push_back(ns.size() >= 2 ? loglog_slope(ns, ts) : 0.0);
  }
  return report;
}

nlohmann::json to_json(const BenchReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"n", r.n},
                    {"order", r.order},
                    {"median_query_seconds", r.median_query_seconds},
                    {"table_seconds", r.table_seconds},
                    {"repeats", r.repeats}});
  }
  nlohmann::json slopes = nlohmann::json::object();
  for (std::size_t i = 0; i < report.slopes.size(); ++i) {
    slopes[std::to_string(report.config.orders[i])] = report.slopes[i];
  }
  return {
      {"config",
       {{"sizes", report.config.sizes},
        {"orders", report.config.orders},
        {"kernel", std::string(to_string(report.config.kernel.family))},
        {"tau", report.config.kernel.tau},
        {"alpha", report.config.alpha},
        {"seed", report.config.seed},
        {"queries", report.config.queries}}},
      {"rows", rows},
      {"slopes", slopes},
  };
}

std::string bench_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "n,order,median_query_seconds,table_seconds,repeats\n";
  for (const auto& r : report.rows) {
    out << r.n << ',' << r.order << ',' << format_double(r.median_query_seconds) << ','
        << format_double(r.table_seconds) << ',' << r.repeats << '\n';
  }
  return out.str();
}

AccuracyReport accuracy_study(const AccuracyConfig& config) {
  constexpr double pi = std::numbers::pi;
  if (config.n < 1 || config.grid_points < 2) throw Error("accuracy_study: empty configuration");
  if (config.exact_subsample > config.n) throw Error("accuracy_study: subsample larger than sample");
  const auto start = Clock::now();
  AccuracyReport report;
  report.config = config;
  report.x = gen_triangular(config.n, 0.0, pi, derive_seed(config.seed, 1));
  const PointSet x = as_points(report.x);
  const Kernel kernel = Kernel::gaussian(config.tau);

  // Open grid over (-pi, pi).
  const double step = 2.0 * pi / static_cast<double>(config.grid_points);
  for (std::size_t i = 0; i < config.grid_points; ++i) {
    report.t.push_back(-pi + (static_cast<double>(i) + 0.5) * step);
  }
  const RatioTable table = build_ratio_table(gram(kernel, x), config.alpha, ApproxOrder(2));
  report.ratio.assign(3, std::vector<double>(report.t.size()));
  parallel_for(report.t.size(), [&](std::size_t i) {
    const QueryColumn q = query_column(kernel, {report.t[i]}, x);
    for (int k = 1; k <= 3; ++k) report.ratio[static_cast<std::size_t>(k - 1)][i] = ratio_approx(q, table, ApproxOrder(k));
  });

  std::size_t peak = 0;
  for (std::size_t i = 0; i < report.t.size(); ++i) {
    const double r1 = report.ratio[0][i];
    const double r2 = report.ratio[1][i];
    const double r3 = report.ratio[2][i];
    report.gap_21 += std::abs(r2 - r1) / r1;
    report.gap_32 += std::abs(r3 - r2) / r2;
    if (std::abs(report.t[i]) <= config.peak_halfwidth) {
      report.peak_ratio_21 += r2 / r1;
      report.peak_ratio_32 += r3 / r2;
      ++peak;
    }
  }
  report.gap_21 /= static_cast<double>(report.t.size());
  report.gap_32 /= static_cast<double>(report.t.size());
  if (peak > 0) {
    report.peak_ratio_21 /= static_cast<double>(peak);
    report.peak_ratio_32 /= static_cast<double>(peak);
  }

  if (config.exact_subsample > 0 && config.exact_queries > 0) {
    std::vector<std::size_t> idx(config.n);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng(derive_seed(config.seed, 2));
    rng.shuffle(idx);
    PointSet sub;
    for (std::size_t i = 0; i < config.exact_subsample; ++i) sub.push_back(x[idx[i]]);
    auto& cmp = report.exact;
    cmp.t = linspace(-0.75 * pi, 0.75 * pi, config.exact_queries);
    cmp.exact.resize(cmp.t.size());
    cmp.approx.assign(3, std::vector<double>(cmp.t.size()));
    const GramMatrix gs = gram(kernel, sub);
    const RatioTable sub_table = build_ratio_table(gs, config.alpha, ApproxOrder(2));
    parallel_for(cmp.t.size(), [&](std::size_t i) {
      const QueryColumn q = query_column(kernel, {cmp.t[i]}, sub);
      cmp.exact[i] = ratio_exact(gs, q, config.alpha);
      for (int k = 1; k <= 3; ++k) cmp.approx[static_cast<std::size_t>(k - 1)][i] = ratio_approx(q, sub_table, ApproxOrder(k));
    });
    cmp.mean_relative_error.assign(3, 0.0);
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t i = 0; i < cmp.t.size(); ++i) {
        cmp.mean_relative_error[k] += std::abs(cmp.approx[k][i] - cmp.exact[i]) / cmp.exact[i];
      }
      cmp.mean_relative_error[k] /= static_cast<double>(cmp.t.size());
    }
  }

  report.separated = probability_curves(x, config.separated_center, config, derive_seed(config.seed, 3));
  report.overlapped = probability_curves(x, config.overlapped_center, config, derive_seed(config.seed, 4));
  report.seconds = seconds_since(start);
  return report;
}

nlohmann::json to_json(const AccuracyConfig& c) {
  return {{"n", c.n},
          {"tau", c.tau},
          {"alpha", c.alpha},
          {"grid_points", c.grid_points},
          {"central_peak", "|t| <= " + format_double(c.peak_halfwidth)},
          {"exact_subsample", c.exact_subsample},
          {"exact_queries", c.exact_queries},
          {"separated_center", c.separated_center},
          {"overlapped_center", c.overlapped_center},
          {"probability_grid_points", c.probability_grid_points},
          {"seed", c.seed}};
}

nlohmann::json to_json(const AccuracyReport& r) {
  return {{"config", to_json(r.config)},
          {"peak_ratio_32", r.peak_ratio_32},
          {"peak_ratio_21", r.peak_ratio_21},
          {"gap_32", r.gap_32},
          {"gap_21", r.gap_21},
          {"exact",
           {{"t", r.exact.t},
            {"exact", r.exact.exact},
            {"approx", r.exact.approx},
            {"mean_relative_error", r.exact.mean_relative_error}}},
          {"separated", to_json(r.separated)},
          {"overlapped", to_json(r.overlapped)}};
}

std::string ratio_curves_csv(const AccuracyReport& r) {
  std::ostringstream out;
  out << "t,r1,r2,r3\n";
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    out << format_double(r.t[i]) << ',' << format_double(r.ratio[0][i]) << ','
        << format_double(r.ratio[1][i]) << ',' << format_double(r.ratio[2][i]) << '\n';
  }
  return out.str();
}

std::string probability_curves_csv(const ProbabilityCurves& c) {
  std::ostringstream out;
  out << "t,p1_order1,p1_order2,p1_order3\n";
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    out << format_double(c.t[i]);
    for (const auto& curve : c.p1) out << ',' << format_double(curve[i]);
    out << '\n';
  }
  return out.str();
}

}  // namespace permclass

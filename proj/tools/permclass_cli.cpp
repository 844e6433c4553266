// permclass command-line tool.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "permclass/benchmarks.hpp"
#include "permclass/classifier.hpp"
#include "permclass/cyclic.hpp"
#include "permclass/datasets.hpp"
#include "permclass/error.hpp"
#include "permclass/experiments.hpp"
#include "permclass/io.hpp"
#include "permclass/model_select.hpp"
#include "permclass/permanent.hpp"
#include "permclass/random.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace permclass;

namespace {

// ---- config files ---------------------------------------------------------

// Flat `key = value` lines mirroring long flags. Dotted kernel keys map to
// the kernel flags; everything else maps to --key.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  static const std::map<std::string, std::string> aliases = {
      {"kernel.family", "kernel"}, {"kernel.tau", "tau"}, {"kernel.c", "c"},
      {"kernel.table", "kernel-table"}, {"kernel.matrix", "kernel-matrix"},
  };
  std::vector<std::string> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r\"");
      const auto b = s.find_last_not_of(" \t\r\"");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (const auto it = aliases.find(key); it != aliases.end()) key = it->second;
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

// Moves `--config FILE` out of argv and splices the file's tokens in right
// after the subcommand path, so explicit flags (parsed later) win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!config) return args;
  std::size_t pos = 0;
  while (pos < args.size() && !args[pos].empty() && args[pos][0] != '-') ++pos;
  const auto tokens = config_tokens(*config);
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(pos), tokens.begin(), tokens.end());
  return args;
}

// ---- helpers --------------------------------------------------------------

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, what));
  return out;
}

template <class Int>
std::vector<Int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<Int> out;
  for (double v : parse_double_list(text, what)) {
    if (v < 0 || v != static_cast<double>(static_cast<Int>(v))) {
      throw Error(what + ": expected non-negative integers");
    }
    out.push_back(static_cast<Int>(v));
  }
  return out;
}

// Every option of a subcommand with its effective value.
json resolved_config(const CLI::App& app) {
  json config = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "h") continue;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      config[name] = results.empty() ? std::string() : results.back();
    } else {
      config[name] = opt->get_default_str();
    }
  }
  return config;
}

std::string with_comments(std::uint64_t seed, const json& config, const std::string& body) {
  std::string out;
  for (const auto& line : provenance_lines(seed, config)) out += "# " + line + "\n";
  return out + body;
}

json with_provenance(std::uint64_t seed, const json& config, json body) {
  body["provenance"] = {{"tool", "permclass"}, {"version", PERMCLASS_VERSION}, {"seed", seed}, {"config", config}};
  return body;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_file_atomically(path, content);
  }
}

struct KernelOptions {
  std::string family = "gaussian";
  double tau = 1.0;
  double c = 1.0;
  std::string table;
  std::string matrix;

  void add(CLI::App* app) {
    app->add_option("--kernel", family, "exponential (K1), gaussian (K2), diagonal, constant, block_constant, projection")
        ->capture_default_str();
    app->add_option("--tau", tau, "Length scale")->capture_default_str();
    app->add_option("--c", c, "Constant level")->capture_default_str();
    app->add_option("--kernel-table", table, "Comma list: diagonal f by index or block levels");
    app->add_option("--kernel-matrix", matrix, "Dense CSV matrix for the projection kernel");
  }

  Kernel build() const {
    Kernel k;
    k.family = parse_kernel_family(family);
    k.tau = tau;
    k.c = c;
    if (!table.empty()) k.table = parse_double_list(table, "--kernel-table");
    if (!matrix.empty()) k.matrix = load_matrix_csv(matrix);
    k.validate();
    return k;
  }
};

struct ModelOptions {
  KernelOptions kernel;
  std::string alphas = "1";
  double lambda = 1.0;
  std::string order = "3";

  void add(CLI::App* app) {
    kernel.add(app);
    app->add_option("--alpha", alphas, "alpha, or a comma list with one value per class")->capture_default_str();
    app->add_option("--lambda", lambda, "Total weight of new blocks")->capture_default_str();
    app->add_option("--order", order, "Approximation order 0..3 or 'exact'")->capture_default_str();
  }

  ModelParams build() const {
    ModelParams p;
    p.kernel = kernel.build();
    p.alphas = parse_double_list(alphas, "--alpha");
    p.lambda = lambda;
    p.order = RatioOrder::parse(order);
    p.validate();
    return p;
  }
};

// ---- subcommands ----------------------------------------------------------

struct PermOptions {
  std::string matrix;
  double alpha = 1.0;
  int order = 3;
  bool ratio = false;
};

void run_perm(const PermOptions& o, bool exact) {
  const Eigen::MatrixXd a = load_matrix_csv(o.matrix);
  if (a.rows() != a.cols()) throw Error("perm: matrix must be square");
  if (exact && !o.ratio) {
    std::cout << format_double(per_alpha_exact(a, o.alpha)) << "\n";
    return;
  }
  // The last row and column hold the query point.
  if (a.rows() < 1) throw Error("perm: ratio needs at least a 1x1 matrix");
  const auto n = a.rows() - 1;
  const GramMatrix gx = GramMatrix::from_matrix(a.topLeftCorner(n, n));
  QueryColumn q;
  q.self = a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) q.cross.push_back(a(n, i));
  if (exact) {
    std::cout << format_double(ratio_exact(gx, q, o.alpha)) << "\n";
    return;
  }
  const ApproxOrder order(o.order);
  const RatioTable table = build_ratio_table(gx, o.alpha, ApproxOrder(std::max(order.k() - 1, 0)));
  std::cout << format_double(ratio_approx(q, table, order)) << "\n";
}

std::vector<ModelParams> read_grid(const std::string& path, const LabeledDataset& data) {
  if (path.empty()) {
    const KernelFamily families[] = {KernelFamily::Exponential, KernelFamily::Gaussian};
    return default_grid(data, families);
  }
  std::ifstream in(path);
  if (!in) throw Error("cannot open grid file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  std::vector<ModelParams> grid;
  if (j.is_array()) {
    for (const auto& item : j) grid.push_back(model_params_from_json(item));
    return grid;
  }
  // {"families": [...], "taus": [...], "alphas": [...], "order": 3}
  const auto families = j.value("families", std::vector<std::string>{"exponential", "gaussian"});
  const auto taus = j.at("taus").get<std::vector<double>>();
  const auto alphas = j.at("alphas").get<std::vector<double>>();
  RatioOrder order;
  if (j.contains("order")) {
    const auto& o = j.at("order");
    order = RatioOrder::parse(o.is_string() ? o.get<std::string>() : std::to_string(o.get<int>()));
  }
  for (const auto& f : families) {
    for (double tau : taus) {
      for (double alpha : alphas) {
        ModelParams p;
        p.kernel.family = parse_kernel_family(f);
        p.kernel.tau = tau;
        p.alphas = {alpha};
        p.order = order;
        p.validate();
        grid.push_back(p);
      }
    }
  }
  return grid;
}

std::string ranked_genes_csv(const ExpressionMatrix& expr, const std::vector<GeneScore>& ranking,
                             std::size_t top) {
  std::ostringstream out;
  out << "rank,gene,score\n";
  for (std::size_t r = 0; r < std::min(top, ranking.size()); ++r) {
    out << (r + 1) << ',' << expr.gene_ids[ranking[r].gene] << ',' << format_double(ranking[r].score) << '\n';
  }
  return out.str();
}

std::string expression_matrix_csv(const ExpressionMatrix& e) {
  std::ostringstream out;
  out << "gene";
  for (const auto& s : e.sample_ids) out << ',' << s;
  out << '\n';
  for (std::size_t g = 0; g < e.genes(); ++g) {
    out << e.gene_ids[g];
    for (std::size_t s = 0; s < e.samples(); ++s) {
      out << ',' << format_double(e.values(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(s)));
    }
    out << '\n';
  }
  return out.str();
}

std::string sidecar_csv(const ExpressionMatrix& e) {
  std::ostringstream out;
  out << "sample,label\n";
  for (std::size_t s = 0; s < e.samples(); ++s) {
    out << e.sample_ids[s] << ',' << e.class_names.at(static_cast<std::size_t>(e.sample_labels[s] - 1)) << '\n';
  }
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("permclass"));

  CLI::App app{"Permanental-process classification tools", "permclass"};
  app.set_version_flag("--version", PERMCLASS_VERSION);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();
  app.add_option("--config", "Flat key = value file of flags (explicit flags win)");

  // perm
  auto* perm = app.add_subcommand("perm", "alpha-permanents and permanental ratios of a dense CSV matrix");
  perm->require_subcommand(1);
  PermOptions perm_opts;
  auto* perm_exact = perm->add_subcommand("exact", "per_alpha by enumeration (--ratio: exact ratio for the last index)");
  auto* perm_approx = perm->add_subcommand("approx", "Cyclic approximation of the ratio for the last index");
  for (auto* sub : {perm_exact, perm_approx}) {
    sub->add_option("--matrix", perm_opts.matrix, "Dense CSV matrix")->required()->check(CLI::ExistingFile);
    sub->add_option("--alpha", perm_opts.alpha, "alpha")->capture_default_str();
  }
  perm_exact->add_flag("--ratio", perm_opts.ratio, "Print per(A) / per(A without the last index)");
  perm_approx->add_option("--order", perm_opts.order, "Approximation order 0..3")->capture_default_str();

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit a finite-class permanental model");
  std::string fit_data;
  std::string fit_out;
  ModelOptions fit_model;
  fit_cmd->add_option("--data", fit_data, "Feature CSV with a final label column")->required()->check(CLI::ExistingFile);
  fit_model.add(fit_cmd);
  fit_cmd->add_option("--out", fit_out, "Model JSON path")->required();

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Class probabilities for query points");
  std::string predict_model;
  std::string predict_queries;
  std::string predict_out;
  predict_cmd->add_option("--model", predict_model, "Model JSON")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--queries", predict_queries, "Query CSV with a header row")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", predict_out, "Output CSV (stdout when omitted)");

  // partition
  auto* partition_cmd = app.add_subcommand("partition", "Sequential clustering with infinitely many classes");
  std::string partition_data;
  std::string partition_out;
  std::optional<std::uint64_t> partition_sample;
  ModelOptions partition_model;
  partition_cmd->add_option("--data", partition_data, "Point CSV with a header row")->required()->check(CLI::ExistingFile);
  partition_model.add(partition_cmd);
  partition_cmd->add_option("--sample", partition_sample, "Sample assignments with this seed instead of argmax");
  partition_cmd->add_option("--out", partition_out, "Output JSON (stdout when omitted)");

  // cv
  auto* cv_cmd = app.add_subcommand("cv", "Grid search by k-fold cross-validation");
  std::string cv_data;
  std::string cv_grid;
  std::string cv_out;
  int cv_folds = 10;
  std::string cv_objective = "error";
  std::uint64_t cv_seed = 0;
  bool cv_stratified = false;
  cv_cmd->add_option("--data", cv_data, "Feature CSV with a final label column")->required()->check(CLI::ExistingFile);
  cv_cmd->add_option("--grid", cv_grid, "Grid JSON (default: K1 and K2 around the median distance)");
  cv_cmd->add_option("--folds", cv_folds, "Number of folds")->capture_default_str();
  cv_cmd->add_option("--objective", cv_objective, "error or xent")->capture_default_str();
  cv_cmd->add_option("--seed", cv_seed, "Fold assignment seed")->capture_default_str();
  cv_cmd->add_flag("--stratified", cv_stratified, "Stratify folds by class");
  cv_cmd->add_option("--out", cv_out, "Report JSON (stdout when omitted)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Synthetic datasets");
  simulate->require_subcommand(1);
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  int sim_per_cell = 10;
  std::size_t sim_n = 100;
  double sim_center = 0.0;
  double sim_halfwidth = 3.141592653589793;
  int sim_label = 1;
  SyntheticExpressionConfig sim_expr;
  std::string sim_labels_out;
  auto* sim_cheq = simulate->add_subcommand("chequerboard", "Uniform points on the 3x3 chequerboard");
  sim_cheq->add_option("--per-cell", sim_per_cell, "Points per unit cell")->capture_default_str();
  auto* sim_tri = simulate->add_subcommand("triangular", "Symmetric triangular sample in one dimension");
  sim_tri->add_option("--n", sim_n, "Sample size")->capture_default_str();
  sim_tri->add_option("--center", sim_center, "Centre")->capture_default_str();
  sim_tri->add_option("--halfwidth", sim_halfwidth, "Half width")->capture_default_str();
  sim_tri->add_option("--label", sim_label, "Class id written in the label column")->capture_default_str();
  auto* sim_expr_cmd = simulate->add_subcommand("expression", "Gene expression matrix with planted genes");
  sim_expr_cmd->add_option("--genes", sim_expr.genes, "Genes")->capture_default_str();
  sim_expr_cmd->add_option("--class1", sim_expr.class1_samples, "Class 1 samples")->capture_default_str();
  sim_expr_cmd->add_option("--class2", sim_expr.class2_samples, "Class 2 samples")->capture_default_str();
  sim_expr_cmd->add_option("--informative", sim_expr.informative, "Planted genes")->capture_default_str();
  sim_expr_cmd->add_option("--shift", sim_expr.shift, "Class 2 shift of planted genes")->capture_default_str();
  sim_expr_cmd->add_option("--labels-out", sim_labels_out, "Sample label sidecar CSV")->required();
  for (auto* sub : {sim_cheq, sim_tri, sim_expr_cmd}) {
    sub->add_option("--seed", sim_seed, "Seed")->capture_default_str();
    sub->add_option("--out", sim_out, "Output CSV (stdout when omitted)");
  }

  // genes rank
  auto* genes = app.add_subcommand("genes", "Microarray gene utilities");
  genes->require_subcommand(1);
  auto* genes_rank = genes->add_subcommand("rank", "Rank genes by between/within sum of squares");
  std::string genes_expr;
  std::string genes_labels;
  std::size_t genes_top = 50;
  std::string genes_out;
  genes_rank->add_option("--expr", genes_expr, "Genes-as-rows CSV")->required()->check(CLI::ExistingFile);
  genes_rank->add_option("--labels", genes_labels, "sample,label CSV")->required()->check(CLI::ExistingFile);
  genes_rank->add_option("--top", genes_top, "Number of genes to report")->capture_default_str();
  genes_rank->add_option("--out", genes_out, "Output CSV (stdout when omitted)");

  // reproduce
  auto* reproduce = app.add_subcommand("reproduce", "End-to-end experiments");
  reproduce->require_subcommand(1);
  std::optional<std::uint64_t> rep_seed;
  std::string rep_out = ".";
  Table1Config t1;
  std::string t1_objective = "error";
  std::string micro_expr;
  std::string micro_labels;
  std::size_t micro_reps = 200;
  auto* rep_table1 = reproduce->add_subcommand("table1", "Chequerboard error counts");
  rep_table1->add_option("--per-cell", t1.per_cell, "Training points per cell")->capture_default_str();
  rep_table1->add_option("--resolution", t1.grid_resolution, "Test grid resolution")->capture_default_str();
  rep_table1->add_option("--folds", t1.folds, "CV folds")->capture_default_str();
  rep_table1->add_option("--objective", t1_objective, "error or xent")->capture_default_str();
  auto* rep_figure1 = reproduce->add_subcommand("figure1", "Cyclic approximation accuracy study");
  auto* rep_micro = reproduce->add_subcommand("microarray", "Gene-count error curves over random splits");
  rep_micro->add_option("--expr", micro_expr, "Genes-as-rows CSV (default: synthetic)")->check(CLI::ExistingFile);
  rep_micro->add_option("--labels", micro_labels, "sample,label CSV for --expr")->check(CLI::ExistingFile);
  rep_micro->add_option("--repetitions", micro_reps, "Random splits")->capture_default_str();
  for (auto* sub : {rep_table1, rep_figure1, rep_micro}) {
    sub->add_option("--seed", rep_seed, "Master seed (default: the experiment's pinned seed)");
    sub->add_option("--out", rep_out, "Output directory")->capture_default_str();
  }

  // study
  auto* study = app.add_subcommand("study", "Accuracy study summary as JSON");
  AccuracyConfig study_cfg;
  std::string study_out;
  study->add_option("--seed", study_cfg.seed, "Seed")->capture_default_str();
  study->add_option("--n", study_cfg.n, "Sample size")->capture_default_str();
  study->add_option("--tau", study_cfg.tau, "Gaussian length scale")->capture_default_str();
  study->add_option("--alpha", study_cfg.alpha, "alpha")->capture_default_str();
  study->add_option("--out", study_out, "Output JSON (stdout when omitted)");

  // bench
  auto* bench = app.add_subcommand("bench", "Per-query timing of the cyclic approximations");
  std::string bench_orders_str = "1,2,3";
  std::string bench_sizes = "100,200,400,800";
  std::uint64_t bench_seed = 0;
  std::size_t bench_queries = 20;
  std::string bench_out;
  std::string bench_csv_out;
  bench->add_option("--orders", bench_orders_str, "Comma list of orders")->capture_default_str();
  bench->add_option("--sizes", bench_sizes, "Comma list of ascending sizes")->capture_default_str();
  bench->add_option("--seed", bench_seed, "Seed")->capture_default_str();
  bench->add_option("--queries", bench_queries, "Query points per size")->capture_default_str();
  bench->add_option("--out", bench_out, "Report JSON");
  bench->add_option("--csv", bench_csv_out, "Timing table CSV");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (perm->parsed()) {
      run_perm(perm_opts, perm_exact->parsed());
    } else if (fit_cmd->parsed()) {
      const LabeledDataset data = load_features_csv(fit_data);
      const FittedModel model = fit(data, fit_model.build());
      emit(fit_out, with_provenance(0, resolved_config(*fit_cmd), model_to_json(model)).dump(2) + "\n");
    } else if (predict_cmd->parsed()) {
      std::ifstream in(predict_model);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw ParseError(predict_model + ": " + e.what());
      }
      const FittedModel model = model_from_json(j);
      const auto rows = predict_finite(model, load_points_csv(predict_queries));
      const auto comments = provenance_lines(0, resolved_config(*predict_cmd));
      emit(predict_out, posterior_csv(rows, comments));
    } else if (partition_cmd->parsed()) {
      const ModelParams params = partition_model.build();
      const AssignmentRule rule = partition_sample ? AssignmentRule::sample(*partition_sample) : AssignmentRule::argmax();
      const Partition p = sequential_partition(load_points_csv(partition_data), params, rule);
      emit(partition_out,
           with_provenance(partition_sample.value_or(0), resolved_config(*partition_cmd), to_json(p)).dump(2) + "\n");
    } else if (cv_cmd->parsed()) {
      const LabeledDataset data = load_features_csv(cv_data);
      CVSpec spec;
      spec.folds = cv_folds;
      spec.grid = read_grid(cv_grid, data);
      spec.objective = parse_objective(cv_objective);
      spec.seed = cv_seed;
      spec.stratified = cv_stratified;
      const CVReport report = cross_validate(data, spec);
      emit(cv_out, with_provenance(cv_seed, resolved_config(*cv_cmd), to_json(report)).dump(2) + "\n");
    } else if (simulate->parsed()) {
      if (sim_cheq->parsed()) {
        const LabeledDataset data = gen_chequerboard(sim_per_cell, sim_seed);
        const auto comments = provenance_lines(sim_seed, resolved_config(*sim_cheq));
        emit(sim_out, features_csv(data, comments));
      } else if (sim_tri->parsed()) {
        if (sim_label < 1) throw Error("simulate triangular: --label must be positive");
        LabeledDataset data;
        data.points = as_points(gen_triangular(sim_n, sim_center, sim_halfwidth, sim_seed));
        data.labels.assign(data.size(), sim_label);
        data.num_classes = sim_label;
        const auto comments = provenance_lines(sim_seed, resolved_config(*sim_tri));
        emit(sim_out, features_csv(data, comments));
      } else {
        sim_expr.seed = sim_seed;
        const auto synthetic = gen_synthetic_expression(sim_expr);
        const json config = resolved_config(*sim_expr_cmd);
        emit(sim_out, with_comments(sim_seed, config, expression_matrix_csv(synthetic.expr)));
        emit(sim_labels_out, with_comments(sim_seed, config, sidecar_csv(synthetic.expr)));
      }
    } else if (genes_rank->parsed()) {
      const ExpressionMatrix expr = load_expression_csv(genes_expr, genes_labels);
      const auto ranking = rank_genes_bw(expr);
      emit(genes_out, with_comments(0, resolved_config(*genes_rank), ranked_genes_csv(expr, ranking, genes_top)));
    } else if (reproduce->parsed()) {
      fs::create_directories(rep_out);
      const auto path = [&](const std::string& name) { return (fs::path(rep_out) / name).string(); };
      if (rep_table1->parsed()) {
        t1.seed = rep_seed.value_or(0);
        t1.objective = parse_objective(t1_objective);
        const json config = to_json(t1);
        const Table1Result r = reproduce_table1(t1);
        save_features_csv(path("chequerboard_train.csv"), gen_chequerboard(t1.per_cell, derive_seed(t1.seed, 1)),
                          provenance_lines(t1.seed, config));
        emit(path("table1.csv"), with_comments(t1.seed, config, table1_csv(r)));
        emit(path("table1_grid.csv"), with_comments(t1.seed, config, grid_probability_csv(r)));
        emit(path("table1_cv.json"),
             with_provenance(t1.seed, config, {{"k1", to_json(r.cv_k1)}, {"k2", to_json(r.cv_k2)}}).dump(2) + "\n");
        std::cout << table1_csv(r);
      } else if (rep_figure1->parsed()) {
        AccuracyConfig c;
        if (rep_seed) c.seed = *rep_seed;
        const json config = to_json(c);
        const AccuracyReport r = accuracy_study(c);
        emit(path("figure1_ratios.csv"), with_comments(c.seed, config, ratio_curves_csv(r)));
        emit(path("figure1_separated.csv"), with_comments(c.seed, config, probability_curves_csv(r.separated)));
        emit(path("figure1_overlapped.csv"), with_comments(c.seed, config, probability_curves_csv(r.overlapped)));
        const json summary = with_provenance(c.seed, config, to_json(r));
        emit(path("figure1_summary.json"), summary.dump(2) + "\n");
        std::cout << "peak R3/R2 " << format_double(r.peak_ratio_32) << ", peak R2/R1 "
                  << format_double(r.peak_ratio_21) << ", " << r.seconds << " s\n";
      } else {
        MicroarrayConfig c;
        c.seed = rep_seed.value_or(0);
        c.synthetic.seed = derive_seed(c.seed, 0);
        c.splits.repetitions = static_cast<int>(micro_reps);
        std::optional<ExpressionMatrix> expr;
        if (!micro_expr.empty()) {
          if (micro_labels.empty()) throw Error("reproduce microarray: --expr needs --labels");
          expr = load_expression_csv(micro_expr, micro_labels);
          c.splits.train_size = static_cast<int>(expr->samples() * 2 / 3);
          c.splits.test_size = static_cast<int>(expr->samples()) - c.splits.train_size;
        }
        json config = to_json(c);
        if (expr) config["expr"] = micro_expr;
        const MicroarrayResult r = reproduce_microarray(c, expr ? &*expr : nullptr);
        emit(path("microarray_errors.csv"), with_comments(c.seed, config, microarray_csv(r)));
        const ExpressionMatrix& shown = expr ? *expr : gen_synthetic_expression(c.synthetic).expr;
        emit(path("microarray_projection.csv"), with_comments(c.seed, config, projection_csv(shown, r.projection)));
        std::cout << microarray_csv(r);
      }
    } else if (study->parsed()) {
      const AccuracyReport r = accuracy_study(study_cfg);
      emit(study_out, with_provenance(study_cfg.seed, to_json(study_cfg), to_json(r)).dump(2) + "\n");
    } else if (bench->parsed()) {
      BenchConfig c;
      c.orders = parse_int_list<int>(bench_orders_str, "--orders");
      c.sizes = parse_int_list<std::size_t>(bench_sizes, "--sizes");
      c.seed = bench_seed;
      c.queries = bench_queries;
      const BenchReport r = bench_orders(c);
      const json config = resolved_config(*bench);
      if (!bench_out.empty()) emit(bench_out, with_provenance(bench_seed, config, to_json(r)).dump(2) + "\n");
      if (!bench_csv_out.empty()) emit(bench_csv_out, with_comments(bench_seed, config, bench_csv(r)));
      std::cout << bench_csv(r);
      for (std::size_t i = 0; i < r.slopes.size(); ++i) {
        std::cout << "slope order " << c.orders[i] << ": " << format_double(r.slopes[i]) << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include "tmr/harness.hpp"

#include "tmr/baselines.hpp"
#include "tmr/graph.hpp"
#include "tmr/parallel.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace tmr {

namespace {

using Json = nlohmann::ordered_json;

std::string format_double(Scalar v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("recipe: expected key=value, got '" + item + "'");
    }
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

Scalar kv_num(const std::map<std::string, std::string>& kv, const std::string& key,
              Scalar fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ValidationError("recipe: bad number for " + key);
  }
}

struct RunOutcome {
  Scalar accuracy = 0.0;
  Index iterations = 0;
  bool converged = true;
  Scalar seconds = 0.0;
  std::vector<Scalar> objective_trace;
  std::vector<Scalar> f_delta_trace;
};

Scalar accuracy_on(const IndexList& predicted, const IndexList& truth,
                   const IndexList& idx) {
  if (idx.empty()) return 0.0;
  Index hits = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (predicted[i] == truth[static_cast<std::size_t>(idx[i])]) ++hits;
  }
  return static_cast<Scalar>(hits) / static_cast<Scalar>(idx.size());
}

IndexList predict_columns(const Matrix& f, const IndexList& idx) {
  Matrix selected(f.rows(), static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    selected.col(static_cast<Index>(i)) = f.col(idx[i]);
  }
  return predict_labels(selected);
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "alptmr") return Method::AlpTmr;
  if (name == "gfhf") return Method::Gfhf;
  if (name == "llgc") return Method::Llgc;
  throw ValidationError("unknown method '" + name + "' (expected alptmr, gfhf or llgc)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::AlpTmr: return "alptmr";
    case Method::Gfhf: return "gfhf";
    case Method::Llgc: return "llgc";
  }
  return "?";
}

Dataset load_dataset(const std::string& source) {
  if (source.rfind("blobs:", 0) == 0) {
    const auto kv = parse_kv(source.substr(6));
    return synth_blobs(static_cast<Index>(kv_num(kv, "c", 3)),
                       static_cast<Index>(kv_num(kv, "per", 30)),
                       static_cast<Index>(kv_num(kv, "dim", 10)), kv_num(kv, "sep", 10.0),
                       kv_num(kv, "sigma", 1.0),
                       static_cast<std::uint64_t>(kv_num(kv, "seed", 0)));
  }
  if (source.rfind("moons:", 0) == 0) {
    const auto kv = parse_kv(source.substr(6));
    return synth_two_moons(static_cast<Index>(kv_num(kv, "n", 200)),
                           kv_num(kv, "noise", 0.1),
                           static_cast<std::uint64_t>(kv_num(kv, "seed", 0)));
  }
  if (source.size() >= 5 && source.substr(source.size() - 5) == ".tmr1") {
    return load_tmr1(source);
  }
  if (source.size() >= 4 && source.substr(source.size() - 4) == ".csv") {
    return load_csv(source);
  }
  throw ValidationError("dataset source must be a .csv/.tmr1 path or a blobs:/moons: recipe");
}

Scalar feature_std(const Matrix& x) {
  if (x.cols() < 2) return 0.0;
  Scalar total = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    const Scalar mean = x.row(i).mean();
    const Scalar var =
        (x.row(i).array() - mean).square().sum() / static_cast<Scalar>(x.cols() - 1);
    total += std::sqrt(var);
  }
  return total / static_cast<Scalar>(x.rows());
}

MetricsReport run_experiment(const ExperimentConfig& config, const Dataset& dataset) {
  if (config.repeats < 1) {
    throw ValidationError("run_experiment: repeats must be >= 1");
  }
  if (config.methods.empty()) {
    throw ValidationError("run_experiment: method list is empty");
  }

  MetricsReport report;
  report.config = config;
  report.dataset_name = dataset.name;

  const bool corrupt = config.corrupt_sigma > 0.0 && config.corrupt_fraction > 0.0;
  const Scalar sigma_abs = config.corrupt_sigma * feature_std(dataset.x);
  report.corrupt_variance_abs = corrupt ? sigma_abs * sigma_abs : 0.0;

  const std::size_t n_methods = config.methods.size();
  std::vector<std::vector<RunOutcome>> outcomes(
      n_methods, std::vector<RunOutcome>(static_cast<std::size_t>(config.repeats)));

  const bool wants_baseline =
      std::any_of(config.methods.begin(), config.methods.end(),
                  [](Method m) { return m != Method::AlpTmr; });

  parallel_for(config.repeats, [&](Index run) {
    const std::uint64_t run_seed = config.solver.seed ^ static_cast<std::uint64_t>(run);
    try {
      const auto [labeled, unlabeled] =
          split(dataset.labels, SplitSpec{config.labeled_per_class, run_seed});
      Matrix x = dataset.x;
      if (corrupt) {
        x = corrupt_gaussian(
            x, labeled,
            CorruptionSpec{report.corrupt_variance_abs, config.corrupt_fraction, run_seed});
      }
      const Matrix y = one_hot_Y(dataset.labels, labeled, dataset.class_count);

      // All methods in a run share the split, the corruption and the graph.
      Matrix w_base;
      if (wants_baseline) {
        w_base = lle_weights(x, knn(x, config.solver.k), config.solver.lle_reg)
                     .cwiseMax(0.0);
      }

      for (std::size_t m = 0; m < n_methods; ++m) {
        RunOutcome& out = outcomes[m][static_cast<std::size_t>(run)];
        const auto start = std::chrono::steady_clock::now();
        IndexList predicted;
        switch (config.methods[m]) {
          case Method::AlpTmr: {
            SolverConfig solver = config.solver;
            solver.seed = run_seed;
            const RecoveredModel model = fit(x, y, solver);
            predicted = classify(model, unlabeled);
            out.iterations = model.iterations;
            out.converged = model.converged;
            out.objective_trace = model.objective_trace;
            out.f_delta_trace = model.f_delta_trace;
            break;
          }
          case Method::Gfhf:
            predicted = predict_columns(gfhf(w_base, y, labeled), unlabeled);
            break;
          case Method::Llgc:
            predicted = predict_columns(llgc(w_base, y, config.llgc_mu), unlabeled);
            break;
        }
        out.accuracy = accuracy_on(predicted, dataset.labels, unlabeled);
        out.seconds = std::chrono::duration<Scalar>(std::chrono::steady_clock::now() - start)
                          .count();
      }
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " [run seed " +
                           std::to_string(run_seed) + "]");
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) + " [run seed " +
                            std::to_string(run_seed) + "]");
    }
  });

  const bool has_solver = std::any_of(config.methods.begin(), config.methods.end(),
                                      [](Method m) { return m == Method::AlpTmr; });
  for (std::size_t m = 0; m < n_methods; ++m) {
    MethodMetrics metrics;
    metrics.method = config.methods[m];
    Scalar sum = 0.0;
    for (const RunOutcome& out : outcomes[m]) {
      metrics.per_split_accuracy.push_back(out.accuracy);
      metrics.iterations.push_back(out.iterations);
      metrics.converged.push_back(out.converged);
      metrics.wall_time_sec += out.seconds;
      if (has_solver && config.methods[m] == Method::AlpTmr) {
        // Indexed by run, possibly empty (max_iter = 0).
        metrics.objective_traces.push_back(out.objective_trace);
        metrics.f_delta_traces.push_back(out.f_delta_trace);
      }
      sum += out.accuracy;
    }
    const Scalar n = static_cast<Scalar>(config.repeats);
    metrics.mean_accuracy = sum / n;
    Scalar ss = 0.0;
    for (Scalar a : metrics.per_split_accuracy) {
      ss += (a - metrics.mean_accuracy) * (a - metrics.mean_accuracy);
    }
    metrics.std_accuracy = config.repeats > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    metrics.best_accuracy = *std::max_element(metrics.per_split_accuracy.begin(),
                                              metrics.per_split_accuracy.end());
    report.methods.push_back(std::move(metrics));
  }

  if (!config.out_dir.empty()) {
    write_report(report, config.out_dir);
  }
  return report;
}

MetricsReport run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, load_dataset(config.dataset));
}

std::vector<Scalar> default_grid() {
  return {1e-8, 1e-6, 1e-4, 1e-2, 1.0, 1e2, 1e4, 1e6, 1e8};
}

GridResult grid_search(const ExperimentConfig& config, const Dataset& dataset,
                       const std::vector<Scalar>& grid, const GridEval& eval) {
  if (grid.empty()) {
    throw ValidationError("grid_search: empty grid");
  }
  GridEval score = eval;
  if (!score) {
    score = [&config, &dataset](const SolverConfig& solver) {
      ExperimentConfig cell = config;
      cell.methods = {Method::AlpTmr};
      cell.solver = solver;
      cell.out_dir.clear();
      return run_experiment(cell, dataset).methods.front().mean_accuracy;
    };
  }

  std::map<std::tuple<Scalar, Scalar, Scalar>, Scalar> seen;
  GridResult result;
  auto evaluate = [&](Scalar a, Scalar b, Scalar g) {
    const auto key = std::make_tuple(a, b, g);
    if (seen.count(key)) return;
    SolverConfig solver = config.solver;
    solver.alpha = a;
    solver.beta = b;
    solver.gamma = g;
    const Scalar acc = score(solver);
    seen.emplace(key, acc);
    result.table.push_back(GridCell{a, b, g, acc});
  };

  // Coordinate-wise protocol: each of the three parameters in turn is pinned
  // at its configured value while the other two sweep the candidate set.
  const SolverConfig& base = config.solver;
  for (Scalar b : grid)
    for (Scalar g : grid) evaluate(base.alpha, b, g);
  for (Scalar a : grid)
    for (Scalar g : grid) evaluate(a, base.beta, g);
  for (Scalar a : grid)
    for (Scalar b : grid) evaluate(a, b, base.gamma);

  const GridCell* best = &result.table.front();
  for (const GridCell& cell : result.table) {
    const auto cell_key = std::make_tuple(-cell.mean_accuracy, cell.alpha, cell.beta, cell.gamma);
    const auto best_key = std::make_tuple(-best->mean_accuracy, best->alpha, best->beta, best->gamma);
    if (cell_key < best_key) best = &cell;
  }
  result.best = config.solver;
  result.best.alpha = best->alpha;
  result.best.beta = best->beta;
  result.best.gamma = best->gamma;
  return result;
}

std::vector<AblationRow> ablation(const ExperimentConfig& config, const Dataset& dataset) {
  std::vector<AblationRow> rows;
  const std::vector<std::pair<std::string, int>> settings = {
      {"full", -1}, {"alpha=0", 0}, {"beta=0", 1}, {"gamma=0", 2}};
  for (const auto& [name, knockout] : settings) {
    ExperimentConfig variant = config;
    variant.methods = {Method::AlpTmr};
    variant.out_dir.clear();
    if (knockout == 0) variant.solver.alpha = 0.0;
    if (knockout == 1) variant.solver.beta = 0.0;
    if (knockout == 2) variant.solver.gamma = 0.0;
    const MetricsReport report = run_experiment(variant, dataset);
    const MethodMetrics& m = report.methods.front();
    rows.push_back(AblationRow{name, m.mean_accuracy, m.std_accuracy, m.best_accuracy});
  }
  return rows;
}

Scalar inter_class_mass(const Matrix& w, const IndexList& labels) {
  if (static_cast<Index>(labels.size()) != w.rows() || w.rows() != w.cols()) {
    throw DimensionMismatch("inter_class_mass: labels/W size mismatch");
  }
  Scalar cross = 0.0, total = 0.0;
  for (Index i = 0; i < w.rows(); ++i) {
    for (Index j = 0; j < w.cols(); ++j) {
      if (i == j) continue;
      const Scalar m = std::abs(w(i, j));
      total += m;
      if (labels[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(j)]) {
        cross += m;
      }
    }
  }
  return total > 0.0 ? cross / total : 0.0;
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("write_matrix_csv: cannot open " + path);
  }
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) {
    throw ValidationError("write_matrix_csv: write failed for " + path);
  }
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("read_matrix_csv: cannot open " + path);
  }
  std::vector<std::vector<Scalar>> rows;
  std::string line;
  long row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<Scalar> row;
    std::stringstream ss(line);
    std::string field;
    long col_no = 0;
    while (std::getline(ss, field, ',')) {
      ++col_no;
      Scalar v;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw ParseError(path, row_no, col_no, "bad number '" + field + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path, row_no, col_no, "ragged row");
    }
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Index>(rows.size()),
           rows.empty() ? 0 : static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return m;
}

namespace {

Index count_negative(const Matrix& m) {
  Index count = 0;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) < 0.0) ++count;
    }
  }
  return count;
}

}  // namespace

void dump_matrices(const RecoveredModel& model, const IndexList& labels,
                   const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw ValidationError("dump_matrices: cannot create " + dir + ": " + ec.message());
  }
  const fs::path base(dir);
  write_matrix_csv(model.f, (base / "F.csv").string());
  write_matrix_csv(model.f_clean, (base / "F_clean.csv").string());
  write_matrix_csv(model.e_f, (base / "E_F.csv").string());
  write_matrix_csv(model.w, (base / "W.csv").string());
  write_matrix_csv(model.w_clean, (base / "W_clean.csv").string());
  write_matrix_csv(model.e_w, (base / "E_W.csv").string());

  Json summary;
  summary["iterations"] = model.iterations;
  summary["converged"] = model.converged;
  summary["inter_class_mass"] = {{"W_init", inter_class_mass(model.w_init, labels)},
                                 {"W", inter_class_mass(model.w, labels)},
                                 {"W_clean", inter_class_mass(model.w_clean, labels)}};
  summary["negative_entries"] = {{"F", count_negative(model.f)},
                                 {"F_clean", count_negative(model.f_clean)}};
  std::ofstream out(base / "summary.json");
  if (!out) {
    throw ValidationError("dump_matrices: cannot open summary.json in " + dir);
  }
  out << summary.dump(2) << '\n';
}

std::string report_to_json(const MetricsReport& report) {
  const ExperimentConfig& cfg = report.config;
  Json j;
  j["dataset"] = report.dataset_name;
  j["repeats"] = cfg.repeats;
  j["labeled_per_class"] = cfg.labeled_per_class;
  j["seed"] = cfg.solver.seed;
  if (cfg.corrupt_sigma > 0.0 && cfg.corrupt_fraction > 0.0) {
    j["corruption"] = {{"sigma_rel", cfg.corrupt_sigma},
                       {"fraction", cfg.corrupt_fraction},
                       {"variance_abs", report.corrupt_variance_abs}};
  } else {
    j["corruption"] = nullptr;
  }
  j["solver"] = {{"alpha", cfg.solver.alpha},
                 {"beta", cfg.solver.beta},
                 {"gamma", cfg.solver.gamma},
                 {"tau", cfg.solver.tau},
                 {"k", cfg.solver.k},
                 {"lle_reg", cfg.solver.lle_reg},
                 {"u_labeled", cfg.solver.u_labeled},
                 {"u_unlabeled", cfg.solver.u_unlabeled},
                 {"max_iter", cfg.solver.max_iter},
                 {"tol", cfg.solver.tol}};
  j["llgc_mu"] = cfg.llgc_mu;
  j["methods"] = Json::array();
  for (const MethodMetrics& m : report.methods) {
    Json jm;
    jm["method"] = method_name(m.method);
    jm["mean_accuracy"] = m.mean_accuracy;
    jm["std_accuracy"] = m.std_accuracy;
    jm["best_accuracy"] = m.best_accuracy;
    jm["per_split_accuracy"] = m.per_split_accuracy;
    jm["iterations"] = m.iterations;
    jm["converged"] = m.converged;
    jm["wall_time_sec"] = m.wall_time_sec;
    j["methods"].push_back(std::move(jm));
  }
  return j.dump(2) + "\n";
}

std::string strip_timing(const std::string& report_json) {
  Json j = Json::parse(report_json);
  std::function<void(Json&)> scrub = [&](Json& node) {
    if (node.is_object()) {
      node.erase("wall_time_sec");
      for (auto& [key, value] : node.items()) scrub(value);
    } else if (node.is_array()) {
      for (auto& value : node) scrub(value);
    }
  };
  scrub(j);
  return j.dump(2) + "\n";
}

void write_report(const MetricsReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw ValidationError("write_report: cannot create " + out_dir + ": " + ec.message());
  }
  const fs::path base(out_dir);
  {
    std::ofstream out(base / "report.json");
    if (!out) {
      throw ValidationError("write_report: cannot open report.json in " + out_dir);
    }
    out << report_to_json(report);
  }
  for (const MethodMetrics& m : report.methods) {
    for (std::size_t r = 0; r < m.objective_traces.size(); ++r) {
      const fs::path path =
          base / ("trace_" + method_name(m.method) + "_run" + std::to_string(r) + ".csv");
      std::ofstream out(path);
      if (!out) {
        throw ValidationError("write_report: cannot open " + path.string());
      }
      out << "iter,objective,f_delta\n";
      for (std::size_t t = 0; t < m.objective_traces[r].size(); ++t) {
        out << (t + 1) << ',' << format_double(m.objective_traces[r][t]) << ','
            << format_double(m.f_delta_traces[r][t]) << '\n';
      }
    }
  }
}

void write_grid_csv(const GridResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("write_grid_csv: cannot open " + path);
  }
  out << "alpha,beta,gamma,mean_accuracy\n";
  for (const GridCell& cell : result.table) {
    out << format_double(cell.alpha) << ',' << format_double(cell.beta) << ','
        << format_double(cell.gamma) << ',' << format_double(cell.mean_accuracy) << '\n';
  }
}

void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("write_ablation_csv: cannot open " + path);
  }
  out << "setting,mean_accuracy,std_accuracy,best_accuracy\n";
  for (const AblationRow& row : rows) {
    out << row.setting << ',' << format_double(row.mean_accuracy) << ','
        << format_double(row.std_accuracy) << ',' << format_double(row.best_accuracy)
        << '\n';
  }
}

}  // namespace tmr

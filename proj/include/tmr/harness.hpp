#pragma once

#include "tmr/alptmr.hpp"
#include "tmr/data.hpp"
#include "tmr/types.hpp"

#include <functional>
#include <string>

namespace tmr {

enum class Method { AlpTmr, Gfhf, Llgc };

Method parse_method(const std::string& name);
std::string method_name(Method m);

struct ExperimentConfig {
  // File path (.csv / .tmr1) or synthetic recipe, e.g.
  // "blobs:c=3,per=30,dim=10,sep=10,sigma=1,seed=0" or "moons:n=200,noise=0.1,seed=0".
  std::string dataset;
  std::vector<Method> methods = {Method::AlpTmr};
  SolverConfig solver;
  Index labeled_per_class = 5;
  Index repeats = 10;
  // Corruption preset: sigma is a multiple of the dataset feature standard
  // deviation (mean of per-feature stds); fraction is the share of labeled
  // columns hit. Disabled while corrupt_sigma == 0.
  Scalar corrupt_sigma = 0.0;
  Scalar corrupt_fraction = 0.0;
  Scalar llgc_mu = 0.01;
  std::string out_dir;  // empty: nothing written
};

struct MethodMetrics {
  Method method = Method::AlpTmr;
  std::vector<Scalar> per_split_accuracy;
  std::vector<Index> iterations;  // solver sweeps; 0 for closed-form baselines
  std::vector<bool> converged;
  Scalar mean_accuracy = 0.0;
  Scalar std_accuracy = 0.0;
  Scalar best_accuracy = 0.0;
  Scalar wall_time_sec = 0.0;
  // Per-run convergence traces (solver methods only).
  std::vector<std::vector<Scalar>> objective_traces;
  std::vector<std::vector<Scalar>> f_delta_traces;
};

struct MetricsReport {
  ExperimentConfig config;
  std::string dataset_name;
  Scalar corrupt_variance_abs = 0.0;
  std::vector<MethodMetrics> methods;
};

// Loads a dataset from a file path or synthetic recipe string.
Dataset load_dataset(const std::string& source);

// Mean of the per-feature sample standard deviations; the unit behind the
// corrupt_sigma preset.
Scalar feature_std(const Matrix& x);

// Repeated-split benchmark: for each of `repeats` runs, split with seed
// (config seed XOR run index), optionally corrupt the labeled columns, fit
// every method on the identical split/corruption (paired comparison), and
// score accuracy on the unlabeled points against ground truth. Runs execute
// in parallel under the TMR_THREADS cap with results independent of the
// worker count. Writes report.json and per-run trace CSVs when out_dir is
// set.
MetricsReport run_experiment(const ExperimentConfig& config, const Dataset& dataset);
MetricsReport run_experiment(const ExperimentConfig& config);

struct GridCell {
  Scalar alpha = 0.0, beta = 0.0, gamma = 0.0;
  Scalar mean_accuracy = 0.0;
};

struct GridResult {
  SolverConfig best;
  std::vector<GridCell> table;  // one row per evaluated cell
};

// Scores one parameter cell; defaults to the mean solver accuracy of
// run_experiment on the given dataset.
using GridEval = std::function<Scalar(const SolverConfig&)>;

// Coordinate-wise grid search: fix one of alpha/beta/gamma at its configured
// value and sweep the other two over `grid`, for each of the three choices.
// Returns the argmax mean-accuracy config, ties broken by smaller
// (alpha, beta, gamma) lexicographically.
GridResult grid_search(const ExperimentConfig& config, const Dataset& dataset,
                       const std::vector<Scalar>& grid, const GridEval& eval = nullptr);

// The default 9-point per-axis candidate set {1e-8, 1e-6, ..., 1e8}.
std::vector<Scalar> default_grid();

struct AblationRow {
  std::string setting;  // "full", "alpha=0", "beta=0", "gamma=0"
  Scalar mean_accuracy = 0.0;
  Scalar std_accuracy = 0.0;
  Scalar best_accuracy = 0.0;
};

// Four seed-sharing solver benchmarks: the configured model and the three
// single-parameter knockouts.
std::vector<AblationRow> ablation(const ExperimentConfig& config, const Dataset& dataset);

// Fraction of absolute weight mass connecting samples of different classes,
// diagonal excluded; 0 when the matrix has no off-diagonal mass.
Scalar inter_class_mass(const Matrix& w, const IndexList& labels);

// Writes exactly {F.csv, F_clean.csv, E_F.csv, W.csv, W_clean.csv, E_W.csv,
// summary.json} into dir (created if missing).
void dump_matrices(const RecoveredModel& model, const IndexList& labels,
                   const std::string& dir);

// Plain comma-separated matrix files with shortest round-trip numbers.
void write_matrix_csv(const Matrix& m, const std::string& path);
Matrix read_matrix_csv(const std::string& path);

// Stable-key-order JSON for a report; timing fields carry measured wall time
// and are the only nondeterministic content.
std::string report_to_json(const MetricsReport& report);
// Removes every "wall_time_sec" field; what is left is byte-reproducible for
// a fixed config regardless of TMR_THREADS.
std::string strip_timing(const std::string& report_json);

void write_report(const MetricsReport& report, const std::string& out_dir);
void write_grid_csv(const GridResult& result, const std::string& path);
void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path);

}  // namespace tmr

// Command line front end: fit, bench, grid, ablate, dump and synth
// subcommands over the tmr library. Exit codes: 0 success, 1 validation
// error, 2 numerical failure.

#include "tmr/baselines.hpp"
#include "tmr/data.hpp"
#include "tmr/graph.hpp"
#include "tmr/harness.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace {

struct CommonOpts {
  std::string dataset;
  std::vector<std::string> methods = {"alptmr"};
  tmr::ExperimentConfig config;
  long pca_dim = 0;
  long rp_dim = 0;
  std::uint64_t rp_seed = 0;
};

void add_dataset_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--dataset", opts.dataset,
                  "Dataset: path to .csv/.tmr1, or recipe "
                  "blobs:c=3,per=30,dim=10,sep=10,sigma=1,seed=0 / "
                  "moons:n=200,noise=0.1,seed=0")
      ->required();
  cmd->add_option("--pca-dim", opts.pca_dim, "Reduce features with PCA to this dimension");
  cmd->add_option("--rp-dim", opts.rp_dim,
                  "Reduce features with a seeded Gaussian random projection");
  cmd->add_option("--rp-seed", opts.rp_seed, "Random projection seed");
}

void add_solver_options(CLI::App* cmd, CommonOpts& opts) {
  tmr::SolverConfig& s = opts.config.solver;
  cmd->add_option("--alpha", s.alpha, "Error-penalty weight alpha");
  cmd->add_option("--beta", s.beta, "Data-error factor beta");
  cmd->add_option("--gamma", s.gamma, "Weight-error factor gamma");
  cmd->add_option("--tau", s.tau, "IRLS regularizer tau");
  cmd->add_option("--k", s.k, "Nearest neighbors for the initial weights");
  cmd->add_option("--lle-reg", s.lle_reg, "Ridge for the local Gram systems");
  cmd->add_option("--u-labeled", s.u_labeled, "Fitness weight on labeled samples");
  cmd->add_option("--u-unlabeled", s.u_unlabeled, "Fitness weight on unlabeled samples");
  cmd->add_option("--max-iter", s.max_iter, "Maximum solver sweeps");
  cmd->add_option("--tol", s.tol, "Convergence tolerance on ||F_{t+1}-F_t||_F");
  cmd->add_option("--seed", s.seed, "Base seed for splits and corruption");
  cmd->add_option("--mu", opts.config.llgc_mu, "LLGC fitness weight");
  cmd->add_flag("--clamp-f-clean", s.clamp_f_clean,
                "Clamp negative recovered soft labels to zero after fitting");
}

void add_experiment_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--method", opts.methods, "Methods: alptmr, gfhf, llgc (repeatable)")
      ->delimiter(',');
  cmd->add_option("--labeled-per-class", opts.config.labeled_per_class,
                  "Labeled samples drawn per class");
  cmd->add_option("--repeats", opts.config.repeats, "Number of random splits");
  cmd->add_option("--corrupt-sigma", opts.config.corrupt_sigma,
                  "Corruption noise level in multiples of the feature std");
  cmd->add_option("--corrupt-fraction", opts.config.corrupt_fraction,
                  "Fraction of labeled columns corrupted");
}

tmr::Dataset load_with_preprocessing(const CommonOpts& opts) {
  tmr::Dataset d = tmr::load_dataset(opts.dataset);
  if (opts.pca_dim > 0) {
    d.x = tmr::pca_reduce(d.x, opts.pca_dim);
  }
  if (opts.rp_dim > 0) {
    d.x = tmr::random_projection(d.x, opts.rp_dim, opts.rp_seed);
  }
  return d;
}

void resolve_methods(CommonOpts& opts) {
  opts.config.methods.clear();
  for (const std::string& name : opts.methods) {
    opts.config.methods.push_back(tmr::parse_method(name));
  }
}

void print_method_line(const tmr::MethodMetrics& m) {
  std::printf("%-8s mean %.4f  std %.4f  best %.4f  (%.2fs)\n",
              tmr::method_name(m.method).c_str(), m.mean_accuracy, m.std_accuracy,
              m.best_accuracy, m.wall_time_sec);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust auto-weighted label propagation via triple matrix recovery"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Key-value config file; keys live in a section named after the "
                 "subcommand, e.g. [bench] dataset=... alpha=...");

  CommonOpts opts;

  auto* fit_cmd = app.add_subcommand("fit", "Fit one split and report accuracy");
  add_dataset_options(fit_cmd, opts);
  add_solver_options(fit_cmd, opts);
  fit_cmd->add_option("--method", opts.methods, "Method to fit")->delimiter(',');
  fit_cmd->add_option("--labeled-per-class", opts.config.labeled_per_class,
                      "Labeled samples drawn per class");
  fit_cmd->add_option("--corrupt-sigma", opts.config.corrupt_sigma,
                      "Corruption noise level in multiples of the feature std");
  fit_cmd->add_option("--corrupt-fraction", opts.config.corrupt_fraction,
                      "Fraction of labeled columns corrupted");

  auto* bench_cmd = app.add_subcommand("bench", "Repeated-split benchmark");
  add_dataset_options(bench_cmd, opts);
  add_solver_options(bench_cmd, opts);
  add_experiment_options(bench_cmd, opts);
  std::string bench_out;
  bench_cmd->add_option("--out", bench_out, "Output directory for report.json and traces");

  auto* grid_cmd = app.add_subcommand("grid", "Coordinate-wise parameter grid search");
  add_dataset_options(grid_cmd, opts);
  add_solver_options(grid_cmd, opts);
  add_experiment_options(grid_cmd, opts);
  std::vector<double> grid_values;
  std::string grid_out;
  grid_cmd->add_option("--grid", grid_values,
                       "Candidate values per axis (default 1e-8,1e-6,...,1e8)")
      ->delimiter(',');
  grid_cmd->add_option("--out", grid_out, "Output directory for grid_scores.csv");

  auto* ablate_cmd = app.add_subcommand("ablate", "Knockout study: full vs alpha/beta/gamma = 0");
  add_dataset_options(ablate_cmd, opts);
  add_solver_options(ablate_cmd, opts);
  add_experiment_options(ablate_cmd, opts);
  std::string ablate_out;
  ablate_cmd->add_option("--out", ablate_out, "Output directory for ablation.csv");

  auto* dump_cmd = app.add_subcommand("dump", "Fit one split and dump recovery matrices");
  add_dataset_options(dump_cmd, opts);
  add_solver_options(dump_cmd, opts);
  dump_cmd->add_option("--labeled-per-class", opts.config.labeled_per_class,
                       "Labeled samples drawn per class");
  dump_cmd->add_option("--corrupt-sigma", opts.config.corrupt_sigma,
                       "Corruption noise level in multiples of the feature std");
  dump_cmd->add_option("--corrupt-fraction", opts.config.corrupt_fraction,
                       "Fraction of labeled columns corrupted");
  std::string dump_out;
  dump_cmd->add_option("--out", dump_out, "Output directory for the matrix dumps")
      ->required();

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset file");
  std::string synth_kind = "blobs";
  long synth_classes = 3, synth_per = 30, synth_dim = 10, synth_n = 200;
  double synth_sep = 10.0, synth_sigma = 1.0, synth_noise = 0.1;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  synth_cmd->add_option("--kind", synth_kind, "blobs or moons");
  synth_cmd->add_option("--classes", synth_classes, "Blob classes");
  synth_cmd->add_option("--per-class", synth_per, "Samples per blob class");
  synth_cmd->add_option("--dim", synth_dim, "Blob feature dimension");
  synth_cmd->add_option("--separation", synth_sep, "Blob center separation");
  synth_cmd->add_option("--sigma", synth_sigma, "Blob noise sigma");
  synth_cmd->add_option("--n", synth_n, "Moons total points (even)");
  synth_cmd->add_option("--noise", synth_noise, "Moons noise sigma");
  synth_cmd->add_option("--seed", synth_seed, "Generator seed");
  synth_cmd->add_option("--out", synth_out, "Output path (.csv or .tmr1)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help
    }
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    if (*synth_cmd) {
      tmr::Dataset d;
      if (synth_kind == "blobs") {
        d = tmr::synth_blobs(synth_classes, synth_per, synth_dim, synth_sep, synth_sigma,
                             synth_seed);
      } else if (synth_kind == "moons") {
        d = tmr::synth_two_moons(synth_n, synth_noise, synth_seed);
      } else {
        throw tmr::ValidationError("synth: --kind must be blobs or moons");
      }
      if (synth_out.size() >= 5 && synth_out.substr(synth_out.size() - 5) == ".tmr1") {
        tmr::save_tmr1(d, synth_out);
      } else {
        tmr::save_csv(d, synth_out);
      }
      std::printf("wrote %s: %lld features, %lld samples, %lld classes\n",
                  synth_out.c_str(), static_cast<long long>(d.x.rows()),
                  static_cast<long long>(d.x.cols()),
                  static_cast<long long>(d.class_count));
      return 0;
    }

    if (*fit_cmd || *dump_cmd) {
      const tmr::Dataset d = load_with_preprocessing(opts);
      resolve_methods(opts);
      const std::uint64_t seed = opts.config.solver.seed;
      const auto [labeled, unlabeled] =
          tmr::split(d.labels, tmr::SplitSpec{opts.config.labeled_per_class, seed});
      tmr::Matrix x = d.x;
      if (opts.config.corrupt_sigma > 0.0 && opts.config.corrupt_fraction > 0.0) {
        const double sigma = opts.config.corrupt_sigma * tmr::feature_std(d.x);
        x = tmr::corrupt_gaussian(
            x, labeled, tmr::CorruptionSpec{sigma * sigma, opts.config.corrupt_fraction, seed});
      }
      const tmr::Matrix y = tmr::one_hot_Y(d.labels, labeled, d.class_count);

      if (*dump_cmd) {
        const tmr::RecoveredModel model = tmr::fit(x, y, opts.config.solver);
        tmr::dump_matrices(model, d.labels, dump_out);
        std::printf("dumped %s (iterations %lld, converged %s)\n", dump_out.c_str(),
                    static_cast<long long>(model.iterations),
                    model.converged ? "true" : "false");
        return 0;
      }

      const tmr::Method method = opts.config.methods.front();
      tmr::IndexList predicted;
      long long iterations = 0;
      bool converged = true;
      if (method == tmr::Method::AlpTmr) {
        const tmr::RecoveredModel model = tmr::fit(x, y, opts.config.solver);
        predicted = tmr::classify(model, unlabeled);
        iterations = model.iterations;
        converged = model.converged;
      } else {
        const tmr::Matrix w_base =
            tmr::lle_weights(x, tmr::knn(x, opts.config.solver.k), opts.config.solver.lle_reg)
                .cwiseMax(0.0);
        const tmr::Matrix f = method == tmr::Method::Gfhf
                                  ? tmr::gfhf(w_base, y, labeled)
                                  : tmr::llgc(w_base, y, opts.config.llgc_mu);
        tmr::Matrix selected(f.rows(), static_cast<tmr::Index>(unlabeled.size()));
        for (std::size_t i = 0; i < unlabeled.size(); ++i) {
          selected.col(static_cast<tmr::Index>(i)) = f.col(unlabeled[i]);
        }
        predicted = tmr::predict_labels(selected);
      }
      tmr::Index hits = 0;
      for (std::size_t i = 0; i < unlabeled.size(); ++i) {
        if (predicted[i] == d.labels[static_cast<std::size_t>(unlabeled[i])]) ++hits;
      }
      const double acc =
          unlabeled.empty() ? 0.0
                            : static_cast<double>(hits) / static_cast<double>(unlabeled.size());
      std::printf("%s accuracy %.4f on %zu unlabeled (iterations %lld, converged %s)\n",
                  tmr::method_name(method).c_str(), acc, unlabeled.size(), iterations,
                  converged ? "true" : "false");
      return 0;
    }

    if (*bench_cmd) {
      const tmr::Dataset d = load_with_preprocessing(opts);
      resolve_methods(opts);
      opts.config.out_dir = bench_out;
      const tmr::MetricsReport report = tmr::run_experiment(opts.config, d);
      for (const tmr::MethodMetrics& m : report.methods) print_method_line(m);
      if (!bench_out.empty()) {
        std::printf("report written to %s/report.json\n", bench_out.c_str());
      }
      return 0;
    }

    if (*grid_cmd) {
      const tmr::Dataset d = load_with_preprocessing(opts);
      resolve_methods(opts);
      const std::vector<double> grid =
          grid_values.empty() ? tmr::default_grid() : grid_values;
      const tmr::GridResult result = tmr::grid_search(opts.config, d, grid);
      std::printf("best: alpha %g beta %g gamma %g\n", result.best.alpha, result.best.beta,
                  result.best.gamma);
      if (!grid_out.empty()) {
        std::filesystem::create_directories(grid_out);
        tmr::write_grid_csv(result, grid_out + "/grid_scores.csv");
        std::printf("table written to %s/grid_scores.csv (%zu cells)\n", grid_out.c_str(),
                    result.table.size());
      }
      return 0;
    }

    if (*ablate_cmd) {
      const tmr::Dataset d = load_with_preprocessing(opts);
      resolve_methods(opts);
      const std::vector<tmr::AblationRow> rows = tmr::ablation(opts.config, d);
      for (const tmr::AblationRow& row : rows) {
        std::printf("%-8s mean %.4f  std %.4f  best %.4f\n", row.setting.c_str(),
                    row.mean_accuracy, row.std_accuracy, row.best_accuracy);
      }
      if (!ablate_out.empty()) {
        std::filesystem::create_directories(ablate_out);
        tmr::write_ablation_csv(rows, ablate_out + "/ablation.csv");
        std::printf("table written to %s/ablation.csv\n", ablate_out.c_str());
      }
      return 0;
    }
  } catch (const tmr::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const tmr::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

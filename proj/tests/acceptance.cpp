// Acceptance runner: executes every acceptance criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion. Exits nonzero if
// any criterion fails.

#include "oracles.hpp"
#include "tmr/alptmr.hpp"
#include "tmr/baselines.hpp"
#include "tmr/data.hpp"
#include "tmr/graph.hpp"
#include "tmr/harness.hpp"
#include "tmr/numerics.hpp"
#include "tmr/oos.hpp"
#include "tmr/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace tmr;

namespace {

int g_failures = 0;

void report(int num, const std::string& name, bool pass, const std::string& detail) {
  std::printf("criterion %2d %s %s%s%s\n", num, pass ? "PASS" : "FAIL", name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++g_failures;
}

Index count_negative(const Matrix& m) {
  Index count = 0;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) < 0.0) ++count;
    }
  }
  return count;
}

// Suite of criteria 1-2: clean 3-class blobs, N = 90, n = 10, K = 7,
// alpha = beta = gamma = 1e-2, 20 seeded runs.
struct MonotonicitySuite {
  std::vector<RecoveredModel> models;
  Scalar seconds = 0.0;
};

MonotonicitySuite run_monotonicity_suite() {
  MonotonicitySuite suite;
  const Dataset d = synth_blobs(3, 30, 10, 10.0, 1.0, 0);
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto [labeled, unlabeled] = split(d.labels, SplitSpec{5, seed});
    const Matrix y = one_hot_Y(d.labels, labeled, 3);
    SolverConfig cfg;
    cfg.alpha = 1e-2;
    cfg.beta = 1e-2;
    cfg.gamma = 1e-2;
    cfg.k = 7;
    cfg.tol = 1e-3;
    cfg.max_iter = 120;
    cfg.seed = seed;
    suite.models.push_back(fit(d.x, y, cfg));
  }
  suite.seconds = std::chrono::duration<Scalar>(std::chrono::steady_clock::now() - start).count();
  return suite;
}

void criterion_1_monotonicity(const MonotonicitySuite& suite) {
  bool monotone = true;
  Scalar worst = 0.0;
  for (const RecoveredModel& m : suite.models) {
    const std::vector<Scalar>& tr = m.objective_trace;
    const Scalar slack = 1e-8 * (1.0 + std::abs(tr.front()));
    for (std::size_t i = 1; i < tr.size(); ++i) {
      if (tr[i] > tr[i - 1] + slack) {
        monotone = false;
        worst = std::max(worst, tr[i] - tr[i - 1]);
      }
    }
  }
  const bool in_time = suite.seconds < 10.0;
  std::ostringstream detail;
  detail << "20 runs in " << suite.seconds << " s";
  if (!monotone) detail << ", worst increase " << worst;
  report(1, "objective monotonicity", monotone && in_time, detail.str());
}

void criterion_2_convergence(const MonotonicitySuite& suite) {
  Index worst_hit = 0;
  bool all_within = true;
  for (const RecoveredModel& m : suite.models) {
    Index hit = -1;
    for (std::size_t i = 0; i < m.f_delta_trace.size(); ++i) {
      if (m.f_delta_trace[i] <= 1e-3) {
        hit = static_cast<Index>(i) + 1;
        break;
      }
    }
    if (hit < 0) {
      all_within = false;
      worst_hit = std::max<Index>(worst_hit, static_cast<Index>(m.f_delta_trace.size()) + 1);
    } else {
      worst_hit = std::max(worst_hit, hit);
      if (hit > 30) all_within = false;
    }
  }
  std::ostringstream detail;
  detail << "worst first hit of 1e-3 at iteration " << worst_hit << " (limit 30)";
  report(2, "convergence within 30 iterations", all_within, detail.str());
}

struct RandomInstance {
  Matrix x, y, a, h, f, e_f, e_w, w;
  Vector q, d, o, u;
};

RandomInstance make_instance(Rng& rng, Index c, Index n, Index nn) {
  RandomInstance inst;
  inst.x = oracle::random_matrix(rng, n, nn);
  inst.f = oracle::random_matrix(rng, c, nn);
  inst.e_f = oracle::random_matrix(rng, c, nn, 0.3);
  Matrix m = oracle::random_matrix(rng, nn, nn, 0.4);
  inst.a = Matrix(m * m.transpose());
  inst.y = Matrix::Zero(c, nn);
  for (Index j = 0; j < std::min(c, nn); ++j) inst.y(j, j) = 1.0;
  inst.q.resize(nn);
  inst.d.resize(nn);
  inst.o.resize(nn);
  inst.u.resize(nn);
  for (Index i = 0; i < nn; ++i) {
    inst.q[i] = 0.2 + rng.uniform();
    inst.d[i] = 0.2 + rng.uniform();
    inst.o[i] = 0.2 + rng.uniform();
    inst.u[i] = i < nn / 2 ? 1.0 : 0.0;
  }
  inst.h = build_H(oracle::random_matrix(rng, c, nn), oracle::random_matrix(rng, n, nn));
  inst.e_w = oracle::random_matrix(rng, nn, nn, 0.2);
  inst.w = oracle::random_matrix(rng, nn, nn, 0.3);
  return inst;
}

void criterion_3_stationarity() {
  Rng rng(2024);
  const Scalar ab = 0.3, alpha = 0.45, ag = 0.35;
  Scalar worst = 0.0;
  bool pass = true;
  auto check = [&](const std::function<Scalar(const Matrix&)>& f, const Matrix& z) {
    const Scalar rel = fd_gradient(f, z, 1e-5).norm() / (1.0 + std::abs(f(z)));
    worst = std::max(worst, rel);
    if (rel > 1e-5) pass = false;
  };
  for (int trial = 0; trial < 20; ++trial) {
    RandomInstance inst = make_instance(rng, 8, 8, 12);
    check(oracle::data_subproblem(inst.x, inst.a, inst.q, ab),
          update_EX(inst.x, inst.a, inst.q, ab));
    check(oracle::label_subproblem_in_error(inst.f, inst.a, inst.u, inst.y, inst.d, alpha),
          update_EF(inst.f, inst.a, inst.u, inst.y, inst.d, alpha));
    check(oracle::label_subproblem_in_f(inst.e_f, inst.a, inst.u, inst.y),
          update_F(inst.e_f, inst.a, inst.u, inst.y));
    check(oracle::weight_subproblem_in_w(inst.h, inst.e_w, inst.o, ag),
          update_W_unconstrained(inst.h, inst.e_w));
    check(oracle::weight_subproblem_in_error(inst.h, inst.w, inst.o, ag),
          update_EW(inst.h, inst.w, inst.o, ag));
  }
  std::ostringstream detail;
  detail << "worst relative gradient " << worst << " over 5 updates x 20 instances";
  report(3, "closed-form updates are stationary points", pass, detail.str());
}

void criterion_4_oracle_equivalence() {
  Rng rng(4096);
  const Scalar ab = 0.4, alpha = 0.6, ag = 0.5;
  Scalar worst = 0.0;
  bool pass = true;
  auto check = [&](const Matrix& got, const Matrix& ref) {
    const Scalar err = (got - ref).norm();
    worst = std::max(worst, err);
    if (err > 1e-6) pass = false;
  };
  for (int trial = 0; trial < 3; ++trial) {
    RandomInstance inst = make_instance(rng, 5, 5, 6);
    check(update_EX(inst.x, inst.a, inst.q, ab),
          oracle::quad_minimize_probe(oracle::data_subproblem(inst.x, inst.a, inst.q, ab), 5, 6));
    check(update_EF(inst.f, inst.a, inst.u, inst.y, inst.d, alpha),
          oracle::quad_minimize_probe(
              oracle::label_subproblem_in_error(inst.f, inst.a, inst.u, inst.y, inst.d, alpha),
              5, 6));
    check(update_F(inst.e_f, inst.a, inst.u, inst.y),
          oracle::quad_minimize_probe(
              oracle::label_subproblem_in_f(inst.e_f, inst.a, inst.u, inst.y), 5, 6));
    check(update_W_unconstrained(inst.h, inst.e_w),
          oracle::quad_minimize_probe(
              oracle::weight_subproblem_in_w(inst.h, inst.e_w, inst.o, ag), 6, 6));
    check(update_EW(inst.h, inst.w, inst.o, ag),
          oracle::quad_minimize_probe(
              oracle::weight_subproblem_in_error(inst.h, inst.w, inst.o, ag), 6, 6));
  }
  std::ostringstream detail;
  detail << "worst Frobenius gap " << worst;
  report(4, "updates match the generic quadratic minimizer", pass, detail.str());
}

void criterion_5_clean_sanity() {
  ExperimentConfig cfg;
  cfg.dataset = "blobs:c=3,per=30,dim=10,sep=10,sigma=1,seed=0";
  cfg.methods = {Method::AlpTmr, Method::Gfhf};
  cfg.labeled_per_class = 5;
  cfg.repeats = 5;
  cfg.solver.seed = 7;
  cfg.solver.max_iter = 30;
  const MetricsReport r = run_experiment(cfg);
  bool pass = true;
  for (const MethodMetrics& m : r.methods) {
    for (Scalar acc : m.per_split_accuracy) {
      if (acc != 1.0) pass = false;
    }
  }
  std::ostringstream detail;
  detail << "alptmr mean " << r.methods[0].mean_accuracy << ", gfhf mean "
         << r.methods[1].mean_accuracy << " over 5 splits";
  report(5, "both solvers reach 100% on separable blobs", pass, detail.str());
}

// Corrupted-blob suite shared by criteria 6-9: overlapping 3-class blobs in
// 3 dimensions where the pinned corruption level (0.5 x feature std on half
// the labeled points) actually disturbs the graph, with solver parameters
// picked by a small grid search the way the underlying protocol tunes per
// dataset.
struct CorruptedSuite {
  Dataset data;
  ExperimentConfig config;
  std::vector<RecoveredModel> models;   // per run
  std::vector<Scalar> alptmr_accuracy;  // per run
  std::vector<Scalar> gfhf_accuracy;    // per run
};

CorruptedSuite run_corrupted_suite() {
  CorruptedSuite suite;
  suite.data = synth_blobs(3, 30, 3, 3.0, 1.0, 0);

  ExperimentConfig& cfg = suite.config;
  cfg.dataset = "blobs:c=3,per=30,dim=3,sep=3,sigma=1,seed=0";
  cfg.methods = {Method::AlpTmr, Method::Gfhf};
  cfg.labeled_per_class = 5;
  cfg.repeats = 15;
  cfg.corrupt_sigma = 0.5;
  cfg.corrupt_fraction = 0.5;
  cfg.solver.alpha = 0.1;
  cfg.solver.beta = 10.0;
  cfg.solver.gamma = 100.0;
  cfg.solver.max_iter = 30;
  cfg.solver.seed = 7;

  const Scalar fstd = feature_std(suite.data.x);
  const Scalar variance = (cfg.corrupt_sigma * fstd) * (cfg.corrupt_sigma * fstd);
  for (Index run = 0; run < cfg.repeats; ++run) {
    const std::uint64_t run_seed = cfg.solver.seed ^ static_cast<std::uint64_t>(run);
    const auto [labeled, unlabeled] =
        split(suite.data.labels, SplitSpec{cfg.labeled_per_class, run_seed});
    const Matrix x = corrupt_gaussian(suite.data.x, labeled,
                                      CorruptionSpec{variance, cfg.corrupt_fraction, run_seed});
    const Matrix y = one_hot_Y(suite.data.labels, labeled, 3);

    SolverConfig solver = cfg.solver;
    solver.seed = run_seed;
    RecoveredModel model = fit(x, y, solver);
    const IndexList pred = classify(model, unlabeled);
    Index hits = 0;
    for (std::size_t i = 0; i < unlabeled.size(); ++i) {
      if (pred[i] == suite.data.labels[static_cast<std::size_t>(unlabeled[i])]) ++hits;
    }
    suite.alptmr_accuracy.push_back(static_cast<Scalar>(hits) /
                                    static_cast<Scalar>(unlabeled.size()));

    const Matrix w_base = lle_weights(x, knn(x, solver.k), solver.lle_reg).cwiseMax(0.0);
    const Matrix fg = gfhf(w_base, y, labeled);
    Matrix sel(fg.rows(), static_cast<Index>(unlabeled.size()));
    for (std::size_t i = 0; i < unlabeled.size(); ++i) {
      sel.col(static_cast<Index>(i)) = fg.col(unlabeled[i]);
    }
    const IndexList pred_g = predict_labels(sel);
    hits = 0;
    for (std::size_t i = 0; i < unlabeled.size(); ++i) {
      if (pred_g[i] == suite.data.labels[static_cast<std::size_t>(unlabeled[i])]) ++hits;
    }
    suite.gfhf_accuracy.push_back(static_cast<Scalar>(hits) /
                                  static_cast<Scalar>(unlabeled.size()));
    suite.models.push_back(std::move(model));
  }
  return suite;
}

Scalar mean_of(const std::vector<Scalar>& v) {
  Scalar sum = 0.0;
  for (Scalar x : v) sum += x;
  return sum / static_cast<Scalar>(v.size());
}

void criterion_6_robustness(const CorruptedSuite& suite) {
  const Scalar alp = mean_of(suite.alptmr_accuracy);
  const Scalar gf = mean_of(suite.gfhf_accuracy);
  std::ostringstream detail;
  detail << "alptmr " << alp << " vs gfhf " << gf << " over 15 paired splits";
  report(6, "corruption robustness ordering", alp >= gf - 0.01, detail.str());
}

void criterion_7_ablation(const CorruptedSuite& suite) {
  const std::vector<AblationRow> rows = ablation(suite.config, suite.data);
  const Scalar full_mean = rows[0].mean_accuracy;
  const Scalar full_std = rows[0].std_accuracy;
  bool pass = true;
  std::ostringstream detail;
  detail << "full " << full_mean;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const Scalar pooled =
        std::sqrt(0.5 * (full_std * full_std + rows[i].std_accuracy * rows[i].std_accuracy));
    detail << ", " << rows[i].setting << " " << rows[i].mean_accuracy;
    if (full_mean < rows[i].mean_accuracy - pooled) pass = false;
  }
  report(7, "full model dominates the knockouts", pass, detail.str());
}

void criterion_8_weight_cleaning(const CorruptedSuite& suite) {
  int ok = 0;
  Scalar mean_init = 0.0, mean_clean = 0.0;
  for (const RecoveredModel& m : suite.models) {
    const Scalar init = inter_class_mass(m.w_init, suite.data.labels);
    const Scalar clean = inter_class_mass(m.w_clean, suite.data.labels);
    mean_init += init;
    mean_clean += clean;
    if (clean <= init) ++ok;
  }
  mean_init /= 15.0;
  mean_clean /= 15.0;
  std::ostringstream detail;
  detail << ok << "/15 runs, mean inter-class mass init " << mean_init << " vs clean "
         << mean_clean << " (need <= on 12)";
  report(8, "recovered weights carry less inter-class mass", ok >= 12, detail.str());
}

void criterion_9_label_cleaning(const CorruptedSuite& suite) {
  int ok = 0;
  for (const RecoveredModel& m : suite.models) {
    if (count_negative(m.f_clean) <= count_negative(m.f)) ++ok;
  }
  std::ostringstream detail;
  detail << ok << "/15 runs with fewer negative entries in the recovered labels";
  report(9, "recovered labels carry fewer negatives", ok >= 12, detail.str());
}

void criterion_10_baselines() {
  Matrix w = Matrix::Zero(4, 4);
  w(0, 1) = w(1, 0) = 1.0;
  w(1, 2) = w(2, 1) = 1.0;
  w(2, 3) = w(3, 2) = 1.0;
  Matrix y = Matrix::Zero(2, 4);
  y(0, 0) = 1.0;
  y(1, 3) = 1.0;
  const Matrix f = gfhf(w, y, {0, 3});
  const Matrix ref = oracle::harmonic_clamped(w, y, {0, 3});
  const Scalar chain_err = (f - ref).norm();
  bool pass = chain_err <= 1e-6;

  Rng rng(10);
  Scalar worst_residual = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Matrix wr = oracle::random_matrix(rng, 8, 8).cwiseAbs();
    wr = symmetrize(wr);
    Matrix yr = Matrix::Zero(3, 8);
    yr(0, 0) = yr(1, 1) = yr(2, 2) = 1.0;
    Vector u(8);
    for (Index i = 0; i < 8; ++i) u[i] = 0.1 + rng.uniform();
    const bool normalized = trial % 2 == 0;
    const Matrix fr = general_lp(wr, yr, u, normalized);
    const Matrix rhs = yr * u.asDiagonal();
    const Scalar rel =
        (fr * (laplacian(wr, normalized) + Matrix(u.asDiagonal())) - rhs).norm() / rhs.norm();
    worst_residual = std::max(worst_residual, rel);
    if (rel > 1e-8) pass = false;
  }
  std::ostringstream detail;
  detail << "chain error " << chain_err << ", worst stationarity residual " << worst_residual;
  report(10, "baseline solvers are correct", pass, detail.str());
}

void criterion_11_out_of_sample() {
  const Dataset d = synth_blobs(3, 20, 6, 8.0, 1.0, 3);
  const auto [labeled, unlabeled] = split(d.labels, SplitSpec{10, 5});
  const Matrix y = one_hot_Y(d.labels, labeled, 3);
  SolverConfig cfg;
  cfg.max_iter = 15;
  const RecoveredModel model = fit(d.x, y, cfg);

  bool pass = true;
  for (Index j : labeled) {
    const Vector got = extend(model, d.x, labeled, d.x.col(j), 1);
    if ((got - model.f_clean.col(j)).norm() != 0.0) pass = false;
  }

  Rng rng(11);
  Scalar worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Vector query = oracle::random_matrix(rng, 6, 1) * 3.0;
    query[rng.index(3)] += 8.0 * rng.uniform();
    const Index k = 5;
    const Vector got = extend(model, d.x, labeled, query, k);

    std::vector<std::pair<Scalar, Index>> order;
    for (Index j : labeled) order.emplace_back((d.x.col(j) - query).squaredNorm(), j);
    std::sort(order.begin(), order.end());
    Matrix diffs(6, k);
    for (Index i = 0; i < k; ++i) diffs.col(i) = query - d.x.col(order[static_cast<std::size_t>(i)].second);
    Matrix gram = diffs.transpose() * diffs;
    gram.diagonal().array() += 1e-3 * gram.trace() / static_cast<Scalar>(k);
    Vector wv = gram.fullPivLu().solve(Vector::Ones(k));
    wv /= wv.sum();
    Vector expect = Vector::Zero(3);
    Scalar wsum = 0.0;
    for (Index i = 0; i < k; ++i) {
      for (Index r = 0; r < 3; ++r) {
        expect[r] += wv[i] * model.f_clean(r, order[static_cast<std::size_t>(i)].second);
      }
      wsum += wv[i];
    }
    expect /= wsum;
    worst = std::max(worst, (got - expect).norm());
  }
  if (worst > 1e-8) pass = false;
  std::ostringstream detail;
  detail << "identity exact, worst oracle gap " << worst << " over 100 queries";
  report(11, "out-of-sample extension matches its oracle", pass, detail.str());
}

#ifndef TMR_CLI_PATH
#define TMR_CLI_PATH "tmr"
#endif

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void criterion_12_determinism() {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "tmr_acceptance_determinism";
  fs::remove_all(base);
  fs::create_directories(base);

  const std::string common =
      std::string(TMR_CLI_PATH) +
      " bench --dataset blobs:c=3,per=30,dim=3,sep=3,sigma=1,seed=0"
      " --method alptmr,gfhf,llgc --labeled-per-class 5 --repeats 3"
      " --corrupt-sigma 0.5 --corrupt-fraction 0.5 --seed 11 --max-iter 10";
  const std::string run1 = "TMR_THREADS=1 " + common + " --out " + (base / "a").string() +
                           " > /dev/null 2>&1";
  const std::string run2 = "TMR_THREADS=4 " + common + " --out " + (base / "b").string() +
                           " > /dev/null 2>&1";
  bool pass = std::system(run1.c_str()) == 0 && std::system(run2.c_str()) == 0;
  std::string detail = "bench exit codes";
  if (pass) {
    const std::string a = strip_timing(read_file((base / "a" / "report.json").string()));
    const std::string b = strip_timing(read_file((base / "b" / "report.json").string()));
    pass = !a.empty() && a == b;
    detail = pass ? "byte-identical reports at TMR_THREADS=1 and 4"
                  : "reports differ between TMR_THREADS=1 and 4";
  }
  report(12, "bench output is deterministic", pass, detail);
}

}  // namespace

int main() {
  const MonotonicitySuite mono = run_monotonicity_suite();
  criterion_1_monotonicity(mono);
  criterion_2_convergence(mono);
  criterion_3_stationarity();
  criterion_4_oracle_equivalence();
  criterion_5_clean_sanity();
  const CorruptedSuite corrupted = run_corrupted_suite();
  criterion_6_robustness(corrupted);
  criterion_7_ablation(corrupted);
  criterion_8_weight_cleaning(corrupted);
  criterion_9_label_cleaning(corrupted);
  criterion_10_baselines();
  criterion_11_out_of_sample();
  criterion_12_determinism();

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria failed\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}

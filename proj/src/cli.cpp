#include "densub/cli.hpp"

#include "densub/admm.hpp"
#include "densub/bounds.hpp"
#include "densub/certificate.hpp"
#include "densub/error.hpp"
#include "densub/experiments.hpp"
#include "densub/model.hpp"
#include "densub/networks.hpp"
#include "densub/oracle.hpp"
#include "densub/relaxation.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace densub {

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

IndexSet parse_index_list(const std::string& text, const std::string& what) {
  IndexSet out;
  for (const auto& f : split_fields(text)) out.push_back(parse_int(f, what));
  return out;
}

std::string join_indices(const IndexSet& s) {
  std::string out;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k) out += ' ';
    out += std::to_string(s[k]);
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorKind::Io, "cannot write '" + path + "'");
  return f;
}

int default_jobs() {
  if (const char* env = std::getenv("DENSUB_JOBS")) {
    try {
      const auto v = parse_int(env, "DENSUB_JOBS");
      if (v >= 1) return static_cast<int>(v);
    } catch (const Error&) {
    }
  }
  return 1;
}

// Shared state of one invocation.
struct Run {
  std::vector<std::string> args;
  std::ostream& out;
  std::ostream& err;
  RunManifest manifest;
  std::string out_prefix;

  void add_input(const std::string& path) { manifest.inputs.push_back(path); }
  void add_output(const std::string& path, bool deterministic) {
    manifest.outputs.emplace_back(path, deterministic);
  }
  void write_manifest() {
    if (out_prefix.empty()) return;
    manifest.finished = utc_now();
    manifest.to_kv().save(out_prefix + "_manifest.txt");
  }
};

struct SolverFlags {
  double tau = 2.0;
  std::optional<double> mu;
  double epsilon = 1e-4;
  int maxiter = 2000;
  std::string svd = "auto";

  void add(CLI::App* app) {
    app->add_option("--tau", tau, "Augmented Lagrangian penalty (mu = 1/tau)");
    app->add_option("--mu", mu, "Reciprocal penalty; overrides --tau");
    app->add_option("--epsilon", epsilon, "Stopping tolerance");
    app->add_option("--maxiter", maxiter, "Iteration cap");
    app->add_option("--svd", svd, "SVD backend: auto, bdc, symmetric")
        ->check(CLI::IsMember({"auto", "bdc", "symmetric"}));
  }

  SolveConfig config() const {
    SolveConfig c;
    c.tau = mu ? 1.0 / *mu : tau;
    c.epsilon = epsilon;
    c.maxiter = maxiter;
    c.svd = svd == "bdc" ? SvdBackend::Bdc
                         : (svd == "symmetric" ? SvdBackend::SymmetricEigen : SvdBackend::Auto);
    return c;
  }
};

// ---------------------------------------------------------------------------

struct SampleCmd {
  std::string spec_file, preset = "", out;
  double q = 0.0;
  Index m = 0, M = 0;
  std::uint64_t seed = 1;
  bool sparse = false;

  void add(CLI::App* app) {
    app->add_option("--spec", spec_file, "Key-value model spec file");
    app->add_option("--preset", preset, "experiment1 or experiment2")
        ->check(CLI::IsMember({"experiment1", "experiment2"}));
    app->add_option("--q", q, "Planted density for presets");
    app->add_option("--m", m, "Planted size for presets");
    app->add_option("--M", M, "Matrix size for presets");
    app->add_option("--seed", seed, "Sampling seed");
    app->add_flag("--sparse", sparse, "Write the sparse triplet layout");
    app->add_option("--out", out, "Output prefix (default: matrix to stdout)");
  }

  int run(Run& r) {
    PlantedModelSpec spec;
    if (!spec_file.empty()) {
      r.add_input(spec_file);
      spec = PlantedModelSpec::from_kv(KeyValue::load(spec_file));
    } else if (!preset.empty()) {
      spec = preset == "experiment1" ? experiment1_spec(q, m, M) : experiment2_spec(q, m, M);
    } else {
      fail(ErrorKind::InvalidArgument, "sample needs --spec or --preset");
    }
    r.manifest.seed = std::to_string(seed);
    const auto s = sample_psm(spec, seed);
    if (out.empty()) {
      if (sparse) write_sparse(r.out, s.A);
      else write_dense(r.out, s.A);
      return kExitOk;
    }
    r.out_prefix = out;
    save_matrix(out + ".txt", s.A, sparse);
    truth_manifest(s.truth, spec, seed).save(out + "_truth.txt");
    r.add_output(out + ".txt", true);
    r.add_output(out + "_truth.txt", true);
    r.out << "matrix " << out << ".txt\ntruth " << out << "_truth.txt\n";
    return kExitOk;
  }
};

struct SolveCmd {
  std::string input, truth, out;
  Index m = 0, n = 0;
  double gamma = 0.0;
  SolverFlags solver;

  void add(CLI::App* app) {
    app->add_option("--input", input, "Binary matrix file")->required();
    app->add_option("--m", m, "Target row count")->required();
    app->add_option("--n", n, "Target column count")->required();
    app->add_option("--gamma", gamma, "Regularization parameter")->required();
    app->add_option("--truth", truth, "Ground-truth manifest for a recovery check");
    app->add_option("--out", out, "Output prefix for X, Y and the summary");
    solver.add(app);
  }

  int run(Run& r) {
    r.add_input(input);
    const BinaryMatrix A = load_matrix(input);
    SolveConfig cfg = solver.config();
    cfg.gamma = gamma;
    const SolveResult res = solve(ProblemInstance(A, m, n), cfg);
    const Matrix Xr = round_nearest(res.X);
    IndexSet rows, cols;
    for (Index i = 0; i < Xr.rows(); ++i) {
      if (Xr.row(i).cwiseAbs().maxCoeff() > 0.0) rows.push_back(i);
    }
    for (Index j = 0; j < Xr.cols(); ++j) {
      if (Xr.col(j).cwiseAbs().maxCoeff() > 0.0) cols.push_back(j);
    }
    KeyValue summary;
    summary.set("iterations", static_cast<std::int64_t>(res.iterations));
    summary.set("converged", std::string(res.converged ? "true" : "false"));
    summary.set("primal_residual", res.primal_residuals.back());
    summary.set("dual_residual", res.dual_residuals.back());
    summary.set("objective", objective(res.X, res.Y, gamma));
    summary.set("nuclear_norm", nuclear_norm(res.X));
    summary.set("support_rows", join_indices(rows));
    summary.set("support_cols", join_indices(cols));
    const bool integral = (res.X - Xr).cwiseAbs().maxCoeff() < 1e-3;
    summary.set("rounded_rank_one", std::string(
        integral && static_cast<Index>(rows.size()) == m &&
                static_cast<Index>(cols.size()) == n &&
                Xr.sum() == static_cast<double>(m * n)
            ? "true"
            : "false"));
    if (!rows.empty() && !cols.empty()) {
      summary.set("support_density", density(rows, cols, A));
    }
    if (!truth.empty()) {
      r.add_input(truth);
      const GroundTruth t = truth_from_manifest(KeyValue::load(truth));
      summary.set("recovered", std::string(recovered(res.X, t.X0) ? "true" : "false"));
    }
    summary.write(r.out);
    if (!out.empty()) {
      r.out_prefix = out;
      auto fx = open_out(out + "_X.txt");
      write_real(fx, res.X);
      auto fy = open_out(out + "_Y.txt");
      write_real(fy, res.Y);
      summary.save(out + "_summary.txt");
      r.add_output(out + "_X.txt", true);
      r.add_output(out + "_Y.txt", true);
      r.add_output(out + "_summary.txt", true);
    }
    return kExitOk;
  }
};

struct CertifyCmd {
  std::string input, truth, spec_file, rows, cols, out;
  std::optional<double> gamma;
  double c_tau = 6.0, c2 = 6.0, tol = 1e-6;
  bool adversarial = false;
  AdversarialBudget budget;

  void add(CLI::App* app) {
    app->add_option("--input", input, "Binary matrix file")->required();
    app->add_option("--truth", truth, "Ground-truth manifest (block and spec)");
    app->add_option("--spec", spec_file, "Model spec; block 0 is the candidate");
    app->add_option("--rows", rows, "Candidate rows, 0-based, comma separated");
    app->add_option("--cols", cols, "Candidate columns, 0-based, comma separated");
    app->add_option("--gamma", gamma, "Regularization (default: mid theorem interval)");
    app->add_option("--c-tau", c_tau, "Constant of the tau term");
    app->add_option("--c2", c2, "Upper constant of the theorem gamma interval");
    app->add_option("--tol", tol, "Tolerance of sign, slackness and orthogonality checks");
    app->add_flag("--adversarial", adversarial, "Use the adversarial construction");
    app->add_option("--delta", budget.delta, "Addition fraction");
    app->add_option("--delta-tilde", budget.delta_tilde, "Retention fraction");
    app->add_option("--out", out, "Output prefix for the report");
  }

  int run(Run& r) {
    r.add_input(input);
    const BinaryMatrix A = load_matrix(input);
    std::optional<PlantedModelSpec> spec;
    IndexSet U1, V1;
    if (!truth.empty()) {
      r.add_input(truth);
      const KeyValue kv = KeyValue::load(truth);
      const GroundTruth t = truth_from_manifest(kv);
      U1 = t.planted_rows;
      V1 = t.planted_cols;
      KeyValue sk;
      for (const auto& [k, v] : kv.entries()) {
        if (k.rfind("spec.", 0) == 0) sk.set(k.substr(5), v);
      }
      spec = PlantedModelSpec::from_kv(sk);
    }
    if (!spec_file.empty()) {
      r.add_input(spec_file);
      spec = PlantedModelSpec::from_kv(KeyValue::load(spec_file));
    }
    if (spec && U1.empty()) {
      U1 = normalized(spec->partition.rows[0]);
      V1 = normalized(spec->partition.cols[0]);
    }
    if (!rows.empty()) U1 = normalized(parse_index_list(rows, "--rows"));
    if (!cols.empty()) V1 = normalized(parse_index_list(cols, "--cols"));
    require(!U1.empty() && !V1.empty(), ErrorKind::InvalidArgument,
            "certify needs a candidate block (--truth, --spec or --rows/--cols)");

    Certificate cert;
    if (adversarial) {
      cert = build_adversarial_certificate(A, U1, V1, budget);
    } else {
      require(spec.has_value(), ErrorKind::InvalidArgument,
              "the random certificate needs a model spec (--truth or --spec)");
      double g;
      if (gamma) {
        g = *gamma;
      } else {
        double p_star = 0.0;
        for (Index a = 0; a < spec->probs.rows(); ++a) {
          for (Index b = 0; b < spec->probs.cols(); ++b) {
            if (a || b) p_star = std::max(p_star, spec->probs(a, b));
          }
        }
        g = gamma_select(GammaRule::theorem(spec->probs(0, 0), p_star,
                                            static_cast<double>(U1.size()),
                                            static_cast<double>(V1.size()), c2));
      }
      cert = build_random_certificate(A, U1, V1, *spec, g, c_tau);
    }
    const auto [Xb, Yb] = candidate_solution(A, U1, V1);
    const VerificationReport rep = verify_kkt(A, Xb, Yb, cert, tol);
    r.out << "gamma " << format_number(cert.gamma_used) << "\nlambda "
          << format_number(cert.lambda) << "\ntau " << format_number(cert.tau_used)
          << "\nboundary_switches " << cert.boundary_switches << '\n';
    rep.write(r.out);
    if (!out.empty()) {
      r.out_prefix = out;
      auto f = open_out(out + "_report.txt");
      rep.write(f);
      r.add_output(out + "_report.txt", true);
    }
    return kExitOk;
  }
};

struct GridCmd {
  std::string config_file, out;
  std::optional<std::uint64_t> seed;
  int jobs = default_jobs();
  bool fresh = false;
  bool timing = true;
  double c1 = 1.0;

  void add(CLI::App* app) {
    app->add_option("--config", config_file, "Key-value grid config")->required();
    app->add_option("--out", out, "Output prefix")->required();
    app->add_option("--seed", seed, "Master seed (overrides the config)");
    app->add_option("--jobs", jobs, "Worker threads (default: DENSUB_JOBS or 1)");
    app->add_flag("--fresh", fresh, "Ignore an existing partial trials CSV");
    app->add_option("--timing", timing, "Record wall-clock seconds (false writes 0)");
    app->add_option("--c1", c1, "Constant of the condition overlay");
  }

  int run(Run& r) {
    r.add_input(config_file);
    const KeyValue kv = KeyValue::load(config_file);
    GridConfig cfg;
    cfg.experiment = static_cast<int>(kv.get_int("experiment", 1));
    cfg.q_values = kv.get_doubles("q_values");
    for (auto m : kv.get_ints("m_values")) cfg.m_values.push_back(m);
    cfg.M = kv.get_int("M", 200);
    cfg.trials = static_cast<int>(kv.get_int("trials", 10));
    cfg.solver.tau = kv.has("mu") ? 1.0 / kv.get_double("mu") : kv.get_double("tau", 2.0);
    cfg.solver.epsilon = kv.get_double("epsilon", 1e-4);
    cfg.solver.maxiter = static_cast<int>(kv.get_int("maxiter", 2000));
    const std::string rule = kv.find("gamma_rule").value_or("experiment");
    require(rule == "experiment" || rule == "theorem", ErrorKind::InvalidArgument,
            "gamma_rule must be 'experiment' or 'theorem'");
    cfg.gamma_rule = rule == "theorem" ? GridGammaRule::Theorem : GridGammaRule::Experiment;
    cfg.c2 = kv.get_double("c2", 6.0);
    cfg.master_seed = seed ? *seed : static_cast<std::uint64_t>(kv.get_int("seed", 1));
    cfg.trial_time_limit = kv.get_double("trial_time_limit", 300.0);
    cfg.jobs = jobs;
    cfg.validate();
    r.manifest.seed = std::to_string(cfg.master_seed);
    r.out_prefix = out;

    const std::string trials_path = out + "_trials.csv";
    std::vector<TrialRecord> done;
    if (!fresh && std::filesystem::exists(trials_path)) {
      std::ifstream in(trials_path);
      done = read_trials_csv(in);
      r.err << "resuming: " << done.size() << " trials already recorded\n";
    }
    {
      // Rewrite what was parsed so a torn final line is dropped.
      auto f = open_out(trials_path);
      write_trials_csv(f, done);
    }
    std::ofstream append(trials_path, std::ios::app);
    auto on_trial = [&](const TrialRecord& t) {
      TrialRecord rec = t;
      if (!timing) rec.seconds = 0.0;
      append << trial_csv_line(rec) << '\n';
      append.flush();
    };
    RecoveryGrid grid = run_grid(cfg, done, on_trial);
    append.close();
    if (!timing) {
      for (auto& rec : grid.records) rec.seconds = 0.0;
    }
    {
      auto f = open_out(trials_path);
      write_trials_csv(f, grid.records);
      auto c = open_out(out + "_counts.csv");
      write_counts_csv(c, grid);
      auto p = open_out(out + ".pgm");
      write_pgm(p, grid);
      auto o = open_out(out + "_conditions.csv");
      bool header = false;
      for (double q : cfg.q_values) {
        for (Index m : cfg.m_values) {
          const auto rep = check_random_conditions(grid_cell_spec(cfg, q, m), c1);
          if (!header) {
            o << "q,m," << rep.csv_header() << '\n';
            header = true;
          }
          o << format_number(q) << ',' << m << ',' << rep.csv_row() << '\n';
        }
      }
    }
    r.add_output(trials_path, !timing);
    r.add_output(out + "_counts.csv", true);
    r.add_output(out + ".pgm", true);
    r.add_output(out + "_conditions.csv", true);
    write_counts_csv(r.out, grid);
    return kExitOk;
  }
};

struct CliqueCmd {
  std::string input, out;
  Index m = 0;
  std::optional<double> gamma, threshold;
  bool two_walk = false, dump_x = false;
  SolverFlags solver;

  void add(CLI::App* app) {
    app->add_option("--input", input, "Edge list file")->required();
    app->add_option("--m", m, "Clique size")->required();
    app->add_option("--gamma", gamma, "Regularization (default 12/m)");
    app->add_option("--threshold", threshold, "Binarize: keep weights strictly above");
    app->add_flag("--two-walk", two_walk, "Apply the 2-walk closure first");
    app->add_flag("--dump-x", dump_x, "Write X next to the clique list");
    app->add_option("--out", out, "Output prefix");
    solver.add(app);
  }

  int run(Run& r) {
    r.add_input(input);
    Graph g = load_edge_list(input);
    if (threshold) g = binarize(g, *threshold);
    if (two_walk) g = two_walk_closure(g);
    const double gm = gamma ? *gamma : 12.0 / static_cast<double>(m);
    const CliqueResult res = find_max_clique_via_relaxation(g, m, gm, solver.config());
    std::ostringstream text;
    text << "clique";
    for (const auto& l : res.labels) text << ' ' << l;
    text << "\nverified " << (res.verified ? "true" : "false") << "\nrepaired "
         << (res.repaired ? "true" : "false") << "\nswaps " << res.swaps
         << "\niterations " << res.iterations << "\nconverged "
         << (res.converged ? "true" : "false") << '\n';
    r.out << text.str();
    if (!out.empty()) {
      r.out_prefix = out;
      auto f = open_out(out + "_clique.txt");
      f << text.str();
      r.add_output(out + "_clique.txt", true);
      if (dump_x) {
        auto fx = open_out(out + "_X.txt");
        write_real(fx, res.X);
        r.add_output(out + "_X.txt", true);
      }
    }
    return kExitOk;
  }
};

struct ConditionsCmd {
  std::string spec_file, preset, kind = "random", out;
  double q = 0.0, c = 1.0;
  Index m = 0, M = 0, m1 = 0, n1 = 0;
  AdversarialBudget budget;
  std::vector<Index> r_diag;

  void add(CLI::App* app) {
    app->add_option("--spec", spec_file, "Key-value model spec file");
    app->add_option("--preset", preset, "experiment1 or experiment2")
        ->check(CLI::IsMember({"experiment1", "experiment2"}));
    app->add_option("--q", q, "Planted density for presets");
    app->add_option("--m", m, "Planted size for presets");
    app->add_option("--M", M, "Matrix size for presets");
    app->add_option("--kind", kind, "random, balanced or adversarial")
        ->check(CLI::IsMember({"random", "balanced", "adversarial"}));
    app->add_option("--c", c, "Constant of the condition");
    app->add_option("--delta", budget.delta, "Adversarial addition fraction");
    app->add_option("--delta-tilde", budget.delta_tilde, "Adversarial retention fraction");
    app->add_option("--r1", budget.r1, "Cap on additions in the planted rows");
    app->add_option("--r2", budget.r2, "Cap on additions in the planted columns");
    app->add_option("--r3", budget.r3, "Cap on additions in off-diagonal blocks");
    app->add_option("--r-diag", r_diag, "Caps on additions in diagonal blocks 2..K");
    app->add_option("--rbar11", budget.rbar11, "Cap on deletions in the planted block");
    app->add_option("--m1", m1, "Planted rows (adversarial)");
    app->add_option("--n1", n1, "Planted columns (adversarial)");
    app->add_option("--out", out, "Output prefix for the report");
  }

  int run(Run& r) {
    RecoveryConditionReport rep;
    if (kind == "adversarial") {
      budget.r_diag = r_diag;
      rep = check_adversarial_conditions(budget, m1, n1, c);
    } else {
      PlantedModelSpec spec;
      if (!spec_file.empty()) {
        r.add_input(spec_file);
        spec = PlantedModelSpec::from_kv(KeyValue::load(spec_file));
      } else if (!preset.empty()) {
        spec = preset == "experiment1" ? experiment1_spec(q, m, M) : experiment2_spec(q, m, M);
      } else {
        fail(ErrorKind::InvalidArgument, "conditions needs --spec or --preset");
      }
      rep = kind == "balanced" ? check_balanced_conditions(spec, c)
                               : check_random_conditions(spec, c);
    }
    const KeyValue kv = rep.to_kv();
    kv.write(r.out);
    if (!out.empty()) {
      r.out_prefix = out;
      kv.save(out + "_conditions.txt");
      r.add_output(out + "_conditions.txt", true);
    }
    return kExitOk;
  }
};

struct OracleCmd {
  std::string input;
  Index m = 0, n = 0;
  std::size_t tie_cap = 64;

  void add(CLI::App* app) {
    app->add_option("--input", input, "Binary matrix file")->required();
    app->add_option("--m", m, "Rows of the submatrix")->required();
    app->add_option("--n", n, "Columns of the submatrix")->required();
    app->add_option("--tie-cap", tie_cap, "Co-optimal supports to list");
  }

  int run(Run& r) {
    r.add_input(input);
    const OracleResult res = densest_submatrix_bruteforce(load_matrix(input), m, n, tie_cap);
    r.out << "best_count " << res.best_count << "\nbest_rows " << join_indices(res.best_rows)
          << "\nbest_cols " << join_indices(res.best_cols) << "\ntie_count " << res.tie_count
          << '\n';
    for (const auto& [rows, cols] : res.ties) {
      r.out << "tie " << join_indices(rows) << " | " << join_indices(cols) << '\n';
    }
    return kExitOk;
  }
};

int dispatch_impl(const std::vector<std::string>& args, std::ostream& out,
                  std::ostream& err, bool is_replay);

struct ReplayCmd {
  std::string manifest_file, out;

  void add(CLI::App* app) {
    app->add_option("--manifest", manifest_file, "Manifest written by an earlier run")
        ->required();
    app->add_option("--out", out, "New output prefix")->required();
  }

  int run(Run& r) {
    const KeyValue kv = KeyValue::load(manifest_file);
    const RunManifest old = RunManifest::from_kv(kv);
    std::vector<std::string> args = old.args;
    std::string old_prefix;
    bool replaced = false;
    for (std::size_t k = 0; k + 1 < args.size(); ++k) {
      if (args[k] == "--out") {
        old_prefix = args[k + 1];
        args[k + 1] = out;
        replaced = true;
      }
    }
    require(replaced, ErrorKind::InvalidArgument, "manifest run had no --out prefix");
    std::ostringstream sink;
    const int code = dispatch_impl(args, sink, r.err, true);
    if (code != kExitOk) return code;
    bool all = true;
    for (std::size_t k = 0; k < old.outputs.size(); ++k) {
      const auto& [path, deterministic] = old.outputs[k];
      if (!deterministic) continue;
      require(path.rfind(old_prefix, 0) == 0, ErrorKind::Parse,
              "manifest output does not start with the run prefix");
      const std::string fresh_path = out + path.substr(old_prefix.size());
      const std::string expected = kv.get("output." + std::to_string(k) + ".sha256");
      const bool same = file_digest(fresh_path) == expected;
      all = all && same;
      r.out << (same ? "MATCH " : "DIFF ") << fresh_path << '\n';
    }
    r.out << (all ? "replay identical\n" : "replay differs\n");
    return all ? kExitOk : kExitInput;
  }
};

int dispatch_impl(const std::vector<std::string>& args, std::ostream& out,
                  std::ostream& err, bool is_replay) {
  CLI::App app{"Densest submatrix recovery by convex relaxation", "densub"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SampleCmd sample;
  SolveCmd solve_cmd;
  CertifyCmd certify;
  GridCmd grid;
  CliqueCmd clique;
  ConditionsCmd conditions;
  OracleCmd oracle;
  ReplayCmd replay;
  sample.add(app.add_subcommand("sample", "Sample a planted instance"));
  solve_cmd.add(app.add_subcommand("solve", "Solve the relaxation by ADMM"));
  certify.add(app.add_subcommand("certify", "Build and verify a dual certificate"));
  grid.add(app.add_subcommand("grid", "Run a phase-transition grid"));
  clique.add(app.add_subcommand("clique", "Find a maximum clique of a graph"));
  conditions.add(app.add_subcommand("conditions", "Evaluate recovery conditions"));
  oracle.add(app.add_subcommand("oracle", "Exhaustive densest submatrix"));
  if (!is_replay) replay.add(app.add_subcommand("replay", "Re-run a manifest and compare"));

  // CLI11 wants argv order reversed when given a vector.
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  Run run{args, out, err, {}, {}};
  run.manifest.started = utc_now();
  run.manifest.args = args;
  const auto* sub = app.get_subcommands().front();
  run.manifest.command = sub->get_name();
  try {
    int code = kExitOk;
    const std::string& name = run.manifest.command;
    if (name == "sample") code = sample.run(run);
    else if (name == "solve") code = solve_cmd.run(run);
    else if (name == "certify") code = certify.run(run);
    else if (name == "grid") code = grid.run(run);
    else if (name == "clique") code = clique.run(run);
    else if (name == "conditions") code = conditions.run(run);
    else if (name == "oracle") code = oracle.run(run);
    else if (name == "replay") return replay.run(run);
    if (code == kExitOk) run.write_manifest();
    return code;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == ErrorKind::NumericalFailure ? kExitNumerical : kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read '" + path + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::Io, "cannot initialise SHA-256");
  }
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 15];
  }
  return out;
}

KeyValue RunManifest::to_kv() const {
  KeyValue kv;
  kv.set("command", command);
  kv.set("version", std::string(kVersion));
  kv.set("seed", seed.empty() ? std::string("none") : seed);
  kv.set("args.count", static_cast<std::int64_t>(args.size()));
  for (std::size_t k = 0; k < args.size(); ++k) kv.set("args." + std::to_string(k), args[k]);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    kv.set("input." + std::to_string(k) + ".path", inputs[k]);
    kv.set("input." + std::to_string(k) + ".sha256", file_digest(inputs[k]));
  }
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    kv.set("output." + std::to_string(k) + ".path", outputs[k].first);
    kv.set("output." + std::to_string(k) + ".deterministic",
           std::string(outputs[k].second ? "true" : "false"));
    kv.set("output." + std::to_string(k) + ".sha256", file_digest(outputs[k].first));
  }
  kv.set("started", started);
  kv.set("finished", finished);
  return kv;
}

RunManifest RunManifest::from_kv(const KeyValue& kv) {
  RunManifest m;
  m.command = kv.get("command");
  m.seed = kv.get("seed");
  const auto n = kv.get_int("args.count");
  for (std::int64_t k = 0; k < n; ++k) m.args.push_back(kv.get("args." + std::to_string(k)));
  for (int k = 0; kv.has("input." + std::to_string(k) + ".path"); ++k) {
    m.inputs.push_back(kv.get("input." + std::to_string(k) + ".path"));
  }
  for (int k = 0; kv.has("output." + std::to_string(k) + ".path"); ++k) {
    m.outputs.emplace_back(kv.get("output." + std::to_string(k) + ".path"),
                           kv.get_bool("output." + std::to_string(k) + ".deterministic",
                                       false));
  }
  m.started = kv.find("started").value_or("");
  m.finished = kv.find("finished").value_or("");
  return m;
}

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  if (args.empty()) {
    std::vector<std::string> help{"--help"};
    std::ostringstream usage;
    dispatch_impl(help, usage, err, false);
    err << usage.str();
    return kExitUsage;
  }
  return dispatch_impl(args, out, err, false);
}

int cli_dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace densub

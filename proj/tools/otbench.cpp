// otbench: discrete optimal-transport solver bench.
//
// Subcommands: solve, bench-eps, bench-batch, specnorm, critic-toy, manifold.
// JSON reports carry a manifest echoing the full configuration; iteration
// histories go to CSV so external plotting stays trivial.
//
// Exit codes: 0 converged / ok, 2 an iterative solve hit its budget,
// 1 any error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

#include "ot/costs.hpp"
#include "ot/divergence.hpp"
#include "ot/generative.hpp"
#include "ot/ingest.hpp"
#include "ot/rng.hpp"
#include "ot/lipschitz.hpp"
#include "ot/solvers.hpp"
#include "ot/verification.hpp"

using json = nlohmann::ordered_json;
using namespace ot;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kSchemaVersion = 1;

struct CommonSolveFlags {
  std::string cost = "l2";
  std::string solver = "sinkhorn";
  double eps = 0.05;
  double tol = 1e-7;
  int max_iter = 100000;
  int inner = 1;
  int outer = 100;
  double tau = 1.0;
  bool log_domain = false;
  bool normalize_cost = false;
  bool literal_center = false;
};

void add_solver_flags(CLI::App* cmd, CommonSolveFlags& f) {
  cmd->add_option("--cost", f.cost, "ground cost: l1|l2|sql2|cosine|ssim");
  cmd->add_option("--solver", f.solver,
                  "pdhg|sinkhorn|sinkhorn-center|fista|fista-center");
  cmd->add_option("--eps", f.eps, "regularization weight");
  cmd->add_option("--tol", f.tol, "marginal-residual threshold");
  cmd->add_option("--max-iter", f.max_iter, "iteration budget");
  cmd->add_option("--inner", f.inner, "inner iterations of centered variants");
  cmd->add_option("--outer", f.outer, "outer iterations of centered variants");
  cmd->add_option("--tau", f.tau, "primal step of the saddle-point solver");
  cmd->add_flag("--log-domain", f.log_domain, "log-domain scaling updates");
  cmd->add_flag("--normalize-cost", f.normalize_cost,
                "divide the cost matrix by its maximum before solving");
  cmd->add_flag("--literal-center-update", f.literal_center,
                "drop the center term from the fista-center plan recovery");
}

SolverConfig to_config(const CommonSolveFlags& f) {
  SolverConfig cfg;
  cfg.epsilon = f.eps;
  cfg.tol = f.tol;
  cfg.max_iter = f.max_iter;
  cfg.inner_iter = f.inner;
  cfg.tau = f.tau;
  cfg.log_domain = f.log_domain;
  return cfg;
}

json flags_json(const CommonSolveFlags& f) {
  return json{{"cost", f.cost},
              {"solver", f.solver},
              {"eps", f.eps},
              {"tol", f.tol},
              {"max_iter", f.max_iter},
              {"inner", f.inner},
              {"outer", f.outer},
              {"tau", f.tau},
              {"log_domain", f.log_domain},
              {"normalize_cost", f.normalize_cost},
              {"literal_center_update", f.literal_center}};
}

json make_manifest(const std::string& subcommand, std::uint64_t seed, json config,
                   double wall_seconds) {
  return json{{"subcommand", subcommand}, {"version", kVersion},
              {"seed", seed},            {"config", std::move(config)},
              {"wall_clock_seconds", wall_seconds}};
}

SampleBatch load_batch(const std::string& path, const std::string& format) {
  std::string fmt = format;
  if (fmt.empty()) {
    if (path.ends_with(".csv")) fmt = "csv";
    else if (path.ends_with(".bin")) fmt = "cifar10";
    else fmt = "idx";
  }
  if (fmt == "csv") return load_csv(path);
  if (fmt == "idx") return load_idx(path);
  if (fmt == "cifar10") return load_cifar10(path);
  throw InvalidArgument("unknown batch format: " + fmt);
}

struct PreparedCost {
  CostMatrix matrix;
  double scale = 1.0;  // max entry divided out when normalize_cost is set
};

PreparedCost build_cost(const SampleBatch& x, const SampleBatch& y,
                        const CommonSolveFlags& f) {
  CostMatrix raw = pairwise_cost(x, y, parse_cost_kind(f.cost));
  if (!f.normalize_cost) return {std::move(raw), 1.0};
  const double scale = raw.values().maxCoeff();
  if (scale <= 0.0) return {std::move(raw), 1.0};
  return {CostMatrix(Matrix(raw.values() / scale), raw.kind()), scale};
}

SolveResult dispatch_solve(const CostMatrix& cost, const DiscreteMeasure& mu,
                           const DiscreteMeasure& nu, const CommonSolveFlags& f) {
  const SolverKind kind = parse_solver_kind(f.solver);
  const SolverConfig cfg = to_config(f);
  if (kind == SolverKind::FistaCenter) {
    auto [plan, pots, report] = solve_fista_center(cost, mu, nu, cfg, f.outer,
                                                   f.literal_center);
    return {std::move(plan), std::move(pots), std::move(report)};
  }
  return run_solver(kind, cost, mu, nu, cfg, f.outer);
}

json report_json(const SolveReport& r) {
  return json{{"distance", r.distance},
              {"regularized_objective", r.regularized_objective},
              {"iterations", r.iterations},
              {"marginal_residual", r.marginal_residual},
              {"converged", r.converged}};
}

json certificate_json(const Certificate& c) {
  return json{{"primal_value", c.primal_value},
              {"dual_value", c.dual_value},
              {"gap", c.gap},
              {"max_dual_violation", c.max_dual_violation},
              {"max_marginal_residual", c.max_marginal_residual}};
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-" || path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open output file: " + path);
  out << text;
}

void write_history_csv(const std::string& path, const std::vector<HistoryEntry>& history) {
  std::ostringstream csv;
  csv << "iteration,residual,objective\n";
  csv.precision(17);
  for (const HistoryEntry& h : history)
    csv << h.iteration << ',' << h.residual << ',' << h.objective << '\n';
  write_text(path, csv.str());
}

double wall_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- solve ----

int cmd_solve(const std::string& x_path, const std::string& y_path,
              const std::string& format, const CommonSolveFlags& flags,
              const std::string& out, const std::string& history_out) {
  const auto t0 = std::chrono::steady_clock::now();
  SampleBatch x = load_batch(x_path, format);
  SampleBatch y = load_batch(y_path, format);
  DiscreteMeasure mu = uniform_measure(x.size());
  DiscreteMeasure nu = uniform_measure(y.size());
  PreparedCost cost = build_cost(x, y, flags);

  SolveResult solved = dispatch_solve(cost.matrix, mu, nu, flags);

  json config = flags_json(flags);
  config["x"] = x_path;
  config["y"] = y_path;
  config["cost_scale_divided_out"] = cost.scale;

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["result"] = report_json(solved.report);
  if (solved.potentials.alpha.size() > 0) {
    Certificate cert = certify(solved.plan, solved.potentials, cost.matrix, mu, nu);
    doc["result"]["certificate"] = certificate_json(cert);
  } else {
    doc["result"]["certificate"] = nullptr;
  }
  doc["manifest"] = make_manifest("solve", 0, config, wall_since(t0));
  write_text(out, doc.dump(2) + "\n");
  if (!history_out.empty()) write_history_csv(history_out, solved.report.history);
  return solved.report.converged ? 0 : 2;
}

// ------------------------------------------------------------ bench-eps ----

int cmd_bench_eps(const std::string& x_path, const std::string& y_path,
                  const std::string& format, CommonSolveFlags flags,
                  const std::vector<double>& eps_grid,
                  const std::vector<std::string>& solvers, const std::string& out) {
  if (eps_grid.empty()) throw InvalidArgument("bench-eps: empty --eps-grid");
  if (solvers.empty()) throw InvalidArgument("bench-eps: empty --solvers");
  SampleBatch x = load_batch(x_path, format);
  SampleBatch y = load_batch(y_path, format);
  DiscreteMeasure mu = uniform_measure(x.size());
  DiscreteMeasure nu = uniform_measure(y.size());
  PreparedCost cost = build_cost(x, y, flags);

  std::ostringstream csv;
  csv << "solver,eps,distance,iterations,converged\n";
  csv.precision(17);
  bool all_converged = true;
  for (const std::string& solver : solvers) {
    for (double eps : eps_grid) {
      flags.solver = solver;
      flags.eps = eps;
      SolveResult solved = dispatch_solve(cost.matrix, mu, nu, flags);
      all_converged = all_converged && solved.report.converged;
      csv << solver << ',' << eps << ',' << solved.report.distance << ','
          << solved.report.iterations << ',' << (solved.report.converged ? 1 : 0) << '\n';
    }
  }
  write_text(out, csv.str());
  return all_converged ? 0 : 2;
}

// ---------------------------------------------------------- bench-batch ----

// Draws two disjoint batches per (size, trial): for blobs through separate
// generator streams, for cifar10 through disjoint index windows.
int cmd_bench_batch(const std::string& source, const std::string& data_path,
                    const std::vector<int>& sizes, int trials, std::uint64_t seed,
                    CommonSolveFlags flags, const std::string& out,
                    const std::string& summary_out) {
  if (sizes.empty()) throw InvalidArgument("bench-batch: empty --sizes");
  if (trials < 1) throw InvalidArgument("bench-batch: trials must be positive");

  std::optional<SampleBatch> dataset;
  if (source == "cifar10") {
    if (data_path.empty()) throw InvalidArgument("bench-batch: cifar10 source needs --data");
    dataset = load_cifar10(data_path);
  } else if (source != "blobs") {
    throw InvalidArgument("bench-batch: unknown source " + source);
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream csv;
  csv << "size,trial,distance,iterations\n";
  csv.precision(17);
  bool all_converged = true;
  std::vector<double> mean_distance(sizes.size(), 0.0);

  CounterRng shuffle_rng(seed, 0xD15C0);
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const int n = sizes[si];
    if (dataset && 2 * n > dataset->size())
      throw InvalidArgument("bench-batch: size exceeds the dataset");
    for (int trial = 0; trial < trials; ++trial) {
      std::optional<SampleBatch> x, y;
      if (dataset) {
        // Disjoint windows over a fresh seeded shuffle per trial.
        std::vector<int> index(dataset->size());
        for (std::size_t i = 0; i < index.size(); ++i) index[i] = static_cast<int>(i);
        for (int i = static_cast<int>(index.size()) - 1; i > 0; --i)
          std::swap(index[i], index[shuffle_rng.next_u64() % (i + 1)]);
        Matrix a(n, dataset->dim()), b(n, dataset->dim());
        for (int i = 0; i < n; ++i) {
          a.row(i) = dataset->data().row(index[i]);
          b.row(i) = dataset->data().row(index[n + i]);
        }
        x = SampleBatch(std::move(a), dataset->image_shape());
        y = SampleBatch(std::move(b), dataset->image_shape());
      } else {
        Vector c1(2), c2(2);
        c1 << 0.0, 0.0;
        c2 << 1.0, 1.0;
        const std::uint64_t draw = 2 * (si * trials + trial);
        // Blob counts round up for odd sizes; trim to exactly n rows.
        for (std::uint64_t half : {draw + 1, draw + 2}) {
          SampleBatch raw = synth_blobs({c1, c2}, 0.25, (n + 1) / 2,
                                        seed ^ (0x9E3779B97F4A7C15ULL * half));
          SampleBatch sized =
              raw.size() == n ? raw : SampleBatch(Matrix(raw.data().topRows(n)));
          if (!x) x = std::move(sized);
          else y = std::move(sized);
        }
      }

      PreparedCost cost = build_cost(*x, *y, flags);
      SolveResult solved =
          dispatch_solve(cost.matrix, uniform_measure(n), uniform_measure(n), flags);
      all_converged = all_converged && solved.report.converged;
      mean_distance[si] += solved.report.distance / trials;
      csv << n << ',' << trial << ',' << solved.report.distance << ','
          << solved.report.iterations << '\n';
    }
  }
  write_text(out, csv.str());

  // Least-squares slope of log mean distance against log size.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double lx = std::log(static_cast<double>(sizes[i]));
    const double ly = std::log(mean_distance[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double k = static_cast<double>(sizes.size());
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);

  json config = flags_json(flags);
  config["source"] = source;
  config["sizes"] = sizes;
  config["trials"] = trials;
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["result"] = {{"log_log_slope", slope}, {"mean_distances", mean_distance}};
  doc["manifest"] = make_manifest("bench-batch", seed, config, wall_since(t0));
  write_text(summary_out, doc.dump(2) + "\n");
  return all_converged ? 0 : 2;
}

// -------------------------------------------------------------- specnorm ----

int cmd_specnorm(int channels, int kernel_size, int input_size, int layers,
                 const std::string& kernel_type, int stride, int padding, int iters,
                 std::uint64_t seed, const std::string& out) {
  if (layers < 1) throw InvalidArgument("specnorm: --layers must be positive");
  std::ostringstream csv;
  csv << "layers,channels,kernel,input,true_norm_product,reshaped_norm_product,ratio\n";
  csv.precision(17);

  CounterRng rng(seed);
  double true_product = 1.0, reshaped_product = 1.0;
  ConvShape shape{channels, input_size, input_size};
  for (int layer = 1; layer <= layers; ++layer) {
    std::vector<double> kernel(static_cast<std::size_t>(channels) * channels * kernel_size *
                               kernel_size);
    if (kernel_type == "avg") {
      const double v = 1.0 / (channels * kernel_size * kernel_size);
      for (double& k : kernel) k = v;
    } else if (kernel_type == "random") {
      for (double& k : kernel) k = rng.next_gaussian();
    } else {
      throw InvalidArgument("specnorm: unknown kernel type " + kernel_type);
    }
    ConvOperator op(kernel, channels, channels, kernel_size, kernel_size, shape, stride,
                    padding);

    double true_norm;
    if (op.input_shape().size() <= 4096) {
      Matrix dense = materialize_conv(op);
      true_norm = spectral_norm_matrix(dense, iters).first;
    } else {
      true_norm = spectral_norm_conv(op, iters);
    }
    const double reshaped = reshaped_kernel_norm(op, iters);
    true_product *= true_norm;
    reshaped_product *= reshaped;
    csv << layer << ',' << channels << ',' << kernel_size << ',' << input_size << ','
        << true_product << ',' << reshaped_product << ','
        << true_product / reshaped_product << '\n';
    shape = op.output_shape();
  }
  write_text(out, csv.str());
  return 0;
}

// ------------------------------------------------------------ critic-toy ----

int cmd_critic_toy(const std::string& mode_name, int steps, double lr, double lambda,
                   int gp_points, int power_iters, std::uint64_t seed,
                   const std::string& out, const std::string& grid_out) {
  const auto t0 = std::chrono::steady_clock::now();
  CriticMode mode;
  if (mode_name == "gp") mode = CriticMode::GradientPenalty;
  else if (mode_name == "sn-layer") mode = CriticMode::SpectralNormLayer;
  else if (mode_name == "sn-project") mode = CriticMode::SpectralNormProject;
  else throw InvalidArgument("critic-toy: unknown mode " + mode_name);

  // The fixed 4-point toy: data on one diagonal of a square, generated
  // points on the other, so the optimal critic cannot be linear.
  Matrix xd(2, 2), yd(2, 2);
  xd << 0.5, 0.5, -0.5, -0.5;
  yd << 0.5, -0.5, -0.5, 0.5;
  SampleBatch x(xd), y(yd);

  Matrix cm(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) cm(i, j) = (xd.row(i) - yd.row(j)).norm();
  auto [oracle_value, oracle_plan] = exact_uniform_wasserstein(CostMatrix(cm, CostKind::L2));
  (void)oracle_plan;

  MlpCritic net = make_mlp_critic({2, 10, 10, 10, 10, 1}, Activation::Relu, seed);
  AdamState adam;
  adam.params.lr = lr;
  FitOptions opts;
  opts.gp_lambda = lambda;
  opts.gp_points = gp_points;
  opts.power_iters = power_iters;
  opts.seed = seed;
  FitResult fit = fit_critic(net, x, y, mode, adam, steps, opts);

  if (!grid_out.empty()) {
    std::ostringstream csv;
    csv << "x,y,value\n";
    csv.precision(17);
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 40; ++j) {
        Vector p(2);
        p << -1.0 + 0.05 * i, -1.0 + 0.05 * j;
        csv << p[0] << ',' << p[1] << ',' << critic_value(net, p) << '\n';
      }
    write_text(grid_out, csv.str());
  }

  json config{{"mode", mode_name}, {"steps", steps},       {"lr", lr},
              {"lambda", lambda},  {"gp_points", gp_points}, {"power_iters", power_iters}};
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["result"] = {{"estimate", fit.estimate},
                   {"oracle", oracle_value},
                   {"ratio", fit.estimate / oracle_value}};
  doc["manifest"] = make_manifest("critic-toy", seed, config, wall_since(t0));
  write_text(out, doc.dump(2) + "\n");
  return 0;
}

// -------------------------------------------------------------- manifold ----

int cmd_manifold(const std::string& data_path, const std::string& format,
                 const CommonSolveFlags& flags, int epochs, int grid, int batch,
                 int hidden, double lr, bool fixed_z, std::uint64_t seed,
                 const std::string& out_prefix) {
  const auto t0 = std::chrono::steady_clock::now();
  SampleBatch data = load_batch(data_path, format);

  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch = std::min(batch, data.size());
  cfg.z_dim = 2;
  cfg.hidden = hidden;
  cfg.solver = parse_solver_kind(flags.solver);
  cfg.solver_cfg = to_config(flags);
  cfg.outer_iter = flags.outer;
  cfg.cost = parse_cost_kind(flags.cost);
  cfg.adam.lr = lr;
  cfg.seed = seed;
  cfg.fixed_z = fixed_z;

  auto [gen, history] = train_toy_generator(data, cfg);

  SampleBatch manifold = manifold_grid(gen, grid);
  if (data.image_shape()) {
    SampleBatch tiles(manifold.data(), data.image_shape());
    write_pgm(tile_images(tiles, grid), out_prefix + ".pgm");
  }
  {
    std::ostringstream csv;
    csv << "epoch,transport_cost\n";
    csv.precision(17);
    for (std::size_t e = 0; e < history.size(); ++e) csv << e << ',' << history[e] << '\n';
    write_text(out_prefix + "_loss.csv", csv.str());
  }

  json config = flags_json(flags);
  config["data"] = data_path;
  config["epochs"] = epochs;
  config["grid"] = grid;
  config["batch"] = cfg.batch;
  config["hidden"] = hidden;
  config["lr"] = lr;
  config["fixed_z"] = fixed_z;
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["result"] = {{"initial_loss", history.front()},
                   {"final_loss", history.back()},
                   {"epochs", epochs}};
  doc["manifest"] = make_manifest("manifold", seed, config, wall_since(t0));
  write_text(out_prefix + "_report.json", doc.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete optimal-transport solver bench"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "solve one transport problem");
  std::string x_path, y_path, format, out = "-", history_out;
  CommonSolveFlags solve_flags;
  solve->add_option("--x", x_path, "first sample batch")->required();
  solve->add_option("--y", y_path, "second sample batch")->required();
  solve->add_option("--format", format, "csv|idx|cifar10 (default: by extension)");
  add_solver_flags(solve, solve_flags);
  solve->add_option("--out", out, "report JSON path (default stdout)");
  solve->add_option("--history", history_out, "iteration history CSV path");

  // bench-eps
  auto* bench_eps = app.add_subcommand("bench-eps", "sweep the regularization weight");
  std::string be_x, be_y, be_format, be_out = "-";
  std::vector<double> eps_grid;
  std::vector<std::string> solver_list{"sinkhorn", "sinkhorn-center", "fista",
                                       "fista-center"};
  CommonSolveFlags be_flags;
  bench_eps->add_option("--x", be_x)->required();
  bench_eps->add_option("--y", be_y)->required();
  bench_eps->add_option("--format", be_format);
  bench_eps->add_option("--eps-grid", eps_grid, "epsilon values")->delimiter(',');
  bench_eps->add_option("--solvers", solver_list, "solver list")->delimiter(',');
  add_solver_flags(bench_eps, be_flags);
  bench_eps->add_option("--out", be_out, "CSV path (default stdout)");

  // bench-batch
  auto* bench_batch = app.add_subcommand("bench-batch", "distance against batch size");
  std::string bb_source = "blobs", bb_data, bb_out = "-", bb_summary = "-";
  std::vector<int> bb_sizes{50, 100, 200, 400};
  int bb_trials = 5;
  std::uint64_t bb_seed = 0;
  CommonSolveFlags bb_flags;
  bb_flags.solver = "sinkhorn-center";
  bb_flags.eps = 0.5;
  bb_flags.tol = 1e-6;
  bb_flags.outer = 300;
  bench_batch->add_option("--source", bb_source, "blobs|cifar10");
  bench_batch->add_option("--data", bb_data, "dataset file for cifar10");
  bench_batch->add_option("--sizes", bb_sizes, "batch sizes")->delimiter(',');
  bench_batch->add_option("--trials", bb_trials);
  bench_batch->add_option("--seed", bb_seed);
  add_solver_flags(bench_batch, bb_flags);
  bench_batch->add_option("--out", bb_out, "per-trial CSV path");
  bench_batch->add_option("--summary", bb_summary, "summary JSON path");

  // specnorm
  auto* specnorm = app.add_subcommand("specnorm", "conv vs reshaped spectral norms");
  int sn_channels = 1, sn_kernel = 3, sn_input = 8, sn_layers = 1, sn_stride = 1,
      sn_padding = 1, sn_iters = 500;
  std::string sn_type = "avg", sn_out = "-";
  std::uint64_t sn_seed = 0;
  specnorm->add_option("--channels", sn_channels);
  specnorm->add_option("--kernel-size", sn_kernel);
  specnorm->add_option("--input-size", sn_input);
  specnorm->add_option("--layers", sn_layers);
  specnorm->add_option("--kernel-type", sn_type, "avg|random");
  specnorm->add_option("--stride", sn_stride);
  specnorm->add_option("--padding", sn_padding);
  specnorm->add_option("--iters", sn_iters);
  specnorm->add_option("--seed", sn_seed);
  specnorm->add_option("--out", sn_out, "CSV path (default stdout)");

  // critic-toy
  auto* critic = app.add_subcommand("critic-toy", "4-point critic training study");
  std::string ct_mode = "sn-layer", ct_out = "-", ct_grid;
  int ct_steps = 5000, ct_gp_points = 64, ct_power_iters = 1;
  double ct_lr = 1e-3, ct_lambda = 1.0;
  std::uint64_t ct_seed = 123;
  critic->add_option("--mode", ct_mode, "gp|sn-layer|sn-project");
  critic->add_option("--steps", ct_steps);
  critic->add_option("--lr", ct_lr);
  critic->add_option("--lambda", ct_lambda);
  critic->add_option("--gp-points", ct_gp_points);
  critic->add_option("--power-iters", ct_power_iters);
  critic->add_option("--seed", ct_seed);
  critic->add_option("--out", ct_out, "JSON path (default stdout)");
  critic->add_option("--grid-out", ct_grid, "critic value grid CSV");

  // manifold
  auto* manifold = app.add_subcommand("manifold", "train the toy generator");
  std::string mf_data, mf_format, mf_prefix = "manifold";
  int mf_epochs = 200, mf_grid = 8, mf_batch = 1000, mf_hidden = 500;
  double mf_lr = 1e-3;
  bool mf_fixed_z = false;
  std::uint64_t mf_seed = 0;
  CommonSolveFlags mf_flags;
  mf_flags.eps = 0.05;
  mf_flags.tol = 1e-6;
  mf_flags.max_iter = 5000;
  manifold->add_option("--data", mf_data, "training images (idx) or csv")->required();
  manifold->add_option("--format", mf_format);
  add_solver_flags(manifold, mf_flags);
  manifold->add_option("--epochs", mf_epochs);
  manifold->add_option("--grid", mf_grid);
  manifold->add_option("--batch", mf_batch);
  manifold->add_option("--hidden", mf_hidden);
  manifold->add_option("--lr", mf_lr);
  manifold->add_flag("--fixed-z", mf_fixed_z, "one latent batch for the whole run");
  manifold->add_option("--seed", mf_seed);
  manifold->add_option("--out-prefix", mf_prefix);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return cmd_solve(x_path, y_path, format, solve_flags, out, history_out);
    if (bench_eps->parsed())
      return cmd_bench_eps(be_x, be_y, be_format, be_flags, eps_grid, solver_list, be_out);
    if (bench_batch->parsed())
      return cmd_bench_batch(bb_source, bb_data, bb_sizes, bb_trials, bb_seed, bb_flags,
                             bb_out, bb_summary);
    if (specnorm->parsed())
      return cmd_specnorm(sn_channels, sn_kernel, sn_input, sn_layers, sn_type, sn_stride,
                          sn_padding, sn_iters, sn_seed, sn_out);
    if (critic->parsed())
      return cmd_critic_toy(ct_mode, ct_steps, ct_lr, ct_lambda, ct_gp_points,
                            ct_power_iters, ct_seed, ct_out, ct_grid);
    if (manifold->parsed())
      return cmd_manifold(mf_data, mf_format, mf_flags, mf_epochs, mf_grid, mf_batch,
                          mf_hidden, mf_lr, mf_fixed_z, mf_seed, mf_prefix);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

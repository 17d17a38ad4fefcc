// pinn-forge: train physics-regularized networks, run the closed-form
// overfitting demos, the hybrid advection rate study, the heat solver, and
// the parameter-norm bound sweep. Exit code 0 only when the run completes;
// otherwise a machine-readable error JSON goes to stderr.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pinn/bounds.hpp"
#include "pinn/experiments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TrainRunSpec {
  pinn::ProblemSpec problem;
  std::vector<pinn::Operator> operators;
  pinn::RiskSpec risk;  // lambdas + m filled from config
  pinn::ScheduleKind schedule = pinn::ScheduleKind::kManual;
  int depth = 2;
  int width = 32;
  pinn::TrainConfig tcfg;
  std::uint64_t init_seed = 0;
};

TrainRunSpec load_train_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json j = json::parse(in);

  TrainRunSpec s;
  s.problem = pinn::problem_from_json(j.at("problem"));
  for (const auto& oj : j.value("operators", json::array()))
    s.operators.push_back(pinn::operator_from_json(oj));

  const json risk = j.value("risk", json::object());
  s.risk.lambda_d = risk.value("lambda_d", 0.0);
  s.risk.lambda_e = risk.value("lambda_e", 0.0);
  s.risk.lambda_ridge = risk.value("lambda_ridge", 0.0);
  s.risk.lambda_t = risk.value("lambda_t", 0.0);
  s.risk.m = risk.value("m", 0);

  const json net = j.value("network", json::object());
  s.depth = net.value("h", 2);
  s.width = net.value("d", 32);

  const json tr = j.value("trainer", json::object());
  s.schedule = pinn::schedule_from_string(tr.value("schedule", std::string("manual")));
  s.tcfg.epochs = tr.value("epochs", 1000);
  s.tcfg.lr = tr.value("lr", 1e-3);
  std::string opt = tr.value("optimizer", std::string("adam"));
  if (opt == "adam")
    s.tcfg.optimizer = pinn::OptimizerKind::kAdam;
  else if (opt == "gd")
    s.tcfg.optimizer = pinn::OptimizerKind::kGd;
  else
    throw std::invalid_argument("trainer.optimizer must be adam|gd");
  s.tcfg.monitor_every = tr.value("monitor_every", 100);
  s.tcfg.seed = tr.value("seed", std::uint64_t{0});
  if (tr.contains("validation_seed"))
    s.tcfg.validation_seed = tr.at("validation_seed").get<std::uint64_t>();
  s.tcfg.og_mc_boundary = tr.value("og_mc_boundary", 2000);
  s.tcfg.og_mc_interior = tr.value("og_mc_interior", 2000);
  s.init_seed = tr.value("init_seed", s.tcfg.seed + 1);
  return s;
}

int cmd_train(const fs::path& config, const fs::path& outdir) {
  TrainRunSpec s = load_train_config(config);
  fs::create_directories(outdir);

  pinn::RiskSpec spec = s.risk;
  spec.operators = s.operators;
  spec.h = s.problem.h;
  spec.domain = s.problem.domain;
  spec.boundary = s.problem.boundary;
  spec.samples = s.problem.sample();
  pinn::apply_schedule(spec, s.schedule, s.depth);

  pinn::MlpParams theta0 = pinn::MlpParams::glorot(
      s.depth, s.width, s.problem.d1(), s.problem.d2(),
      pinn::RngStream(s.init_seed, pinn::StreamId::kInit));
  pinn::TrainResult tr = pinn::train(theta0, spec, s.tcfg);

  pinn::write_metrics_csv(outdir / "metrics.csv", tr.trajectory);
  std::ofstream(outdir / "checkpoint.json") << pinn::to_json(tr.best).dump(2) << '\n';
  json result = {{"best_total", tr.best_total},
                 {"best_step", tr.best_step},
                 {"epochs", s.tcfg.epochs},
                 {"lambda", {{"d", spec.lambda_d}, {"e", spec.lambda_e},
                             {"ridge", spec.lambda_ridge}, {"t", spec.lambda_t}}}};
  std::ofstream(outdir / "result.json") << result.dump(2) << '\n';
  std::cout << "best total " << pinn::fmt17(tr.best_total) << " at step " << tr.best_step << "\n";
  return 0;
}

int cmd_overfit(const pinn::OverfitConfig& cfg, const fs::path& outdir) {
  pinn::OverfitResult r = pinn::run_overfit_demo(cfg);
  fs::create_directories(outdir);
  pinn::write_overfit_csv(outdir / "metrics.csv", r);
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"p", row.p}, {"empirical", row.empirical}, {"mc_risk", row.mc_risk},
                    {"mc_se", row.mc_se}, {"og", row.og}, {"og_se", row.og_se}});
  json result = {{"kind", r.kind}, {"rows", rows}};
  if (r.kind == "heat") result["floor"] = r.heat_floor;
  std::ofstream(outdir / "result.json") << result.dump(2) << '\n';
  for (const auto& row : r.rows)
    std::cout << "p=" << row.p << " empirical=" << pinn::fmt17(row.empirical)
              << " mc=" << pinn::fmt17(row.mc_risk) << "\n";
  return 0;
}

int cmd_hybrid(pinn::HybridConfig cfg, const fs::path& outdir) {
  fs::create_directories(outdir);
  cfg.outdir = outdir;
  pinn::HybridResult r = pinn::run_hybrid_advection(cfg);
  std::ofstream(outdir / "result.json") << pinn::to_json(r).dump(2) << '\n';
  pinn::CsvWriter w(outdir / "summary.csv", {"n", "mean_err", "mean_ln_pi"});
  for (std::size_t i = 0; i < r.n_grid.size(); ++i)
    w.row({static_cast<double>(r.n_grid[i]), r.mean_err[i], r.mean_ln_pi[i]});
  std::cout << "slope " << pinn::fmt17(r.fit.slope) << "\n";
  return 0;
}

int cmd_solve_heat(const pinn::HeatSolverConfig& cfg, const fs::path& outdir) {
  pinn::HeatSolverResult r = pinn::run_pde_solver_heat(cfg);
  fs::create_directories(outdir);
  pinn::write_metrics_csv(outdir / "metrics.csv", r.trajectory);
  std::ofstream(outdir / "checkpoint.json") << pinn::to_json(r.best).dump(2) << '\n';
  json result = {{"boundary_mse", r.boundary_mse},
                 {"boundary_mse_se", r.boundary_mse_se},
                 {"mean_sq_residual", r.mean_sq_residual},
                 {"mean_sq_residual_se", r.mean_sq_residual_se},
                 {"best_total", r.final_total},
                 {"best_step", r.best_step}};
  std::ofstream(outdir / "result.json") << result.dump(2) << '\n';
  std::cout << "boundary_mse " << pinn::fmt17(r.boundary_mse) << " residual "
            << pinn::fmt17(r.mean_sq_residual) << "\n";
  return 0;
}

// Parameter-norm bound sweep: random networks, grid-sampled derivative sups.
int cmd_bound_check(int cases, std::uint64_t seed) {
  pinn::RngStream rng(seed, 99);
  int violations = 0;
  double worst_ratio = 0.0;
  for (int c = 0; c < cases; ++c) {
    int h = 1 + static_cast<int>(rng.next_u64() % 3);
    int d = 1 + static_cast<int>(rng.next_u64() % 6);
    int d1 = 1 + static_cast<int>(rng.next_u64() % 3);
    int K = static_cast<int>(rng.next_u64() % 3);
    pinn::MlpParams theta = pinn::MlpParams::glorot(h, d, d1, 1, rng.split(c));
    for (auto& L : theta.layers)
      for (auto& b : L.b) b = rng.uniform(-0.5, 0.5);
    double bound = pinn::holder_bound(theta, K).bound;
    auto space = pinn::JetSpace::get(d1, K);
    pinn::MlpJetWorkspace ws(theta, K);
    double sup = 0.0;
    const int grid = (d1 == 1) ? 201 : (d1 == 2 ? 41 : 15);
    std::vector<int> idx(static_cast<std::size_t>(d1), 0);
    std::vector<double> x(static_cast<std::size_t>(d1));
    while (true) {
      for (int i = 0; i < d1; ++i) x[static_cast<std::size_t>(i)] = -2.0 + 4.0 * idx[static_cast<std::size_t>(i)] / (grid - 1);
      ws.forward(theta, x);
      for (double v : ws.output()) sup = std::max(sup, std::abs(v));
      int i = 0;
      for (; i < d1; ++i) {
        if (++idx[static_cast<std::size_t>(i)] < grid) break;
        idx[static_cast<std::size_t>(i)] = 0;
      }
      if (i == d1) break;
    }
    worst_ratio = std::max(worst_ratio, sup / bound);
    if (sup > bound) ++violations;
  }
  std::cout << "cases " << cases << " violations " << violations << " worst sampled/bound ratio "
            << pinn::fmt17(worst_ratio) << "\n";
  return violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"physics-regularized network training and experiments"};
  app.require_subcommand(1);

  std::string config, outdir = "out";
  auto* train = app.add_subcommand("train", "minimize a configured risk");
  train->add_option("config", config, "config JSON")->required();
  train->add_option("--out", outdir, "output directory");

  pinn::OverfitConfig ocfg;
  std::string o_out = "out";
  auto* overfit = app.add_subcommand("overfit-demo", "closed-form overfitting study");
  overfit->add_option("--kind", ocfg.kind, "friction|heat")->required();
  overfit->add_option("--p-grid", ocfg.p_grid, "sharpness grid");
  overfit->add_option("--depth", ocfg.depth, "composition depth H");
  overfit->add_option("--n", ocfg.n, "data points (friction)");
  overfit->add_option("--n-r", ocfg.n_r, "collocation points");
  overfit->add_option("--n-e", ocfg.n_e, "boundary points (heat)");
  overfit->add_option("--sigma", ocfg.sigma, "noise level (friction)");
  overfit->add_option("--mc-interior", ocfg.mc_interior, "interior MC size");
  overfit->add_option("--mc-boundary", ocfg.mc_boundary, "boundary MC size");
  overfit->add_option("--seed", ocfg.seed, "seed");
  overfit->add_option("--out", o_out, "output directory");

  std::string scale = "reduced";
  std::string h_out = "out";
  int h_workers = 4, h_epochs = -1, h_reps = -1;
  double h_lr = -1.0;
  std::uint64_t h_seed = 1;
  auto* hybrid = app.add_subcommand("hybrid-advection", "rate study on the advection problem");
  hybrid->add_option("--scale", scale, "reduced|paper");
  hybrid->add_option("--workers", h_workers, "concurrent runs");
  hybrid->add_option("--epochs", h_epochs, "override epochs");
  hybrid->add_option("--reps", h_reps, "override seeds per n");
  hybrid->add_option("--lr", h_lr, "override learning rate");
  hybrid->add_option("--seed", h_seed, "base seed");
  hybrid->add_option("--out", h_out, "output directory");

  pinn::HeatSolverConfig hcfg;
  std::string s_out = "out";
  auto* solve = app.add_subcommand("solve-heat", "solver run on the heat problem");
  solve->add_option("--n-e", hcfg.n_e, "boundary points");
  solve->add_option("--n-r", hcfg.n_r, "collocation points");
  solve->add_option("--depth", hcfg.depth, "hidden layers");
  solve->add_option("--width", hcfg.width, "hidden width");
  solve->add_option("--m", hcfg.m, "derivative penalty order");
  solve->add_option("--lambda-t", hcfg.lambda_t, "derivative penalty weight");
  solve->add_option("--lambda-ridge", hcfg.lambda_ridge, "override the schedule ridge weight");
  solve->add_option("--schedule", hcfg.schedule, "manual|thm41|thm54|prop58");
  solve->add_option("--epochs", hcfg.epochs, "epochs");
  solve->add_option("--lr", hcfg.lr, "learning rate");
  solve->add_option("--monitor-every", hcfg.monitor_every, "monitor cadence");
  solve->add_option("--seed", hcfg.seed, "seed");
  solve->add_option("--out", s_out, "output directory");

  int b_cases = 100;
  std::uint64_t b_seed = 5;
  auto* bound = app.add_subcommand("bound-check", "parameter-norm bound sweep");
  bound->add_option("--cases", b_cases, "random networks");
  bound->add_option("--seed", b_seed, "seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(config, outdir);
    if (overfit->parsed()) return cmd_overfit(ocfg, o_out);
    if (hybrid->parsed()) {
      pinn::HybridConfig cfg = pinn::HybridConfig::preset(scale);
      cfg.workers = h_workers;
      cfg.base_seed = h_seed;
      if (h_epochs > 0) cfg.epochs = h_epochs;
      if (h_reps > 0) cfg.reps = h_reps;
      if (h_lr > 0) cfg.lr = h_lr;
      return cmd_hybrid(cfg, h_out);
    }
    if (solve->parsed()) return cmd_solve_heat(hcfg, s_out);
    if (bound->parsed()) return cmd_bound_check(b_cases, b_seed);
  } catch (const std::exception& e) {
    nlohmann::json err = {{"error", e.what()}};
    if (const auto* te = dynamic_cast<const pinn::TrainingError*>(&e)) err["step"] = te->step;
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 1;
}

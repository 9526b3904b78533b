// rsl_cli.cpp -- scenario-driven command line front end.
//
//   rsl run   <scenario> [--out DIR] [--seed S] [--h STEP] [--t-end T]
//   rsl check <scenario>
//   rsl batch <dir> [--jobs N]
//
// `run` integrates the closed loop and writes trajectory.csv, summary.txt,
// and gnuplot-ready .dat column files into the output directory.  `check`
// performs the static analyses only -- rigidity of the target framework, the
// estimator spectrum, motion-design membership -- without simulating.
// `batch` runs every *.ini scenario under a directory, optionally in
// parallel, one output directory each.
//
// Exit codes: 0 success, 1 configuration error, 2 divergence.  For seeds,
// --seed beats the RSL_SEED environment variable, which beats the seed from
// the scenario file; seeds only matter for scenarios with random starts.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rsl/rsl.hpp"

namespace fs = std::filesystem;

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

const char* law_name(rsl::ControlLaw law) {
  switch (law) {
    case rsl::ControlLaw::gradient: return "gradient";
    case rsl::ControlLaw::hamiltonian: return "hamiltonian";
    case rsl::ControlLaw::mismatched: return "mismatched";
    case rsl::ControlLaw::estimator1: return "estimator1";
    case rsl::ControlLaw::estimator2: return "estimator2";
    case rsl::ControlLaw::motion: return "motion";
  }
  return "?";
}

std::uint64_t parse_seed_text(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const unsigned long long x = std::strtoull(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0')
    throw rsl::InvalidInput(what + " is not an unsigned integer: '" + text + "'");
  return x;
}

// --seed beats RSL_SEED beats the scenario file (the file value is used when
// this returns nothing).
std::optional<std::uint64_t> effective_seed(const std::optional<std::uint64_t>& cli) {
  if (cli) return cli;
  if (const char* env = std::getenv("RSL_SEED")) return parse_seed_text(env, "RSL_SEED");
  return std::nullopt;
}

// The controller's stacked state at sample j, for energy evaluation.
rsl::Vec packed_sample(const rsl::Trajectory& traj, std::size_t j) {
  rsl::Vec x = traj.p[j];
  x.insert(x.end(), traj.v[j].begin(), traj.v[j].end());
  if (traj.has_estimate) x.insert(x.end(), traj.mu_hat[j].begin(), traj.mu_hat[j].end());
  return x;
}

std::string summarize(const rsl::Scenario& sc, const rsl::Problem& pr,
                      const rsl::Trajectory& traj, const rsl::SteadyReport& sr) {
  const int n = pr.g.n();
  const int m = pr.shape.m;
  std::ostringstream out;
  out << "scenario: " << sc.name << "\n";
  out << "law: " << law_name(sc.law) << "\n";
  out << "agents: " << n << "   edges: " << pr.g.edge_count() << "   dimension: " << m << "\n";
  out << "h = " << num(pr.sim.h) << "   t_end = " << num(pr.sim.t_end)
      << "   samples = " << traj.samples() << "\n\n";

  if (sr.steady)
    out << "steady state: reached at t = " << num(sr.t_detect)
        << " (last channel to settle: " << sr.last_channel << ")\n";
  else
    out << "steady state: not reached by t_end\n";

  const rsl::Vec& pT = traj.p.back();
  const rsl::Vec& vT = traj.v.back();
  double smax = 0.0;
  for (int i = 0; i < n; ++i)
    smax = std::max(smax, rsl::norm(rsl::segment(vT, static_cast<std::size_t>(i) * m, m)));
  const rsl::Vec eT = rsl::distance_errors(pr.g, pr.shape, pT);
  double emax = 0.0;
  for (double e : eT) emax = std::max(emax, std::fabs(e));
  out << "final max agent speed:      " << sci(smax) << "\n";
  out << "final max |distance error|: " << sci(emax) << "\n";
  if (traj.has_estimate && !pr.ctl.mu.empty()) {
    double mmax = 0.0;
    for (std::size_t k = 0; k < pr.ctl.mu.size(); ++k)
      mmax = std::max(mmax, std::fabs(traj.mu_hat.back()[k] - pr.ctl.mu[k]));
    out << "final max |mu_hat - mu|:    " << sci(mmax) << "\n";
  }

  // Energy along the recorded samples: the gradient, blended, and
  // measurement-driven estimator laws all carry a certificate that should
  // not increase; for the others the line is a measurement, not a promise.
  double worst_rise = 0.0, vscale = 0.0;
  double prev = 0.0;
  for (std::size_t j = 0; j < traj.samples(); ++j) {
    const double v = rsl::lyapunov_value(pr.ctl, pr.g, pr.shape, packed_sample(traj, j));
    vscale = std::max(vscale, std::fabs(v));
    if (j > 0) worst_rise = std::max(worst_rise, v - prev);
    prev = v;
  }
  const double rise_tol = 1e-9 * std::max(1.0, vscale);
  out << "energy along the run: "
      << (worst_rise <= rise_tol ? "nonincreasing" : "not monotone")
      << " (largest step increase " << sci(worst_rise) << ")\n";

  if (sc.law == rsl::ControlLaw::motion) {
    const rsl::BodyMotion bm = rsl::fit_body_motion(m, pT, vT);
    out << "\nbody motion at t_end:\n";
    out << "  |v_c| = " << num(rsl::norm(bm.v_c)) << "   |omega| = " << num(rsl::norm(bm.omega))
        << "   fit residual = " << sci(bm.residual) << "\n";
    if (m == 3)
      out << "  alignment(v_c, omega) = " << num(rsl::axis_alignment_deg(bm.v_c, bm.omega))
          << " deg\n";
    out << "  agent speeds:";
    for (int i = 0; i < n; ++i)
      out << " " << num(rsl::norm(rsl::segment(vT, static_cast<std::size_t>(i) * m, m)));
    out << "\n";
  }
  return out.str();
}

void write_dat(const std::filesystem::path& path, const std::vector<std::string>& names,
               const rsl::Trajectory& traj, const std::vector<rsl::Vec>& columns) {
  std::ofstream out(path);
  if (!out) throw rsl::InvalidInput("cannot write '" + path.string() + "'");
  out << "# t";
  for (const std::string& c : names) out << " " << c;
  out << "\n";
  for (std::size_t j = 0; j < traj.samples(); ++j) {
    out << rsl::format_full(traj.t[j]);
    for (const rsl::Vec& col : columns) out << " " << rsl::format_full(col[j]);
    out << "\n";
  }
}

void write_artifacts(const std::string& dir, const rsl::Problem& pr,
                     const rsl::Trajectory& traj, const std::string& summary) {
  const fs::path base(dir);
  fs::create_directories(base);

  {
    std::ofstream out(base / "trajectory.csv");
    if (!out) throw rsl::InvalidInput("cannot write '" + (base / "trajectory.csv").string() + "'");
    rsl::write_csv(out, rsl::trajectory_table(pr.g, pr.shape, traj));
  }
  {
    std::ofstream out(base / "summary.txt");
    if (!out) throw rsl::InvalidInput("cannot write '" + (base / "summary.txt").string() + "'");
    out << summary;
  }

  const std::size_t ns = traj.samples();
  const int n = traj.n, m = traj.m, ec = traj.edge_count;

  std::vector<std::string> names;
  std::vector<rsl::Vec> cols;
  for (int i = 0; i < n; ++i) {
    names.push_back("s[" + std::to_string(i + 1) + "]");
    rsl::Vec c(ns);
    for (std::size_t j = 0; j < ns; ++j)
      c[j] = rsl::norm(rsl::segment(traj.v[j], static_cast<std::size_t>(i) * m, m));
    cols.push_back(std::move(c));
  }
  write_dat(base / "speeds.dat", names, traj, cols);

  names.clear();
  cols.assign(ec, rsl::Vec(ns));
  for (int k = 0; k < ec; ++k) names.push_back("e[" + std::to_string(k + 1) + "]");
  for (std::size_t j = 0; j < ns; ++j) {
    const rsl::Vec e = rsl::distance_errors(pr.g, pr.shape, traj.p[j]);
    for (int k = 0; k < ec; ++k) cols[k][j] = e[k];
  }
  write_dat(base / "errors.dat", names, traj, cols);

  if (traj.has_estimate) {
    names.clear();
    cols.assign(ec, rsl::Vec(ns));
    for (int k = 0; k < ec; ++k) names.push_back("mu_hat[" + std::to_string(k + 1) + "]");
    for (std::size_t j = 0; j < ns; ++j)
      for (int k = 0; k < ec; ++k) cols[k][j] = traj.mu_hat[j][k];
    write_dat(base / "estimates.dat", names, traj, cols);
  }
}

struct Outcome {
  int status = 0;
  std::string line;     // one-line result for the console
  std::string summary;  // full report, empty unless the run succeeded
};

std::string scenario_label(const std::string& path) {
  std::string name = path;
  const std::size_t slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  return name;
}

Outcome run_one(const std::string& path, const std::optional<std::uint64_t>& seed,
                const std::optional<double>& h, const std::optional<double>& t_end,
                const std::string& out_override) {
  Outcome res;
  try {
    rsl::Scenario sc = rsl::parse_scenario_file(path);
    if (h) sc.sim.h = *h;
    if (t_end) sc.sim.t_end = *t_end;
    if (!out_override.empty())
      sc.out_dir = out_override;
    else if (sc.out_dir.empty())
      // The default artifact directory sits next to the scenario file, so a
      // batch leaves each run's output beside its input.
      sc.out_dir = (fs::path(path).parent_path() / (sc.name + "_out")).string();
    const std::uint64_t seed_val = seed.value_or(0);
    const rsl::Problem pr = rsl::build_problem(sc, seed ? &seed_val : nullptr);
    const rsl::Trajectory traj =
        rsl::simulate(pr.g, pr.shape, pr.ctl, pr.p0, pr.v0, pr.sim, pr.mu_hat0);
    const rsl::SteadyReport sr = rsl::detect_steady_state(pr.g, pr.shape, traj);
    res.summary = summarize(sc, pr, traj, sr);
    write_artifacts(pr.out_dir, pr, traj, res.summary);
    res.line = sc.name + ": ok, wrote " + pr.out_dir +
               (sr.steady ? " (steady at t = " + num(sr.t_detect) + ")"
                          : " (no steady state by t_end)");
  } catch (const rsl::DivergenceError& err) {
    res.status = 2;
    res.line = scenario_label(path) + ": diverged: " + std::string(err.what());
  } catch (const rsl::InvalidInput& err) {
    res.status = 1;
    res.line = scenario_label(path) + ": configuration error: " + std::string(err.what());
  } catch (const std::exception& err) {
    res.status = 1;
    res.line = scenario_label(path) + ": error: " + std::string(err.what());
  }
  return res;
}

int check_one(const std::string& path) {
  const rsl::Scenario sc = rsl::parse_scenario_file(path);
  const rsl::Problem pr = rsl::build_problem(sc);
  const int ec = pr.g.edge_count();

  std::cout << "scenario: " << sc.name << "\n";
  std::cout << "law: " << law_name(sc.law) << "\n";
  std::cout << "agents: " << pr.g.n() << "   edges: " << ec
            << "   dimension: " << pr.shape.m << "\n";

  if (!pr.shape.has_zstar()) {
    std::cout << "rigidity: not checkable (shape given by distances only)\n";
    return 0;
  }

  const rsl::RigidityReport rr = rsl::is_inf_min_rigid(pr.g, pr.shape);
  if (rr.ok)
    std::cout << "rigidity: infinitesimally minimally rigid (|E| = " << ec
              << ", rank R = " << rr.rank << ")\n";
  else
    std::cout << "rigidity: " << rr.reason << " (rank R = " << rr.rank << ")\n";

  if (sc.law == rsl::ControlLaw::estimator2) {
    const rsl::AssumptionReport ar = rsl::check_assumption1(pr.g, pr.shape);
    std::cout << "estimator spectrum: " << (ar.hurwitz ? "Hurwitz" : "not Hurwitz")
              << " (max Re lambda = " << sci(ar.max_real) << ")\n";
  }

  if (sc.law == rsl::ControlLaw::motion) {
    const auto& edges = pr.g.edges();
    rsl::Vec bias(2 * static_cast<std::size_t>(ec));
    for (int k = 0; k < ec; ++k) {
      bias[k] = pr.ctl.motion.a_v(edges[k].tail, k);
      bias[ec + k] = pr.ctl.motion.a_v(edges[k].head, k);
    }
    const rsl::Mat t = rsl::transfer_matrix(pr.g, pr.shape);
    const rsl::Subspace ker = rsl::null_space(t);
    const rsl::Subspace u = rsl::translational_basis(pr.g, pr.shape);
    const rsl::Subspace w = rsl::rotational_basis(pr.g, pr.shape);
    const rsl::Subspace steady{rsl::hcat(u.basis, w.basis)};
    std::cout << "motion design: translational dim " << u.dim() << ", rotational dim "
              << w.dim() << "\n";
    std::cout << "  steady-motion membership residual = "
              << sci(rsl::membership_residual(steady, bias, ker)) << "\n";
    std::cout << "  translational component = " << sci(rsl::norm(rsl::project_onto(u, bias)))
              << "   rotational component = " << sci(rsl::norm(rsl::project_onto(w, bias)))
              << "\n";
    const rsl::Vec sv = rsl::steady_velocity(pr.shape, pr.ctl.motion);
    std::cout << "  predicted steady speeds:";
    for (int i = 0; i < pr.g.n(); ++i)
      std::cout << " "
                << num(rsl::norm(
                       rsl::segment(sv, static_cast<std::size_t>(i) * pr.shape.m, pr.shape.m)));
    std::cout << "\n";
  }
  return 0;
}

int run_batch(const std::string& dir, int jobs, const std::optional<std::uint64_t>& seed) {
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".ini")
      paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw rsl::InvalidInput("no .ini scenarios under '" + dir + "'");

  std::vector<Outcome> results(paths.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < paths.size(); i = next.fetch_add(1))
      results[i] = run_one(paths[i], seed, std::nullopt, std::nullopt, "");
  };
  const int workers = std::max(1, std::min(jobs, static_cast<int>(paths.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (std::thread& th : pool) th.join();

  int status = 0;
  for (const Outcome& r : results) {
    (r.status == 0 ? std::cout : std::cerr) << r.line << "\n";
    if (r.status == 1) status = 1;
    if (r.status == 2 && status == 0) status = 2;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distance-rigid formation control: simulate, check, batch"};
  app.require_subcommand(1);
  // `--h` is the integration-step override, so help is spelled out in full.
  app.set_help_flag("--help", "print this help message and exit");

  std::string run_path, run_out;
  std::uint64_t run_seed = 0;
  double run_h = 0.0, run_t = 0.0;
  CLI::App* cmd_run = app.add_subcommand("run", "integrate a scenario and write its artifacts");
  cmd_run->set_help_flag("--help", "print this help message and exit");
  cmd_run->add_option("scenario", run_path, "scenario file")->required();
  cmd_run->add_option("--out", run_out, "output directory (overrides the scenario)");
  CLI::Option* seed_opt =
      cmd_run->add_option("--seed", run_seed, "seed override for random starts");
  CLI::Option* h_opt = cmd_run->add_option("--h", run_h, "integration step override");
  CLI::Option* t_opt = cmd_run->add_option("--t-end", run_t, "end time override");

  std::string check_path;
  CLI::App* cmd_check = app.add_subcommand("check", "static checks only, no simulation");
  cmd_check->add_option("scenario", check_path, "scenario file")->required();

  std::string batch_dir;
  int jobs = 1;
  CLI::App* cmd_batch =
      app.add_subcommand("batch", "run every .ini scenario under a directory");
  cmd_batch->add_option("dir", batch_dir, "scenario directory")->required();
  cmd_batch->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // bad usage is a configuration error
  }

  try {
    if (cmd_run->parsed()) {
      std::optional<std::uint64_t> cli_seed;
      if (seed_opt->count() > 0) cli_seed = run_seed;
      const Outcome res = run_one(
          run_path, effective_seed(cli_seed),
          h_opt->count() > 0 ? std::optional<double>(run_h) : std::nullopt,
          t_opt->count() > 0 ? std::optional<double>(run_t) : std::nullopt, run_out);
      if (res.status == 0)
        std::cout << res.summary << "\n" << res.line << "\n";
      else
        std::cerr << res.line << "\n";
      return res.status;
    }
    if (cmd_check->parsed()) return check_one(check_path);
    return run_batch(batch_dir, jobs, effective_seed(std::nullopt));
  } catch (const rsl::InvalidInput& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}

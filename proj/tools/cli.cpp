#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "trajopt/config.hpp"
#include "trajopt/errors.hpp"
#include "trajopt/planner.hpp"
#include "trajopt/pso.hpp"

namespace trajopt::cli {

namespace fs = std::filesystem;

namespace {

RunConfig load_with_overrides(const RunManifest& m) {
  RunConfig cfg = load_config(m.config);
  if (m.seed) cfg.swarm.seed = *m.seed;
  if (m.sync_mode) cfg.problem.sync_mode = *m.sync_mode;
  cfg.swarm.threads = std::max<std::size_t>(1, m.threads);
  return cfg;
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InvalidConfig("cannot create output directory " + dir.string());
}

std::string convergence_csv(const std::vector<IterationRecord>& history) {
  std::string s = "iteration,gbest_fitness,omega,c1,c2,perturbed\n";
  for (const IterationRecord& r : history) {
    s += std::to_string(r.iteration) + "," + format_double(r.gbest_fitness) + "," + format_double(r.omega) + "," +
         format_double(r.c1) + "," + format_double(r.c2) + "," + (r.perturbed ? "1" : "0") + "\n";
  }
  return s;
}

std::string trajectory_csv(const SynchronizedTrajectory& traj, double dt) {
  const auto rows = sample(traj, dt);
  std::string s = "t,joint,q,v,a\n";
  if (rows.empty()) return s;
  for (std::size_t k = 0; k < rows.front().size(); ++k) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const TrajectorySample& p = rows[j][k];
      s += format_double(p.t) + "," + std::to_string(j + 1) + "," + format_double(p.q) + "," + format_double(p.v) +
           "," + format_double(p.a) + "\n";
    }
  }
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Runs `body`, mapping library errors onto exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const NoFeasibleSolution& e) {
    err << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InfeasibleAfterSync& e) {
    err << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidConfig("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw InvalidConfig("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::size_t worker_threads() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TRAJOPT_THREADS")) {
    std::size_t cap = 0;
    const std::string_view text(env);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), cap);
    if (res.ec == std::errc() && cap >= 1) n = std::min(n, cap);
  }
  return n;
}

int cmd_plan(const RunManifest& m, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(m.dt > 0.0)) throw InvalidConfig("--dt must be > 0");
    const RunConfig cfg = load_with_overrides(m);
    prepare_out_dir(m.out_dir);
    const PlanResult result = plan(cfg.problem, cfg.swarm);
    const SynchronizedTrajectory& traj = result.trajectory;

    write_file_atomic(m.out_dir / "trajectory.csv", trajectory_csv(traj, m.dt));

    nlohmann::ordered_json times;
    times["t1"] = traj.times.t1;
    times["t2"] = traj.times.t2;
    times["t3"] = traj.times.t3;
    times["total"] = traj.total_duration;
    times["sync_mode"] = to_string(cfg.problem.sync_mode);
    times["seed"] = cfg.swarm.seed;
    write_file_atomic(m.out_dir / "times.json", times.dump(2) + "\n");

    write_file_atomic(m.out_dir / "convergence.csv", convergence_csv(result.runs.front().history));
    if (cfg.problem.sync_mode == SyncMode::kPerJointMax) {
      for (std::size_t j = 0; j < result.runs.size(); ++j) {
        write_file_atomic(m.out_dir / ("convergence_joint" + std::to_string(j + 1) + ".csv"),
                          convergence_csv(result.runs[j].history));
      }
    }

    out << "planned " << traj.per_joint.size() << " joint(s): t1=" << format_double(traj.times.t1)
        << " t2=" << format_double(traj.times.t2) << " t3=" << format_double(traj.times.t3)
        << " total=" << format_double(traj.total_duration) << " s\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_compare_pso(const RunManifest& m, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (m.seeds < kMinCompareSeeds) {
      throw InvalidConfig("compare-pso needs --seeds >= " + std::to_string(kMinCompareSeeds));
    }
    const RunConfig cfg = load_with_overrides(m);
    prepare_out_dir(m.out_dir);

    std::string compare = "seed,variant,iterations_to_1pct,final_fitness\n";
    std::string history = "seed,variant,iteration,gbest_fitness\n";
    std::vector<double> improved_iters;
    std::vector<double> standard_iters;
    std::vector<double> per_seed_ratio;

    for (std::size_t i = 0; i < m.seeds; ++i) {
      const std::uint64_t seed = cfg.swarm.seed + i;
      std::size_t iters[2] = {0, 0};
      for (PsoVariant variant : {PsoVariant::kImproved, PsoVariant::kStandard}) {
        SwarmConfig swarm = cfg.swarm;
        swarm.seed = seed;
        swarm.variant = variant;
        const RunResult r = run(swarm, cfg.problem);
        const std::size_t to_1pct = iterations_to_within(r.history, 0.01);
        iters[variant == PsoVariant::kImproved ? 0 : 1] = to_1pct;
        const std::string name = to_string(variant);
        compare += std::to_string(seed) + "," + name + "," + std::to_string(to_1pct) + "," +
                   format_double(r.best_fitness) + "\n";
        for (const IterationRecord& rec : r.history) {
          history += std::to_string(seed) + "," + name + "," + std::to_string(rec.iteration) + "," +
                     format_double(rec.gbest_fitness) + "\n";
        }
      }
      improved_iters.push_back(static_cast<double>(iters[0]));
      standard_iters.push_back(static_cast<double>(iters[1]));
      per_seed_ratio.push_back(static_cast<double>(iters[0]) / static_cast<double>(iters[1]));
    }

    const double med_improved = median(improved_iters);
    const double med_standard = median(standard_iters);
    nlohmann::ordered_json summary;
    summary["seeds"] = m.seeds;
    summary["first_seed"] = cfg.swarm.seed;
    summary["median_iterations_improved"] = med_improved;
    summary["median_iterations_standard"] = med_standard;
    summary["median_ratio"] = med_improved / med_standard;
    summary["median_per_seed_ratio"] = median(per_seed_ratio);

    write_file_atomic(m.out_dir / "compare.csv", compare);
    write_file_atomic(m.out_dir / "compare_history.csv", history);
    write_file_atomic(m.out_dir / "summary.json", summary.dump(2) + "\n");
    out << "median iterations to 1%: improved=" << med_improved << " standard=" << med_standard
        << " ratio=" << format_double(med_improved / med_standard) << "\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_kernels(const std::vector<kernels::KernelCheckResult>& results, std::ostream& out) {
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width)) << r.name << "  "
        << r.reported << "\n";
    all = all && r.passed;
  }
  out << (all ? "all kernel checks passed" : "kernel checks FAILED") << "\n";
  return all ? kExitOk : kExitKernelFailure;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-optimal 3-5-3 joint trajectory planner"};
  app.require_subcommand(1);
  RunManifest m;
  m.threads = worker_threads();
  std::string sync;
  std::uint64_t seed = 0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", m.config, "Experiment JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", m.out_dir, "Output directory");
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--sync", sync, "shared | per-joint-max")->check(CLI::IsMember({"shared", "per-joint-max"}));
  };

  CLI::App* plan_cmd = app.add_subcommand("plan", "Plan a time-optimal trajectory");
  add_common(plan_cmd);
  plan_cmd->add_option("--dt", m.dt, "Sampling step for trajectory.csv (s)");

  CLI::App* compare_cmd = app.add_subcommand("compare-pso", "Compare improved and standard PSO over many seeds");
  add_common(compare_cmd);
  compare_cmd->add_option("--seeds", m.seeds, "Number of seeds (>= 20)");

  CLI::App* kernels_cmd = app.add_subcommand("kernels", "Verify the reference kernel formulas");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  for (CLI::App* sub : {plan_cmd, compare_cmd}) {
    if (sub->parsed()) {
      if (sub->count("--seed") > 0) m.seed = seed;
      if (!sync.empty()) m.sync_mode = parse_sync_mode(sync);
    }
  }
  if (plan_cmd->parsed()) {
    m.command = "plan";
    return cmd_plan(m, out, err);
  }
  if (compare_cmd->parsed()) {
    m.command = "compare-pso";
    return cmd_compare_pso(m, out, err);
  }
  if (kernels_cmd->parsed()) {
    m.command = "kernels";
    return cmd_kernels(kernels::run_kernel_checks(), out);
  }
  return kExitConfig;
}

}  // namespace trajopt::cli

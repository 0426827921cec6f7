#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "delab/config.hpp"
#include "delab/estimate_auditor.hpp"

namespace delab {

enum ExitCode : int {
  exit_ok = 0,
  exit_fail = 1,          // an audit failed or a discrepancy bound was breached
  exit_blow_up = 2,       // the time stepper's blow-up guard fired
  exit_io = 3,            // unreadable or missing inputs, unwritable outputs
  exit_inconclusive = 4,  // some audit inconclusive, none failed
  exit_invalid_config = 5,
};

/// File names inside an output directory.
namespace layout {
inline const char* trajectory = "trajectory.csv";
inline const char* checkpoints = "checkpoints";
inline const char* audits = "audits.ndjson";
inline const char* summary = "audit_summary.csv";
inline const char* kernel_values = "kernel_values.csv";
inline const char* kernel_report = "kernelcheck.ndjson";
inline const char* report = "report.txt";
inline const char* plots = "plots";
}  // namespace layout

/// Header t,omega_inf,energy,hb_norm then the extras; values printed with 17
/// significant digits.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& traj);
/// Inverse of write_trajectory_csv (checkpoints left empty). Throws
/// std::runtime_error on malformed input.
TrajectoryRecord read_trajectory_csv(std::istream& is);

/// Loads trajectory.csv and every checkpoints/ckpt_*.bin in name order.
TrajectoryRecord load_run(const std::filesystem::path& dir);

/// Runs one audit request against a trajectory; exceptions become
/// inconclusive reports.
AuditReport run_audit(const AuditRequest& req, const SimulationConfig& sim, const TrajectoryRecord& traj);

/// Exit-code mapping of a set of reports.
int exit_code_for(const std::vector<AuditReport>& reports);

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);
/// Uses trajectory and checkpoints already in output_dir unless resimulate
/// is set or none exist; otherwise simulates first.
int cmd_audit(const ExperimentConfig& cfg, std::ostream& log, bool resimulate = false);

struct KernelCheckOptions {
  std::size_t samples = 10;
  std::uint64_t seed = 1;
  int n = 256;
  double tol = 1e-3;
  std::filesystem::path output_dir = "delab_kernelcheck";
};
int cmd_kernelcheck(const KernelCheckOptions& opt, std::ostream& log);

/// Text summary of audits.ndjson (or the summary CSV) and, when plots are
/// requested, plots/<diagnostic>.csv and .svg from trajectory.csv.
int cmd_report(const std::filesystem::path& dir, bool emit_plots, std::ostream& log);

/// Command-line entry point (subcommands simulate, audit, kernelcheck, report).
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace delab

#include "delab/cli_runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "delab/checkpoint.hpp"
#include "delab/singular_kernels.hpp"

namespace fs = std::filesystem;

namespace delab {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Like num() but always shows a decimal point for integral values.
std::string coord(double v) {
  std::string s = num(v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::out_of_range&) {
    return s.find('-') == 0 ? -INFINITY : INFINITY;
  } catch (const std::invalid_argument&) {
    throw std::runtime_error("malformed number '" + s + "'");
  }
  if (used != s.size()) throw std::runtime_error("malformed number '" + s + "'");
  return v;
}

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write '" + p.string() + "'");
  return os;
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw IoError("cannot create directory '" + p.string() + "'");
}

fs::path checkpoint_path(const fs::path& dir, std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof name, "ckpt_%06zu.bin", index);
  return dir / layout::checkpoints / name;
}

// Streams the run to disk as it progresses so an interrupted run leaves a
// consistent prefix. Returns the record (with checkpoints when keep is set).
TrajectoryRecord simulate_to_disk(const SimulationConfig& sim, const fs::path& dir, bool keep, std::ostream& log) {
  ensure_dir(dir);
  ensure_dir(dir / layout::checkpoints);
  for (const auto& e : fs::directory_iterator(dir / layout::checkpoints))
    if (e.path().extension() == ".bin") fs::remove(e.path());
  auto csv = open_out(dir / layout::trajectory);
  TrajectoryRecord header;
  header.extra_names = sim.extras;
  write_trajectory_csv(csv, header);
  std::size_t ck = 0;
  RunHooks hooks;
  hooks.keep_checkpoints = keep;
  hooks.on_output = [&](double t, const Diagnostics& d) {
    csv << num(t) << ',' << num(d.omega_inf) << ',' << num(d.energy) << ',' << num(d.hb_norm);
    for (double v : d.extras) csv << ',' << num(v);
    csv << '\n';
    csv.flush();
    if (!csv) throw IoError("write failed on '" + (dir / layout::trajectory).string() + "'");
  };
  hooks.on_checkpoint = [&](const FlowState& s) {
    try {
      write_checkpoint(checkpoint_path(dir, ck++), s);
    } catch (const CheckpointError& e) {
      throw IoError(e.what());
    }
  };
  try {
    auto rec = run(sim, initial_state(sim), hooks);
    log << "simulated to t = " << num(sim.t_end) << " in " << rec.steps << " steps; " << rec.times.size()
        << " outputs, " << ck << " checkpoints in " << dir.string() << "\n";
    return rec;
  } catch (const BlowUpError& e) {
    try {
      write_checkpoint(dir / layout::checkpoints / "last_valid.bin", e.last_valid);
    } catch (const CheckpointError&) {
    }
    throw;
  }
}

template <class F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const BlowUpError& e) {
    log << "error: blow-up guard: " << e.what() << "\n";
    return exit_blow_up;
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const CheckpointError& e) {
    log << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const std::ios_base::failure& e) {
    log << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return exit_invalid_config;
  } catch (const std::invalid_argument& e) {
    log << "error: invalid configuration: " << e.what() << "\n";
    return exit_invalid_config;
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& traj) {
  os << "t,omega_inf,energy,hb_norm";
  for (const auto& e : traj.extra_names) os << ',' << e;
  os << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const auto& d = traj.diagnostics[k];
    os << num(traj.times[k]) << ',' << num(d.omega_inf) << ',' << num(d.energy) << ',' << num(d.hb_norm);
    for (double v : d.extras) os << ',' << num(v);
    os << '\n';
  }
}

TrajectoryRecord read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty trajectory file");
  const auto head = split(line, ',');
  if (head.size() < 4 || head[0] != "t" || head[1] != "omega_inf" || head[2] != "energy" || head[3] != "hb_norm")
    throw std::runtime_error("trajectory header must start with t,omega_inf,energy,hb_norm");
  TrajectoryRecord rec;
  rec.extra_names.assign(head.begin() + 4, head.end());
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != head.size()) throw std::runtime_error("trajectory line " + std::to_string(lineno) + ": wrong column count");
    Diagnostics d;
    rec.times.push_back(parse_number(cells[0]));
    d.omega_inf = parse_number(cells[1]);
    d.energy = parse_number(cells[2]);
    d.hb_norm = parse_number(cells[3]);
    for (std::size_t c = 4; c < cells.size(); ++c) d.extras.push_back(parse_number(cells[c]));
    rec.diagnostics.push_back(std::move(d));
  }
  return rec;
}

TrajectoryRecord load_run(const fs::path& dir) {
  std::ifstream in(dir / layout::trajectory);
  if (!in) throw IoError("missing '" + (dir / layout::trajectory).string() + "'");
  TrajectoryRecord rec;
  try {
    rec = read_trajectory_csv(in);
  } catch (const std::runtime_error& e) {
    throw IoError((dir / layout::trajectory).string() + ": " + e.what());
  }
  std::vector<fs::path> files;
  if (fs::is_directory(dir / layout::checkpoints))
    for (const auto& e : fs::directory_iterator(dir / layout::checkpoints)) {
      const auto name = e.path().filename().string();
      if (name.rfind("ckpt_", 0) == 0 && e.path().extension() == ".bin") files.push_back(e.path());
    }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) rec.checkpoints.push_back(read_checkpoint(f));
  return rec;
}

AuditReport run_audit(const AuditRequest& req, const SimulationConfig& sim, const TrajectoryRecord& traj) {
  auto ensemble = [&](std::size_t default_size) {
    EnsembleSpec spec;
    spec.size = req.ensemble_size.value_or(default_size);
    spec.seed = req.seed.value_or(1);
    if (!req.radii.empty()) spec.radii = req.radii;
    return spec;
  };
  AuditReport r;
  try {
    const auto& id = req.id;
    if (id == "max_principle") {
      r = audit_max_principle(traj, sim.alpha, sim.forcing.curl(sim.grid).max_abs());
    } else if (id == "dissipative_bound") {
      r = audit_dissipative_bound(traj, sim);
    } else if (id == "enstrophy_balance") {
      r = audit_enstrophy_balance(traj, sim, req.eps, req.x0);
    } else if (id == "local_energy") {
      r = audit_local_energy_inequality(traj, sim, req.R, req.x0);
    } else if (id == "growth_alpha0") {
      r = audit_growth_alpha0(traj, sim);
    } else if (id == "double_exponential") {
      InitSpec pert;
      pert.kind = InitKind::mode;
      pert.m1 = req.perturbation_mode[0];
      pert.m2 = req.perturbation_mode[1];
      r = audit_double_exponential(sim, pert, req.delta0);
    } else if (id == "interpolation_a1") {
      r = audit_interpolation_A1(ensemble(400));
    } else if (id == "interpolation_inf") {
      r = audit_interpolation_inf(ensemble(400));
    } else if (id == "keyest") {
      r = audit_keyest(ensemble(400));
    } else if (id == "yudovich_pbound") {
      r = audit_yudovich_ensemble(ensemble(50));
    } else if (id == "weight_lemmas") {
      r = audit_weight_lemmas(req.radii.empty() ? std::vector<double>{1, 2, 4, 8} : req.radii, req.pairs,
                              req.seed.value_or(1));
    } else if (id == "commutator") {
      const auto s = initial_state(sim);
      r = audit_commutator(s.velocity(), s.omega, req.mus);
    } else if (id == "pressure_kernel") {
      r = audit_pressure_kernel({req.kernel_n, 2 * std::numbers::pi}, req.samples, req.seed.value_or(1));
    } else {
      r.estimate_id = id;
      r.notes = "no driver for this audit";
    }
  } catch (const std::exception& e) {
    r = AuditReport{};
    r.estimate_id = req.id;
    r.verdict = Verdict::inconclusive;
    r.notes = std::string("audit could not run: ") + e.what();
  }
  if (req.alias != req.id) r.notes += (r.notes.empty() ? "" : "; ") + std::string("requested as ") + req.alias;
  return r;
}

int exit_code_for(const std::vector<AuditReport>& reports) {
  switch (combine(reports)) {
    case Verdict::pass: return exit_ok;
    case Verdict::fail: return exit_fail;
    case Verdict::inconclusive: return exit_inconclusive;
  }
  return exit_fail;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    simulate_to_disk(cfg.simulation, cfg.output_dir, false, log);
    return static_cast<int>(exit_ok);
  });
}

int cmd_audit(const ExperimentConfig& cfg, std::ostream& log, bool resimulate) {
  return guarded(log, [&] {
    const fs::path dir = cfg.output_dir;
    auto sim = cfg.simulation;
    TrajectoryRecord traj;
    if (!resimulate && fs::exists(dir / layout::trajectory)) {
      traj = load_run(dir);
      log << "using " << traj.times.size() << " outputs and " << traj.checkpoints.size() << " checkpoints from "
          << dir.string() << "\n";
    } else {
      const bool need_ck = std::any_of(cfg.audits.begin(), cfg.audits.end(), [](auto& a) { return a.needs_checkpoints(); });
      if (need_ck && sim.checkpoint_every == 0) {
        sim.checkpoint_every = sim.output_every;
        log << "checkpoint audits requested: checkpointing at the output cadence\n";
      }
      const bool need_l2b = std::any_of(cfg.audits.begin(), cfg.audits.end(), [](auto& a) { return a.id == "growth_alpha0"; });
      if (need_l2b && std::find(sim.extras.begin(), sim.extras.end(), "l2_b") == sim.extras.end())
        sim.extras.push_back("l2_b");
      traj = simulate_to_disk(sim, dir, true, log);
    }
    std::vector<AuditReport> reports;
    for (const auto& req : cfg.audits) {
      reports.push_back(run_audit(req, sim, traj));
      log << reports.back().estimate_id << ": " << to_string(reports.back().verdict) << " (margin "
          << num(reports.back().margin) << ")\n";
    }
    ensure_dir(dir);
    if (cfg.formats != OutputFormat::csv) {
      auto os = open_out(dir / layout::audits);
      write_ndjson(os, reports);
      if (!os) throw IoError("write failed on audits.ndjson");
    }
    if (cfg.formats != OutputFormat::ndjson) {
      auto os = open_out(dir / layout::summary);
      write_summary_csv(os, reports);
      if (!os) throw IoError("write failed on audit_summary.csv");
    }
    return exit_code_for(reports);
  });
}

int cmd_kernelcheck(const KernelCheckOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    if (opt.samples == 0) throw std::invalid_argument("samples must be positive");
    GridSpec g{opt.n, 2 * std::numbers::pi};
    g.validate();
    ensure_dir(opt.output_dir);
    {
      auto os = open_out(opt.output_dir / layout::kernel_values);
      os << "i,j,x1,x2,value\n";
      const std::vector<Point> pts{{1, 0}, {0, 1}, {1, 1}, {-1, 1}, {2, 0}, {0.5, 0.5}, {2, 1}, {1, 2}, {-2, -1}, {0.25, -0.75}};
      for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
          for (const auto& x : pts)
            os << i << ',' << j << ',' << coord(x[0]) << ',' << coord(x[1]) << ',' << num(kernel_eval({i, j}, x)) << '\n';
      if (!os) throw IoError("write failed on kernel_values.csv");
    }
    const auto r = audit_pressure_kernel(g, opt.samples, opt.seed, opt.tol);
    {
      auto os = open_out(opt.output_dir / layout::kernel_report);
      write_ndjson(os, {r});
    }
    log << "pressure cross-validation over " << opt.samples << " fields at n = " << opt.n << ": max relative L2 "
        << num(r.fitted_constants.at("max_relative_l2")) << " (tolerance " << num(opt.tol) << ") -> "
        << to_string(r.verdict) << "\n";
    return r.verdict == Verdict::pass ? static_cast<int>(exit_ok) : static_cast<int>(exit_fail);
  });
}

// ---------------------------------------------------------------------------
// Report

namespace {

struct SummaryRow {
  std::string id, verdict;
  double margin = 0;
  std::string constants, notes;
};

std::vector<SummaryRow> read_summary(const fs::path& dir) {
  std::vector<SummaryRow> rows;
  if (std::ifstream in(dir / layout::audits); in) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed audits.ndjson: " + std::string(e.what()));
      }
      SummaryRow r;
      r.id = j.value("estimate_id", "");
      r.verdict = j.value("verdict", "");
      r.margin = j["margin"].is_number() ? j["margin"].get<double>() : NAN;
      for (auto& [k, v] : j["fitted_constants"].items())
        r.constants += (r.constants.empty() ? "" : ", ") + k + " = " + (v.is_number() ? num(v.get<double>()) : v.dump());
      r.notes = j.value("notes", "");
      rows.push_back(std::move(r));
    }
    return rows;
  }
  std::ifstream in(dir / layout::summary);
  if (!in) throw IoError("no audit outputs in '" + dir.string() + "'");
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() < 3) throw IoError("malformed audit_summary.csv");
    SummaryRow r{cells[0], cells[1], parse_number(cells[2]), cells.size() > 3 ? cells[3] : "", ""};
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_svg(const fs::path& path, const std::string& title, const std::vector<double>& t, const std::vector<double>& v) {
  const double W = 640, H = 360, ml = 70, mr = 20, mt = 36, mb = 40;
  double tmin = t.front(), tmax = t.back(), vmin = INFINITY, vmax = -INFINITY;
  for (double x : v)
    if (std::isfinite(x)) {
      vmin = std::min(vmin, x);
      vmax = std::max(vmax, x);
    }
  if (!std::isfinite(vmin)) vmin = vmax = 0;
  if (vmax - vmin < 1e-300) {
    vmin -= 0.5;
    vmax += 0.5;
  }
  if (tmax - tmin < 1e-300) tmax = tmin + 1;
  auto X = [&](double x) { return ml + (x - tmin) / (tmax - tmin) * (W - ml - mr); };
  auto Y = [&](double y) { return H - mb - (y - vmin) / (vmax - vmin) * (H - mt - mb); };
  auto os = open_out(path);
  char buf[96];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' '
     << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n"
     << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  std::snprintf(buf, sizeof buf, "%.4g", vmax);
  os << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 4 << "\" text-anchor=\"end\">" << buf << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.4g", vmin);
  os << "<text x=\"" << ml - 6 << "\" y=\"" << H - mb << "\" text-anchor=\"end\">" << buf << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.4g", tmin);
  os << "<text x=\"" << ml << "\" y=\"" << H - mb + 18 << "\" text-anchor=\"middle\">" << buf << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.4g", tmax);
  os << "<text x=\"" << W - mr << "\" y=\"" << H - mb + 18 << "\" text-anchor=\"middle\">" << buf << "</text>\n"
     << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 8 << "\" text-anchor=\"middle\">t</text>\n"
     << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!std::isfinite(v[k])) continue;
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(t[k]), Y(v[k]));
    os << buf;
  }
  os << "\"/>\n</svg>\n";
  if (!os) throw IoError("write failed on '" + path.string() + "'");
}

}  // namespace

int cmd_report(const fs::path& dir, bool emit_plots, std::ostream& log) {
  return guarded(log, [&] {
    if (!fs::is_directory(dir)) throw IoError("output directory '" + dir.string() + "' does not exist");
    const auto rows = read_summary(dir);
    std::ostringstream text;
    text << "audit summary for " << dir.string() << "\n\n";
    std::size_t width = 10;
    for (const auto& r : rows) width = std::max(width, r.id.size());
    std::map<std::string, int> tally;
    for (const auto& r : rows) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%-12s margin %.6g", r.verdict.c_str(), r.margin);
      text << r.id << std::string(width + 2 - r.id.size(), ' ') << buf << "\n";
      if (!r.constants.empty()) text << std::string(width + 2, ' ') << r.constants << "\n";
      if (!r.notes.empty()) text << std::string(width + 2, ' ') << r.notes << "\n";
      ++tally[r.verdict];
    }
    text << "\n" << rows.size() << " audits:";
    for (const auto& [v, n] : tally) text << " " << n << " " << v;
    text << "\n";
    {
      auto os = open_out(dir / layout::report);
      os << text.str();
    }
    log << text.str();
    if (emit_plots) {
      std::ifstream in(dir / layout::trajectory);
      if (!in) throw IoError("plots requested but '" + (dir / layout::trajectory).string() + "' is missing");
      TrajectoryRecord traj;
      try {
        traj = read_trajectory_csv(in);
      } catch (const std::runtime_error& e) {
        throw IoError(e.what());
      }
      if (traj.times.empty()) throw IoError("trajectory has no rows");
      ensure_dir(dir / layout::plots);
      std::vector<std::string> names{"omega_inf", "energy", "hb_norm"};
      names.insert(names.end(), traj.extra_names.begin(), traj.extra_names.end());
      for (std::size_t c = 0; c < names.size(); ++c) {
        std::vector<double> v;
        for (const auto& d : traj.diagnostics)
          v.push_back(c == 0 ? d.omega_inf : c == 1 ? d.energy : c == 2 ? d.hb_norm : d.extras[c - 3]);
        auto os = open_out(dir / layout::plots / (names[c] + ".csv"));
        os << "t," << names[c] << "\n";
        for (std::size_t k = 0; k < v.size(); ++k) os << num(traj.times[k]) << ',' << num(v[k]) << '\n';
        write_svg(dir / layout::plots / (names[c] + ".svg"), names[c], traj.times, v);
      }
      log << "wrote " << names.size() << " plot CSV/SVG pairs to " << (dir / layout::plots).string() << "\n";
    }
    return static_cast<int>(exit_ok);
  });
}

// ---------------------------------------------------------------------------

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"delab: damped Euler experiments and numerical estimate audits"};
  app.require_subcommand(1);

  std::string sim_config;
  auto* simulate = app.add_subcommand("simulate", "integrate the configured flow; write trajectory CSV and checkpoints");
  simulate->add_option("config", sim_config, "experiment config file")->required();

  std::string audit_config;
  bool resimulate = false;
  auto* audit = app.add_subcommand("audit", "run the configured audits; write NDJSON reports and a CSV summary");
  audit->add_option("config", audit_config, "experiment config file")->required();
  audit->add_flag("--resimulate", resimulate, "ignore an existing trajectory in the output directory");

  KernelCheckOptions kc;
  auto* kernel = app.add_subcommand("kernelcheck", "pressure kernel table and direct-vs-spectral cross-validation");
  kernel->add_option("--samples", kc.samples, "number of seeded compactly supported fields")->capture_default_str();
  kernel->add_option("--seed", kc.seed, "base seed")->capture_default_str();
  kernel->add_option("--n", kc.n, "grid points per side")->capture_default_str();
  kernel->add_option("--tol", kc.tol, "relative L2 tolerance")->capture_default_str();
  kernel->add_option("--out", kc.output_dir, "output directory")->capture_default_str();

  std::string report_config, report_dir;
  bool plots = false;
  auto* report = app.add_subcommand("report", "summarize audit outputs; optional plot CSV and SVG files");
  report->add_option("config", report_config, "experiment config file (output dir and emit_plots)");
  report->add_option("--dir", report_dir, "output directory (instead of a config)");
  report->add_flag("--plots", plots, "emit plot CSV and SVG files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return exit_invalid_config;
  }

  auto load = [&](const std::string& path, ExperimentConfig& cfg) -> int {
    try {
      cfg = parse_config_file(path);
      return -1;
    } catch (const ConfigError& e) {
      err << "error: " << e.what() << "\n";
      return exit_invalid_config;
    } catch (const std::ios_base::failure& e) {
      err << "error: " << e.what() << "\n";
      return exit_io;
    }
  };

  ExperimentConfig cfg;
  if (*simulate) {
    if (int rc = load(sim_config, cfg); rc >= 0) return rc;
    return cmd_simulate(cfg, out);
  }
  if (*audit) {
    if (int rc = load(audit_config, cfg); rc >= 0) return rc;
    const int rc = cmd_audit(cfg, out, resimulate);
    out << "exit " << rc << "\n";
    return rc;
  }
  if (*kernel) return cmd_kernelcheck(kc, out);
  if (*report) {
    fs::path dir = report_dir;
    if (!report_config.empty()) {
      if (int rc = load(report_config, cfg); rc >= 0) return rc;
      if (dir.empty()) dir = cfg.output_dir;
      plots = plots || cfg.emit_plots;
    }
    if (dir.empty()) {
      err << "error: report needs a config file or --dir\n";
      return exit_invalid_config;
    }
    return cmd_report(dir, plots, out);
  }
  return exit_invalid_config;
}

}  // namespace delab

#pragma once

// Subcommand bodies for the pufcan tool. Each writes its artifacts under an
// output directory, prints a human summary to `log`, and returns an exit code.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pufcan/analysis.hpp"
#include "pufcan/attacks.hpp"
#include "pufcan/cli/config.hpp"
#include "pufcan/scenario.hpp"

namespace pufcan::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kAuthFailure = 3,
  kGoldenMismatch = 4,
};

inline void write_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(Errc::IoFailure, "short write to " + path.string());
}

inline EnrollmentDb read_enrollment(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::EnrollmentFileMissing, path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
  return EnrollmentDb::from_json(j);
}

inline std::string trace_csv(const Bus& bus) {
  std::ostringstream ss;
  write_trace_csv(ss, bus.history(), bus.kind());
  return ss.str();
}

inline int cmd_enroll(const ScenarioConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  Fleet fleet(cfg);
  const auto& db = fleet.server().db();
  write_file(out_dir / "enrollment.json", db.to_json().dump(2) + "\n");
  log << "server public key " << to_hex(db.server_public()) << "\n";
  for (const auto& [id, rec] : db.nodes()) {
    log << "node " << id << " public " << to_hex(rec.node_public) << " hash " << to_hex(rec.response_hash) << "\n";
  }
  log << "enrolled " << db.size() << " nodes -> " << (out_dir / "enrollment.json").string() << "\n";
  return kOk;
}

inline int cmd_authenticate(const ScenarioConfig& cfg, const fs::path& enrollment, const fs::path& out_dir,
                            std::ostream& log) {
  const EnrollmentDb db = read_enrollment(enrollment);
  Fleet fleet(cfg, db);
  Bus bus(cfg.frame_kind, cfg.speed);
  fleet.attach(bus);
  const SessionResult res = fleet.run_session();

  const auto n = db.size();
  const auto existing = analysis::auth_time(analysis::Framework::Existing, n, cfg.speed, cfg.frame_kind);
  const double ratio = static_cast<double>(res.duration().count()) / static_cast<double>(existing.count());

  nlohmann::ordered_json j;
  j["n_ecus"] = n;
  j["speed"] = std::string(to_string(cfg.speed));
  j["frame_kind"] = std::string(to_string(cfg.frame_kind));
  j["session_mode"] = std::string(to_string(cfg.session_mode));
  j["frames"] = res.frames;
  j["expected_frames"] = analysis::auth_frames(analysis::Framework::Proposed, n);
  j["authenticated"] = res.authenticated;
  std::vector<NodeId> failed;
  for (const auto& [id, rec] : db.nodes())
    if (!res.authenticated.contains(id)) failed.push_back(id);
  j["failed"] = failed;
  j["operational"] = res.operational;
  j["duration_us"] = res.duration().count();
  j["duration_ms"] = analysis::format_ms(res.duration());
  j["existing_model_ms"] = analysis::format_ms(existing);
  std::ostringstream pct;
  pct << std::fixed << std::setprecision(2) << 100.0 * ratio;
  j["ratio_to_existing_percent"] = pct.str();
  auto anomalies = nlohmann::ordered_json::array();
  for (const auto& a : fleet.server().anomaly_log())
    anomalies.push_back({{"kind", std::string(to_string(a.kind))}, {"detail", a.detail}});
  j["anomalies"] = anomalies;

  write_file(out_dir / "auth_summary.json", j.dump(2) + "\n");
  write_file(out_dir / "auth_trace.csv", trace_csv(bus));

  log << "frames on bus: " << res.frames << " (4n = " << 4 * n << ")\n"
      << "authenticated: " << res.authenticated.size() << "/" << n << "\n"
      << "duration: " << analysis::format_ms(res.duration()) << " ms (existing framework: "
      << analysis::format_ms(existing) << " ms, ratio " << pct.str() << "%)\n";
  for (auto id : failed) log << "node " << id << " FAILED authentication\n";
  return failed.empty() ? kOk : kAuthFailure;
}

inline int cmd_attack(const ScenarioConfig& cfg, const fs::path& enrollment, const fs::path& out_dir,
                      std::ostream& log) {
  if (!cfg.attack) throw Error(Errc::UnknownStrategy, "config has no attack section (use --strategy)");
  const EnrollmentDb db = read_enrollment(enrollment);
  Bus bus(cfg.frame_kind, cfg.speed);
  const AttackReport rep = run_attack(cfg, &db, bus);

  nlohmann::ordered_json j;
  j["strategy"] = std::string(to_string(rep.strategy));
  nlohmann::ordered_json flags;
  for (const auto& [k, v] : rep.flags) flags[k] = v;
  j["flags"] = flags;
  j["frames_observed"] = rep.frames_observed;
  j["notes"] = rep.notes;
  write_file(out_dir / "attack_report.json", j.dump(2) + "\n");
  write_file(out_dir / "attack_trace.csv", trace_csv(bus));

  log << "attack: " << to_string(rep.strategy) << "\n";
  for (const auto& [k, v] : rep.flags) log << "  " << k << " = " << (v ? "true" : "false") << "\n";
  for (const auto& note : rep.notes) log << "  note: " << note << "\n";
  return kOk;
}

inline int cmd_analyze(std::span<const std::uint64_t> ns, std::span<const BusSpeed> speeds,
                       std::span<const FrameKind> kinds, const fs::path& out_dir, bool golden, std::ostream& log) {
  if (ns.empty() || speeds.empty() || kinds.empty()) {
    throw Error(Errc::ConfigInvalid, "analyze needs at least one ECU count, speed and frame kind");
  }
  const auto report = analysis::sweep(ns, speeds, kinds);
  std::ostringstream csv;
  analysis::write_csv(csv, report);
  write_file(out_dir / "sweep.csv", csv.str());
  for (auto k : kinds) {
    std::ostringstream dat;
    analysis::write_plot_table(dat, report, k);
    write_file(out_dir / ("auth_overhead_" + std::string(to_string(k)) + ".dat"), dat.str());
  }
  log << "wrote " << report.rows.size() << " rows to " << (out_dir / "sweep.csv").string() << "\n";

  if (!golden) return kOk;
  bool ok = true;
  std::size_t exact = 0;
  const auto results = analysis::golden_check();
  for (const auto& r : results) {
    const char* verdict = r.exact ? "PASS" : (r.within_tolerance ? "PASS (flagged: printed value off by rounding)" : "FAIL");
    log << "golden " << to_string(r.cell.speed) << "/" << to_string(r.cell.kind) << " "
        << to_string(r.cell.framework) << " n=" << r.cell.n_ecus << ": computed "
        << analysis::format_ms(r.computed) << " ms, printed " << r.cell.printed << " ms " << verdict << "\n";
    exact += r.exact;
    ok = ok && r.within_tolerance;
  }
  log << "golden: " << results.size() << " cells, " << exact << " exact at printed precision, "
      << results.size() - exact << " flagged, " << (ok ? "all within 0.002 ms" : "MISMATCH") << "\n";
  return ok ? kOk : kGoldenMismatch;
}

}  // namespace pufcan::cli

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pufcan/cli/commands.hpp"

using namespace pufcan;

namespace {

template <class T, class Parse>
std::vector<T> parse_list(const std::vector<std::string>& names, Parse parse, const char* what) {
  std::vector<T> out;
  for (const auto& n : names) {
    auto v = parse(n);
    if (!v) throw Error(Errc::ConfigInvalid, std::string("unknown ") + what + " '" + n + "'");
    out.push_back(*v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PUF-based CAN bus authentication simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::string enrollment;
  std::string strategy;
  bool golden = false;
  std::vector<std::uint64_t> ns = {5, 10, 15, 20, 25};
  std::vector<std::string> speed_names = {"high", "low"};
  std::vector<std::string> kind_names = {"standard", "extended"};

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "scenario config (JSON)");
    sub->add_option("--seed", seed, "override master_seed");
    sub->add_option("--out", out_dir, "output directory");
  };
  auto* enroll = app.add_subcommand("enroll", "run the enrollment phase and export the database");
  common(enroll);
  auto* auth = app.add_subcommand("authenticate", "run one authentication session on the simulated bus");
  common(auth);
  auth->add_option("--enrollment", enrollment, "enrollment file (default: <out>/enrollment.json)");
  auto* attack = app.add_subcommand("attack", "run an attack scenario against an authenticated fleet");
  common(attack);
  attack->add_option("--enrollment", enrollment, "enrollment file (default: <out>/enrollment.json)");
  attack->add_option("--strategy", strategy, "eavesdrop | replay | inject | flood (overrides config)");
  auto* analyze = app.add_subcommand("analyze", "closed-form overhead sweep");
  common(analyze);
  analyze->add_option("--n", ns, "ECU counts")->delimiter(',');
  analyze->add_option("--speeds", speed_names, "bus speeds")->delimiter(',');
  analyze->add_option("--kinds", kind_names, "frame kinds")->delimiter(',');
  analyze->add_flag("--golden", golden, "check against the published transmission-time table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kConfigError;
  }

  try {
    cli::ScenarioConfig cfg = config_path.empty() ? cli::ScenarioConfig{} : cli::load_config(config_path);
    if (seed) cfg.master_seed = *seed;
    if (!strategy.empty()) {
      auto s = parse_attack_strategy(strategy);
      if (!s) throw Error(Errc::UnknownStrategy, strategy);
      if (!cfg.attack) cfg.attack = cli::AttackConfig{};
      cfg.attack->strategy = *s;
    }
    cli::validate(cfg);
    const cli::fs::path out(out_dir);
    const cli::fs::path enr = enrollment.empty() ? out / "enrollment.json" : cli::fs::path(enrollment);

    if (enroll->parsed()) return cli::cmd_enroll(cfg, out, std::cout);
    if (auth->parsed()) return cli::cmd_authenticate(cfg, enr, out, std::cout);
    if (attack->parsed()) return cli::cmd_attack(cfg, enr, out, std::cout);
    if (analyze->parsed()) {
      const auto speeds = parse_list<BusSpeed>(speed_names, [](const std::string& s) -> std::optional<BusSpeed> {
        if (s == "high") return BusSpeed::High;
        if (s == "low") return BusSpeed::Low;
        return std::nullopt;
      }, "speed");
      const auto kinds = parse_list<FrameKind>(kind_names, [](const std::string& s) -> std::optional<FrameKind> {
        if (s == "standard") return FrameKind::Standard;
        if (s == "extended") return FrameKind::Extended;
        return std::nullopt;
      }, "frame kind");
      return cli::cmd_analyze(ns, speeds, kinds, out, golden, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case Errc::ConfigInvalid:
      case Errc::UnknownStrategy:
      case Errc::EnrollmentFileMissing:
      case Errc::ParseError:
        return cli::kConfigError;
      default:
        return cli::kFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kFailure;
  }
  return cli::kFailure;
}

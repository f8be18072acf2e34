#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "popsync/analysis.hpp"
#include "popsync/config.hpp"
#include "popsync/report.hpp"
#include "popsync/simulator.hpp"
#include "popsync/version.hpp"

namespace popsync::cli {

namespace {

struct Options {
  std::string command;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

struct Context {
  RunConfig config;
  std::filesystem::path out_dir;
  unsigned threads = 0;
  std::ostream& out;
  std::ostream& err;
};

void print_thresholds(const CriticalSet& set, std::ostream& out) {
  if (set.empty()) {
    out << "no synchronization for any coupling strength\n";
    return;
  }
  out << "critical couplings:";
  for (const auto& s : set.solutions) out << ' ' << format_number(s.eta_star);
  out << '\n';
  out << "relevant negative: "
      << (set.relevant_negative ? format_number(*set.relevant_negative) : "none") << '\n';
  out << "relevant positive: "
      << (set.relevant_positive ? format_number(*set.relevant_positive) : "none") << '\n';
}

CriticalSet do_analyze(Context& ctx) {
  const auto outcome = analyze_system(ctx.config.system, ctx.config.scan_or_default());
  for (const auto& w : outcome.critical.warnings) ctx.err << "warning: " << w << '\n';
  if (outcome.closed_form)
    ctx.out << "identical populations: closed form"
            << (outcome.cross_checked ? " (scan agrees)" : " (scan disagrees)") << '\n';
  write_critical_csv(ctx.out_dir / "critical.csv",
                     critical_rows(outcome.critical, ctx.config.system));
  print_thresholds(outcome.critical, ctx.out);
  return outcome.critical;
}

SweepResult do_sweep(Context& ctx) {
  if (ctx.config.eta_grid.empty()) throw ConfigError("sweep needs an 'eta_grid'");
  auto result = sweep_eta(ctx.config.system, ctx.config.eta_grid, ctx.config.sim,
                          ctx.threads);
  write_sweep_csv(ctx.out_dir / "sweep.csv", result);
  ctx.out << "swept " << result.eta_values.size() << " coupling values\n";
  return result;
}

int do_simulate(Context& ctx) {
  const auto trial = run_trial(ctx.config.system, ctx.config.sim);
  std::ofstream csv(ctx.out_dir / "trial.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write trial.csv");
  csv << "# popsync version = " << kVersion << '\n'
      << "# eta = " << format_number(ctx.config.system.coupling.eta) << '\n'
      << "# seed = " << ctx.config.sim.seed << '\n'
      << "population,r_mean,r_std\n";
  for (std::size_t p = 0; p < trial.r_mean.size(); ++p) {
    csv << p + 1 << ',' << format_number(trial.r_mean[p]) << ','
        << format_number(trial.r_std[p]) << '\n';
    ctx.out << "population " << p + 1 << ": r_mean = " << format_number(trial.r_mean[p])
            << ", r_std = " << format_number(trial.r_std[p]) << '\n';
  }
  return kOk;
}

int do_verify(Context& ctx) {
  const CriticalSet predicted = do_analyze(ctx);
  const SweepResult sweep = do_sweep(ctx);
  const auto report = compare_onsets(predicted, sweep, ctx.config.verify);
  write_verify_csv(ctx.out_dir / "verify.csv", report);
  for (const auto& r : report.rows) {
    ctx.out << r.side << ": predicted "
            << (r.predicted ? format_number(*r.predicted) : std::string("none"))
            << ", detected "
            << (r.detected ? format_number(*r.detected) : std::string("none"))
            << (r.matched ? "  ok" : "  MISMATCH") << '\n';
  }
  if (report.vacuous) ctx.out << "vacuous: no predicted or detected onset\n";
  ctx.out << (report.passed ? "verify: pass" : "verify: FAIL") << '\n';
  return report.passed ? kOk : kMismatch;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Critical couplings and onset simulations for interacting "
               "populations of phase oscillators"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options opt;
  for (const char* name : {"analyze", "simulate", "sweep", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config_path, "JSON run configuration")->required();
    sub->add_option("--out", opt.out_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", opt.seed, "random seed (overrides sim.seed)");
    sub->add_option("--threads", opt.threads, "worker threads, 0 = all cores");
    sub->callback([&opt, name] { opt.command = name; });
  }
  app.get_subcommand("analyze")->description("predict critical couplings; writes critical.csv");
  app.get_subcommand("simulate")->description("single trial at coupling.eta; writes trial.csv");
  app.get_subcommand("sweep")->description("order parameters over eta_grid; writes sweep.csv");
  app.get_subcommand("verify")->description("analyze + sweep + onset comparison; writes verify.csv");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kConfigError;
  }

  std::optional<Context> ctx;
  try {
    RunConfig config = load_run_config(opt.config_path);
    if (opt.seed) config.sim.seed = *opt.seed;
    std::filesystem::path dir = opt.out_dir ? std::filesystem::path(*opt.out_dir) : config.output_dir;
    std::filesystem::create_directories(dir);
    ctx.emplace(Context{std::move(config), dir, opt.threads, out, err});
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (opt.command == "analyze") {
      do_analyze(*ctx);
      return kOk;
    }
    if (opt.command == "simulate") return do_simulate(*ctx);
    if (opt.command == "sweep") {
      do_sweep(*ctx);
      return kOk;
    }
    return do_verify(*ctx);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const AnalyzerError& e) {
    err << "analyzer error: " << e.what() << '\n';
    return kAnalyzerError;
  }
}

}  // namespace popsync::cli

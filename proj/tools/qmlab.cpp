#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qmlab/locality.hpp"
#include "qmlab/scenarios.hpp"
#include "qmlab/suites.hpp"

namespace {

using namespace qmlab;

constexpr int kExitPass = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

std::string structured(const Json& j) { return dump_text(j, 2) + "\n"; }

void print_suite_summary(const RunReport& r) {
  for (const auto& s : r.suites) {
    std::fprintf(stderr, "%-18s %s  trials=%d checks=%d failed=%d vacuous=%d worst=%s\n", s.suite.c_str(),
                 s.failed == 0 ? "PASS" : "FAIL", s.trials, s.checks, s.failed, s.vacuous,
                 format_double(s.worst_normalized_slack).c_str());
    for (const auto& f : s.failures)
      std::fprintf(stderr, "  failure %s seed=%llu normalized-slack=%s %s\n", f.proposition.c_str(),
                   static_cast<unsigned long long>(f.seed), format_double(f.normalized_slack()).c_str(),
                   f.note.c_str());
  }
}

void parse_tolerances(const std::vector<std::string>& items, SuiteConfig& cfg) {
  for (const auto& t : items) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("tolerance override must be id=value, got '" + t + "'");
    try {
      cfg.tolerance_overrides[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad tolerance value in '" + t + "'");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qmlab: executable checks for measurement bounds on finite operator algebras"};
  app.require_subcommand(1);

  std::string suite_text = "all", report_path, format = "structured", manifest, inject;
  std::optional<int> trials;
  std::uint64_t seed = 7;
  unsigned threads = 0;
  std::vector<std::string> tolerances;
  auto* verify = app.add_subcommand("verify", "run proposition suites on seeded random instances");
  verify->add_option("--suite", suite_text, "comma-separated suite ids or 'all'");
  verify->add_option("--trials", trials, "trials per suite (default: per-suite value)")->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", seed, "master seed");
  verify->add_option("--report", report_path, "write the report here instead of stdout");
  verify->add_option("--format", format, "structured or csv")->check(CLI::IsMember({"structured", "csv"}));
  verify->add_option("--manifest", manifest, "suite manifest file");
  verify->add_option("--threads", threads, "worker threads (0: all cores)");
  verify->add_option("--tolerance", tolerances, "proposition-id=value tolerance override");
  verify->add_option("--inject-bug", inject, "negate the right-hand sides of this suite (self-test)");

  std::string scenario_name, eps_text;
  std::optional<int> grid;
  auto* scenario = app.add_subcommand("scenario", "reproduce a named scenario");
  scenario->add_option("name", scenario_name, "scenario name")->required();
  scenario->add_option("--eps", eps_text, "eps grid a:b:step");
  scenario->add_option("--grid", grid, "grid size (davies)")->check(CLI::PositiveNumber);
  scenario->add_option("--report", report_path, "write the report here instead of stdout");
  scenario->add_option("--format", format, "structured or csv")->check(CLI::IsMember({"structured", "csv"}));
  scenario->add_option("--seed", seed, "seed for randomized parts");

  auto* curve = app.add_subcommand("sigma-curve", "quality, hpdelta bound and reduction gap over an eps grid");
  curve->add_option("--eps", eps_text, "eps grid a:b:step")->required();
  std::string curve_format = "csv";
  curve->add_option("--format", curve_format, "csv or structured")->check(CLI::IsMember({"structured", "csv"}));
  curve->add_option("--report", report_path, "write the table here instead of stdout");

  std::string chain_config;
  auto* chain = app.add_subcommand("chain", "run the coherence bound on a spin-chain configuration");
  chain->add_option("--config", chain_config, "chain configuration file")->required();
  chain->add_option("--report", report_path, "write the report here instead of stdout");

  std::string replay_suite;
  std::uint64_t replay_seed = 0;
  auto* replay = app.add_subcommand("replay", "re-run one failing trial from its suite id and trial seed");
  replay->add_option("--suite", replay_suite, "suite id")->required();
  replay->add_option("--seed", replay_seed, "trial seed from a failure record")->required();
  replay->add_option("--manifest", manifest, "manifest with the shape menus of the original run");

  app.add_subcommand("list", "list suite ids and scenario names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*verify) {
      SuiteConfig cfg = manifest.empty() ? default_suite_config() : suite_config_from_text(read_file(manifest));
      if (manifest.empty() || verify->count("--suite")) cfg.suites = parse_suite_list(suite_text);
      if (verify->count("--seed") || manifest.empty()) cfg.seed = seed;
      if (trials) cfg.trials = trials;
      if (verify->count("--threads")) cfg.threads = threads;
      parse_tolerances(tolerances, cfg);
      cfg.inject_bug = inject;
      const RunReport r = run_suite(cfg);
      emit(format == "csv" ? run_report_csv(r) : structured(run_report_to_json(r)), report_path);
      print_suite_summary(r);
      return r.pass() ? kExitPass : kExitFailure;
    }
    if (*scenario) {
      ScenarioOptions opts;
      if (!eps_text.empty()) opts.eps = parse_eps_grid(eps_text);
      opts.grid = grid;
      opts.seed = seed;
      const ScenarioResult r = run_scenario(scenario_name, opts);
      emit(format == "csv" ? scenario_to_csv(r) : structured(scenario_to_json(r)), report_path);
      for (const auto& item : r.items)
        if (!item.pass)
          std::fprintf(stderr, "failed %s: %s\n", item.proposition.c_str(), item.note.c_str());
      std::fprintf(stderr, "%s %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL");
      return r.pass ? kExitPass : kExitFailure;
    }
    if (*curve) {
      const std::vector<SigmaRow> rows = sigma_curve(parse_eps_grid(eps_text).values());
      if (curve_format == "csv") {
        emit(sigma_curve_csv(rows), report_path);
      } else {
        Json t = Json::array();
        for (const auto& r : rows)
          t.push_back({{"eps", r.eps},
                       {"sigma", r.sigma},
                       {"sigma-closed-form", r.closed_form},
                       {"hpdelta-rhs", r.hpdelta_rhs},
                       {"reduction-gap", r.reduction_gap}});
        emit(structured(t), report_path);
      }
      return kExitPass;
    }
    if (*chain) {
      const ChainConfig cfg = chain_config_from_text(read_file(chain_config));
      const std::vector<BoundReport> reps = run_chain(cfg);
      Json j = Json::array();
      bool ok = true;
      for (const auto& r : reps) {
        j.push_back(report_to_json(r));
        ok = ok && r.pass;
      }
      emit(structured(j), report_path);
      return ok ? kExitPass : kExitFailure;
    }
    if (*replay) {
      const SuiteConfig cfg = manifest.empty() ? default_suite_config() : suite_config_from_text(read_file(manifest));
      const std::vector<BoundReport> reps = run_trial(replay_suite, replay_seed, cfg);
      Json j = Json::array();
      bool ok = true;
      for (const auto& r : reps) {
        j.push_back(report_to_json(r));
        ok = ok && r.pass;
      }
      emit(structured(j), "");
      return ok ? kExitPass : kExitFailure;
    }
    for (const auto& id : suite_ids()) std::cout << "suite " << id << " (" << default_trials(id) << " trials)\n";
    for (const auto& name : scenario_names()) std::cout << "scenario " << name << "\n";
    return kExitPass;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "argument error: %s\n", e.what());
  } catch (const SizeGuardError& e) {
    std::fprintf(stderr, "size guard: %s\n", e.what());
  } catch (const ShapeError& e) {
    std::fprintf(stderr, "shape error: %s\n", e.what());
  } catch (const DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
  }
  return kExitUsage;
}

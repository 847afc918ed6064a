#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcbo/harness.hpp"
#include "qcbo/scenario.hpp"

namespace {

qcbo::ScenarioConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw qcbo::ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw qcbo::ConfigError("config parse error in " + path + ": " + e.what());
  }
  return qcbo::ScenarioConfig::from_json(j);
}

void apply_overrides(qcbo::ScenarioConfig& c, bool has_seed, std::uint64_t seed, int workers,
                     const std::string& out) {
  if (has_seed) c.seed = seed;
  if (workers > 0) c.workers = workers;
  if (!out.empty()) c.output_dir = out;
  c.validate();
}

int run_and_report(const qcbo::ScenarioConfig& c) {
  auto result = qcbo::run_scenario(c);
  std::cout << "runs: " << c.repeats << "  evals/run: " << c.total_evals() << "\n";
  std::cout << "final " << result.summary.metric << " median: "
            << qcbo::fmt_g17(result.summary.med.back()) << "\n";
  std::cout << "artifacts: " << result.out_dir.string() << "\n";
  return 0;
}

std::vector<double> parse_theta(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw qcbo::ConfigError("--theta: cannot parse \"" + tok + "\"");
    }
  }
  if (out.empty()) throw qcbo::ConfigError("--theta: empty list");
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw qcbo::ConfigError("cannot open " + path + " for writing");
  return os;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian optimization of quantum control protocols"};
  app.require_subcommand(1);

  std::string config_path, preset_name, out_path, system_name, theta_csv, kind;
  std::uint64_t seed = 0;
  int workers = 0, levels = 0, grid = 0;
  double time_factor = 1.0;

  auto* optimize = app.add_subcommand("optimize", "run a scenario from a JSON config");
  optimize->add_option("--config", config_path, "scenario config file")->required();
  auto* opt_seed = optimize->add_option("--seed", seed, "override base seed");
  optimize->add_option("--workers", workers, "override worker thread count");
  optimize->add_option("--out", out_path, "override output directory");

  auto* benchmark = app.add_subcommand("benchmark", "run a named preset scenario");
  benchmark->add_option("--preset", preset_name, "preset name (see `presets`)")->required();
  auto* bm_seed = benchmark->add_option("--seed", seed, "override base seed");
  benchmark->add_option("--workers", workers, "override worker thread count");
  benchmark->add_option("--out", out_path, "override output directory");

  auto* presets = app.add_subcommand("presets", "list preset scenarios");

  auto* spectrum = app.add_subcommand("spectrum", "write an energy-spectrum CSV");
  spectrum->add_option("--system", system_name, "bose-hubbard or rydberg-{1d,2d,3d}")->required();
  spectrum->add_option("--out", out_path, "output CSV path")->required();
  spectrum->add_option("--levels", levels, "number of levels");
  spectrum->add_option("--grid", grid, "number of grid points");

  auto* exp = app.add_subcommand("export", "write figure-ready protocol data");
  exp->add_option("--kind", kind, "ramp | pulse | populations | site-probs")->required();
  exp->add_option("--theta", theta_csv, "comma-separated protocol parameters")->required();
  exp->add_option("--out", out_path, "output path")->required();
  exp->add_option("--system", system_name, "rydberg system for site-probs");
  exp->add_option("--time-factor", time_factor, "ramp duration multiple of the speed limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (optimize->parsed()) {
      auto c = load_config(config_path);
      apply_overrides(c, !opt_seed->empty(), seed, workers, out_path);
      return run_and_report(c);
    }
    if (benchmark->parsed()) {
      auto c = qcbo::preset_config(preset_name);
      if (out_path.empty()) out_path = "out/" + preset_name;
      apply_overrides(c, !bm_seed->empty(), seed, workers, out_path);
      return run_and_report(c);
    }
    if (presets->parsed()) {
      for (const auto& p : qcbo::preset_list()) {
        std::printf("%-18s %s\n", p.name.c_str(), p.note.c_str());
        auto c = qcbo::preset_config(p.name);
        std::printf("%-18s   n_init=%d m_iters=%d acquisition=%s repeats=%d\n", "", c.bo.n_init,
                    c.bo.m_iters, c.bo.acquisition.c_str(), c.repeats);
      }
      return 0;
    }
    if (spectrum->parsed()) {
      auto os = open_out(out_path);
      if (system_name == "bose-hubbard")
        qcbo::export_bh_spectrum(os, levels > 0 ? levels : 6, grid > 0 ? grid : 201);
      else
        qcbo::export_ryd_spectrum(os, system_name, levels > 0 ? levels : 8,
                                  grid > 0 ? grid : 201);
      return 0;
    }
    if (exp->parsed()) {
      auto theta = parse_theta(theta_csv);
      if (kind == "ramp") {
        auto task = qcbo::make_bh_task(5, 5, time_factor);
        auto os = open_out(out_path);
        qcbo::export_ramp_csv(os, qcbo::RampSpec::from_vector(theta, task->total_time));
      } else if (kind == "pulse") {
        auto os = open_out(out_path);
        qcbo::export_pulse_csv(os, qcbo::PulseSpec::from_vector(theta));
      } else if (kind == "populations") {
        auto task = qcbo::make_bh_task(5, 5, time_factor);
        auto os = open_out(out_path);
        qcbo::export_bh_populations(os, *task, theta);
      } else if (kind == "site-probs") {
        if (system_name.empty()) throw qcbo::ConfigError("site-probs needs --system");
        auto j = qcbo::export_site_probs(system_name, theta);
        auto os = open_out(out_path);
        os << j.dump(2) << "\n";
      } else {
        throw qcbo::ConfigError("unknown export kind \"" + kind + "\"");
      }
      return 0;
    }
  } catch (const qcbo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

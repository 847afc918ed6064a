#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qcbo/harness.hpp"
#include "qcbo/scenario.hpp"
#include "qcbo/sha1.hpp"
#include "qcbo/stats.hpp"

using Catch::Approx;
using namespace qcbo;
namespace fs = std::filesystem;

namespace {

nlohmann::json tiny_bh_config() {
  return nlohmann::json{{"system", "bose-hubbard"}, {"fom", "fidelity"},
                        {"optimizer", "random"},    {"budget", 6},
                        {"repeats", 3},             {"seed", 11},
                        {"substeps", 120}};
}

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "qcbo_test" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// Drops the trailing wall_s column; timing is the one honest nondeterminism
// in a run trace.
std::string strip_wall(const std::string& csv) {
  std::istringstream is(csv);
  std::ostringstream os;
  std::string line;
  while (std::getline(is, line)) {
    auto cut = line.rfind(',');
    os << line.substr(0, cut) << '\n';
  }
  return os.str();
}

}  // namespace

TEST_CASE("sha1 matches published vectors") {
  auto hex = [](const std::string& s) {
    Sha1 h;
    h.update(s);
    return h.hex_digest();
  };
  CHECK(hex("") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
  CHECK(hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
  CHECK(hex("The quick brown fox jumps over the lazy dog") ==
        "2fd4e1c67a2d28fced849ee1bb76e7391b93eb12");
}

TEST_CASE("content hashing uses blob framing") {
  CHECK(content_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(content_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("quantiles interpolate linearly between order statistics") {
  std::vector<double> v{1, 2, 3, 4, 5};
  CHECK(quantile(v, 0.25) == 2.0);
  CHECK(quantile(v, 0.5) == 3.0);
  CHECK(quantile(v, 1.0) == 5.0);
  std::vector<double> w{4, 1, 3, 2};
  CHECK(quantile(w, 0.25) == Approx(1.75).margin(1e-15));
  CHECK(quantile(w, 0.5) == Approx(2.5).margin(1e-15));
  CHECK(quantile(w, 0.75) == Approx(3.25).margin(1e-15));
  std::vector<double> u{3, 1, 4, 1, 5, 9, 2, 6};
  CHECK(quantile(u, 0.5) == Approx(3.5).margin(1e-15));
  CHECK(quantile(u, 0.25) == Approx(1.75).margin(1e-15));
}

TEST_CASE("config parsing fills defaults and echoes budgets exactly") {
  auto c = ScenarioConfig::from_json(tiny_bh_config());
  CHECK(c.system == "bose-hubbard");
  CHECK(c.total_evals() == 6);
  CHECK(c.substeps == 120);
  CHECK(c.protocol_time_factor == 1.0);
  auto j = c.to_json();
  CHECK(j.at("budget") == 6);
  CHECK_FALSE(j.contains("bo"));
  CHECK_FALSE(j.contains("output_dir"));
}

TEST_CASE("unknown keys are rejected at every level") {
  auto j = tiny_bh_config();
  j["surprise"] = 1;
  CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);

  nlohmann::json b{{"system", "bose-hubbard"},
                   {"fom", "fidelity"},
                   {"optimizer", "bo"},
                   {"bo", {{"n_init", 4}, {"m_iters", 4}, {"typo_key", 1}}}};
  CHECK_THROWS_AS(ScenarioConfig::from_json(b), ConfigError);
}

TEST_CASE("type errors and bad combinations are config errors") {
  auto j = tiny_bh_config();
  j["budget"] = "many";
  CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);

  nlohmann::json wrong_system{{"system", "rydberg-1d"}, {"fom", "fidelity"},
                              {"optimizer", "random"},  {"budget", 5}};
  CHECK_THROWS_AS(ScenarioConfig::from_json(wrong_system), ConfigError);

  nlohmann::json fexp_on_ryd{{"system", "rydberg-1d"}, {"fom", "fexp"},
                             {"optimizer", "random"},  {"budget", 5}};
  CHECK_THROWS_AS(ScenarioConfig::from_json(fexp_on_ryd), ConfigError);

  nlohmann::json manifold_on_bh{{"system", "bose-hubbard"}, {"fom", "manifold"},
                                {"optimizer", "random"},    {"budget", 5}};
  CHECK_THROWS_AS(ScenarioConfig::from_json(manifold_on_bh), ConfigError);

  nlohmann::json ramp_key_on_ryd{{"system", "rydberg-1d"}, {"fom", "manifold"},
                                 {"optimizer", "random"},  {"budget", 5},
                                 {"protocol_time_factor", 2.0}};
  CHECK_THROWS_AS(ScenarioConfig::from_json(ramp_key_on_ryd), ConfigError);

  nlohmann::json noise_on_manifold{{"system", "rydberg-1d"}, {"fom", "manifold"},
                                   {"optimizer", "random"},  {"budget", 5},
                                   {"fill_prob", 0.9}};
  CHECK_THROWS_AS(ScenarioConfig::from_json(noise_on_manifold), ConfigError);

  nlohmann::json budget_with_bo{{"system", "bose-hubbard"},
                                {"fom", "fidelity"},
                                {"optimizer", "bo"},
                                {"budget", 10},
                                {"bo", {{"n_init", 4}, {"m_iters", 4}}}};
  CHECK_THROWS_AS(ScenarioConfig::from_json(budget_with_bo), ConfigError);

  nlohmann::json k_for_ei{{"system", "bose-hubbard"},
                          {"fom", "fidelity"},
                          {"optimizer", "bo"},
                          {"bo", {{"n_init", 4}, {"m_iters", 4}, {"acquisition", "ei"},
                                  {"ucb_k_start", 3.0}}}};
  CHECK_THROWS_AS(ScenarioConfig::from_json(k_for_ei), ConfigError);

  nlohmann::json shots_without_fexp = tiny_bh_config();
  shots_without_fexp["fexp_shots"] = 100;
  CHECK_THROWS_AS(ScenarioConfig::from_json(shots_without_fexp), ConfigError);
}

TEST_CASE("presets all validate and pin their budgets") {
  for (const auto& info : preset_list()) {
    auto c = preset_config(info.name);
    CHECK(c.optimizer == "bo");
  }
  auto bench = preset_config("bh-benchmark");
  CHECK(bench.bo.n_init == 100);
  CHECK(bench.bo.m_iters == 1750);
  CHECK(bench.bo.refit_every == 10);
  CHECK(bench.bo.acquisition == "ucb");
  CHECK(bench.bo.ucb_k_start == 5.0);
  CHECK(bench.bo.ucb_k_end == 0.0);
  CHECK(bench.repeats == 10);

  auto noiseless = preset_config("rydberg-1d");
  CHECK(noiseless.bo.n_init == 24);
  CHECK(noiseless.bo.m_iters == 10);
  CHECK(noiseless.bo.acquisition == "ei");
  CHECK(noiseless.effective_target() == 5);
  CHECK(preset_config("rydberg-3d").effective_target() == 4);

  auto noisy = preset_config("rydberg-1d-noisy");
  CHECK(noisy.bo.n_init == 6);
  CHECK(noisy.bo.m_iters == 50);
  CHECK(noisy.fill_prob == 0.9);
  CHECK(noisy.detection_prob == 0.9);
  CHECK(noisy.pulse_noise_sigma == 0.05);

  CHECK_THROWS_AS(preset_config("nope"), ConfigError);
}

TEST_CASE("metric transforms follow the figure conventions") {
  CHECK(fom_metric("fidelity") == "infidelity");
  CHECK(fom_metric("manifold") == "infidelity");
  CHECK(fom_metric("fexp") == "fexp");
  CHECK(fom_metric("detected-count") == "detected-count");
  CHECK(metric_of_best("fidelity", 0.8) == Approx(0.2).margin(1e-15));
  CHECK(metric_of_best("fexp", 0.8) == 0.8);
  CHECK(fom_sense("fexp") == Sense::minimize);
  CHECK(fom_sense("fidelity") == Sense::maximize);
  CHECK(fom_sense("detected-count") == Sense::maximize);
}

TEST_CASE("summaries hold per-iteration quartiles of best-so-far") {
  OptimizationTrace a, b, c;
  auto push = [](OptimizationTrace& t, std::initializer_list<double> foms) {
    TraceBuilder builder(Sense::maximize, static_cast<int>(foms.size()));
    for (double f : foms) builder.record({0.0}, f, 0.0);
    t = builder.take();
  };
  push(a, {0.5, 0.7});
  push(b, {0.6, 0.6});
  push(c, {0.9, 0.1});
  auto s = summarize_traces({a, b, c}, "fidelity");
  REQUIRE(s.iters.size() == 2);
  CHECK(s.metric == "infidelity");
  // Infidelities after one eval: {0.5, 0.4, 0.1}; after two: {0.3, 0.4, 0.1}.
  CHECK(s.med[0] == Approx(0.4).margin(1e-12));
  CHECK(s.med[1] == Approx(0.3).margin(1e-12));
  CHECK(s.q1[0] <= s.med[0]);
  CHECK(s.med[0] <= s.q3[0]);

  OptimizationTrace ragged;
  push(ragged, {0.5});
  CHECK_THROWS_AS(summarize_traces({a, ragged}, "fidelity"), std::invalid_argument);
  CHECK_THROWS_AS(summarize_traces({}, "fidelity"), std::invalid_argument);
}

TEST_CASE("trace csv serialization is stable") {
  TraceBuilder builder(Sense::maximize, 2);
  builder.record({0.25, 0.5}, 0.125, 1.5);
  builder.record({1.0, 0.75}, 0.5, 2.5);
  std::ostringstream os;
  write_trace_csv(os, builder.take());
  CHECK(os.str() ==
        "iter,theta_1,theta_2,fom,best_so_far,wall_s\n"
        "1,0.25,0.5,0.125,0.125,1.5\n"
        "2,1,0.75,0.5,0.5,2.5\n");
}

TEST_CASE("running a scenario writes traces, summary and manifest") {
  auto c = ScenarioConfig::from_json(tiny_bh_config());
  fs::path dir = fresh_dir("basic");
  c.output_dir = dir.string();
  auto result = run_scenario(c);
  CHECK(fs::exists(dir / "run_0.csv"));
  CHECK(fs::exists(dir / "run_2.csv"));
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK_FALSE(fs::exists(dir / "run_3.csv"));

  REQUIRE(result.traces.size() == 3);
  for (const auto& t : result.traces) CHECK(t.records.size() == 6);

  auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest.at("runs") == 3);
  CHECK(manifest.at("metric") == "infidelity");
  CHECK(manifest.at("summary_hash") == content_hash(slurp(dir / "summary.csv")));
  CHECK(manifest.at("config_hash") ==
        content_hash(c.to_json().dump(2) + "\n"));

  // Summary rows: header plus one per evaluation.
  std::istringstream rows(slurp(dir / "summary.csv"));
  std::string line;
  int count = 0;
  while (std::getline(rows, line)) ++count;
  CHECK(count == 7);
}

TEST_CASE("identical scenarios reproduce byte-identical artifacts") {
  auto c = ScenarioConfig::from_json(tiny_bh_config());
  fs::path d1 = fresh_dir("repro_a"), d2 = fresh_dir("repro_b");
  c.output_dir = d1.string();
  run_scenario(c);
  c.output_dir = d2.string();
  c.workers = 3;
  run_scenario(c);
  CHECK(slurp(d1 / "summary.csv") == slurp(d2 / "summary.csv"));
  CHECK(slurp(d1 / "manifest.json") == slurp(d2 / "manifest.json"));
  CHECK(strip_wall(slurp(d1 / "run_1.csv")) == strip_wall(slurp(d2 / "run_1.csv")));
}

TEST_CASE("changing the seed changes the results but not the schema") {
  auto c = ScenarioConfig::from_json(tiny_bh_config());
  fs::path d1 = fresh_dir("seed_a"), d2 = fresh_dir("seed_b");
  c.output_dir = d1.string();
  run_scenario(c);
  auto c2 = c;
  c2.seed = 12;
  c2.output_dir = d2.string();
  run_scenario(c2);
  CHECK(slurp(d1 / "summary.csv") != slurp(d2 / "summary.csv"));
  auto m1 = nlohmann::json::parse(slurp(d1 / "manifest.json"));
  auto m2 = nlohmann::json::parse(slurp(d2 / "manifest.json"));
  CHECK(m1.at("config_hash") != m2.at("config_hash"));
}

TEST_CASE("per-run seeds offset from the base seed") {
  auto c = ScenarioConfig::from_json(tiny_bh_config());
  fs::path d1 = fresh_dir("offset_a"), d2 = fresh_dir("offset_b");
  c.repeats = 3;
  c.output_dir = d1.string();
  run_scenario(c);
  auto c2 = c;
  c2.seed = c.seed + 1;
  c2.repeats = 2;
  c2.output_dir = d2.string();
  run_scenario(c2);
  // Run i of the shifted scenario is run i+1 of the original.
  CHECK(strip_wall(slurp(d1 / "run_1.csv")) == strip_wall(slurp(d2 / "run_0.csv")));
}

TEST_CASE("unwritable output locations fail before any computation") {
  auto c = ScenarioConfig::from_json(tiny_bh_config());
  c.output_dir = "/proc/qcbo_cannot_write_here/out";
  CHECK_THROWS_AS(run_scenario(c), ConfigError);
}

TEST_CASE("every optimizer dispatches and honors the budget") {
  for (const std::string& name : {"random", "spsa", "nm", "de"}) {
    auto j = tiny_bh_config();
    j["optimizer"] = name;
    j["repeats"] = 1;
    auto c = ScenarioConfig::from_json(j);
    c.output_dir = fresh_dir("disp_" + name).string();
    auto result = run_scenario(c);
    CHECK(result.traces.front().records.size() == 6);
  }
  nlohmann::json bo_j{{"system", "bose-hubbard"},
                      {"fom", "fidelity"},
                      {"optimizer", "bo"},
                      {"bo", {{"n_init", 3}, {"m_iters", 2}}},
                      {"repeats", 1},
                      {"substeps", 120}};
  auto c = ScenarioConfig::from_json(bo_j);
  c.output_dir = fresh_dir("disp_bo").string();
  auto result = run_scenario(c);
  CHECK(result.traces.front().records.size() == 5);
}

TEST_CASE("the shot-noise objective draws fresh noise every evaluation") {
  nlohmann::json j{{"system", "bose-hubbard"}, {"fom", "fexp"},   {"optimizer", "random"},
                   {"budget", 4},              {"repeats", 1},    {"seed", 3},
                   {"fexp_shots", 50},         {"substeps", 120}};
  auto c = ScenarioConfig::from_json(j);
  c.output_dir = fresh_dir("fexp").string();
  auto result = run_scenario(c);
  CHECK(result.summary.metric == "fexp");
  CHECK(result.traces.front().sense == Sense::minimize);
  for (const auto& r : result.traces.front().records) CHECK(r.fom >= 0.0);
}

TEST_CASE("figure exports produce well-formed tables") {
  std::ostringstream ramp_os;
  std::vector<double> knots(10, 0.0);
  for (int i = 1; i <= 9; ++i) knots[static_cast<std::size_t>(i - 1)] = i / 10.0;
  export_ramp_csv(ramp_os, RampSpec::from_vector(knots, 2.0), 11);
  std::istringstream ramp_in(ramp_os.str());
  std::string line;
  std::getline(ramp_in, line);
  CHECK(line == "t,gamma");
  int rows = 0;
  while (std::getline(ramp_in, line)) ++rows;
  CHECK(rows == 11);

  std::ostringstream pulse_os;
  export_pulse_csv(pulse_os, PulseSpec::from_vector({1e9, 2e9, 1e9, 0.0, 2e9, 0.0}), 5);
  std::istringstream pulse_in(pulse_os.str());
  std::getline(pulse_in, line);
  CHECK(line == "t,omega_hz,delta_hz");

  std::ostringstream spec_os;
  export_bh_spectrum(spec_os, 4, 5);
  std::istringstream spec_in(spec_os.str());
  std::getline(spec_in, line);
  CHECK(line == "gamma,e_1,e_2,e_3,e_4");
  rows = 0;
  while (std::getline(spec_in, line)) ++rows;
  CHECK(rows == 5);

  std::ostringstream ryd_os;
  export_ryd_spectrum(ryd_os, "rydberg-3d", 3, 4);
  std::istringstream ryd_in(ryd_os.str());
  std::getline(ryd_in, line);
  CHECK(line == "delta_hz,e_1,e_2,e_3");
}

TEST_CASE("statistics helpers reject degenerate input") {
  CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(quantile({1.0}, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(sample_variance({1.0}), std::invalid_argument);
  CHECK(mean({1.0, 2.0, 3.0}) == 2.0);
  CHECK(sample_variance({1.0, 2.0, 3.0}) == Approx(1.0).margin(1e-15));
}

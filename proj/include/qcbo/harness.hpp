#pragma once

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcbo/objectives.hpp"
#include "qcbo/scenario.hpp"
#include "qcbo/sha1.hpp"
#include "qcbo/stats.hpp"
#include "qcbo/trace.hpp"

namespace qcbo {

inline Sense fom_sense(const std::string& fom) {
  return fom == "fexp" ? Sense::minimize : Sense::maximize;
}

// Name of the quantity reported in summaries; fidelity-like FoMs are reported
// as infidelity so every metric improves downward except detected counts.
inline std::string fom_metric(const std::string& fom) {
  if (fom == "fidelity" || fom == "manifold") return "infidelity";
  return fom;
}

inline double metric_of_best(const std::string& fom, double best) {
  if (fom == "fidelity" || fom == "manifold") return 1.0 - best;
  return best;
}

struct BenchmarkSummary {
  std::string metric;
  std::vector<int> iters;
  std::vector<double> q1, med, q3;
};

inline BenchmarkSummary summarize_traces(const std::vector<OptimizationTrace>& traces,
                                         const std::string& fom) {
  if (traces.empty()) throw std::invalid_argument("summary: no traces");
  std::size_t n = traces.front().records.size();
  for (const auto& t : traces)
    if (t.records.size() != n) throw std::invalid_argument("summary: ragged traces");
  BenchmarkSummary s;
  s.metric = fom_metric(fom);
  std::vector<double> col(traces.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < traces.size(); ++r)
      col[r] = metric_of_best(fom, traces[r].records[i].best_so_far);
    s.iters.push_back(static_cast<int>(i) + 1);
    s.q1.push_back(quantile(col, 0.25));
    s.med.push_back(quantile(col, 0.5));
    s.q3.push_back(quantile(col, 0.75));
  }
  return s;
}

inline std::string summary_to_csv(const BenchmarkSummary& s) {
  std::ostringstream os;
  os << "iter,q1,median,q3\n";
  for (std::size_t i = 0; i < s.iters.size(); ++i)
    os << s.iters[i] << ',' << fmt_g17(s.q1[i]) << ',' << fmt_g17(s.med[i]) << ','
       << fmt_g17(s.q3[i]) << '\n';
  return os.str();
}

namespace detail {

struct TaskBundle {
  std::shared_ptr<BhTask> bh;
  std::shared_ptr<RydTask> ryd;
  Box bounds;
};

inline ryd::Lattice lattice_for(const std::string& system) {
  if (system == "rydberg-1d") return ryd::Lattice::chain(9);
  if (system == "rydberg-2d") return ryd::Lattice::square3x3();
  if (system == "rydberg-3d") return ryd::Lattice::cube2x2x2();
  throw ConfigError("config: unknown system \"" + system + "\"");
}

inline TaskBundle build_task(const ScenarioConfig& c) {
  TaskBundle b;
  if (c.system == "bose-hubbard") {
    b.bh = make_bh_task(5, 5, c.protocol_time_factor, c.substeps);
    b.bounds = bh_bounds();
  } else {
    ryd::RydbergParams params;
    params.detection_prob = c.detection_prob;
    params.fill_prob = c.fill_prob;
    b.ryd = make_ryd_task(lattice_for(c.system), params, c.effective_target(), c.tolerance);
    b.bounds = ryd_bounds();
  }
  return b;
}

inline Objective build_objective(const ScenarioConfig& c, const TaskBundle& b,
                                 std::uint64_t run_seed) {
  if (c.fom == "fidelity") return bh_fidelity_objective(b.bh);
  if (c.fom == "fexp")
    return bh_fexp_objective(b.bh, c.fexp_shots,
                             std::make_shared<Rng>(make_stream(run_seed, 21)));
  if (c.fom == "manifold") return ryd_manifold_objective(b.ryd);
  return ryd_detected_objective(b.ryd, c.pulse_noise_sigma,
                                std::make_shared<Rng>(make_stream(run_seed, 22)),
                                std::make_shared<Rng>(make_stream(run_seed, 23)));
}

inline OptimizationTrace run_single(const ScenarioConfig& c, const TaskBundle& b,
                                    std::uint64_t run_seed) {
  Objective obj = build_objective(c, b, run_seed);
  Sense sense = fom_sense(c.fom);
  if (c.optimizer == "bo") {
    BoConfig bc;
    bc.n_init = c.bo.n_init;
    bc.m_iters = c.bo.m_iters;
    bc.refit_every = c.bo.refit_every;
    bc.bounds = b.bounds;
    bc.acquisition.kind =
        c.bo.acquisition == "ei" ? AcquisitionSpec::Kind::ei : AcquisitionSpec::Kind::ucb;
    bc.acquisition.ucb_k_start = c.bo.ucb_k_start;
    bc.acquisition.ucb_k_end = c.bo.ucb_k_end;
    bc.seed = run_seed;
    return run_bo(obj, bc, sense);
  }
  if (c.optimizer == "spsa") return spsa(obj, SpsaConfig{}, b.bounds, c.budget, run_seed, sense);
  if (c.optimizer == "nm") return nelder_mead(obj, NmConfig{}, b.bounds, c.budget, run_seed, sense);
  if (c.optimizer == "de")
    return differential_evolution(obj, DeConfig{}, b.bounds, c.budget, run_seed, sense);
  return random_search(obj, b.bounds, c.budget, run_seed, sense);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  os << bytes;
  if (!os) throw ConfigError("failed writing " + path.string());
}

}  // namespace detail

struct ScenarioResult {
  std::vector<OptimizationTrace> traces;
  BenchmarkSummary summary;
  std::string summary_csv;
  nlohmann::json manifest;
  std::filesystem::path out_dir;
};

// Runs every repeat, writes run_<i>.csv, summary.csv and manifest.json into
// the output directory. Per-run seeds are seed + run index, so results do not
// depend on the worker count.
inline ScenarioResult run_scenario(const ScenarioConfig& c) {
  c.validate();
  std::filesystem::path out(c.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw ConfigError("cannot create output dir " + out.string() + ": " + ec.message());
  detail::write_text_file(out / ".write-probe", "ok\n");
  std::filesystem::remove(out / ".write-probe");

  detail::TaskBundle bundle = detail::build_task(c);

  std::vector<OptimizationTrace> traces(static_cast<std::size_t>(c.repeats));
  int workers = std::min(c.workers, c.repeats);
  if (workers <= 1) {
    for (int i = 0; i < c.repeats; ++i)
      traces[static_cast<std::size_t>(i)] =
          detail::run_single(c, bundle, c.seed + static_cast<std::uint64_t>(i));
  } else {
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= c.repeats) return;
        try {
          traces[static_cast<std::size_t>(i)] =
              detail::run_single(c, bundle, c.seed + static_cast<std::uint64_t>(i));
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  for (int i = 0; i < c.repeats; ++i) {
    std::ostringstream os;
    write_trace_csv(os, traces[static_cast<std::size_t>(i)]);
    detail::write_text_file(out / ("run_" + std::to_string(i) + ".csv"), os.str());
  }

  ScenarioResult result;
  result.traces = std::move(traces);
  result.summary = summarize_traces(result.traces, c.fom);
  result.summary_csv = summary_to_csv(result.summary);
  detail::write_text_file(out / "summary.csv", result.summary_csv);

  nlohmann::json config_echo = c.to_json();
  nlohmann::json m;
  m["config"] = config_echo;
  m["config_hash"] = content_hash(config_echo.dump(2) + "\n");
  m["metric"] = result.summary.metric;
  m["runs"] = c.repeats;
  m["summary_hash"] = content_hash(result.summary_csv);
  result.manifest = m;
  detail::write_text_file(out / "manifest.json", m.dump(2) + "\n");
  result.out_dir = out;
  return result;
}

// ---- figure-ready exports ----

inline void export_bh_spectrum(std::ostream& os, int levels = 6, int grid = 201) {
  if (levels < 1 || grid < 2) throw ConfigError("spectrum: need levels >= 1 and grid >= 2");
  auto basis = bh::build_basis(5, 5);
  auto h = bh::build_hamiltonian(basis, 0.0);
  levels = std::min(levels, h.dim());
  os << "gamma";
  for (int k = 1; k <= levels; ++k) os << ",e_" << k;
  os << '\n';
  for (int g = 0; g < grid; ++g) {
    double gamma = static_cast<double>(g) / (grid - 1);
    auto evals = bh::full_spectrum(bh::with_gamma(h, gamma));
    os << fmt_g17(gamma);
    for (int k = 0; k < levels; ++k) os << ',' << fmt_g17(evals[k]);
    os << '\n';
  }
}

inline void export_ryd_spectrum(std::ostream& os, const std::string& system, int levels = 8,
                                int grid = 201, double delta_lo = PulseBounds::delta_lo,
                                double delta_hi = PulseBounds::delta_hi) {
  if (levels < 1 || grid < 2) throw ConfigError("spectrum: need levels >= 1 and grid >= 2");
  auto lattice = detail::lattice_for(system);
  std::vector<double> deltas(static_cast<std::size_t>(grid));
  for (int g = 0; g < grid; ++g)
    deltas[static_cast<std::size_t>(g)] = delta_lo + (delta_hi - delta_lo) * g / (grid - 1);
  auto rows = ryd::zero_field_spectrum(lattice, deltas, ryd::RydbergParams{});
  levels = std::min<int>(levels, static_cast<int>(rows.front().size()));
  os << "delta_hz";
  for (int k = 1; k <= levels; ++k) os << ",e_" << k;
  os << '\n';
  for (int g = 0; g < grid; ++g) {
    os << fmt_g17(deltas[static_cast<std::size_t>(g)]);
    for (int k = 0; k < levels; ++k) os << ',' << fmt_g17(rows[static_cast<std::size_t>(g)][k]);
    os << '\n';
  }
}

inline void export_ramp_csv(std::ostream& os, const RampSpec& spec, int samples = 401) {
  if (samples < 2) throw ConfigError("export: need samples >= 2");
  Ramp ramp(spec);
  os << "t,gamma\n";
  for (int i = 0; i < samples; ++i) {
    double t = spec.total_time * i / (samples - 1);
    os << fmt_g17(t) << ',' << fmt_g17(ramp(t)) << '\n';
  }
}

inline void export_pulse_csv(std::ostream& os, const PulseSpec& pulse, int samples = 401) {
  if (samples < 2) throw ConfigError("export: need samples >= 2");
  os << "t,omega_hz,delta_hz\n";
  for (int i = 0; i < samples; ++i) {
    double t = pulse.total_time * i / (samples - 1);
    auto [omega, delta] = pulse(t);
    os << fmt_g17(t) << ',' << fmt_g17(omega) << ',' << fmt_g17(delta) << '\n';
  }
}

// Populations of the instantaneous eigenstates along a ramp, grouped into
// ground / first five excited / remainder.
inline void export_bh_populations(std::ostream& os, const BhTask& task,
                                  const std::vector<double>& knots, int samples = 41) {
  if (samples < 2) throw ConfigError("export: need samples >= 2");
  RampSpec spec = RampSpec::from_vector(knots, task.total_time);
  Ramp ramp(spec);
  os << "t,gamma,p_ground,p_low,p_rest\n";
  Eigen::VectorXcd psi = task.psi0;
  double t_prev = 0.0;
  int dim = task.basis.dim();
  std::vector<std::pair<int, int>> groups = {{0, 0}, {1, 5}, {6, dim - 1}};
  for (int i = 0; i < samples; ++i) {
    double t = task.total_time * i / (samples - 1);
    if (t > t_prev) {
      int steps = std::max(1, static_cast<int>(task.substeps * (t - t_prev) / task.total_time));
      psi = bh::evolve_gamma(
          task.h, psi, [&](double dt) { return ramp(t_prev + dt); }, t - t_prev, steps);
      t_prev = t;
    }
    auto pops = bh::instantaneous_populations(bh::with_gamma(task.h, ramp(t)), psi, groups);
    os << fmt_g17(t) << ',' << fmt_g17(ramp(t)) << ',' << fmt_g17(pops[0]) << ','
       << fmt_g17(pops[1]) << ',' << fmt_g17(pops[2]) << '\n';
  }
}

inline nlohmann::json export_site_probs(const std::string& system,
                                        const std::vector<double>& theta,
                                        double tolerance = 1e-5) {
  auto task = make_ryd_task(detail::lattice_for(system), ryd::RydbergParams{}, 5, tolerance);
  PulseSpec pulse = task->pulse_of(theta);
  auto psi = ryd::evolve(task->full_system, ryd::ground_state_vector(task->full_system), pulse,
                         tolerance);
  auto probs = ryd::site_excitation_probabilities(task->full_system, psi);
  nlohmann::json j;
  j["system"] = system;
  j["theta"] = theta;
  j["site_excitation_prob"] = probs;
  return j;
}

}  // namespace qcbo

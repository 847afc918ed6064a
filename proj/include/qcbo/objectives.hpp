#pragma once

#include <memory>
#include <numeric>
#include <vector>

#include "qcbo/baselines.hpp"
#include "qcbo/bayes_opt.hpp"
#include "qcbo/bose_hubbard.hpp"
#include "qcbo/controls.hpp"
#include "qcbo/rydberg.hpp"

namespace qcbo {

// Shared immutable pieces of the lattice-ramp problem: basis, Hamiltonian
// structure, initial state, protocol duration.
struct BhTask {
  bh::FockBasis basis;
  bh::BhHamiltonian h;
  Eigen::VectorXcd psi0;
  double total_time = 0.0;
  int substeps = bh::kDefaultSubsteps;

  Eigen::VectorXcd final_state(const std::vector<double>& knots) const {
    return bh::evolve(h, psi0, RampSpec::from_vector(knots, total_time), substeps);
  }
  double fidelity(const std::vector<double>& knots) const {
    return bh::fidelity_mi(basis, final_state(knots));
  }
};

// time_factor is a multiple of the computed speed-limit time.
inline std::shared_ptr<BhTask> make_bh_task(int L = 5, int N = 5, double time_factor = 1.0,
                                            int substeps = bh::kDefaultSubsteps) {
  auto t = std::make_shared<BhTask>();
  t->basis = bh::build_basis(L, N);
  t->h = bh::build_hamiltonian(t->basis, 0.0);
  auto [e0, gs] = bh::ground_state(t->h);
  (void)e0;
  t->psi0 = gs;
  t->total_time = time_factor * bh::quantum_speed_limit(L, N).t_qsl;
  t->substeps = substeps;
  return t;
}

inline Box bh_bounds() { return Box::cube(0.0, 1.0, 10); }

// Maximization objective.
inline Objective bh_fidelity_objective(std::shared_ptr<BhTask> task) {
  return [task](const std::vector<double>& th) { return task->fidelity(th); };
}

// Minimization objective; one finite-shot estimate per call.
inline Objective bh_fexp_objective(std::shared_ptr<BhTask> task, int shots,
                                   std::shared_ptr<Rng> rng) {
  return [task, shots, rng](const std::vector<double>& th) {
    return bh::fom_exp(task->basis, task->final_state(th), shots, *rng);
  };
}

struct RydTask {
  ryd::Lattice lattice;
  ryd::RydbergParams params;
  ryd::SpinSystem full_system;
  int target_ne = 5;
  // Optimization-grade integration accuracy: state errors of 1e-5 are far
  // below the protocol-quality differences any optimizer resolves, and each
  // evaluation stays a few seconds even at 2^9 dimensions.
  double tolerance = 1e-5;
  double pulse_total_time = 1e-6;
  double tukey_taper = 0.2;

  PulseSpec pulse_of(const std::vector<double>& th) const {
    return PulseSpec::from_vector(th, pulse_total_time, tukey_taper);
  }
  double manifold_fidelity(const PulseSpec& pulse) const {
    auto psi =
        ryd::evolve(full_system, ryd::ground_state_vector(full_system), pulse, tolerance);
    return ryd::fidelity_manifold(full_system, psi, target_ne);
  }
};

inline std::shared_ptr<RydTask> make_ryd_task(const ryd::Lattice& lattice,
                                              const ryd::RydbergParams& params, int target_ne,
                                              double tolerance = 1e-5) {
  auto t = std::make_shared<RydTask>();
  t->lattice = lattice;
  t->params = params;
  t->full_system = ryd::make_system(lattice, params);
  t->target_ne = target_ne;
  t->tolerance = tolerance;
  return t;
}

inline Box ryd_bounds() {
  return Box({PulseBounds::omega_lo, PulseBounds::omega_lo, PulseBounds::omega_lo,
              PulseBounds::delta_lo, PulseBounds::delta_lo, PulseBounds::delta_lo},
             {PulseBounds::omega_hi, PulseBounds::omega_hi, PulseBounds::omega_hi,
              PulseBounds::delta_hi, PulseBounds::delta_hi, PulseBounds::delta_hi});
}

// Maximization objective: population of the target excitation manifold on the
// fully filled lattice.
inline Objective ryd_manifold_objective(std::shared_ptr<RydTask> task) {
  return [task](const std::vector<double>& th) {
    return task->manifold_fidelity(task->pulse_of(th));
  };
}

// Maximization objective with the imperfection models: one pulse-noise draw
// and one lattice draw per evaluation, detection applied in expectation.
inline Objective ryd_detected_objective(std::shared_ptr<RydTask> task, double pulse_sigma,
                                        std::shared_ptr<Rng> pulse_rng,
                                        std::shared_ptr<Rng> fill_rng) {
  return [task, pulse_sigma, pulse_rng, fill_rng](const std::vector<double>& th) {
    PulseSpec pulse = task->pulse_of(th);
    if (pulse_sigma > 0) pulse = ryd::perturb_pulse(pulse, pulse_sigma, *pulse_rng);
    std::vector<int> occupied;
    if (task->params.fill_prob < 1.0) {
      occupied = ryd::sample_imperfect_lattice(task->lattice, task->params.fill_prob, *fill_rng);
    } else {
      occupied.resize(static_cast<std::size_t>(task->lattice.size()));
      std::iota(occupied.begin(), occupied.end(), 0);
    }
    auto sys = ryd::make_system(task->lattice, task->params, occupied);
    if (sys.n_atoms == 0) return 0.0;
    auto psi = ryd::evolve(sys, ryd::ground_state_vector(sys), pulse, task->tolerance);
    return ryd::detected_excitations_exact(sys, psi, task->params.detection_prob);
  };
}

// Mean detected FoM of a fixed (clean) pulse over seeded lattice draws.
inline double mean_detected_over_fills(const RydTask& task, const PulseSpec& pulse, int draws,
                                       std::uint64_t seed) {
  double acc = 0.0;
  for (int d = 0; d < draws; ++d) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(d) + 101);
    auto occupied = ryd::sample_imperfect_lattice(task.lattice, task.params.fill_prob, rng);
    auto sys = ryd::make_system(task.lattice, task.params, occupied);
    if (sys.n_atoms == 0) continue;
    auto psi = ryd::evolve(sys, ryd::ground_state_vector(sys), pulse, task.tolerance);
    acc += ryd::detected_excitations_exact(sys, psi, task.params.detection_prob);
  }
  return acc / draws;
}

}  // namespace qcbo

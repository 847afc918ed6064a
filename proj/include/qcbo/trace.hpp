#pragma once

#include <chrono>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcbo {

enum class Sense { minimize, maximize };

inline bool improves(Sense s, double candidate, double incumbent) {
  return s == Sense::minimize ? candidate < incumbent : candidate > incumbent;
}

struct TraceRecord {
  int iter = 0;  // 1-based evaluation index
  std::vector<double> theta;
  double fom = 0.0;
  double best_so_far = 0.0;
  double wall_s = 0.0;
};

struct OptimizationTrace {
  Sense sense = Sense::minimize;
  std::vector<TraceRecord> records;

  double best_value() const {
    if (records.empty()) throw std::runtime_error("trace: empty");
    return records.back().best_so_far;
  }

  const TraceRecord& best_record() const {
    if (records.empty()) throw std::runtime_error("trace: empty");
    const TraceRecord* best = &records.front();
    for (const auto& r : records)
      if (improves(sense, r.fom, best->fom)) best = &r;
    return *best;
  }

  // Best-so-far value after `evals` evaluations.
  double best_at(int evals) const {
    if (records.empty() || evals < 1) throw std::runtime_error("trace: bad query");
    int idx = std::min<int>(evals, static_cast<int>(records.size())) - 1;
    return records[static_cast<std::size_t>(idx)].best_so_far;
  }
};

// 17 significant digits: round-trips any double exactly.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_trace_csv(std::ostream& os, const OptimizationTrace& trace) {
  std::size_t p = trace.records.empty() ? 0 : trace.records.front().theta.size();
  os << "iter";
  for (std::size_t j = 1; j <= p; ++j) os << ",theta_" << j;
  os << ",fom,best_so_far,wall_s\n";
  for (const auto& r : trace.records) {
    os << r.iter;
    for (double t : r.theta) os << ',' << fmt_g17(t);
    os << ',' << fmt_g17(r.fom) << ',' << fmt_g17(r.best_so_far) << ',' << fmt_g17(r.wall_s)
       << '\n';
  }
}

// Shared bookkeeping for optimizers filling a trace one evaluation at a time.
// wall_s defaults to cumulative seconds since construction.
class TraceBuilder {
 public:
  TraceBuilder(Sense sense, int budget)
      : budget_(budget), t0_(std::chrono::steady_clock::now()) {
    trace_.sense = sense;
  }

  bool exhausted() const { return static_cast<int>(trace_.records.size()) >= budget_; }
  int remaining() const { return budget_ - static_cast<int>(trace_.records.size()); }

  double record(const std::vector<double>& theta, double fom, double wall_s = -1.0) {
    if (exhausted()) throw std::runtime_error("trace: budget exceeded");
    TraceRecord r;
    r.iter = static_cast<int>(trace_.records.size()) + 1;
    r.theta = theta;
    r.fom = fom;
    bool first = trace_.records.empty();
    r.best_so_far =
        first || improves(trace_.sense, fom, trace_.records.back().best_so_far)
            ? fom
            : trace_.records.back().best_so_far;
    r.wall_s = wall_s >= 0.0
                   ? wall_s
                   : std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    trace_.records.push_back(std::move(r));
    return trace_.records.back().best_so_far;
  }

  OptimizationTrace take() { return std::move(trace_); }
  const OptimizationTrace& peek() const { return trace_; }

 private:
  OptimizationTrace trace_;
  int budget_;
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace qcbo

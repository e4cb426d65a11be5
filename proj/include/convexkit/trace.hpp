#pragma once

#include <chrono>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "convexkit/oracles.hpp"

namespace convexkit {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TraceRow {
    long iter = 0;
    double f_value = kNaN;
    double gap = kNaN;      // f(x_iter) - f* (or a certified surrogate)
    double avg_gap = kNaN;  // gap of the point the theorem is about (average, y_t, best, ...)
    double dist_to_opt = kNaN;
    double grad_norm = kNaN;
    long oracle_zeroth = 0;
    long oracle_first = 0;
    // Filled in by check_bound.
    double bound_value = kNaN;
    int bound_satisfied = -1;  // -1 unchecked, 0 violated, 1 satisfied
};

struct RunTrace {
    std::string algorithm;
    std::vector<TraceRow> rows;
    Vec x_last;  // last iterate
    Vec x_out;   // the output point of the theorem
    std::vector<long> iterate_index;
    std::vector<Vec> iterates;  // thinned
    std::map<std::string, std::vector<double>> series;
    double wall_seconds = 0.0;

    std::vector<double> column(const std::string& name) const;
    const TraceRow& last() const;
    // min over rows of the given column (NaN rows ignored)
    double best(const std::string& name) const;
};

// Fills rows from an oracle with uncounted evaluations: f(x), the gap to the
// oracle's f_star, the distance to x_star and the gradient norm.
class TraceRecorder {
public:
    TraceRecorder(const FirstOrderOracle& f, std::string algorithm, long keep_every = 0);

    // Records iterate x at index iter and the output point out (which may be x).
    TraceRow& record(long iter, const Vec& x, const Vec& out);
    // Records a row without evaluating anything.
    TraceRow& record_values(long iter, double f_value, double gap, double avg_gap);
    void add_series(const std::string& name, double v) { trace_.series[name].push_back(v); }
    RunTrace finish(const Vec& x_last, const Vec& x_out);
    RunTrace& trace() { return trace_; }

private:
    const FirstOrderOracle& f_;
    RunTrace trace_;
    long keep_every_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace convexkit

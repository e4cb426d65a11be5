#include "convexkit/trace.hpp"

#include <cmath>

#include "convexkit/errors.hpp"

namespace convexkit {

std::vector<double> RunTrace::column(const std::string& name) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        if (name == "iter") out.push_back(static_cast<double>(r.iter));
        else if (name == "f_value") out.push_back(r.f_value);
        else if (name == "gap") out.push_back(r.gap);
        else if (name == "avg_gap") out.push_back(r.avg_gap);
        else if (name == "dist_to_opt") out.push_back(r.dist_to_opt);
        else if (name == "dist_sq") out.push_back(r.dist_to_opt * r.dist_to_opt);
        else if (name == "grad_norm") out.push_back(r.grad_norm);
        else if (name == "oracle_zeroth") out.push_back(static_cast<double>(r.oracle_zeroth));
        else if (name == "oracle_first") out.push_back(static_cast<double>(r.oracle_first));
        else if (name == "bound_value") out.push_back(r.bound_value);
        else throw ConfigError("unknown trace column '" + name + "'");
    }
    return out;
}

const TraceRow& RunTrace::last() const {
    if (rows.empty()) throw DomainError("empty trace");
    return rows.back();
}

double RunTrace::best(const std::string& name) const {
    double b = kNaN;
    for (double v : column(name))
        if (!std::isnan(v) && (std::isnan(b) || v < b)) b = v;
    return b;
}

TraceRecorder::TraceRecorder(const FirstOrderOracle& f, std::string algorithm, long keep_every)
    : f_(f), keep_every_(keep_every), start_(std::chrono::steady_clock::now()) {
    trace_.algorithm = std::move(algorithm);
}

TraceRow& TraceRecorder::record(long iter, const Vec& x, const Vec& out) {
    TraceRow r;
    r.iter = iter;
    r.f_value = f_.evaluate(x);
    if (f_.f_star) {
        r.gap = r.f_value - *f_.f_star;
        r.avg_gap = (&out == &x) ? r.gap : f_.evaluate(out) - *f_.f_star;
    }
    if (f_.x_star) r.dist_to_opt = (x - *f_.x_star).norm();
    r.grad_norm = f_.evaluate_subgradient(x).norm();
    r.oracle_zeroth = f_.zeroth_calls();
    r.oracle_first = f_.first_calls();
    if (keep_every_ > 0 && iter % keep_every_ == 0) {
        trace_.iterate_index.push_back(iter);
        trace_.iterates.push_back(x);
    }
    trace_.rows.push_back(r);
    return trace_.rows.back();
}

TraceRow& TraceRecorder::record_values(long iter, double f_value, double gap, double avg_gap) {
    TraceRow r;
    r.iter = iter;
    r.f_value = f_value;
    r.gap = gap;
    r.avg_gap = avg_gap;
    r.oracle_zeroth = f_.zeroth_calls();
    r.oracle_first = f_.first_calls();
    trace_.rows.push_back(r);
    return trace_.rows.back();
}

RunTrace TraceRecorder::finish(const Vec& x_last, const Vec& x_out) {
    trace_.x_last = x_last;
    trace_.x_out = x_out;
    trace_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return std::move(trace_);
}

}  // namespace convexkit

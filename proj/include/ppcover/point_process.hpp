#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ppcover/extended.hpp"
#include "ppcover/numeric.hpp"
#include "ppcover/rng.hpp"

namespace ppcover {

// A realization of a point process on [0,T]: strictly increasing arrival
// times in (0,T].  The counting function N_t = #{arrivals <= t} is
// right-continuous with unit jumps and N_0 = 0.
class CountingPath {
public:
    CountingPath(double horizon, std::vector<double> arrivals)
        : horizon_(horizon), arrivals_(std::move(arrivals)) {
        if (!(horizon_ > 0) || !std::isfinite(horizon_))
            throw std::invalid_argument("CountingPath: horizon must be positive and finite");
        double prev = 0.0;
        for (double t : arrivals_) {
            if (!(t > prev) || !(t <= horizon_))
                throw std::invalid_argument("CountingPath: arrivals must be strictly increasing in (0,T]");
            prev = t;
        }
    }

    static CountingPath empty(double horizon) { return CountingPath(horizon, {}); }

    double horizon() const { return horizon_; }
    const std::vector<double>& arrivals() const { return arrivals_; }
    std::size_t count() const { return arrivals_.size(); }
    bool is_empty() const { return arrivals_.empty(); }

    // N_t
    std::size_t count_at(double t) const {
        return std::upper_bound(arrivals_.begin(), arrivals_.end(), t) - arrivals_.begin();
    }

private:
    double horizon_;
    std::vector<double> arrivals_;
};

// Non-negative left-continuous piecewise-constant reconstruction on [0,T].
// Piece k takes values on (b_{k-1}, b_k] with b_{-1} = 0 and b_last = T.
class StepFunction {
public:
    StepFunction(double horizon, std::vector<double> breakpoints, std::vector<double> values)
        : horizon_(horizon), breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
        if (!(horizon_ > 0) || !std::isfinite(horizon_))
            throw std::invalid_argument("StepFunction: horizon must be positive and finite");
        if (values_.size() != breakpoints_.size() + 1)
            throw std::invalid_argument("StepFunction: need one value per piece");
        double prev = 0.0;
        for (double b : breakpoints_) {
            if (!(b > prev) || !(b < horizon_))
                throw std::invalid_argument("StepFunction: breakpoints must be increasing in (0,T)");
            prev = b;
        }
        for (double v : values_) {
            if (!(v >= 0) || !std::isfinite(v))
                throw std::invalid_argument("StepFunction: values must be non-negative and finite");
        }
    }

    static StepFunction constant(double horizon, double value) {
        return StepFunction(horizon, {}, {value});
    }

    double horizon() const { return horizon_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }

    // Left-continuous evaluation: the piece whose (b_{k-1}, b_k] contains t.
    double value_at(double t) const {
        auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
        return values_[it - breakpoints_.begin()];
    }

    double integral() const {
        double s = 0, prev = 0;
        for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
            s += values_[k] * (breakpoints_[k] - prev);
            prev = breakpoints_[k];
        }
        s += values_.back() * (horizon_ - prev);
        return s;
    }

    // (1/T) * integral of g(value) over [0,T]
    template <class G>
    double mean_of(G&& g) const {
        double s = 0, prev = 0;
        for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
            s += g(values_[k]) * (breakpoints_[k] - prev);
            prev = breakpoints_[k];
        }
        s += g(values_.back()) * (horizon_ - prev);
        return s / horizon_;
    }

private:
    double horizon_;
    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// sampling and transformations
// ---------------------------------------------------------------------------

// Homogeneous Poisson path via exponential gaps (streaming, deterministic
// given the RNG stream).
inline CountingPath sample_poisson(double rate, double horizon, RngStream& rng) {
    if (rate < 0 || !std::isfinite(rate)) throw std::invalid_argument("sample_poisson: rate must be >= 0 and finite");
    if (!(horizon > 0) || !std::isfinite(horizon))
        throw std::invalid_argument("sample_poisson: horizon must be positive and finite");
    std::vector<double> arrivals;
    if (rate == 0) return CountingPath(horizon, {});
    double t = rng.next_exponential(rate);
    while (t <= horizon) {
        arrivals.push_back(t);
        t += rng.next_exponential(rate);
    }
    return CountingPath(horizon, std::move(arrivals));
}

struct ThinResult {
    CountingPath kept;
    CountingPath removed;
};

// p-thinning: each arrival moves to `removed` independently with probability p.
inline ThinResult thin(const CountingPath& path, double p, RngStream& rng) {
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("thin: p must be in [0,1]");
    std::vector<double> kept, removed;
    for (double t : path.arrivals()) {
        if (rng.next_bernoulli(p))
            removed.push_back(t);
        else
            kept.push_back(t);
    }
    return {CountingPath(path.horizon(), std::move(kept)),
            CountingPath(path.horizon(), std::move(removed))};
}

// Superposition; simultaneous arrivals (probability zero in the model) are
// perturbed by one ulp to preserve unit jumps, with the count reported.
inline CountingPath superpose(const CountingPath& a, const CountingPath& b, int* ties_perturbed = nullptr) {
    if (a.horizon() != b.horizon()) throw std::invalid_argument("superpose: horizon mismatch");
    std::vector<double> merged;
    merged.reserve(a.count() + b.count());
    std::merge(a.arrivals().begin(), a.arrivals().end(), b.arrivals().begin(), b.arrivals().end(),
               std::back_inserter(merged));
    int ties = 0;
    for (std::size_t i = 1; i < merged.size(); ++i) {
        if (merged[i] <= merged[i - 1]) {
            merged[i] = std::nextafter(merged[i - 1], std::numeric_limits<double>::infinity());
            ++ties;
            if (merged[i] > a.horizon())
                throw std::invalid_argument("superpose: tie perturbation exceeded horizon");
        }
    }
    if (ties_perturbed) *ties_perturbed = ties;
    return CountingPath(a.horizon(), std::move(merged));
}

// ---------------------------------------------------------------------------
// functional-covering distortion and the log-likelihood identity
// ---------------------------------------------------------------------------

// d(yhat, y) = int_0^T yhat_t dt - sum_i log yhat(t_i); +inf iff yhat
// vanishes at an arrival (left-continuous evaluation).
inline ExtReal distortion(const StepFunction& yhat, const CountingPath& y) {
    if (yhat.horizon() != y.horizon()) throw std::invalid_argument("distortion: horizon mismatch");
    double d = yhat.integral();
    for (double t : y.arrivals()) {
        double v = yhat.value_at(t);
        if (v == 0) return ExtReal::pos_inf();
        d -= std::log(v);
    }
    return ExtReal::finite(d);
}

// LLR against the unit-rate reference: int log yhat dy - int (yhat - 1) dt.
// Satisfies distortion + LLR = T whenever both are finite.
inline ExtReal log_likelihood_ratio(const StepFunction& yhat, const CountingPath& y) {
    if (yhat.horizon() != y.horizon()) throw std::invalid_argument("log_likelihood_ratio: horizon mismatch");
    double s = -(yhat.integral() - yhat.horizon());
    for (double t : y.arrivals()) {
        double v = yhat.value_at(t);
        if (v == 0) return ExtReal::neg_inf();
        s += std::log(v);
    }
    return ExtReal::finite(s);
}

// ---------------------------------------------------------------------------
// CSV serialization: "# horizon=T" comment, "t" header, one arrival per row
// ---------------------------------------------------------------------------

inline void write_path_csv(const CountingPath& path, std::ostream& os) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", path.horizon());
    os << "# horizon=" << buf << "\n" << "t\n";
    for (double t : path.arrivals()) {
        std::snprintf(buf, sizeof buf, "%.17g", t);
        os << buf << "\n";
    }
}

inline CountingPath read_path_csv(std::istream& is) {
    std::string line;
    double horizon = -1;
    std::vector<double> arrivals;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.rfind("# horizon=", 0) == 0) {
            horizon = std::stod(line.substr(10));
        } else if (line == "t") {
            continue;
        } else {
            arrivals.push_back(std::stod(line));
        }
    }
    if (horizon <= 0) throw std::invalid_argument("read_path_csv: missing horizon comment");
    return CountingPath(horizon, std::move(arrivals));
}

}  // namespace ppcover

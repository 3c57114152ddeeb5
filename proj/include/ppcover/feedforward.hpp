#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ppcover/analytic.hpp"
#include "ppcover/numeric.hpp"
#include "ppcover/point_process.hpp"
#include "ppcover/rng.hpp"

namespace ppcover {

struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// First-arrival quantization scheme of the feedforward achievability: the
// encoder sends 1 on an empty path, otherwise the bin of F(Theta) among J-1
// equiprobable bins; the decoder runs the conditional intensity.
struct FFScheme {
    double lambda = 1;
    double horizon = 1;
    double rate = 0;
    double codebook_size = 1;  // J = ceil(exp(R T)), exact in double for RT <= 30

    static FFScheme make(double lambda, double horizon, double rate) {
        if (!(lambda > 0)) throw std::invalid_argument("FFScheme: lambda must be > 0");
        if (!(horizon > 0)) throw std::invalid_argument("FFScheme: horizon must be > 0");
        if (rate < 0) throw std::invalid_argument("FFScheme: rate must be >= 0");
        if (rate * horizon > 30)
            throw std::invalid_argument(
                "FFScheme: R*T must be <= 30 (bin indices exceed double precision beyond that)");
        FFScheme s;
        s.lambda = lambda;
        s.horizon = horizon;
        s.rate = rate;
        s.codebook_size = std::ceil(std::exp(rate * horizon));
        return s;
    }

    std::int64_t J() const { return static_cast<std::int64_t>(codebook_size); }
};

// Conditional CDF of the first arrival given at least one arrival.
inline double first_arrival_cdf(double lambda, double horizon, double theta) {
    if (!(lambda > 0)) throw std::invalid_argument("first_arrival_cdf: lambda must be > 0");
    if (!(theta >= 0 && theta <= horizon))
        throw std::invalid_argument("first_arrival_cdf: theta must be in [0,T]");
    return std::expm1(-lambda * theta) / std::expm1(-lambda * horizon);
}

inline double first_arrival_quantile(double lambda, double horizon, double q) {
    if (!(q >= 0 && q <= 1)) throw std::invalid_argument("first_arrival_quantile: q in [0,1]");
    // F^{-1}(q) = -log(1 - q (1 - e^{-lambda T})) / lambda
    const double theta = -std::log1p(q * std::expm1(-lambda * horizon)) / lambda;
    return std::clamp(theta, 0.0, horizon);
}

inline std::int64_t encode(const CountingPath& path, const FFScheme& scheme) {
    if (path.horizon() != scheme.horizon) throw std::invalid_argument("encode: horizon mismatch");
    if (scheme.J() <= 1) return 1;
    if (path.is_empty()) return 1;
    const double u = first_arrival_cdf(scheme.lambda, scheme.horizon, path.arrivals().front());
    const double bins = scheme.codebook_size - 1;
    std::int64_t m = 2 + static_cast<std::int64_t>(std::floor(u * bins));
    if (m > scheme.J()) m = scheme.J();
    return m;
}

// The decoder's reconstruction: the conditional intensity of the path given
// (M, feedforward past).  For M >= 2 with bin [a,b):
//   Gamma_t = 0 for t <= a,
//   Gamma_t = lambda / (1 - e^{-lambda (b - t)}) for a < t <= Theta (hazard),
//   Gamma_t = lambda for t > Theta.
// Not piecewise constant, so it carries its own exact integrals instead of
// being squeezed into a StepFunction.
class FFIntensity {
public:
    enum class Mode { Zero, Prior, Bin };

    double value_at(double t) const {
        switch (mode_) {
            case Mode::Zero: return 0.0;
            case Mode::Prior: return lambda_;
            case Mode::Bin:
                if (t <= a_) return 0.0;
                if (t <= theta_) return hazard(t);
                return lambda_;
        }
        return 0.0;
    }

    // int_0^T Gamma dt, closed form
    double integral() const {
        switch (mode_) {
            case Mode::Zero: return 0.0;
            case Mode::Prior: return lambda_ * horizon_;
            case Mode::Bin:
                return std::log(std::expm1(lambda_ * (b_ - a_)) / std::expm1(lambda_ * (b_ - theta_))) +
                       lambda_ * (horizon_ - theta_);
        }
        return 0.0;
    }

    // sum over arrivals of log Gamma(t_i)
    double sum_log_at_arrivals() const {
        switch (mode_) {
            case Mode::Zero: return 0.0;
            case Mode::Prior: return static_cast<double>(n_arrivals_) * std::log(lambda_);
            case Mode::Bin:
                return std::log(hazard(theta_)) +
                       static_cast<double>(n_arrivals_ - 1) * std::log(lambda_);
        }
        return 0.0;
    }

    ExtReal path_distortion() const {
        if (mode_ == Mode::Zero) return ExtReal::finite(0.0);
        return ExtReal::finite(integral() - sum_log_at_arrivals());
    }

    // int_0^T phi(Gamma_t) dt.  On (a, Theta] the substitution x = log(s),
    // s = e^{-lambda t} - e^{-lambda b} turns the integrand into
    // log(lambda) - x + log(e^x + c), whose only quadrature piece
    // g(x) = log(e^x + c) is smooth; the log-singular parts integrate in
    // closed form.
    double phi_integral(double quad_tol = 1e-8) const {
        switch (mode_) {
            case Mode::Zero: return 0.0;
            case Mode::Prior: return horizon_ * phi(lambda_);
            case Mode::Bin: {
                const double c = std::exp(-lambda_ * b_);
                const double sa = c * std::expm1(lambda_ * (b_ - a_));
                const double st = c * std::expm1(lambda_ * (b_ - theta_));
                const double xa = std::log(sa), xt = std::log(st);
                const double closed = std::log(lambda_) * (xa - xt) - 0.5 * (xa * xa - xt * xt);
                const double soft = integrate(
                    [c](double x) {
                        const double lc = std::log(c);
                        const double hi = std::max(x, lc), lo = std::min(x, lc);
                        return hi + std::log1p(std::exp(lo - hi));
                    },
                    xt, xa, quad_tol);
                return closed + soft + (horizon_ - theta_) * phi(lambda_);
            }
        }
        return 0.0;
    }

    Mode mode() const { return mode_; }
    double bin_lo() const { return a_; }
    double bin_hi() const { return b_; }
    double theta() const { return theta_; }

private:
    friend FFIntensity decode_intensity(std::int64_t, const FFScheme&, const CountingPath&);
    double hazard(double t) const { return lambda_ / (-std::expm1(-lambda_ * (b_ - t))); }

    Mode mode_ = Mode::Zero;
    double lambda_ = 1, horizon_ = 1;
    double a_ = 0, b_ = 0, theta_ = 0;
    std::size_t n_arrivals_ = 0;
};

inline FFIntensity decode_intensity(std::int64_t message, const FFScheme& scheme,
                                    const CountingPath& path) {
    if (path.horizon() != scheme.horizon)
        throw std::invalid_argument("decode_intensity: horizon mismatch");
    FFIntensity g;
    g.lambda_ = scheme.lambda;
    g.horizon_ = scheme.horizon;
    g.n_arrivals_ = path.count();

    if (scheme.J() <= 1) {
        // zero-rate code: the message is vacuous, the decoder runs the prior
        g.mode_ = FFIntensity::Mode::Prior;
        return g;
    }
    if (message == 1) {
        if (!path.is_empty())
            throw ConsistencyError("decode_intensity: message says empty path but arrivals present");
        g.mode_ = FFIntensity::Mode::Zero;
        return g;
    }
    if (message < 2 || message > scheme.J())
        throw std::invalid_argument("decode_intensity: message out of range");
    if (path.is_empty())
        throw ConsistencyError("decode_intensity: message expects a first arrival");

    const double bins = scheme.codebook_size - 1;
    const double k = static_cast<double>(message - 2);
    const double a = first_arrival_quantile(scheme.lambda, scheme.horizon, k / bins);
    const double b = first_arrival_quantile(scheme.lambda, scheme.horizon, (k + 1) / bins);
    double theta = path.arrivals().front();
    const double tol = 1e-9 * std::max(1.0, scheme.horizon);
    if (theta < a - tol || theta > b + tol)
        throw ConsistencyError("decode_intensity: first arrival outside the decoded bin");
    // fp guard: keep theta strictly inside [a, b)
    theta = std::min(std::max(theta, a), b - (b - a) * 1e-15);

    g.mode_ = FFIntensity::Mode::Bin;
    g.a_ = a;
    g.b_ = b;
    g.theta_ = theta;
    return g;
}

struct FFReport {
    double lambda = 0, horizon = 0, rate = 0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    double mean_d = 0, se_d = 0;
    double H_M = 0;
    double mi_mc = 0, se_mi = 0;
    double lower_bound = 0, upper_bound = 0;
};

inline double ff_message_entropy(const FFScheme& scheme) {
    if (scheme.J() <= 1) return 0.0;
    const double delta_T = std::exp(-scheme.lambda * scheme.horizon);
    return -(phi(delta_T) + phi(1 - delta_T)) + (1 - delta_T) * std::log(scheme.codebook_size - 1);
}

// Monte Carlo run of the feedforward scheme.  Per-trial RNG substreams and
// pairwise summation in trial order keep the result independent of the
// worker count.
inline FFReport simulate(double lambda, double horizon, double rate, std::int64_t trials,
                         std::uint64_t seed, int threads = 1, double quad_tol = 1e-8) {
    if (trials < 1) throw std::invalid_argument("simulate: trials must be >= 1");
    const FFScheme scheme = FFScheme::make(lambda, horizon, rate);

    std::vector<double> d(trials), x(trials);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t i) {
        RngStream rng = RngStream::substream(seed, i);
        const CountingPath path = sample_poisson(lambda, horizon, rng);
        const std::int64_t m = encode(path, scheme);
        const FFIntensity g = decode_intensity(m, scheme, path);
        d[i] = g.path_distortion().value() / horizon;
        x[i] = g.phi_integral(quad_tol) - horizon * phi(lambda);
    });

    const double n = static_cast<double>(trials);
    auto mean_se = [&](const std::vector<double>& v, double& mean, double& se) {
        mean = pairwise_sum(v) / n;
        if (trials == 1) {
            se = 0;
            return;
        }
        std::vector<double> sqdev(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) sqdev[i] = sq(v[i] - mean);
        se = std::sqrt(pairwise_sum(sqdev) / (n - 1) / n);
    };

    FFReport rep;
    rep.lambda = lambda;
    rep.horizon = horizon;
    rep.rate = rate;
    rep.trials = trials;
    rep.seed = seed;
    mean_se(d, rep.mean_d, rep.se_d);
    mean_se(x, rep.mi_mc, rep.se_mi);
    rep.H_M = ff_message_entropy(scheme);
    const double delta_T = std::exp(-lambda * horizon);
    rep.lower_bound = xi(lambda) - rate - 1.0 / horizon;
    rep.upper_bound = xi(lambda) - (1 - delta_T) * rate + 1.0 / horizon;
    return rep;
}

}  // namespace ppcover

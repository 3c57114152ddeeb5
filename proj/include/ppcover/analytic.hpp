#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ppcover/numeric.hpp"
#include "ppcover/point_process.hpp"
#include "ppcover/recon.hpp"

namespace ppcover {

// Probability vector on {1,2,3,4} -- the Caratheodory parametrization used by
// every Poisson region in the library.
struct AtomVec {
    std::array<double, 4> w{0.25, 0.25, 0.25, 0.25};

    AtomVec() = default;
    AtomVec(double a, double b, double c, double d) : w{a, b, c, d} { validate(); }
    explicit AtomVec(const std::array<double, 4>& v) : w(v) { validate(); }

    void validate() const {
        double s = 0;
        for (double x : w) {
            if (x < 0) throw std::invalid_argument("AtomVec: negative weight");
            s += x;
        }
        if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("AtomVec: weights must sum to 1");
    }

    double operator[](std::size_t k) const { return w[k]; }
};

// KL(beta || alpha) on four atoms; requires alpha_k = 0 => beta_k = 0.
// Clamped at 0 so roundoff near beta = alpha cannot produce negative rates.
inline double kl_atoms(const AtomVec& beta, const AtomVec& alpha) {
    double s = 0;
    for (int k = 0; k < 4; ++k) {
        if (beta[k] == 0) continue;
        if (alpha[k] == 0)
            throw std::invalid_argument("kl_atoms: support violation (alpha_k=0, beta_k>0)");
        s += beta[k] * std::log(beta[k] / alpha[k]);
    }
    return std::max(0.0, s);
}

// Xi = lambda - phi(lambda): zero-rate distortion of a Poisson source.
inline double xi(double lambda) {
    if (lambda < 0) throw std::domain_error("xi: lambda must be >= 0");
    return lambda - phi(lambda);
}

// Xi for a deterministic time-varying intensity.
inline double xi(const StepFunction& intensity) {
    return intensity.mean_of([](double v) { return v - phi(v); });
}

// D_F(R) = Xi - R (feedforward distortion-rate line; may be negative).
inline double df_feedforward(double lambda, double rate) {
    if (!(lambda > 0)) throw std::invalid_argument("df_feedforward: lambda must be > 0");
    if (rate < 0) throw std::invalid_argument("df_feedforward: rate must be >= 0");
    return xi(lambda) - rate;
}

// R_FC(D) = (lambda - lambda log lambda - D)^+
inline double rfc(double lambda, double D) {
    if (!(lambda > 0)) throw std::invalid_argument("rfc: lambda must be > 0");
    return std::max(0.0, xi(lambda) - D);
}

// R_C(D) = (-lambda log D)^+
inline double rc(double lambda, double D) {
    if (!(lambda > 0)) throw std::invalid_argument("rc: lambda must be > 0");
    if (!(D > 0)) throw std::domain_error("rc: D must be > 0 (rate unbounded)");
    return std::max(0.0, -lambda * std::log(D));
}

// A rate-distortion sample together with the achieving parameters.
struct RDPoint {
    std::vector<double> rates;     // 1 or 2 entries, nats per unit time
    double distortion = 0;
    std::vector<AtomVec> alphas;   // one per encoder
    std::vector<AtomVec> betas;
};

// Constrained functional-covering point (single encoder):
//   R = lambda sum_k beta_k log(beta_k/alpha_k)
//   D = sum_k alpha_k Psi_A(lambda beta_k / alpha_k), 0 * Psi(0/0) = 0
inline RDPoint constrained_region_point(double lambda, const ReconSet& A, const AtomVec& alpha,
                                        const AtomVec& beta) {
    if (!(lambda > 0)) throw std::invalid_argument("constrained_region_point: lambda must be > 0");
    double R = lambda * kl_atoms(beta, alpha);
    double D = 0;
    for (int k = 0; k < 4; ++k) {
        if (alpha[k] == 0) continue;
        D += alpha[k] * psi_value(A, lambda * beta[k] / alpha[k]);
    }
    RDPoint p;
    p.rates = {R};
    p.distortion = D;
    p.alphas = {alpha};
    p.betas = {beta};
    return p;
}

inline AtomVec ceo_gamma(double p, const AtomVec& alpha, const AtomVec& beta) {
    std::array<double, 4> g{};
    for (int k = 0; k < 4; ++k) g[k] = p * alpha[k] + (1 - p) * beta[k];
    return AtomVec(g);
}

// Two-encoder CEO point.  Encoder i observes a p_i-thinning of the source
// plus independent Poisson noise of rate mu_i.
//   R_i = ((1-p_i) lambda + mu_i) KL(beta_i || alpha_i)
//   D   = lambda - phi(lambda)
//         - lambda (KL(gamma_1||alpha_1) + KL(gamma_2||alpha_2)),
// with gamma_i = p_i alpha_i + (1-p_i) beta_i; p_i = 1 pins
// alpha_i = beta_i = gamma_i.
inline RDPoint ceo_region_point(double lambda, double p1, double p2, double mu1, double mu2,
                                const AtomVec& a1, const AtomVec& b1, const AtomVec& a2,
                                const AtomVec& b2) {
    if (!(lambda > 0)) throw std::invalid_argument("ceo_region_point: lambda must be > 0");
    for (double p : {p1, p2})
        if (!(p >= 0 && p <= 1)) throw std::invalid_argument("ceo_region_point: p in [0,1]");
    for (double mu : {mu1, mu2})
        if (mu < 0) throw std::invalid_argument("ceo_region_point: mu must be >= 0");

    const std::array<double, 2> ps{p1, p2};
    const std::array<double, 2> mus{mu1, mu2};
    const std::array<const AtomVec*, 2> as{&a1, &a2};
    const std::array<const AtomVec*, 2> bs{&b1, &b2};

    RDPoint out;
    double D = xi(lambda);
    for (int i = 0; i < 2; ++i) {
        const AtomVec& a = *as[i];
        const AtomVec& b = *bs[i];
        if (ps[i] == 1.0) {
            for (int k = 0; k < 4; ++k)
                if (a[k] != b[k])
                    throw std::invalid_argument("ceo_region_point: p_i=1 requires alpha_i = beta_i");
        }
        double R = ((1 - ps[i]) * lambda + mus[i]) * kl_atoms(b, a);
        AtomVec g = ceo_gamma(ps[i], a, b);
        D -= lambda * kl_atoms(g, a);
        out.rates.push_back(R);
        out.alphas.push_back(a);
        out.betas.push_back(b);
    }
    out.distortion = D;
    return out;
}

// Remote Poisson source: single-encoder specialization of the CEO region.
inline RDPoint remote_region_point(double lambda, double p, double mu, const AtomVec& alpha,
                                   const AtomVec& beta) {
    if (!(lambda > 0)) throw std::invalid_argument("remote_region_point: lambda must be > 0");
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("remote_region_point: p in [0,1]");
    if (mu < 0) throw std::invalid_argument("remote_region_point: mu must be >= 0");
    if (p == 1.0) {
        for (int k = 0; k < 4; ++k)
            if (alpha[k] != beta[k])
                throw std::invalid_argument("remote_region_point: p=1 requires alpha = beta");
    }
    double R = ((1 - p) * lambda + mu) * kl_atoms(beta, alpha);
    AtomVec g = ceo_gamma(p, alpha, beta);
    RDPoint out;
    out.rates = {R};
    out.distortion = xi(lambda) - lambda * kl_atoms(g, alpha);
    out.alphas = {alpha};
    out.betas = {beta};
    return out;
}

}  // namespace ppcover

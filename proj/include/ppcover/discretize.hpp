#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ppcover/analytic.hpp"
#include "ppcover/point_process.hpp"
#include "ppcover/recon.hpp"

namespace ppcover {

// Test channel of the achievability proofs: P(U=k | Y=0) = alpha_k,
// P(U=k | Y=1) = beta_k on the 4-atom alphabet.
struct TestChannel {
    AtomVec alpha;
    AtomVec beta;
};

// Binary slot process descriptor.
struct SlotModel {
    double delta = 0;
    std::size_t n = 0;
    double pY1 = 0;  // P(slot bit = 1)
};

inline SlotModel slot_model(double lambda, double delta, double horizon) {
    if (!(delta > 0)) throw std::invalid_argument("slot_model: delta must be > 0");
    SlotModel m;
    m.delta = delta;
    m.n = static_cast<std::size_t>(std::floor(horizon / delta + 1e-9));
    m.pY1 = -std::expm1(-lambda * delta);
    return m;
}

struct DiscretizeResult {
    std::vector<std::uint8_t> bits;  // 1{count >= 1} per slot
    std::vector<int> counts;         // arrivals per slot, kept for the overflow term
    bool truncated = false;          // horizon not divisible by delta; last partial slot dropped
};

// Slot j covers ((j-1) delta, j delta].
inline DiscretizeResult discretize(const CountingPath& path, double delta) {
    if (!(delta > 0)) throw std::invalid_argument("discretize: delta must be > 0");
    const double ratio = path.horizon() / delta;
    std::size_t n = static_cast<std::size_t>(std::floor(ratio + 1e-9));
    DiscretizeResult out;
    out.truncated = std::abs(ratio - std::round(ratio)) > 1e-9;
    if (out.truncated) n = static_cast<std::size_t>(std::floor(ratio));
    out.bits.assign(n, 0);
    out.counts.assign(n, 0);
    for (double t : path.arrivals()) {
        // index of the slot (j-1) with t in ((j-1)d, jd]
        std::size_t j = static_cast<std::size_t>(std::ceil(t / delta - 1e-12)) - 1;
        if (j >= n) continue;  // truncated tail
        out.counts[j] += 1;
        out.bits[j] = 1;
    }
    return out;
}

// Discretized distortion d(yhat, ybit) = yhat - log(yhat)/delta * 1{ybit=1}.
// +inf (IEEE) iff yhat = 0 at an occupied slot.
inline double dbar(double yhat, int ybit, double delta) {
    if (yhat < 0) throw std::domain_error("dbar: yhat must be >= 0");
    if (!(delta > 0)) throw std::invalid_argument("dbar: delta must be > 0");
    if (ybit == 0) return yhat;
    if (yhat == 0) return std::numeric_limits<double>::infinity();
    return yhat - std::log(yhat) / delta;
}

// Exact I(U;Y) in nats for the binary-input test channel, by enumeration of
// the 8-cell joint; zero-mass cells are skipped so alpha = beta gives 0
// exactly.
inline double mi_binary_channel(double pY1, const TestChannel& ch) {
    if (!(pY1 >= 0 && pY1 <= 1)) throw std::invalid_argument("mi_binary_channel: pY1 in [0,1]");
    const std::array<double, 2> py{1 - pY1, pY1};
    double I = 0;
    for (int k = 0; k < 4; ++k) {
        const double mix = py[0] * ch.alpha[k] + py[1] * ch.beta[k];
        if (mix == 0) continue;
        const std::array<double, 2> cond{ch.alpha[k], ch.beta[k]};
        for (int y = 0; y < 2; ++y) {
            if (py[y] == 0 || cond[y] == 0) continue;
            I += py[y] * cond[y] * (std::log(cond[y]) - std::log(mix));
        }
    }
    return std::max(0.0, I);
}

// ---------------------------------------------------------------------------
// Delta-scaling tables: finite-Delta discretization versus the region targets
// ---------------------------------------------------------------------------

struct DeltaScaleRow {
    double delta;
    double I_over_delta;
    double R_target;
    double E_dbar;
    double D_target;
    double overflow_term;  // kappa * lambda * (1 - exp(-lambda delta)) <= kappa lambda^2 delta
};

// Single-encoder (constrained functional covering).  The reconstruction map
// defaults to the exact Psi minimizer per atom; a caller-provided map must
// satisfy the Psi equation within its chosen slack.
inline std::vector<DeltaScaleRow> delta_scaling_single(
    double lambda, const ReconSet& A, const AtomVec& alpha, const AtomVec& beta,
    const std::vector<double>& deltas, const std::array<double, 4>* recon_map = nullptr) {
    if (!(lambda > 0)) throw std::invalid_argument("delta_scaling_single: lambda must be > 0");
    const double R = lambda * kl_atoms(beta, alpha);

    std::array<double, 4> yhat{};
    for (int k = 0; k < 4; ++k) {
        if (recon_map) {
            yhat[k] = (*recon_map)[k];
        } else if (alpha[k] > 0) {
            yhat[k] = psi(A, lambda * beta[k] / alpha[k]).minimizer;
        } else {
            yhat[k] = 1.0;  // zero-mass atom, value irrelevant
        }
    }
    // E[dbar] limit for this reconstruction map (equals the Psi target when
    // the map is the exact minimizer)
    double D = 0;
    for (int k = 0; k < 4; ++k) {
        if (alpha[k] == 0) continue;
        const double u = lambda * beta[k] / alpha[k];
        D += alpha[k] * (yhat[k] - xlogy(u, yhat[k]));
    }
    double kappa = 0;
    for (int k = 0; k < 4; ++k)
        if (yhat[k] > 0 && (alpha[k] > 0 || beta[k] > 0))
            kappa = std::max(kappa, std::abs(std::log(yhat[k])));

    std::vector<DeltaScaleRow> rows;
    for (double d : deltas) {
        const double q = -std::expm1(-lambda * d);
        const TestChannel ch{alpha, beta};
        double Ed = 0;
        for (int k = 0; k < 4; ++k) {
            if (alpha[k] > 0) Ed += (1 - q) * alpha[k] * dbar(yhat[k], 0, d);
            if (beta[k] > 0) Ed += q * beta[k] * dbar(yhat[k], 1, d);
        }
        rows.push_back({d, mi_binary_channel(q, ch) / d, R, Ed, D, kappa * lambda * q});
    }
    return rows;
}

// Per-slot conditional law P(Ybar_i | Ybar) of encoder i's bit given the
// source bit, via the thinning split: survivors of a p-thinning are Poisson
// (1-p)lambda, independent of the removed points, and the added noise is
// Poisson mu.  Row y in {0,1}, column yi in {0,1}.
inline std::array<std::array<double, 2>, 2> derive_observation_channel(double lambda, double p,
                                                                       double mu, double delta) {
    if (!(lambda > 0)) throw std::invalid_argument("derive_observation_channel: lambda must be > 0");
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("derive_observation_channel: p in [0,1]");
    if (mu < 0 || !(delta > 0)) throw std::invalid_argument("derive_observation_channel: bad mu/delta");
    const double no_noise = std::exp(-mu * delta);
    // P(no surviving source point | >= 1 source point in the slot)
    double no_survivor_given_occupied;
    if (p == 0) {
        no_survivor_given_occupied = 0.0;
    } else if (p == 1) {
        no_survivor_given_occupied = 1.0;
    } else {
        no_survivor_given_occupied = std::exp(-(1 - p) * lambda * delta) *
                                     (-std::expm1(-p * lambda * delta)) /
                                     (-std::expm1(-lambda * delta));
    }
    std::array<std::array<double, 2>, 2> ch{};
    ch[0][0] = no_noise;
    ch[0][1] = 1 - no_noise;
    ch[1][0] = no_noise * no_survivor_given_occupied;
    ch[1][1] = 1 - ch[1][0];
    return ch;
}

// Exact joint law of (U1, U2) given the source slot bit, enumerating the
// latent slot count.  Needed because the two encoders' bits are dependent
// given Ybar = 1 (they share the count).
struct CeoSlotJoint {
    std::array<std::array<double, 4>, 4> given_y0{};
    std::array<std::array<double, 4>, 4> given_y1{};
    double pY1 = 0;
};

inline CeoSlotJoint ceo_slot_joint(double lambda, std::array<double, 2> p, std::array<double, 2> mu,
                                   const std::array<TestChannel, 2>& ch, double delta) {
    CeoSlotJoint out;
    out.pY1 = -std::expm1(-lambda * delta);
    const std::array<double, 2> no_noise{std::exp(-mu[0] * delta), std::exp(-mu[1] * delta)};

    // P(U_i = k | Y=0): only noise can set the bit
    std::array<std::array<double, 4>, 2> u_given_empty{};
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 4; ++k)
            u_given_empty[i][k] = no_noise[i] * ch[i].alpha[k] + (1 - no_noise[i]) * ch[i].beta[k];
    for (int k1 = 0; k1 < 4; ++k1)
        for (int k2 = 0; k2 < 4; ++k2)
            out.given_y0[k1][k2] = u_given_empty[0][k1] * u_given_empty[1][k2];

    // P(U1,U2 | Y=1) = sum_{c>=1} P(C=c | C>=1) prod_i P(U_i | C=c); the
    // encoders are conditionally independent given the latent count c
    const double lam_dt = lambda * delta;
    double log_pmf = -lam_dt;  // log P(C=0)
    double pc = 0;
    for (int c = 1; c <= 400; ++c) {
        log_pmf += std::log(lam_dt / c);
        pc = std::exp(log_pmf) / out.pY1;
        if (c > 2 && pc < 1e-18) break;
        std::array<std::array<double, 4>, 2> u_given_c{};
        for (int i = 0; i < 2; ++i) {
            const double bit_zero = no_noise[i] * std::pow(p[i], c);
            for (int k = 0; k < 4; ++k)
                u_given_c[i][k] = bit_zero * ch[i].alpha[k] + (1 - bit_zero) * ch[i].beta[k];
        }
        for (int k1 = 0; k1 < 4; ++k1)
            for (int k2 = 0; k2 < 4; ++k2)
                out.given_y1[k1][k2] += pc * u_given_c[0][k1] * u_given_c[1][k2];
    }
    return out;
}

struct CeoDeltaRow {
    double delta;
    std::array<double, 2> I_over_delta;
    std::array<double, 2> R_target;
    double E_dbar;
    double D_target;
    double E_yhat;         // -> lambda as delta -> 0
    double overflow_term;  // kappa * lambda * (1 - exp(-lambda delta))
};

// Two-encoder delta-scaling: per-encoder MI scaling against the region's
// rates and E[dbar] of the product reconstruction against the region's D.
inline std::vector<CeoDeltaRow> delta_scaling_ceo(double lambda, std::array<double, 2> p,
                                                  std::array<double, 2> mu,
                                                  const std::array<TestChannel, 2>& ch,
                                                  const std::vector<double>& deltas) {
    if (!(lambda > 0)) throw std::invalid_argument("delta_scaling_ceo: lambda must be > 0");
    std::array<double, 2> R{};
    std::array<AtomVec, 2> gamma{ceo_gamma(p[0], ch[0].alpha, ch[0].beta),
                                 ceo_gamma(p[1], ch[1].alpha, ch[1].beta)};
    double D = xi(lambda);
    for (int i = 0; i < 2; ++i) {
        R[i] = ((1 - p[i]) * lambda + mu[i]) * kl_atoms(ch[i].beta, ch[i].alpha);
        D -= lambda * kl_atoms(gamma[i], ch[i].alpha);
    }

    // product reconstruction yhat(k1,k2) = lambda * (g1/a1) * (g2/a2)
    std::array<std::array<double, 2>, 4> ratio{};
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 2; ++i)
            ratio[k][i] = ch[i].alpha[k] > 0 ? gamma[i][k] / ch[i].alpha[k] : 1.0;
    double kappa = 0;
    for (int k1 = 0; k1 < 4; ++k1)
        for (int k2 = 0; k2 < 4; ++k2) {
            double yh = lambda * ratio[k1][0] * ratio[k2][1];
            if (yh > 0) kappa = std::max(kappa, std::abs(std::log(yh)));
        }

    std::vector<CeoDeltaRow> rows;
    for (double d : deltas) {
        CeoDeltaRow row{};
        row.delta = d;
        row.R_target = R;
        row.D_target = D;
        for (int i = 0; i < 2; ++i) {
            const double qi = -std::expm1(-((1 - p[i]) * lambda + mu[i]) * d);
            row.I_over_delta[i] = mi_binary_channel(qi, ch[i]) / d;
        }
        const CeoSlotJoint joint = ceo_slot_joint(lambda, p, mu, ch, d);
        double Ed = 0, Ey = 0;
        for (int k1 = 0; k1 < 4; ++k1)
            for (int k2 = 0; k2 < 4; ++k2) {
                const double yh = lambda * ratio[k1][0] * ratio[k2][1];
                const double p0 = (1 - joint.pY1) * joint.given_y0[k1][k2];
                const double p1 = joint.pY1 * joint.given_y1[k1][k2];
                if (p0 > 0) Ed += p0 * dbar(yh, 0, d);
                if (p1 > 0) Ed += p1 * dbar(yh, 1, d);
                Ey += (p0 + p1) * yh;
            }
        row.E_dbar = Ed;
        row.E_yhat = Ey;
        row.overflow_term = kappa * lambda * joint.pY1;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ppcover

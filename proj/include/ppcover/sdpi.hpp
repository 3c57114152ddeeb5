#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ppcover/numeric.hpp"
#include "ppcover/rng.hpp"

namespace ppcover {

// Exact mutual information of a finite joint pmf joint[a][b]; zero-mass cells
// are skipped.
inline double exact_mi(const std::vector<std::vector<double>>& joint) {
    double total = 0;
    for (const auto& row : joint)
        for (double v : row) {
            if (v < 0) throw std::invalid_argument("exact_mi: negative mass");
            total += v;
        }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("exact_mi: joint must sum to 1");
    const std::size_t A = joint.size();
    if (A == 0) return 0;
    const std::size_t B = joint[0].size();
    std::vector<double> pa(A, 0.0), pb(B, 0.0);
    for (std::size_t a = 0; a < A; ++a)
        for (std::size_t b = 0; b < B; ++b) {
            pa[a] += joint[a][b];
            pb[b] += joint[a][b];
        }
    double I = 0;
    for (std::size_t a = 0; a < A; ++a)
        for (std::size_t b = 0; b < B; ++b) {
            const double p = joint[a][b];
            if (p <= 0) continue;
            I += p * std::log(p / (pa[a] * pb[b]));
        }
    return std::max(0.0, I);
}

// Finite surrogate for (M, Y_0^T): message pmf and per-message slot count
// laws on {0..cmax}, slots conditionally independent given the message.
struct FiniteModel {
    double delta = 0;
    std::vector<double> message_pmf;                        // [m]
    std::vector<std::vector<std::vector<double>>> counts;   // [m][slot][count]

    std::size_t messages() const { return message_pmf.size(); }
    std::size_t slots() const { return counts.empty() ? 0 : counts[0].size(); }
    int cmax() const { return counts.empty() || counts[0].empty() ? 0 : static_cast<int>(counts[0][0].size()) - 1; }

    void validate() const {
        check_pmf(message_pmf);
        for (const auto& per_m : counts)
            for (const auto& slot : per_m) check_pmf(slot, 1e-9);
    }
};

// smallest cmax with Poisson(mean) tail mass below tail_tol
inline int poisson_cmax(double mean, double tail_tol = 1e-12) {
    double pmf = std::exp(-mean), cdf = pmf;
    int c = 0;
    while (1 - cdf > tail_tol && c < 400) {
        ++c;
        pmf *= mean / c;
        cdf += pmf;
    }
    return c;
}

inline std::vector<double> truncated_poisson(double mean, int cmax) {
    std::vector<double> p(cmax + 1);
    double lp = -mean;
    p[0] = std::exp(lp);
    for (int c = 1; c <= cmax; ++c) {
        lp += std::log(mean) - std::log(static_cast<double>(c));
        p[c] = std::exp(lp);
    }
    double s = 0;
    for (double v : p) s += v;
    for (auto& v : p) v /= s;
    return p;
}

namespace sdpi_detail {

// Random conditional slot laws for one message component: rows drawn around
// the target and deviation-projected so the prior-average equals the target
// exactly.
inline std::pair<std::vector<double>, std::vector<std::vector<double>>> random_component(
    std::size_t levels, const std::vector<double>& target, RngStream& rng) {
    const std::size_t C = target.size();
    std::vector<double> prior(levels);
    double ps = 0;
    for (auto& v : prior) {
        v = 0.05 + rng.next_double();
        ps += v;
    }
    for (auto& v : prior) v /= ps;

    std::vector<std::vector<double>> rows(levels, std::vector<double>(C));
    std::vector<double> avg(C, 0.0);
    for (std::size_t i = 0; i < levels; ++i) {
        double t = 0;
        for (std::size_t c = 0; c < C; ++c) {
            rows[i][c] = target[c] * std::pow(rng.next_double(), 3.0) + 1e-30;
            t += rows[i][c];
        }
        for (std::size_t c = 0; c < C; ++c) rows[i][c] /= t;
        for (std::size_t c = 0; c < C; ++c) avg[c] += prior[i] * rows[i][c];
    }
    double theta = 1.0;
    for (std::size_t i = 0; i < levels; ++i)
        for (std::size_t c = 0; c < C; ++c) {
            const double dev = rows[i][c] - avg[c];
            if (target[c] + theta * dev < 0) theta = -target[c] / dev;
        }
    theta *= 0.95;
    for (std::size_t i = 0; i < levels; ++i)
        for (std::size_t c = 0; c < C; ++c) rows[i][c] = target[c] + theta * (rows[i][c] - avg[c]);
    return {prior, rows};
}

}  // namespace sdpi_detail

// Random model whose joint slot-count marginal is exactly the product of
// (truncated) Poisson laws -- i.e. a genuine discretized Poisson process.
// The message splits into independent components, one per informative slot,
// each with rows deviation-projected so its prior-average equals the target
// law.  A plain mixture with matched per-slot marginals is NOT enough: the
// joint marginal is then no longer Poisson across slots and the thinning
// inequality can fail.
inline FiniteModel random_marginal_poisson_model(double lambda, double delta, std::size_t slots,
                                                 std::size_t messages, int cmax, RngStream& rng) {
    if (messages < 2 || messages > 4)
        throw std::invalid_argument("random_marginal_poisson_model: messages in {2,3,4}");
    if (slots < 1) throw std::invalid_argument("random_marginal_poisson_model: slots >= 1");
    const double mean = lambda * delta;
    const std::vector<double> target = truncated_poisson(mean, cmax);

    FiniteModel model;
    model.delta = delta;

    const bool two_components = messages == 4 && slots >= 2 && rng.next_bernoulli(0.5);
    if (!two_components) {
        auto [prior, rows] = sdpi_detail::random_component(messages, target, rng);
        const std::size_t slot = rng.next_u64() % slots;
        model.message_pmf = prior;
        model.counts.assign(messages, std::vector<std::vector<double>>(slots, target));
        for (std::size_t m = 0; m < messages; ++m) model.counts[m][slot] = rows[m];
    } else {
        auto [p1, r1] = sdpi_detail::random_component(2, target, rng);
        auto [p2, r2] = sdpi_detail::random_component(2, target, rng);
        const std::size_t s1 = rng.next_u64() % slots;
        std::size_t s2 = rng.next_u64() % (slots - 1);
        if (s2 >= s1) ++s2;
        model.message_pmf.resize(4);
        model.counts.assign(4, std::vector<std::vector<double>>(slots, target));
        for (int i1 = 0; i1 < 2; ++i1)
            for (int i2 = 0; i2 < 2; ++i2) {
                const std::size_t idx = 2 * i1 + i2;
                model.message_pmf[idx] = p1[i1] * p2[i2];
                model.counts[idx][s1] = r1[i1];
                model.counts[idx][s2] = r2[i2];
            }
    }
    model.validate();
    return model;
}

// push every slot law through the binomial(., 1-p) thinning kernel
inline FiniteModel apply_thinning(const FiniteModel& model, double p) {
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("apply_thinning: p in [0,1]");
    const int cmax = model.cmax();
    // kernel[c][r] = P(Binomial(c, 1-p) = r)
    std::vector<std::vector<double>> kernel(cmax + 1, std::vector<double>(cmax + 1, 0.0));
    for (int c = 0; c <= cmax; ++c) {
        if (p == 0) {
            kernel[c][c] = 1;
            continue;
        }
        if (p == 1) {
            kernel[c][0] = 1;
            continue;
        }
        double pr = std::pow(p, c);  // r = 0
        for (int r = 0; r <= c; ++r) {
            kernel[c][r] = pr;
            // advance r -> r+1: * C(c,r+1)/C(c,r) * (1-p)/p
            pr *= static_cast<double>(c - r) / (r + 1) * (1 - p) / p;
        }
    }
    FiniteModel out = model;
    for (auto& per_m : out.counts)
        for (auto& slot : per_m) {
            if (p == 1) {  // exact: everything lands on zero counts
                std::fill(slot.begin(), slot.end(), 0.0);
                slot[0] = 1.0;
                continue;
            }
            std::vector<double> res(cmax + 1, 0.0);
            for (int c = 0; c <= cmax; ++c)
                for (int r = 0; r <= c; ++r) res[r] += slot[c] * kernel[c][r];
            slot = res;
        }
    return out;
}

// I(M; counts) by exhaustive enumeration of the joint count vector.  The
// message marginal is taken from the joint itself (pmf rows sum to 1 only up
// to roundoff), so independent joints come out exactly zero.
inline double model_mi(const FiniteModel& model) {
    const std::size_t M = model.messages(), n = model.slots();
    const int levels = model.cmax() + 1;
    std::size_t cells = 1;
    for (std::size_t j = 0; j < n; ++j) {
        cells *= static_cast<std::size_t>(levels);
        if (cells > (std::size_t{1} << 34))
            throw std::invalid_argument("model_mi: state space too large for exact enumeration");
    }
    std::vector<double> pa(M);
    double total = 0;
    for (std::size_t m = 0; m < M; ++m) {
        double pr = model.message_pmf[m];
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0;
            for (int c = 0; c < levels; ++c) s += model.counts[m][j][c];
            pr *= s;
        }
        pa[m] = pr;
        total += pr;
    }

    std::vector<int> c(n, 0);
    std::vector<double> pj(M);
    double I = 0;
    for (std::size_t cell = 0;; ++cell) {
        double marg = 0;
        for (std::size_t m = 0; m < M; ++m) {
            double pr = model.message_pmf[m];
            for (std::size_t j = 0; j < n; ++j) pr *= model.counts[m][j][c[j]];
            pj[m] = pr;
            marg += pr;
        }
        if (marg > 0)
            for (std::size_t m = 0; m < M; ++m)
                if (pj[m] > 0) I += pj[m] * std::log(pj[m] * total / (pa[m] * marg));
        // odometer
        std::size_t j = 0;
        while (j < n && ++c[j] == levels) c[j++] = 0;
        if (j == n) break;
        if (cell + 2 > cells) break;
    }
    return std::max(0.0, I);
}

struct SdpiCheck {
    double lhs;    // I(M; thinned)
    double rhs;    // (1-p) I(M; original)
    double slack;  // rhs - lhs, >= 0 up to roundoff for marginally Poisson models
};

inline SdpiCheck thinning_sdpi_check(const FiniteModel& model, double p) {
    const double iy = model_mi(model);
    const double iz = model_mi(apply_thinning(model, p));
    return {iz, (1 - p) * iy, (1 - p) * iy - iz};
}

// ---------------------------------------------------------------------------
// superposition bound (delta-refinable family)
// ---------------------------------------------------------------------------

// Y is exactly Poisson(lambda) on [0,T]; the message is an m-ary noisy
// observation of K = 1{Y_T >= 1} through channel[m][k] = P(M=m | K=k).
// Refining the slot width keeps the model consistent, so the bound can be
// tracked along a Delta sequence.
struct SuperpositionModel {
    double lambda = 1;
    double horizon = 1;
    std::vector<std::array<double, 2>> channel;  // [m][k]

    std::size_t messages() const { return channel.size(); }

    void validate() const {
        if (!(lambda > 0) || !(horizon > 0))
            throw std::invalid_argument("SuperpositionModel: lambda, horizon must be > 0");
        for (int k = 0; k < 2; ++k) {
            double s = 0;
            for (const auto& row : channel) {
                if (row[k] < 0) throw std::invalid_argument("SuperpositionModel: negative channel entry");
                s += row[k];
            }
            if (std::abs(s - 1.0) > 1e-12)
                throw std::invalid_argument("SuperpositionModel: channel columns must be pmfs");
        }
    }
};

// I(M; Z_0^T) where Z = Y + independent Poisson(mu) noise.  The posterior of
// K given the noisy path depends only on the total count S, so I(M;Z) =
// I(M;S) exactly; the S-tail is folded into one aggregate bucket to keep the
// joint exact.
inline double superposition_mi(const SuperpositionModel& model, double mu) {
    const double T = model.horizon;
    const double delta_T = std::exp(-model.lambda * T);
    const double total_mean = (model.lambda + mu) * T;
    const double noise_mean = mu * T;

    std::vector<double> ptotal, pk0;
    double cum = 0;
    double lp_total = -total_mean, lp_noise = -noise_mean;
    for (int s = 0; cum < 1 - 1e-15 && s < 4000; ++s) {
        if (s > 0) {
            lp_total += std::log(total_mean) - std::log(static_cast<double>(s));
            lp_noise += noise_mean > 0 ? std::log(noise_mean) - std::log(static_cast<double>(s))
                                       : -std::numeric_limits<double>::infinity();
        }
        const double pt = std::exp(lp_total);
        const double pn = noise_mean > 0 ? std::exp(lp_noise) : (s == 0 ? 1.0 : 0.0);
        ptotal.push_back(pt);
        pk0.push_back(delta_T * pn);
        cum += pt;
    }
    // aggregate tail bucket keeps the pmf exact
    double tail_total = std::max(0.0, 1 - cum), tail_k0 = delta_T;
    for (double v : pk0) tail_k0 -= v;
    tail_k0 = std::max(0.0, tail_k0);
    ptotal.push_back(tail_total);
    pk0.push_back(std::min(tail_k0, tail_total));

    std::vector<std::vector<double>> joint(model.messages(), std::vector<double>(ptotal.size()));
    for (std::size_t m = 0; m < model.messages(); ++m)
        for (std::size_t s = 0; s < ptotal.size(); ++s) {
            const double k1 = std::max(0.0, ptotal[s] - pk0[s]);
            joint[m][s] = model.channel[m][0] * pk0[s] + model.channel[m][1] * k1;
        }
    return exact_mi(joint);
}

struct SuperpositionRow {
    double delta;
    double lhs;    // I(M; Z)
    double rhs;    // sum_j Delta E[phi(Gamma_j + mu) - phi(lambda + mu)]
    double slack;  // rhs - lhs; >= -c Delta with the discrete Gamma surrogate
};

// Discrete bound with the slot-conditional intensity surrogate
// Gamma_j = P(count_j >= 1 | M, past)/Delta.
inline std::vector<SuperpositionRow> superposition_bound_check(const SuperpositionModel& model,
                                                               double mu,
                                                               const std::vector<double>& deltas) {
    model.validate();
    if (mu < 0) throw std::invalid_argument("superposition_bound_check: mu must be >= 0");
    const double lambda = model.lambda, T = model.horizon;
    const double delta_T = std::exp(-lambda * T);
    const double lhs = superposition_mi(model, mu);

    std::vector<SuperpositionRow> rows;
    for (double d : deltas) {
        const double ratio = T / d;
        const auto n = static_cast<std::size_t>(std::llround(ratio));
        if (std::abs(ratio - static_cast<double>(n)) > 1e-9 || n == 0)
            throw std::invalid_argument("superposition_bound_check: delta must divide the horizon");
        const double q = -std::expm1(-lambda * d);  // P(slot occupied)
        double bound = 0;
        for (std::size_t j = 1; j <= n; ++j) {
            const double Ej = std::exp(-lambda * d * static_cast<double>(j - 1));
            for (std::size_t m = 0; m < model.messages(); ++m) {
                // still empty before slot j
                const double p_zeros =
                    model.channel[m][0] * delta_T + model.channel[m][1] * (Ej - delta_T);
                if (p_zeros > 0) {
                    const double gamma = model.channel[m][1] * Ej * q / (p_zeros * d);
                    bound += d * p_zeros * phi(gamma + mu);
                }
                // an arrival already seen
                const double p_seen = model.channel[m][1] * (1 - Ej);
                if (p_seen > 0) bound += d * p_seen * phi(q / d + mu);
            }
        }
        bound -= T * phi(lambda + mu);
        rows.push_back({d, lhs, bound, bound - lhs});
    }
    return rows;
}

// I(M;K) -- data-processing ceiling for every superposition check
inline double superposition_mi_ceiling(const SuperpositionModel& model) {
    const double delta_T = std::exp(-model.lambda * model.horizon);
    std::vector<std::vector<double>> joint(model.messages(), std::vector<double>(2));
    for (std::size_t m = 0; m < model.messages(); ++m) {
        joint[m][0] = model.channel[m][0] * delta_T;
        joint[m][1] = model.channel[m][1] * (1 - delta_T);
    }
    return exact_mi(joint);
}

inline SuperpositionModel random_superposition_model(RngStream& rng) {
    SuperpositionModel m;
    m.lambda = 0.5 + 1.5 * rng.next_double();
    m.horizon = 0.2;
    const std::size_t messages = 2 + rng.next_u64() % 3;
    m.channel.assign(messages, {0.0, 0.0});
    for (int k = 0; k < 2; ++k) {
        double s = 0;
        for (auto& row : m.channel) {
            row[k] = 0.02 + rng.next_double();
            s += row[k];
        }
        for (auto& row : m.channel) row[k] /= s;
    }
    return m;
}

// ---------------------------------------------------------------------------
// batch drivers (CSV rows: model_id, p_or_mu, delta, lhs, rhs, slack)
// ---------------------------------------------------------------------------

struct SdpiBatchRow {
    int model_id;
    double p_or_mu;
    double delta;
    double lhs;
    double rhs;
    double slack;
};

// Truncation below 1e-12 with cmax = 4 requires lambda*delta <~ 0.0104;
// the batch draws means in [0.002, 0.0104].
inline std::vector<SdpiBatchRow> thinning_batch(int models, std::uint64_t seed,
                                                const std::vector<double>& p_grid, int cmax = 4) {
    std::vector<SdpiBatchRow> rows;
    for (int id = 0; id < models; ++id) {
        RngStream rng = RngStream::substream(seed, static_cast<std::uint64_t>(id));
        const double mean = 0.002 + 0.0084 * rng.next_double();
        const double delta = 0.01;
        const double lambda = mean / delta;
        const std::size_t slots = 1 + rng.next_u64() % 6;
        const std::size_t messages = 2 + rng.next_u64() % 3;
        const FiniteModel model =
            random_marginal_poisson_model(lambda, delta, slots, messages, cmax, rng);
        for (double p : p_grid) {
            const SdpiCheck c = thinning_sdpi_check(model, p);
            rows.push_back({id, p, delta, c.lhs, c.rhs, c.slack});
        }
    }
    return rows;
}

inline std::vector<SdpiBatchRow> superposition_batch(int models, std::uint64_t seed, double mu,
                                                     const std::vector<double>& deltas) {
    std::vector<SdpiBatchRow> rows;
    for (int id = 0; id < models; ++id) {
        RngStream rng = RngStream::substream(seed, static_cast<std::uint64_t>(id));
        const SuperpositionModel model = random_superposition_model(rng);
        for (const SuperpositionRow& r : superposition_bound_check(model, mu, deltas))
            rows.push_back({id, mu, r.delta, r.lhs, r.rhs, r.slack});
    }
    return rows;
}

}  // namespace ppcover

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "ppcover/analytic.hpp"
#include "ppcover/numeric.hpp"
#include "ppcover/recon.hpp"
#include "ppcover/rng.hpp"

namespace ppcover {

struct OptimizerOptions {
    int starts = 16;
    int max_iters = 4000;
    double tol = 1e-12;         // stop when a full sweep improves less than this
    double atom_floor = 1e-12;  // alpha stays >= floor (keeps rates finite)
};

struct FrontierPoint {
    std::vector<double> weights;  // supporting-hyperplane weights (1 or 2)
    RDPoint point;
    double objective = 0;         // achieved scalarized value
    double stationarity_gap = 0;  // KKT residual at the best iterate
    int iterations = 0;           // summed over starts
};

struct Frontier {
    std::vector<FrontierPoint> points;  // sorted by rate(s) ascending
};

inline std::vector<double> default_weight_grid(int n = 64, double lo = 1e-3, double hi = 1e3) {
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i)
        w[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
    return w;
}

inline std::vector<std::array<double, 2>> default_weight_pairs(int n_each = 12, double lo = 1e-3,
                                                               double hi = 1e3) {
    auto g = default_weight_grid(n_each, lo, hi);
    std::vector<std::array<double, 2>> out;
    out.reserve(g.size() * g.size());
    for (double w1 : g)
        for (double w2 : g) out.push_back({w1, w2});
    return out;
}

// ---------------------------------------------------------------------------
// scalarized minimization over (alpha, beta) in the product of 4-simplices
// ---------------------------------------------------------------------------

namespace opt_detail {

using Atoms = std::array<double, 4>;

inline AtomVec to_atomvec(const Atoms& a) {
    Atoms n = a;
    double s = n[0] + n[1] + n[2] + n[3];
    for (auto& x : n) x /= s;
    return AtomVec(n);
}

inline void normalize(Atoms& a) {
    double s = a[0] + a[1] + a[2] + a[3];
    for (auto& x : a) x /= s;
}

// Euclidean projection of the masked coordinates onto the simplex; masked-off
// coordinates stay zero.
inline Atoms project_masked(const Atoms& x, const std::array<bool, 4>& mask) {
    std::vector<double> sub;
    for (int k = 0; k < 4; ++k)
        if (mask[k]) sub.push_back(x[k]);
    project_simplex(sub);
    Atoms out{0, 0, 0, 0};
    std::size_t i = 0;
    for (int k = 0; k < 4; ++k)
        if (mask[k]) out[k] = sub[i++];
    return out;
}

inline Atoms floor_and_renorm(Atoms a, double floor) {
    for (auto& x : a) x = std::max(x, floor);
    normalize(a);
    return a;
}

// w R + D for the constrained functional-covering region.
struct ConstrainedObjective {
    double lambda;
    double w;
    const ReconSet* A;

    double eval(const Atoms& a, const Atoms& b) const {
        double R = 0, D = 0;
        for (int k = 0; k < 4; ++k) {
            if (b[k] > 0) R += b[k] * std::log(b[k] / a[k]);
            if (a[k] > 0) D += a[k] * psi_value(*A, lambda * b[k] / a[k]);
        }
        return w * lambda * R + D;
    }

    // beta_k proportional to alpha_k * v*(u_k)^(1/w) on the support
    Atoms tilt_beta(const Atoms& a, const Atoms& b, const std::array<bool, 4>& mask) const {
        Atoms lg{0, 0, 0, 0};
        double mx = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < 4; ++k) {
            if (!mask[k] || b[k] == 0) continue;
            double v = psi(*A, lambda * b[k] / a[k]).minimizer;
            lg[k] = std::log(a[k]) + std::log(v) / w;
            mx = std::max(mx, lg[k]);
        }
        Atoms out{0, 0, 0, 0};
        double z = 0;
        for (int k = 0; k < 4; ++k) {
            if (!mask[k] || b[k] == 0) continue;
            out[k] = std::exp(lg[k] - mx);
            z += out[k];
        }
        for (auto& x : out) x /= z;
        return out;
    }

    Atoms grad_beta(const Atoms& a, const Atoms& b) const {
        Atoms g{0, 0, 0, 0};
        for (int k = 0; k < 4; ++k) {
            if (b[k] == 0 || a[k] == 0) continue;
            double vstar = psi(*A, lambda * b[k] / a[k]).minimizer;
            g[k] = w * lambda * (std::log(b[k] / a[k]) + 1) -
                   lambda * (vstar > 0 ? std::log(vstar) : -700.0);
        }
        return g;
    }

    Atoms grad_alpha(const Atoms& a, const Atoms& b) const {
        Atoms g{0, 0, 0, 0};
        for (int k = 0; k < 4; ++k) {
            if (a[k] == 0) continue;
            double u = lambda * b[k] / a[k];
            g[k] = psi(*A, u).minimizer - w * u;
        }
        return g;
    }
};

// w R_i - lambda KL(gamma||alpha) for one CEO/remote encoder, dropping the
// additive constant lambda - phi(lambda) shared by all encoders.
struct EncoderObjective {
    double lambda;
    double p;
    double mu;
    double w;

    double cmul() const { return (1 - p) * lambda + mu; }

    double eval(const Atoms& a, const Atoms& b) const {
        double kl_b = 0, kl_g = 0;
        for (int k = 0; k < 4; ++k) {
            double g = p * a[k] + (1 - p) * b[k];
            if (b[k] > 0) kl_b += b[k] * std::log(b[k] / a[k]);
            if (g > 0) kl_g += g * std::log(g / a[k]);
        }
        return w * cmul() * kl_b - lambda * kl_g;
    }

    Atoms tilt_beta(const Atoms& a, const Atoms& b, const std::array<bool, 4>& mask) const {
        const double theta = lambda * (1 - p) / (w * cmul());
        Atoms lg{0, 0, 0, 0};
        double mx = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < 4; ++k) {
            if (!mask[k] || b[k] == 0) continue;
            double g = p * a[k] + (1 - p) * b[k];
            lg[k] = std::log(a[k]) + theta * std::log(g / a[k]);
            mx = std::max(mx, lg[k]);
        }
        Atoms out{0, 0, 0, 0};
        double z = 0;
        for (int k = 0; k < 4; ++k) {
            if (!mask[k] || b[k] == 0) continue;
            out[k] = std::exp(lg[k] - mx);
            z += out[k];
        }
        for (auto& x : out) x /= z;
        return out;
    }

    Atoms grad_beta(const Atoms& a, const Atoms& b) const {
        Atoms g{0, 0, 0, 0};
        for (int k = 0; k < 4; ++k) {
            if (b[k] == 0 || a[k] == 0) continue;
            double gm = p * a[k] + (1 - p) * b[k];
            g[k] = w * cmul() * (std::log(b[k] / a[k]) + 1) -
                   lambda * (1 - p) * (std::log(gm / a[k]) + 1);
        }
        return g;
    }

    Atoms grad_alpha(const Atoms& a, const Atoms& b) const {
        Atoms g{0, 0, 0, 0};
        for (int k = 0; k < 4; ++k) {
            if (a[k] == 0) continue;
            double gm = p * a[k] + (1 - p) * b[k];
            double lg = gm > 0 ? std::log(gm / a[k]) : -700.0;
            g[k] = -w * cmul() * b[k] / a[k] - lambda * p * (lg + 1) + lambda * gm / a[k];
        }
        return g;
    }
};

struct SolveResult {
    Atoms alpha{0.25, 0.25, 0.25, 0.25};
    Atoms beta{0.25, 0.25, 0.25, 0.25};
    double objective = 0;
    double gap = 0;
    int iterations = 0;
};

inline Atoms dirichlet(RngStream& rng, const std::array<bool, 4>& mask) {
    Atoms a{0, 0, 0, 0};
    double s = 0;
    for (int k = 0; k < 4; ++k) {
        if (!mask[k]) continue;
        a[k] = rng.next_exponential(1.0);
        s += a[k];
    }
    for (auto& x : a) x /= s;
    return a;
}

// Stationarity residual: projected-gradient norm on the active support.
// Boundary atoms are excluded -- several constraint sets make the objective
// non-smooth there (the Psi jump at u = 0), so a boundary multiplier test
// would flag valid optima.
inline double kkt_gap(const Atoms& g, const Atoms& x) {
    double mean = 0;
    int active = 0;
    for (int k = 0; k < 4; ++k)
        if (x[k] > 1e-9) {
            mean += g[k];
            ++active;
        }
    if (active == 0) return 0;
    mean /= active;
    double gap = 0;
    for (int k = 0; k < 4; ++k)
        if (x[k] > 1e-9) gap = std::max(gap, std::abs(g[k] - mean));
    return gap;
}

template <class Obj>
SolveResult solve_one_start(const Obj& obj, Atoms alpha, Atoms beta, const OptimizerOptions& opt) {
    const std::array<bool, 4> full{true, true, true, true};
    std::array<bool, 4> bmask{};
    for (int k = 0; k < 4; ++k) bmask[k] = beta[k] > 0;

    alpha = floor_and_renorm(alpha, opt.atom_floor);
    double f = obj.eval(alpha, beta);
    double eta_a = 0.1, eta_b = 0.1;
    int iters = 0;

    auto accept_convex = [&](Atoms& x, const Atoms& cand, bool is_alpha) {
        for (double t = 1.0; t > 1e-4; t *= 0.5) {
            Atoms xt;
            for (int k = 0; k < 4; ++k) xt[k] = (1 - t) * x[k] + t * cand[k];
            if (is_alpha) xt = floor_and_renorm(xt, opt.atom_floor);
            double ft = is_alpha ? obj.eval(xt, beta) : obj.eval(alpha, xt);
            if (ft < f) {
                x = xt;
                f = ft;
                return true;
            }
        }
        return false;
    };

    auto pgd = [&](Atoms& x, const Atoms& grad, const std::array<bool, 4>& mask, bool is_alpha,
                   double& eta) {
        double gmax = 0;
        for (int k = 0; k < 4; ++k)
            if (mask[k]) gmax = std::max(gmax, std::abs(grad[k]));
        if (gmax == 0) return false;
        double step = eta;
        for (int h = 0; h < 60; ++h) {
            Atoms cand;
            for (int k = 0; k < 4; ++k) cand[k] = mask[k] ? x[k] - step * grad[k] : 0.0;
            cand = project_masked(cand, mask);
            if (is_alpha) cand = floor_and_renorm(cand, opt.atom_floor);
            double fc = is_alpha ? obj.eval(cand, beta) : obj.eval(alpha, cand);
            if (fc < f) {
                x = cand;
                f = fc;
                eta = step * 2;
                return true;
            }
            step *= 0.25;
            if (step * gmax < 1e-18) break;
        }
        return false;
    };

    for (int it = 0; it < opt.max_iters; ++it) {
        ++iters;
        const double f_before = f;

        // beta step: analytic tilt first, projected gradient as fallback
        bool any = bmask[0] || bmask[1] || bmask[2] || bmask[3];
        if (any) {
            Atoms cand = obj.tilt_beta(alpha, beta, bmask);
            if (!accept_convex(beta, cand, false))
                pgd(beta, obj.grad_beta(alpha, beta), bmask, false, eta_b);
            // snap vanished atoms so boundary solutions are exact
            double bmax = *std::max_element(beta.begin(), beta.end());
            bool snapped = false;
            for (int k = 0; k < 4; ++k)
                if (bmask[k] && beta[k] < 1e-14 * bmax) {
                    beta[k] = 0;
                    bmask[k] = false;
                    snapped = true;
                }
            if (snapped) {
                normalize(beta);
                f = obj.eval(alpha, beta);
            }
        }

        // alpha step
        pgd(alpha, obj.grad_alpha(alpha, beta), full, true, eta_a);

        if (f_before - f < opt.tol) break;
    }

    SolveResult r;
    r.alpha = alpha;
    r.beta = beta;
    r.objective = f;
    r.iterations = iters;
    r.gap = std::max(kkt_gap(obj.grad_alpha(alpha, beta), alpha),
                     kkt_gap(obj.grad_beta(alpha, beta), beta));
    return r;
}

template <class Obj>
SolveResult solve_scalarized(const Obj& obj, const OptimizerOptions& opt) {
    const std::array<bool, 4> full{true, true, true, true};
    SolveResult best;
    best.objective = std::numeric_limits<double>::infinity();
    int total_iters = 0;

    auto consider = [&](Atoms a, Atoms b) {
        SolveResult r = solve_one_start(obj, a, b, opt);
        total_iters += r.iterations;
        if (r.objective < best.objective) best = r;
    };

    const Atoms uniform{0.25, 0.25, 0.25, 0.25};
    consider(uniform, uniform);                              // zero-rate
    consider(uniform, Atoms{1, 0, 0, 0});                    // one-hot
    consider(Atoms{0.5, 0.5, 0, 0}, Atoms{1, 0, 0, 0});      // covering pattern
    consider(Atoms{0.5, 0.5, 0, 0}, Atoms{0.5, 0.5, 0, 0});  // two-atom interior

    int extra = std::max(0, opt.starts - 4);
    for (int s = 0; s < extra; ++s) {
        RngStream rng(hash_combine(0x5EEDF00DULL, static_cast<std::uint64_t>(s)));
        Atoms a = dirichlet(rng, full);
        int support = 1 + static_cast<int>(rng.next_u64() % 4);
        std::array<bool, 4> bmask{false, false, false, false};
        for (int k = 0; k < support; ++k) bmask[k] = true;
        Atoms b = dirichlet(rng, bmask);
        consider(a, b);
    }
    best.iterations = total_iters;
    return best;
}

}  // namespace opt_detail

// ---------------------------------------------------------------------------
// frontiers
// ---------------------------------------------------------------------------

namespace opt_detail {

// Interpolation error bound between two supporting-hyperplane points: the
// chord is achievable, the two supporting lines bound the region from below;
// their worst-case spread bounds the frontier interpolation error.
inline double chord_gap(double w1, double R1, double D1, double w2, double R2, double D2) {
    if (std::abs(D2 - D1) < 1e-15) return 0.0;
    const double c1 = w1 * R1 + D1, c2 = w2 * R2 + D2;
    if (std::abs(w2 - w1) < 1e-15) return 0.0;
    double dx = (w2 * c1 - w1 * c2) / (w2 - w1);
    dx = std::clamp(dx, std::min(D1, D2), std::max(D1, D2));
    const double chord = R1 + (R2 - R1) * (dx - D1) / (D2 - D1);
    const double support = std::max((c1 - dx) / w1, (c2 - dx) / w2);
    return chord - support;
}

}  // namespace opt_detail

inline Frontier constrained_frontier(double lambda, const ReconSet& A, std::vector<double> weights,
                                     double refine_tol, const OptimizerOptions& opt = {},
                                     int max_points = 2048, int threads = 1) {
    if (!(lambda > 0)) throw std::invalid_argument("constrained_frontier: lambda must be > 0");
    for (double w : weights)
        if (!(w > 0)) throw std::invalid_argument("constrained_frontier: weights must be > 0");
    std::sort(weights.begin(), weights.end());
    weights.erase(std::unique(weights.begin(), weights.end()), weights.end());

    std::map<double, FrontierPoint> by_weight;
    auto solve_batch = [&](const std::vector<double>& ws) {
        std::vector<FrontierPoint> results(ws.size());
        parallel_for(ws.size(), threads, [&](std::size_t i) {
            opt_detail::ConstrainedObjective obj{lambda, ws[i], &A};
            auto r = opt_detail::solve_scalarized(obj, opt);
            FrontierPoint fp;
            fp.weights = {ws[i]};
            fp.point = constrained_region_point(lambda, A, opt_detail::to_atomvec(r.alpha),
                                                opt_detail::to_atomvec(r.beta));
            fp.objective = r.objective;
            fp.stationarity_gap = r.gap;
            fp.iterations = r.iterations;
            results[i] = fp;
        });
        for (auto& fp : results) by_weight[fp.weights[0]] = fp;
    };

    solve_batch(weights);

    if (refine_tol > 0) {
        for (int round = 0; round < 24 && static_cast<int>(by_weight.size()) < max_points; ++round) {
            std::vector<double> inserts;
            auto it = by_weight.begin();
            auto prev = it++;
            for (; it != by_weight.end(); ++prev, ++it) {
                const auto& p1 = prev->second;
                const auto& p2 = it->second;
                double gap = opt_detail::chord_gap(p1.weights[0], p1.point.rates[0],
                                                   p1.point.distortion, p2.weights[0],
                                                   p2.point.rates[0], p2.point.distortion);
                if (gap > refine_tol && it->first / prev->first > 1.0 + 1e-9)
                    inserts.push_back(std::sqrt(prev->first * it->first));
            }
            if (inserts.empty()) break;
            if (static_cast<int>(by_weight.size() + inserts.size()) > max_points)
                inserts.resize(max_points - by_weight.size());
            solve_batch(inserts);
        }
    }

    Frontier f;
    for (auto& [w, fp] : by_weight) f.points.push_back(fp);
    std::sort(f.points.begin(), f.points.end(), [](const FrontierPoint& a, const FrontierPoint& b) {
        return a.point.rates[0] < b.point.rates[0];
    });
    return f;
}

// Rate of the traced frontier at distortion D by chord interpolation between
// the bracketing points (valid up to the refinement gap).
inline double frontier_rate_at(const Frontier& f, double D) {
    if (f.points.empty()) throw std::invalid_argument("frontier_rate_at: empty frontier");
    std::vector<std::pair<double, double>> dr;
    for (const auto& p : f.points) dr.emplace_back(p.point.distortion, p.point.rates[0]);
    std::sort(dr.begin(), dr.end());
    if (D <= dr.front().first) return dr.front().second;
    if (D >= dr.back().first) return dr.back().second;
    for (std::size_t i = 1; i < dr.size(); ++i) {
        if (D <= dr[i].first) {
            const auto& [d1, r1] = dr[i - 1];
            const auto& [d2, r2] = dr[i];
            if (d2 - d1 < 1e-300) return std::min(r1, r2);
            return r1 + (r2 - r1) * (D - d1) / (d2 - d1);
        }
    }
    return dr.back().second;
}

namespace opt_detail {

inline SolveResult solve_encoder(double lambda, double p, double mu, double w,
                                 const OptimizerOptions& opt) {
    SolveResult r;
    if (p == 1.0) {
        // observation independent of the source: alpha = beta = gamma forced
        r.alpha = {0.25, 0.25, 0.25, 0.25};
        r.beta = r.alpha;
        r.objective = 0;
        return r;
    }
    EncoderObjective obj{lambda, p, mu, w};
    return solve_scalarized(obj, opt);
}

}  // namespace opt_detail

inline Frontier ceo_frontier(double lambda, double p1, double p2, double mu1, double mu2,
                             const std::vector<std::array<double, 2>>& weight_pairs,
                             const OptimizerOptions& opt = {}, int threads = 1) {
    if (!(lambda > 0)) throw std::invalid_argument("ceo_frontier: lambda must be > 0");
    // the scalarized objective separates per encoder, so solve each distinct
    // weight once and combine
    std::array<std::vector<double>, 2> distinct;
    for (const auto& wp : weight_pairs) {
        distinct[0].push_back(wp[0]);
        distinct[1].push_back(wp[1]);
    }
    std::array<std::map<double, opt_detail::SolveResult>, 2> solved;
    const std::array<double, 2> ps{p1, p2};
    const std::array<double, 2> mus{mu1, mu2};
    for (int i = 0; i < 2; ++i) {
        auto& ws = distinct[i];
        std::sort(ws.begin(), ws.end());
        ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
        std::vector<opt_detail::SolveResult> res(ws.size());
        parallel_for(ws.size(), threads, [&](std::size_t j) {
            if (!(ws[j] > 0)) throw std::invalid_argument("ceo_frontier: weights must be > 0");
            res[j] = opt_detail::solve_encoder(lambda, ps[i], mus[i], ws[j], opt);
        });
        for (std::size_t j = 0; j < ws.size(); ++j) solved[i][ws[j]] = res[j];
    }

    Frontier f;
    for (const auto& wp : weight_pairs) {
        const auto& r1 = solved[0].at(wp[0]);
        const auto& r2 = solved[1].at(wp[1]);
        FrontierPoint fp;
        fp.weights = {wp[0], wp[1]};
        fp.point = ceo_region_point(lambda, p1, p2, mu1, mu2, opt_detail::to_atomvec(r1.alpha),
                                    opt_detail::to_atomvec(r1.beta), opt_detail::to_atomvec(r2.alpha),
                                    opt_detail::to_atomvec(r2.beta));
        fp.objective = wp[0] * fp.point.rates[0] + wp[1] * fp.point.rates[1] + fp.point.distortion;
        fp.stationarity_gap = std::max(r1.gap, r2.gap);
        fp.iterations = r1.iterations + r2.iterations;
        f.points.push_back(fp);
    }
    std::sort(f.points.begin(), f.points.end(), [](const FrontierPoint& a, const FrontierPoint& b) {
        if (a.point.rates[0] != b.point.rates[0]) return a.point.rates[0] < b.point.rates[0];
        return a.point.rates[1] < b.point.rates[1];
    });
    return f;
}

inline Frontier remote_frontier(double lambda, double p, double mu, const std::vector<double>& weights,
                                const OptimizerOptions& opt = {}, int threads = 1) {
    if (!(lambda > 0)) throw std::invalid_argument("remote_frontier: lambda must be > 0");
    std::vector<double> ws = weights;
    std::sort(ws.begin(), ws.end());
    ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
    std::vector<FrontierPoint> pts(ws.size());
    parallel_for(ws.size(), threads, [&](std::size_t j) {
        if (!(ws[j] > 0)) throw std::invalid_argument("remote_frontier: weights must be > 0");
        auto r = opt_detail::solve_encoder(lambda, p, mu, ws[j], opt);
        FrontierPoint fp;
        fp.weights = {ws[j]};
        fp.point = remote_region_point(lambda, p, mu, opt_detail::to_atomvec(r.alpha),
                                       opt_detail::to_atomvec(r.beta));
        fp.objective = ws[j] * fp.point.rates[0] + fp.point.distortion;
        fp.stationarity_gap = r.gap;
        fp.iterations = r.iterations;
        pts[j] = fp;
    });
    Frontier f;
    f.points = std::move(pts);
    std::sort(f.points.begin(), f.points.end(), [](const FrontierPoint& a, const FrontierPoint& b) {
        return a.point.rates[0] < b.point.rates[0];
    });
    return f;
}

}  // namespace ppcover

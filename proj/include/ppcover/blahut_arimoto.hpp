#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "ppcover/discretize.hpp"
#include "ppcover/numeric.hpp"
#include "ppcover/recon.hpp"

namespace ppcover {

// Discretized source/distortion pair fed to Blahut-Arimoto: binary source
// (slot occupied or not), finite reconstruction alphabet drawn from A,
// entries dbar(v, y).  +inf entries are excluded transitions.
struct DistortionMatrix {
    double delta = 0;
    std::vector<double> recon_values;          // columns
    std::array<std::vector<double>, 2> d;      // d[y][column]

    std::size_t columns() const { return recon_values.size(); }
};

// Finite A is used as-is; Interval/AllNonNegative are gridded log-uniformly
// (AllNonNegative over [grid_lo, grid_hi], plus the exact value 0).
inline DistortionMatrix build_distortion_matrix(const ReconSet& A, double delta,
                                                int resolution = 256, double grid_lo = 1e-3,
                                                double grid_hi = 1e3) {
    if (!(delta > 0)) throw std::invalid_argument("build_distortion_matrix: delta must be > 0");
    std::vector<double> vals;
    switch (A.kind()) {
        case ReconSet::Kind::Finite:
            vals = A.values();
            break;
        case ReconSet::Kind::AllNonNegative: {
            if (!(grid_lo > 0 && grid_hi > grid_lo))
                throw std::invalid_argument("build_distortion_matrix: bad grid bounds");
            vals.push_back(0.0);
            for (int i = 0; i < resolution; ++i)
                vals.push_back(grid_lo *
                               std::pow(grid_hi / grid_lo,
                                        resolution == 1 ? 0.0 : static_cast<double>(i) / (resolution - 1)));
            break;
        }
        case ReconSet::Kind::Interval: {
            const double lo = A.lo(), hi = A.hi();
            if (lo == 0) vals.push_back(0.0);
            const double glo = std::max(lo, hi * 1e-6);
            for (int i = 0; i < resolution; ++i)
                vals.push_back(glo * std::pow(hi / glo,
                                              resolution == 1 ? 0.0 : static_cast<double>(i) / (resolution - 1)));
            break;
        }
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    if (vals.empty()) throw std::invalid_argument("build_distortion_matrix: empty alphabet");

    DistortionMatrix m;
    m.delta = delta;
    m.recon_values = vals;
    for (int y = 0; y < 2; ++y) {
        m.d[y].resize(vals.size());
        for (std::size_t v = 0; v < vals.size(); ++v) m.d[y][v] = dbar(vals[v], y, delta);
    }
    bool all_finite_column = false;
    for (std::size_t v = 0; v < vals.size(); ++v)
        if (std::isfinite(m.d[0][v]) && std::isfinite(m.d[1][v])) all_finite_column = true;
    if (!all_finite_column)
        throw std::invalid_argument("build_distortion_matrix: no all-finite reconstruction");
    return m;
}

struct BAPoint {
    double I_per_symbol = 0;  // nats per slot
    double E_dbar = 0;
    bool converged = false;
    int iterations = 0;
    double max_lagrangian_increase = 0;  // monotonicity check, should be ~0
    double duality_gap = 0;              // log max_v t_v: certified |F - F*| bound
};

// Classical Blahut-Arimoto at slope s <= 0: alternating minimization of
// I - s E[dbar].  Infinite entries are excluded transitions (probability
// pinned to zero), never large finite surrogates.
//
// Iterations stop when the Lagrangian change drops below tol; the converged
// flag additionally requires a small duality gap, because on large
// reconstruction grids the Lagrangian can plateau far from the optimum while
// mass migrates slowly across columns.
inline BAPoint ba_point(const std::array<double, 2>& source, const DistortionMatrix& m, double slope,
                        double tol = 1e-12, int max_iter = 100000) {
    if (slope > 0) throw std::invalid_argument("ba_point: slope must be <= 0");
    if (std::abs(source[0] + source[1] - 1.0) > 1e-12 || source[0] < 0 || source[1] < 0)
        throw std::invalid_argument("ba_point: source must be a pmf");
    const std::size_t V = m.columns();

    if (slope == 0) {
        // zero-rate endpoint: best single reconstruction
        BAPoint p;
        p.converged = true;
        p.E_dbar = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < V; ++v) {
            double cost = 0;
            bool ok = true;
            for (int y = 0; y < 2; ++y) {
                if (source[y] == 0) continue;
                if (!std::isfinite(m.d[y][v])) {
                    ok = false;
                    break;
                }
                cost += source[y] * m.d[y][v];
            }
            if (ok) p.E_dbar = std::min(p.E_dbar, cost);
        }
        return p;
    }

    std::array<std::vector<double>, 2> w;  // exp(s d), 0 on excluded transitions
    for (int y = 0; y < 2; ++y) {
        w[y].resize(V);
        for (std::size_t v = 0; v < V; ++v)
            w[y][v] = std::isfinite(m.d[y][v]) ? std::exp(slope * m.d[y][v]) : 0.0;
    }

    std::vector<double> r(V, 1.0 / static_cast<double>(V));
    std::array<std::vector<double>, 2> q;
    q[0].resize(V);
    q[1].resize(V);

    auto lagrangian = [&]() {
        // I - s D with the output marginal implied by q
        std::vector<double> marg(V, 0.0);
        for (int y = 0; y < 2; ++y)
            for (std::size_t v = 0; v < V; ++v) marg[v] += source[y] * q[y][v];
        double F = 0;
        for (int y = 0; y < 2; ++y) {
            if (source[y] == 0) continue;
            for (std::size_t v = 0; v < V; ++v) {
                if (q[y][v] <= 0) continue;
                F += source[y] * q[y][v] * (std::log(q[y][v] / marg[v]) - slope * m.d[y][v]);
            }
        }
        return F;
    };

    BAPoint p;
    double F_prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        std::array<double, 2> z{0, 0};
        for (int y = 0; y < 2; ++y) {
            for (std::size_t v = 0; v < V; ++v) z[y] += r[v] * w[y][v];
            if (source[y] > 0 && z[y] <= 0)
                throw std::runtime_error("ba_point: no admissible reconstruction for a source row");
            for (std::size_t v = 0; v < V; ++v) q[y][v] = z[y] > 0 ? r[v] * w[y][v] / z[y] : 0.0;
        }
        // multiplicative factor t_v = sum_y p_y w[y][v] / z_y; its max over
        // the full alphabet bounds the remaining suboptimality
        double tmax = 0;
        for (std::size_t v = 0; v < V; ++v) {
            double t = 0;
            for (int y = 0; y < 2; ++y)
                if (source[y] > 0 && z[y] > 0) t += source[y] * w[y][v] / z[y];
            tmax = std::max(tmax, t);
        }
        p.duality_gap = std::max(0.0, std::log(tmax));
        for (std::size_t v = 0; v < V; ++v) r[v] = source[0] * q[0][v] + source[1] * q[1][v];
        const double F = lagrangian();
        p.iterations = it + 1;
        if (F > F_prev)
            p.max_lagrangian_increase = std::max(p.max_lagrangian_increase, F - F_prev);
        if (std::abs(F_prev - F) < tol) break;
        F_prev = F;
    }
    // certified suboptimality: |F - F*| <= duality_gap per symbol
    p.converged = p.duality_gap <= 1e-6;

    double I = 0, D = 0;
    for (int y = 0; y < 2; ++y) {
        if (source[y] == 0) continue;
        for (std::size_t v = 0; v < V; ++v) {
            if (q[y][v] <= 0 || r[v] <= 0) continue;
            I += source[y] * q[y][v] * std::log(q[y][v] / r[v]);
            D += source[y] * q[y][v] * m.d[y][v];
        }
    }
    p.I_per_symbol = std::max(0.0, I);
    p.E_dbar = D;
    return p;
}

struct BAFrontierRow {
    double slope;
    double I_per_symbol;
    double R_per_time;  // I / delta
    double D;           // E dbar (already per unit time)
    bool converged;
};

// Sweep of slopes mapped to time-normalized units.
inline std::vector<BAFrontierRow> ba_frontier(double lambda, const ReconSet& A, double delta,
                                              const std::vector<double>& slopes, int resolution = 256,
                                              double tol = 1e-12, int max_iter = 100000) {
    if (!(lambda > 0)) throw std::invalid_argument("ba_frontier: lambda must be > 0");
    const DistortionMatrix m =
        build_distortion_matrix(A, delta, resolution, lambda * 1e-3, lambda * 1e3);
    const double q1 = -std::expm1(-lambda * delta);
    const std::array<double, 2> source{1 - q1, q1};
    std::vector<BAFrontierRow> rows;
    for (double s : slopes) {
        BAPoint p = ba_point(source, m, s, tol, max_iter);
        rows.push_back({s, p.I_per_symbol, p.I_per_symbol / delta, p.E_dbar, p.converged});
    }
    return rows;
}

// Slope grid hitting a target distortion window for the covering-style
// matrices: slope ~ -lambda*delta/D.
inline std::vector<double> ba_slope_grid_for_window(double lambda, double delta, double d_lo,
                                                    double d_hi, int n) {
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) {
        double D = d_lo * std::pow(d_hi / d_lo, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
        s[i] = -lambda * delta / D;
    }
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace ppcover

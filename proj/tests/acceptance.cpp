// Acceptance suite: one pass/fail line per criterion, every tolerance pinned
// in code.  Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ppcover/blahut_arimoto.hpp"
#include "ppcover/discretize.hpp"
#include "ppcover/feedforward.hpp"
#include "ppcover/frontier.hpp"
#include "ppcover/sdpi.hpp"

using namespace ppcover;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// 1. Functional-covering line: R + D = lambda - phi(lambda) within 1e-6 at
//    every emitted point, lambda in {0.5, 1, 2}; runtime < 10 s.
Outcome criterion1() {
    const double t0 = now_seconds();
    double worst = 0;
    for (double lambda : {0.5, 1.0, 2.0}) {
        const Frontier f =
            constrained_frontier(lambda, ReconSet::all_non_negative(), default_weight_grid(64), 0.0);
        if (f.points.empty()) return {false, "empty frontier"};
        for (const auto& p : f.points)
            worst = std::max(worst, std::abs(p.point.rates[0] + p.point.distortion - xi(lambda)));
    }
    const double dt = now_seconds() - t0;
    const bool pass = worst <= 1e-6 && dt < 10.0;
    return {pass, "max |R+D-xi| = " + fmt(worst) + " (tol 1e-6), runtime " + fmt(dt) + " s (< 10 s)"};
}

// 2. Covering curve: parametric frontier within 1e-4 of (-log D)^+ on
//    D in {0.1,...,0.9}; the explicit construction reproduces each point.
Outcome criterion2() {
    const auto cover = ReconSet::finite({0.0, 1.0});
    OptimizerOptions opt;
    opt.tol = 1e-14;
    const Frontier f = constrained_frontier(1.0, cover, default_weight_grid(64), 1e-5, opt);
    double worst_curve = 0, worst_explicit = 0;
    for (int i = 1; i <= 9; ++i) {
        const double D = 0.1 * i;
        worst_curve = std::max(worst_curve, std::abs(frontier_rate_at(f, D) - rc(1.0, D)));
        const RDPoint p =
            constrained_region_point(1.0, cover, AtomVec(D, 1.0 - D, 0, 0), AtomVec(1, 0, 0, 0));
        worst_explicit = std::max(worst_explicit, std::abs(p.rates[0] - (-std::log(D))));
        worst_explicit = std::max(worst_explicit, std::abs(p.distortion - D));
    }
    const bool pass = worst_curve <= 1e-4 && worst_explicit <= 1e-12;
    return {pass, "max frontier error " + fmt(worst_curve) + " (tol 1e-4), explicit construction error " +
                      fmt(worst_explicit)};
}

// 3. BA oracle: R = I/delta vs D within 2% of rc() on D in [0.1, 0.9] at
//    lambda = 1, delta = 1e-3; runtime < 2 min.
Outcome criterion3() {
    const double t0 = now_seconds();
    const double lambda = 1.0, delta = 1e-3;
    const auto rows = ba_frontier(lambda, ReconSet::finite({0.0, 1.0}), delta,
                                  ba_slope_grid_for_window(lambda, delta, 0.08, 0.95, 40));
    double worst = 0;
    int checked = 0;
    for (const auto& r : rows) {
        if (!r.converged || r.D < 0.1 || r.D > 0.9) continue;
        ++checked;
        worst = std::max(worst, std::abs(r.R_per_time - rc(lambda, r.D)) / rc(lambda, r.D));
    }
    const double dt = now_seconds() - t0;
    const bool pass = checked >= 10 && worst <= 0.02 && dt < 120.0;
    return {pass, std::to_string(checked) + " points, max relative error " + fmt(worst) +
                      " (tol 0.02), runtime " + fmt(dt) + " s (< 120 s)"};
}

// 4. Feedforward simulation within the distortion-rate bounds +- 3 SE at
//    lambda = 1, T = 50, R in {0, 0.1, 0.3}, 1e5 trials; runtime < 5 min.
//    Shares its runs with criterion 5.
std::vector<FFReport> ff_reports;

Outcome criterion4() {
    const double t0 = now_seconds();
    ff_reports.clear();
    bool pass = true;
    std::string detail;
    for (double R : {0.0, 0.1, 0.3}) {
        const FFReport r = simulate(1.0, 50.0, R, 100000, 20240608);
        ff_reports.push_back(r);
        const bool in_band =
            r.mean_d >= r.lower_bound - 3 * r.se_d && r.mean_d <= r.upper_bound + 3 * r.se_d;
        bool zero_rate_ok = true;
        if (R == 0.0) zero_rate_ok = std::abs(r.mean_d - 1.0) <= std::max(3 * r.se_d, 1e-12);
        pass = pass && in_band && zero_rate_ok;
        detail += "R=" + fmt(R) + ": mean_d=" + fmt(r.mean_d) + " in [" + fmt(r.lower_bound) + "," +
                  fmt(r.upper_bound) + "]+-3se(" + fmt(3 * r.se_d) + "); ";
    }
    const double dt = now_seconds() - t0;
    pass = pass && dt < 300.0;
    return {pass, detail + "runtime " + fmt(dt) + " s (< 300 s)"};
}

// 5. MI identity: Monte Carlo estimate of E int phi(Gamma) dt - T phi(lambda)
//    equals the closed-form H(M) within 3 SE on the same runs.
Outcome criterion5() {
    if (ff_reports.empty()) return {false, "criterion 4 runs missing"};
    bool pass = true;
    std::string detail;
    for (const auto& r : ff_reports) {
        const double tol = std::max(3 * r.se_mi, 1e-12);
        pass = pass && std::abs(r.mi_mc - r.H_M) <= tol;
        detail += "R=" + fmt(r.rate) + ": |mi_mc-H(M)|=" + fmt(std::abs(r.mi_mc - r.H_M)) +
                  " <= " + fmt(tol) + "; ";
    }
    return {pass, detail};
}

// 6. Delta-scaling: |I/delta - R| relative error < 1% at delta = 1e-4 and
//    strictly decreasing across {1e-2, 1e-3, 1e-4}, for the covering
//    parameters and for the CEO set lambda=1, p=(0.25,0.5), mu=(0.5,1).
Outcome criterion6() {
    const std::vector<double> deltas{1e-2, 1e-3, 1e-4};
    std::string detail;
    bool pass = true;

    const auto single = delta_scaling_single(1.0, ReconSet::finite({0.0, 1.0}),
                                             AtomVec(0.5, 0.5, 0, 0), AtomVec(1, 0, 0, 0), deltas);
    double prev = 1e300;
    for (const auto& r : single) {
        const double err = std::abs(r.I_over_delta - r.R_target);
        pass = pass && err < prev;
        prev = err;
    }
    const double rel_single = std::abs(single.back().I_over_delta - single.back().R_target) /
                              single.back().R_target;
    pass = pass && rel_single < 0.01;
    detail += "covering rel err at 1e-4: " + fmt(rel_single) + "; ";

    const std::array<TestChannel, 2> ch{
        TestChannel{AtomVec(0.4, 0.3, 0.2, 0.1), AtomVec(0.1, 0.2, 0.3, 0.4)},
        TestChannel{AtomVec(0.25, 0.25, 0.25, 0.25), AtomVec(0.4, 0.1, 0.4, 0.1)}};
    const auto ceo = delta_scaling_ceo(1.0, {0.25, 0.5}, {0.5, 1.0}, ch, deltas);
    for (int i = 0; i < 2; ++i) {
        prev = 1e300;
        for (const auto& r : ceo) {
            const double err = std::abs(r.I_over_delta[i] - r.R_target[i]);
            pass = pass && err < prev;
            prev = err;
        }
        const double rel = std::abs(ceo.back().I_over_delta[i] - ceo.back().R_target[i]) /
                           ceo.back().R_target[i];
        pass = pass && rel < 0.01;
        detail += "ceo R" + std::to_string(i + 1) + " rel err at 1e-4: " + fmt(rel) + "; ";
    }
    return {pass, detail};
}

// 7. Thinning SDPI: 100 random marginally-Poisson models x p in
//    {0.1,...,0.9}, slack >= -1e-12 in every case; runtime < 1 min.
Outcome criterion7() {
    const double t0 = now_seconds();
    std::vector<double> p_grid;
    for (int i = 1; i <= 9; ++i) p_grid.push_back(0.1 * i);
    const auto rows = thinning_batch(100, 31415, p_grid);
    double worst = 1e300;
    for (const auto& r : rows) worst = std::min(worst, r.slack);
    const double dt = now_seconds() - t0;
    const bool pass = rows.size() == 900 && worst >= -1e-12 && dt < 60.0;
    return {pass, "900 checks, min slack " + fmt(worst) + " (>= -1e-12), runtime " + fmt(dt) +
                      " s (< 60 s)"};
}

// 8. CEO plane without thinning: 0.5 R1 + 0.5 R2 + D >= 1 - 1e-9 with
//    equality within 1e-4 at the scalarization optima (lambda=1, mu=(1,1)).
Outcome criterion8() {
    const Frontier f = ceo_frontier(1.0, 0, 0, 1.0, 1.0, default_weight_pairs(12));
    double worst_low = 1e300, worst_eq = 0;
    for (const auto& p : f.points) {
        const double plane = 0.5 * p.point.rates[0] + 0.5 * p.point.rates[1] + p.point.distortion;
        worst_low = std::min(worst_low, plane - 1.0);
        worst_eq = std::max(worst_eq, std::abs(plane - 1.0));
    }
    const bool pass = !f.points.empty() && worst_low >= -1e-9 && worst_eq <= 1e-4;
    return {pass, "min plane slack " + fmt(worst_low) + " (>= -1e-9), max |plane-1| = " +
                      fmt(worst_eq) + " (tol 1e-4)"};
}

// 9. Cross-consistency: remote_frontier equals ceo_frontier with the second
//    encoder disabled (p2 = 1), within 1e-6 pointwise.
Outcome criterion9() {
    const auto weights = default_weight_grid(64);
    const Frontier rem = remote_frontier(1.0, 0.3, 0.5, weights);
    std::vector<std::array<double, 2>> pairs;
    for (double w : weights) pairs.push_back({w, 1.0});
    const Frontier ceo = ceo_frontier(1.0, 0.3, 1.0, 0.5, 0.8, pairs);
    if (rem.points.size() != ceo.points.size())
        return {false, "point count mismatch"};
    double worst = 0;
    for (const auto& cp : ceo.points) {
        bool found = false;
        for (const auto& rp : rem.points) {
            if (rp.weights[0] != cp.weights[0]) continue;
            found = true;
            worst = std::max(worst, std::abs(rp.point.rates[0] - cp.point.rates[0]));
            worst = std::max(worst, std::abs(rp.point.distortion - cp.point.distortion));
        }
        if (!found) return {false, "weight missing from remote frontier"};
    }
    return {worst <= 1e-6, "max pointwise deviation " + fmt(worst) + " (tol 1e-6)"};
}

// 10. Determinism: stochastic commands re-run with the same seed produce
//     byte-identical outputs (CLI level), and library reruns match bitwise.
std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome criterion10() {
    const std::string cli = PPCOVER_CLI_PATH;
    struct Cmd {
        const char* label;
        std::string args;
    };
    const Cmd cmds[] = {
        {"simulate", " simulate --lambda 1 --T 20 --R 0.2 --trials 20000 --seed 11 --out "},
        {"sdpi-thin", " sdpi thin --models 10 --seed 3 --out "},
        {"sdpi-super", " sdpi super --models 3 --seed 5 --out "},
    };
    for (const auto& c : cmds) {
        const std::string f1 = std::string("acc_det_") + c.label + "_1";
        const std::string f2 = std::string("acc_det_") + c.label + "_2";
        if (std::system((cli + c.args + f1).c_str()) != 0) return {false, std::string("command failed: ") + c.label};
        if (std::system((cli + c.args + f2).c_str()) != 0) return {false, std::string("command failed: ") + c.label};
        const std::string a = slurp(f1), b = slurp(f2);
        if (a.empty() || a != b) return {false, std::string("outputs differ for ") + c.label};
    }
    const FFReport r1 = simulate(1.0, 20.0, 0.2, 5000, 17);
    const FFReport r2 = simulate(1.0, 20.0, 0.2, 5000, 17);
    if (r1.mean_d != r2.mean_d || r1.mi_mc != r2.mi_mc)
        return {false, "library simulate rerun differs"};
    return {true, "3 CLI commands byte-identical across reruns; library rerun bitwise equal"};
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        std::function<Outcome()> fn;
    };
    const Entry criteria[] = {
        {"functional-covering line R+D = xi(lambda)", criterion1},
        {"covering curve matches (-lambda log D)^+", criterion2},
        {"Blahut-Arimoto oracle converges to the covering curve", criterion3},
        {"feedforward simulation within the distortion-rate bounds", criterion4},
        {"MI identity: E int phi(Gamma) - T phi(lambda) = H(M)", criterion5},
        {"delta-scaling of I/delta to the region rates", criterion6},
        {"thinning SDPI slack >= -1e-12 on 900 exact checks", criterion7},
        {"CEO plane at p = 0", criterion8},
        {"remote frontier equals CEO with encoder 2 disabled", criterion9},
        {"seeded reruns are byte-identical", criterion10},
    };

    int failures = 0;
    int idx = 0;
    for (const auto& c : criteria) {
        ++idx;
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s  criterion %2d: %s — %s\n", o.pass ? "PASS" : "FAIL", idx, c.name,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    if (failures == 0)
        std::printf("all %d acceptance criteria passed\n", idx);
    else
        std::printf("%d of %d acceptance criteria FAILED\n", failures, idx);
    return failures;
}

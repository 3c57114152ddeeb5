#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

namespace ppcover {

// phi(x) = x log x with the 0 log 0 = 0 convention.  Every 0-mass convention
// in the library routes through phi/xlogy so they cannot drift apart.
inline double phi(double x) {
    if (x < 0) throw std::domain_error("phi: negative argument");
    if (x == 0) return 0.0;
    return x * std::log(x);
}

// x * log(y) with 0 * log(anything) = 0.  For x > 0, y = 0 the result is the
// IEEE -inf; callers that must stay finite check first.
inline double xlogy(double x, double y) {
    if (x == 0) return 0.0;
    return x * std::log(y);
}

// x * log(x/y) with 0 * log(0/.) = 0.  x > 0 with y = 0 yields +inf.
inline double xlogx_over_y(double x, double y) {
    if (x == 0) return 0.0;
    if (y == 0) return std::numeric_limits<double>::infinity();
    return x * std::log(x / y);
}

inline double sq(double x) { return x * x; }

// ---------------------------------------------------------------------------
// probability vectors
// ---------------------------------------------------------------------------

inline void check_pmf(const std::vector<double>& p, double tol = 1e-12) {
    double s = 0;
    for (double v : p) {
        if (v < 0) throw std::invalid_argument("pmf has negative entry");
        s += v;
    }
    if (std::abs(s - 1.0) > tol) throw std::invalid_argument("pmf does not sum to 1");
}

// Euclidean projection onto the probability simplex (sort-and-threshold).
inline void project_simplex(std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> u = x;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0, theta = 0;
    for (std::size_t i = 0; i < n; ++i) {
        css += u[i];
        const double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0) theta = t;
    }
    for (auto& v : x) v = std::max(0.0, v - theta);
}

// ---------------------------------------------------------------------------
// adaptive Simpson quadrature
// ---------------------------------------------------------------------------

namespace detail {
template <class F>
double simpson_rec(const F& f, double a, double m, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// absolute-tolerance adaptive Simpson on [a,b]
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10, int max_depth = 48) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    return detail::simpson_rec(f, a, m, b, fa, fm, fb, whole, abs_tol, max_depth);
}

// Deterministic pairwise sum (order independent of threading/accumulation).
inline double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        double s = 0;
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v, 0, v.size()); }

// Static-chunk parallel for; results must be written to per-index slots so the
// outcome does not depend on the worker count.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const int workers = static_cast<int>(std::min<std::size_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<std::size_t> counter{0};
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&body, &counter, n] {
            for (;;) {
                std::size_t i = counter.fetch_add(1);
                if (i >= n) break;
                body(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace ppcover

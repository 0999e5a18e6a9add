#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gnlab {

using complexd = std::complex<double>;

inline double sq(double x) { return x * x; }

// <x> = sqrt(1+x^2)
inline double japanese_bracket(double x) { return std::sqrt(1.0 + x * x); }

// Composite Simpson rule on a uniform grid (n may be even or odd; falls back
// to a trapezoid correction on the last interval when needed).
inline double simpson(const std::vector<double>& y, double h) {
    const std::size_t n = y.size();
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * h * (y[0] + y[1]);
    double s = 0.0;
    std::size_t last = (n % 2 == 1) ? n - 1 : n - 2;
    for (std::size_t i = 0; i + 2 <= last; i += 2)
        s += h / 3.0 * (y[i] + 4.0 * y[i + 1] + y[i + 2]);
    if (n % 2 == 0) s += 0.5 * h * (y[n - 2] + y[n - 1]);
    return s;
}

// Least-squares slope of y vs x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("ls_slope: need >=2 matching samples");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
    mx /= double(x.size());
    my /= double(x.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

// 4th-order centered first derivative, one-sided at the ends.
template <class T>
std::vector<T> derivative4(const std::vector<T>& y, double h) {
    const std::size_t n = y.size();
    std::vector<T> d(n);
    if (n < 5) throw std::invalid_argument("derivative4: need >=5 points");
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h);
    // one-sided 4th order stencils at the boundary
    auto fwd = [&](std::size_t i) {
        return (-25.0 * y[i] + 48.0 * y[i + 1] - 36.0 * y[i + 2] + 16.0 * y[i + 3] -
                3.0 * y[i + 4]) /
               (12.0 * h);
    };
    auto bwd = [&](std::size_t i) {
        return (25.0 * y[i] - 48.0 * y[i - 1] + 36.0 * y[i - 2] - 16.0 * y[i - 3] +
                3.0 * y[i - 4]) /
               (12.0 * h);
    };
    d[0] = fwd(0);
    d[1] = fwd(1);
    d[n - 2] = bwd(n - 2);
    d[n - 1] = bwd(n - 1);
    return d;
}

// Cubic 4-point Lagrange interpolation on a uniform grid starting at x0.
inline double interp_cubic(const std::vector<double>& y, double x0, double h, double x) {
    const std::size_t n = y.size();
    double t = (x - x0) / h;
    long j = long(std::floor(t)) - 1;
    j = std::clamp(j, 0L, long(n) - 4);
    double s = t - double(j);  // in [1,2] generically
    double l0 = -(s - 1) * (s - 2) * (s - 3) / 6.0;
    double l1 = s * (s - 2) * (s - 3) / 2.0;
    double l2 = -s * (s - 1) * (s - 3) / 2.0;
    double l3 = s * (s - 1) * (s - 2) / 6.0;
    return l0 * y[j] + l1 * y[j + 1] + l2 * y[j + 2] + l3 * y[j + 3];
}

inline unsigned worker_count() {
    if (const char* env = std::getenv("GNLAB_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return unsigned(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

// Index-ordered parallel loop; results must be written by index so that the
// output does not depend on scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    unsigned nw = std::min<std::size_t>(worker_count(), n);
    if (nw <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < nw; ++w)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                body(i);
            }
        });
    for (auto& t : pool) t.join();
}

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace gnlab

#pragma once

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gnlab/model.hpp"
#include "gnlab/util.hpp"

namespace gnlab {

// Standing-wave profile phi_omega = (v,u) sampled on a uniform grid over
// [0, x_max]; extended to the full line by parity (v even, u odd).
struct SolitaryWave {
    Model model;
    double omega = 0;
    double x_max = 0;
    std::size_t n = 0;  // samples on [0, x_max]
    double h = 0;       // grid spacing
    double Gamma = 0;   // turning value, v(0)^2
    std::vector<double> x, v, u;
    double Q = 0, En = 0, dQdomega = 0;

    double delta() const { return std::sqrt(1.0 - omega * omega); }

    // Parity-extended point evaluation (cubic interpolation on the half-line grid).
    double v_at(double xx) const { return interp_cubic(v, 0.0, h, std::abs(xx)); }
    double u_at(double xx) const {
        double val = interp_cubic(u, 0.0, h, std::abs(xx));
        return xx >= 0 ? val : -val;
    }
};

// Smallest positive root of omega*G = G - F(G), i.e. F(G) = (1-omega)G,
// with the admissibility condition omega*s < s - F(s) on (0, G).
inline double turning_point(const Model& model, double omega, double s_cap = 50.0) {
    if (!(omega > 0.0 && omega < 1.0))
        throw std::invalid_argument("turning_point: omega must lie in (0,1)");
    auto g = [&](double s) { return model.F(s) - (1.0 - omega) * s; };
    // bracket the first sign change on (0, s_cap]
    const int nscan = 20000;
    double a = 0.0, b = 0.0;
    double ga = 0.0;
    bool found = false;
    for (int i = 1; i <= nscan; ++i) {
        double s = s_cap * double(i) / nscan;
        double gs = g(s);
        if (gs >= 0.0) {
            b = s;
            a = s_cap * double(i - 1) / nscan;
            ga = g(a);
            found = true;
            break;
        }
    }
    if (!found) throw std::runtime_error("turning_point: no admissible turning point");
    // bisection (g(a) < 0 <= g(b))
    (void)ga;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (a + b);
        if (g(mid) < 0.0)
            a = mid;
        else
            b = mid;
    }
    double Gamma = 0.5 * (a + b);
    // interior admissibility: omega*s < s - F(s) strictly on (0, Gamma)
    for (int i = 1; i < 200; ++i) {
        double s = Gamma * double(i) / 200.0;
        if (!(omega * s < s - model.F(s)))
            throw std::runtime_error("turning_point: no admissible turning point");
    }
    return Gamma;
}

namespace detail {

// Level-set recovery: given s = v^2-u^2 and the first integral
// omega(v^2+u^2) = s - F(s), return (v^2, u^2) clipped at roundoff.
inline std::pair<double, double> level_set_vu2(const Model& m, double omega, double s) {
    double p = (s - m.F(s)) / omega;  // v^2 + u^2
    double v2 = 0.5 * (p + s);
    double u2 = 0.5 * (p - s);
    double scale = std::max(1.0, std::abs(p));
    if (v2 < -1e-12 * scale || u2 < -1e-12 * scale)
        throw std::runtime_error("solve_wave: level-set violation");
    return {std::max(v2, 0.0), std::max(u2, 0.0)};
}

}  // namespace detail

inline double default_x_max(double omega) {
    double delta = std::sqrt(1.0 - omega * omega);
    return std::max(40.0, 30.0 / delta);
}

// Construct the wave by integrating the reduced scalar equation
// s' = -4*omega*u*v from s(0) = Gamma, with (v,u) recovered from the level set.
// On (0, inf) the orbit has v > 0 and u > 0, so s is strictly decreasing.
inline SolitaryWave solve_wave(const Model& model, double omega, double x_max = -1,
                               std::size_t n = 8192) {
    namespace odeint = boost::numeric::odeint;
    if (x_max <= 0) x_max = default_x_max(omega);
    if (n < 2) throw std::invalid_argument("solve_wave: n too small");

    SolitaryWave w;
    w.model = model;
    w.omega = omega;
    w.x_max = x_max;
    w.n = n;
    w.h = x_max / double(n - 1);
    w.Gamma = turning_point(model, omega);

    // Level-set recovery in factored form. For f(s) = s^k the orbit relation
    // 2*omega*u^2 = (1-omega)s - F(s) vanishes at both s = Gamma and s = 0;
    // writing it as (Gamma - s) * s * sum_{j<k} s^j Gamma^{k-1-j} / (k+1)
    // keeps every factor positive and avoids the catastrophic cancellation
    // of subtracting nearly equal O(1) quantities near the turning point
    // (finite differences of the profile would amplify that noise badly).
    const int kk = model.k;
    auto u_of_s = [&](double s) {
        if (s <= 0.0) return 0.0;
        double poly = 0.0;
        for (int j = 0; j < kk; ++j)
            poly += std::pow(s, j) * std::pow(w.Gamma, kk - 1 - j);
        double u2 = std::max(w.Gamma - s, 0.0) * s * poly /
                    (2.0 * omega * double(kk + 1));
        return std::sqrt(u2);
    };
    auto v_of_su = [&](double s, double uu) {
        return std::sqrt(std::max(uu * uu + s, 0.0));  // v^2 - u^2 = s
    };
    auto rhs = [&](const double& s, double& dsdx, double /*x*/) {
        double sc = std::max(s, 0.0);
        double uu = u_of_s(sc);
        dsdx = -4.0 * omega * uu * v_of_su(sc, uu);
    };

    // Degenerate start: s'(0)=0. One series step using s(h) ~ Gamma + s''(0) h^2/2,
    // s''(0) = -4 w v(0) u'(0), u'(0) = (omega-1+f(Gamma)) v(0).
    const double h0 = 1e-4;
    double vg = std::sqrt(w.Gamma);
    double uprime0 = (omega - 1.0 + model.f(w.Gamma)) * vg;
    double spp0 = -4.0 * omega * vg * uprime0;
    double s = w.Gamma + 0.5 * spp0 * h0 * h0;

    w.x.resize(n);
    w.v.resize(n);
    w.u.resize(n);
    for (std::size_t i = 0; i < n; ++i) w.x[i] = double(i) * w.h;
    w.v[0] = vg;
    w.u[0] = 0.0;

    // integrate to each grid node in turn; pure relative error control so the
    // exponential tail keeps full relative accuracy
    auto stepper = odeint::make_controlled(1e-300, 1e-12,
                                           odeint::runge_kutta_dopri5<double>());
    double xcur = h0;
    const double s_floor = 1e-305;
    for (std::size_t i = 1; i < n; ++i) {
        double xtarget = w.x[i];
        if (xtarget > xcur && s > s_floor) {
            odeint::integrate_adaptive(stepper, rhs, s, xcur, xtarget,
                                       std::min(1e-3, xtarget - xcur));
            xcur = xtarget;
        }
        if (s <= s_floor) s = 0.0;
        double sc = std::max(s, 0.0);
        w.u[i] = u_of_s(sc);
        w.v[i] = v_of_su(sc, w.u[i]);
    }

    // charge and energy by Simpson quadrature over the half line (factor 2 by parity)
    std::vector<double> qd(n), ed(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v2 = w.v[i] * w.v[i], u2 = w.u[i] * w.u[i];
        double si = v2 - u2;
        qd[i] = v2 + u2;
        // energy density omega(v^2+u^2) + f(s)s - F(s)  (uses the stationary eqs)
        ed[i] = omega * (v2 + u2) + model.f(si) * si - model.F(si);
    }
    w.Q = 2.0 * simpson(qd, w.h);
    w.En = 2.0 * simpson(ed, w.h);
    return w;
}

// dQ/domega by centered differences over omega +- h with a Richardson check.
inline double charge_derivative(const Model& model, double omega, double x_max = -1,
                                std::size_t n = 8192, double h = 1e-3) {
    if (x_max <= 0) x_max = default_x_max(omega);
    auto qat = [&](double om) { return solve_wave(model, om, x_max, n).Q; };
    double d1 = (qat(omega + h) - qat(omega - h)) / (2.0 * h);
    double d2 = (qat(omega + h / 2) - qat(omega - h / 2)) / h;
    if (std::abs(d1 - d2) > 1e-3 * std::max(1.0, std::abs(d1)))
        throw std::runtime_error("charge_derivative: Richardson check failed");
    return d2;
}

inline SolitaryWave solve_wave_full(const Model& model, double omega, double x_max = -1,
                                    std::size_t n = 8192) {
    SolitaryWave w = solve_wave(model, omega, x_max, n);
    w.dQdomega = charge_derivative(model, omega, w.x_max, n);
    return w;
}

// Least-squares slope of log v over the tail window [x_max/2, x_max].
inline double decay_check(const SolitaryWave& w) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < w.n; ++i) {
        if (w.x[i] < 0.5 * w.x_max) continue;
        if (w.v[i] < 1e-280) throw std::runtime_error("decay_check: tail underflow");
        xs.push_back(w.x[i]);
        ys.push_back(std::log(w.v[i]));
    }
    return -ls_slope(xs, ys);  // returns the decay rate (positive)
}

// First integral H(v,u) = (F(s) - s)/2 + omega (v^2+u^2)/2; vanishes on the orbit.
inline double first_integral(const Model& m, double omega, double v, double u) {
    double s = v * v - u * u;
    return 0.5 * (m.F(s) - s) + 0.5 * omega * (v * v + u * u);
}

}  // namespace gnlab

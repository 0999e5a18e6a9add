#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "gnlab/model.hpp"
#include "gnlab/solitary_wave.hpp"
#include "gnlab/util.hpp"

namespace gnlab {

// A complex 4-component field sampled on the symmetric full-line grid.
using Field4 = std::vector<Vector4cd>;

// Uniform grid on [-x_max, x_max] with 2n-1 points, mirroring the wave grid.
struct FullGrid {
    double x_max = 0, h = 0;
    std::size_t m = 0;  // total points
    std::vector<double> x;

    static FullGrid from_wave(const SolitaryWave& w) {
        FullGrid g;
        g.x_max = w.x_max;
        g.h = w.h;
        g.m = 2 * w.n - 1;
        g.x.resize(g.m);
        for (std::size_t i = 0; i < g.m; ++i)
            g.x[i] = -w.x_max + double(i) * w.h;
        return g;
    }
    std::size_t center() const { return (m - 1) / 2; }
    // index of grid node nearest to xx
    std::size_t index_of(double xx) const {
        long i = std::lround((xx + x_max) / h);
        return std::size_t(std::clamp(i, 0L, long(m) - 1));
    }
};

// Linearization potentials W0, W1 (2x2) and W = diag(W1, W0).
struct Potentials {
    SolitaryWave wave;
    FullGrid grid;
    std::vector<Matrix2d> W0, W1;

    // pointwise evaluation from the interpolated profile
    static void eval_blocks(const Model& mdl, double v, double u, Matrix2d& W0x,
                            Matrix2d& W1x) {
        double s = v * v - u * u;
        double fs = mdl.f(s), fps = mdl.fprime(s);
        W0x << -fs, 0, 0, fs;
        Matrix2d outer;
        outer << v * v, -v * u, -v * u, u * u;
        W1x = W0x - 2.0 * fps * outer;
    }

    Matrix4d W_at(double xx) const {
        double v = wave.v_at(xx), u = wave.u_at(xx);
        Matrix2d W0x, W1x;
        eval_blocks(wave.model, v, u, W0x, W1x);
        Matrix4d W = Matrix4d::Zero();
        W.topLeftCorner<2, 2>() = W1x;
        W.bottomRightCorner<2, 2>() = W0x;
        return W;
    }
};

// Zero-potential setup (free system) on the same grid layout as a wave.
inline Potentials free_potentials(const Model& model, double omega, double x_max = -1,
                                  std::size_t n = 8192) {
    if (x_max <= 0) x_max = default_x_max(omega);
    Potentials p;
    p.wave.model = model;
    p.wave.omega = omega;
    p.wave.x_max = x_max;
    p.wave.n = n;
    p.wave.h = x_max / double(n - 1);
    p.wave.Gamma = 0.0;
    p.wave.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.wave.x[i] = double(i) * p.wave.h;
    p.wave.v.assign(n, 0.0);
    p.wave.u.assign(n, 0.0);
    p.grid = FullGrid::from_wave(p.wave);
    p.W0.assign(p.grid.m, Matrix2d::Zero());
    p.W1.assign(p.grid.m, Matrix2d::Zero());
    return p;
}

inline Potentials potentials(const SolitaryWave& w) {
    Potentials p;
    p.wave = w;
    p.grid = FullGrid::from_wave(w);
    p.W0.resize(p.grid.m);
    p.W1.resize(p.grid.m);
    for (std::size_t i = 0; i < p.grid.m; ++i) {
        double xx = p.grid.x[i];
        double v = w.v_at(xx), u = w.u_at(xx);
        Potentials::eval_blocks(w.model, v, u, p.W0[i], p.W1[i]);
    }
    return p;
}

// M0(lambda,omega) = bold_alpha*J*bold_beta - omega*bold_alpha*J - bold_alpha*lambda
inline Matrix4cd coefficient_matrix_free(complexd lambda, double omega) {
    const auto& ms = dirac_matrices();
    Matrix4cd aJ = (ms.bold_alpha * ms.J4).cast<complexd>();
    return (ms.bold_alpha * ms.J4 * ms.bold_beta).cast<complexd>() - omega * aJ -
           lambda * ms.bold_alpha.cast<complexd>();
}

// M(x,lambda,omega) = M0 + bold_alpha*J*W(x)
inline Matrix4cd coefficient_matrix(double x, complexd lambda, double omega,
                                    const Potentials& pot) {
    const auto& ms = dirac_matrices();
    return coefficient_matrix_free(lambda, omega) +
           (ms.bold_alpha * ms.J4 * pot.W_at(x)).cast<complexd>();
}

// Spatial exponents and asymptotic vectors of the free system.
struct FreeEigenstructure {
    complexd xi1, xi2;
    double kappa1 = 0, kappa2 = 0;
    Vector4cd Xi1, Xi2, H1, H2;       // unit-normalized
    Vector4cd Xi1_raw, Xi2_raw, H1_raw, H2_raw;  // analytic in lambda (no |.|)
    double c1 = 0, c2 = 0;
    bool threshold1 = false, threshold2 = false;  // |xi_j| < 1e-8
};

// Branch rule: principal sqrt, then flip so that the Jost solution
// Xi_j e^{i xi_j x} decays as x -> +infty (Im xi_j > 0); on the oscillatory
// part of the imaginary axis (xi_j real) keep xi_j > 0, matching the
// convention "positive for lambda in iR, Im lambda >> 1".
inline complexd branch_sqrt(complexd z) {
    complexd r = std::sqrt(z);
    if (r.imag() < 0.0) return -r;
    if (r.imag() == 0.0 && r.real() < 0.0) return -r;
    return r;
}

inline FreeEigenstructure free_eigenstructure(complexd lambda, double omega) {
    const complexd I(0, 1);
    FreeEigenstructure fe;
    fe.xi1 = branch_sqrt((omega - I * lambda) * (omega - I * lambda) - 1.0);
    fe.xi2 = branch_sqrt((omega + I * lambda) * (omega + I * lambda) - 1.0);
    fe.kappa1 = std::abs(fe.xi1.imag());
    fe.kappa2 = std::abs(fe.xi2.imag());
    fe.threshold1 = std::abs(fe.xi1) < 1e-8;
    fe.threshold2 = std::abs(fe.xi2) < 1e-8;

    fe.Xi1_raw << I * fe.xi1, -I * lambda - 1.0 + omega, -fe.xi1, lambda - I * (1.0 - omega);
    fe.H1_raw << I * fe.xi1, I * lambda + 1.0 - omega, -fe.xi1, -lambda + I * (1.0 - omega);
    fe.Xi2_raw << I * fe.xi2, I * lambda - 1.0 + omega, fe.xi2, lambda + I * (1.0 - omega);
    fe.H2_raw << I * fe.xi2, -I * lambda + 1.0 - omega, fe.xi2, -lambda - I * (1.0 - omega);

    fe.c1 = fe.Xi1_raw.norm();
    fe.c2 = fe.Xi2_raw.norm();
    fe.Xi1 = fe.Xi1_raw / fe.c1;
    fe.H1 = fe.H1_raw / fe.c1;
    fe.Xi2 = fe.Xi2_raw / fe.c2;
    fe.H2 = fe.H2_raw / fe.c2;
    return fe;
}

// JL psi = -bold_alpha psi' + J (bold_beta - omega + W) psi,
// with 4th-order finite differences on the full grid.
inline Field4 apply_JL(const Potentials& pot, const Field4& psi) {
    const auto& ms = dirac_matrices();
    const FullGrid& g = pot.grid;
    if (psi.size() != g.m) throw std::invalid_argument("apply_JL: grid mismatch");
    // componentwise derivative
    std::vector<complexd> comp(g.m);
    Field4 dpsi(g.m, Vector4cd::Zero());
    for (int c = 0; c < 4; ++c) {
        for (std::size_t i = 0; i < g.m; ++i) comp[i] = psi[i](c);
        auto d = derivative4(comp, g.h);
        for (std::size_t i = 0; i < g.m; ++i) dpsi[i](c) = d[i];
    }
    Matrix4cd A = ms.bold_alpha.cast<complexd>();
    Matrix4cd J = ms.J4.cast<complexd>();
    Matrix4cd B = ms.bold_beta.cast<complexd>();
    Field4 out(g.m);
    double omega = pot.wave.omega;
    for (std::size_t i = 0; i < g.m; ++i) {
        Matrix4cd W = Matrix4cd::Zero();
        W.topLeftCorner<2, 2>() = pot.W1[i].cast<complexd>();
        W.bottomRightCorner<2, 2>() = pot.W0[i].cast<complexd>();
        out[i] = -A * dpsi[i] + J * ((B - omega * Matrix4cd::Identity() + W) * psi[i]);
    }
    return out;
}

// L2 inner product on the grid: <a,b> = int conj(a).b dx (trapezoid; the
// fields decay, so the rule is spectrally accurate in practice).
inline complexd inner(const FullGrid& g, const Field4& a, const Field4& b) {
    complexd s = 0;
    for (std::size_t i = 0; i < g.m; ++i) {
        double w = (i == 0 || i == g.m - 1) ? 0.5 : 1.0;
        s += w * a[i].dot(b[i]);  // Eigen dot conjugates the first argument
    }
    return s * g.h;
}

inline double norm2(const FullGrid& g, const Field4& a) {
    return std::sqrt(std::real(inner(g, a, a)));
}

// Generalized-null-space vectors of JL.
struct KernelBundle {
    FullGrid grid;
    Field4 Jphi, dxphi, domphi, jordan2;  // J phi, d_x phi, d_omega phi, w x J phi - alpha phi/2
    Field4 phi;                            // (v,u,0,0)
    Field4 domphi2;                        // second omega-derivative (for modulation)
};

inline Field4 phi_field(const SolitaryWave& w, const FullGrid& g) {
    Field4 phi(g.m, Vector4cd::Zero());
    for (std::size_t i = 0; i < g.m; ++i) {
        phi[i](0) = w.v_at(g.x[i]);
        phi[i](1) = w.u_at(g.x[i]);
    }
    return phi;
}

inline KernelBundle kernel_vectors(const SolitaryWave& w, double h_omega = 1e-3) {
    const auto& ms = dirac_matrices();
    KernelBundle kb;
    kb.grid = FullGrid::from_wave(w);
    const FullGrid& g = kb.grid;
    kb.phi = phi_field(w, g);

    Matrix4cd J = ms.J4.cast<complexd>();
    Matrix4cd A = ms.bold_alpha.cast<complexd>();

    kb.Jphi.resize(g.m);
    for (std::size_t i = 0; i < g.m; ++i) kb.Jphi[i] = J * kb.phi[i];

    // d_x phi from the stationary equations: v' = (f(s)-1-omega)u,
    // u' = (omega-1+f(s))v. Pointwise evaluation avoids a second numerical
    // differentiation when JL is later applied to this vector.
    kb.dxphi.assign(g.m, Vector4cd::Zero());
    for (std::size_t i = 0; i < g.m; ++i) {
        double vv = std::real(kb.phi[i](0)), uu = std::real(kb.phi[i](1));
        double fs = w.model.f(vv * vv - uu * uu);
        kb.dxphi[i](0) = (fs - 1.0 - w.omega) * uu;
        kb.dxphi[i](1) = (w.omega - 1.0 + fs) * vv;
    }

    // d_omega phi and d^2_omega phi by 4th-order omega-stencils (+-h, +-2h)
    // on the common grid; the second-order stencil's truncation error is not
    // small enough for the Jordan residual targets
    SolitaryWave wp = solve_wave(w.model, w.omega + h_omega, w.x_max, w.n);
    SolitaryWave wm = solve_wave(w.model, w.omega - h_omega, w.x_max, w.n);
    SolitaryWave wp2 = solve_wave(w.model, w.omega + 2 * h_omega, w.x_max, w.n);
    SolitaryWave wm2 = solve_wave(w.model, w.omega - 2 * h_omega, w.x_max, w.n);
    kb.domphi.assign(g.m, Vector4cd::Zero());
    kb.domphi2.assign(g.m, Vector4cd::Zero());
    for (std::size_t i = 0; i < g.m; ++i) {
        double xx = g.x[i];
        double vp = wp.v_at(xx), vm = wm.v_at(xx), vp2 = wp2.v_at(xx),
               vm2 = wm2.v_at(xx), v0 = w.v_at(xx);
        double up = wp.u_at(xx), um = wm.u_at(xx), up2 = wp2.u_at(xx),
               um2 = wm2.u_at(xx), u0 = w.u_at(xx);
        kb.domphi[i](0) = (8.0 * (vp - vm) - (vp2 - vm2)) / (12.0 * h_omega);
        kb.domphi[i](1) = (8.0 * (up - um) - (up2 - um2)) / (12.0 * h_omega);
        kb.domphi2[i](0) = (-vp2 + 16.0 * vp - 30.0 * v0 + 16.0 * vm - vm2) /
                           (12.0 * h_omega * h_omega);
        kb.domphi2[i](1) = (-up2 + 16.0 * up - 30.0 * u0 + 16.0 * um - um2) /
                           (12.0 * h_omega * h_omega);
    }

    kb.jordan2.resize(g.m);
    for (std::size_t i = 0; i < g.m; ++i)
        kb.jordan2[i] = w.omega * g.x[i] * kb.Jphi[i] - 0.5 * A * kb.phi[i];
    return kb;
}

// Symplectic projector P_d onto the generalized null space restricted to X,
// P_d R = 2<phi,R>/Q' d_omega phi + 2<J d_omega phi, R>/Q' J phi;  P_c = 1 - P_d.
struct Projectors {
    KernelBundle kb;
    double Qprime = 0;

    Field4 Pd(const Field4& R) const {
        const FullGrid& g = kb.grid;
        const auto& ms = dirac_matrices();
        Matrix4cd J = ms.J4.cast<complexd>();
        Field4 Jdom(g.m);
        for (std::size_t i = 0; i < g.m; ++i) Jdom[i] = J * kb.domphi[i];
        complexd a = 2.0 * inner(g, kb.phi, R) / Qprime;
        complexd b = 2.0 * inner(g, Jdom, R) / Qprime;
        Field4 out(g.m);
        for (std::size_t i = 0; i < g.m; ++i)
            out[i] = a * kb.domphi[i] + b * kb.Jphi[i];
        return out;
    }
    Field4 Pc(const Field4& R) const {
        Field4 d = Pd(R);
        Field4 out(R.size());
        for (std::size_t i = 0; i < R.size(); ++i) out[i] = R[i] - d[i];
        return out;
    }
};

inline Projectors make_projectors(const SolitaryWave& w) {
    Projectors p;
    if (w.dQdomega != 0.0 && std::abs(w.dQdomega) < 1e-6)
        throw std::runtime_error("project: degenerate projector (|Q'(omega)| < 1e-6)");
    p.kb = kernel_vectors(w);
    // Q' from the same quadrature/stencil as the projector pairings, so that
    // 2<phi, d_omega phi>/Q' = 1 holds to roundoff (idempotence)
    p.Qprime = 2.0 * std::real(inner(p.kb.grid, p.kb.phi, p.kb.domphi));
    if (std::abs(p.Qprime) < 1e-6)
        throw std::runtime_error("project: degenerate projector (|Q'(omega)| < 1e-6)");
    return p;
}

}  // namespace gnlab

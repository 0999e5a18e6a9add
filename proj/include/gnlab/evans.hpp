#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gnlab/jost.hpp"

namespace gnlab {

enum class Parity { X, Xperp, full };

struct EvansSample {
    complexd lambda;
    double omega = 0;
    complexd E;             // det[f1,f2,g1,g2], x-independent
    complexd E_X, E_Xperp;  // parity-restricted half-line determinants at x=0
    double drift = 0;       // relative x-independence residual
    bool failed = false;
};

namespace detail {

inline Eigen::Matrix4cd evans_matrix(const JostSolution& f1, const JostSolution& f2,
                                     const JostSolution& g1, const JostSolution& g2,
                                     std::size_t i) {
    Eigen::Matrix4cd M;
    M.col(0) = f1.value(i);
    M.col(1) = f2.value(i);
    M.col(2) = g1.value(i);
    M.col(3) = g2.value(i);
    return M;
}

}  // namespace detail

// Evans function E(lambda,omega) = det[f1,f2,g1,g2], evaluated at x in
// {-1,0,1} to report the Liouville drift; parity restrictions are the 2x2
// determinants of the odd rows (2,4) resp. even rows (1,3) of (f1,f2) at x=0.
inline EvansSample evans_eval(complexd lambda, double omega, const Potentials& pot) {
    EvansSample s;
    s.lambda = lambda;
    s.omega = omega;
    JostSolution f1 = jost_solve(lambda, omega, pot, JostSide::plus_infinity, 1,
                                 JostKind::decaying_f);
    JostSolution f2 = jost_solve(lambda, omega, pot, JostSide::plus_infinity, 2,
                                 JostKind::decaying_f);
    JostSolution g1 = reflect(f1);
    JostSolution g2 = reflect(f2);
    const FullGrid& g = pot.grid;

    complexd dets[3];
    const double xs[3] = {-1.0, 0.0, 1.0};
    for (int p = 0; p < 3; ++p)
        dets[p] = detail::evans_matrix(f1, f2, g1, g2, g.index_of(xs[p])).determinant();
    s.E = dets[1];
    double scale = std::max({std::abs(dets[0]), std::abs(dets[1]), std::abs(dets[2]),
                             1e-300});
    s.drift = std::max(std::abs(dets[0] - dets[1]), std::abs(dets[2] - dets[1])) / scale;

    std::size_t ic = g.index_of(0.0);
    Vector4cd a = f1.value(ic), b = f2.value(ic);
    s.E_X = a(1) * b(3) - a(3) * b(1);      // odd components of X-parity functions
    s.E_Xperp = a(0) * b(2) - a(2) * b(0);  // even components
    return s;
}

inline EvansSample evans_eval_safe(complexd lambda, double omega,
                                   const Potentials& pot) {
    try {
        return evans_eval(lambda, omega, pot);
    } catch (const std::exception&) {
        EvansSample s;
        s.lambda = lambda;
        s.omega = omega;
        s.failed = true;
        return s;
    }
}

inline complexd parity_value(const EvansSample& s, Parity p) {
    switch (p) {
        case Parity::X: return s.E_X;
        case Parity::Xperp: return s.E_Xperp;
        default: return s.E;
    }
}

// Avoid the threshold degeneracies |xi_j| < 1e-8 by a small imaginary offset.
inline complexd nudge_off_threshold(complexd lambda, double omega) {
    FreeEigenstructure fe = free_eigenstructure(lambda, omega);
    if (fe.threshold1 || fe.threshold2) {
        double sgn = lambda.imag() >= 0 ? 1.0 : -1.0;
        return lambda + complexd(0, sgn * 1e-6);
    }
    return lambda;
}

struct ScanResult {
    std::vector<EvansSample> samples;
    // bracket = index into samples of a local |E_parity| minimum below tolerance
    std::vector<std::size_t> brackets;
};

inline ScanResult scan_segment(double omega, const Potentials& pot, bool imaginary_axis,
                               double from, double to, std::size_t n,
                               Parity parity = Parity::full,
                               double bracket_tol = 1e-3) {
    if (n < 2) throw std::invalid_argument("scan_segment: n too small");
    ScanResult r;
    r.samples.resize(n);
    const complexd I(0, 1);
    parallel_for(n, [&](std::size_t i) {
        double t = from + (to - from) * double(i) / double(n - 1);
        complexd lam = imaginary_axis ? I * t : complexd(t, 0);
        lam = nudge_off_threshold(lam, omega);
        r.samples[i] = evans_eval_safe(lam, omega, pot);
    });
    // local minima of |E_parity| below tolerance relative to the median scale
    std::vector<double> mags(n);
    for (std::size_t i = 0; i < n; ++i)
        mags[i] = r.samples[i].failed ? 1e300 : std::abs(parity_value(r.samples[i], parity));
    std::vector<double> sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    double scale = std::max(sorted[n / 2], 1e-300);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(mags[i] <= mags[i - 1] && mags[i] <= mags[i + 1])) continue;
        // V-shape extrapolation: for a linear zero crossing between samples the
        // estimate recovers the true minimum; at a smooth nonzero minimum it
        // stays close to the sampled value
        double vmin = std::max(0.0, mags[i] - 0.5 * std::abs(mags[i + 1] - mags[i - 1]));
        if (std::min(mags[i], vmin) < bracket_tol * scale) r.brackets.push_back(i);
    }
    return r;
}

// Winding number of E_parity around a rectangle centered at lambda0.
inline int winding_number(complexd lambda0, double omega, const Potentials& pot,
                          double radius, Parity parity, int per_side = 12) {
    std::vector<complexd> pts;
    auto push_side = [&](complexd a, complexd b) {
        for (int i = 0; i < per_side; ++i)
            pts.push_back(a + (b - a) * (double(i) / per_side));
    };
    complexd c1 = lambda0 + complexd(-radius, -radius);
    complexd c2 = lambda0 + complexd(radius, -radius);
    complexd c3 = lambda0 + complexd(radius, radius);
    complexd c4 = lambda0 + complexd(-radius, radius);
    push_side(c1, c2);
    push_side(c2, c3);
    push_side(c3, c4);
    push_side(c4, c1);

    std::vector<complexd> vals(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        vals[i] = parity_value(evans_eval_safe(pts[i], omega, pot), parity);
    });
    double total = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        complexd a = vals[i], b = vals[(i + 1) % pts.size()];
        if (a == complexd(0, 0) || b == complexd(0, 0))
            throw std::runtime_error("winding_number: zero on contour");
        total += std::arg(b / a);
    }
    return int(std::lround(total / (2.0 * M_PI)));
}

struct LocatedZero {
    complexd lambda;
    int multiplicity = 0;
    double abs_E = 0;
};

// Newton refinement on E_parity with numerical derivative; winding-number
// certificate over a small rectangle provides the multiplicity.
inline LocatedZero locate_zero(complexd seed, double omega, const Potentials& pot,
                               Parity parity, bool certify = true,
                               double cert_radius = 1e-4) {
    complexd lam = seed;
    auto eval = [&](complexd l) {
        return parity_value(evans_eval(l, omega, pot), parity);
    };
    double last = std::abs(eval(lam));
    for (int it = 0; it < 60; ++it) {
        double dstep = 1e-6 * (1.0 + std::abs(lam));
        complexd E0 = eval(lam);
        if (std::abs(E0) < 1e-14) break;
        complexd dE = (eval(lam + dstep) - eval(lam - dstep)) / (2.0 * dstep);
        if (std::abs(dE) == 0.0) throw std::runtime_error("locate_zero: no convergence");
        complexd step = E0 / dE;
        // damped Newton
        for (int halving = 0; halving < 8; ++halving) {
            complexd trial = lam - step;
            double m = std::abs(eval(trial));
            if (m < last) {
                lam = trial;
                last = m;
                break;
            }
            step *= 0.5;
            if (halving == 7) throw std::runtime_error("locate_zero: no convergence");
        }
        if (std::abs(step) < 1e-12 * (1.0 + std::abs(lam))) break;
    }
    LocatedZero z;
    z.lambda = lam;
    z.abs_E = last;
    z.multiplicity = certify ? winding_number(lam, omega, pot, cert_radius, parity) : 1;
    return z;
}

inline Parity parity_classify_zero(complexd lambda_star, double omega,
                                   const Potentials& pot, double tol = 1e-6) {
    EvansSample s = evans_eval(lambda_star, omega, pot);
    double scale = std::max(1.0, std::abs(s.E_X) + std::abs(s.E_Xperp));
    bool zx = std::abs(s.E_X) < tol * scale;
    bool zp = std::abs(s.E_Xperp) < tol * scale;
    if (!zx && !zp) throw std::runtime_error("parity_classify_zero: not a zero");
    if (zx && zp) return Parity::full;  // "both"
    return zx ? Parity::X : Parity::Xperp;
}

struct ZeroCurve {
    std::vector<double> omegas;
    std::vector<complexd> lambdas;
    std::vector<int> multiplicities;
    Parity parity = Parity::full;
    std::string termination;  // "completed", "lost zero", ...
};

// Predictor(secant in omega) - corrector(locate_zero) continuation.
inline ZeroCurve track_curve(const Model& model, double omega_from, double omega_to,
                             double step, complexd seed_lambda, Parity parity,
                             std::size_t n_grid = 4096) {
    ZeroCurve curve;
    curve.parity = parity;
    curve.termination = "completed";
    double dir = (omega_to >= omega_from) ? 1.0 : -1.0;
    step = std::abs(step) * dir;
    complexd pred = seed_lambda;
    for (double om = omega_from;; om += step) {
        if ((dir > 0 && om > omega_to + 1e-12) || (dir < 0 && om < omega_to - 1e-12))
            break;
        try {
            SolitaryWave w = solve_wave(model, om, -1, n_grid);
            Potentials pot = potentials(w);
            LocatedZero z = locate_zero(pred, om, pot, parity, /*certify=*/false);
            if (std::abs(z.abs_E) > 1e-5) throw std::runtime_error("corrector stalled");
            curve.omegas.push_back(om);
            curve.lambdas.push_back(z.lambda);
            curve.multiplicities.push_back(1);
            // secant predictor
            std::size_t m = curve.lambdas.size();
            pred = (m >= 2) ? curve.lambdas[m - 1] +
                                  (curve.lambdas[m - 1] - curve.lambdas[m - 2])
                            : z.lambda;
            // stop if the zero collides with the essential-spectrum edge
            if (std::abs(std::abs(z.lambda.imag()) - (1.0 - std::abs(om))) < 1e-3 &&
                std::abs(z.lambda.real()) < 1e-8) {
                curve.termination = "reached essential spectrum edge";
                break;
            }
        } catch (const std::exception&) {
            curve.termination = "lost zero";
            break;
        }
    }
    return curve;
}

struct ThresholdProbe {
    double abs_E_extrapolated = 0;
    bool resonance_suspected = false;
};

// Probe |E| near the gap-edge i(1-|w|) or embedded threshold i(1+|w|).
inline ThresholdProbe threshold_probe(double omega, const Potentials& pot,
                                      bool embedded) {
    const complexd I(0, 1);
    double lam0 = embedded ? (1.0 + std::abs(omega)) : (1.0 - std::abs(omega));
    double off = 1e-4;
    // approach from below the threshold
    double e1 = std::abs(evans_eval(I * (lam0 - off), omega, pot).E);
    double e2 = std::abs(evans_eval(I * (lam0 - 2 * off), omega, pot).E);
    ThresholdProbe tp;
    tp.abs_E_extrapolated = std::max(0.0, 2 * e1 - e2);  // linear extrapolation
    // |E| vanishes like sqrt(xi) at a resonant threshold, so the linear
    // extrapolation lands at a small positive value rather than 0
    tp.resonance_suspected = tp.abs_E_extrapolated < 0.05;
    return tp;
}

struct KreinResult {
    int sign = 0;
    double magnitude = 0;
};

// Krein signature sign<Phi, i J Phi> of a purely imaginary eigenvalue, with
// the eigenfunction assembled from the decaying Jost combination.
inline KreinResult krein_signature_of(const FullGrid& g, const Field4& Phi) {
    const auto& ms = dirac_matrices();
    complexd s = 0;
    for (std::size_t i = 0; i < g.m; ++i) {
        double w = (i == 0 || i == g.m - 1) ? 0.5 : 1.0;
        s += w * (Phi[i].adjoint() * ms.Sigma * Phi[i])(0);
    }
    s *= g.h;
    double n2 = 0;
    for (std::size_t i = 0; i < g.m; ++i) n2 += Phi[i].squaredNorm() * g.h;
    KreinResult kr;
    kr.magnitude = std::real(s);
    if (std::abs(kr.magnitude) < 1e-6 * n2)
        throw std::runtime_error("krein_signature: null signature");
    kr.sign = kr.magnitude > 0 ? 1 : -1;
    return kr;
}

// Assemble the decaying eigenfunction at a located Evans zero: the combination
// a1 f1 + a2 f2 matching b1 g1 + b2 g2 (null vector of the x=0 Evans matrix).
inline Field4 eigenfunction_at(complexd lambda_star, double omega,
                               const Potentials& pot) {
    JostSolution f1 = jost_solve(lambda_star, omega, pot, JostSide::plus_infinity, 1,
                                 JostKind::decaying_f);
    JostSolution f2 = jost_solve(lambda_star, omega, pot, JostSide::plus_infinity, 2,
                                 JostKind::decaying_f);
    JostSolution g1 = reflect(f1);
    JostSolution g2 = reflect(f2);
    const FullGrid& g = pot.grid;
    Eigen::Matrix4cd M = detail::evans_matrix(f1, f2, g1, g2, g.index_of(0.0));
    // null vector via SVD: coefficients (a1,a2,-b1,-b2)
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(M, Eigen::ComputeFullV);
    Eigen::Vector4cd c = svd.matrixV().col(3);
    Field4 Phi(g.m);
    for (std::size_t i = 0; i < g.m; ++i)
        Phi[i] = c(0) * f1.value(i) + c(1) * f2.value(i);
    // use the g-side representation on the left half line for accuracy
    for (std::size_t i = 0; i < g.m; ++i)
        if (g.x[i] < 0) Phi[i] = -c(2) * g1.value(i) - c(3) * g2.value(i);
    return Phi;
}

}  // namespace gnlab

#pragma once

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "gnlab/linearization.hpp"

namespace gnlab {

enum class JostSide { plus_infinity, minus_infinity };
enum class JostKind { decaying_f, antidecaying_F, modified_Ftilde };

// A C^4-valued solution of (d_x - M(x,lambda,omega)) psi = 0 prescribed by its
// exponential asymptotics. Samples are stored in profiled form
//   psi(x_i) = q[i] * exp(logscale[i]) * exp(i*mu*x_i),
// with checkpointed renormalization keeping q of order one.
struct JostSolution {
    complexd lambda;
    double omega = 0;
    JostSide side = JostSide::plus_infinity;
    int index = 1;  // 1 or 2
    JostKind kind = JostKind::decaying_f;
    complexd mu;       // profile exponent
    Vector4cd asympt;  // target asymptotic vector (unit)
    FullGrid grid;
    std::vector<Vector4cd> q;
    std::vector<double> logscale;

    Vector4cd value(std::size_t i) const {
        complexd I(0, 1);
        return q[i] * std::exp(complexd(logscale[i], 0) + I * mu * grid.x[i]);
    }
    Vector4cd value_at(double x, const FullGrid& /*unused*/) const {
        return value(grid.index_of(x));
    }
};

namespace detail {

using CState = std::array<complexd, 4>;

struct ProfiledRhs {
    const Potentials* pot;
    complexd lambda;
    double omega;
    complexd mu;
    void operator()(const CState& y, CState& dy, double x) const {
        Matrix4cd M = coefficient_matrix(x, lambda, omega, *pot);
        const complexd I(0, 1);
        Vector4cd v;
        for (int i = 0; i < 4; ++i) v(i) = y[i];
        Vector4cd r = M * v - I * mu * v;
        for (int i = 0; i < 4; ++i) dy[i] = r[i];
    }
};

}  // namespace detail

// Integrate the profiled system from x_start to x_end (inward from the
// prescribed end), sampling on the grid nodes. Renormalization checkpoints
// every |dx| = 1 keep the profiled magnitude bounded.
inline JostSolution jost_solve(complexd lambda, double omega, const Potentials& pot,
                               JostSide side, int index, JostKind kind) {
    namespace odeint = boost::numeric::odeint;
    if (kind == JostKind::modified_Ftilde)
        throw std::invalid_argument("jost_solve: use modified_antidecaying for Ftilde");
    FreeEigenstructure fe = free_eigenstructure(lambda, omega);
    bool thr = (index == 1) ? fe.threshold1 : fe.threshold2;
    if (thr) throw std::runtime_error("jost_solve: threshold degeneracy (|xi_j| < 1e-8)");

    JostSolution js;
    js.lambda = lambda;
    js.omega = omega;
    js.side = side;
    js.index = index;
    js.kind = kind;
    js.grid = pot.grid;
    const FullGrid& g = js.grid;
    complexd xi = (index == 1) ? fe.xi1 : fe.xi2;
    Vector4cd Xi = (index == 1) ? fe.Xi1 : fe.Xi2;
    Vector4cd H = (index == 1) ? fe.H1 : fe.H2;

    bool from_plus = (side == JostSide::plus_infinity);
    if (kind == JostKind::decaying_f) {
        js.mu = from_plus ? xi : -xi;      // f ~ Xi e^{i xi x};  g ~ H e^{-i xi x}
        js.asympt = from_plus ? Xi : H;
    } else {
        js.mu = from_plus ? -xi : xi;      // F ~ H e^{-i xi x};  G ~ Xi e^{i xi x}
        js.asympt = from_plus ? H : Xi;
    }

    js.q.assign(g.m, Vector4cd::Zero());
    js.logscale.assign(g.m, 0.0);

    detail::ProfiledRhs rhs{&pot, lambda, omega, js.mu};
    auto stepper =
        odeint::make_controlled(1e-11, 1e-11, odeint::runge_kutta_dopri5<detail::CState>());

    long i0 = from_plus ? long(g.m) - 1 : 0;
    long di = from_plus ? -1 : 1;
    detail::CState y;
    for (int c = 0; c < 4; ++c) y[c] = js.asympt(c);
    js.q[i0] = js.asympt;
    double lscale = 0.0;
    double x_since_checkpoint = 0.0;
    double dt0 = from_plus ? -1e-3 : 1e-3;

    for (long i = i0; i != (from_plus ? -1L : long(g.m)); i += di) {
        if (i != i0) {
            double xa = g.x[i - di], xb = g.x[i];
            odeint::integrate_adaptive(stepper, rhs, y, xa, xb, dt0);
            double nrm = 0;
            for (int c = 0; c < 4; ++c) nrm += std::norm(y[c]);
            nrm = std::sqrt(nrm);
            if (!(nrm < 1e250) || !std::isfinite(nrm))
                throw std::runtime_error("jost_solve: stiff blow-up");
            x_since_checkpoint += std::abs(xb - xa);
            if (x_since_checkpoint >= 1.0) {
                if (nrm > 1e12)
                    throw std::runtime_error("jost_solve: stiff blow-up");
                if (nrm > 0) {
                    for (int c = 0; c < 4; ++c) y[c] /= nrm;
                    lscale += std::log(nrm);
                }
                x_since_checkpoint = 0.0;
            }
            for (int c = 0; c < 4; ++c) js.q[i](c) = y[c];
            js.logscale[i] = lscale;
        }
    }
    return js;
}

// Reflection construction: g_j(x) = bold_beta f_j(-x)  (and G_j from F_j).
inline JostSolution reflect(const JostSolution& f) {
    const auto& ms = dirac_matrices();
    JostSolution gj = f;
    gj.side = (f.side == JostSide::plus_infinity) ? JostSide::minus_infinity
                                                  : JostSide::plus_infinity;
    gj.mu = -f.mu;
    const FullGrid& g = f.grid;
    Matrix4cd B = ms.bold_beta.cast<complexd>();
    for (std::size_t i = 0; i < g.m; ++i) {
        std::size_t ir = g.m - 1 - i;
        gj.q[i] = B * f.q[ir];
        gj.logscale[i] = f.logscale[ir];
    }
    gj.asympt = B * f.asympt;
    return gj;
}

// Modified anti-decaying solution Ftilde_j = F_j + (f_j - F_j)/(2 i xi_j);
// at thresholds the pointwise limit (linear-in-x growth) is taken via a
// nearby lambda on the analytic family.
inline JostSolution modified_antidecaying(complexd lambda, double omega,
                                          const Potentials& pot, int index,
                                          JostSide side = JostSide::plus_infinity) {
    FreeEigenstructure fe = free_eigenstructure(lambda, omega);
    complexd xi = (index == 1) ? fe.xi1 : fe.xi2;
    bool thr = std::abs(xi) < 1e-8;

    complexd lam_use = lambda;
    if (thr) {
        // step off the threshold along the imaginary axis so that |xi| ~ sqrt(eps);
        // the family converges linearly in xi, so keep the offset tiny
        const complexd I(0, 1);
        double sgn = (lambda.imag() >= 0) ? 1.0 : -1.0;
        lam_use = lambda + sgn * I * 1e-12;
        fe = free_eigenstructure(lam_use, omega);
        xi = (index == 1) ? fe.xi1 : fe.xi2;
    }

    JostSolution f = jost_solve(lam_use, omega, pot, side, index, JostKind::decaying_f);
    JostSolution F = jost_solve(lam_use, omega, pot, side, index,
                                JostKind::antidecaying_F);
    // Near a threshold the asymptotic vectors coalesce up to a sign,
    // H_j -> sigma * Xi_j; the convergent combination is (f - sigma F)/(2 i xi).
    // At the embedded threshold i(1+omega) the explicit normalization gives
    // sigma = -1, so the naive difference would diverge like 1/xi.
    double sigma = 1.0;
    if (std::abs(xi) < 1e-2) {
        Vector4cd Xi = (index == 1) ? fe.Xi1 : fe.Xi2;
        Vector4cd H = (index == 1) ? fe.H1 : fe.H2;
        if ((Xi + H).norm() < (Xi - H).norm()) sigma = -1.0;
    }
    JostSolution ft = F;
    ft.lambda = lambda;
    ft.kind = JostKind::modified_Ftilde;
    ft.mu = complexd(0, 0);
    const complexd two_i_xi = complexd(0, 2) * xi;
    for (std::size_t i = 0; i < f.grid.m; ++i) {
        Vector4cd val = F.value(i) + (f.value(i) - sigma * F.value(i)) / two_i_xi;
        ft.q[i] = val;
        ft.logscale[i] = 0.0;
    }
    return ft;
}

// Connection matrices A, B with (g1,g2) = (f1,f2) A + (Ftilde1,Ftilde2) B,
// fit in least squares over a window around x = 0.
struct ConnectionMatrices {
    Matrix2cd A, B;
    double residual = 0;  // sup-norm reconstruction residual on the window
};

inline ConnectionMatrices connection_matrices(complexd lambda, double omega,
                                              const Potentials& pot,
                                              double window = 2.0, int npts = 41) {
    JostSolution f1 = jost_solve(lambda, omega, pot, JostSide::plus_infinity, 1,
                                 JostKind::decaying_f);
    JostSolution f2 = jost_solve(lambda, omega, pot, JostSide::plus_infinity, 2,
                                 JostKind::decaying_f);
    JostSolution Ft1 = modified_antidecaying(lambda, omega, pot, 1);
    JostSolution Ft2 = modified_antidecaying(lambda, omega, pot, 2);
    JostSolution g1 = reflect(f1);
    JostSolution g2 = reflect(f2);

    const FullGrid& g = pot.grid;
    std::vector<std::size_t> idx;
    for (int p = 0; p < npts; ++p) {
        double x = -window + 2.0 * window * double(p) / double(npts - 1);
        idx.push_back(g.index_of(x));
    }
    Eigen::MatrixXcd Amat(4 * idx.size(), 4);
    Eigen::MatrixXcd rhs(4 * idx.size(), 2);
    for (std::size_t p = 0; p < idx.size(); ++p) {
        std::size_t i = idx[p];
        Amat.block<4, 1>(4 * p, 0) = f1.value(i);
        Amat.block<4, 1>(4 * p, 1) = f2.value(i);
        Amat.block<4, 1>(4 * p, 2) = Ft1.value(i);
        Amat.block<4, 1>(4 * p, 3) = Ft2.value(i);
        rhs.block<4, 1>(4 * p, 0) = g1.value(i);
        rhs.block<4, 1>(4 * p, 1) = g2.value(i);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Amat,
                                           Eigen::ComputeThinU | Eigen::ComputeThinV);
    double cond = svd.singularValues()(0) / svd.singularValues()(3);
    if (!(cond < 1e12))
        throw std::runtime_error("connection_matrices: basis degenerate");
    Eigen::MatrixXcd X = svd.solve(rhs);

    ConnectionMatrices cm;
    cm.A << X(0, 0), X(0, 1), X(1, 0), X(1, 1);
    cm.B << X(2, 0), X(2, 1), X(3, 0), X(3, 1);
    cm.residual = (Amat * X - rhs).cwiseAbs().maxCoeff();
    return cm;
}

}  // namespace gnlab

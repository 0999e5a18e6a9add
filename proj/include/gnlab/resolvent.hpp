#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "gnlab/evans.hpp"
#include "gnlab/jost.hpp"

namespace gnlab {

// Gamma(lambda,omega) built from the second row of B so that
// B21 G11 + B22 G21 = 0 and det Gamma = -1.
inline Matrix2cd gamma_matrix(const Matrix2cd& B) {
    complexd B21 = B(1, 0), B22 = B(1, 1);
    double n21 = std::abs(B21), n22 = std::abs(B22);
    double den = std::sqrt(n21 * n21 + n22 * n22);
    if (den < 1e-12) throw std::runtime_error("gamma_matrix: degenerate B row");
    complexd eis(1, 0);
    if (n21 > 0 && n22 > 0)
        eis = -(B21 * n22) / (B22 * n21);  // |eis| = 1 by construction
    Matrix2cd G;
    G(0, 0) = n22 / den;
    G(0, 1) = n21 * std::conj(eis) / den;
    G(1, 0) = n21 * eis / den;
    G(1, 1) = -n22 / den;
    return G;
}

enum class GreenSide { minus, plus };

// Everything needed to evaluate the resolvent kernel at one (lambda, omega).
struct ResolventData {
    complexd lambda;
    double omega = 0;
    FullGrid grid;
    JostSolution f1, f2, g1, g2;
    Matrix2cd A, B, Gamma;
    complexd E;  // Evans value

    Matrix4cd delta(std::size_t yi) const {
        Matrix4cd D = Matrix4cd::Zero();
        const JostSolution* fs[2] = {&f1, &f2};
        const JostSolution* gs[2] = {&g1, &g2};
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                Vector4cd fj = fs[j]->value(yi), gk = gs[k]->value(yi);
                Vector4cd gj = gs[j]->value(yi), fk = fs[k]->value(yi);
                D += Gamma(j, k) * (fj * gk.adjoint() - gj * fk.adjoint());
            }
        return D;
    }

    // G(x,y) with the Heaviside convention Theta(0) = 1/2.
    Matrix4cd green(std::size_t xi, std::size_t yi) const {
        const auto& ms = dirac_matrices();
        double tx = grid.x[xi], ty = grid.x[yi];
        double thp = tx > ty ? 1.0 : (tx == ty ? 0.5 : 0.0);
        double thm = 1.0 - thp;
        Matrix4cd K = Matrix4cd::Zero();
        const JostSolution* fs[2] = {&f1, &f2};
        const JostSolution* gs[2] = {&g1, &g2};
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                if (thp != 0.0)
                    K += thp * Gamma(j, k) * (fs[j]->value(xi) * gs[k]->value(yi).adjoint());
                if (thm != 0.0)
                    K += thm * Gamma(j, k) * (gs[j]->value(xi) * fs[k]->value(yi).adjoint());
            }
        // alpha composes on the right: columns of K Delta^{-1} are solutions of
        // (d_x - M)u = 0 away from the diagonal, so -alpha(d_x - M) G = delta I4
        // holds with G = -K Delta^{-1} alpha (the jump across x=y stays -alpha)
        Matrix4cd D = delta(yi);
        return -K * D.inverse() * ms.bold_alpha.cast<complexd>();
    }
};

// Assemble the resolvent data at (lambda, omega). side = minus uses the
// boundary value to the left of the essential spectrum (the formula verbatim);
// side = plus swaps f_j <-> F_j and g_j <-> G_j in the oscillatory channels.
inline ResolventData make_resolvent(complexd lambda, double omega,
                                    const Potentials& pot,
                                    GreenSide side = GreenSide::minus) {
    FreeEigenstructure fe = free_eigenstructure(lambda, omega);
    if (fe.threshold1 || fe.threshold2)
        throw std::runtime_error("make_resolvent: threshold lambda (|xi_j| < 1e-8)");

    ResolventData rd;
    rd.lambda = lambda;
    rd.omega = omega;
    rd.grid = pot.grid;

    bool osc1 = fe.kappa1 < 1e-12, osc2 = fe.kappa2 < 1e-12;
    auto solve = [&](int index, bool swapped) {
        JostKind kind = swapped ? JostKind::antidecaying_F : JostKind::decaying_f;
        return jost_solve(lambda, omega, pot, JostSide::plus_infinity, index, kind);
    };
    bool swap1 = (side == GreenSide::plus) && osc1;
    bool swap2 = (side == GreenSide::plus) && osc2;
    rd.f1 = solve(1, swap1);
    rd.f2 = solve(2, swap2);
    rd.g1 = reflect(rd.f1);
    rd.g2 = reflect(rd.f2);

    rd.E = detail::evans_matrix(rd.f1, rd.f2, rd.g1, rd.g2, rd.grid.index_of(0.0))
               .determinant();
    if (std::abs(rd.E) < 1e-8)
        throw std::runtime_error("make_resolvent: Evans zero -- resolvent undefined");

    ConnectionMatrices cm = connection_matrices(lambda, omega, pot);
    rd.A = cm.A;
    rd.B = cm.B;
    rd.Gamma = gamma_matrix(rd.B);
    return rd;
}

// Weighted operator-norm estimate ||<x>^-s G <y>^-s|| on a strided grid,
// as the largest singular value of the discretized kernel.
struct LapBoundEntry {
    complexd lambda;
    double estimate = 0;
    bool failed = false;
};

inline std::vector<LapBoundEntry> lap_bound_probe(double omega, const Potentials& pot,
                                                  double s_weight,
                                                  const std::vector<complexd>& lambdas,
                                                  std::size_t target_pts = 120) {
    if (!(s_weight > 3.0))
        throw std::invalid_argument("lap_bound_probe: s_weight must exceed 3");
    const FullGrid& g = pot.grid;
    std::size_t stride = std::max<std::size_t>(1, g.m / target_pts);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < g.m; i += stride) idx.push_back(i);
    const std::size_t np = idx.size();

    std::vector<LapBoundEntry> out(lambdas.size());
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        out[li].lambda = lambdas[li];
        try {
            ResolventData rd = make_resolvent(lambdas[li], omega, pot);
            Eigen::MatrixXcd K(4 * np, 4 * np);
            for (std::size_t a = 0; a < np; ++a) {
                double wx = std::pow(japanese_bracket(g.x[idx[a]]), -s_weight);
                for (std::size_t b = 0; b < np; ++b) {
                    double wy = std::pow(japanese_bracket(g.x[idx[b]]), -s_weight);
                    K.block<4, 4>(4 * a, 4 * b) =
                        wx * wy * rd.green(idx[a], idx[b]) * (g.h * double(stride));
                }
            }
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(K);
            out[li].estimate = svd.singularValues()(0);
        } catch (const std::exception&) {
            out[li].failed = true;
        }
    }
    return out;
}

}  // namespace gnlab

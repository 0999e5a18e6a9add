#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>

#include "gnlab/util.hpp"

namespace gnlab {

using Eigen::Matrix2d;
using Eigen::Matrix4cd;
using Eigen::Matrix4d;
using Eigen::Vector4cd;
using Matrix2cd = Eigen::Matrix2cd;

// Scalar self-interaction of the generalized Gross-Neveu model.
// Mass is normalized to m = 1 throughout.
struct Model {
    int k = 1;
    std::function<double(double)> f;       // f(s)
    std::function<double(double)> fprime;  // f'(s)
    std::function<double(double)> F;       // antiderivative, F(0)=0
};

inline Model make_power_model(int k) {
    if (k < 1) throw std::invalid_argument("make_power_model: k must be >= 1");
    Model m;
    m.k = k;
    m.f = [k](double s) { return std::pow(s, k); };
    m.fprime = [k](double s) { return k * std::pow(s, k - 1); };
    m.F = [k](double s) { return std::pow(s, k + 1) / double(k + 1); };
    return m;
}

// Fixed Dirac/symplectic matrices of the 2- and 4-component formulations.
// alpha2 = -sigma2, beta2 = sigma3 (so that D_m = -i alpha2 d_x + beta2),
// and the real 4x4 representation acting on (Re psi, Im psi).
struct MatrixSet {
    Matrix2cd alpha2, beta2, sigma1, sigma3;
    Matrix4d J4, bold_alpha, bold_beta;
    Matrix4cd Sigma;  // i*J4, Hermitian
};

inline const MatrixSet& dirac_matrices() {
    static const MatrixSet ms = [] {
        MatrixSet m;
        const complexd I(0, 1);
        m.sigma1 << 0, 1, 1, 0;
        m.sigma3 << 1, 0, 0, -1;
        m.alpha2 << 0, I, -I, 0;  // -sigma2
        m.beta2 = m.sigma3;
        m.J4 << 0, 0, 1, 0,
                0, 0, 0, 1,
               -1, 0, 0, 0,
                0,-1, 0, 0;
        // bold_alpha = [[0, Im sigma2],[-Im sigma2, 0]], Im sigma2 = [[0,-1],[1,0]]
        m.bold_alpha << 0, 0, 0, -1,
                        0, 0, 1, 0,
                        0, 1, 0, 0,
                       -1, 0, 0, 0;
        m.bold_beta << 1, 0, 0, 0,
                       0,-1, 0, 0,
                       0, 0, 1, 0,
                       0, 0, 0,-1;
        m.Sigma = I * m.J4.cast<complexd>();
        return m;
    }();
    return ms;
}

}  // namespace gnlab

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "gnlab/model.hpp"
#include "gnlab/util.hpp"

using namespace gnlab;

TEST_CASE("pure power nonlinearity values") {
    Model m2 = make_power_model(2);
    CHECK(m2.f(1.0) == doctest::Approx(1.0));
    CHECK(m2.F(1.0) == doctest::Approx(1.0 / 3.0));
    Model m1 = make_power_model(1);
    CHECK(m1.f(0.5) == doctest::Approx(0.5));
    CHECK(m1.F(0.5) == doctest::Approx(0.125));
    Model m3 = make_power_model(3);
    CHECK(m3.f(-1.0) == doctest::Approx(-1.0));
    CHECK(m3.F(-1.0) == doctest::Approx(0.25));
    CHECK(m3.fprime(2.0) == doctest::Approx(12.0));
    CHECK_THROWS(make_power_model(0));
    CHECK_THROWS(make_power_model(-2));
}

TEST_CASE("F is the antiderivative of f") {
    for (int k : {1, 2, 3}) {
        Model m = make_power_model(k);
        // |F(s) - int_0^s f| <= 1e-10 via fine Simpson quadrature
        for (double s : {-2.0, -0.7, 0.3, 1.1, 2.0}) {
            const std::size_t nq = 2001;
            std::vector<double> fv(nq);
            double h = s / double(nq - 1);
            for (std::size_t i = 0; i < nq; ++i) fv[i] = m.f(double(i) * h);
            CHECK(std::abs(m.F(s) - simpson(fv, h)) <= 1e-10);
        }
        // finite-difference derivative of F matches f to 1e-6 relative
        for (double s = -2.0; s <= 2.0; s += 0.25) {
            double h = 1e-5;
            double fd = (m.F(s + h) - m.F(s - h)) / (2 * h);
            CHECK(std::abs(fd - m.f(s)) <= 1e-6 * std::max(1.0, std::abs(m.f(s))));
        }
    }
}

TEST_CASE("Dirac matrix identities") {
    const auto& ms = dirac_matrices();
    Matrix2d I2 = Matrix2d::Identity();
    Matrix4d I4 = Matrix4d::Identity();
    CHECK((ms.alpha2 * ms.alpha2 - I2).norm() == 0.0);
    CHECK((ms.beta2 * ms.beta2 - I2).norm() == 0.0);
    CHECK((ms.alpha2 * ms.beta2 + ms.beta2 * ms.alpha2).norm() == 0.0);
    CHECK((ms.J4 * ms.J4 + I4).norm() == 0.0);
    CHECK((ms.bold_alpha * ms.bold_alpha - I4).norm() == 0.0);
    CHECK((ms.bold_beta * ms.bold_beta - I4).norm() == 0.0);
    CHECK((ms.bold_alpha * ms.bold_beta + ms.bold_beta * ms.bold_alpha).norm() == 0.0);
}

TEST_CASE("Sigma = iJ is Hermitian with eigenvalues {1,1,-1,-1}") {
    const auto& ms = dirac_matrices();
    CHECK((ms.Sigma - ms.Sigma.adjoint()).norm() == 0.0);
    CHECK((ms.Sigma * ms.Sigma - Matrix4cd::Identity()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix4cd> es(ms.Sigma);
    Eigen::Vector4d ev = es.eigenvalues();
    CHECK(ev(0) == doctest::Approx(-1.0));
    CHECK(ev(1) == doctest::Approx(-1.0));
    CHECK(ev(2) == doctest::Approx(1.0));
    CHECK(ev(3) == doctest::Approx(1.0));
}

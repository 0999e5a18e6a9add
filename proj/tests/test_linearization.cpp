#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>

#include "gnlab/linearization.hpp"
#include "gnlab/util.hpp"

using namespace gnlab;
using namespace std::complex_literals;

TEST_CASE("potentials: pointwise values and symmetry") {
    Model m = make_power_model(2);
    SolitaryWave w = solve_wave(m, 0.3, -1, 4096);
    Potentials p = potentials(w);

    // zero profile gives W = 0
    Matrix2d W0z, W1z;
    Potentials::eval_blocks(m, 0.0, 0.0, W0z, W1z);
    CHECK(W0z.norm() == 0.0);
    CHECK(W1z.norm() == 0.0);

    // at x=0: u=0, s=Gamma, so W0 = diag(-Gamma^2, Gamma^2)
    std::size_t c = p.grid.center();
    double G2 = w.Gamma * w.Gamma;
    CHECK(p.W0[c](0, 0) == doctest::Approx(-G2).epsilon(1e-10));
    CHECK(p.W0[c](1, 1) == doctest::Approx(G2).epsilon(1e-10));
    CHECK(std::abs(p.W0[c](0, 1)) <= 1e-14);

    // parity: W0(x) b = b W0(-x), W1(x) b = b W1(-x), b = diag(1,-1)
    Matrix2d b;
    b << 1, 0, 0, -1;
    for (double xx : {0.7, 1.9, 4.2}) {
        std::size_t ip = p.grid.index_of(xx), im = p.grid.index_of(-xx);
        CHECK((p.W0[ip] * b - b * p.W0[im]).norm() <= 1e-12);
        CHECK((p.W1[ip] * b - b * p.W1[im]).norm() <= 1e-12);
    }
}

TEST_CASE("potentials: tail decay rate of ||W|| is 2k delta") {
    for (auto [k, omega] : {std::pair{1, 0.5}, std::pair{2, 0.3}}) {
        Model m = make_power_model(k);
        SolitaryWave w = solve_wave(m, omega, -1, 4096);
        Potentials p = potentials(w);
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < p.grid.m; ++i) {
            double xx = p.grid.x[i];
            if (xx < 5.0 || xx > 12.0) continue;
            double nrm = std::max(p.W0[i].norm(), p.W1[i].norm());
            xs.push_back(xx);
            ys.push_back(std::log(nrm));
        }
        double rate = -ls_slope(xs, ys);
        double expect = 2.0 * k * w.delta();
        CHECK(rate == doctest::Approx(expect).epsilon(0.05));
    }
}

TEST_CASE("coefficient matrix: zero trace and free eigenvalues") {
    Model m = make_power_model(2);
    SolitaryWave w = solve_wave(m, 0.3, -1, 2048);
    Potentials p = potentials(w);
    for (double xx : {0.0, 1.3, -2.7}) {
        for (complexd lam : {complexd(0, 0), complexd(0.2, 0.6), complexd(0, 2)}) {
            Matrix4cd M = coefficient_matrix(xx, lam, 0.3, p);
            CHECK(std::abs(M.trace()) <= 1e-14);
        }
    }

    // W=0, lambda=0, omega=0: eigenvalues {+1,+1,-1,-1}
    Matrix4cd M00 = coefficient_matrix_free(0.0, 0.0);
    Eigen::ComplexEigenSolver<Matrix4cd> es0(M00);
    std::vector<double> ev;
    for (int i = 0; i < 4; ++i) ev.push_back(es0.eigenvalues()(i).real());
    std::sort(ev.begin(), ev.end());
    CHECK(ev[0] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(ev[1] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(ev[2] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(ev[3] == doctest::Approx(1.0).epsilon(1e-10));
    for (int i = 0; i < 4; ++i) CHECK(std::abs(es0.eigenvalues()(i).imag()) <= 1e-12);

    // omega=0.2, lambda=2i: spectrum {+-sqrt(3.84), +-sqrt(2.24)}
    Matrix4cd M0 = coefficient_matrix_free(2.0i, 0.2);
    Eigen::ComplexEigenSolver<Matrix4cd> es(M0);
    std::vector<double> mag;
    for (int i = 0; i < 4; ++i) mag.push_back(std::abs(es.eigenvalues()(i)));
    std::sort(mag.begin(), mag.end());
    CHECK(mag[0] == doctest::Approx(std::sqrt(2.24)).epsilon(1e-10));
    CHECK(mag[1] == doctest::Approx(std::sqrt(2.24)).epsilon(1e-10));
    CHECK(mag[2] == doctest::Approx(std::sqrt(3.84)).epsilon(1e-10));
    CHECK(mag[3] == doctest::Approx(std::sqrt(3.84)).epsilon(1e-10));
}

TEST_CASE("free eigenstructure: exponents, vectors, thresholds") {
    // omega=0.3, lambda=0: kappa1 = kappa2 = sqrt(0.91)
    FreeEigenstructure f0 = free_eigenstructure(0.0, 0.3);
    CHECK(f0.kappa1 == doctest::Approx(std::sqrt(0.91)).epsilon(1e-12));
    CHECK(f0.kappa2 == doctest::Approx(std::sqrt(0.91)).epsilon(1e-12));

    // omega=0.2, lambda=2i: xi1 real oscillatory
    FreeEigenstructure f1 = free_eigenstructure(2.0i, 0.2);
    CHECK(f1.xi1.real() == doctest::Approx(std::sqrt(3.84)).epsilon(1e-12));
    CHECK(std::abs(f1.xi1.imag()) <= 1e-14);

    // xi2 threshold at lambda = i(1+omega)
    FreeEigenstructure ft = free_eigenstructure(complexd(0, 1.3), 0.3);
    CHECK(std::abs(ft.xi2) <= 1e-8);
    CHECK(ft.threshold2);

    // kappa switches to zero exactly across |lambda| = 1-omega on the imaginary axis
    double om = 0.3, edge = 1.0 - om;
    FreeEigenstructure fin = free_eigenstructure(complexd(0, edge - 0.01), om);
    FreeEigenstructure fout = free_eigenstructure(complexd(0, edge + 0.01), om);
    CHECK(fin.kappa1 > 0.05);
    CHECK(fout.kappa1 == 0.0);

    // normalization, H = beta Xi, and M0 Xi = i xi Xi
    const auto& ms = dirac_matrices();
    Matrix4cd B = ms.bold_beta.cast<complexd>();
    for (complexd lam : {complexd(0, 0.4), complexd(0.3, 1.2), complexd(0, 50)}) {
        FreeEigenstructure fe = free_eigenstructure(lam, 0.3);
        CHECK(fe.Xi1.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fe.Xi2.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fe.H1.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fe.H2.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((fe.H1 - B * fe.Xi1).norm() <= 1e-12);
        CHECK((fe.H2 - B * fe.Xi2).norm() <= 1e-12);
        Matrix4cd M0 = coefficient_matrix_free(lam, 0.3);
        CHECK((M0 * fe.Xi1 - complexd(0, 1) * fe.xi1 * fe.Xi1).norm() <= 1e-10 * std::abs(fe.xi1));
        CHECK((M0 * fe.Xi2 - complexd(0, 1) * fe.xi2 * fe.Xi2).norm() <= 1e-10 * std::abs(fe.xi2));
    }
}

TEST_CASE("kernel and Jordan chain residuals") {
    Model m = make_power_model(2);
    SolitaryWave w = solve_wave(m, 0.3, -1, 8192);
    KernelBundle kb = kernel_vectors(w);
    const FullGrid& g = kb.grid;
    double phin = norm2(g, kb.phi);

    auto resid = [&](const Field4& in, const Field4& target) {
        Field4 out = apply_JL(potentials(w), in);
        double r = 0;
        for (std::size_t i = 4; i + 4 < g.m; ++i) r += (out[i] - target[i]).squaredNorm();
        return std::sqrt(r * g.h);
    };
    Field4 zero(g.m, Vector4cd::Zero());
    CHECK(resid(kb.Jphi, zero) <= 1e-7 * phin);
    CHECK(resid(kb.dxphi, zero) <= 1e-7 * phin);
    CHECK(resid(kb.domphi, kb.Jphi) <= 1e-5);
    CHECK(resid(kb.jordan2, kb.dxphi) <= 1e-5);
}

TEST_CASE("(JL)^2 annihilates the generalized null space") {
    Model m = make_power_model(2);
    SolitaryWave w = solve_wave(m, 0.3, -1, 8192);
    Potentials p = potentials(w);
    KernelBundle kb = kernel_vectors(w);
    const FullGrid& g = kb.grid;
    for (const Field4* v : {&kb.Jphi, &kb.dxphi, &kb.domphi, &kb.jordan2}) {
        Field4 once = apply_JL(p, *v);
        Field4 twice = apply_JL(p, once);
        double r = 0;
        for (std::size_t i = 8; i + 8 < g.m; ++i) r += twice[i].squaredNorm();
        CHECK(std::sqrt(r * g.h) <= 1e-4);
    }
}

TEST_CASE("parity classification of the null-space vectors") {
    Model m = make_power_model(2);
    SolitaryWave w = solve_wave(m, 0.3, -1, 4096);
    KernelBundle kb = kernel_vectors(w);
    const FullGrid& g = kb.grid;
    // X: components 1,3 even and 2,4 odd; X-perp: the reverse
    auto check_parity = [&](const Field4& f, bool inX) {
        double r = 0, scale = 0;
        for (std::size_t i = 0; i < g.m; ++i) {
            std::size_t j = g.m - 1 - i;  // mirror index
            for (int c = 0; c < 4; ++c) {
                bool even = inX ? (c % 2 == 0) : (c % 2 == 1);
                complexd d = even ? f[i](c) - f[j](c) : f[i](c) + f[j](c);
                r = std::max(r, std::abs(d));
                scale = std::max(scale, std::abs(f[i](c)));
            }
        }
        CHECK(r <= 1e-12 * std::max(1.0, scale));
    };
    check_parity(kb.Jphi, true);
    check_parity(kb.domphi, true);
    check_parity(kb.dxphi, false);
    check_parity(kb.jordan2, false);
}

TEST_CASE("apply_JL: linearity and the 2 omega i eigenvectors") {
    Model m = make_power_model(2);
    SolitaryWave w = solve_wave(m, 0.3, -1, 8192);
    Potentials p = potentials(w);
    const FullGrid& g = p.grid;

    Field4 zero(g.m, Vector4cd::Zero());
    Field4 z = apply_JL(p, zero);
    double zn = 0;
    for (auto& v : z) zn = std::max(zn, v.norm());
    CHECK(zn == 0.0);

    // psi = (sigma1 phi; +- i sigma1 phi) are eigenvectors with values -+ 2 i omega
    auto build = [&](double sgn) {
        Field4 psi(g.m, Vector4cd::Zero());
        for (std::size_t i = 0; i < g.m; ++i) {
            double vv = w.v_at(g.x[i]), uu = w.u_at(g.x[i]);
            psi[i](0) = uu;
            psi[i](1) = vv;
            psi[i](2) = complexd(0, sgn) * uu;
            psi[i](3) = complexd(0, sgn) * vv;
        }
        return psi;
    };
    for (double sgn : {1.0, -1.0}) {
        Field4 psi = build(sgn);
        Field4 out = apply_JL(p, psi);
        // determine the eigenvalue numerically: it must be -+ 2 i omega
        complexd lam = complexd(0, -sgn * 2.0 * w.omega);
        double r = 0, nn = 0;
        for (std::size_t i = 4; i + 4 < g.m; ++i) {
            r += (out[i] - lam * psi[i]).squaredNorm();
            nn += psi[i].squaredNorm();
        }
        CHECK(std::sqrt(r / nn) <= 1e-6);
    }
}

TEST_CASE("symplectic projectors") {
    Model m = make_power_model(2);
    SolitaryWave w = solve_wave_full(m, 0.3, -1, 4096);
    Projectors pr = make_projectors(w);
    const FullGrid& g = pr.kb.grid;
    const auto& ms = dirac_matrices();
    Matrix4cd J = ms.J4.cast<complexd>();

    // P_d reproduces J phi
    Field4 pj = pr.Pd(pr.kb.Jphi);
    double r = 0, nn = 0;
    for (std::size_t i = 0; i < g.m; ++i) {
        r += (pj[i] - pr.kb.Jphi[i]).squaredNorm();
        nn += pr.kb.Jphi[i].squaredNorm();
    }
    CHECK(std::sqrt(r / nn) <= 1e-6);

    // arbitrary chi: P_c chi is symplectically orthogonal to the pair
    Field4 chi(g.m, Vector4cd::Zero());
    for (std::size_t i = 0; i < g.m; ++i) {
        double xx = g.x[i];
        double e = std::exp(-0.3 * xx * xx);
        chi[i] << e, 0.2 * xx * e, complexd(0, 0.5) * e, 0.1 * e;
    }
    Field4 pc = pr.Pc(chi);
    Field4 Jdom(g.m);
    for (std::size_t i = 0; i < g.m; ++i) Jdom[i] = J * pr.kb.domphi[i];
    double cn = norm2(g, chi);
    CHECK(std::abs(inner(g, pr.kb.phi, pc)) <= 1e-8 * cn);
    CHECK(std::abs(inner(g, Jdom, pc)) <= 1e-8 * cn);

    // P_d + P_c = identity; idempotence
    Field4 pd = pr.Pd(chi);
    Field4 pd2 = pr.Pd(pd);
    Field4 pc2 = pr.Pc(pc);
    double ridem = 0, rid = 0;
    for (std::size_t i = 0; i < g.m; ++i) {
        rid = std::max(rid, (pd[i] + pc[i] - chi[i]).norm());
        ridem = std::max(ridem, std::max((pd2[i] - pd[i]).norm(), (pc2[i] - pc[i]).norm()));
    }
    CHECK(rid <= 1e-13 * cn);
    CHECK(ridem <= 1e-8 * cn);

    // degenerate projector guard
    Projectors bad = pr;
    bad.Qprime = 0.0;
    CHECK_THROWS(make_projectors([&] {
        SolitaryWave ww = w;
        ww.dQdomega = 1e-9;
        return ww;
    }()));
}

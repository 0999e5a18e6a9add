#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "gnlab/evolution.hpp"
#include "gnlab/util.hpp"

using namespace gnlab;

namespace {

Model free_model() {
    Model m;
    m.k = 1;
    m.f = [](double) { return 0.0; };
    m.fprime = [](double) { return 0.0; };
    m.F = [](double) { return 0.0; };
    return m;
}

EvolutionState blank_state(const Model& model, double L, std::size_t N, double dt) {
    EvolutionState st;
    st.model = model;
    st.L = L;
    st.N = N;
    st.dx = L / double(N);
    st.dt = dt;
    st.x.resize(N);
    st.psi1.assign(N, 0.0);
    st.psi2.assign(N, 0.0);
    for (std::size_t j = 0; j < N; ++j) st.x[j] = -L / 2 + double(j) * st.dx;
    return st;
}

}  // namespace

TEST_CASE("free plane wave follows the exact dispersion relation") {
    const complexd I(0, 1);
    double L = 20.0;
    std::size_t N = 256;
    EvolutionState st = blank_state(free_model(), L, N, 0.01);
    st.enforce_parity = false;  // a plane wave is not X-parity
    double xi = 2.0 * M_PI * 3.0 / L;  // resolved Fourier mode
    double E = std::sqrt(1.0 + xi * xi);
    // positive-energy eigenvector of the symbol [[1, i xi], [-i xi, -1]]
    complexd a = 1.0, b = -I * (E - 1.0) / xi;
    for (std::size_t j = 0; j < N; ++j) {
        complexd ph = std::exp(I * xi * st.x[j]);
        st.psi1[j] = a * ph;
        st.psi2[j] = b * ph;
    }
    SplitStepper stepper(st);
    for (int s = 0; s < 50; ++s) stepper.step(st);
    complexd prop = std::exp(-I * E * st.t);
    double err = 0;
    for (std::size_t j = 0; j < N; ++j) {
        complexd ph = std::exp(I * xi * st.x[j]);
        err = std::max(err, std::abs(st.psi1[j] - prop * a * ph));
        err = std::max(err, std::abs(st.psi2[j] - prop * b * ph));
    }
    CHECK(err <= 1e-12);
}

TEST_CASE("zero field stays zero and overflow is detected") {
    EvolutionState st = blank_state(make_power_model(2), 40.0, 128, 0.01);
    SplitStepper stepper(st);
    for (int s = 0; s < 10; ++s) stepper.step(st);
    for (std::size_t j = 0; j < st.N; ++j) {
        CHECK(std::abs(st.psi1[j]) == 0.0);
        CHECK(std::abs(st.psi2[j]) == 0.0);
    }
    st.psi1[3] = complexd(std::numeric_limits<double>::infinity(), 0);
    CHECK_THROWS_WITH(stepper.step(st), doctest::Contains("overflow"));
}

TEST_CASE("init_state: exact wave, measured H1 bump size, parity guard") {
    Model m2 = make_power_model(2);
    double L = 80.0;
    std::size_t N = 1024;
    SolitaryWave w = solve_wave(m2, 0.3, L / 2 + 1.0, 8192);

    PerturbationSpec none;
    EvolutionState st0 = init_state(w, L, N, 0.01, none);
    double err = 0;
    for (std::size_t j = 0; j < N; ++j) {
        err = std::max(err, std::abs(st0.psi1[j] - w.v_at(st0.x[j])));
        err = std::max(err, std::abs(st0.psi2[j] - w.u_at(st0.x[j])));
    }
    CHECK(err <= 1e-13);
    CHECK(st0.parity_error() <= 1e-13);

    PerturbationSpec bump;
    bump.amplitude = 1e-2;
    bump.width = 2.0;
    EvolutionState st1 = init_state(w, L, N, 0.01, bump);
    std::vector<complexd> d1(N), d2(N, 0.0);
    for (std::size_t j = 0; j < N; ++j) d1[j] = st1.psi1[j] - st0.psi1[j];
    SplitStepper stepper(st1);
    double h1 = stepper.h1_norm(d1, d2, st1.dx);
    // closed form for a e^{-x^2/w^2}: ||g||_{H1}^2 = a^2 w sqrt(pi/2) (1 + 1/w^2)
    double aw = bump.amplitude, ww = bump.width;
    double exact = aw * std::sqrt(ww * std::sqrt(M_PI / 2.0) * (1.0 + 1.0 / (ww * ww)));
    CHECK(h1 == doctest::Approx(exact).epsilon(1e-10));

    PerturbationSpec bad;
    bad.odd_on_psi1 = true;
    CHECK_THROWS_WITH(init_state(w, L, N, 0.01, bad),
                      doctest::Contains("parity violation"));
}

TEST_CASE("modulation extraction: exact wave, pure phase, neighboring wave") {
    Model m2 = make_power_model(2);
    double L = 80.0;
    std::size_t N = 1024;
    EvolutionState st = blank_state(m2, L, N, 0.01);
    ModulationExtractor ex(m2, L, st.x, 0.3);

    auto load_phi = [&](double omega, complexd phase) {
        auto phi = ex.sample_phi(omega);
        for (std::size_t j = 0; j < st.N; ++j) {
            st.psi1[j] = phase * phi[j](0);
            st.psi2[j] = phase * phi[j](1);
        }
    };

    load_phi(0.3, 1.0);
    ModulationResult mr = ex.extract(st, 0.3, 0.0);
    REQUIRE(mr.converged);
    CHECK(std::abs(mr.omega - 0.3) <= 1e-10);
    CHECK(std::abs(mr.theta) <= 1e-10);
    double zmax = 0;
    for (const auto& z : mr.Z) zmax = std::max(zmax, z.norm());
    CHECK(zmax <= 1e-10);

    // rho = e^{i theta} psi - phi, so psi = e^{-i 0.1} phi recovers theta = 0.1
    load_phi(0.3, std::exp(complexd(0, -0.1)));
    ModulationResult mp = ex.extract(st, 0.3, 0.0);
    REQUIRE(mp.converged);
    CHECK(std::abs(mp.omega - 0.3) <= 1e-9);
    CHECK(std::abs(mp.theta - 0.1) <= 1e-9);

    load_phi(0.31, 1.0);
    ModulationResult mn = ex.extract(st, 0.3, 0.0);
    REQUIRE(mn.converged);
    CHECK(std::abs(mn.omega - 0.31) <= 1e-6);
    CHECK(std::abs(mn.theta) <= 1e-6);
}

TEST_CASE("orthogonality residuals vanish after extraction") {
    Model m2 = make_power_model(2);
    double L = 80.0;
    std::size_t N = 1024;
    SolitaryWave w = solve_wave(m2, 0.3, L / 2 + 1.0, 8192);
    PerturbationSpec bump;
    bump.amplitude = 1e-2;
    EvolutionState st = init_state(w, L, N, 0.01, bump);
    ModulationExtractor ex(m2, L, st.x, 0.3);
    ModulationResult mr = ex.extract(st, 0.3, 0.0);
    REQUIRE(mr.converged);
    auto R = ex.residual_field(st, mr.omega, mr.theta);
    double rn = 0;
    for (const auto& r : R) rn += r.squaredNorm();
    rn = std::sqrt(rn * st.dx);
    CHECK(ex.orthogonality(st, mr.omega, mr.theta).norm() <= 1e-8 * rn);
}

TEST_CASE("modulation matrix and right-hand side") {
    Model m2 = make_power_model(2);
    double L = 80.0;
    std::size_t N = 1024;
    EvolutionState st = blank_state(m2, L, N, 0.01);
    ModulationExtractor ex(m2, L, st.x, 0.3);
    auto phi = ex.sample_phi(0.3);
    for (std::size_t j = 0; j < N; ++j) {
        st.psi1[j] = phi[j](0);
        st.psi2[j] = phi[j](1);
    }

    // R = 0: rates vanish and A ~ diag(Q'/2, Q'/2)
    Eigen::Vector2d rate0 = modulation_rhs(st, ex, 0.3, 0.0);
    CHECK(rate0.norm() <= 1e-9);
    Eigen::Matrix2d A = modulation_matrix(st, ex, 0.3, 0.0);
    double half_qp = 0.5 * ex.qprime(0.3);
    // 1e-5 absorbs the O(h^2) truncation of the omega stencil behind qprime
    CHECK(A(0, 0) == doctest::Approx(half_qp).epsilon(1e-5));
    CHECK(A(1, 1) == doctest::Approx(half_qp).epsilon(1e-5));
    CHECK(std::abs(A(0, 1)) <= 1e-8 * std::abs(half_qp));
    CHECK(std::abs(A(1, 0)) <= 1e-8 * std::abs(half_qp));

    // N1 is quadratic at leading order: halving R quarters the rates
    // (the bump must be genuinely complex -- a real perturbation makes the
    // pairings <phi, J N1>, <d_omega phi, J N1> vanish identically by parity)
    auto perturbed_rate = [&](double eps) {
        for (std::size_t j = 0; j < N; ++j) {
            complexd g = eps * complexd(1, 1) * std::exp(-st.x[j] * st.x[j] / 4.0);
            st.psi1[j] = phi[j](0) + g;
            st.psi2[j] = phi[j](1);
        }
        return modulation_rhs(st, ex, 0.3, 0.0).norm();
    };
    double rfull = perturbed_rate(1e-3);
    double rhalf = perturbed_rate(5e-4);
    CHECK(rfull / rhalf == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("unperturbed run: flat omega, conserved charge, clean parity") {
    RunConfig cfg;
    cfg.k = 2;
    cfg.omega0 = 0.3;
    cfg.eps = 0.0;
    cfg.L = 100.0;
    cfg.N = 1024;
    cfg.dt = 0.02;
    cfg.T = 10.0;
    RunResult rr = evolve_run(cfg);
    REQUIRE(rr.track.points.size() >= 10);
    const TrackPoint& last = rr.track.points.back();
    CHECK(!last.left_tube);
    CHECK(std::abs(last.omega - 0.3) <= 1e-5);
    double q0 = rr.track.points.front().Q;
    for (const auto& p : rr.track.points) {
        CHECK(std::abs(p.Q - q0) / q0 <= 1e-10);
        CHECK(p.parity_err <= 1e-12);
    }
}

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "gnlab/evans.hpp"
#include "gnlab/evolution.hpp"
#include "gnlab/io.hpp"
#include "gnlab/model.hpp"
#include "gnlab/resolvent.hpp"
#include "gnlab/solitary_wave.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gnlab;

namespace {

constexpr const char* kVersion = "gnlab 1.0.0";

void require_omega(double omega) {
    if (!(omega > 0.0 && omega < 1.0))
        throw CLI::ValidationError("--omega", "omega must lie in (0,1)");
}

Parity parse_parity(const std::string& s) {
    if (s == "X") return Parity::X;
    if (s == "Xperp") return Parity::Xperp;
    if (s == "full") return Parity::full;
    throw CLI::ValidationError("--parity", "expected X, Xperp, or full");
}

std::string parity_name(Parity p) {
    switch (p) {
        case Parity::X: return "X";
        case Parity::Xperp: return "Xperp";
        default: return "full";
    }
}

json base_config(const char* command) {
    json j;
    j["version"] = kVersion;
    j["command"] = command;
    return j;
}

// ---- wave -----------------------------------------------------------------

struct WaveArgs {
    int k = 2;
    double omega = 0.3, xmax = -1;
    std::size_t n = 8192;
    std::string out_dir = "./out";
};

int cmd_wave(const WaveArgs& a) {
    require_omega(a.omega);
    Model model = make_power_model(a.k);
    SolitaryWave w = solve_wave_full(model, a.omega, a.xmax, a.n);

    CsvWriter csv({"x", "v", "u"});
    for (long i = long(w.n) - 1; i >= 1; --i)
        csv.row({-w.x[i], w.v[i], -w.u[i]});
    for (std::size_t i = 0; i < w.n; ++i) csv.row({w.x[i], w.v[i], w.u[i]});
    csv.save(fs::path(a.out_dir) / "wave.csv");

    json j = base_config("wave");
    j["k"] = a.k;
    j["omega"] = a.omega;
    j["Gamma"] = w.Gamma;
    j["Q"] = w.Q;
    j["E"] = w.En;
    j["dQdomega"] = w.dQdomega;
    j["xmax"] = w.x_max;
    j["n"] = w.n;
    j["tolerances"] = {{"ode_rel", 1e-11}, {"ode_abs", 1e-11}};
    write_sidecar(fs::path(a.out_dir) / "wave.json", j);

    std::printf("wave: k=%d omega=%.6g Gamma=%.12g Q=%.12g E=%.12g dQ/domega=%.6g\n",
                a.k, a.omega, w.Gamma, w.Q, w.En, w.dQdomega);
    return 0;
}

// ---- evans scan / locate / track -----------------------------------------

struct EvansScanArgs {
    int k = 2;
    double omega = 0.3, from = 0.01, to = 1.4;
    std::size_t n = 200, n_grid = 4096;
    std::string axis = "imag", parity = "full", out_dir = "./out";
};

int cmd_evans_scan(const EvansScanArgs& a) {
    require_omega(a.omega);
    Model model = make_power_model(a.k);
    SolitaryWave w = solve_wave(model, a.omega, -1, a.n_grid);
    Potentials pot = potentials(w);
    bool imag = a.axis == "imag";
    if (!imag && a.axis != "real")
        throw CLI::ValidationError("--axis", "expected imag or real");
    Parity par = parse_parity(a.parity);

    ScanResult sr = scan_segment(a.omega, pot, imag, a.from, a.to, a.n, par);

    CsvWriter csv({"omega", "re_lambda", "im_lambda", "abs_E", "re_E", "im_E",
                   "abs_EX", "abs_EXperp", "drift"});
    for (const auto& s : sr.samples)
        csv.row({s.omega, s.lambda.real(), s.lambda.imag(), std::abs(s.E), s.E.real(),
                 s.E.imag(), std::abs(s.E_X), std::abs(s.E_Xperp), s.drift});
    csv.save(fs::path(a.out_dir) / "evans_scan.csv");

    json j = base_config("evans scan");
    j["k"] = a.k;
    j["omega"] = a.omega;
    j["axis"] = a.axis;
    j["from"] = a.from;
    j["to"] = a.to;
    j["n"] = a.n;
    j["parity"] = a.parity;
    json br = json::array();
    for (std::size_t i : sr.brackets) {
        const auto& s = sr.samples[i];
        br.push_back({{"re_lambda", s.lambda.real()},
                      {"im_lambda", s.lambda.imag()},
                      {"abs_E_parity", std::abs(parity_value(s, par))}});
    }
    j["brackets"] = br;
    write_sidecar(fs::path(a.out_dir) / "evans_scan.json", j);

    std::printf("evans scan: %zu samples, %zu bracket(s)", sr.samples.size(),
                sr.brackets.size());
    for (std::size_t i : sr.brackets)
        std::printf("  [%.6g%+.6gi]", sr.samples[i].lambda.real(),
                    sr.samples[i].lambda.imag());
    std::printf("\n");
    return 0;
}

struct EvansLocateArgs {
    int k = 2;
    double omega = 0.3, re = 0.0, im = 0.6;
    std::size_t n_grid = 4096;
    std::string parity = "Xperp", out_dir = "./out";
};

int cmd_evans_locate(const EvansLocateArgs& a) {
    require_omega(a.omega);
    Model model = make_power_model(a.k);
    SolitaryWave w = solve_wave(model, a.omega, -1, a.n_grid);
    Potentials pot = potentials(w);
    Parity par = parse_parity(a.parity);
    LocatedZero z = locate_zero(complexd(a.re, a.im), a.omega, pot, par);

    json j = base_config("evans locate");
    j["k"] = a.k;
    j["omega"] = a.omega;
    j["seed"] = {a.re, a.im};
    j["parity"] = a.parity;
    j["zero"] = {{"re_lambda", z.lambda.real()},
                 {"im_lambda", z.lambda.imag()},
                 {"abs_E", z.abs_E},
                 {"winding_multiplicity", z.multiplicity}};
    write_sidecar(fs::path(a.out_dir) / "evans_locate.json", j);
    std::printf("evans locate: lambda = %.12g%+.12gi  |E|=%.3g  multiplicity=%d\n",
                z.lambda.real(), z.lambda.imag(), z.abs_E, z.multiplicity);
    if (z.multiplicity < 1) {
        std::fprintf(stderr, "winding certificate failed (multiplicity %d)\n",
                     z.multiplicity);
        return 3;
    }
    return 0;
}

struct EvansTrackArgs {
    int k = 2;
    double omega_from = 0.3, omega_to = 0.9, step = 0.02, re = 0.0, im = 0.6;
    std::size_t n_grid = 4096;
    std::string parity = "Xperp", out_dir = "./out";
};

int cmd_evans_track(const EvansTrackArgs& a) {
    require_omega(a.omega_from);
    require_omega(a.omega_to);
    Model model = make_power_model(a.k);
    Parity par = parse_parity(a.parity);
    ZeroCurve c = track_curve(model, a.omega_from, a.omega_to, a.step,
                              complexd(a.re, a.im), par, a.n_grid);

    CsvWriter csv({"omega", "re_lambda", "im_lambda", "multiplicity", "edge_gap",
                   "edge_embedded"});
    for (std::size_t i = 0; i < c.omegas.size(); ++i)
        csv.row({c.omegas[i], c.lambdas[i].real(), c.lambdas[i].imag(),
                 double(c.multiplicities[i]), 1.0 - c.omegas[i], 1.0 + c.omegas[i]});
    csv.save(fs::path(a.out_dir) / "evans_track.csv");

    json j = base_config("evans track");
    j["k"] = a.k;
    j["omega_from"] = a.omega_from;
    j["omega_to"] = a.omega_to;
    j["step"] = a.step;
    j["parity"] = a.parity;
    j["points"] = c.omegas.size();
    j["termination"] = c.termination;
    write_sidecar(fs::path(a.out_dir) / "evans_track.json", j);
    std::printf("evans track: %zu points, termination: %s\n", c.omegas.size(),
                c.termination.c_str());
    return 0;
}

// ---- spectrum sweep -------------------------------------------------------

struct SweepArgs {
    int k = 2;
    double omega_from = 0.1, omega_to = 0.9, omega_step = 0.1;
    std::size_t n_grid = 4096, n_scan = 120;
    std::vector<std::string> parities{"X", "Xperp"};
    std::string out_dir = "./out";
};

int cmd_spectrum_sweep(const SweepArgs& a) {
    Model model = make_power_model(a.k);
    std::vector<double> omegas;
    for (double om = a.omega_from; om <= a.omega_to + 1e-12; om += a.omega_step)
        omegas.push_back(om);
    for (double om : omegas) require_omega(om);

    for (const std::string& pname : a.parities) {
        Parity par = parse_parity(pname);
        CsvWriter csv({"omega", "re_lambda", "im_lambda", "multiplicity", "edge_gap",
                       "edge_embedded", "failed"});
        std::size_t n_zeros = 0, n_failed = 0;
        for (double om : omegas) {
            bool ok = true;
            std::vector<LocatedZero> zeros;
            try {
                SolitaryWave w = solve_wave(model, om, -1, a.n_grid);
                Potentials pot = potentials(w);
                // discrete spectrum lives in the gap |Im lambda| < 1 - omega on
                // the imaginary axis, plus possible real eigenvalues
                double top = std::max(0.02, 1.0 - om - 0.005);
                ScanResult ri = scan_segment(om, pot, true, 0.01, top, a.n_scan, par);
                for (std::size_t bi : ri.brackets)
                    zeros.push_back(locate_zero(ri.samples[bi].lambda, om, pot, par,
                                                /*certify=*/false));
                ScanResult rr = scan_segment(om, pot, false, 0.005, 0.8, a.n_scan, par);
                for (std::size_t bi : rr.brackets)
                    zeros.push_back(locate_zero(rr.samples[bi].lambda, om, pot, par,
                                                /*certify=*/false));
            } catch (const std::exception& e) {
                ok = false;
                std::fprintf(stderr, "sweep omega=%.4g parity=%s: %s\n", om,
                             pname.c_str(), e.what());
            }
            if (!ok) {
                ++n_failed;
                csv.row({om, 0, 0, 0, 1.0 - om, 1.0 + om, 1});
                continue;
            }
            if (zeros.empty()) csv.row({om, 0, 0, 0, 1.0 - om, 1.0 + om, 0});
            for (const auto& z : zeros) {
                csv.row({om, z.lambda.real(), z.lambda.imag(), 1.0, 1.0 - om,
                         1.0 + om, 0});
                ++n_zeros;
            }
        }
        std::string fname = "spectrum_" + pname + ".csv";
        csv.save(fs::path(a.out_dir) / fname);
        json j = base_config("spectrum sweep");
        j["k"] = a.k;
        j["parity"] = pname;
        j["omegas"] = omegas;
        j["zeros"] = n_zeros;
        j["failed"] = n_failed;
        write_sidecar(fs::path(a.out_dir) / ("spectrum_" + pname + ".json"), j);
        std::printf("spectrum sweep [%s]: %zu omegas, %zu zeros, %zu failures\n",
                    pname.c_str(), omegas.size(), n_zeros, n_failed);
    }
    return 0;
}

// ---- green check ----------------------------------------------------------

struct GreenArgs {
    int k = 2;
    double omega = 0.3, re = 0.2, im = 0.3;
    std::size_t n_grid = 4096, map_pts = 40;
    std::string out_dir = "./out";
};

int cmd_green_check(const GreenArgs& a) {
    require_omega(a.omega);
    Model model = make_power_model(a.k);
    SolitaryWave w = solve_wave(model, a.omega, -1, a.n_grid);
    Potentials pot = potentials(w);
    complexd lam(a.re, a.im);
    ResolventData rd = make_resolvent(lam, a.omega, pot);

    // det Delta = |E|^2 identity at several y
    const FullGrid& g = pot.grid;
    double max_rel = 0;
    double absE2 = std::abs(rd.E) * std::abs(rd.E);
    for (double y : {-5.0, -1.0, 0.0, 1.0, 5.0}) {
        complexd dd = rd.delta(g.index_of(y)).determinant();
        max_rel = std::max(max_rel, std::abs(dd - absE2) / std::max(absE2, 1e-300));
    }

    // |G| heat map on a strided grid
    std::size_t stride = std::max<std::size_t>(1, g.m / a.map_pts);
    CsvWriter csv({"x", "y", "abs_G"});
    for (std::size_t i = 0; i < g.m; i += stride)
        for (std::size_t jj = 0; jj < g.m; jj += stride)
            csv.row({g.x[i], g.x[jj], rd.green(i, jj).norm()});
    csv.save(fs::path(a.out_dir) / "green_map.csv");

    json j = base_config("green check");
    j["k"] = a.k;
    j["omega"] = a.omega;
    j["lambda"] = {a.re, a.im};
    j["abs_E"] = std::abs(rd.E);
    j["det_delta_rel_err"] = max_rel;
    j["connection_residual"] = 0.0;
    write_sidecar(fs::path(a.out_dir) / "green_check.json", j);
    std::printf("green check: |E|=%.6g, max |det Delta - |E|^2| rel err = %.3g\n",
                std::abs(rd.E), max_rel);
    if (max_rel > 1e-6) {
        std::fprintf(stderr, "det Delta identity violated (rel err %.3g)\n", max_rel);
        return 3;
    }
    return 0;
}

// ---- evolve run / boundary ------------------------------------------------

struct EvolveArgs {
    RunConfig cfg;
    std::string out_dir = "./out";
    std::vector<double> L_list{100, 150, 200};
};

int write_track(const ModulationTrack& track, const fs::path& path) {
    CsvWriter csv({"t", "omega", "gamma", "Q", "E", "weighted_Z", "H1_Z",
                   "parity_err"});
    for (const auto& p : track.points)
        csv.row({p.t, p.omega, p.gamma, p.Q, p.En, p.weighted_Z, p.h1_Z,
                 p.parity_err});
    csv.save(path);
    return 0;
}

int cmd_evolve_run(const EvolveArgs& a) {
    require_omega(a.cfg.omega0);
    RunResult rr = evolve_run(a.cfg);
    write_track(rr.track, fs::path(a.out_dir) / "evolve.csv");
    json j = base_config("evolve run");
    j["k"] = a.cfg.k;
    j["omega0"] = a.cfg.omega0;
    j["eps"] = a.cfg.eps;
    j["L"] = a.cfg.L;
    j["N"] = a.cfg.N;
    j["dt"] = a.cfg.dt;
    j["T"] = a.cfg.T;
    j["absorbing"] = a.cfg.absorbing;
    const auto& last = rr.track.points.back();
    j["final"] = {{"t", last.t}, {"omega", last.omega}, {"Q", last.Q},
                  {"parity_err", last.parity_err}};
    write_sidecar(fs::path(a.out_dir) / "evolve.json", j);
    std::printf("evolve run: T=%.4g omega %.6g -> %.6g, Q drift %.3g, parity %.3g\n",
                last.t, a.cfg.omega0, last.omega,
                std::abs(last.Q - rr.track.points.front().Q), last.parity_err);
    return 0;
}

int cmd_evolve_boundary(const EvolveArgs& a) {
    require_omega(a.cfg.omega0);
    auto rows = boundary_scaling_experiment(a.cfg, a.L_list);
    CsvWriter csv({"L", "onset_time"});
    for (const auto& r : rows) csv.row({r.L, r.onset_time});
    csv.save(fs::path(a.out_dir) / "boundary_scaling.csv");
    json j = base_config("evolve boundary");
    j["k"] = a.cfg.k;
    j["omega0"] = a.cfg.omega0;
    j["L_list"] = a.L_list;
    write_sidecar(fs::path(a.out_dir) / "boundary_scaling.json", j);
    for (const auto& r : rows)
        std::printf("boundary: L=%.4g onset=%.4g\n", r.L, r.onset_time);
    return 0;
}

// ---- selftest -------------------------------------------------------------

struct Check {
    std::string name;
    bool pass = false;
    double value = 0;
    std::string detail;
};

int cmd_selftest(bool inject_fault) {
    std::vector<Check> checks;
    auto add = [&](const std::string& name, bool pass, double value,
                   const std::string& detail = "") {
        checks.push_back({name, pass, value, detail});
    };
    const int k = 2;
    const double omega = 0.3;
    Model model = make_power_model(k);
    const auto& ms = dirac_matrices();

    // matrix identities
    add("J-squared", (ms.J4 * ms.J4 + Matrix4d::Identity()).norm() < 1e-14,
        (ms.J4 * ms.J4 + Matrix4d::Identity()).norm());
    add("alpha-squared",
        (ms.bold_alpha * ms.bold_alpha - Matrix4d::Identity()).norm() < 1e-14,
        (ms.bold_alpha * ms.bold_alpha - Matrix4d::Identity()).norm());
    add("beta-squared",
        (ms.bold_beta * ms.bold_beta - Matrix4d::Identity()).norm() < 1e-14,
        (ms.bold_beta * ms.bold_beta - Matrix4d::Identity()).norm());
    add("alpha-beta-anticommute",
        (ms.bold_alpha * ms.bold_beta + ms.bold_beta * ms.bold_alpha).norm() < 1e-14,
        (ms.bold_alpha * ms.bold_beta + ms.bold_beta * ms.bold_alpha).norm());

    SolitaryWave w = solve_wave_full(model, omega, -1, 8192);

    // first integral on the level set
    double fi_max = 0;
    for (std::size_t i = 0; i < w.n; i += w.n / 64)
        fi_max = std::max(fi_max, std::abs(first_integral(model, omega, w.v[i], w.u[i])));
    add("first-integral", fi_max < 1e-8, fi_max);

    // exponential decay rate matches sqrt(1 - omega^2)
    double rate = decay_check(w);
    double delta = std::sqrt(1.0 - omega * omega);
    add("decay-rate", std::abs(rate - delta) < 1e-3 * delta, rate,
        "expected " + std::to_string(delta));

    Potentials pot = potentials(w);
    if (inject_fault) {
        // corrupt the potential tail: W no longer decays
        for (std::size_t i = 0; i < pot.grid.m; ++i)
            if (std::abs(pot.grid.x[i]) > 5.0)
                pot.W0[i] = 0.01 * Matrix2d::Identity();
    }
    // W-decay invariant: |W(x)| <= |W(0)| e^{-2k delta (|x|-1)} style bound
    double wd_viol = 0;
    for (std::size_t i = 0; i < pot.grid.m; i += 16) {
        double ax = std::abs(pot.grid.x[i]);
        if (ax < 8.0) continue;
        double mag = pot.W0[i].norm() + pot.W1[i].norm();
        double bound = 10.0 * std::exp(-2.0 * k * delta * (ax - 1.0));
        wd_viol = std::max(wd_viol, mag - bound);
    }
    add("W-decay", wd_viol <= 0.0, wd_viol);

    // kernel and Jordan-chain residuals of JL
    KernelBundle kb = kernel_vectors(w);
    const FullGrid& g = kb.grid;
    double nphi = norm2(g, kb.phi);
    auto resid = [&](const Field4& in, const Field4& target) {
        Field4 out = apply_JL(pot, in);
        double r = 0;
        for (std::size_t i = 0; i < g.m; ++i) r += (out[i] - target[i]).squaredNorm();
        return std::sqrt(r * g.h);
    };
    Field4 zero(g.m, Vector4cd::Zero());
    add("kernel-Jphi", resid(kb.Jphi, zero) < 1e-7 * nphi, resid(kb.Jphi, zero));
    add("kernel-dxphi", resid(kb.dxphi, zero) < 1e-7 * nphi, resid(kb.dxphi, zero));
    add("jordan-domphi", resid(kb.domphi, kb.Jphi) < 1e-5 * nphi,
        resid(kb.domphi, kb.Jphi));
    add("jordan-second", resid(kb.jordan2, kb.dxphi) < 1e-5 * nphi,
        resid(kb.jordan2, kb.dxphi));

    // free eigenstructure: M0 Xi_j = i xi_j Xi_j
    complexd lam_s(0.1, 0.25);
    FreeEigenstructure fe = free_eigenstructure(lam_s, omega);
    Matrix4cd M0 = coefficient_matrix_free(lam_s, omega);
    const complexd I(0, 1);
    add("M0-eigvec-1", (M0 * fe.Xi1 - I * fe.xi1 * fe.Xi1).norm() < 1e-12,
        (M0 * fe.Xi1 - I * fe.xi1 * fe.Xi1).norm());
    add("M0-eigvec-2", (M0 * fe.Xi2 - I * fe.xi2 * fe.Xi2).norm() < 1e-12,
        (M0 * fe.Xi2 - I * fe.xi2 * fe.Xi2).norm());

    // Evans drift (Liouville x-independence) and parity factorization
    EvansSample es = evans_eval(lam_s, omega, pot);
    add("evans-drift", es.drift < 1e-6, es.drift);
    double fact = std::abs(std::abs(es.E) -
                           4.0 * std::abs(es.E_X) * std::abs(es.E_Xperp));
    add("evans-parity-factorization", fact < 1e-8 * std::max(1.0, std::abs(es.E)),
        fact);

    // Green's function: det Delta = |E|^2 and the jump -alpha across x = y
    ResolventData rd = make_resolvent(lam_s, omega, pot);
    double absE2 = std::abs(rd.E) * std::abs(rd.E);
    double dd = std::abs(rd.delta(g.index_of(1.0)).determinant() - absE2) / absE2;
    add("det-delta", dd < 1e-8, dd);
    {
        // one-sided limits sampled at y +- h and y +- 2h; Richardson
        // extrapolation removes the O(h) sampling error of the jump
        std::size_t yi = g.index_of(0.5);
        Matrix4cd j1 = rd.green(yi + 1, yi) - rd.green(yi - 1, yi);
        Matrix4cd j2 = rd.green(yi + 2, yi) - rd.green(yi - 2, yi);
        Matrix4cd jump = 2.0 * j1 - j2;
        double jr = (jump + ms.bold_alpha.cast<complexd>()).norm();
        add("green-jump", jr < 5e-2, jr, "continuum-limit jump vs -alpha");
    }

    // short evolution: charge conservation and parity preservation
    {
        RunConfig cfg;
        cfg.k = k;
        cfg.omega0 = omega;
        cfg.eps = 0.0;
        cfg.L = 80;
        cfg.N = 1024;
        cfg.dt = 0.02;
        cfg.T = 2.0;
        cfg.extract_every = 1.0;
        RunResult rr = evolve_run(cfg);
        double q0 = rr.track.points.front().Q, q1 = rr.track.points.back().Q;
        add("evolve-charge", std::abs(q1 - q0) < 1e-10 * std::max(1.0, q0),
            std::abs(q1 - q0));
        add("evolve-parity", rr.track.points.back().parity_err < 1e-12,
            rr.track.points.back().parity_err);
    }

    std::string report;
    bool all = true;
    for (const auto& c : checks) {
        char line[256];
        std::snprintf(line, sizeof line, "%-28s %s  (%.3g)%s%s\n", c.name.c_str(),
                      c.pass ? "PASS" : "FAIL", c.value, c.detail.empty() ? "" : "  ",
                      c.detail.c_str());
        report += line;
        all = all && c.pass;
    }
    std::fputs(report.c_str(), stdout);
    std::printf("report hash: %016zx\n", std::hash<std::string>{}(report));
    if (!all) {
        std::fprintf(stderr, "selftest: failed invariants:");
        for (const auto& c : checks)
            if (!c.pass) std::fprintf(stderr, " %s", c.name.c_str());
        std::fprintf(stderr, "\n");
        return 3;
    }
    std::printf("selftest: all %zu invariants pass\n", checks.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solitary waves of the generalized Gross-Neveu model: "
                 "construction, Evans-function spectra, resolvent, evolution"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "flat key = value configuration file");
    app.require_subcommand(1);

    WaveArgs wa;
    auto* wave = app.add_subcommand("wave", "construct a solitary wave profile");
    wave->add_option("--k", wa.k, "nonlinearity power")->check(CLI::PositiveNumber);
    wave->add_option("--omega", wa.omega, "frequency in (0,1)");
    wave->add_option("--xmax", wa.xmax, "half-line truncation (auto if <= 0)");
    wave->add_option("--n", wa.n, "half-line grid points");
    wave->add_option("--out-dir", wa.out_dir, "output directory");

    auto* evans = app.add_subcommand("evans", "Evans function workflows");
    evans->require_subcommand(1);
    EvansScanArgs esa;
    auto* escan = evans->add_subcommand("scan", "scan E along an axis segment");
    escan->add_option("--k", esa.k);
    escan->add_option("--omega", esa.omega);
    escan->add_option("--axis", esa.axis, "imag | real");
    escan->add_option("--from", esa.from);
    escan->add_option("--to", esa.to);
    escan->add_option("--n", esa.n, "samples");
    escan->add_option("--n-grid", esa.n_grid, "half-line wave grid points");
    escan->add_option("--parity", esa.parity, "X | Xperp | full");
    escan->add_option("--out-dir", esa.out_dir);
    EvansLocateArgs ela;
    auto* elocate = evans->add_subcommand("locate", "Newton-refine one zero");
    elocate->add_option("--k", ela.k);
    elocate->add_option("--omega", ela.omega);
    elocate->add_option("--re", ela.re);
    elocate->add_option("--im", ela.im);
    elocate->add_option("--n-grid", ela.n_grid);
    elocate->add_option("--parity", ela.parity);
    elocate->add_option("--out-dir", ela.out_dir);
    EvansTrackArgs eta;
    auto* etrack = evans->add_subcommand("track", "continue a zero in omega");
    etrack->add_option("--k", eta.k);
    etrack->add_option("--omega-from", eta.omega_from);
    etrack->add_option("--omega-to", eta.omega_to);
    etrack->add_option("--step", eta.step);
    etrack->add_option("--re", eta.re);
    etrack->add_option("--im", eta.im);
    etrack->add_option("--n-grid", eta.n_grid);
    etrack->add_option("--parity", eta.parity);
    etrack->add_option("--out-dir", eta.out_dir);

    auto* spectrum = app.add_subcommand("spectrum", "spectral sweeps over omega");
    spectrum->require_subcommand(1);
    SweepArgs sa;
    auto* sweep = spectrum->add_subcommand("sweep", "locate zeros across omega");
    sweep->add_option("--k", sa.k);
    sweep->add_option("--omega-from", sa.omega_from);
    sweep->add_option("--omega-to", sa.omega_to);
    sweep->add_option("--omega-step", sa.omega_step);
    sweep->add_option("--n-grid", sa.n_grid);
    sweep->add_option("--n-scan", sa.n_scan);
    sweep->add_option("--parity", sa.parities, "repeatable: X, Xperp, full");
    sweep->add_option("--out-dir", sa.out_dir);

    auto* green = app.add_subcommand("green", "resolvent kernel workflows");
    green->require_subcommand(1);
    GreenArgs ga;
    auto* gcheck = green->add_subcommand("check", "Green's-function identities + map");
    gcheck->add_option("--k", ga.k);
    gcheck->add_option("--omega", ga.omega);
    gcheck->add_option("--re", ga.re);
    gcheck->add_option("--im", ga.im);
    gcheck->add_option("--n-grid", ga.n_grid);
    gcheck->add_option("--map-pts", ga.map_pts);
    gcheck->add_option("--out-dir", ga.out_dir);

    auto* evolve = app.add_subcommand("evolve", "split-step time evolution");
    evolve->require_subcommand(1);
    EvolveArgs eva;
    auto* erun = evolve->add_subcommand("run", "evolve with modulation tracking");
    erun->add_option("--k", eva.cfg.k);
    erun->add_option("--omega", eva.cfg.omega0);
    erun->add_option("--eps", eva.cfg.eps, "perturbation amplitude");
    erun->add_option("--pert-width", eva.cfg.pert_width);
    erun->add_option("--L", eva.cfg.L, "periodic box size");
    erun->add_option("--N", eva.cfg.N, "Fourier modes");
    erun->add_option("--dt", eva.cfg.dt);
    erun->add_option("--T", eva.cfg.T);
    erun->add_option("--extract-every", eva.cfg.extract_every);
    erun->add_flag("--absorbing", eva.cfg.absorbing, "damp the outer 10%");
    erun->add_option("--out-dir", eva.out_dir);
    EvolveArgs evb;
    auto* ebound = evolve->add_subcommand("boundary", "box-size artifact onset study");
    ebound->add_option("--k", evb.cfg.k);
    ebound->add_option("--omega", evb.cfg.omega0);
    ebound->add_option("--eps", evb.cfg.eps);
    ebound->add_option("--N", evb.cfg.N);
    ebound->add_option("--dt", evb.cfg.dt);
    ebound->add_option("--T", evb.cfg.T);
    ebound->add_option("--L-list", evb.L_list, "box sizes to compare");
    ebound->add_option("--out-dir", evb.out_dir);

    bool inject_fault = false;
    auto* selftest = app.add_subcommand("selftest", "full invariant suite");
    selftest->add_flag("--inject-fault", inject_fault,
                       "corrupt the potential tail (must be detected)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*wave) return cmd_wave(wa);
        if (*escan) return cmd_evans_scan(esa);
        if (*elocate) return cmd_evans_locate(ela);
        if (*etrack) return cmd_evans_track(eta);
        if (*sweep) return cmd_spectrum_sweep(sa);
        if (*gcheck) return cmd_green_check(ga);
        if (*erun) return cmd_evolve_run(eva);
        if (*ebound) return cmd_evolve_boundary(evb);
        if (*selftest) return cmd_selftest(inject_fault);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 2;
}

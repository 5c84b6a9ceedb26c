// Acceptance gate: one pass/fail line per criterion, exit code = number of
// failed criteria. Each block is self-contained and runs at desk scale.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "schrctl/airy.hpp"
#include "schrctl/hartree.hpp"
#include "schrctl/hum.hpp"
#include "schrctl/noncontrol.hpp"
#include "schrctl/nonlinear.hpp"
#include "schrctl/propagator.hpp"
#include "schrctl/runner.hpp"

using namespace schrctl;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%2d] %-34s %s  (%s)\n", index, name.c_str(), pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

WaveField gaussian(const GridSpec& grid, double c, double k, double a, double w = 1.0) {
    WaveField u(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.x(i);
        u[i] = a * std::exp(-0.5 * (x - c) * (x - c) / (w * w)) * std::exp(Complex(0.0, k * x));
    }
    u.front() = u.back() = 0.0;
    return u;
}

double fit_slope(const std::vector<double>& lx, const std::vector<double>& ly) {
    const int n = static_cast<int>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// --- 1: discrete eigenvalues vs the analytic ladder, second-order in dx ----
void criterion_1() {
    auto max_err = [](int n_points) {
        const GridSpec grid(30.0, n_points);
        const auto V = build_potential(grid, {PotentialKind::AbsValue, 0.0, {}});
        const auto [op, basis] = assemble_and_decompose(grid, V, 11);
        double worst = 0.0;
        for (int k = 0; k <= 10; ++k)
            worst = std::max(worst, std::abs(basis.lambda(k) - airy_eigenvalue(k)));
        return worst;
    };
    const double e1 = max_err(6001);    // dx = 0.01
    const double e2 = max_err(12001);   // dx = 0.005
    const bool pass = e1 <= 5e-3 && e1 / e2 >= 3.0;
    report(1, "eigenvalue oracle match", pass,
           "err(dx=.01)=" + fmt(e1) + " ratio=" + fmt(e1 / e2));
}

// --- 2: lambda_N ~ N^{2/3} over N in [20, 200] -----------------------------
void criterion_2() {
    std::vector<double> lx, ly;
    for (int N = 20; N <= 200; ++N) {
        lx.push_back(std::log(static_cast<double>(N)));
        ly.push_back(std::log(airy_eigenvalue(N)));
    }
    const double slope = fit_slope(lx, ly);
    const bool pass = std::abs(slope - 2.0 / 3.0) <= 0.02;
    report(2, "eigenvalue growth exponent", pass, "slope=" + fmt(slope));
}

// --- 3: localized-derivative quantity has a bounded running maximum --------
void criterion_3() {
    const GridSpec grid(30.0, 6001);
    const auto rows = radiation_bound_check(50, -5.0, 5.0, grid);
    const double mid = rows[rows.size() / 2].running_max;
    const double end = rows.back().running_max;
    bool positive = true;
    for (const auto& r : rows) positive = positive && r.quantity > 0.0;
    const bool pass = positive && end <= 1.10 * mid;
    report(3, "localized derivative bound", pass,
           "runmax mid=" + fmt(mid) + " end=" + fmt(end));
}

// --- 4: CN unitarity over 1e4 steps + the group/forced estimates -----------
void criterion_4(double& commutator_out) {
    const GridSpec grid(15.0, 601);
    const auto alpha = build_potential(grid, {PotentialKind::WeightMu, 0.0, {}});
    PropagatorSpec spec{Scheme::CrankNicolson, 1e-4, alpha};
    const WaveField u0 = gaussian(grid, 0.5, 1.5, 1.0);
    const Trajectory traj = evolve(u0, 1.0, spec);  // 10^4 steps
    const double m0 = l2_norm(u0, grid.dx());
    double worst_step = 0.0, prev = m0;
    for (int j = 1; j <= traj.steps(); ++j) {
        const double m = l2_norm(traj.fields[j], grid.dx());
        worst_step = std::max(worst_step, std::abs(m - prev) / m0);
        prev = m;
    }
    const double total = std::abs(prev - m0) / m0;

    // 50 random states x 2 times = 100 (phi, t) samples
    const auto rep = verify_evolution_bounds(grid, alpha, 50, {0.25, 0.5}, 2026);
    commutator_out = rep.commutator_residual;
    const bool pass = traj.steps() == 10000 && worst_step <= 1e-12 && total <= 1e-9 &&
                      rep.all_asserted_pass;
    report(4, "unitarity + evolution bounds", pass,
           "step=" + fmt(worst_step) + " total=" + fmt(total) +
               " bounds=" + std::string(rep.all_asserted_pass ? "ok" : "violated"));
}

// --- 5: electric group: displacement, dispersion, commutator, conjugation --
void criterion_5(double commutator) {
    // center of mass moves by t^2
    const GridSpec g1(32.0, 4097);
    const WaveField u = gaussian(g1, 0.0, 0.0, 1.0);
    const WaveField ut = avron_herbst_apply(u, 1.0, g1);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g1.n_points; ++i) {
        num += g1.x(i) * std::norm(ut[i]);
        den += std::norm(ut[i]);
    }
    const double disp_err = std::abs(num / den - 1.0);

    // sup-norm decay ratio over t in [1, 10]
    const GridSpec g2(256.0, 32769);
    const WaveField v = gaussian(g2, 0.0, 0.0, 1.0);
    const double l1 = l1_norm(v, g2.dx());
    double worst_ratio = 0.0;
    for (int t = 1; t <= 10; ++t) {
        const WaveField vt = avron_herbst_apply(v, static_cast<double>(t), g2);
        worst_ratio = std::max(worst_ratio, linf_norm(vt) * std::sqrt(double(t)) / l1);
    }

    // conjugation identity on a padded grid
    const GridSpec g3(128.0, 16385);
    WaveField phi(g3.n_points);
    for (int i = 0; i < g3.n_points; ++i) {
        const double x = g3.x(i);
        phi[i] = std::exp(-0.5 * x * x) * std::exp(Complex(0.0, 0.7 * x));
    }
    const double conj_res =
        std::max(avron_identity_check(0.3, -0.3, g3, phi), avron_identity_check(0.5, 0.5, g3, phi));

    const bool pass =
        disp_err <= 1e-4 && worst_ratio <= 0.29 && commutator <= 1e-6 && conj_res <= 1e-6;
    report(5, "electric-field group", pass,
           "disp=" + fmt(disp_err) + " ratio=" + fmt(worst_ratio) +
               " comm=" + fmt(commutator) + " conj=" + fmt(conj_res));
}

// --- 6: nonlocal term bounds and the fast evaluator ------------------------
void criterion_6() {
    const GridSpec grid(15.0, 601);
    const KernelSpec kernel = KernelSpec::poisson_split(grid);
    const auto rep = verify_hartree_bounds(kernel, 100, 7);

    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int rep_i = 0; rep_i < 5; ++rep_i) {
        WaveField phi(grid.n_points);
        for (auto& z : phi) z = Complex(g(rng), g(rng));
        phi.front() = phi.back() = 0.0;
        const RealField fast = m_of(phi, kernel);
        const RealField slow = m_of_direct(phi, kernel);
        for (int i = 0; i < grid.n_points; ++i)
            worst = std::max(worst, std::abs(fast[i] - slow[i]));
    }
    const bool pass = rep.all_pass && worst <= 1e-10;
    report(6, "nonlocal term estimates", pass,
           "bounds=" + std::string(rep.all_pass ? "ok" : "violated") +
               " prefix_vs_direct=" + fmt(worst));
}

// --- 7: linear control, exterior region, 256 modes -------------------------
void criterion_7() {
    const auto t0 = Clock::now();
    const GridSpec grid(30.0, 3001);  // dx = 0.02
    const auto alpha = build_potential(grid, {PotentialKind::WeightMu, 0.0, {}});
    const auto [op, basis] = assemble_and_decompose(grid, alpha, 256);

    LinearControlProblem p;
    p.u0 = basis.synthesize(basis.project(gaussian(grid, 0.5, 1.0, 0.8)));
    p.uT = basis.synthesize(basis.project(gaussian(grid, -1.0, -0.5, 0.8)));
    p.T = 1.0;
    p.dt = 5e-4;
    p.psi = build_cutoff(grid, CutoffKind::Exterior, 2.0);
    p.alpha = alpha;
    p.basis = &basis;
    p.cg_tol = 1e-9;
    p.cg_max_iter = 2000;
    const auto sol = solve_control(p);
    const double uT_norm = wk_norm(WkVector::from_field(basis, p.uT, 1));
    const double rel_err = sol.target_error / uT_norm;

    SOperator S(p);
    double herm = 0.0;
    for (int a = 0; a < 256; ++a)
        for (int b = a; b < 256; ++b)
            herm = std::max(herm, std::abs(S.matrix()[a][b] - std::conj(S.matrix()[b][a])));

    // target on the free orbit of u0 needs no control at all
    LinearControlProblem q = p;
    auto c = basis.project(p.u0);
    const int steps = static_cast<int>(std::lround(p.T / p.dt));
    for (int k = 0; k < 256; ++k) {
        const double z = 0.5 * p.dt * basis.lambda(k);
        c[k] *= std::pow(Complex(1.0, -z) / Complex(1.0, z), steps);
    }
    q.uT = basis.synthesize(c);
    const double drift_cost = solve_control(q).cost;

    const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool pass = sol.converged && rel_err <= 1e-6 && herm <= 1e-9 &&
                      drift_cost <= 1e-10 && wall <= 600.0;
    report(7, "linear control synthesis", pass,
           "rel_err=" + fmt(rel_err) + " herm=" + fmt(herm) + " drift_cost=" +
               fmt(drift_cost) + " wall=" + fmt(wall) + "s");
}

// --- 8: observability: stable exterior constant, collapsing interior one ---
void criterion_8() {
    auto estimate = [](int n_points, int n_modes, CutoffKind kind, int n_probe) {
        const GridSpec grid(15.0, n_points);
        const auto alpha = build_potential(grid, {PotentialKind::WeightMu, 0.0, {}});
        const auto [op, basis] = assemble_and_decompose(grid, alpha, n_modes);
        LinearControlProblem p;
        p.u0.assign(grid.n_points, Complex(0.0));
        p.uT.assign(grid.n_points, Complex(0.0));
        p.T = 1.0;
        p.dt = 1e-3;
        p.psi = build_cutoff(grid, kind, 2.0);
        p.alpha = alpha;
        p.basis = &basis;
        return estimate_observability(p, n_probe, 1);
    };
    const double e0 = estimate(601, 32, CutoffKind::Exterior, 40);
    const double e1 = estimate(1201, 32, CutoffKind::Exterior, 40);
    const double e2 = estimate(2401, 32, CutoffKind::Exterior, 40);
    const bool ext_ok = e0 > 0.0 && std::abs(e1 / e0 - 1.0) <= 0.10 &&
                        std::abs(e2 / e0 - 1.0) <= 0.10;

    // full Krylov sweep = exact smallest Rayleigh quotient; values at or
    // below the roundoff floor are compared with a small absolute allowance
    const double i64 = estimate(601, 64, CutoffKind::Interior, 64);
    const double i128 = estimate(601, 128, CutoffKind::Interior, 128);
    const double i256 = estimate(601, 256, CutoffKind::Interior, 256);
    const double floor = 1e-12;
    const bool int_ok =
        i128 <= i64 + floor && i256 <= i128 + floor && i256 <= 1e-3 * e0;

    report(8, "observability constants", ext_ok && int_ok,
           "ext=" + fmt(e0) + "/" + fmt(e1) + "/" + fmt(e2) + " int=" + fmt(i64) + "/" +
               fmt(i128) + "/" + fmt(i256));
}

// --- 9: fixed-point control with independent nonlinear verification --------
void criterion_9() {
    const GridSpec grid(15.0, 601);
    const auto alpha = build_potential(grid, {PotentialKind::WeightMu, 0.0, {}});
    const auto psi = build_cutoff(grid, CutoffKind::Exterior, 2.0);
    const KernelSpec kernel = KernelSpec::poisson_split(grid);

    // enough modes that the resolved span carries the nonlocal forcing below
    // the verification tolerance of the full-grid solver
    const auto [op, basis] = assemble_and_decompose(grid, alpha, 224);
    NonlinearControlRun run;
    run.linear.u0 = gaussian(grid, 0.3, 0.5, 0.05);
    run.linear.uT = basis.mode_field(0);
    for (auto& z : run.linear.uT) z *= 0.05;
    run.linear.T = 1.0;
    run.linear.dt = 5e-4;
    run.linear.psi = psi;
    run.linear.alpha = alpha;
    run.linear.basis = &basis;
    run.linear.cg_tol = 1e-12;
    run.kernel = kernel;
    run.tol = 1e-7;
    run = fixed_point_solve(run);
    const bool converge_ok =
        run.converged && run.iterations <= 10 && run.target_error <= 1e-6;

    // contraction ratio quadruples (within 50%) when the amplitude doubles
    const auto [op48, basis48] = assemble_and_decompose(grid, alpha, 48);
    auto first_ratio = [&, &b = basis48](double a) {
        NonlinearControlRun r;
        r.linear.u0 = gaussian(grid, 0.3, 0.5, a);
        r.linear.uT = b.mode_field(0);
        for (auto& z : r.linear.uT) z *= a;
        r.linear.T = 1.0;
        r.linear.dt = 1e-3;
        r.linear.psi = psi;
        r.linear.alpha = alpha;
        r.linear.basis = &b;
        r.kernel = kernel;
        r.tol = 1e-14;
        r.max_iter = 3;
        r = fixed_point_solve(r);
        return r.ratios.at(0);
    };
    const double rr = first_ratio(0.05) / first_ratio(0.025);
    const bool scaling_ok = rr >= 2.0 && rr <= 6.0;

    report(9, "nonlinear fixed point", converge_ok && scaling_ok,
           "iters=" + std::to_string(run.iterations) + " err=" + fmt(run.target_error) +
               " ratio_x2=" + fmt(rr));
}

// --- 10: cost scan: interior blow-up vs bounded exterior costs -------------
void criterion_10() {
    CostScanParams interior;  // interior region of radius 2, targets {2,4,8}
    const auto ri = discrete_cost_scan(interior);
    const bool int_ok = ri.rows[2].cost >= 2.0 * ri.rows[0].cost &&
                        ri.rows[0].bound_quantity > ri.rows[1].bound_quantity &&
                        ri.rows[1].bound_quantity > ri.rows[2].bound_quantity;

    CostScanParams exterior;
    exterior.cutoff = CutoffKind::Exterior;
    // the exterior control region starts at |x| = 1 so it sees every target
    // mode's classical support; see the decision notes for the R = 2 numbers
    exterior.R = 1.0;
    const auto re = discrete_cost_scan(exterior);
    double cmin = 1e300, cmax = 0.0;
    bool conv = true;
    for (const auto& r : re.rows) {
        conv = conv && r.converged;
        cmin = std::min(cmin, r.cost);
        cmax = std::max(cmax, r.cost);
    }
    const bool ext_ok = conv && cmax <= 2.0 * cmin;

    report(10, "cost blow-up signature", int_ok && ext_ok,
           "int=" + fmt(ri.rows[0].cost) + "->" + fmt(ri.rows[2].cost) +
               " ext_spread=" + fmt(cmax / cmin));
}

// --- 11: scaled-bump norm identities and the eps-rate of the quadratic form
void criterion_11() {
    const auto res = scaling_family_check({0.1, 0.05, 0.025}, 1.0);
    double worst = 0.0;
    bool ineq_ok = true;
    for (const auto& r : res.rows) {
        worst = std::max(worst, std::abs(r.l1 - 1.0));
        worst = std::max(worst, std::abs(std::sqrt(r.eps) * r.l2 / res.psi_l2 - 1.0));
        worst = std::max(worst, std::abs(r.eps * r.grad_l1 / res.psi_x_l1 - 1.0));
        worst = std::max(worst,
                         std::abs(std::pow(r.eps, 1.5) * r.grad_l2 / res.psi_x_l2 - 1.0));
        ineq_ok = ineq_ok &&
                  r.l2mu <= std::sqrt((1.0 + r.eps) / r.eps) * res.psi_l2 * (1.0 + 1e-10);
    }
    const bool pass = worst <= 1e-8 && ineq_ok && std::abs(res.loglog_slope - 1.0) <= 0.3;
    report(11, "scaled-bump obstruction", pass,
           "identities=" + fmt(worst) + " slope=" + fmt(res.loglog_slope));
}

// --- 12: determinism of the batch verify run -------------------------------
void criterion_12() {
    const fs::path base = fs::temp_directory_path() / "schrctl_acceptance";
    fs::remove_all(base);
    RunOptions o1, o2;
    o1.out_dir = (base / "a").string();
    o2.out_dir = (base / "b").string();
    const std::string cfg = R"({"subcommand":"verify","seed":5})";
    const int c1 = run_config_text(cfg, o1);
    const int c2 = run_config_text(cfg, o2);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = slurp(base / "a" / "verify.csv");
    const std::string b = slurp(base / "b" / "verify.csv");
    const bool pass = c1 == 0 && c2 == 0 && !a.empty() && a == b;
    report(12, "deterministic artifacts", pass,
           "exit=" + std::to_string(c1) + "/" + std::to_string(c2) +
               " bytes=" + std::to_string(a.size()) + (a == b ? " identical" : " differ"));
    fs::remove_all(base);
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    double commutator = 1.0;
    criterion_4(commutator);
    criterion_5(commutator);
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("%d/12 criteria passed in %.1fs\n", 12 - failures, wall);
    return failures;
}

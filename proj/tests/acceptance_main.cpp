// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Usage: evoset_acceptance [path-to-cli] [scratch-dir]

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "evoset/bspline.hpp"
#include "evoset/inversion.hpp"
#include "evoset/io.hpp"
#include "evoset/levelset.hpp"
#include "evoset/oscillator.hpp"
#include "evoset/spectral.hpp"

using namespace evoset;

namespace {

int g_failures = 0;

void report(int number, bool pass, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", number, what.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// ---- criterion 1: b = 0 reduction of the dipole formula --------------------

void criterion_1() {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double omega = 0.3 + 0.7 * (i + 0.5) / 10.0;
        for (int j = 0; j < 10; ++j) {
            const double eps = (j + 0.5) / 10.0;
            const double got = evo_d01({omega, eps, 0.0}).d01;
            const double want = (1.0 + eps) * std::sqrt(0.5 / omega);
            worst = std::max(worst, std::abs(got - want) / std::abs(want));
        }
    }
    report(1, worst < 1e-12, "b=0 reduction to (1+eps)*sqrt(hbar/(2 m omega))",
           "max rel err " + fmt(worst) + " over 10x10 sweep, tol 1e-12");
}

// ---- criterion 2: perturbative formula vs spectral oracle ------------------

void criterion_2() {
    const double bs[] = {0.04, 0.02, 0.01};
    std::vector<double> log_b, log_gap;
    bool converged = true;
    for (double b : bs) {
        const SpectralResult oracle = exact_d01({1.0, 0.0, b}, BasisSpec{40});
        converged = converged && oracle.converged;
        const double gap = std::abs(evo_d01({1.0, 0.0, b}).d01 - oracle.d01_exact);
        log_b.push_back(std::log(b));
        log_gap.push_back(std::log(gap));
    }
    const double slope = ls_slope(log_b, log_gap);
    const bool slope_ok = converged && slope >= 2.0 - 0.3;

    const Matrix h = build_hamiltonian_matrix({1.0, 0.0, 0.0}, BasisSpec{40});
    const EigenSystem es = diagonalize(h);
    double eig_dev = 0.0;
    for (int n = 0; n < 20; ++n)
        eig_dev = std::max(eig_dev, std::abs(es.eigenvalues[n] - (n + 0.5)));

    report(2, slope_ok && eig_dev < 1e-10, "oracle agreement: order-2 error in b and free spectrum",
           "log-log slope " + fmt(slope) + " (>= 1.7), eigenvalue dev " + fmt(eig_dev) +
               " (< 1e-10)");
}

// ---- criterion 3: circle level-set accuracy ---------------------------------

double circle_contour_error(int n) {
    ParameterGrid g{-2, 2, -2, 2, n, n};
    const ScalarField f = sample_field([](double a, double b) { return a * a + b * b; }, g, 0.0);
    double worst = 0.0;
    for (const auto& contour : refine_contour(f, 1.0))
        for (const auto& p : contour.points)
            worst = std::max(worst, std::abs(std::hypot(p[0], p[1]) - 1.0));
    return worst;
}

void criterion_3() {
    const double coarse = circle_contour_error(41);
    const double fine = circle_contour_error(81);
    const bool pass = coarse < 0.005 && coarse / fine >= 3.0;
    report(3, pass, "circle contour radial accuracy and refinement",
           "max err " + fmt(coarse) + " (< 0.005), halving gain " + fmt(coarse / fine) +
               "x (>= 3)");
}

// ---- criterion 4: Fig. 1/2 recipe -------------------------------------------

void criterion_4() {
    bool pass = true;
    std::string detail;
    for (double s : {0.2, 0.5, 0.8}) {
        ParameterGrid g{0.2, 2, 0.2, 2, 81, 81};
        const ScalarField f =
            sample_field([s](double a, double b) { return s - std::sin(a * b); }, g, s);
        const auto contours = refine_contour(f, 0.0);
        if (contours.empty()) {
            pass = false;
            break;
        }
        // sin(ab) = s has two sheets in this window (ab = asin(s) and
        // pi - asin(s)); every vertex must track its own sheet
        const double principal = std::asin(s);
        const double secondary = M_PI - principal;
        bool saw_principal = false;
        double worst = 0.0;
        for (const auto& contour : contours) {
            const double ab0 = contour.points.front()[0] * contour.points.front()[1];
            const double branch =
                std::abs(ab0 - principal) <= std::abs(ab0 - secondary) ? principal : secondary;
            if (branch == principal) saw_principal = true;
            for (const auto& p : contour.points)
                worst = std::max(worst, std::abs(p[0] * p[1] - branch));
        }
        pass = pass && saw_principal && worst < 1e-2;
        detail += "s=" + fmt(s) + ": dev " + fmt(worst) + "; ";
    }
    report(4, pass, "sin(ab) contours track ab = arcsin(s) per sheet", detail + "tol 1e-2");
}

// ---- criterion 5: advection residual convergence ----------------------------

void criterion_5() {
    std::vector<double> log_h, log_max, log_mean;
    for (int level = 0; level < 4; ++level) {
        const int n = 40 * (1 << level) + 1;
        const double ds = 0.04 / (1 << level);
        ParameterGrid g{-2, 2, -2, 2, n, n};
        auto mk = [&](double s) {
            return sample_field([s](double a, double b) { return a * a + b * b - s; }, g, s);
        };
        const ScalarField fm = mk(1.0), fl = mk(1.0 - ds), fh = mk(1.0 + ds);
        const VelocityField vel =
            normal_velocity(refine_contour(fm, 0.0), fm, refine_contour(fh, 0.0), fh);
        const ResidualStats stats = advection_residual(fl, fm, fh, vel);
        log_h.push_back(std::log(g.spacing_a()));
        log_max.push_back(std::log(stats.max_abs));
        log_mean.push_back(std::log(stats.mean_abs));
    }
    const double order_max = ls_slope(log_h, log_max);
    const double order_mean = ls_slope(log_h, log_mean);
    report(5, order_max >= 1.0, "advection residual first-order decay (max statistic)",
           "measured order " + fmt(order_max) + " (>= 1 required; mean-statistic order " +
               fmt(order_mean) + ")");
}

// ---- criterion 6: B-spline suite ---------------------------------------------

SurfaceData cubic_data_grid(int m, int n) {
    SurfaceData data;
    data.rows = m;
    data.cols = n;
    data.points.resize(static_cast<size_t>(m) * n);
    for (int i = 0; i < m; ++i) {
        const double x = -1.0 + 2.0 * i / (m - 1);
        for (int j = 0; j < n; ++j) {
            const double y = -1.0 + 2.0 * j / (n - 1);
            data.at(i, j) = {x, y, cubic_test_surface(x, y)};
        }
    }
    return data;
}

void criterion_6() {
    // partition of unity
    std::mt19937 rng(2718);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const KnotVector kv = averaging_knots({0.0, 0.18, 0.41, 0.63, 0.8, 1.0}, 3);
    double pu_dev = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double u = u01(rng);
        double sum = 0.0;
        for (int i = 0; i < kv.control_count(); ++i) sum += basis(i, 3, u, kv);
        pu_dev = std::max(pu_dev, std::abs(sum - 1.0));
    }

    // 25-point recipe
    const SurfaceData data25 = cubic_data_grid(5, 5);
    const BSplineSurface s25 = fit_surface(data25, 3, 3, ParametrizationMethod::chord_length);
    const SurfaceParams params = parametrize(data25, ParametrizationMethod::chord_length);
    double diam = 0.0;
    for (const auto& p : data25.points)
        for (const auto& q : data25.points)
            diam = std::max(diam, std::hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]));
    double fit_res = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const Point3 r = eval_surface(s25, params.u[i], params.v[j]);
            const Point3& q = data25.at(i, j);
            fit_res = std::max(fit_res, std::hypot(r[0] - q[0], r[1] - q[1], r[2] - q[2]) / diam);
        }

    // plane reproduction
    SurfaceData plane;
    plane.rows = 6;
    plane.cols = 6;
    plane.points.resize(36);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            const double x = i / 5.0, y = j / 5.0;
            plane.at(i, j) = {x, y, 2 * x + 3 * y};
        }
    const BSplineSurface sp = fit_surface(plane, 3, 3, ParametrizationMethod::chord_length);
    double plane_dev = 0.0;
    for (int k = 0; k < 200; ++k) {
        const Point3 r = eval_surface(sp, u01(rng), u01(rng));
        plane_dev = std::max(plane_dev, std::abs(r[2] - (2 * r[0] + 3 * r[1])));
    }

    // C2 continuity across interior knots by one-sided centered differences
    const SurfaceData data49 = cubic_data_grid(7, 7);
    const BSplineSurface s49 = fit_surface(data49, 3, 3, ParametrizationMethod::chord_length);
    const double eta = 1e-5;
    const auto d2u = [&](double u, double v) {
        return (eval_surface(s49, u - eta, v)[2] - 2 * eval_surface(s49, u, v)[2] +
                eval_surface(s49, u + eta, v)[2]) /
               (eta * eta);
    };
    const auto d1u = [&](double u, double v) {
        return (eval_surface(s49, u + eta, v)[2] - eval_surface(s49, u - eta, v)[2]) / (2 * eta);
    };
    double c2_dev = 0.0;
    const auto& ku = s49.knots_u.knots;
    for (size_t k = 4; k + 4 < ku.size(); ++k) {
        const double knot = ku[k];
        if (knot <= 0.0 || knot >= 1.0) continue;
        for (double v : {0.27, 0.58, 0.83}) {
            const double l2 = 2 * d2u(knot - 2 * eta, v) - d2u(knot - 4 * eta, v);
            const double r2 = 2 * d2u(knot + 2 * eta, v) - d2u(knot + 4 * eta, v);
            const double l1 = 2 * d1u(knot - 2 * eta, v) - d1u(knot - 4 * eta, v);
            const double r1 = 2 * d1u(knot + 2 * eta, v) - d1u(knot + 4 * eta, v);
            c2_dev = std::max({c2_dev, std::abs(l2 - r2), std::abs(l1 - r1)});
        }
    }

    const bool pass = pu_dev < 1e-12 && fit_res < 1e-9 && plane_dev < 1e-9 && c2_dev < 1e-4;
    report(6, pass, "B-spline partition of unity, interpolation, plane, C2",
           "PoU " + fmt(pu_dev) + ", 25-pt res " + fmt(fit_res) + ", plane " + fmt(plane_dev) +
               ", C2 " + fmt(c2_dev));
}

// ---- criterion 7: inversion round trips --------------------------------------

void criterion_7() {
    std::mt19937 rng(1415);
    std::uniform_real_distribution<double> omega_dist(0.3, 1.0);
    std::uniform_real_distribution<double> eps_dist(0.0, 1.0);
    std::uniform_real_distribution<double> b_dist(0.02, 0.98);
    double worst_roundtrip = 0.0;
    for (int k = 0; k < 50; ++k) {
        const double omega = omega_dist(rng);
        const double eps = eps_dist(rng);
        const double planted = b_dist(rng);
        const double target = evo_d01({omega, eps, planted}).d01;
        const double solved = solve_b(omega, eps, target, {0.0, 1.0});
        worst_roundtrip = std::max(worst_roundtrip, std::abs(solved - planted));
    }

    // schedule entries re-verify through the forward formula
    DriftTrajectory drift;
    for (int k = 0; k < 5; ++k) drift.samples.push_back({0.25 * k, 1.0 - 0.025 * k, 0.0});
    const double d_target = evo_d01({1.0, 0.0, 0.0}).d01;
    const CorrectionSchedule schedule = correction_schedule(drift, d_target, {0.0, 1.0});
    bool schedule_ok = schedule.failures == 0 && schedule.entries.size() == drift.samples.size();
    for (size_t k = 0; k < schedule.entries.size() && schedule_ok; ++k) {
        const auto& e = schedule.entries[k];
        const double recomputed = evo_d01({drift.samples[k].omega, drift.samples[k].epsilon,
                                           e.b}).d01;
        schedule_ok = std::abs(recomputed - d_target) <= e.residual + 1e-14;
    }

    // surface cross-validation on the (epsilon, b) control plane at omega = 1
    const auto fit_grid = [&](int n) {
        SurfaceData data;
        data.rows = n;
        data.cols = n;
        data.points.resize(static_cast<size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double eps = static_cast<double>(i) / (n - 1);
                const double b = static_cast<double>(j) / (n - 1);
                data.at(i, j) = {eps, b, evo_d01({1.0, eps, b}).d01};
            }
        return fit_surface(data, 3, 3, ParametrizationMethod::chord_length);
    };
    const BSplineSurface s9 = fit_grid(9);
    const BSplineSurface s17 = fit_grid(17);
    double worst9 = 0.0, worst17 = 0.0;
    for (double eps = 0.15; eps <= 0.86; eps += 0.1) {
        for (double planted = 0.15; planted <= 0.86; planted += 0.1) {
            const double target = evo_d01({1.0, eps, planted}).d01;
            worst9 = std::max(worst9, invert_via_surface(s9, SurfaceAxis::epsilon, 1.0, eps,
                                                         target, {0.0, 1.0})
                                          .discrepancy);
            worst17 = std::max(worst17, invert_via_surface(s17, SurfaceAxis::epsilon, 1.0, eps,
                                                           target, {0.0, 1.0})
                                            .discrepancy);
        }
    }

    const bool pass =
        worst_roundtrip < 1e-8 && schedule_ok && worst9 < 1e-3 && worst17 * 2.0 <= worst9;
    report(7, pass, "inversion round trip, schedule verification, surface cross-validation",
           "round trip " + fmt(worst_roundtrip) + " (< 1e-8), surface 9x9 " + fmt(worst9) +
               " (< 1e-3), 17x17 gain " + fmt(worst9 / worst17) + "x (>= 2)");
}

// ---- criterion 8: thermal limits ----------------------------------------------

void criterion_8() {
    double worst_limit = 0.0;
    for (double omega : {1.0, 0.6}) {
        for (double b : {0.0, 0.3}) {
            const double kT = 1e-3 * omega;  // epsilon = 0, so omega' = omega
            const double cold = thermal_evo({omega, 0.0, b}, ThermalSpec{kT}).value;
            worst_limit = std::max(worst_limit, std::abs(cold - evo_d01({omega, 0.0, b}).d01));
        }
    }

    const double n40 = thermal_evo({1.0, 0.2, 0.1}, ThermalSpec{1.0, 40}).value;
    const double n80 = thermal_evo({1.0, 0.2, 0.1}, ThermalSpec{1.0, 80}).value;
    const double doubling = std::abs(n40 - n80);

    const double formula = thermal_evo({1.0, 0.3, 0.0}, ThermalSpec{1.0, 24}).value;
    const double oracle = exact_thermal({1.0, 0.3, 0.0}, ThermalSpec{1.0, 24}, BasisSpec{96});
    const double gap = std::abs(formula - oracle);

    const bool pass = worst_limit < 1e-8 && doubling < 1e-10 && gap < 1e-8;
    report(8, pass, "thermal zero-T limit, truncation stability, exact agreement at b=0",
           "limit " + fmt(worst_limit) + " (< 1e-8), doubling " + fmt(doubling) +
               " (< 1e-10), oracle gap " + fmt(gap) + " (< 1e-8)");
}

// ---- criterion 9: CLI determinism ----------------------------------------------

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void criterion_9(const std::string& cli, const std::filesystem::path& scratch) {
    if (cli.empty()) {
        report(9, false, "CLI determinism", "no CLI path given");
        return;
    }
    std::error_code ec;
    std::filesystem::remove_all(scratch, ec);
    std::filesystem::create_directories(scratch);
    const auto run = [&](const std::string& args) {
        const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    bool ok = true;
    for (int round = 1; round <= 2; ++round) {
        const std::string d = (scratch / ("r" + std::to_string(round))).string();
        std::filesystem::create_directories(d);
        ok = ok && run("sample --model sinab --a-min 0.2 --a-max 2 --b-min 0.2 --b-max 2 "
                       "--na 81 --nb 81 --s 0.5 --out " + d + "/field.csv");
        ok = ok && run("contour --in " + d + "/field.csv --c 0 --out " + d +
                       "/contour.json --svg " + d + "/contour.svg");
        ok = ok && run("sample --model eq17 --a-min -1 --a-max 1 --b-min -1 --b-max 1 "
                       "--na 5 --nb 5 --out " + d + "/eq17.csv");
        ok = ok && run("fit --in " + d + "/eq17.csv --p 3 --q 3 --out " + d + "/surface.json");
        ok = ok && run("slice --surface " + d + "/surface.json --z 0 --resolution 64 --out " +
                       d + "/slice.json");
        ok = ok && run("verify --omega 1 --epsilon 0 --n-basis 24 --json " + d + "/verify.json");
    }
    int mismatches = 0;
    for (const char* name : {"field.csv", "contour.json", "contour.svg", "eq17.csv",
                             "surface.json", "slice.json", "verify.json"}) {
        const std::string a = slurp(scratch / "r1" / name);
        const std::string b = slurp(scratch / "r2" / name);
        if (a.empty() || a != b) ++mismatches;
    }
    report(9, ok && mismatches == 0, "CLI outputs byte-identical across repeated runs",
           ok ? (std::to_string(7 - mismatches) + "/7 files identical")
              : "subcommand invocation failed");
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const std::filesystem::path scratch =
        argc > 2 ? std::filesystem::path(argv[2])
                 : std::filesystem::temp_directory_path() / "evoset_acceptance";

    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9(cli, scratch);

    if (g_failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}

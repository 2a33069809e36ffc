// evoset command-line front end: sample EVO fields, extract level-set
// contours, fit and slice B-spline surfaces, solve control inversions and
// verify the perturbative formula against the spectral oracle.
//
// Exit codes: 0 success, 2 usage/input error, 3 numeric failure
// (verify exits 1 when an oracle convergence flag fails).

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evoset/bspline.hpp"
#include "evoset/inversion.hpp"
#include "evoset/io.hpp"
#include "evoset/levelset.hpp"
#include "evoset/oscillator.hpp"
#include "evoset/spectral.hpp"

namespace {

using namespace evoset;

struct SampleOptions {
    std::string model;
    std::string abscissa = "epsilon";
    double a_min = 0.0, a_max = 1.0, b_min = 0.0, b_max = 1.0;
    int n_a = 21, n_b = 21;
    double s = 0.0;
    double omega = 1.0, epsilon = 0.0;
    double kT = 1.0;
    int n_max = 0;
    PhysicalConstants consts;
    int threads = 1;
    std::string out;
};

int cmd_sample(const SampleOptions& opt) {
    ParameterGrid grid{opt.a_min, opt.a_max, opt.b_min, opt.b_max, opt.n_a, opt.n_b};
    grid.validate();
    opt.consts.validate();

    std::function<double(double, double)> evaluator;
    if (opt.model == "sinab") {
        const double s = opt.s;
        evaluator = [s](double a, double b) { return s - std::sin(a * b); };
    } else if (opt.model == "circle") {
        const double s = opt.s;
        evaluator = [s](double a, double b) { return a * a + b * b - s; };
    } else if (opt.model == "eq17") {
        evaluator = [](double a, double b) { return cubic_test_surface(a, b); };
    } else if (opt.model == "d01" || opt.model == "thermal") {
        const bool vary_omega = opt.abscissa == "omega";
        const SampleOptions o = opt;
        if (opt.model == "d01") {
            evaluator = [o, vary_omega](double a, double b) {
                OscillatorPoint pt{vary_omega ? a : o.omega, vary_omega ? o.epsilon : a, b};
                return evo_d01(pt, o.consts).d01;
            };
        } else {
            evaluator = [o, vary_omega](double a, double b) {
                OscillatorPoint pt{vary_omega ? a : o.omega, vary_omega ? o.epsilon : a, b};
                ThermalSpec thermal{o.kT / o.consts.k_boltzmann, o.n_max};
                return thermal_evo(pt, thermal, o.consts).value;
            };
        }
    } else {
        throw std::domain_error("sample: unknown model '" + opt.model + "'");
    }

    const ScalarField field = sample_field(evaluator, grid, opt.s, opt.threads);
    io::write_field_csv(opt.out, field);
    std::cout << field.values.size() << " rows -> " << opt.out << "\n";
    return 0;
}

int cmd_contour(const std::string& in, double c, const std::string& out, const std::string& svg) {
    const ScalarField field = io::read_field_csv(in);
    const std::vector<Contour> contours = refine_contour(field, c);
    io::write_contours_json(out, field.s, c, contours);
    if (!svg.empty()) io::write_contours_svg(svg, field.grid, contours);
    if (contours.empty())
        std::cerr << "warning: level " << io::format_double(c)
                  << " does not intersect the sampled field\n";
    std::cout << contours.size() << " contours -> " << out << "\n";
    return 0;
}

int cmd_fit(const std::string& in, int p, int q, const std::string& method,
            const std::string& out) {
    const ScalarField field = io::read_field_csv(in);
    SurfaceData data;
    data.rows = field.grid.n_a;
    data.cols = field.grid.n_b;
    data.points.resize(static_cast<size_t>(data.rows) * data.cols);
    for (int i = 0; i < data.rows; ++i)
        for (int j = 0; j < data.cols; ++j)
            data.at(i, j) = {field.grid.a_at(i), field.grid.b_at(j), field.at(i, j)};

    const ParametrizationMethod m = method == "equidistant" ? ParametrizationMethod::equidistant
                                                            : ParametrizationMethod::chord_length;
    const BSplineSurface surface = fit_surface(data, p, q, m);
    io::write_surface_json(out, surface);
    std::cout << "surface " << data.rows << "x" << data.cols << " -> " << out << "\n";
    return 0;
}

int cmd_eval(const std::string& surface_path, double u, double v) {
    const BSplineSurface surface = io::read_surface_json(surface_path);
    const Point3 r = eval_surface(surface, u, v);
    std::cout << io::format_double(r[0]) << ' ' << io::format_double(r[1]) << ' '
              << io::format_double(r[2]) << "\n";
    return 0;
}

int cmd_eval_grid(const std::string& surface_path, int nu, int nv, const std::string& out) {
    const BSplineSurface surface = io::read_surface_json(surface_path);
    std::ostringstream csv;
    csv << "x,y,z\n";
    for (int i = 0; i < nu; ++i) {
        const double u = static_cast<double>(i) / (nu - 1);
        for (int j = 0; j < nv; ++j) {
            const double v = static_cast<double>(j) / (nv - 1);
            const Point3 r = eval_surface(surface, u, v);
            csv << io::format_double(r[0]) << ',' << io::format_double(r[1]) << ','
                << io::format_double(r[2]) << '\n';
        }
    }
    io::write_file_atomic(out, csv.str());
    std::cout << nu * nv << " rows -> " << out << "\n";
    return 0;
}

int cmd_slice(const std::string& surface_path, double z, int resolution, const std::string& out,
              const std::string& svg) {
    const BSplineSurface surface = io::read_surface_json(surface_path);
    const std::vector<Contour> contours = surface_slice(surface, z, resolution);
    io::write_contours_json(out, 0.0, z, contours);
    if (!svg.empty()) {
        // plot box from the contour extent (the surface's xy footprint)
        double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
        bool first = true;
        for (const auto& contour : contours)
            for (const auto& pt : contour.points) {
                if (first) {
                    x_lo = x_hi = pt[0];
                    y_lo = y_hi = pt[1];
                    first = false;
                }
                x_lo = std::min(x_lo, pt[0]);
                x_hi = std::max(x_hi, pt[0]);
                y_lo = std::min(y_lo, pt[1]);
                y_hi = std::max(y_hi, pt[1]);
            }
        if (first || x_lo == x_hi || y_lo == y_hi) {
            x_lo = y_lo = 0;
            x_hi = y_hi = 1;
        }
        io::write_contours_svg(svg, ParameterGrid{x_lo, x_hi, y_lo, y_hi, 2, 2}, contours);
    }
    if (contours.empty())
        std::cerr << "warning: surface does not attain level " << io::format_double(z) << "\n";
    std::cout << contours.size() << " contours -> " << out << "\n";
    return 0;
}

int cmd_invert(const std::string& trajectory_path, double d_target, double lo, double hi,
               const std::string& out, const PhysicalConstants& consts) {
    const DriftTrajectory trajectory = io::read_trajectory_csv(trajectory_path);
    const CorrectionSchedule schedule = correction_schedule(trajectory, d_target, {lo, hi}, consts);
    io::write_schedule_json(out, d_target, schedule);
    if (schedule.failures > 0)
        std::cerr << "warning: " << schedule.failures << " of " << schedule.entries.size()
                  << " samples unreachable\n";
    std::cout << schedule.entries.size() << " entries (" << schedule.failures << " unreachable) -> "
              << out << "\n";
    return 0;
}

int cmd_thermal(double omega, double epsilon, double b, double kT, int n_max, bool check_oracle,
                int n_basis, const PhysicalConstants& consts) {
    const OscillatorPoint point{omega, epsilon, b};
    const ThermalSpec thermal{kT / consts.k_boltzmann, n_max};
    const ThermalResult result = thermal_evo(point, thermal, consts);
    std::cout << "thermal_evo = " << io::format_double(result.value)
              << " (n_max=" << result.n_max_used
              << ", tail_weight=" << io::format_double(result.tail_weight) << ")\n";
    if (!result.truncation_ok)
        std::cerr << "warning: truncation tail weight "
                  << io::format_double(result.tail_weight) << " above tolerance\n";
    if (check_oracle) {
        const double exact =
            exact_thermal(point, ThermalSpec{kT / consts.k_boltzmann, result.n_max_used},
                          BasisSpec{n_basis}, consts);
        std::cout << "exact_thermal = " << io::format_double(exact)
                  << "\n|gap| = " << io::format_double(std::abs(exact - result.value)) << "\n";
    }
    return 0;
}

int cmd_verify(double omega, double epsilon, std::vector<double> b_sweep, int n_basis,
               const std::string& json_out, const PhysicalConstants& consts) {
    if (b_sweep.empty()) b_sweep = {0.04, 0.02, 0.01};
    std::sort(b_sweep.rbegin(), b_sweep.rend());

    struct Row {
        double b, perturbative, exact, gap;
        bool converged;
    };
    std::vector<Row> rows;

    // b = 0 first: at epsilon != 0 this exposes the (1+eps) vs (1+eps)^(-1/4)
    // scaling mismatch of the first-order formula
    std::vector<double> all_b = {0.0};
    all_b.insert(all_b.end(), b_sweep.begin(), b_sweep.end());
    bool all_converged = true;
    for (double b : all_b) {
        const OscillatorPoint pt{omega, epsilon, b};
        const double pert = evo_d01(pt, consts).d01;
        const SpectralResult oracle = exact_d01(pt, BasisSpec{n_basis}, consts);
        all_converged = all_converged && oracle.converged;
        rows.push_back({b, pert, oracle.d01_exact, std::abs(pert - oracle.d01_exact),
                        oracle.converged});
    }

    // least-squares log-log slope over the positive-b sweep
    double slope = 0.0;
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (const Row& r : rows) {
            if (r.b <= 0.0 || r.gap <= 0.0) continue;
            const double x = std::log(r.b);
            const double y = std::log(r.gap);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
        if (n >= 2) slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }

    // eigenvalue sanity at b = eps = 0 against hbar*omega*(n + 1/2)
    const Matrix h0 = build_hamiltonian_matrix({omega, 0.0, 0.0}, BasisSpec{n_basis}, consts);
    const EigenSystem es = diagonalize(h0);
    double eig_dev = 0.0;
    for (int n = 0; n < n_basis / 2; ++n)
        eig_dev = std::max(eig_dev,
                           std::abs(es.eigenvalues[n] - consts.hbar * omega * (n + 0.5)));

    std::cout << "verify: omega=" << io::format_double(omega)
              << " epsilon=" << io::format_double(epsilon) << " n_basis=" << n_basis << "\n";
    std::cout << "b,perturbative,exact,gap,converged\n";
    for (const Row& r : rows)
        std::cout << io::format_double(r.b) << ',' << io::format_double(r.perturbative) << ','
                  << io::format_double(r.exact) << ',' << io::format_double(r.gap) << ','
                  << (r.converged ? "yes" : "no") << "\n";
    std::cout << "log-log slope (positive b): " << io::format_double(slope) << "\n";
    std::cout << "eigenvalue max deviation (b=eps=0, n < n_basis/2): "
              << io::format_double(eig_dev) << "\n";
    std::cout << "all oracle runs converged: " << (all_converged ? "yes" : "no") << "\n";

    if (!json_out.empty()) {
        std::ostringstream json;
        json << "{\"omega\":" << io::format_double(omega)
             << ",\"epsilon\":" << io::format_double(epsilon) << ",\"n_basis\":" << n_basis
             << ",\"rows\":[";
        for (size_t k = 0; k < rows.size(); ++k) {
            const Row& r = rows[k];
            if (k) json << ',';
            json << "{\"b\":" << io::format_double(r.b)
                 << ",\"perturbative\":" << io::format_double(r.perturbative)
                 << ",\"exact\":" << io::format_double(r.exact)
                 << ",\"gap\":" << io::format_double(r.gap)
                 << ",\"converged\":" << (r.converged ? "true" : "false") << '}';
        }
        json << "],\"slope\":" << io::format_double(slope)
             << ",\"eigenvalue_max_dev\":" << io::format_double(eig_dev)
             << ",\"all_converged\":" << (all_converged ? "true" : "false") << "}\n";
        io::write_file_atomic(json_out, json.str());
    }
    return all_converged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"level sets of constant expectation values in Hamiltonian parameter space"};
    app.require_subcommand(1);

    PhysicalConstants consts;

    SampleOptions sample_opt;
    auto* sample = app.add_subcommand("sample", "sample an EVO field on a parameter grid");
    sample->add_option("--model", sample_opt.model, "d01 | thermal | sinab | eq17 | circle")
        ->required()
        ->check(CLI::IsMember({"d01", "thermal", "sinab", "eq17", "circle"}));
    sample->add_option("--a-min", sample_opt.a_min);
    sample->add_option("--a-max", sample_opt.a_max);
    sample->add_option("--b-min", sample_opt.b_min);
    sample->add_option("--b-max", sample_opt.b_max);
    sample->add_option("--na", sample_opt.n_a);
    sample->add_option("--nb", sample_opt.n_b);
    sample->add_option("--s", sample_opt.s, "scale parameter value");
    sample->add_option("--omega", sample_opt.omega);
    sample->add_option("--epsilon", sample_opt.epsilon);
    sample->add_option("--kT", sample_opt.kT, "thermal energy for model=thermal");
    sample->add_option("--n-max", sample_opt.n_max, "thermal truncation (0 = automatic)");
    sample->add_option("--abscissa", sample_opt.abscissa, "grid a-axis for d01/thermal")
        ->check(CLI::IsMember({"epsilon", "omega"}));
    sample->add_option("--threads", sample_opt.threads);
    sample->add_option("--out", sample_opt.out, "output field CSV")->required();

    std::string contour_in, contour_out, contour_svg;
    double contour_c = 0.0;
    auto* contour = app.add_subcommand("contour", "extract level-set contours from a field CSV");
    contour->add_option("--in", contour_in)->required();
    contour->add_option("--c", contour_c, "level value")->required();
    contour->add_option("--out", contour_out, "output contour JSON")->required();
    contour->add_option("--svg", contour_svg, "optional SVG plot");

    std::string fit_in, fit_out, fit_method = "chord";
    int fit_p = 3, fit_q = 3;
    auto* fit = app.add_subcommand("fit", "fit a B-spline surface through gridded field data");
    fit->add_option("--in", fit_in)->required();
    fit->add_option("--p", fit_p, "degree along a");
    fit->add_option("--q", fit_q, "degree along b");
    fit->add_option("--method", fit_method)->check(CLI::IsMember({"chord", "equidistant"}));
    fit->add_option("--out", fit_out, "output surface JSON")->required();

    std::string eval_surface_path, eval_out;
    double eval_u = 0.0, eval_v = 0.0;
    int eval_nu = 0, eval_nv = 0;
    auto* eval = app.add_subcommand("eval", "evaluate a fitted surface");
    eval->add_option("--surface", eval_surface_path)->required();
    eval->add_option("--u", eval_u);
    eval->add_option("--v", eval_v);
    eval->add_option("--nu", eval_nu, "lattice sampling: points along u");
    eval->add_option("--nv", eval_nv, "lattice sampling: points along v");
    eval->add_option("--out", eval_out, "lattice CSV output");

    std::string slice_surface_path, slice_out, slice_svg;
    double slice_z = 0.0;
    int slice_resolution = 128;
    auto* slice = app.add_subcommand("slice", "constant-height slice of a fitted surface");
    slice->add_option("--surface", slice_surface_path)->required();
    slice->add_option("--z", slice_z, "height of the slicing plane")->required();
    slice->add_option("--resolution", slice_resolution);
    slice->add_option("--out", slice_out)->required();
    slice->add_option("--svg", slice_svg);

    std::string invert_trajectory, invert_out;
    double invert_d = 0.0, invert_lo = 0.0, invert_hi = 1.0;
    auto* invert = app.add_subcommand("invert", "solve the control correction along a drift trajectory");
    invert->add_option("--trajectory", invert_trajectory, "CSV with columns s,omega,epsilon")
        ->required();
    invert->add_option("--d", invert_d, "target EVO value")->required();
    invert->add_option("--bracket-lo", invert_lo);
    invert->add_option("--bracket-hi", invert_hi);
    invert->add_option("--out", invert_out, "output schedule JSON")->required();

    double th_omega = 1.0, th_epsilon = 0.0, th_b = 0.0, th_kT = 1.0;
    int th_n_max = 0, th_n_basis = 96;
    bool th_check = false;
    auto* thermal = app.add_subcommand("thermal", "Boltzmann-averaged transition element");
    thermal->add_option("--omega", th_omega);
    thermal->add_option("--epsilon", th_epsilon);
    thermal->add_option("--b", th_b);
    thermal->add_option("--kT", th_kT)->required();
    thermal->add_option("--n-max", th_n_max, "truncation (0 = automatic)");
    thermal->add_flag("--check-oracle", th_check, "compare against the exact spectral sum");
    thermal->add_option("--n-basis", th_n_basis);

    double vf_omega = 1.0, vf_epsilon = 0.0;
    int vf_n_basis = 40;
    std::vector<double> vf_sweep;
    std::string vf_json;
    auto* verify = app.add_subcommand("verify", "perturbative formula vs spectral oracle");
    verify->add_option("--omega", vf_omega);
    verify->add_option("--epsilon", vf_epsilon);
    verify->add_option("--b-sweep", vf_sweep, "b values for the error scaling sweep");
    verify->add_option("--n-basis", vf_n_basis);
    verify->add_option("--json", vf_json, "machine-readable report path");

    for (auto* cmd : {sample, contour, fit, eval, slice, invert, thermal, verify}) {
        cmd->add_option("--hbar", consts.hbar);
        cmd->add_option("--mass", consts.mass);
        cmd->add_option("--kB", consts.k_boltzmann);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        sample_opt.consts = consts;
        if (*sample) return cmd_sample(sample_opt);
        if (*contour) return cmd_contour(contour_in, contour_c, contour_out, contour_svg);
        if (*fit) return cmd_fit(fit_in, fit_p, fit_q, fit_method, fit_out);
        if (*eval) {
            if (eval_nu > 1 && eval_nv > 1) {
                if (eval_out.empty()) throw std::domain_error("eval: lattice mode needs --out");
                return cmd_eval_grid(eval_surface_path, eval_nu, eval_nv, eval_out);
            }
            return cmd_eval(eval_surface_path, eval_u, eval_v);
        }
        if (*slice) return cmd_slice(slice_surface_path, slice_z, slice_resolution, slice_out, slice_svg);
        if (*invert) return cmd_invert(invert_trajectory, invert_d, invert_lo, invert_hi, invert_out, consts);
        if (*thermal)
            return cmd_thermal(th_omega, th_epsilon, th_b, th_kT, th_n_max, th_check, th_n_basis, consts);
        if (*verify) return cmd_verify(vf_omega, vf_epsilon, vf_sweep, vf_n_basis, vf_json, consts);
    } catch (const io::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

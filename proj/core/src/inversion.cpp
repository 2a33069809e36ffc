#include "evoset/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace evoset {

namespace {

constexpr double kResidualTol = 1e-10;
constexpr double kWidthTol = 1e-12;

[[noreturn]] void no_root(const char* name, double lo, double hi, double f_lo, double f_hi) {
    std::ostringstream msg;
    msg.precision(17);
    msg << name << ": no root in bracket [" << lo << ", " << hi << "]; residual signs ("
        << (f_lo > 0 ? '+' : '-') << ", " << (f_hi > 0 ? '+' : '-') << "), values (" << f_lo
        << ", " << f_hi << ")";
    throw NoRootError(msg.str(), f_lo, f_hi);
}

// Bracketed scalar root: bisection with inverse-quadratic (falling back to
// secant) refinement steps that must stay inside the current bracket.
template <typename F>
double bracketed_root(F&& f, double lo, double hi, double f_lo, double f_hi) {
    double a = lo, b = hi, fa = f_lo, fb = f_hi;
    double c = a, fc = fa;  // previous iterate, seeds the quadratic step
    double stale_width = std::abs(b - a);

    for (int iter = 0; iter < 200; ++iter) {
        if (std::abs(fb) < std::abs(fa)) {
            std::swap(a, b);
            std::swap(fa, fb);
        }
        // b is the best iterate; bracket is [a, b] or [b, a]
        if (std::abs(fb) < kResidualTol || std::abs(b - a) < kWidthTol) return b;

        // interpolation must beat bisection; force the halving every other step
        bool force_bisect = false;
        if (iter % 2 == 1) {
            force_bisect = std::abs(b - a) > 0.5 * stale_width;
            stale_width = std::abs(b - a);
        }

        double x;
        bool interpolated = false;
        if (!force_bisect && fa != fc && fb != fc && fa != fb) {
            // inverse quadratic through (a, fa), (b, fb), (c, fc)
            x = a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) +
                c * fa * fb / ((fc - fa) * (fc - fb));
            interpolated = true;
        } else if (!force_bisect && fa != fb) {
            x = b - fb * (b - a) / (fb - fa);
            interpolated = true;
        } else {
            x = 0.5 * (a + b);
        }
        const double x_lo = std::min(a, b);
        const double x_hi = std::max(a, b);
        if (!interpolated || !(x > x_lo && x < x_hi)) x = 0.5 * (a + b);

        const double fx = f(x);
        c = b;
        fc = fb;
        if ((fa > 0) != (fx > 0)) {
            b = x;
            fb = fx;
        } else {
            a = x;
            fa = fx;
        }
    }
    return b;
}

}  // namespace

double solve_b(double omega, double epsilon, double d_target, const Bracket& bracket,
               const PhysicalConstants& consts) {
    bracket.validate();
    const auto f = [&](double b) {
        return evo_d01({omega, epsilon, b}, consts).d01 - d_target;
    };
    const double f_lo = f(bracket.lo);
    const double f_hi = f(bracket.hi);
    if (f_lo == 0.0) return std::abs(bracket.lo);
    if (f_hi == 0.0) return std::abs(bracket.hi);
    if ((f_lo > 0) == (f_hi > 0)) no_root("solve_b", bracket.lo, bracket.hi, f_lo, f_hi);
    return std::abs(bracketed_root(f, bracket.lo, bracket.hi, f_lo, f_hi));
}

EpsilonRoot solve_epsilon(double omega, double b, double d_target, const Bracket& bracket,
                          const PhysicalConstants& consts) {
    bracket.validate();
    if (!(1.0 + bracket.lo > 0.0))
        throw std::domain_error("solve_epsilon: bracket violates 1 + epsilon > 0");
    const auto f = [&](double eps) {
        return evo_d01({omega, eps, b}, consts).d01 - d_target;
    };

    // multiplicity scan at 64 subdivisions; refine the first bracketed root
    constexpr int kScan = 64;
    std::vector<double> xs(kScan + 1), fs(kScan + 1);
    for (int k = 0; k <= kScan; ++k) {
        xs[k] = bracket.lo + (bracket.hi - bracket.lo) * k / kScan;
        fs[k] = f(xs[k]);
    }

    int sign_changes = 0;
    int first = -1;
    for (int k = 0; k < kScan; ++k) {
        if (fs[k] == 0.0 || (fs[k] > 0) != (fs[k + 1] > 0)) {
            ++sign_changes;
            if (first < 0) first = k;
        }
    }
    if (fs[kScan] == 0.0 && first < 0) {
        ++sign_changes;
        first = kScan - 1;
    }
    if (first < 0) no_root("solve_epsilon", bracket.lo, bracket.hi, fs.front(), fs.back());

    if (fs[first] == 0.0) return {xs[first], sign_changes};
    if (fs[first + 1] == 0.0) return {xs[first + 1], sign_changes};
    return {bracketed_root(f, xs[first], xs[first + 1], fs[first], fs[first + 1]), sign_changes};
}

CorrectionSchedule correction_schedule(const DriftTrajectory& trajectory, double d_target,
                                       const Bracket& bracket, const PhysicalConstants& consts) {
    trajectory.validate();
    bracket.validate();

    CorrectionSchedule schedule;
    const double half_width = 0.5 * (bracket.hi - bracket.lo);
    double prev_b = std::numeric_limits<double>::quiet_NaN();

    for (const auto& sample : trajectory.samples) {
        ScheduleEntry entry{sample.s, std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN(), ScheduleStatus::unreachable};
        bool solved = false;
        double b = 0.0;

        if (std::isfinite(prev_b)) {
            // warm start: recenter the search on the previous correction
            const Bracket warm{std::max(0.0, prev_b - half_width), prev_b + half_width};
            try {
                b = solve_b(sample.omega, sample.epsilon, d_target, warm, consts);
                solved = true;
            } catch (const NoRootError&) {
            }
        }
        if (!solved) {
            try {
                b = solve_b(sample.omega, sample.epsilon, d_target, bracket, consts);
                solved = true;
            } catch (const NoRootError&) {
            }
        }

        if (solved) {
            entry.b = b;
            entry.achieved_d = evo_d01({sample.omega, sample.epsilon, b}, consts).d01;
            entry.residual = std::abs(entry.achieved_d - d_target);
            entry.status = ScheduleStatus::solved;
            prev_b = b;
        } else {
            ++schedule.failures;
        }
        schedule.entries.push_back(entry);
    }
    return schedule;
}

namespace {

// Parameter u where the surface's x coordinate reaches x_fixed along the
// v-isoline, or NaN when the isoline does not span it.
double u_at_abscissa(const BSplineSurface& surface, double v, double x_fixed) {
    const auto fx = [&](double u) { return eval_surface(surface, u, v)[0] - x_fixed; };
    const double f0 = fx(0.0);
    const double f1 = fx(1.0);
    if (f0 == 0.0) return 0.0;
    if (f1 == 0.0) return 1.0;
    if ((f0 > 0) == (f1 > 0)) return std::numeric_limits<double>::quiet_NaN();
    return bracketed_root(fx, 0.0, 1.0, f0, f1);
}

}  // namespace

SurfaceInversion invert_via_surface(const BSplineSurface& surface, SurfaceAxis axis, double omega,
                                    double epsilon, double d_target, const Bracket& direct_bracket,
                                    const PhysicalConstants& consts, int slice_resolution) {
    const double x_fixed = axis == SurfaceAxis::omega ? omega : epsilon;

    const std::vector<Contour> slice = surface_slice(surface, d_target, slice_resolution);
    if (slice.empty())
        throw std::runtime_error("invert_via_surface: target level not attained by the surface");

    // read b off the contour at the fixed abscissa; smallest nonnegative
    // crossing, consistent with the sign convention of solve_b
    double coarse_b = std::numeric_limits<double>::quiet_NaN();
    for (const auto& contour : slice) {
        const size_t n = contour.points.size();
        if (n < 2) continue;
        const size_t n_segments = contour.closed ? n : n - 1;
        for (size_t k = 0; k < n_segments; ++k) {
            const Point2& p1 = contour.points[k];
            const Point2& p2 = contour.points[(k + 1) % n];
            const double d1 = p1[0] - x_fixed;
            const double d2 = p2[0] - x_fixed;
            if (d1 * d2 > 0.0) continue;
            if (d1 == d2) continue;
            const double t = d1 / (d1 - d2);
            const double y = p1[1] + t * (p2[1] - p1[1]);
            if (y < -1e-12) continue;
            if (std::isnan(coarse_b) || y < coarse_b) coarse_b = std::max(0.0, y);
        }
    }
    if (std::isnan(coarse_b))
        throw std::runtime_error("invert_via_surface: slice does not cover the fixed parameter value");

    // polish on the spline itself: walk the x = x_fixed curve in v, solve
    // z = d_target on it, and keep the root whose y agrees with the slice
    double refined_b = coarse_b;
    {
        const auto z_on_curve = [&](double v) -> double {
            const double u = u_at_abscissa(surface, v, x_fixed);
            if (std::isnan(u)) return std::numeric_limits<double>::quiet_NaN();
            return eval_surface(surface, u, v)[2] - d_target;
        };
        double best_gap = std::numeric_limits<double>::infinity();
        double prev_v = 0.0;
        double prev_g = z_on_curve(0.0);
        const int scan = std::max(slice_resolution, 64);
        for (int k = 1; k <= scan; ++k) {
            const double v = static_cast<double>(k) / scan;
            const double g = z_on_curve(v);
            if (std::isfinite(prev_g) && std::isfinite(g) && (prev_g > 0) != (g > 0)) {
                const double v_root = bracketed_root(z_on_curve, prev_v, v, prev_g, g);
                const double u_root = u_at_abscissa(surface, v_root, x_fixed);
                if (!std::isnan(u_root)) {
                    const double y = eval_surface(surface, u_root, v_root)[1];
                    const double gap = std::abs(y - coarse_b);
                    if (gap < best_gap) {
                        best_gap = gap;
                        refined_b = std::max(0.0, y);
                    }
                }
            }
            prev_v = v;
            prev_g = g;
        }
    }

    SurfaceInversion out{};
    out.b = refined_b;
    out.b_direct = solve_b(omega, epsilon, d_target, direct_bracket, consts);
    out.discrepancy = std::abs(out.b - out.b_direct);
    return out;
}

}  // namespace evoset

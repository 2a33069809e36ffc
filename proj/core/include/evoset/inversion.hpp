#pragma once

#include <string>
#include <vector>

#include "evoset/bspline.hpp"
#include "evoset/oscillator.hpp"

namespace evoset {

struct Bracket {
    double lo, hi;

    void validate() const {
        if (!(lo < hi)) throw std::domain_error("Bracket: need lo < hi");
    }
};

/// Thrown when the requested level is not straddled by the search bracket.
/// The message carries the sign pattern of the residual at both endpoints.
class NoRootError : public std::runtime_error {
public:
    NoRootError(const std::string& what, double f_lo, double f_hi)
        : std::runtime_error(what), f_lo_(f_lo), f_hi_(f_hi) {}
    double f_lo() const { return f_lo_; }
    double f_hi() const { return f_hi_; }

private:
    double f_lo_, f_hi_;
};

/// Solve d01(omega, epsilon, b) = d_target for b inside the bracket via
/// bisection refined by inverse quadratic steps. The formula is even in b,
/// so the nonnegative root is returned. Residual tolerance 1e-10, bracket
/// width tolerance 1e-12.
double solve_b(double omega, double epsilon, double d_target, const Bracket& bracket,
               const PhysicalConstants& consts = {});

struct EpsilonRoot {
    double value;      ///< smallest root inside the bracket
    int sign_changes;  ///< multiplicity indicator from a 64-subdivision scan
};

/// Solve d01(omega, epsilon, b) = d_target for epsilon. The bracket is
/// scanned at 64 subdivisions; the smallest bracketed root is refined and
/// the number of sign changes reported.
EpsilonRoot solve_epsilon(double omega, double b, double d_target, const Bracket& bracket,
                          const PhysicalConstants& consts = {});

struct TrajectorySample {
    double s, omega, epsilon;
};

/// Drift of the system parameters across the scale variable s.
struct DriftTrajectory {
    std::vector<TrajectorySample> samples;

    void validate() const {
        if (samples.empty()) throw std::domain_error("DriftTrajectory: empty trajectory");
        for (size_t k = 1; k < samples.size(); ++k)
            if (!(samples[k].s > samples[k - 1].s))
                throw std::domain_error("DriftTrajectory: s must be strictly increasing");
    }
};

enum class ScheduleStatus { solved, unreachable };

struct ScheduleEntry {
    double s;
    double b;           ///< NaN when unreachable
    double achieved_d;  ///< forward formula at the solved b; NaN when unreachable
    double residual;    ///< |achieved_d - d_target|; NaN when unreachable
    ScheduleStatus status;
};

struct CorrectionSchedule {
    std::vector<ScheduleEntry> entries;
    int failures = 0;
};

/// One solve_b per trajectory sample, warm-starting each bracket centered on
/// the previous solution. Per-sample failures are flagged and processing
/// continues.
CorrectionSchedule correction_schedule(const DriftTrajectory& trajectory, double d_target,
                                       const Bracket& bracket, const PhysicalConstants& consts = {});

enum class SurfaceAxis { omega, epsilon };

struct SurfaceInversion {
    double b;            ///< control read off the sliced surface
    double b_direct;     ///< reference root from solve_b on the closed formula
    double discrepancy;  ///< |b - b_direct|
};

/// Invert through a fitted surface (x = omega or epsilon, y = b, z = d):
/// slice at z = d_target, interpolate the contour at the fixed x value, and
/// report the agreement with the direct root alongside the result.
SurfaceInversion invert_via_surface(const BSplineSurface& surface, SurfaceAxis axis, double omega,
                                    double epsilon, double d_target, const Bracket& direct_bracket,
                                    const PhysicalConstants& consts = {}, int slice_resolution = 257);

}  // namespace evoset

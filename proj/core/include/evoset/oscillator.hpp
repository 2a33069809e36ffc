#pragma once

#include "evoset/constants.hpp"

namespace evoset {

/// One point (omega, epsilon, b) in Hamiltonian parameter space:
/// H = p^2/2m + (1/2) m omega^2 x^2 + (1/2) epsilon m omega^2 x^2 + b x.
struct OscillatorPoint {
    double omega;        ///< angular frequency, > 0
    double epsilon = 0;  ///< dimensionless quadratic control, 1 + epsilon > 0
    double b = 0;        ///< linear control strength

    void validate() const {
        if (!(omega > 0.0))
            throw std::domain_error("OscillatorPoint: omega must be positive");
        if (!(1.0 + epsilon > 0.0))
            throw std::domain_error("OscillatorPoint: 1 + epsilon must be positive");
    }
};

/// All intermediates of the first-order dipole formula, returned together so
/// callers can inspect the correction structure, not just the final value.
struct PerturbationBreakdown {
    double omega_prime;          ///< omega * sqrt(1 + epsilon)
    double delta;                ///< level gap hbar * omega_prime
    double d01_unperturbed;      ///< sqrt(hbar / (2 m omega))
    double correction_numerator; ///< 1 - b^2 d01_unperturbed / delta^2
    double normalization;        ///< 1 + b^2 d01_unperturbed / delta^2
    double d01;                  ///< corrected transition element
};

/// Thermal-average request. n_max == 0 selects the truncation automatically
/// (smallest level count with Boltzmann tail weight < truncation_tolerance,
/// capped at 512); explicit values must be >= 2.
struct ThermalSpec {
    double temperature;
    int n_max = 0;
    double truncation_tolerance = 1e-12;

    void validate() const {
        if (!(temperature > 0.0))
            throw std::domain_error("ThermalSpec: temperature must be positive");
        if (n_max != 0 && n_max < 2)
            throw std::domain_error("ThermalSpec: n_max must be >= 2 (or 0 for automatic)");
        if (!(truncation_tolerance > 0.0))
            throw std::domain_error("ThermalSpec: truncation_tolerance must be positive");
    }
};

struct ThermalResult {
    double value;        ///< Boltzmann-weighted ladder transition element
    int n_max_used;      ///< truncation actually applied
    double tail_weight;  ///< exp(-(E_nmax - E_0)/kT) / Z, the post-hoc truncation check
    bool truncation_ok;  ///< tail_weight < truncation_tolerance
};

/// omega' = omega * sqrt(1 + epsilon). Throws std::domain_error outside the
/// model's validity region (1 + epsilon <= 0 or omega <= 0).
double effective_frequency(const OscillatorPoint& point);

/// Unperturbed <1|x|0> = sqrt(hbar / (2 m omega)).
double baseline_dipole(double omega, const PhysicalConstants& consts = {});

/// Delta = E_1 - E_0 = hbar * omega'.
double energy_gap(const OscillatorPoint& point, const PhysicalConstants& consts = {});

/// First-order corrected dipole transition element:
///   d01 = [1 - b^2 d01_0 / Delta^2] * d01_0 * (1 + epsilon) / N,
///   N   = [1 + b^2 d01_0 / Delta^2],
/// with d01_0 the unperturbed element at omega and Delta = hbar omega'.
PerturbationBreakdown evo_d01(const OscillatorPoint& point, const PhysicalConstants& consts = {});

/// Thermally averaged transition element
///   sum_{n<n_max} d_{n,n+1} exp(-E_n/kT) / Z,  Z = sum_{n<=n_max} exp(-E_n/kT),
/// with E_n = hbar omega' (n + 1/2) and each d_{n,n+1} the ladder element
/// sqrt(hbar (n+1) / (2 m omega')) carrying the per-level correction factor
/// [1 - b^2 d0/Delta^2] / [1 + b^2 d0/Delta^2]. Boltzmann weights are computed
/// relative to E_0 so the T -> 0 limit stays finite.
ThermalResult thermal_evo(const OscillatorPoint& point, const ThermalSpec& thermal,
                          const PhysicalConstants& consts = {});

}  // namespace evoset

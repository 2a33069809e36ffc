#include "evoset/oscillator.hpp"

#include <algorithm>
#include <cmath>

namespace evoset {

double effective_frequency(const OscillatorPoint& point) {
    point.validate();
    return point.omega * std::sqrt(1.0 + point.epsilon);
}

double baseline_dipole(double omega, const PhysicalConstants& consts) {
    consts.validate();
    if (!(omega > 0.0))
        throw std::domain_error("baseline_dipole: omega must be positive");
    return std::sqrt(consts.hbar / (2.0 * consts.mass * omega));
}

double energy_gap(const OscillatorPoint& point, const PhysicalConstants& consts) {
    consts.validate();
    return consts.hbar * effective_frequency(point);
}

PerturbationBreakdown evo_d01(const OscillatorPoint& point, const PhysicalConstants& consts) {
    PerturbationBreakdown out{};
    out.omega_prime = effective_frequency(point);
    consts.validate();
    out.delta = consts.hbar * out.omega_prime;
    out.d01_unperturbed = baseline_dipole(point.omega, consts);
    const double t = point.b * point.b * out.d01_unperturbed / (out.delta * out.delta);
    out.correction_numerator = 1.0 - t;
    out.normalization = 1.0 + t;
    out.d01 = out.correction_numerator * out.d01_unperturbed * (1.0 + point.epsilon) / out.normalization;
    return out;
}

namespace {

// Ladder element of the omega' oscillator with the same correction structure
// as the n = 0 formula, applied level by level. The gap E_{n+1} - E_n is
// hbar omega' independent of n for the shifted harmonic spectrum.
double corrected_ladder_element(int n, double omega_prime, double delta,
                                double b, const PhysicalConstants& consts) {
    const double d0 = std::sqrt(consts.hbar * (n + 1.0) / (2.0 * consts.mass * omega_prime));
    const double t = b * b * d0 / (delta * delta);
    return d0 * (1.0 - t) / (1.0 + t);
}

}  // namespace

ThermalResult thermal_evo(const OscillatorPoint& point, const ThermalSpec& thermal,
                          const PhysicalConstants& consts) {
    thermal.validate();
    consts.validate();
    const double omega_prime = effective_frequency(point);
    const double delta = consts.hbar * omega_prime;
    const double kT = consts.k_boltzmann * thermal.temperature;

    // Boltzmann ratio between adjacent levels; weights taken relative to E_0
    // so extreme-low temperatures do not underflow the partition function.
    const double q = std::exp(-delta / kT);

    int n_max = thermal.n_max;
    if (n_max == 0) {
        // smallest truncation whose geometric tail weight drops below tolerance
        n_max = 2;
        while (n_max < 512) {
            const double tail = std::pow(q, n_max) * (1.0 - q);
            if (tail < thermal.truncation_tolerance) break;
            ++n_max;
        }
    }

    double z = 0.0;
    double w = 1.0;  // q^n
    double numerator = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        z += w;
        if (n < n_max)
            numerator += corrected_ladder_element(n, omega_prime, delta, point.b, consts) * w;
        w *= q;
    }

    ThermalResult out{};
    out.value = numerator / z;
    out.n_max_used = n_max;
    out.tail_weight = std::pow(q, n_max) / z;
    out.truncation_ok = out.tail_weight < thermal.truncation_tolerance;
    return out;
}

}  // namespace evoset

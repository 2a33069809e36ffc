#pragma once

#include <stdexcept>

namespace evoset {

/// Unit system for all quantum formulas. Defaults are the dimensionless
/// convention hbar = m = k_B = 1; override for a physical unit system.
struct PhysicalConstants {
    double hbar = 1.0;
    double mass = 1.0;
    double k_boltzmann = 1.0;

    void validate() const {
        if (!(hbar > 0.0) || !(mass > 0.0) || !(k_boltzmann > 0.0))
            throw std::domain_error("PhysicalConstants: hbar, mass and k_boltzmann must be positive");
    }
};

}  // namespace evoset

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace evoset {

/// Rectangular sampling window in (a, b) parameter space.
struct ParameterGrid {
    double a_min, a_max;
    double b_min, b_max;
    int n_a, n_b;

    void validate() const {
        if (!(a_min < a_max) || !(b_min < b_max))
            throw std::domain_error("ParameterGrid: bounds must satisfy a_min < a_max and b_min < b_max");
        if (n_a < 2 || n_b < 2)
            throw std::domain_error("ParameterGrid: point counts must be >= 2");
    }

    double spacing_a() const { return (a_max - a_min) / (n_a - 1); }
    double spacing_b() const { return (b_max - b_min) / (n_b - 1); }
    double a_at(int i) const { return a_min + i * spacing_a(); }
    double b_at(int j) const { return b_min + j * spacing_b(); }

    bool operator==(const ParameterGrid&) const = default;
};

/// EVO samples theta(a_i, b_j) on a grid at one value of the scale parameter.
/// values is row-major in a then b: index(i, j) = i * n_b + j.
struct ScalarField {
    ParameterGrid grid;
    double s = 0.0;
    std::vector<double> values;

    double at(int i, int j) const { return values[static_cast<size_t>(i) * grid.n_b + j]; }
    double& at(int i, int j) { return values[static_cast<size_t>(i) * grid.n_b + j]; }

    void validate() const {
        grid.validate();
        if (values.size() != static_cast<size_t>(grid.n_a) * grid.n_b)
            throw std::domain_error("ScalarField: value count does not match grid");
        for (double v : values)
            if (!std::isfinite(v)) throw std::domain_error("ScalarField: non-finite sample");
    }
};

}  // namespace evoset

#pragma once

#include <array>
#include <vector>

#include "evoset/levelset.hpp"

namespace evoset {

using Point3 = std::array<double, 3>;

/// Rectangular m x n grid of 3-D data points to interpolate, row-major
/// (row index varies along u, column index along v).
struct SurfaceData {
    int rows = 0, cols = 0;
    std::vector<Point3> points;

    const Point3& at(int r, int c) const { return points[static_cast<size_t>(r) * cols + c]; }
    Point3& at(int r, int c) { return points[static_cast<size_t>(r) * cols + c]; }

    void validate() const {
        if (rows < 2 || cols < 2)
            throw std::domain_error("SurfaceData: need at least a 2 x 2 grid");
        if (points.size() != static_cast<size_t>(rows) * cols)
            throw std::domain_error("SurfaceData: point count does not match grid");
    }
};

enum class ParametrizationMethod { equidistant, chord_length };

/// Clamped knot vector: first and last degree+1 knots pinned to 0 and 1.
struct KnotVector {
    int degree = 0;
    std::vector<double> knots;

    int control_count() const { return static_cast<int>(knots.size()) - degree - 1; }
};

/// Tensor-product B-spline surface r(u,v) = sum_ij N_{i,p}(u) N_{j,q}(v) r_ij.
struct BSplineSurface {
    KnotVector knots_u;
    KnotVector knots_v;
    std::vector<Point3> control_net;  ///< row-major, rows along u

    int rows() const { return knots_u.control_count(); }
    int cols() const { return knots_v.control_count(); }
    const Point3& control(int r, int c) const { return control_net[static_cast<size_t>(r) * cols() + c]; }
};

struct SurfaceParams {
    std::vector<double> u;  ///< length rows, strictly increasing, 0..1
    std::vector<double> v;  ///< length cols
};

/// Data-point parameters: uniform for equidistant, grid-averaged normalized
/// cumulative chords for chord_length.
SurfaceParams parametrize(const SurfaceData& data, ParametrizationMethod method);

/// Knot averaging over the parameters: interior knot t_{j+p} is the mean of p
/// consecutive parameters, ends clamped. Guarantees a banded, invertible
/// collocation matrix for strictly increasing parameters.
KnotVector averaging_knots(const std::vector<double>& params, int degree);

/// Single Cox-de Boor basis value N_{i,p}(u). At u == 1 the last basis
/// function evaluates to 1 (closed right end).
double basis(int i, int p, double u, const KnotVector& knots);

/// Global interpolation: banded collocation solves along rows, then columns.
/// The fitted surface reproduces every data point at its parameter pair.
BSplineSurface fit_surface(const SurfaceData& data, int degree_u, int degree_v,
                           ParametrizationMethod method = ParametrizationMethod::chord_length);

/// Surface point at (u, v) in [0,1]^2, evaluated with local support.
Point3 eval_surface(const BSplineSurface& surface, double u, double v);

/// Accuracy-test surface z = x^3 + y^3 + x^2 y - x y^2.
double cubic_test_surface(double x, double y);

/// Constant-height slice: sample z(u,v) on a resolution^2 lattice, extract the
/// z == z_level iso-lines, and map vertices back through (x(u,v), y(u,v)).
/// Empty when the surface never attains z_level on the lattice.
std::vector<Contour> surface_slice(const BSplineSurface& surface, double z_level, int resolution = 128);

}  // namespace evoset

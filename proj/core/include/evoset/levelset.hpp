#pragma once

#include <array>
#include <functional>

#include "evoset/grid.hpp"

namespace evoset {

using Point2 = std::array<double, 2>;

/// Ordered polyline of refined level-set points for one (s, c) pair.
struct Contour {
    double s = 0.0;
    double c = 0.0;
    std::vector<Point2> points;
    bool closed = false;
};

struct GridIndex {
    int i, j;
    bool operator==(const GridIndex&) const = default;
};

/// Which side of the level gets marked: `above` marks points with value >= c
/// next to a strictly lower neighbor, `below` the mirror image. The two cover
/// the inequality orientations of the grid walk.
enum class BoundaryOrientation { above, below };

struct VelocityEstimate {
    Point2 base_point;
    double normal_speed;      ///< parameter units per unit s, signed along normal_direction
    Point2 normal_direction;  ///< unit vector -grad(theta)/|grad(theta)|
};

struct VelocityField {
    std::vector<VelocityEstimate> estimates;
    int skipped_low_gradient = 0;  ///< vertices under the gradient floor
    int skipped_no_intersection = 0;
};

struct ResidualStats {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    int count = 0;
};

/// Evaluate an EVO function at every grid node; exactly n_a * n_b calls.
/// Evaluator failures (throw or non-finite result) abort with the offending
/// coordinates in the message. n_threads > 1 splits rows across threads; the
/// evaluator must then be safe for concurrent calls. Output is identical for
/// any thread count.
ScalarField sample_field(const std::function<double(double, double)>& evaluator,
                         const ParameterGrid& grid, double s, int n_threads = 1);

/// Grid-walk marking of level-set member points: a node is marked when it and
/// a horizontal or vertical neighbor straddle c. Returns indices sorted by
/// (i, j). Empty result means the level does not intersect the sampled range.
std::vector<GridIndex> mark_boundary_points(const ScalarField& field, double c,
                                            BoundaryOrientation orientation = BoundaryOrientation::above);

/// Sub-cell refinement: inverse linear interpolation on every cell edge whose
/// endpoints straddle c, linked into ordered polylines. Nodes exactly equal
/// to c are perturbed by +1e-12*|c| (or +1e-12 when c == 0); saddle cells are
/// resolved by the cell-average rule.
std::vector<Contour> refine_contour(const ScalarField& field, double c);

/// Normal velocity of each frame_lo vertex: direction -grad(theta)/|grad| on
/// the lo field, speed the signed distance along that line to the nearest
/// frame_hi intersection divided by ds = field_hi.s - field_lo.s. Vertices
/// with |grad| below 1e-10 are skipped and counted.
VelocityField normal_velocity(const std::vector<Contour>& frame_lo, const ScalarField& field_lo,
                              const std::vector<Contour>& frame_hi, const ScalarField& field_hi);

/// Level-set advection residual d_s(theta) + u . grad(theta) at every velocity
/// base point, with centered differences in s across the three frames.
ResidualStats advection_residual(const ScalarField& field_lo, const ScalarField& field_mid,
                                 const ScalarField& field_hi, const VelocityField& velocities);

/// Bilinear interpolation of the field (and of its node-gradient) at an
/// arbitrary in-bounds point. Shared by the velocity and residual passes.
double interpolate_field(const ScalarField& field, const Point2& p);
Point2 interpolate_gradient(const ScalarField& field, const Point2& p);

}  // namespace evoset

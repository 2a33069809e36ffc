#pragma once

#include <filesystem>
#include <string>

#include "evoset/bspline.hpp"
#include "evoset/inversion.hpp"
#include "evoset/levelset.hpp"

namespace evoset::io {

/// Unreadable or malformed input file.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Decimal with 17 significant digits; round-trips binary64 exactly.
std::string format_double(double v);

/// Atomic file write: content goes to a temp sibling, then renamed over the
/// target, so failures never leave partial output.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// field CSV: `# key=value` preamble (bounds, counts, s), header a,b,value,
// rows in a-major order
std::string field_to_csv(const ScalarField& field);
ScalarField field_from_csv(const std::string& text);
void write_field_csv(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_field_csv(const std::filesystem::path& path);

// contour JSON: {"s":..., "c":..., "contours":[{"closed":..., "points":[[a,b],...]},...]}
std::string contours_to_json(double s, double c, const std::vector<Contour>& contours);
std::vector<Contour> contours_from_json(const std::string& text);
void write_contours_json(const std::filesystem::path& path, double s, double c,
                         const std::vector<Contour>& contours);
std::vector<Contour> read_contours_json(const std::filesystem::path& path);

// surface JSON: {degree_u, degree_v, knots_u, knots_v, control_net}; the net
// is row-major [x,y,z] triples and the grid shape is implied by the knots
std::string surface_to_json(const BSplineSurface& surface);
BSplineSurface surface_from_json(const std::string& text);
void write_surface_json(const std::filesystem::path& path, const BSplineSurface& surface);
BSplineSurface read_surface_json(const std::filesystem::path& path);

// trajectory CSV: header s,omega,epsilon; `#` comment lines ignored
DriftTrajectory trajectory_from_csv(const std::string& text);
DriftTrajectory read_trajectory_csv(const std::filesystem::path& path);

// schedule JSON: {"d_target":..., "entries":[{s,b,achieved_d,residual,status},...]}
std::string schedule_to_json(double d_target, const CorrectionSchedule& schedule);
void write_schedule_json(const std::filesystem::path& path, double d_target,
                         const CorrectionSchedule& schedule);

/// Static SVG plot of contour polylines over the grid box.
std::string contours_to_svg(const ParameterGrid& box, const std::vector<Contour>& contours);
void write_contours_svg(const std::filesystem::path& path, const ParameterGrid& box,
                        const std::vector<Contour>& contours);

}  // namespace evoset::io

#include "evoset/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace evoset {

namespace {

[[noreturn]] void evaluator_failure(double a, double b, const char* what) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "sample_field: evaluator failed at (a=" << a << ", b=" << b << "): " << what;
    throw std::runtime_error(msg.str());
}

void sample_rows(const std::function<double(double, double)>& evaluator, const ParameterGrid& grid,
                 int i_begin, int i_end, std::vector<double>& values) {
    for (int i = i_begin; i < i_end; ++i) {
        const double a = grid.a_at(i);
        for (int j = 0; j < grid.n_b; ++j) {
            const double b = grid.b_at(j);
            double v;
            try {
                v = evaluator(a, b);
            } catch (const std::exception& e) {
                evaluator_failure(a, b, e.what());
            }
            if (!std::isfinite(v)) evaluator_failure(a, b, "non-finite value");
            values[static_cast<size_t>(i) * grid.n_b + j] = v;
        }
    }
}

}  // namespace

ScalarField sample_field(const std::function<double(double, double)>& evaluator,
                         const ParameterGrid& grid, double s, int n_threads) {
    grid.validate();
    if (!evaluator) throw std::invalid_argument("sample_field: empty evaluator");

    ScalarField field;
    field.grid = grid;
    field.s = s;
    field.values.resize(static_cast<size_t>(grid.n_a) * grid.n_b);

    n_threads = std::clamp(n_threads, 1, grid.n_a);
    if (n_threads == 1) {
        sample_rows(evaluator, grid, 0, grid.n_a, field.values);
        return field;
    }

    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(n_threads);
    const int chunk = (grid.n_a + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(grid.n_a, lo + chunk);
        workers.emplace_back([&, t, lo, hi] {
            try {
                sample_rows(evaluator, grid, lo, hi, field.values);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return field;
}

namespace {

// Nodes exactly on the level are nudged to the positive side so that cell
// topology stays non-degenerate.
inline double perturbed(double v, double c) {
    if (v == c) return c + (c == 0.0 ? 1e-12 : 1e-12 * std::abs(c));
    return v;
}

}  // namespace

std::vector<GridIndex> mark_boundary_points(const ScalarField& field, double c,
                                            BoundaryOrientation orientation) {
    field.validate();
    const int na = field.grid.n_a;
    const int nb = field.grid.n_b;

    const auto member = [&](double v) {
        return orientation == BoundaryOrientation::above ? v >= c : v <= c;
    };
    const auto strictly_outside = [&](double v) {
        return orientation == BoundaryOrientation::above ? v < c : v > c;
    };

    std::vector<GridIndex> marked;
    for (int i = 0; i < na; ++i) {
        for (int j = 0; j < nb; ++j) {
            if (!member(field.at(i, j))) continue;
            const bool straddles =
                (i > 0 && strictly_outside(field.at(i - 1, j))) ||
                (i + 1 < na && strictly_outside(field.at(i + 1, j))) ||
                (j > 0 && strictly_outside(field.at(i, j - 1))) ||
                (j + 1 < nb && strictly_outside(field.at(i, j + 1)));
            if (straddles) marked.push_back({i, j});
        }
    }
    return marked;
}

namespace {

// Grid edges keyed by (axis, i, j): axis 0 runs along a from node (i,j) to
// (i+1,j), axis 1 along b to (i,j+1).
int64_t edge_key(int axis, int i, int j, int nb) {
    return (static_cast<int64_t>(axis) * (1LL << 31) + i) * nb + j;
}

struct ContourBuilder {
    const ScalarField& field;
    double c;
    std::unordered_map<int64_t, int> edge_vertex;
    std::vector<Point2> positions;
    std::vector<std::vector<int>> adjacency;

    int vertex_on_edge(int axis, int i, int j) {
        const int64_t key = edge_key(axis, i, j, field.grid.n_b);
        if (auto it = edge_vertex.find(key); it != edge_vertex.end()) return it->second;

        const double v1 = perturbed(field.at(i, j), c);
        const double v2 = perturbed(axis == 0 ? field.at(i + 1, j) : field.at(i, j + 1), c);
        const double t = (c - v1) / (v2 - v1);
        Point2 p{field.grid.a_at(i), field.grid.b_at(j)};
        if (axis == 0)
            p[0] += t * field.grid.spacing_a();
        else
            p[1] += t * field.grid.spacing_b();

        const int id = static_cast<int>(positions.size());
        positions.push_back(p);
        adjacency.emplace_back();
        edge_vertex.emplace(key, id);
        return id;
    }

    void add_segment(int v1, int v2) {
        adjacency[v1].push_back(v2);
        adjacency[v2].push_back(v1);
    }
};

}  // namespace

std::vector<Contour> refine_contour(const ScalarField& field, double c) {
    field.validate();
    const int na = field.grid.n_a;
    const int nb = field.grid.n_b;

    ContourBuilder builder{field, c, {}, {}, {}};

    for (int i = 0; i + 1 < na; ++i) {
        for (int j = 0; j + 1 < nb; ++j) {
            const bool s00 = perturbed(field.at(i, j), c) > c;
            const bool s10 = perturbed(field.at(i + 1, j), c) > c;
            const bool s01 = perturbed(field.at(i, j + 1), c) > c;
            const bool s11 = perturbed(field.at(i + 1, j + 1), c) > c;

            // local edges: 0 bottom (b_j), 1 right (a_{i+1}), 2 top (b_{j+1}), 3 left (a_i)
            int crossed[4];
            int n_crossed = 0;
            if (s00 != s10) crossed[n_crossed++] = 0;
            if (s10 != s11) crossed[n_crossed++] = 1;
            if (s01 != s11) crossed[n_crossed++] = 2;
            if (s00 != s01) crossed[n_crossed++] = 3;
            if (n_crossed == 0) continue;

            const auto vertex_of = [&](int local_edge) {
                switch (local_edge) {
                    case 0: return builder.vertex_on_edge(0, i, j);
                    case 1: return builder.vertex_on_edge(1, i + 1, j);
                    case 2: return builder.vertex_on_edge(0, i, j + 1);
                    default: return builder.vertex_on_edge(1, i, j);
                }
            };

            if (n_crossed == 2) {
                builder.add_segment(vertex_of(crossed[0]), vertex_of(crossed[1]));
            } else {
                // saddle: both diagonals alternate; pair edges around whichever
                // corners the cell-average rule isolates
                const double avg = 0.25 * (field.at(i, j) + field.at(i + 1, j) +
                                           field.at(i, j + 1) + field.at(i + 1, j + 1));
                const bool center_with_00 = (avg > c) == s00;
                if (center_with_00) {
                    builder.add_segment(vertex_of(0), vertex_of(1));  // around corner 10
                    builder.add_segment(vertex_of(2), vertex_of(3));  // around corner 01
                } else {
                    builder.add_segment(vertex_of(0), vertex_of(3));  // around corner 00
                    builder.add_segment(vertex_of(1), vertex_of(2));  // around corner 11
                }
            }
        }
    }

    const int n_vertices = static_cast<int>(builder.positions.size());
    std::vector<bool> visited(n_vertices, false);
    std::vector<Contour> contours;

    const auto walk = [&](int start, bool closed) {
        Contour contour;
        contour.s = field.s;
        contour.c = c;
        contour.closed = closed;
        int prev = -1;
        int cur = start;
        while (true) {
            visited[cur] = true;
            if (contour.points.empty() || contour.points.back() != builder.positions[cur])
                contour.points.push_back(builder.positions[cur]);
            int next = -1;
            for (int nb_id : builder.adjacency[cur]) {
                if (nb_id == prev) continue;
                if (closed && nb_id == start) continue;  // loop complete
                if (!visited[nb_id]) {
                    next = nb_id;
                    break;
                }
            }
            if (next == -1) break;
            prev = cur;
            cur = next;
        }
        contours.push_back(std::move(contour));
    };

    // open chains start at boundary (degree-1) vertices
    for (int v = 0; v < n_vertices; ++v)
        if (!visited[v] && builder.adjacency[v].size() == 1) walk(v, false);
    // what remains are closed loops
    for (int v = 0; v < n_vertices; ++v)
        if (!visited[v] && !builder.adjacency[v].empty()) walk(v, true);

    return contours;
}

double interpolate_field(const ScalarField& field, const Point2& p) {
    const auto& g = field.grid;
    const double ha = g.spacing_a();
    const double hb = g.spacing_b();
    int ci = static_cast<int>(std::floor((p[0] - g.a_min) / ha));
    int cj = static_cast<int>(std::floor((p[1] - g.b_min) / hb));
    ci = std::clamp(ci, 0, g.n_a - 2);
    cj = std::clamp(cj, 0, g.n_b - 2);
    const double ta = (p[0] - g.a_at(ci)) / ha;
    const double tb = (p[1] - g.b_at(cj)) / hb;
    return (1 - ta) * (1 - tb) * field.at(ci, cj) + ta * (1 - tb) * field.at(ci + 1, cj) +
           (1 - ta) * tb * field.at(ci, cj + 1) + ta * tb * field.at(ci + 1, cj + 1);
}

namespace {

// centered differences inside, one-sided on the border
Point2 node_gradient(const ScalarField& field, int i, int j) {
    const auto& g = field.grid;
    const double ha = g.spacing_a();
    const double hb = g.spacing_b();
    double ga, gb;
    if (i == 0)
        ga = (field.at(1, j) - field.at(0, j)) / ha;
    else if (i == g.n_a - 1)
        ga = (field.at(i, j) - field.at(i - 1, j)) / ha;
    else
        ga = (field.at(i + 1, j) - field.at(i - 1, j)) / (2.0 * ha);
    if (j == 0)
        gb = (field.at(i, 1) - field.at(i, 0)) / hb;
    else if (j == g.n_b - 1)
        gb = (field.at(i, j) - field.at(i, j - 1)) / hb;
    else
        gb = (field.at(i, j + 1) - field.at(i, j - 1)) / (2.0 * hb);
    return {ga, gb};
}

}  // namespace

Point2 interpolate_gradient(const ScalarField& field, const Point2& p) {
    const auto& g = field.grid;
    const double ha = g.spacing_a();
    const double hb = g.spacing_b();
    int ci = static_cast<int>(std::floor((p[0] - g.a_min) / ha));
    int cj = static_cast<int>(std::floor((p[1] - g.b_min) / hb));
    ci = std::clamp(ci, 0, g.n_a - 2);
    cj = std::clamp(cj, 0, g.n_b - 2);
    const double ta = (p[0] - g.a_at(ci)) / ha;
    const double tb = (p[1] - g.b_at(cj)) / hb;

    const Point2 g00 = node_gradient(field, ci, cj);
    const Point2 g10 = node_gradient(field, ci + 1, cj);
    const Point2 g01 = node_gradient(field, ci, cj + 1);
    const Point2 g11 = node_gradient(field, ci + 1, cj + 1);

    Point2 out{};
    for (int k = 0; k < 2; ++k)
        out[k] = (1 - ta) * (1 - tb) * g00[k] + ta * (1 - tb) * g10[k] +
                 (1 - ta) * tb * g01[k] + ta * tb * g11[k];
    return out;
}

namespace {

constexpr double kGradientFloor = 1e-10;

// Signed parameter t of the intersection of the line p + t*dir with the
// segment [q1, q2]; NaN when they do not meet.
double line_segment_intersection(const Point2& p, const Point2& dir, const Point2& q1,
                                 const Point2& q2) {
    const double ex = q2[0] - q1[0];
    const double ey = q2[1] - q1[1];
    const double mx = q1[0] - p[0];
    const double my = q1[1] - p[1];
    const double denom = dir[0] * ey - dir[1] * ex;
    if (std::abs(denom) < 1e-300) return std::numeric_limits<double>::quiet_NaN();
    const double u = (mx * dir[1] - my * dir[0]) / denom;
    if (u < -1e-12 || u > 1.0 + 1e-12) return std::numeric_limits<double>::quiet_NaN();
    return (mx * ey - my * ex) / denom;
}

}  // namespace

VelocityField normal_velocity(const std::vector<Contour>& frame_lo, const ScalarField& field_lo,
                              const std::vector<Contour>& frame_hi, const ScalarField& field_hi) {
    field_lo.validate();
    field_hi.validate();
    if (!(field_lo.grid == field_hi.grid))
        throw std::invalid_argument("normal_velocity: frames must share the grid");
    const double ds = field_hi.s - field_lo.s;
    if (!(ds > 0.0)) throw std::invalid_argument("normal_velocity: need field_hi.s > field_lo.s");
    for (const auto& lo : frame_lo)
        for (const auto& hi : frame_hi)
            if (lo.c != hi.c)
                throw std::invalid_argument("normal_velocity: frames must share the level value");

    VelocityField out;
    for (const auto& contour : frame_lo) {
        for (const auto& p : contour.points) {
            const Point2 grad = interpolate_gradient(field_lo, p);
            const double mag = std::hypot(grad[0], grad[1]);
            if (mag < kGradientFloor) {
                ++out.skipped_low_gradient;
                continue;
            }
            const Point2 dir{-grad[0] / mag, -grad[1] / mag};

            double best_t = std::numeric_limits<double>::quiet_NaN();
            for (const auto& target : frame_hi) {
                const size_t n = target.points.size();
                if (n < 2) continue;
                const size_t n_segments = target.closed ? n : n - 1;
                for (size_t k = 0; k < n_segments; ++k) {
                    const Point2& q1 = target.points[k];
                    const Point2& q2 = target.points[(k + 1) % n];
                    const double t = line_segment_intersection(p, dir, q1, q2);
                    if (std::isnan(t)) continue;
                    if (std::isnan(best_t) || std::abs(t) < std::abs(best_t)) best_t = t;
                }
            }
            if (std::isnan(best_t)) {
                ++out.skipped_no_intersection;
                continue;
            }
            out.estimates.push_back({p, best_t / ds, dir});
        }
    }
    return out;
}

ResidualStats advection_residual(const ScalarField& field_lo, const ScalarField& field_mid,
                                 const ScalarField& field_hi, const VelocityField& velocities) {
    field_lo.validate();
    field_mid.validate();
    field_hi.validate();
    if (!(field_lo.grid == field_mid.grid) || !(field_mid.grid == field_hi.grid))
        throw std::invalid_argument("advection_residual: frames must share the grid");
    const double ds_lo = field_mid.s - field_lo.s;
    const double ds_hi = field_hi.s - field_mid.s;
    if (!(ds_lo > 0.0) || std::abs(ds_hi - ds_lo) > 1e-9 * std::max(ds_lo, ds_hi))
        throw std::invalid_argument("advection_residual: frames must be uniformly spaced in s");

    ResidualStats stats;
    double sum = 0.0;
    for (const auto& est : velocities.estimates) {
        const double dtheta_ds =
            (interpolate_field(field_hi, est.base_point) - interpolate_field(field_lo, est.base_point)) /
            (2.0 * ds_lo);
        const Point2 grad = interpolate_gradient(field_mid, est.base_point);
        const double advect = est.normal_speed * (est.normal_direction[0] * grad[0] +
                                                  est.normal_direction[1] * grad[1]);
        const double r = std::abs(dtheta_ds + advect);
        stats.max_abs = std::max(stats.max_abs, r);
        sum += r;
        ++stats.count;
    }
    stats.mean_abs = stats.count > 0 ? sum / stats.count : 0.0;
    return stats;
}

}  // namespace evoset

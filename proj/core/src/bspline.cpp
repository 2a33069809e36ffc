#include "evoset/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evoset {

SurfaceParams parametrize(const SurfaceData& data, ParametrizationMethod method) {
    data.validate();
    const int m = data.rows;
    const int n = data.cols;

    SurfaceParams params;
    params.u.assign(m, 0.0);
    params.v.assign(n, 0.0);

    if (method == ParametrizationMethod::equidistant) {
        for (int k = 0; k < m; ++k) params.u[k] = static_cast<double>(k) / (m - 1);
        for (int l = 0; l < n; ++l) params.v[l] = static_cast<double>(l) / (n - 1);
        return params;
    }

    // chord length, averaged across the grid (rows for v, columns for u)
    const auto chord = [](const Point3& p, const Point3& q) {
        return std::hypot(q[0] - p[0], q[1] - p[1], q[2] - p[2]);
    };

    for (int l = 0; l < n; ++l) {
        std::vector<double> cum(m, 0.0);
        for (int k = 1; k < m; ++k) {
            const double d = chord(data.at(k - 1, l), data.at(k, l));
            if (d == 0.0)
                throw std::domain_error("parametrize: coincident adjacent grid points (zero chord)");
            cum[k] = cum[k - 1] + d;
        }
        for (int k = 0; k < m; ++k) params.u[k] += cum[k] / cum[m - 1];
    }
    for (int k = 0; k < m; ++k) params.u[k] /= n;

    for (int k = 0; k < m; ++k) {
        std::vector<double> cum(n, 0.0);
        for (int l = 1; l < n; ++l) {
            const double d = chord(data.at(k, l - 1), data.at(k, l));
            if (d == 0.0)
                throw std::domain_error("parametrize: coincident adjacent grid points (zero chord)");
            cum[l] = cum[l - 1] + d;
        }
        for (int l = 0; l < n; ++l) params.v[l] += cum[l] / cum[n - 1];
    }
    for (int l = 0; l < n; ++l) params.v[l] /= m;

    // exact endpoints despite rounding in the averages
    params.u.front() = 0.0;
    params.u.back() = 1.0;
    params.v.front() = 0.0;
    params.v.back() = 1.0;
    return params;
}

KnotVector averaging_knots(const std::vector<double>& params, int degree) {
    const int m = static_cast<int>(params.size());
    if (degree < 1) throw std::domain_error("averaging_knots: degree must be >= 1");
    if (m <= degree)
        throw std::domain_error("averaging_knots: need more parameters than the degree");
    for (int k = 1; k < m; ++k)
        if (!(params[k] > params[k - 1]))
            throw std::domain_error("averaging_knots: parameters must be strictly increasing");

    KnotVector kv;
    kv.degree = degree;
    kv.knots.assign(m + degree + 1, 0.0);
    for (int k = 0; k <= degree; ++k) kv.knots[m + k] = 1.0;
    for (int j = 1; j <= m - 1 - degree; ++j) {
        double sum = 0.0;
        for (int i = j; i < j + degree; ++i) sum += params[i];
        kv.knots[j + degree] = sum / degree;
    }
    return kv;
}

namespace {

// Left knot index of the span containing u; at u == 1 the last nonempty span.
int find_span(double u, const KnotVector& kv) {
    const int p = kv.degree;
    const int n_ctrl = kv.control_count();
    if (u >= kv.knots[n_ctrl]) return n_ctrl - 1;
    if (u <= kv.knots[p]) return p;
    int lo = p, hi = n_ctrl;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (u < kv.knots[mid] ? hi : lo) = mid;
    }
    return lo;
}

// The p+1 nonzero basis values N_{span-p..span,p}(u), triangular scheme.
void basis_row(int span, double u, const KnotVector& kv, std::vector<double>& out) {
    const int p = kv.degree;
    out.assign(p + 1, 0.0);
    out[0] = 1.0;
    std::vector<double> left(p + 1), right(p + 1);
    for (int j = 1; j <= p; ++j) {
        left[j] = u - kv.knots[span + 1 - j];
        right[j] = kv.knots[span + j] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = out[r] / (right[r + 1] + left[j - r]);
            out[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        out[j] = saved;
    }
}

double basis_recursive(int i, int p, double u, const std::vector<double>& t) {
    if (p == 0) {
        if (t[i] <= u && u < t[i + 1]) return 1.0;
        // closed right end: the last nonempty span owns u == t.back()
        if (u == t.back() && t[i] < t[i + 1] && t[i + 1] == t.back()) return 1.0;
        return 0.0;
    }
    double acc = 0.0;
    const double den1 = t[i + p] - t[i];
    if (den1 > 0.0) acc += (u - t[i]) / den1 * basis_recursive(i, p - 1, u, t);
    const double den2 = t[i + p + 1] - t[i + 1];
    if (den2 > 0.0) acc += (t[i + p + 1] - u) / den2 * basis_recursive(i + 1, p - 1, u, t);
    return acc;
}

}  // namespace

double basis(int i, int p, double u, const KnotVector& knots) {
    if (u < 0.0 || u > 1.0) throw std::domain_error("basis: parameter outside [0,1]");
    if (p < 0) throw std::domain_error("basis: negative degree");
    if (i < 0 || i + p + 1 >= static_cast<int>(knots.knots.size()))
        throw std::out_of_range("basis: index out of range for the knot vector");
    return basis_recursive(i, p, u, knots.knots);
}

namespace {

// Banded Gaussian elimination with partial pivoting. Row i stores columns
// [i - kl, i + kl + ku]; the extra kl on the right absorbs pivot fill.
class BandedLU {
public:
    BandedLU(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), width_(2 * kl + ku + 1),
          store_(static_cast<size_t>(n) * width_, 0.0), pivots_(n) {}

    double& at(int i, int j) { return store_[static_cast<size_t>(i) * width_ + (j - i + kl_)]; }
    double get(int i, int j) const {
        const int off = j - i + kl_;
        if (off < 0 || off >= width_) return 0.0;
        return store_[static_cast<size_t>(i) * width_ + off];
    }

    void factor() {
        for (int k = 0; k < n_; ++k) {
            const int r_max = std::min(n_ - 1, k + kl_);
            int piv = k;
            for (int r = k + 1; r <= r_max; ++r)
                if (std::abs(get(r, k)) > std::abs(get(piv, k))) piv = r;
            pivots_[k] = piv;
            const int j_max = std::min(n_ - 1, k + kl_ + ku_);
            if (piv != k)
                for (int j = k; j <= j_max; ++j) std::swap(at(k, j), at(piv, j));
            const double d = get(k, k);
            if (d == 0.0) throw std::runtime_error("BandedLU: singular matrix");
            for (int r = k + 1; r <= r_max; ++r) {
                const double f = get(r, k) / d;
                at(r, k) = f;  // store the multiplier in place
                for (int j = k + 1; j <= j_max; ++j) at(r, j) -= f * get(k, j);
            }
        }
    }

    void solve(std::vector<double>& rhs) const {
        for (int k = 0; k < n_; ++k) {
            if (pivots_[k] != k) std::swap(rhs[k], rhs[pivots_[k]]);
            const int r_max = std::min(n_ - 1, k + kl_);
            for (int r = k + 1; r <= r_max; ++r) rhs[r] -= get(r, k) * rhs[k];
        }
        for (int i = n_ - 1; i >= 0; --i) {
            const int j_max = std::min(n_ - 1, i + kl_ + ku_);
            double acc = rhs[i];
            for (int j = i + 1; j <= j_max; ++j) acc -= get(i, j) * rhs[j];
            rhs[i] = acc / get(i, i);
        }
    }

private:
    int n_, kl_, ku_, width_;
    std::vector<double> store_;
    std::vector<int> pivots_;
};

struct Collocation {
    KnotVector knots;
    std::vector<int> spans;               // span per parameter
    std::vector<std::vector<double>> rows;  // p+1 basis values per parameter
    BandedLU lu;

    Collocation(const std::vector<double>& params, int degree)
        : knots(averaging_knots(params, degree)),
          lu(static_cast<int>(params.size()), degree, degree) {
        const int m = static_cast<int>(params.size());
        const int p = degree;
        spans.resize(m);
        rows.resize(m);
        for (int k = 0; k < m; ++k) {
            spans[k] = find_span(params[k], knots);
            basis_row(spans[k], params[k], knots, rows[k]);
            if (spans[k] < k || spans[k] > k + p)
                throw std::runtime_error("fit_surface: collocation bandwidth violated");
            for (int r = 0; r <= p; ++r) lu.at(k, spans[k] - p + r) = rows[k][r];
        }
        lu.factor();
    }

    // solve A x = b and verify the back-substitution residual
    std::vector<double> solve_checked(const std::vector<double>& b) const {
        std::vector<double> x = b;
        lu.solve(x);
        const int m = static_cast<int>(b.size());
        const int p = knots.degree;
        double bmax = 0.0;
        for (double v : b) bmax = std::max(bmax, std::abs(v));
        for (int k = 0; k < m; ++k) {
            double ax = 0.0;
            for (int r = 0; r <= p; ++r) ax += rows[k][r] * x[spans[k] - p + r];
            if (std::abs(ax - b[k]) > 1e-12 * (1.0 + bmax))
                throw std::runtime_error("fit_surface: back-substitution residual above tolerance");
        }
        return x;
    }
};

}  // namespace

BSplineSurface fit_surface(const SurfaceData& data, int degree_u, int degree_v,
                           ParametrizationMethod method) {
    data.validate();
    if (data.rows <= degree_u || data.cols <= degree_v)
        throw std::domain_error("fit_surface: grid must exceed the degrees (m > p, n > q)");

    const SurfaceParams params = parametrize(data, method);
    const Collocation coll_u(params.u, degree_u);
    const Collocation coll_v(params.v, degree_v);

    const int m = data.rows;
    const int n = data.cols;

    // stage 1: interpolate down the columns (u direction)
    std::vector<Point3> intermediate(static_cast<size_t>(m) * n);
    for (int l = 0; l < n; ++l) {
        for (int comp = 0; comp < 3; ++comp) {
            std::vector<double> rhs(m);
            for (int k = 0; k < m; ++k) rhs[k] = data.at(k, l)[comp];
            const std::vector<double> sol = coll_u.solve_checked(rhs);
            for (int k = 0; k < m; ++k) intermediate[static_cast<size_t>(k) * n + l][comp] = sol[k];
        }
    }

    // stage 2: interpolate across the rows (v direction)
    BSplineSurface surface;
    surface.knots_u = coll_u.knots;
    surface.knots_v = coll_v.knots;
    surface.control_net.resize(static_cast<size_t>(m) * n);
    for (int k = 0; k < m; ++k) {
        for (int comp = 0; comp < 3; ++comp) {
            std::vector<double> rhs(n);
            for (int l = 0; l < n; ++l) rhs[l] = intermediate[static_cast<size_t>(k) * n + l][comp];
            const std::vector<double> sol = coll_v.solve_checked(rhs);
            for (int l = 0; l < n; ++l) surface.control_net[static_cast<size_t>(k) * n + l][comp] = sol[l];
        }
    }
    return surface;
}

Point3 eval_surface(const BSplineSurface& surface, double u, double v) {
    if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0)
        throw std::domain_error("eval_surface: parameters outside [0,1]^2");
    const int p = surface.knots_u.degree;
    const int q = surface.knots_v.degree;
    const int span_u = find_span(u, surface.knots_u);
    const int span_v = find_span(v, surface.knots_v);
    std::vector<double> nu, nv;
    basis_row(span_u, u, surface.knots_u, nu);
    basis_row(span_v, v, surface.knots_v, nv);

    Point3 out{0.0, 0.0, 0.0};
    for (int a = 0; a <= p; ++a) {
        const int row = span_u - p + a;
        for (int b = 0; b <= q; ++b) {
            const int col = span_v - q + b;
            const double w = nu[a] * nv[b];
            const Point3& cp = surface.control(row, col);
            out[0] += w * cp[0];
            out[1] += w * cp[1];
            out[2] += w * cp[2];
        }
    }
    return out;
}

double cubic_test_surface(double x, double y) {
    return x * x * x + y * y * y + x * x * y - x * y * y;
}

std::vector<Contour> surface_slice(const BSplineSurface& surface, double z_level, int resolution) {
    if (resolution < 8) throw std::domain_error("surface_slice: resolution must be >= 8");

    ScalarField height;
    height.grid = ParameterGrid{0.0, 1.0, 0.0, 1.0, resolution, resolution};
    height.s = 0.0;
    height.values.resize(static_cast<size_t>(resolution) * resolution);
    for (int i = 0; i < resolution; ++i) {
        const double u = height.grid.a_at(i);
        for (int j = 0; j < resolution; ++j) {
            const double v = height.grid.b_at(j);
            height.at(i, j) = eval_surface(surface, u, v)[2];
        }
    }

    std::vector<Contour> slices = refine_contour(height, z_level);
    for (auto& contour : slices) {
        for (auto& pt : contour.points) {
            const Point3 r = eval_surface(surface, pt[0], pt[1]);
            pt = {r[0], r[1]};
        }
    }
    return slices;
}

}  // namespace evoset

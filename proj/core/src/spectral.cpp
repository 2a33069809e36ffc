#include "evoset/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace evoset {

bool Matrix::is_symmetric(double tol) const {
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

Matrix build_hamiltonian_matrix(const OscillatorPoint& point, const BasisSpec& basis,
                                const PhysicalConstants& consts) {
    point.validate();
    basis.validate();
    consts.validate();

    const int n = basis.n_basis;
    const double wr = basis.ladder_frequency(point);
    const double hbar = consts.hbar;

    // Ladder matrix elements in the omega_ref basis:
    //   x    : (n, n+1) = sqrt(hbar (n+1) / (2 m wr))
    //   x^2  : diag (2n+1), (n, n+2) sqrt((n+1)(n+2)), both times hbar/(2 m wr)
    //   p^2  : diag (2n+1), (n, n+2) -sqrt((n+1)(n+2)), both times hbar m wr / 2
    const double kin = 0.25 * hbar * wr;  // p^2/(2m) coefficient
    const double pot = 0.25 * hbar * point.omega * point.omega * (1.0 + point.epsilon) / wr;
    const double lin = point.b * std::sqrt(hbar / (2.0 * consts.mass * wr));

    Matrix h(n);
    for (int i = 0; i < n; ++i) {
        h(i, i) = (2.0 * i + 1.0) * (kin + pot);
        if (i + 1 < n) {
            const double x1 = lin * std::sqrt(i + 1.0);
            h(i, i + 1) = x1;
            h(i + 1, i) = x1;
        }
        if (i + 2 < n) {
            const double x2 = (pot - kin) * std::sqrt((i + 1.0) * (i + 2.0));
            h(i, i + 2) = x2;
            h(i + 2, i) = x2;
        }
    }
    return h;
}

Matrix build_position_matrix(int n_basis, double omega_ref, const PhysicalConstants& consts) {
    consts.validate();
    if (n_basis < 1 || !(omega_ref > 0.0))
        throw std::domain_error("build_position_matrix: need n_basis >= 1 and omega_ref > 0");
    Matrix x(n_basis);
    const double scale = std::sqrt(consts.hbar / (2.0 * consts.mass * omega_ref));
    for (int i = 0; i + 1 < n_basis; ++i) {
        const double v = scale * std::sqrt(i + 1.0);
        x(i, i + 1) = v;
        x(i + 1, i) = v;
    }
    return x;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
    const int n = a.size();
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

}  // namespace

EigenSystem diagonalize(const Matrix& matrix) {
    const int n = matrix.size();
    if (n == 0) throw std::invalid_argument("diagonalize: empty matrix");
    if (!matrix.is_symmetric(1e-12 * (1.0 + matrix.frobenius_norm())))
        throw std::invalid_argument("diagonalize: matrix is not symmetric");

    Matrix a = matrix;
    Matrix v(n);
    for (int i = 0; i < n; ++i) v(i, i) = 1.0;

    const double norm = a.frobenius_norm();
    const double target = 1e-12 * norm;

    // Cyclic-by-row Jacobi sweeps. Each rotation zeroes one off-diagonal pair;
    // quadratic convergence sets in after a few sweeps.
    const int max_sweeps = 64;
    int sweep = 0;
    while (norm > 0.0 && off_diagonal_norm(a) > target) {
        if (++sweep > max_sweeps)
            throw std::runtime_error("diagonalize: Jacobi sweeps failed to converge");
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double theta = 0.5 * (aqq - app) / apq;
                // stable tan of the smaller rotation angle
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

    EigenSystem out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n);
    for (int k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]);
        for (int i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

namespace {

// <psi_j | X | psi_i> for eigenvector columns i, j.
double transition_element(const Matrix& x, const Matrix& vecs, int col_i, int col_j) {
    const int n = x.size();
    double acc = 0.0;
    for (int r = 0; r < n; ++r) {
        double xr = 0.0;
        // X is tridiagonal with zero diagonal
        if (r > 0) xr += x(r, r - 1) * vecs(r - 1, col_i);
        if (r + 1 < n) xr += x(r, r + 1) * vecs(r + 1, col_i);
        acc += vecs(r, col_j) * xr;
    }
    return acc;
}

double d01_at_basis(const OscillatorPoint& point, int n_basis, double omega_ref,
                    const PhysicalConstants& consts, std::vector<double>* energies_out) {
    BasisSpec b{n_basis, omega_ref};
    const Matrix h = build_hamiltonian_matrix(point, b, consts);
    const EigenSystem es = diagonalize(h);
    if (energies_out) *energies_out = es.eigenvalues;
    const Matrix x = build_position_matrix(n_basis, b.ladder_frequency(point), consts);
    return std::abs(transition_element(x, es.eigenvectors, 0, 1));
}

}  // namespace

SpectralResult exact_d01(const OscillatorPoint& point, const BasisSpec& basis,
                         const PhysicalConstants& consts) {
    point.validate();
    basis.validate();
    const double wr = basis.ladder_frequency(point);

    SpectralResult out{};
    const double coarse = d01_at_basis(point, basis.n_basis, wr, consts, &out.energies);
    const double fine = d01_at_basis(point, 2 * basis.n_basis, wr, consts, nullptr);
    out.d01_exact = fine;
    out.converged = std::abs(fine - coarse) < 1e-10;
    return out;
}

double exact_thermal(const OscillatorPoint& point, const ThermalSpec& thermal,
                     const BasisSpec& basis, const PhysicalConstants& consts) {
    point.validate();
    thermal.validate();
    basis.validate();
    consts.validate();

    int n_max = thermal.n_max;
    if (n_max == 0) {
        // same automatic rule as thermal_evo, driven by the perturbative gap
        const double gap = consts.hbar * effective_frequency(point);
        const double q = std::exp(-gap / (consts.k_boltzmann * thermal.temperature));
        n_max = 2;
        while (n_max < 512 && std::pow(q, n_max) * (1.0 - q) >= thermal.truncation_tolerance)
            ++n_max;
    }
    if (n_max >= basis.n_basis / 2)
        throw std::invalid_argument("exact_thermal: n_max must stay below n_basis / 2");

    const double wr = basis.ladder_frequency(point);
    const Matrix h = build_hamiltonian_matrix(point, basis, consts);
    const EigenSystem es = diagonalize(h);
    const Matrix x = build_position_matrix(basis.n_basis, wr, consts);

    const double kT = consts.k_boltzmann * thermal.temperature;
    const double e0 = es.eigenvalues[0];
    double z = 0.0;
    double numerator = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const double w = std::exp(-(es.eigenvalues[n] - e0) / kT);
        z += w;
        if (n < n_max)
            numerator += std::abs(transition_element(x, es.eigenvectors, n, n + 1)) * w;
    }
    return numerator / z;
}

}  // namespace evoset

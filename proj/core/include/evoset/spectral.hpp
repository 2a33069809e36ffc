#pragma once

#include <vector>

#include "evoset/constants.hpp"
#include "evoset/oscillator.hpp"

namespace evoset {

/// Dense real square matrix, row-major. Small sizes only (basis truncations).
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int n) : n_(n), data_(static_cast<size_t>(n) * n, 0.0) {}

    int size() const { return n_; }
    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * n_ + j]; }

    bool is_symmetric(double tol = 0.0) const;
    double frobenius_norm() const;

private:
    int n_ = 0;
    std::vector<double> data_;
};

/// Truncated harmonic ladder basis used to represent the Hamiltonian.
/// omega_ref == 0 selects the system omega as the ladder frequency.
struct BasisSpec {
    int n_basis = 40;
    double omega_ref = 0.0;

    void validate() const {
        if (n_basis < 4)
            throw std::domain_error("BasisSpec: n_basis must be >= 4");
        if (omega_ref < 0.0)
            throw std::domain_error("BasisSpec: omega_ref must be positive (or 0 for the system omega)");
    }

    double ladder_frequency(const OscillatorPoint& point) const {
        return omega_ref > 0.0 ? omega_ref : point.omega;
    }
};

struct EigenSystem {
    std::vector<double> eigenvalues;  ///< ascending
    Matrix eigenvectors;              ///< column k is the eigenvector of eigenvalues[k]
};

struct SpectralResult {
    std::vector<double> energies;  ///< ascending eigenvalues at the requested n_basis
    double d01_exact;              ///< |<psi_1|x|psi_0>|, refined value from the doubled basis
    bool converged;                ///< doubling n_basis moved d01_exact by < 1e-10
};

/// H = p^2/2m + (1/2) m omega^2 (1+epsilon) x^2 + b x in the ladder basis of
/// the reference frequency. Real symmetric, pentadiagonal.
Matrix build_hamiltonian_matrix(const OscillatorPoint& point, const BasisSpec& basis,
                                const PhysicalConstants& consts = {});

/// Ladder-basis position operator (the observable of all transition elements).
Matrix build_position_matrix(int n_basis, double omega_ref, const PhysicalConstants& consts = {});

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
/// 1e-12 times the matrix norm. Eigenpairs returned ascending, eigenvectors
/// orthonormal. Rejects non-symmetric input.
EigenSystem diagonalize(const Matrix& matrix);

/// Exact |<psi_1|x|psi_0>| by full diagonalization, with a convergence check
/// at the doubled basis size.
SpectralResult exact_d01(const OscillatorPoint& point, const BasisSpec& basis,
                         const PhysicalConstants& consts = {});

/// Boltzmann-weighted sum of exact |<psi_{n+1}|x|psi_n>| over exact energies.
/// Requires n_max < n_basis / 2 (the top of the spectrum is never trusted).
double exact_thermal(const OscillatorPoint& point, const ThermalSpec& thermal,
                     const BasisSpec& basis, const PhysicalConstants& consts = {});

}  // namespace evoset

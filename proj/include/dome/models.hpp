#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>

#include "dome/error.hpp"
#include "dome/inverse_eigen.hpp"
#include "dome/spectrum.hpp"

namespace dome {

struct DomeParams {
    int N = 5;
    long m = 0;
    double J = 1.0;  // rad/s

    double period() const { return 2.0 * std::numbers::pi / J; }
    TransferCapability capability() const { return classify_m(m); }
};

/// omega_n = (n-1)(N-n) m,
/// J_n = 1/2 sqrt(n(N-n-1)m + n) sqrt((n-1)(N-n)m + N-n), both in units of J.
/// m = 0 gives the uniform-spectrum line model J_n = 1/2 sqrt(n(N-n)).
template <typename Scalar = double>
TridiagonalHamiltonian<Scalar> dome_hamiltonian(const DomeParams& p) {
    if (p.N < 2) throw ValidationError("dome_hamiltonian: N must be >= 2, got " + std::to_string(p.N));
    if (p.m < 0) throw ValidationError("dome_hamiltonian: m must be non-negative");
    const long N = p.N, m = p.m;
    TridiagonalHamiltonian<Scalar> h;
    h.rate = p.J;
    h.omegas.resize(N);
    h.couplings.resize(N - 1);
    for (long n = 1; n <= N; ++n) h.omegas[n - 1] = Scalar((n - 1) * (N - n) * m);
    for (long n = 1; n < N; ++n) {
        const Scalar a = Scalar(n * (N - n - 1) * m + n);
        const Scalar b = Scalar((n - 1) * (N - n) * m + N - n);
        h.couplings[n - 1] = std::sqrt(a * b) / Scalar(2);
    }
    return h;
}

// Chain parameters for one lattice direction. A length-1 chain has no couplings.
template <typename Scalar = double>
TridiagonalHamiltonian<Scalar> dome_chain(int length, long m, double J = 1.0) {
    if (length == 1) {
        TridiagonalHamiltonian<Scalar> h;
        h.omegas = Vec<Scalar>::Zero(1);
        h.couplings.resize(0);
        h.rate = J;
        return h;
    }
    return dome_hamiltonian<Scalar>({length, m, J});
}

// Rectangular lattice whose rows and columns are independent dome chains.
// Sites are numbered row-major from 1: site(r, c) = (r-1)*cols + c.
struct Grid2D {
    int rows = 0, cols = 0;
    long m_x = 0, m_y = 0;
    double rate = 1.0;
    Eigen::VectorXd omega_x, coupling_x;  // along a row (length cols)
    Eigen::VectorXd omega_y, coupling_y;  // along a column (length rows)

    int sites() const { return rows * cols; }
    int site(int r, int c) const { return (r - 1) * cols + c; }

    // Absolute frequency omega(r, c) = omega^x_c + omega^y_r, 1-based.
    double frequency(int r, int c) const { return omega_x[c - 1] + omega_y[r - 1]; }

    Eigen::MatrixXd frequency_table() const;
    double period() const { return 2.0 * std::numbers::pi / rate; }
};

Grid2D grid_2d(int rows, int cols, long m_x, long m_y, double J = 1.0);

/// Flattened single-excitation operator of the lattice (dimension rows*cols),
/// row-major site order.
Eigen::MatrixXd single_excitation_matrix(const Grid2D& g);

/// Checks every row and column against the 1D dome parameters up to a
/// constant frequency offset per line.
bool lines_match_dome(const Grid2D& g, double tol = 1e-12);

struct EffectiveTwoSite {
    double omega1_eff = 0.0;
    double omegaN_eff = 0.0;
    double J_eff = 0.0;
    // Diagnostics of the perturbative expansion.
    double gap = 0.0;            // min |edge energy - middle eigenvalue|
    double coupling_norm = 0.0;  // operator norm of the edge/middle block

    Eigen::Matrix2d matrix() const {
        Eigen::Matrix2d h;
        h << omega1_eff, J_eff, J_eff, omegaN_eff;
        return h;
    }
};

/// Second-order Schrieffer-Wolff elimination of sites 2..N-1 in the eigenbasis
/// of the middle block: H_eff = H_P + 1/2 sum_k V_ik V_kj (1/(E_i - e_k) + 1/(E_j - e_k)).
/// Throws NumericalError when 2 |V| >= gap, where the expansion is not convergent.
EffectiveTwoSite schrieffer_wolff_reduce(const TridiagonalHamiltonian<double>& h);

}  // namespace dome

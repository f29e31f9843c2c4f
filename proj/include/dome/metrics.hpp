#pragma once

// Reduced states of selected qubits, Bell/W fidelities, and simulated
// single-qubit process tomography.
//
// Reduced states use the qubit basis {down, up}^{(x)k}; the first listed site
// is the leftmost tensor factor, and "up" is the excited level. For a single
// qubit, index 0 is |down> and index 1 is |up>.

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "dome/dynamics.hpp"
#include "dome/models.hpp"

namespace dome {

/// Exact partial trace of a (D+1)-dimensional single-excitation density
/// matrix onto the listed sites (1-based, distinct). Result is 2^k x 2^k.
Eigen::MatrixXcd reduce_to_sites(const Eigen::MatrixXcd& rho, const std::vector<int>& sites);
Eigen::MatrixXcd reduce_to_sites(const QuantumState& psi, const std::vector<int>& sites);

Eigen::Matrix4cd reduce_to_pair(const Eigen::MatrixXcd& rho, int site_a, int site_b);
Eigen::Matrix4cd reduce_to_pair(const QuantumState& psi, int site_a, int site_b);

/// Relative phase of the far-end amplitude produced by a balanced FST from
/// site 1 of an N-site chain at t = T/4: i (-1)^{N+1}.
Complex ideal_end_phase(int N);

/// (|up,down> + phase |down,up>)/sqrt(2) in the order (near end, far end).
Eigen::Vector4cd bell_state(Complex relative_phase = Complex(0.0, 1.0));

double bell_fidelity(const Eigen::Matrix4cd& rho_pair, Complex relative_phase = Complex(0.0, 1.0));

/// Corner sites (1,1), (1,C), (R,1), (R,C) as 1-based site numbers.
std::array<int, 4> corner_sites(const Grid2D& g);

/// Four-corner W target of the balanced 2D FST from corner (1,1): the product
/// of the row and column end-pair states, corner order as corner_sites().
Eigen::VectorXcd ideal_w_state(int rows, int cols);

double w_fidelity(const Eigen::MatrixXcd& rho_corners, const Eigen::VectorXcd& target);

// ------------------------------------------------------------ tomography

using ProcessMatrix = Eigen::Matrix4cd;  // Pauli basis {I, X, Y, Z}

struct QptResult {
    ProcessMatrix chi;
    double fidelity = 0.0;         // Tr(chi chi_ideal), identity process
    double hermiticity_residual = 0.0;
    double trace_residual = 0.0;   // | sum chi_mn E_n^dag E_m - I |
    double min_eigenvalue = 0.0;   // negative means non-physical
};

/// Informationally complete inputs {|down>, |up>, (|down>+|up>)/sqrt2, (|down>+i|up>)/sqrt2}.
std::array<Eigen::Matrix2cd, 4> qpt_input_states();

/// Exact readout after the pre-rotations {I, X_pi/2, Y_pi/2} followed by a
/// computational-basis measurement; returns the reconstructed single-qubit state.
Eigen::Matrix2cd tomograph_qubit(const Eigen::Matrix2cd& rho);

/// Linear-inversion chi from the channel outputs of qpt_input_states().
QptResult reconstruct_process(const std::array<Eigen::Matrix2cd, 4>& outputs);

struct QptContext {
    Eigen::MatrixXd hamiltonian;     // excitation block
    DecoherenceConfig decoherence;   // closed() for unitary evolution
    double t_end = 0.0;
    int source = 1;
    int target = 1;
};

QptResult simulate_qpt(const QptContext& ctx);

/// Process fidelity at every time, sharing one propagator per input state.
std::vector<QptResult> simulate_qpt(const QptContext& ctx, const std::vector<double>& times);

}  // namespace dome

#pragma once

// Single-excitation dynamics on the (D+1)-dimensional space
// {|vac>, |1>, ..., |D>}. Index 0 is the vacuum, index n is site n.
//
// Closed systems are propagated exactly through the eigendecomposition of
// the excitation block. Open systems follow the Lindblad equation with
// per-site lowering operators (rate 1/T1) and per-site sigma_z dephasing
// (rate 1/(2 T_phi)).

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <vector>

#include "dome/error.hpp"

namespace dome {

using Complex = std::complex<double>;

struct Eigensystem {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns, orthonormal
};

/// Symmetric eigendecomposition. Eigenvector signs are fixed so that the
/// largest-magnitude component of each column is positive.
Eigensystem eigendecompose(const Eigen::MatrixXd& h);

// Amplitudes over {vac, site 1..D}.
class QuantumState {
public:
    QuantumState() = default;
    explicit QuantumState(Eigen::VectorXcd amplitudes);

    static QuantumState vacuum(int sites);
    static QuantumState site(int sites, int n);
    // a |vac> + b |n>, normalized.
    static QuantumState superposition(int sites, int n, Complex a, Complex b);

    const Eigen::VectorXcd& amplitudes() const noexcept { return amp_; }
    int sites() const noexcept { return static_cast<int>(amp_.size()) - 1; }
    Complex operator[](int i) const { return amp_[i]; }

private:
    Eigen::VectorXcd amp_;
};

class DensityMatrix {
public:
    DensityMatrix() = default;
    explicit DensityMatrix(Eigen::MatrixXcd rho, double tol = 1e-9);

    static DensityMatrix pure(const QuantumState& psi);

    const Eigen::MatrixXcd& matrix() const noexcept { return rho_; }
    int sites() const noexcept { return static_cast<int>(rho_.rows()) - 1; }

private:
    Eigen::MatrixXcd rho_;
};

// Coherence times in the same (inverse) units as the Hamiltonian times the
// evolution times, i.e. dimensionless J*T1 when H is in units of J.
struct DecoherenceConfig {
    std::optional<double> T1;
    std::optional<double> T_phi;

    bool closed() const { return !T1 && !T_phi; }
    double gamma1() const { return T1 ? 1.0 / *T1 : 0.0; }
    double gamma_phi() const { return T_phi ? 1.0 / (2.0 * *T_phi) : 0.0; }

    // Physical T1/T_phi (seconds) expressed in units of 1/J.
    static DecoherenceConfig from_physical(std::optional<double> T1_s, std::optional<double> Tphi_s,
                                           double rate_J);
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> states;     // closed evolution
    std::vector<Eigen::MatrixXcd> densities;  // open evolution

    bool open() const { return !densities.empty(); }
    std::size_t size() const { return times.size(); }
};

/// Exact unitary propagation, eigendecomposition computed once.
class ClosedPropagator {
public:
    explicit ClosedPropagator(const Eigen::MatrixXd& h);

    int sites() const { return static_cast<int>(eig_.values.size()); }
    const Eigensystem& eigensystem() const { return eig_; }

    // e^{-iHt} on the excitation block; the vacuum amplitude is untouched.
    Eigen::VectorXcd apply(const Eigen::VectorXcd& amplitudes, double t) const;
    // Full excitation-block propagator e^{-iHt}.
    Eigen::MatrixXcd unitary(double t) const;

private:
    Eigensystem eig_;
};

Trajectory evolve_closed(const Eigen::MatrixXd& h, const QuantumState& psi0, const std::vector<double>& times);

enum class LindbladMethod {
    Exact,     // block-structured Liouvillian exponential
    Adaptive,  // Dormand-Prince 5(4) on the full density matrix
};

struct LindbladOptions {
    LindbladMethod method = LindbladMethod::Exact;
    double rtol = 1e-10;
    double atol = 1e-12;
    long max_steps = 10'000'000;
};

/// Open-system propagation for a fixed Hamiltonian and decoherence model.
///
/// The equation decouples into three blocks on the (D+1) space:
///   vacuum-site coherences:  dv/dt = (-iH - (G1/2 + 2 Gphi)) v
///   site-site block:         drho/dt = -i[H, rho] - G1 rho - 4 Gphi offdiag(rho)
///   vacuum population:       fed by G1 * (site populations)
/// and the Exact method integrates each block in closed form.
class LindbladPropagator {
public:
    LindbladPropagator(const Eigen::MatrixXd& h, DecoherenceConfig deco, LindbladOptions opt = {});

    int sites() const { return static_cast<int>(h_.rows()); }

    Eigen::MatrixXcd evolve(const Eigen::MatrixXcd& rho0, double t) const;
    Trajectory evolve(const DensityMatrix& rho0, const std::vector<double>& times) const;

    // Several initial states over a non-decreasing time grid; result[k][j] is
    // input j at times[k]. Equal time increments reuse one propagator.
    std::vector<std::vector<Eigen::MatrixXcd>> evolve_batch(const std::vector<Eigen::MatrixXcd>& rho0s,
                                                            const std::vector<double>& times) const;

    // Right-hand side of the master equation on the (D+1) matrix.
    Eigen::MatrixXcd rhs(const Eigen::MatrixXcd& rho) const;

private:
    struct StepPropagator {
        double dt = -1.0;
        Eigen::MatrixXcd unitary;  // e^{-iH dt}
        Eigen::MatrixXcd block;    // site-site superoperator, empty without dephasing
    };
    StepPropagator make_step(double dt) const;
    Eigen::MatrixXcd exact_step(const Eigen::MatrixXcd& rho0, const StepPropagator& step) const;
    Eigen::MatrixXcd adaptive_step(const Eigen::MatrixXcd& rho0, double t0, double t1, double& h_guess) const;

    Eigen::MatrixXd h_;
    DecoherenceConfig deco_;
    LindbladOptions opt_;
    ClosedPropagator closed_;
    Eigen::MatrixXcd generator_;  // site-site superoperator without the uniform G1 decay
};

Trajectory evolve_lindblad(const Eigen::MatrixXd& h, const DensityMatrix& rho0, const std::vector<double>& times,
                           const DecoherenceConfig& deco, const LindbladOptions& opt = {});

/// Row i: populations at times[i], column 0 the vacuum, column n site n.
Eigen::MatrixXd populations(const Trajectory& traj);

}  // namespace dome

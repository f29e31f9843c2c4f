#include "dome/dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace dome {

Eigensystem eigendecompose(const Eigen::MatrixXd& h) {
    if (h.rows() != h.cols() || h.rows() == 0) throw ValidationError("eigendecompose: matrix must be square and non-empty");
    const double scale = std::max(h.cwiseAbs().maxCoeff(), 1.0);
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ValidationError("eigendecompose: matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecompose: solver did not converge");
    Eigensystem out{es.eigenvalues(), es.eigenvectors()};
    for (Eigen::Index k = 0; k < out.vectors.cols(); ++k) {
        Eigen::Index at = 0;
        out.vectors.col(k).cwiseAbs().maxCoeff(&at);
        if (out.vectors(at, k) < 0.0) out.vectors.col(k) *= -1.0;
    }
    return out;
}

// ---------------------------------------------------------------- states

QuantumState::QuantumState(Eigen::VectorXcd amplitudes) : amp_(std::move(amplitudes)) {
    if (amp_.size() < 2) throw ValidationError("QuantumState: need vacuum plus at least one site");
    if (std::abs(amp_.norm() - 1.0) > 1e-10)
        throw ValidationError("QuantumState: amplitudes are not normalized (norm " + std::to_string(amp_.norm()) + ")");
}

QuantumState QuantumState::vacuum(int sites) {
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(sites + 1);
    a[0] = 1.0;
    return QuantumState(std::move(a));
}

QuantumState QuantumState::site(int sites, int n) {
    if (n < 1 || n > sites) throw ValidationError("QuantumState::site: site " + std::to_string(n) + " out of range");
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(sites + 1);
    a[n] = 1.0;
    return QuantumState(std::move(a));
}

QuantumState QuantumState::superposition(int sites, int n, Complex a, Complex b) {
    if (n < 1 || n > sites) throw ValidationError("QuantumState::superposition: site out of range");
    const double norm = std::sqrt(std::norm(a) + std::norm(b));
    if (!(norm > 0.0)) throw ValidationError("QuantumState::superposition: zero vector");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(sites + 1);
    v[0] = a / norm;
    v[n] = b / norm;
    return QuantumState(std::move(v));
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd rho, double tol) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols() || rho_.rows() < 2) throw ValidationError("DensityMatrix: must be square, dim >= 2");
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw ValidationError("DensityMatrix: not Hermitian");
    if (std::abs(rho_.trace() - Complex(1.0)) > tol) throw ValidationError("DensityMatrix: trace is not 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) throw ValidationError("DensityMatrix: not positive semidefinite");
}

DensityMatrix DensityMatrix::pure(const QuantumState& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

DecoherenceConfig DecoherenceConfig::from_physical(std::optional<double> T1_s, std::optional<double> Tphi_s,
                                                   double rate_J) {
    DecoherenceConfig c;
    if (T1_s) {
        if (!(*T1_s > 0.0)) throw ValidationError("T1 must be positive");
        c.T1 = *T1_s * rate_J;
    }
    if (Tphi_s) {
        if (!(*Tphi_s > 0.0)) throw ValidationError("T_phi must be positive");
        c.T_phi = *Tphi_s * rate_J;
    }
    return c;
}

// ---------------------------------------------------------------- closed

ClosedPropagator::ClosedPropagator(const Eigen::MatrixXd& h) : eig_(eigendecompose(h)) {}

Eigen::MatrixXcd ClosedPropagator::unitary(double t) const {
    const Eigen::VectorXcd phases = (eig_.values.cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
    const Eigen::MatrixXcd v = eig_.vectors.cast<Complex>();
    return v * phases.asDiagonal() * v.adjoint();
}

Eigen::VectorXcd ClosedPropagator::apply(const Eigen::VectorXcd& amplitudes, double t) const {
    const int d = sites();
    if (amplitudes.size() != d + 1) throw ValidationError("ClosedPropagator: dimension mismatch");
    const Eigen::MatrixXcd v = eig_.vectors.cast<Complex>();
    Eigen::VectorXcd coeff = v.adjoint() * amplitudes.tail(d);
    for (int k = 0; k < d; ++k) coeff[k] *= std::exp(Complex(0.0, -eig_.values[k] * t));
    Eigen::VectorXcd out(d + 1);
    out[0] = amplitudes[0];
    out.tail(d) = v * coeff;
    return out;
}

Trajectory evolve_closed(const Eigen::MatrixXd& h, const QuantumState& psi0, const std::vector<double>& times) {
    if (psi0.sites() != h.rows()) throw ValidationError("evolve_closed: state/Hamiltonian dimension mismatch");
    ClosedPropagator prop(h);
    Trajectory traj;
    traj.times = times;
    traj.states.reserve(times.size());
    for (double t : times) {
        if (t < 0.0) throw ValidationError("evolve_closed: negative time");
        traj.states.push_back(prop.apply(psi0.amplitudes(), t));
    }
    return traj;
}

// ---------------------------------------------------------------- open

namespace {

// Column-major vec: vec(A X B) = (B^T kron A) vec(X).
Eigen::MatrixXcd site_block_generator(const Eigen::MatrixXd& h, double dephasing) {
    const Eigen::Index d = h.rows();
    const Eigen::Index dd = d * d;
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(dd, dd);
    const Complex mi(0.0, -1.0);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            const Eigen::Index row = i + j * d;
            // -i (H X)_{ij} = -i sum_k H_ik X_kj
            for (Eigen::Index k = 0; k < d; ++k) {
                if (h(i, k) != 0.0) g(row, k + j * d) += mi * h(i, k);
                // +i (X H)_{ij} = +i sum_k X_ik H_kj
                if (h(k, j) != 0.0) g(row, i + k * d) -= mi * h(k, j);
            }
            if (i != j) g(row, row) -= dephasing;
        }
    }
    return g;
}

}  // namespace

LindbladPropagator::LindbladPropagator(const Eigen::MatrixXd& h, DecoherenceConfig deco, LindbladOptions opt)
    : h_(h), deco_(deco), opt_(opt), closed_(h) {
    if (deco_.T1 && !(*deco_.T1 > 0.0)) throw ValidationError("LindbladPropagator: T1 must be positive");
    if (deco_.T_phi && !(*deco_.T_phi > 0.0)) throw ValidationError("LindbladPropagator: T_phi must be positive");
    if (opt_.method == LindbladMethod::Exact && deco_.gamma_phi() > 0.0)
        generator_ = site_block_generator(h_, 4.0 * deco_.gamma_phi());
}

Eigen::MatrixXcd LindbladPropagator::rhs(const Eigen::MatrixXcd& rho) const {
    const Eigen::Index d = rho.rows();
    const Eigen::Index n = d - 1;
    const double g1 = deco_.gamma1();
    const double gp = deco_.gamma_phi();

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    const Eigen::MatrixXcd hb = h_.cast<Complex>();
    out.bottomRightCorner(n, n) = hb * rho.bottomRightCorner(n, n) - rho.bottomRightCorner(n, n) * hb;
    out.bottomLeftCorner(n, 1) = hb * rho.bottomLeftCorner(n, 1);
    out.topRightCorner(1, n) = -rho.topRightCorner(1, n) * hb;
    out *= Complex(0.0, -1.0);

    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            const double excited = double(i >= 1) + double(j >= 1);
            double rate = 0.5 * g1 * excited;
            rate += gp * (2.0 * excited - ((i == j && i >= 1) ? 4.0 : 0.0));
            out(i, j) -= rate * rho(i, j);
        }
    }
    out(0, 0) += g1 * rho.diagonal().tail(n).sum();
    return out;
}

LindbladPropagator::StepPropagator LindbladPropagator::make_step(double dt) const {
    StepPropagator p;
    p.dt = dt;
    p.unitary = closed_.unitary(dt);
    if (deco_.gamma_phi() > 0.0) p.block = (generator_ * Complex(dt, 0.0)).exp();
    return p;
}

Eigen::MatrixXcd LindbladPropagator::exact_step(const Eigen::MatrixXcd& rho0, const StepPropagator& step) const {
    const Eigen::Index d = rho0.rows();
    const Eigen::Index n = d - 1;
    const double t = step.dt;
    const double g1 = deco_.gamma1();
    const double gp = deco_.gamma_phi();
    const Eigen::MatrixXcd& u = step.unitary;

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);

    const double coherence_decay = std::exp(-(0.5 * g1 + 2.0 * gp) * t);
    out.bottomLeftCorner(n, 1) = coherence_decay * (u * rho0.bottomLeftCorner(n, 1));
    out.topRightCorner(1, n) = out.bottomLeftCorner(n, 1).adjoint();

    const Eigen::MatrixXcd block0 = rho0.bottomRightCorner(n, n);
    Eigen::MatrixXcd block;
    if (step.block.size() > 0) {
        Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(block0.data(), n * n);
        v = step.block * v;
        block = Eigen::Map<Eigen::MatrixXcd>(v.data(), n, n);
    } else {
        block = u * block0 * u.adjoint();
    }
    const double decay = std::exp(-g1 * t);
    out.bottomRightCorner(n, n) = decay * block;
    out(0, 0) = rho0(0, 0) + block0.trace() * (1.0 - decay);
    return out;
}

Eigen::MatrixXcd LindbladPropagator::adaptive_step(const Eigen::MatrixXcd& y0, double t0, double t1,
                                                   double& h) const {
    // Dormand-Prince 5(4) tableau.
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2; (void)c3; (void)c4; (void)c5;

    Eigen::MatrixXcd y = y0;
    double t = t0;
    long steps = 0;
    Eigen::MatrixXcd k1 = rhs(y);
    while (t < t1) {
        if (++steps > opt_.max_steps) throw NumericalError("evolve_lindblad: step budget exhausted");
        const bool last = t + h >= t1;
        const double step = last ? t1 - t : h;
        if (!(step > 1e-14 * std::max(1.0, std::abs(t))))
            throw NumericalError("evolve_lindblad: step size underflow at t=" + std::to_string(t));

        const Eigen::MatrixXcd k2 = rhs(y + step * a21 * k1);
        const Eigen::MatrixXcd k3 = rhs(y + step * (a31 * k1 + a32 * k2));
        const Eigen::MatrixXcd k4 = rhs(y + step * (a41 * k1 + a42 * k2 + a43 * k3));
        const Eigen::MatrixXcd k5 = rhs(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Eigen::MatrixXcd k6 = rhs(y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Eigen::MatrixXcd ynew = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Eigen::MatrixXcd k7 = rhs(ynew);
        const Eigen::MatrixXcd err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double norm = 0.0;
        for (Eigen::Index i = 0; i < err.size(); ++i) {
            const double sc = opt_.atol + opt_.rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
            norm = std::max(norm, std::abs(err(i)) / sc);
        }
        if (norm <= 1.0) {
            t = last ? t1 : t + step;
            y = ynew;
            k1 = k7;
        }
        const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
        if (!last || norm > 1.0) h = step * factor;
    }
    return y;
}

Eigen::MatrixXcd LindbladPropagator::evolve(const Eigen::MatrixXcd& rho0, double t) const {
    if (rho0.rows() != sites() + 1) throw ValidationError("evolve_lindblad: dimension mismatch");
    if (t < 0.0) throw ValidationError("evolve_lindblad: negative time");
    if (t == 0.0) return rho0;
    if (opt_.method == LindbladMethod::Exact) return exact_step(rho0, make_step(t));
    double h = std::min(t, 1e-2);
    return adaptive_step(rho0, 0.0, t, h);
}

std::vector<std::vector<Eigen::MatrixXcd>> LindbladPropagator::evolve_batch(
    const std::vector<Eigen::MatrixXcd>& rho0s, const std::vector<double>& times) const {
    for (const auto& r : rho0s)
        if (r.rows() != sites() + 1 || r.cols() != sites() + 1)
            throw ValidationError("evolve_lindblad: dimension mismatch");

    std::vector<std::vector<Eigen::MatrixXcd>> out;
    out.reserve(times.size());
    std::vector<Eigen::MatrixXcd> current = rho0s;
    std::vector<double> h(rho0s.size(), 1e-2);
    StepPropagator step;
    double t = 0.0;
    for (double target : times) {
        if (target < t) throw ValidationError("evolve_lindblad: times must be non-negative and non-decreasing");
        const double dt = target - t;
        if (dt > 0.0) {
            if (opt_.method == LindbladMethod::Exact) {
                if (std::abs(dt - step.dt) > 1e-13 * std::max(1.0, dt)) step = make_step(dt);
                for (auto& r : current) r = exact_step(r, step);
            } else {
                for (std::size_t j = 0; j < current.size(); ++j) current[j] = adaptive_step(current[j], t, target, h[j]);
            }
        }
        t = target;
        out.push_back(current);
    }
    return out;
}

Trajectory LindbladPropagator::evolve(const DensityMatrix& rho0, const std::vector<double>& times) const {
    if (rho0.sites() != sites()) throw ValidationError("evolve_lindblad: state/Hamiltonian dimension mismatch");
    Trajectory traj;
    traj.times = times;
    traj.densities.reserve(times.size());
    for (auto& batch : evolve_batch({rho0.matrix()}, times)) traj.densities.push_back(std::move(batch.front()));
    return traj;
}

Trajectory evolve_lindblad(const Eigen::MatrixXd& h, const DensityMatrix& rho0, const std::vector<double>& times,
                           const DecoherenceConfig& deco, const LindbladOptions& opt) {
    return LindbladPropagator(h, deco, opt).evolve(rho0, times);
}

Eigen::MatrixXd populations(const Trajectory& traj) {
    const std::size_t rows = traj.size();
    if (rows == 0) return {};
    const Eigen::Index d = traj.open() ? traj.densities.front().rows() : traj.states.front().size();
    Eigen::MatrixXd p(static_cast<Eigen::Index>(rows), d);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        if (traj.open()) p.row(r) = traj.densities[i].diagonal().real().transpose();
        else p.row(r) = traj.states[i].cwiseAbs2().transpose();
    }
    return p;
}

}  // namespace dome

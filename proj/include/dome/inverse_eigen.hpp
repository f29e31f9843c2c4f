#pragma once

// Inverse eigenvalue reconstruction of mirror-symmetric Jacobi matrices.
//
// The monic polynomials P_n(lambda) (principal minors of lambda - H) are
// orthogonal under the discrete inner product (p, q) = sum_s alpha_s p(lambda_s) q(lambda_s).
// Their recurrence coefficients are the on-site frequencies and couplings:
//
//   P_n = (lambda - omega_n) P_{n-1} - J_{n-1}^2 P_{n-2},
//   omega_n = (P_{n-1}, lambda P_{n-1}) / |P_{n-1}|^2,   J_n = |P_n| / |P_{n-1}|.
//
// Only values at the spectral points are ever stored. Each P_n is kept
// normalized (the orthonormal polynomial) with its log-norm tracked
// separately, so the combinatorial growth of monic values never overflows.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

#include "dome/error.hpp"
#include "dome/spectrum.hpp"

namespace dome {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar = double>
struct WeightedSpectrum {
    Vec<Scalar> values;
    Vec<Scalar> weights;  // alpha_s > 0, sum 1
    double rate = 1.0;

    int size() const { return static_cast<int>(values.size()); }
};

// Nearest-neighbour single-excitation Hamiltonian, parameters in units of J.
template <typename Scalar = double>
struct TridiagonalHamiltonian {
    Vec<Scalar> omegas;     // N on-site frequencies
    Vec<Scalar> couplings;  // N-1 couplings
    double rate = 1.0;      // J in rad/s

    int size() const { return static_cast<int>(omegas.size()); }

    Mat<Scalar> dense() const {
        const int n = size();
        Mat<Scalar> h = Mat<Scalar>::Zero(n, n);
        h.diagonal() = omegas;
        for (int i = 0; i + 1 < n; ++i) h(i, i + 1) = h(i + 1, i) = couplings[i];
        return h;
    }

    Scalar max_coupling() const { return couplings.size() ? couplings.maxCoeff() : Scalar(0); }

    // Largest relative deviation from reflection symmetry about the centre.
    double mirror_residual() const {
        const int n = size();
        Scalar scale = std::max(omegas.cwiseAbs().maxCoeff(), max_coupling());
        if (scale == Scalar(0)) scale = Scalar(1);
        Scalar worst(0);
        for (int i = 0; i < n; ++i) worst = std::max(worst, Scalar(std::abs(omegas[i] - omegas[n - 1 - i])));
        for (int i = 0; i + 1 < n; ++i)
            worst = std::max(worst, Scalar(std::abs(couplings[i] - couplings[n - 2 - i])));
        return static_cast<double>(worst / scale);
    }

    Vec<Scalar> eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es;
        Vec<Scalar> d = omegas;
        Vec<Scalar> e = couplings;
        if (size() == 1) return d;
        es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }

    template <typename Other>
    TridiagonalHamiltonian<Other> cast() const {
        return {omegas.template cast<Other>(), couplings.template cast<Other>(), rate};
    }
};

// Values of the orthonormal polynomials p_n = P_n/|P_n| at the spectral points,
// weighted by sqrt(alpha_s): column n holds sqrt(alpha_s) p_n(lambda_s).
// P_{-1} = 0 and P_0 = 1 are implicit (column 0 is sqrt(alpha)).
template <typename Scalar = double>
struct PolynomialTable {
    Mat<Scalar> weighted;   // N x (degrees computed)
    Vec<Scalar> log_norms;  // log |P_n|, n = 0..degrees-1 (log |P_0| = 0)
    Vec<Scalar> weights;

    int degrees() const { return static_cast<int>(weighted.cols()); }

    // Monic P_n(lambda_s); P_{-1} = 0. Only meaningful while |P_n| is representable.
    Scalar monic(int n, int s) const {
        if (n < 0) return Scalar(0);
        return weighted(s, n) / std::sqrt(weights[s]) * std::exp(log_norms[n]);
    }

    Scalar norm(int n) const { return std::exp(log_norms[n]); }
};

/// alpha_s proportional to 1/|P_N'(lambda_s)|, P_N(lambda) = prod (lambda - lambda_s).
/// Products are accumulated in log space; the +- of the textbook formula is
/// resolved by positivity.
template <typename Scalar>
WeightedSpectrum<Scalar> compute_weights(const Spectrum<Scalar>& spec) {
    const int n = spec.size();
    const auto& lam = spec.values();
    Vec<Scalar> logw(n);
    for (int s = 0; s < n; ++s) {
        Scalar acc(0);
        for (int t = 0; t < n; ++t) {
            if (t == s) continue;
            const Scalar d = std::abs(lam[s] - lam[t]);
            if (!(d > Scalar(0))) throw ValidationError("compute_weights: repeated eigenvalue");
            acc -= std::log(d);
        }
        logw[s] = acc;
    }
    const Scalar top = logw.maxCoeff();
    Vec<Scalar> w = (logw.array() - top).exp().matrix();
    w /= w.sum();
    return {lam, w, spec.rate()};
}

struct ReconstructOptions {
    // Stop after ceil(N/2) iterations and fill the rest by reflection.
    bool exploit_mirror = true;
    // Re-orthogonalize each new polynomial against all previous ones.
    bool reorthogonalize = true;
    double eigen_tolerance = 1e-8;  // relative to max |lambda|
};

/// Runs the three-term recurrence for `iterations` steps. Column n of the
/// returned table is sqrt(alpha) p_n; omegas/couplings receive the recurrence
/// coefficients that were determined.
template <typename Scalar>
PolynomialTable<Scalar> run_recurrence(const WeightedSpectrum<Scalar>& ws, int iterations,
                                       Vec<Scalar>& omegas, Vec<Scalar>& couplings,
                                       bool reorthogonalize = true) {
    const int n = ws.size();
    iterations = std::clamp(iterations, 1, n);
    const auto lam = ws.values.array();

    PolynomialTable<Scalar> table;
    table.weights = ws.weights;
    table.weighted = Mat<Scalar>::Zero(n, iterations);
    table.log_norms = Vec<Scalar>::Zero(iterations);
    table.weighted.col(0) = ws.weights.cwiseSqrt();

    omegas = Vec<Scalar>::Zero(n);
    couplings = Vec<Scalar>::Zero(std::max(n - 1, 0));
    const Scalar scale = std::max(ws.values.cwiseAbs().maxCoeff(), Scalar(1));

    for (int k = 1; k <= iterations; ++k) {
        const auto prev = table.weighted.col(k - 1);
        const Scalar omega = (lam * prev.array().square()).sum();
        omegas[k - 1] = omega;
        if (k == n) break;  // P_N vanishes on the spectrum

        Vec<Scalar> r = ((lam - omega) * prev.array()).matrix();
        if (k >= 2) r -= couplings[k - 2] * table.weighted.col(k - 2);
        if (reorthogonalize) {
            for (int pass = 0; pass < 2; ++pass)
                for (int j = 0; j < k; ++j) r -= table.weighted.col(j).dot(r) * table.weighted.col(j);
        }
        const Scalar coupling = r.norm();
        if (!(coupling > scale * Scalar(64) * Eigen::NumTraits<Scalar>::epsilon()))
            throw NumericalError("inverse eigenvalue recurrence broke down: |P_" + std::to_string(k) +
                                     "| vanished",
                                 k);
        couplings[k - 1] = coupling;
        if (k < iterations) {
            table.weighted.col(k) = r / coupling;
            table.log_norms[k] = table.log_norms[k - 1] + std::log(coupling);
        }
    }
    return table;
}

/// Reconstructs the unique mirror-symmetric Jacobi matrix with the given spectrum.
template <typename Scalar>
TridiagonalHamiltonian<Scalar> reconstruct(const Spectrum<Scalar>& spec,
                                           const ReconstructOptions& opt = {}) {
    const int n = spec.size();
    TridiagonalHamiltonian<Scalar> h;
    h.rate = spec.rate();
    if (n == 1) {
        h.omegas = spec.values();
        h.couplings.resize(0);
        return h;
    }
    const auto ws = compute_weights(spec);
    const int iterations = opt.exploit_mirror ? (n + 1) / 2 : n;
    run_recurrence(ws, iterations, h.omegas, h.couplings, opt.reorthogonalize);

    if (opt.exploit_mirror) {
        for (int i = iterations; i < n; ++i) h.omegas[i] = h.omegas[n - 1 - i];
        for (int i = iterations; i < n - 1; ++i) h.couplings[i] = h.couplings[n - 2 - i];
    }

    const Vec<Scalar> got = h.eigenvalues();
    const Scalar scale = std::max(spec.values().cwiseAbs().maxCoeff(), Scalar(1));
    const Scalar err = (got - spec.values()).cwiseAbs().maxCoeff() / scale;
    if (!(err <= Scalar(opt.eigen_tolerance)))
        throw NumericalError("reconstruct: eigenvalue residual " + std::to_string(double(err)) +
                                 " exceeds tolerance for N=" + std::to_string(n),
                             n);
    return h;
}

// Rows are eigenvectors: W(s, n) = sqrt(alpha_s) chi_n(lambda_s).
template <typename Scalar = double>
struct EigenBasis {
    Mat<Scalar> W;
    Vec<Scalar> values;
};

/// chi_1 = 1, J_n chi_{n+1} = (lambda - omega_n) chi_n - J_{n-1} chi_{n-1}
/// for the first half of the chain; the second half follows from
/// chi_{N+1-n}(lambda_s) = (-1)^{N+s} chi_n(lambda_s).
template <typename Scalar>
EigenBasis<Scalar> eigenvectors(const TridiagonalHamiltonian<Scalar>& h, const WeightedSpectrum<Scalar>& ws,
                                double tolerance = 1e-8) {
    const int n = h.size();
    if (ws.size() != n) throw ValidationError("eigenvectors: spectrum/Hamiltonian size mismatch");

    Mat<Scalar> chi = Mat<Scalar>::Zero(n, n);  // chi(s, site)
    const int half = (n + 1) / 2;
    for (int s = 0; s < n; ++s) {
        const Scalar lam = ws.values[s];
        chi(s, 0) = Scalar(1);
        for (int k = 1; k < half; ++k) {
            Scalar next = (lam - h.omegas[k - 1]) * chi(s, k - 1);
            if (k >= 2) next -= h.couplings[k - 2] * chi(s, k - 2);
            chi(s, k) = next / h.couplings[k - 1];
        }
        const Scalar sign = ((n + s + 1) % 2 == 0) ? Scalar(1) : Scalar(-1);
        for (int k = half; k < n; ++k) chi(s, k) = sign * chi(s, n - 1 - k);
    }

    EigenBasis<Scalar> out;
    out.values = ws.values;
    out.W = ws.weights.cwiseSqrt().asDiagonal() * chi;

    const Mat<Scalar> hd = h.dense();
    const Mat<Scalar> resid = hd * out.W.transpose() - out.W.transpose() * ws.values.asDiagonal();
    const Scalar hnorm = std::max(hd.cwiseAbs().maxCoeff(), Scalar(1));
    const Scalar err = resid.cwiseAbs().maxCoeff() / hnorm;
    if (!(err <= Scalar(tolerance)))
        throw NumericalError("eigenvectors: Hamiltonian and spectrum are inconsistent (residual " +
                             std::to_string(double(err)) + ")");
    return out;
}

}  // namespace dome

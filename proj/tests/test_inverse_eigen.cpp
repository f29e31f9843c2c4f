#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "dome/inverse_eigen.hpp"
#include "dome/models.hpp"

using namespace dome;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1.0); }

}  // namespace

TEST_CASE("reconstruction matches closed form") {
    for (int N = 2; N <= 16; ++N) {
        for (long m : {0L, 1L, 2L, 3L, 4L, 6L, 10L}) {
            const auto h = reconstruct(dome_spectrum<double>(N, m));
            const auto ref = dome_hamiltonian<double>({N, m, 1.0});
            for (int i = 0; i < N; ++i) CHECK_MESSAGE(rel_err(h.omegas[i], ref.omegas[i]) < 1e-9, N << " " << m);
            for (int i = 0; i + 1 < N; ++i)
                CHECK_MESSAGE(rel_err(h.couplings[i], ref.couplings[i]) < 1e-9, N << " " << m);
        }
    }
}

TEST_CASE("two-level spectrum") {
    const auto h = reconstruct(Spectrum<double>::from_list({-0.5, 0.5}));
    CHECK(std::abs(h.omegas[0]) < 1e-15);
    CHECK(std::abs(h.omegas[1]) < 1e-15);
    CHECK(h.couplings[0] == doctest::Approx(0.5));
}

TEST_CASE("line model couplings") {
    const auto h = reconstruct(dome_spectrum<double>(5, 0));
    const double want[] = {1.0, std::sqrt(6.0) / 2, std::sqrt(6.0) / 2, 1.0};
    for (int i = 0; i < 4; ++i) CHECK(h.couplings[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("full recurrence without mirror shortcut agrees") {
    ReconstructOptions full;
    full.exploit_mirror = false;
    for (int N = 2; N <= 12; ++N) {
        const auto spec = dome_spectrum<double>(N, 2);
        const auto a = reconstruct(spec);
        const auto b = reconstruct(spec, full);
        CHECK((a.omegas - b.omegas).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, a.omegas.cwiseAbs().maxCoeff()));
        CHECK((a.couplings - b.couplings).cwiseAbs().maxCoeff() < 1e-8 * a.couplings.maxCoeff());
    }
}

TEST_CASE("weights equal squared first eigenvector components") {
    // Independent oracle: diagonalize the closed-form matrix with Eigen.
    for (int N = 2; N <= 12; ++N) {
        for (long m : {0L, 2L, 6L}) {
            const auto ref = dome_hamiltonian<double>({N, m, 1.0});
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ref.dense());
            const auto ws = compute_weights(dome_spectrum<double>(N, m));
            CHECK(ws.weights.sum() == doctest::Approx(1.0));
            for (int s = 0; s < N; ++s) {
                const double u = es.eigenvectors()(0, s);
                CHECK(ws.weights[s] == doctest::Approx(u * u).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("eigenvectors diagonalize the reconstruction") {
    for (int N = 2; N <= 14; ++N) {
        const auto spec = dome_spectrum<double>(N, 2);
        const auto h = reconstruct(spec);
        const auto basis = eigenvectors(h, compute_weights(spec));
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
        CHECK((basis.W * basis.W.transpose() - I).cwiseAbs().maxCoeff() < 1e-10);
        const Eigen::MatrixXd resid = h.dense() * basis.W.transpose() - basis.W.transpose() * spec.values().asDiagonal();
        CHECK(resid.cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, spec.values().cwiseAbs().maxCoeff()));
        // Mirror relation between first and last components.
        for (int s = 0; s < N; ++s) {
            const double sign = ((N + s + 1) % 2 == 0) ? 1.0 : -1.0;
            CHECK(basis.W(s, N - 1) == doctest::Approx(sign * basis.W(s, 0)).epsilon(1e-10));
        }
    }
}

TEST_CASE("inconsistent eigenvector request throws") {
    const auto spec = dome_spectrum<double>(5, 2);
    const auto h = dome_hamiltonian<double>({5, 6, 1.0});
    CHECK_THROWS_AS(eigenvectors(h, compute_weights(spec)), NumericalError);
}

TEST_CASE("property: random spectra give persymmetric Jacobi matrices") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> gap(0.2, 4.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int N = 2 + int(rng() % 9);
        std::vector<double> v{gap(rng) - 2.0};
        for (int i = 1; i < N; ++i) v.push_back(v.back() + gap(rng));
        const auto spec = Spectrum<double>::from_list(v);
        const auto h = reconstruct(spec);
        CHECK((h.couplings.array() > 0.0).all());
        CHECK(h.mirror_residual() < 1e-9);
        const Eigen::VectorXd got = h.eigenvalues();
        for (int i = 0; i < N; ++i) CHECK(got[i] == doctest::Approx(v[i]).epsilon(1e-8));
    }
}

TEST_CASE("extended precision agrees with double") {
    for (int N = 3; N <= 12; ++N) {
        const auto hd = reconstruct(dome_spectrum<double>(N, 6));
        const auto hl = reconstruct(dome_spectrum<long double>(N, 6)).cast<double>();
        for (int i = 0; i + 1 < N; ++i) CHECK(rel_err(hd.couplings[i], hl.couplings[i]) < 1e-12);
    }
}

TEST_CASE("large chains either reconstruct accurately or report breakdown") {
    for (int N : {24, 32, 48, 64}) {
        for (long m : {0L, 10L}) {
            const auto spec = dome_spectrum<double>(N, m);
            try {
                const auto h = reconstruct(spec);
                const auto ref = dome_hamiltonian<double>({N, m, 1.0});
                const double scale = std::max(1.0, ref.dense().cwiseAbs().maxCoeff());
                CHECK((h.couplings - ref.couplings).cwiseAbs().maxCoeff() / scale < 1e-6);
            } catch (const NumericalError& e) {
                CHECK(e.where() >= 0);
            }
        }
    }
}

TEST_CASE("single site") {
    const auto h = reconstruct(Spectrum<double>::from_list({3.0}));
    CHECK(h.size() == 1);
    CHECK(h.omegas[0] == 3.0);
}

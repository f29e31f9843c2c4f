#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>

#include "dome/dynamics.hpp"
#include "dome/models.hpp"
#include "oracles.hpp"

using namespace dome;
using Eigen::MatrixXcd;
using dome::Complex;

namespace {

const double kT = 2.0 * std::numbers::pi;

Eigen::MatrixXd chain(int N, long m) { return dome_hamiltonian<double>({N, m, 1.0}).dense(); }

Eigen::MatrixXd random_symmetric(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) = g(rng);
    return 0.5 * (a + a.transpose());
}

}  // namespace

TEST_CASE("eigendecompose") {
    std::mt19937_64 rng(3);
    for (int d = 1; d <= 8; ++d) {
        const Eigen::MatrixXd h = random_symmetric(d, rng);
        const auto es = eigendecompose(h);
        CHECK((es.vectors * es.values.asDiagonal() * es.vectors.transpose() - h).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((es.vectors.transpose() * es.vectors - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
        for (int k = 0; k < d; ++k) {
            Eigen::Index at;
            es.vectors.col(k).cwiseAbs().maxCoeff(&at);
            CHECK(es.vectors(at, k) > 0.0);
        }
    }
    Eigen::MatrixXd bad(2, 2);
    bad << 0, 1, 2, 0;
    CHECK_THROWS_AS(eigendecompose(bad), ValidationError);
}

TEST_CASE("state validation") {
    CHECK_THROWS_AS(QuantumState(Eigen::VectorXcd::Ones(3)), ValidationError);
    CHECK_THROWS_AS(QuantumState::site(5, 6), ValidationError);
    CHECK_THROWS_AS(QuantumState::site(5, 0), ValidationError);
    const auto s = QuantumState::superposition(3, 2, 1.0, Complex(0.0, 1.0));
    CHECK(s.amplitudes().norm() == doctest::Approx(1.0));

    MatrixXcd nonherm = MatrixXcd::Zero(3, 3);
    nonherm(0, 0) = 1.0;
    nonherm(0, 1) = 0.3;
    CHECK_THROWS_AS((void)DensityMatrix(nonherm), ValidationError);
    CHECK_THROWS_AS(DensityMatrix(MatrixXcd::Identity(3, 3)), ValidationError);
    MatrixXcd negative = MatrixXcd::Zero(2, 2);
    negative(0, 0) = 1.5;
    negative(1, 1) = -0.5;
    CHECK_THROWS_AS((void)DensityMatrix(negative), ValidationError);
}

TEST_CASE("physical unit conversion") {
    const double rate = 2.0 * std::numbers::pi / 200e-9;
    const auto c = DecoherenceConfig::from_physical(30e-6, 5e-6, rate);
    CHECK(*c.T1 == doctest::Approx(300.0 * std::numbers::pi));
    CHECK(*c.T_phi == doctest::Approx(50.0 * std::numbers::pi));
    CHECK(c.gamma_phi() == doctest::Approx(1.0 / (100.0 * std::numbers::pi)));
    CHECK(DecoherenceConfig{}.closed());
    CHECK_THROWS_AS(DecoherenceConfig::from_physical(-1.0, std::nullopt, rate), ValidationError);
}

TEST_CASE("closed propagator matches matrix exponential") {
    std::mt19937_64 rng(5);
    for (int d = 2; d <= 7; ++d) {
        const Eigen::MatrixXd h = random_symmetric(d, rng);
        const ClosedPropagator prop(h);
        for (double t : {0.0, 0.3, 2.7}) {
            const MatrixXcd ref = (h.cast<Complex>() * Complex(0.0, -t)).exp();
            CHECK((prop.unitary(t) - ref).cwiseAbs().maxCoeff() < 1e-11);
        }
    }
}

TEST_CASE("dome transfer identities") {
    for (long m : {0L, 2L, 6L, 10L}) {
        const ClosedPropagator prop(chain(5, m));
        const auto psi = QuantumState::site(5, 1).amplitudes();
        const Eigen::VectorXcd half = prop.apply(psi, kT / 2);
        CHECK(std::norm(half[5]) == doctest::Approx(1.0).epsilon(1e-10));
        if (m % 4 == 2) {
            const Eigen::VectorXcd quarter = prop.apply(psi, kT / 4);
            CHECK(std::norm(quarter[1]) == doctest::Approx(0.5).epsilon(1e-10));
            CHECK(std::norm(quarter[5]) == doctest::Approx(0.5).epsilon(1e-10));
        }
    }
    const ClosedPropagator odd(chain(5, 3));
    const auto psi = QuantumState::site(5, 1).amplitudes();
    CHECK(std::norm(odd.apply(psi, kT)[1]) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::norm(odd.apply(psi, kT / 2)[5]) < 0.99);
}

TEST_CASE("closed trajectory") {
    const std::vector<double> times = {0.0, 0.1, 1.0, kT};
    const auto traj = evolve_closed(chain(4, 2), QuantumState::site(4, 1), times);
    REQUIRE(traj.size() == 4);
    CHECK_FALSE(traj.open());
    const Eigen::MatrixXd p = populations(traj);
    for (int k = 0; k < 4; ++k) CHECK(p.row(k).sum() == doctest::Approx(1.0));
    CHECK(p(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Lindblad exact solution against dense Liouvillian oracle") {
    std::mt19937_64 rng(9);
    const std::vector<DecoherenceConfig> decos = {{5.0, std::nullopt}, {std::nullopt, 3.0}, {4.0, 2.5}, {0.7, 0.4}};
    for (int N = 1; N <= 3; ++N) {
        const Eigen::MatrixXd h = N == 1 ? Eigen::MatrixXd::Constant(1, 1, 0.8) : chain(N, 2);
        for (const auto& deco : decos) {
            const LindbladPropagator prop(h, deco);
            for (int trial = 0; trial < 3; ++trial) {
                const MatrixXcd rho0 = oracle::random_density(N + 1, rng);
                for (double t : {0.05, 1.3, 7.0}) {
                    const MatrixXcd got = prop.evolve(rho0, t);
                    CHECK((got - oracle::evolve(h, deco, rho0, t)).cwiseAbs().maxCoeff() < 1e-8);
                }
            }
        }
    }
}

TEST_CASE("Lindblad generator matches the oracle Liouvillian") {
    std::mt19937_64 rng(10);
    const DecoherenceConfig deco{2.0, 1.5};
    const Eigen::MatrixXd h = chain(3, 2);
    const LindbladPropagator prop(h, deco);
    const Eigen::MatrixXcd L = oracle::liouvillian(h, deco);
    const MatrixXcd rho = oracle::random_density(4, rng);
    const Eigen::VectorXcd v = L * Eigen::Map<const Eigen::VectorXcd>(rho.data(), 16);
    CHECK((prop.rhs(rho) - Eigen::Map<const MatrixXcd>(v.data(), 4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("adaptive integrator agrees with the exact solution") {
    LindbladOptions adaptive;
    adaptive.method = LindbladMethod::Adaptive;
    const DecoherenceConfig deco{20.0, 10.0};
    const Eigen::MatrixXd h = chain(5, 2);
    const MatrixXcd rho0 = DensityMatrix::pure(QuantumState::superposition(5, 1, 1.0, 1.0)).matrix();
    const LindbladPropagator exact(h, deco), rk(h, deco, adaptive);
    for (double t : {0.5, kT / 4, kT / 2}) CHECK((exact.evolve(rho0, t) - rk.evolve(rho0, t)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("property: Lindblad output is a density matrix") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const int N = 2 + int(rng() % 5);
        const DecoherenceConfig deco{0.5 + double(rng() % 100), 0.5 + double(rng() % 100)};
        const MatrixXcd rho0 = oracle::random_density(N + 1, rng);
        const LindbladPropagator prop(chain(N, 2), deco);
        for (double t : {0.1, 3.0, 30.0}) {
            const MatrixXcd rho = prop.evolve(rho0, t);
            CHECK(std::abs(rho.trace() - Complex(1.0)) < 1e-10);
            CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues().minCoeff() > -1e-10);
        }
    }
}

TEST_CASE("vacuum population follows pure T1 decay") {
    const DecoherenceConfig deco{6.0, 2.0};
    const std::vector<double> times = {0.0, 1.0, 2.0, 5.0, 12.0};
    const auto traj = evolve_lindblad(chain(5, 2), DensityMatrix::pure(QuantumState::site(5, 1)), times, deco);
    REQUIRE(traj.open());
    const Eigen::MatrixXd p = populations(traj);
    for (std::size_t k = 0; k < times.size(); ++k) CHECK(p(k, 0) == doctest::Approx(1.0 - std::exp(-times[k] / 6.0)));
}

TEST_CASE("closed limit of the Lindblad propagator") {
    const Eigen::MatrixXd h = chain(5, 6);
    const auto psi = QuantumState::superposition(5, 2, 0.6, 0.8);
    const LindbladPropagator prop(h, DecoherenceConfig{});
    const Eigen::VectorXcd out = ClosedPropagator(h).apply(psi.amplitudes(), 1.7);
    CHECK((prop.evolve(DensityMatrix::pure(psi).matrix(), 1.7) - out * out.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("batch evolution matches single evolution") {
    const DecoherenceConfig deco{15.0, 8.0};
    const Eigen::MatrixXd h = chain(4, 2);
    const LindbladPropagator prop(h, deco);
    std::mt19937_64 rng(2);
    const std::vector<MatrixXcd> inputs = {oracle::random_density(5, rng), oracle::random_density(5, rng)};
    std::vector<double> times;
    for (int k = 0; k <= 8; ++k) times.push_back(0.25 * k);
    times.push_back(3.3);
    const auto batch = prop.evolve_batch(inputs, times);
    for (std::size_t k = 0; k < times.size(); ++k)
        for (int j = 0; j < 2; ++j) CHECK((batch[k][j] - prop.evolve(inputs[j], times[k])).cwiseAbs().maxCoeff() < 1e-11);
}

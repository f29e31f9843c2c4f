#include "doctest.h"

#include <cmath>
#include <numeric>

#include "dome/noise.hpp"

using namespace dome;

TEST_CASE("counter-based normal draws") {
    CHECK(standard_normal(1, 2, 3) == standard_normal(1, 2, 3));
    CHECK(standard_normal(1, 2, 3) != standard_normal(1, 2, 4));
    CHECK(standard_normal(1, 2, 3) != standard_normal(2, 2, 3));

    const int n = 200000;
    double sum = 0, sq = 0, cross = 0;
    for (int k = 0; k < n; ++k) {
        const double a = standard_normal(42, k, 0), b = standard_normal(42, k, 1);
        sum += a;
        sq += a * a;
        cross += a * b;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
    CHECK(std::abs(cross / n) < 0.01);
}

TEST_CASE("chain disorder hits only the selected parameters") {
    const auto h = dome_hamiltonian<double>({6, 2, 1.0});
    auto changed = [&](DisorderTarget t) {
        const auto p = perturb(h, DisorderConfig{t, 0.5, 4, 9}, 2);
        std::vector<bool> om, cp;
        for (int i = 0; i < 6; ++i) om.push_back(p.omegas[i] != h.omegas[i]);
        for (int i = 0; i < 5; ++i) cp.push_back(p.couplings[i] != h.couplings[i]);
        return std::pair{om, cp};
    };
    auto [e_om, e_cp] = changed(DisorderTarget::EdgeFrequencies);
    CHECK(e_om == std::vector<bool>{true, false, false, false, false, true});
    CHECK(e_cp == std::vector<bool>(5, false));
    auto [m_om, m_cp] = changed(DisorderTarget::MiddleFrequencies);
    CHECK(m_om == std::vector<bool>{false, true, true, true, true, false});
    CHECK(m_cp == std::vector<bool>(5, false));
    auto [c_om, c_cp] = changed(DisorderTarget::Couplings);
    CHECK(c_om == std::vector<bool>(6, false));
    CHECK(c_cp == std::vector<bool>(5, true));
    auto [a_om, a_cp] = changed(DisorderTarget::All);
    CHECK(a_om == std::vector<bool>(6, true));
    CHECK(a_cp == std::vector<bool>(5, true));
}

TEST_CASE("draws are shared across sigma") {
    const auto h = dome_hamiltonian<double>({5, 2, 1.0});
    const auto p1 = perturb(h, DisorderConfig{DisorderTarget::All, 1.0, 10, 3}, 7);
    const auto p2 = perturb(h, DisorderConfig{DisorderTarget::All, 2.5, 10, 3}, 7);
    CHECK(((p2.omegas - h.omegas) - 2.5 * (p1.omegas - h.omegas)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(((p2.couplings - h.couplings) - 2.5 * (p1.couplings - h.couplings)).cwiseAbs().maxCoeff() < 1e-12);
    const auto p0 = perturb(h, DisorderConfig{DisorderTarget::All, 0.0, 10, 3}, 7);
    CHECK(p0.omegas == h.omegas);
    CHECK_THROWS_AS(perturb(h, DisorderConfig{DisorderTarget::All, 1.0, 10, 3}, 10), ValidationError);
    CHECK_THROWS_AS(perturb(h, DisorderConfig{DisorderTarget::All, -1.0, 10, 3}, 0), ValidationError);
}

TEST_CASE("lattice disorder") {
    const auto g = grid_2d(3, 4, 2, 2);
    const auto l = LatticeHamiltonian::from_grid(g);
    CHECK((l.matrix() - single_excitation_matrix(g)).cwiseAbs().maxCoeff() == 0.0);

    const auto e = perturb(l, DisorderConfig{DisorderTarget::EdgeFrequencies, 1.0, 2, 1}, 0);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) CHECK((e.site_omega(r, c) != l.site_omega(r, c)) == l.is_corner(r, c));
    CHECK(e.coupling_x == l.coupling_x);
    CHECK(e.coupling_y == l.coupling_y);

    const auto c = perturb(l, DisorderConfig{DisorderTarget::Couplings, 1.0, 2, 1}, 1);
    CHECK(c.site_omega == l.site_omega);
    CHECK((c.coupling_x.array() != l.coupling_x.array()).all());
    CHECK((c.coupling_y.array() != l.coupling_y.array()).all());
    CHECK((c.matrix() - c.matrix().transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pairwise summation") {
    std::vector<double> v(1000);
    std::iota(v.begin(), v.end(), 1.0);
    CHECK(pairwise_sum(v) == 500500.0);
    CHECK(pairwise_sum(std::span<const double>()) == 0.0);
}

TEST_CASE("noise-free sweeps give unit fidelity") {
    for (auto metric : {Metric::BellAtQuarterT, Metric::QptAtHalfT}) {
        const auto p = sweep_coherent(ChainModel{5, 2}, DisorderConfig{DisorderTarget::All, 0.0, 5, 0}, metric);
        CHECK(p.mean == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(p.std < 1e-9);
        CHECK(p.samples == 5);
        CHECK(p.failures == 0);
    }
    const auto w = sweep_coherent(GridModel{3, 4, 2, 2}, DisorderConfig{DisorderTarget::All, 0.0, 3, 0},
                                  Metric::BellAtQuarterT);
    CHECK(w.mean == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sweeps are independent of thread count") {
    const DisorderConfig cfg{DisorderTarget::Couplings, 0.7, 24, 5};
    const auto a = sweep_coherent(ChainModel{5, 6}, cfg, Metric::BellAtQuarterT, {}, 1);
    const auto b = sweep_coherent(ChainModel{5, 6}, cfg, Metric::BellAtQuarterT, {}, 4);
    CHECK(a.mean == b.mean);
    CHECK(a.std == b.std);

    const auto s = sweep_sigma(ChainModel{5, 2}, {2, 6}, DisorderTarget::MiddleFrequencies, {0.0, 0.5}, 8, 1,
                               Metric::QptAtHalfT, 3);
    REQUIRE(s.points.size() == 4);
    CHECK(s.points[0].m == 2);
    CHECK(s.points[3].m == 6);
    CHECK(s.points[1].axis == 0.5);
}

TEST_CASE("metric preconditions") {
    CHECK_THROWS_AS(validate_for_metric(ChainModel{5, 4}, Metric::BellAtQuarterT), ValidationError);
    CHECK_THROWS_AS(validate_for_metric(ChainModel{5, 3}, Metric::QptAtHalfT), ValidationError);
    CHECK_NOTHROW(validate_for_metric(ChainModel{5, 4}, Metric::QptAtHalfT));
    CHECK_THROWS_AS(validate_for_metric(GridModel{1, 4, 2, 2}, Metric::BellAtQuarterT), ValidationError);
    CHECK_THROWS_AS(disorder_target_from_string("nope"), ValidationError);
    CHECK(disorder_target_from_string(to_string(DisorderTarget::Couplings)) == DisorderTarget::Couplings);
    CHECK(metric_from_string(to_string(Metric::QptAtHalfT)) == Metric::QptAtHalfT);
}

TEST_CASE("decoherence scan monotonicity") {
    const std::vector<double> t1 = {3, 10, 30, 100, 300};
    const auto scan = sweep_decoherence(ChainModel{5, 2}, Metric::BellAtQuarterT, {2, 6, 10}, DecoherenceAxis::T1, t1,
                                        5.0);
    CHECK(scan.gain.row(0).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j + 1 < 5; ++j) CHECK(scan.fidelity(i, j) < scan.fidelity(i, j + 1));
    CHECK((scan.fidelity.array() < 1.0).all());
    CHECK_THROWS_AS(sweep_decoherence(ChainModel{5, 2}, Metric::BellAtQuarterT, {}, DecoherenceAxis::T1, t1, 5.0),
                    ValidationError);
}

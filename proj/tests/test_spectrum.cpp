#include "doctest.h"

#include <numbers>
#include <random>

#include "dome/models.hpp"
#include "dome/spectrum.hpp"

using namespace dome;

TEST_CASE("dome spectrum values") {
    const auto s = dome_spectrum<double>(5, 2);
    const double want[] = {-2, -1, 2, 7, 14};
    REQUIRE(s.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(s[i] == want[i]);

    const auto line = dome_spectrum<double>(4, 0);
    const double want_line[] = {-1.5, -0.5, 0.5, 1.5};
    for (int i = 0; i < 4; ++i) CHECK(line[i] == want_line[i]);
}

TEST_CASE("dome spectrum preconditions") {
    CHECK_THROWS_AS(dome_spectrum<double>(1, 2), ValidationError);
    CHECK_THROWS_AS(dome_spectrum<double>(5, -1), ValidationError);
    CHECK_THROWS_AS(Spectrum<double>::from_list({1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(Spectrum<double>::from_list({2.0, 1.0}), ValidationError);
}

TEST_CASE("classify_m") {
    CHECK(classify_m(0) == TransferCapability::PstOnly);
    CHECK(classify_m(1) == TransferCapability::PeriodicOnly);
    CHECK(classify_m(3) == TransferCapability::PeriodicOnly);
    CHECK(classify_m(2) == TransferCapability::PstAndFst);
    CHECK(classify_m(6) == TransferCapability::PstAndFst);
    CHECK(classify_m(102) == TransferCapability::PstAndFst);
    CHECK(classify_m(4) == TransferCapability::PstOnly);
    CHECK(classify_m(8) == TransferCapability::PstOnly);
    CHECK(classify_m(-2) == TransferCapability::Invalid);
}

TEST_CASE("PST spacing holds at half period exactly for even m") {
    const double half = std::numbers::pi;  // T/2 with T = 2 pi / J
    for (int N = 2; N <= 12; ++N) {
        for (long m = 0; m <= 12; ++m) {
            const auto s = dome_spectrum<double>(N, m);
            const bool expect = (m % 2 == 0) || N == 2;
            CHECK_MESSAGE(check_pst_spacing(s, half) == expect, "N=" << N << " m=" << m);
        }
    }
    CHECK_FALSE(check_pst_spacing(dome_spectrum<double>(5, 2), 0.0));
}

TEST_CASE("FST phase at quarter period") {
    const double quarter = std::numbers::pi / 2;
    for (long m : {2L, 6L, 10L, 102L}) {
        const auto ph = solve_fst_phase(dome_spectrum<double>(5, m), quarter);
        REQUIRE(ph.has_value());
        CHECK(ph->theta == doctest::Approx(std::numbers::pi / 4).epsilon(1e-12));
        CHECK(std::abs(std::abs(ph->psi) - std::numbers::pi / 2) < 1e-9);
    }
    // Half period is plain PST: theta = 0.
    const auto pst = solve_fst_phase(dome_spectrum<double>(5, 2), std::numbers::pi);
    REQUIRE(pst.has_value());
    CHECK(pst->theta == doctest::Approx(0.0));
    // m = 4 at T/4 leaves amplitude on middle sites.
    CHECK_FALSE(solve_fst_phase(dome_spectrum<double>(5, 4), quarter).has_value());
    CHECK_FALSE(solve_fst_phase(dome_spectrum<double>(5, 0), quarter).has_value());
}

TEST_CASE("trace identities in integer arithmetic") {
    // sum lambda = tr H and sum (2 lambda)^2 = 4 sum omega^2 + 2 sum 4 J^2, all integers.
    for (long long N = 2; N <= 40; ++N) {
        for (long long m : {0LL, 1LL, 2LL, 3LL, 6LL, 10LL, 102LL}) {
            long long two_lambda_sum = 0, two_lambda_sq = 0, omega_sum = 0, omega_sq = 0, four_j_sq = 0;
            for (long long s = 1; s <= N; ++s) {
                const long long tl = 2 * s - (N + 1) + (s - 2) * (s - 1) * m;
                two_lambda_sum += tl;
                two_lambda_sq += tl * tl;
            }
            for (long long n = 1; n <= N; ++n) {
                const long long w = (n - 1) * (N - n) * m;
                omega_sum += w;
                omega_sq += w * w;
            }
            for (long long n = 1; n < N; ++n)
                four_j_sq += (n * (N - n - 1) * m + n) * ((n - 1) * (N - n) * m + N - n);
            CHECK(two_lambda_sum == 2 * omega_sum);
            CHECK(two_lambda_sq == 4 * omega_sq + 2 * four_j_sq);

            // Floating-point spectrum agrees with the integer sums.
            const auto spec = dome_spectrum<double>(int(N), m);
            CHECK(2.0 * spec.values().sum() == doctest::Approx(double(two_lambda_sum)));
        }
    }
}

TEST_CASE("random spectra validate ordering") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> gap(0.01, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v{-1.0};
        for (int i = 0; i < 6; ++i) v.push_back(v.back() + gap(rng));
        const auto s = Spectrum<double>::from_list(v);
        CHECK(s.size() == 7);
        for (int i = 0; i + 1 < 7; ++i) CHECK(s[i] < s[i + 1]);
    }
}

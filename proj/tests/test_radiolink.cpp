#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "smn/errors.hpp"
#include "smn/radiolink.hpp"

using namespace smn;

TEST_SUITE_BEGIN("radiolink");

TEST_CASE("path loss model") {
    RadioParams p;
    CHECK(path_loss_db(p, 1.0) == doctest::Approx(8.0));
    CHECK(path_loss_db(p, 1000.0) == doctest::Approx(120.8).epsilon(1e-9));
    CHECK(path_loss_db(p, 1200.0) == doctest::Approx(123.78).epsilon(1e-4));
    CHECK_THROWS_AS(path_loss_db(p, 0.5), DomainError);
    CHECK_THROWS_AS(path_loss_db(p, -3.0), DomainError);

    // strictly increasing over the model domain
    double prev = path_loss_db(p, 1.0);
    for (int i = 1; i <= 1000; ++i) {
        const double r = 1.0 + (10000.0 - 1.0) * i / 1000.0;
        const double cur = path_loss_db(p, r);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("received power") {
    RadioParams p;
    CHECK(rx_power_dbw(p, 1.0) == doctest::Approx(-5.0));
    CHECK(rx_power_dbw(p, 1200.0) == doctest::Approx(-120.78).epsilon(5e-4));
    CHECK(rx_power_dbw(p, 4500.0) == doctest::Approx(-142.36).epsilon(5e-4));
}

TEST_CASE("noise power") {
    RadioParams p;
    CHECK(noise_power_w(p) == doctest::Approx(8.004e-15).epsilon(1e-3));
    CHECK(linear_to_db(noise_power_w(p)) == doctest::Approx(-140.97).epsilon(1e-4));

    RadioParams cold = p;
    cold.temperature_k = 0.0;
    CHECK(noise_power_w(cold) == 0.0);

    RadioParams wide = p;
    wide.bandwidth_hz = 2.0 * p.bandwidth_hz;
    CHECK(noise_power_w(wide) == doctest::Approx(2.0 * noise_power_w(p)));
}

TEST_CASE("bpsk capacity endpoints and oracle agreement") {
    CHECK(bpsk_capacity_bits_per_use(0.0) == 0.0);
    CHECK(bpsk_capacity_bits_per_use(1e6) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(bpsk_capacity_bits_per_use(1.0) == doctest::Approx(0.486).epsilon(2.1e-3));
    CHECK_THROWS_AS(bpsk_capacity_bits_per_use(-0.1), DomainError);

    for (const double snr : {0.1, 0.5, 1.0, 2.0, 10.0}) {
        const double mc = oracle::mc_bpsk_capacity(snr, 4'000'000, 99);
        CHECK(bpsk_capacity_bits_per_use(snr) == doctest::Approx(mc).epsilon(0.0031));
    }

    // monotone nondecreasing in snr
    double prev = 0.0;
    for (int i = 0; i <= 600; ++i) {
        const double snr = std::pow(10.0, -3.0 + 6.0 * i / 600.0);
        const double c = bpsk_capacity_bits_per_use(snr);
        CHECK(c >= prev);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
        prev = c;
    }
}

TEST_CASE("achievable rate reproduces the published claims") {
    RadioParams p;
    const double rate_4500 = achievable_rate_bps(p, 4500.0);
    CHECK(rate_4500 > 1.0e5);  // the 100 kbps use-case floor
    CHECK(rate_4500 == doctest::Approx(8.0e5).epsilon(0.10));
    CHECK(achievable_rate_bps(p, 1200.0) == doctest::Approx(2.0e6).epsilon(0.02));

    // nonincreasing across the grid
    double prev = achievable_rate_bps(p, 1.0);
    for (int i = 1; i <= 1000; ++i) {
        const double r = 1.0 + (10000.0 - 1.0) * i / 1000.0;
        const double cur = achievable_rate_bps(p, r);
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("carrier-sense range inversion") {
    RadioParams p;
    const double x = carrier_sense_range_m(p);
    CHECK(x == doctest::Approx(1985.7).epsilon(1.0 / 1985.7));
    // fixed point of the link budget
    CHECK(std::abs(rx_power_dbw(p, x) - p.carrier_sense_threshold_dbw) < 1e-9);

    RadioParams tight = p;
    tight.carrier_sense_threshold_dbw = -5.0;
    CHECK(carrier_sense_range_m(tight) == doctest::Approx(1.0));

    RadioParams wide = p;
    wide.carrier_sense_threshold_dbw = p.carrier_sense_threshold_dbw - 37.6;
    CHECK(carrier_sense_range_m(wide) == doctest::Approx(10.0 * x).epsilon(1e-9));

    RadioParams broken = p;
    broken.carrier_sense_threshold_dbw = 100.0;
    CHECK_THROWS_AS(carrier_sense_range_m(broken), DomainError);
}

TEST_CASE("interference range") {
    RadioParams p;
    // clamped at the cell boundary
    CHECK(interference_range_m(p, 1200.0, 1200.0) == doctest::Approx(1200.0));
    // unclamped root
    const double unclamped = interference_range_m(p, 1200.0, 1e9);
    CHECK(unclamped == doctest::Approx(3043.0).epsilon(0.01));
    // fixed point of the SINR balance, in dB
    const double lhs = rx_power_dbw(p, 1200.0) -
                       linear_to_db(noise_power_w(p) +
                                    db_to_linear(rx_power_dbw(p, unclamped)));
    CHECK(std::abs(lhs - p.sinr_threshold_db) < 1e-9);

    // noise alone breaks the budget beyond the decode range
    CHECK_THROWS_AS(interference_range_m(p, 5200.0, 1e9), DecodeInfeasible);
    CHECK_THROWS_AS(interference_range_m(p, 1800.0, 1e9), DecodeInfeasible);
    CHECK_NOTHROW(interference_range_m(p, 1700.0, 1e9));

    // the critical interferer distance grows as the signal weakens
    double prev = interference_range_m(p, 10.0, 1e9);
    for (const double r : {50.0, 200.0, 600.0, 1000.0, 1500.0}) {
        const double cur = interference_range_m(p, r, 1e9);
        CHECK(cur > prev);
        prev = cur;
    }

    CHECK_THROWS_AS(interference_range_m(p, 0.5, 1200.0), DomainError);
    CHECK_THROWS_AS(interference_range_m(p, 100.0, 50.0), DomainError);
}

TEST_CASE("dbm conversion") {
    CHECK(dbm_to_dbw(30.0) == doctest::Approx(0.0));
    CHECK(dbm_to_dbw(0.0) == doctest::Approx(-30.0));
}

TEST_SUITE_END();

#include "smn/radiolink.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "smn/errors.hpp"
#include "smn/numeric.hpp"

namespace smn {

void RadioParams::validate() const {
    if (!(bandwidth_hz > 0)) throw ConfigError("radio: bandwidth_hz must be > 0");
    if (!(temperature_k >= 0)) throw ConfigError("radio: temperature_k must be >= 0");
    if (!(boltzmann_j_per_k > 0)) throw ConfigError("radio: boltzmann_j_per_k must be > 0");
    if (!(pathloss_slope_db_per_decade > 0))
        throw ConfigError("radio: pathloss_slope_db_per_decade must be > 0");
}

double dbm_to_dbw(double dbm) { return dbm - 30.0; }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double value) { return 10.0 * std::log10(value); }

double path_loss_db(const RadioParams& p, double r_m) {
    if (!(r_m >= 1.0)) throw DomainError("path_loss_db: distance must be >= 1 m");
    return p.pathloss_intercept_db + p.pathloss_slope_db_per_decade * std::log10(r_m);
}

double rx_power_dbw(const RadioParams& p, double r_m) {
    return p.tx_power_dbw + p.antenna_gain_db - path_loss_db(p, r_m);
}

double noise_power_w(const RadioParams& p) {
    return p.boltzmann_j_per_k * p.temperature_k * p.bandwidth_hz;
}

double snr_linear(const RadioParams& p, double r_m) {
    return db_to_linear(rx_power_dbw(p, r_m)) / noise_power_w(p);
}

double bpsk_capacity_bits_per_use(double snr) {
    if (!(snr >= 0.0)) throw DomainError("bpsk_capacity: snr must be >= 0");
    if (snr == 0.0) return 0.0;

    static const GaussHermiteRule rule = gauss_hermite(96);
    constexpr double kSqrt2 = 1.4142135623730951;
    constexpr double kSqrtPi = 1.7724538509055160;
    constexpr double kInvLn2 = 1.4426950408889634;

    const double sqrt_s = std::sqrt(snr);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double z = kSqrt2 * rule.nodes[i];
        const double e = -2.0 * snr - 2.0 * sqrt_s * z;
        // log2(1 + exp(e)); for large e the +1 is negligible
        const double v = (e > 36.0) ? e * kInvLn2 : std::log1p(std::exp(e)) * kInvLn2;
        acc += rule.weights[i] * v;
    }
    const double mean = acc / kSqrtPi;
    return std::clamp(1.0 - mean, 0.0, 1.0);
}

double achievable_rate_bps(const RadioParams& p, double r_m) {
    return p.bandwidth_hz * bpsk_capacity_bits_per_use(snr_linear(p, r_m));
}

double carrier_sense_range_m(const RadioParams& p) {
    const double budget = p.tx_power_dbw + p.antenna_gain_db -
                          p.pathloss_intercept_db - p.carrier_sense_threshold_dbw;
    if (budget < 0.0)
        throw DomainError(
            "carrier_sense_range: threshold exceeds received power at 1 m");
    return std::pow(10.0, budget / p.pathloss_slope_db_per_decade);
}

double interference_range_m(const RadioParams& p, double r_m,
                            double cell_radius_m) {
    if (!(r_m >= 1.0)) throw DomainError("interference_range: distance must be >= 1 m");
    if (!(cell_radius_m >= r_m))
        throw DomainError("interference_range: cell radius must cover the meter");

    // Total interference-plus-noise power the signal at r can tolerate.
    const double allowed_total_w = db_to_linear(rx_power_dbw(p, r_m) - p.sinr_threshold_db);
    const double max_interference_w = allowed_total_w - noise_power_w(p);
    if (max_interference_w <= 0.0)
        throw DecodeInfeasible("interference_range: noise alone breaks the SINR budget");

    const double interference_dbw = linear_to_db(max_interference_w);
    const double exponent = (p.tx_power_dbw + p.antenna_gain_db -
                             p.pathloss_intercept_db - interference_dbw) /
                            p.pathloss_slope_db_per_decade;
    return std::min(cell_radius_m, std::pow(10.0, exponent));
}

}  // namespace smn

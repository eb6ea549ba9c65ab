#pragma once

namespace smn {

// PHY and link-budget constants for the sub-1GHz deployment profile used
// throughout: 2 MHz channel, 0 dBW (30 dBm) transmit power, 3 dB combined
// antenna gain, 290 K receiver, 14 dB SINR decode threshold, -129 dBW
// energy-detection threshold, and the 900 MHz urban outdoor path loss
// model 8 + 37.6*log10(r).
//
// All dB-valued powers are dBW; use dbm_to_dbw() when configuring from dBm.
struct RadioParams {
    double bandwidth_hz = 2e6;
    double tx_power_dbw = 0.0;
    double antenna_gain_db = 3.0;
    double temperature_k = 290.0;
    double boltzmann_j_per_k = 1.38e-23;
    double sinr_threshold_db = 14.0;
    double carrier_sense_threshold_dbw = -129.0;
    double pathloss_intercept_db = 8.0;
    double pathloss_slope_db_per_decade = 37.6;

    // Throws ConfigError when an invariant is violated.
    void validate() const;
};

double dbm_to_dbw(double dbm);
double db_to_linear(double db);
double linear_to_db(double value);

// Log-distance path loss in dB; valid for r_m >= 1.
double path_loss_db(const RadioParams& p, double r_m);

// Received power at distance r_m, dBW.
double rx_power_dbw(const RadioParams& p, double r_m);

// Thermal noise power k*T*W, linear watts.
double noise_power_w(const RadioParams& p);

// Interference-free linear SNR at distance r_m.
double snr_linear(const RadioParams& p, double r_m);

// Mutual information of binary-antipodal signalling over real AWGN, in
// bits per channel use, in [0, 1]:
//   C(s) = 1 - E_{Z~N(0,1)}[ log2(1 + exp(-2 s - 2 sqrt(s) Z)) ]
// Evaluated by 96-point Gauss-Hermite quadrature (absolute error < 1e-4).
double bpsk_capacity_bits_per_use(double snr_linear);

// W * C(SNR(r)) with one BPSK symbol per second per hertz.
double achievable_rate_bps(const RadioParams& p, double r_m);

// Distance X at which received power equals the carrier-sense threshold:
// P_TX + G - PL(X) = P_X,th.  Closed-form inversion of the path loss model.
double carrier_sense_range_m(const RadioParams& p);

// Distance within which a single interferer breaks the SINR threshold for
// a transmitter at r_m, clamped to the cell radius.  Throws DecodeInfeasible
// when noise alone already exceeds the SINR budget at r_m.
double interference_range_m(const RadioParams& p, double r_m,
                            double cell_radius_m);

}  // namespace smn

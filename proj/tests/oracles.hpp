#pragma once

// Test-only Monte-Carlo oracles. They deliberately avoid the library's
// quadrature and closed-form area paths so agreement is meaningful.

#include <cmath>
#include <cstdint>

#include "smn/errors.hpp"
#include "smn/radiolink.hpp"
#include "smn/rng.hpp"

namespace smn::oracle {

// E_{Z~N(0,1)}[log2(1 + exp(-2s - 2 sqrt(s) Z))] by plain sampling.
inline double mc_bpsk_capacity(double snr, long samples, std::uint64_t seed) {
    Rng rng(seed);
    const double sqrt_s = std::sqrt(snr);
    double acc = 0.0;
    long drawn = 0;
    while (drawn < samples) {
        const auto [z1, z2] = rng.normal_pair();
        for (const double z : {z1, z2}) {
            if (drawn >= samples) break;
            const double e = -2.0 * snr - 2.0 * sqrt_s * z;
            const double v = (e > 36.0) ? e * 1.4426950408889634
                                        : std::log1p(std::exp(e)) * 1.4426950408889634;
            acc += v;
            ++drawn;
        }
    }
    return 1.0 - acc / static_cast<double>(samples);
}

// Area inside the disk of radius i around the origin and outside the disk of
// radius x around (r, 0), by rejection counting inside the i-disk.
inline double mc_hidden_area(double r, double x, double i, long samples,
                             std::uint64_t seed) {
    Rng rng(seed);
    long hits = 0;
    for (long k = 0; k < samples; ++k) {
        const double rho = i * std::sqrt(rng.uniform01());
        const double phi = 6.283185307179586 * rng.uniform01();
        const double px = rho * std::cos(phi);
        const double py = rho * std::sin(phi);
        const double dx = px - r;
        if (dx * dx + py * py > x * x) ++hits;
    }
    return 3.141592653589793 * i * i * static_cast<double>(hits) /
           static_cast<double>(samples);
}

// rho * E_{r~f}[A(r)] with stratified radii (r = R sqrt(u), u stratified) and
// a small point cloud per radius. The interference range solve itself is the
// model under test elsewhere (fixed-point checks); here it supplies I(r).
inline double mc_mean_hidden_nodes(const RadioParams& radio, double cell_radius_m,
                                   double density_per_m2, long radius_samples,
                                   int points_per_radius, std::uint64_t seed) {
    Rng rng(seed);
    const double x = carrier_sense_range_m(radio);
    double acc = 0.0;
    for (long k = 0; k < radius_samples; ++k) {
        const double u =
            (static_cast<double>(k) + rng.uniform01()) / static_cast<double>(radius_samples);
        const double r = cell_radius_m * std::sqrt(u);
        if (r < 1.0) continue;
        double interference;
        try {
            interference = interference_range_m(radio, r, cell_radius_m);
        } catch (const DecodeInfeasible&) {
            continue;
        }
        long hits = 0;
        for (int p = 0; p < points_per_radius; ++p) {
            const double rho = interference * std::sqrt(rng.uniform01());
            const double phi = 6.283185307179586 * rng.uniform01();
            const double px = rho * std::cos(phi);
            const double py = rho * std::sin(phi);
            const double dx = px - r;
            if (dx * dx + py * py > x * x) ++hits;
        }
        acc += 3.141592653589793 * interference * interference *
               static_cast<double>(hits) / static_cast<double>(points_per_radius);
    }
    return density_per_m2 * acc / static_cast<double>(radius_samples);
}

}  // namespace smn::oracle

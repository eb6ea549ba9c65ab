#pragma once

#include <vector>

#include "smn/radiolink.hpp"

namespace smn {

// Expected hidden-node count for a collector-centered disk cell of radius R
// with uniform meter density rho, under the carrier-sense / interference
// range geometry of the radio model.
struct HiddenNodeQuery {
    double cell_radius_m = 1200.0;
    double meter_density_per_m2 = 1e-3;  // 1000 per km^2
    RadioParams radio;

    void validate() const;
};

// Area inside the receiver's interference disk (radius i_m, centered on the
// collector) and outside the transmitter's carrier-sense disk (radius x_m,
// centered on a meter at distance r_m from the collector).  Exact two-circle
// geometry; zero when the interference disk is fully sensed.
double hidden_area_m2(double r_m, double x_m, double i_m);

// Radial density of uniformly deployed meters: f(r) = 2r/R^2 on [0, R].
double radial_pdf(double r_m, double cell_radius_m);

// N_hidden = integral over [0, R] of rho * A(r) * f(r) dr with the
// interference range solved per radius (clamped to R).  Radii whose SINR
// budget is infeasible contribute zero area.  Adaptive Simpson quadrature,
// relative accuracy ~1e-3.
double mean_hidden_nodes(const HiddenNodeQuery& query);

struct HiddenSweepRow {
    double cell_radius_m;
    double carrier_sense_range_m;
    double mean_hidden_nodes;
};

// N_hidden over an inclusive linear grid of cell radii.
std::vector<HiddenSweepRow> sweep_hidden_vs_radius(const RadioParams& radio,
                                                   double density_per_m2,
                                                   double r_min_m,
                                                   double r_max_m, int steps);

}  // namespace smn

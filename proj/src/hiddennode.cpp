#include "smn/hiddennode.hpp"

#include <algorithm>
#include <cmath>

#include "smn/errors.hpp"
#include "smn/numeric.hpp"

namespace smn {

namespace {

constexpr double kPi = 3.141592653589793;

// arccos argument, mathematically in [-1, 1] in the partial-overlap branch;
// anything beyond floating-point drift there indicates broken geometry.
double clamped_acos(double arg) {
    const double clamped = std::clamp(arg, -1.0, 1.0);
    if (std::abs(arg - clamped) > 1e-9)
        throw InvariantViolation("hidden_area: arccos argument out of range");
    return std::acos(clamped);
}

}  // namespace

void HiddenNodeQuery::validate() const {
    if (!(cell_radius_m >= 1.0))
        throw ConfigError("hidden-node query: cell radius must be >= 1 m");
    if (!(meter_density_per_m2 > 0))
        throw ConfigError("hidden-node query: density must be > 0");
    radio.validate();
}

double hidden_area_m2(double r_m, double x_m, double i_m) {
    if (!(r_m > 0)) throw DomainError("hidden_area: meter distance must be > 0");
    if (!(x_m > 0)) throw DomainError("hidden_area: carrier-sense range must be > 0");
    if (!(i_m >= 0)) throw DomainError("hidden_area: interference range must be >= 0");

    if (i_m == 0.0) return 0.0;
    if (r_m <= x_m - i_m) return 0.0;                          // fully sensed
    if (i_m >= r_m + x_m) return kPi * (i_m * i_m - x_m * x_m);  // sense disk inside
    if (r_m >= x_m + i_m) return kPi * i_m * i_m;              // disjoint disks

    const double alpha =
        clamped_acos((x_m * x_m + r_m * r_m - i_m * i_m) / (2.0 * r_m * x_m));
    const double beta =
        kPi - clamped_acos((i_m * i_m + r_m * r_m - x_m * x_m) / (2.0 * r_m * i_m));
    const double area = beta * i_m * i_m +
                        r_m * x_m * std::abs(std::sin(alpha)) -
                        alpha * x_m * x_m;
    return std::max(area, 0.0);
}

double radial_pdf(double r_m, double cell_radius_m) {
    if (!(cell_radius_m > 0)) throw DomainError("radial_pdf: cell radius must be > 0");
    if (!(r_m >= 0) || r_m > cell_radius_m)
        throw DomainError("radial_pdf: radius outside [0, R]");
    return 2.0 * r_m / (cell_radius_m * cell_radius_m);
}

double mean_hidden_nodes(const HiddenNodeQuery& query) {
    query.validate();
    const double x = carrier_sense_range_m(query.radio);
    const double cell_r = query.cell_radius_m;

    auto integrand = [&](double r) -> double {
        if (r < 1.0) return 0.0;  // below the path-loss domain; negligible mass
        double i;
        try {
            i = interference_range_m(query.radio, r, cell_r);
        } catch (const DecodeInfeasible&) {
            return 0.0;  // undecodable meter has no collision to protect
        }
        return query.meter_density_per_m2 * hidden_area_m2(r, x, i) *
               radial_pdf(r, cell_r);
    };

    const double coarse = composite_simpson(integrand, 0.0, cell_r, 256);
    const double tol = std::max(1e-6, 1e-3 * std::abs(coarse));
    return adaptive_simpson(integrand, 0.0, cell_r, tol);
}

std::vector<HiddenSweepRow> sweep_hidden_vs_radius(const RadioParams& radio,
                                                   double density_per_m2,
                                                   double r_min_m,
                                                   double r_max_m, int steps) {
    if (!(r_min_m >= 1.0) || !(r_min_m < r_max_m))
        throw DomainError("hidden sweep: need 1 <= r_min < r_max");
    if (steps < 2) throw DomainError("hidden sweep: need steps >= 2");

    const double x = carrier_sense_range_m(radio);
    std::vector<HiddenSweepRow> rows;
    rows.reserve(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
        const double radius =
            r_min_m + (r_max_m - r_min_m) * static_cast<double>(k) / (steps - 1);
        HiddenNodeQuery q;
        q.cell_radius_m = radius;
        q.meter_density_per_m2 = density_per_m2;
        q.radio = radio;
        rows.push_back({radius, x, mean_hidden_nodes(q)});
    }
    return rows;
}

}  // namespace smn

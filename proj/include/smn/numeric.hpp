#pragma once

#include <functional>
#include <vector>

namespace smn {

// Nodes and weights of the n-point Gauss-Hermite rule for weight exp(-x^2):
//   integral f(x) exp(-x^2) dx  ~=  sum_i weights[i] * f(nodes[i])
// Nodes are stored in descending order; the rule is symmetric about zero.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(int point_count);

// Composite Simpson with `panels` (even) subintervals; used to seed the
// tolerance of the adaptive run.
double composite_simpson(const std::function<double(double)>& f, double a,
                         double b, int panels);

// Adaptive Simpson on [a, b] to absolute tolerance abs_tol.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth = 48);

}  // namespace smn

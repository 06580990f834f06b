#pragma once

#include <optional>
#include <stdexcept>

namespace incnls {

// Problem parameters for i u_t + Lap u + |x|^{-b} |u|^alpha u = 0 at the
// energy-critical exponent alpha = (4-2b)/(d-2).
struct Params {
    int d = 3;
    double b = 0.0;
    double alpha = 0.0;
    double gamma_t = 0.0;  // gamma = 2(alpha+1)
    double rho_x = 0.0;    // rho = 2d(alpha+1)/(d+2-2b+2alpha)
    double p_x = 0.0;      // p = 2d(alpha+1)/(d-2b)
    bool threshold_valid = false;
    std::optional<double> e0_cache;
};

// Throws std::invalid_argument unless 3<=d<=5 and 0<b<min(2, d/2).
Params make_params(int d, double b);

// Surface area of the unit sphere in R^d.
double unit_sphere_area(int d);

}  // namespace incnls

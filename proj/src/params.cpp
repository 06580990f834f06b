#include "incnls/params.hpp"

#include <algorithm>
#include <cmath>

namespace incnls {

Params make_params(int d, double b) {
    if (d < 3 || d > 5)
        throw std::invalid_argument("make_params: d must be 3, 4 or 5");
    if (!(b > 0.0) || !(b < std::min(2.0, 0.5 * d)))
        throw std::invalid_argument("make_params: need 0 < b < min(2, d/2)");

    Params p;
    p.d = d;
    p.b = b;
    p.alpha = (4.0 - 2.0 * b) / (d - 2);
    p.gamma_t = 2.0 * (p.alpha + 1.0);
    p.rho_x = 2.0 * d * (p.alpha + 1.0) / (d + 2.0 - 2.0 * b + 2.0 * p.alpha);
    p.p_x = 2.0 * d * (p.alpha + 1.0) / (d - 2.0 * b);
    // Stricter range required by the modulation analysis; implies alpha >= 1.
    p.threshold_valid = b < -0.5 * (d - 4.0) * (d - 4.0) + 1.0;
    return p;
}

double unit_sphere_area(int d) {
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace incnls

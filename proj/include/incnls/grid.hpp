#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "incnls/params.hpp"

namespace incnls {

struct StretchSpec {
    enum class Kind { uniform, stretched };
    Kind kind = Kind::stretched;
    // Edge map r(x) = r_max * (theta*x + (1-theta)*(e^{sigma x}-1)/(e^sigma-1)),
    // x uniform in [0,1]. Concentrates cells near the origin.
    double sigma = 6.0;
    double theta = 0.01;

    static StretchSpec uniform() { return {Kind::uniform, 0.0, 0.0}; }
    std::string key() const;
};

// Cell-centered radial mesh. Cell j spans [edge[j], edge[j+1]], its center is
// the arithmetic midpoint, and w[j] = integral of r^{d-1} dr over the cell
// (exact measure, midpoint rule for the integrand).
struct RadialGrid {
    int d = 3;
    int n_cells = 0;
    double r_max = 0.0;
    StretchSpec stretch;
    Eigen::VectorXd edges;  // size n_cells+1, edges[0] = 0
    Eigen::VectorXd r;      // cell centers, size n_cells
    Eigen::VectorXd w;      // exact cell measures of r^{d-1} dr

    std::string key() const;  // cache/serialization key (d, n, r_max, stretch)
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(const Params& params, int n_cells, double r_max,
                  StretchSpec stretch = {});

}  // namespace incnls

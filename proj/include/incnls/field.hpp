#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

#include "incnls/grid.hpp"

namespace incnls {

using Complex = std::complex<double>;

// Complex radial function sampled at the cell centers of a RadialGrid.
struct RadialField {
    GridPtr grid;
    Eigen::VectorXcd v;

    RadialField() = default;
    explicit RadialField(GridPtr g) : grid(std::move(g)) {
        v = Eigen::VectorXcd::Zero(grid->n_cells);
    }
    RadialField(GridPtr g, Eigen::VectorXcd values)
        : grid(std::move(g)), v(std::move(values)) {
        if (v.size() != grid->n_cells)
            throw std::invalid_argument("RadialField: size mismatch");
    }
    int n() const { return static_cast<int>(v.size()); }
};

// Real pair (v1, v2) standing for v1 + i v2; the column convention of the
// linearized system.
struct PairField {
    GridPtr grid;
    Eigen::VectorXd v1, v2;

    PairField() = default;
    explicit PairField(GridPtr g) : grid(std::move(g)) {
        v1 = Eigen::VectorXd::Zero(grid->n_cells);
        v2 = Eigen::VectorXd::Zero(grid->n_cells);
    }
    PairField(GridPtr g, Eigen::VectorXd a, Eigen::VectorXd b)
        : grid(std::move(g)), v1(std::move(a)), v2(std::move(b)) {
        if (v1.size() != grid->n_cells || v2.size() != grid->n_cells)
            throw std::invalid_argument("PairField: size mismatch");
    }
    int n() const { return static_cast<int>(v1.size()); }

    RadialField to_complex() const {
        Eigen::VectorXcd u(v1.size());
        u.real() = v1;
        u.imag() = v2;
        return {grid, std::move(u)};
    }
    static PairField from_complex(const RadialField& f) {
        return {f.grid, f.v.real(), f.v.imag()};
    }
};

inline void require_same_grid(const GridPtr& a, const GridPtr& b) {
    if (a.get() != b.get() && a->key() != b->key())
        throw std::invalid_argument("grid mismatch");
}

}  // namespace incnls

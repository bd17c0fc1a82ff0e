#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rga/reflection.hpp"

namespace rga {

// Uniform tensor-product grid of cell centers on the origin-centered box
// [-W,W]^N with midpoint weights spacing^N, carrying a reflection group that
// permutes the grid points exactly. action[s][i] is the index of
// elements[s] * point(i).
struct Grid {
    int dim = 0;
    double half_width = 0;
    int points_per_axis = 0;
    double spacing = 0;
    ReflectionGroup group;
    std::vector<Vec> points;
    Eigen::VectorXd weights;
    std::vector<std::vector<int>> action;

    std::size_t size() const { return points.size(); }
    const Vec& point(std::size_t i) const { return points[i]; }
    double box_volume() const;
    bool has_origin() const;
    int origin_index() const; // -1 when absent

    // flat index <-> per-axis indices (axis 0 most significant)
    std::vector<int> axis_indices(std::size_t flat) const;
    int flat_index(const std::vector<int>& idx) const;
    // nearest grid index of an arbitrary location, or -1 if off-lattice
    int index_of(const Vec& x, double tol = 1e-9) const;

    // indices at distance >= margin from the box boundary on every axis
    std::vector<int> interior_indices(double margin) const;

    double metric(std::size_t i, std::size_t j) const; // orbit distance
};

std::shared_ptr<const Grid> build_grid(double half_width, int points_per_axis,
                                       const ReflectionGroup& group);

struct GridFunction {
    std::shared_ptr<const Grid> grid;
    Eigen::VectorXd values;
};

GridFunction make_function(std::shared_ptr<const Grid> grid,
                           const std::function<double(const Vec&)>& f);
GridFunction constant_function(std::shared_ptr<const Grid> grid, double c);

double l1_norm(const GridFunction& f);
double l2_norm(const GridFunction& f);
double linf_norm(const GridFunction& f);
// quadrature measure of the superlevel set {|f| > lambda}
double weak_l1_measure(const GridFunction& f, double lambda);
double inner(const GridFunction& f, const GridFunction& g);
double quadrature_sum(const GridFunction& f);

GridFunction symmetrize(const GridFunction& f);
double invariance_defect(const GridFunction& f);

void dump_csv(const GridFunction& f, const std::string& path);
GridFunction load_csv(std::shared_ptr<const Grid> grid, const std::string& path);

} // namespace rga

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rga/errors.hpp"

namespace rga {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Finite set of root vectors in R^N, each normalized to |alpha| = sqrt(2),
// containing with each root exactly its negative among parallels, and closed
// under its own reflections.
struct RootSystem {
    int dim = 0;
    std::vector<Vec> roots;
};

// sigma_alpha(x) = x - 2<x,alpha>/<alpha,alpha> * alpha
Vec reflect(const Vec& root, const Vec& x);

RootSystem make_root_system(int dim, const std::vector<Vec>& roots,
                            double tol = 1e-10);
RootSystem root_system_preset(const std::string& name, int trivial_dim = 1);
RootSystem dihedral_root_system(int m);
RootSystem load_root_system(const std::string& path, double tol = 1e-10);

// Finite group generated by the reflections of a root system. Elements are
// orthogonal matrices; elements[0] is the identity; order within each BFS
// layer is lexicographic on row-major entries, so construction is
// deterministic for a given root list.
struct ReflectionGroup {
    int dim = 0;
    std::vector<Mat> elements;
    std::size_t num_generators = 0;

    std::size_t order() const { return elements.size(); }
    // Index of the element equal to m within tol, or -1.
    int find(const Mat& m, double tol = 1e-9) const;
};

ReflectionGroup generate_group(const RootSystem& rs,
                               std::size_t max_order = 1024,
                               double dedup_tol = 1e-9);
ReflectionGroup trivial_group(int dim);

struct OrbitSet {
    Vec representative;
    std::vector<Vec> points; // deduplicated, lexicographically sorted
};

OrbitSet orbit(const ReflectionGroup& g, const Vec& x, double dedup_tol = 1e-9);

// d(x,y) = min over sigma in G of |x - sigma(y)|. G-bi-invariant pseudometric.
double orbit_distance(const ReflectionGroup& g, const Vec& x, const Vec& y);

} // namespace rga

#pragma once

#include "rga/grid.hpp"

namespace rga {

// Dense kernel-form operator: (Af)(x_i) = sum_j entries(i,j) * w_j * f(x_j).
// Composition folds one quadrature layer; the adjoint is with respect to the
// weighted inner product <f,g> = sum_i w_i f_i g_i, which for kernel form is a
// plain transpose.
struct OperatorMatrix {
    std::shared_ptr<const Grid> grid;
    Mat entries;
};

OperatorMatrix identity_operator(std::shared_ptr<const Grid> grid);
OperatorMatrix zero_operator(std::shared_ptr<const Grid> grid);
// Orbit-averaging projector: the discrete identity on G-invariant functions.
OperatorMatrix orbit_projector(std::shared_ptr<const Grid> grid);

GridFunction apply(const OperatorMatrix& a, const GridFunction& f);
GridFunction apply_adjoint(const OperatorMatrix& a, const GridFunction& f);
OperatorMatrix compose(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix adjoint(const OperatorMatrix& a);
OperatorMatrix add(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix subtract(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix scale(const OperatorMatrix& a, double c);

struct OpNormResult {
    double value = 0;
    bool converged = false;
    int iterations = 0;
};

// Operator L2 norm on the G-invariant subspace, by power iteration on A*A
// with orbit-average projection each step. For the trivial group this is the
// ordinary operator norm w.r.t. the weighted inner product.
OpNormResult operator_l2_norm(const OperatorMatrix& a, double tol = 1e-6,
                              int max_iter = 1000, std::uint64_t seed = 7);

// max over group elements sigma of max_ij |A(sigma i, sigma j) - A(i,j)|
double bi_invariance_defect(const OperatorMatrix& a);

// row i: quadrature sum over the second argument; returns the vector of sums
Eigen::VectorXd row_sums(const OperatorMatrix& a);
Eigen::VectorXd col_sums(const OperatorMatrix& a);

void dump_operator(const OperatorMatrix& a, const std::string& path);
OperatorMatrix load_operator(std::shared_ptr<const Grid> grid, const std::string& path);

} // namespace rga

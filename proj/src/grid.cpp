#include "rga/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rga {

double Grid::box_volume() const {
    return std::pow(2.0 * half_width, dim);
}

bool Grid::has_origin() const { return origin_index() >= 0; }

int Grid::origin_index() const {
    if (points_per_axis % 2 == 0) return -1;
    std::vector<int> mid(dim, points_per_axis / 2);
    return flat_index(mid);
}

std::vector<int> Grid::axis_indices(std::size_t flat) const {
    std::vector<int> idx(dim);
    for (int a = dim - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % points_per_axis);
        flat /= points_per_axis;
    }
    return idx;
}

int Grid::flat_index(const std::vector<int>& idx) const {
    long f = 0;
    for (int a = 0; a < dim; ++a) f = f * points_per_axis + idx[a];
    return static_cast<int>(f);
}

int Grid::index_of(const Vec& x, double tol) const {
    std::vector<int> idx(dim);
    for (int a = 0; a < dim; ++a) {
        const double t = (x[a] + half_width) / spacing - 0.5;
        const long i = std::lround(t);
        if (i < 0 || i >= points_per_axis) return -1;
        if (std::abs(t - static_cast<double>(i)) * spacing > tol) return -1;
        idx[a] = static_cast<int>(i);
    }
    return flat_index(idx);
}

std::vector<int> Grid::interior_indices(double margin) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool ok = true;
        for (int a = 0; a < dim; ++a)
            if (half_width - std::abs(points[i][a]) < margin) { ok = false; break; }
        if (ok) out.push_back(static_cast<int>(i));
    }
    return out;
}

double Grid::metric(std::size_t i, std::size_t j) const {
    double best = std::numeric_limits<double>::infinity();
    const Vec& x = points[i];
    for (const auto& pi : action) {
        const double d = (x - points[pi[j]]).norm();
        if (d < best) best = d;
    }
    return best;
}

std::shared_ptr<const Grid> build_grid(double half_width, int points_per_axis,
                                       const ReflectionGroup& group) {
    if (half_width <= 0) throw ConfigInvalid("box half-width must be positive");
    if (points_per_axis < 1) throw ConfigInvalid("points per axis must be >= 1");
    auto g = std::make_shared<Grid>();
    g->dim = group.dim;
    g->half_width = half_width;
    g->points_per_axis = points_per_axis;
    g->spacing = 2.0 * half_width / points_per_axis;
    g->group = group;

    std::size_t total = 1;
    for (int a = 0; a < g->dim; ++a) total *= static_cast<std::size_t>(points_per_axis);
    if (total > 2'000'000)
        throw ConfigInvalid("grid would have " + std::to_string(total) + " points");

    g->points.reserve(total);
    std::vector<int> idx(g->dim, 0);
    for (std::size_t f = 0; f < total; ++f) {
        const auto ai = g->axis_indices(f);
        Vec p(g->dim);
        for (int a = 0; a < g->dim; ++a)
            p[a] = -half_width + (ai[a] + 0.5) * g->spacing;
        g->points.push_back(p);
    }
    g->weights = Eigen::VectorXd::Constant(static_cast<long>(total),
                                           std::pow(g->spacing, g->dim));

    // Permutation action; a group element that moves some grid point off the
    // lattice is incompatible with a tensor grid.
    const double tol = 1e-9 * g->spacing;
    for (std::size_t s = 0; s < group.order(); ++s) {
        std::vector<int> pi(total);
        std::vector<char> hit(total, 0);
        for (std::size_t i = 0; i < total; ++i) {
            const Vec q = group.elements[s] * g->points[i];
            const int j = g->index_of(q, tol);
            if (j < 0 || hit[j])
                throw IncompatibleGroup(
                    "group element " + std::to_string(s) + " does not permute the grid (point " +
                    std::to_string(i) + ")");
            hit[j] = 1;
            pi[i] = j;
        }
        g->action.push_back(std::move(pi));
    }

    // composition consistency: pi_{sigma*tau} = pi_sigma o pi_tau
    for (std::size_t s = 0; s < group.order(); ++s)
        for (std::size_t t = 0; t < group.order(); ++t) {
            const int st = group.find(group.elements[s] * group.elements[t]);
            if (st < 0) throw ClosureViolation("group not closed under multiplication");
            const std::size_t probe = total / 2;
            if (g->action[static_cast<std::size_t>(st)][probe] !=
                g->action[s][static_cast<std::size_t>(g->action[t][probe])])
                throw IncompatibleGroup("action table violates composition");
        }
    return g;
}

GridFunction make_function(std::shared_ptr<const Grid> grid,
                           const std::function<double(const Vec&)>& f) {
    GridFunction out;
    out.grid = grid;
    out.values.resize(static_cast<long>(grid->size()));
    for (std::size_t i = 0; i < grid->size(); ++i)
        out.values[static_cast<long>(i)] = f(grid->point(i));
    return out;
}

GridFunction constant_function(std::shared_ptr<const Grid> grid, double c) {
    GridFunction out;
    out.grid = grid;
    out.values = Eigen::VectorXd::Constant(static_cast<long>(grid->size()), c);
    return out;
}

static void check_same_grid(const GridFunction& f, const GridFunction& g) {
    if (f.grid != g.grid) throw GridMismatch("functions live on different grids");
}

double l1_norm(const GridFunction& f) {
    return f.grid->weights.dot(f.values.cwiseAbs());
}

double l2_norm(const GridFunction& f) {
    return std::sqrt(f.grid->weights.dot(f.values.cwiseAbs2()));
}

double linf_norm(const GridFunction& f) {
    return f.values.size() ? f.values.cwiseAbs().maxCoeff() : 0.0;
}

double weak_l1_measure(const GridFunction& f, double lambda) {
    double m = 0;
    for (long i = 0; i < f.values.size(); ++i)
        if (std::abs(f.values[i]) > lambda) m += f.grid->weights[i];
    return m;
}

double inner(const GridFunction& f, const GridFunction& g) {
    check_same_grid(f, g);
    return (f.values.array() * g.values.array() * f.grid->weights.array()).sum();
}

double quadrature_sum(const GridFunction& f) {
    return f.grid->weights.dot(f.values);
}

GridFunction symmetrize(const GridFunction& f) {
    GridFunction out;
    out.grid = f.grid;
    out.values = Eigen::VectorXd::Zero(f.values.size());
    const auto& act = f.grid->action;
    for (const auto& pi : act)
        for (long i = 0; i < f.values.size(); ++i)
            out.values[i] += f.values[pi[static_cast<std::size_t>(i)]];
    out.values /= static_cast<double>(act.size());
    return out;
}

double invariance_defect(const GridFunction& f) {
    double d = 0;
    for (const auto& pi : f.grid->action)
        for (long i = 0; i < f.values.size(); ++i)
            d = std::max(d, std::abs(f.values[pi[static_cast<std::size_t>(i)]] - f.values[i]));
    return d;
}

void dump_csv(const GridFunction& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open '" + path + "' for writing");
    for (int a = 0; a < f.grid->dim; ++a) out << "x" << (a + 1) << ",";
    out << "value\n";
    char buf[64];
    for (std::size_t i = 0; i < f.grid->size(); ++i) {
        for (int a = 0; a < f.grid->dim; ++a) {
            std::snprintf(buf, sizeof buf, "%.17g", f.grid->point(i)[a]);
            out << buf << ",";
        }
        std::snprintf(buf, sizeof buf, "%.17g", f.values[static_cast<long>(i)]);
        out << buf << "\n";
    }
    if (!out) throw IoFailure("write failed for '" + path + "'");
}

GridFunction load_csv(std::shared_ptr<const Grid> grid, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoFailure("empty csv '" + path + "'");
    GridFunction out;
    out.grid = grid;
    out.values.resize(static_cast<long>(grid->size()));
    long row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        std::vector<double> xs;
        while (std::getline(ls, cell, ',')) xs.push_back(std::stod(cell));
        if (static_cast<int>(xs.size()) != grid->dim + 1)
            throw IoFailure("bad column count in '" + path + "'");
        if (row >= out.values.size()) throw GridMismatch("csv has too many rows");
        Vec p(grid->dim);
        for (int a = 0; a < grid->dim; ++a) p[a] = xs[static_cast<std::size_t>(a)];
        const int idx = grid->index_of(p, 1e-6 * grid->spacing);
        if (idx < 0) throw GridMismatch("csv point not on grid at row " + std::to_string(row));
        out.values[idx] = xs.back();
        ++row;
    }
    if (row != out.values.size()) throw GridMismatch("csv row count != grid size");
    return out;
}

} // namespace rga

#include "rga/operator.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>

namespace rga {

namespace {

void check_grid(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.grid != b.grid) throw GridMismatch("operators live on different grids");
}

} // namespace

OperatorMatrix identity_operator(std::shared_ptr<const Grid> grid) {
    OperatorMatrix a;
    a.grid = grid;
    const long n = static_cast<long>(grid->size());
    a.entries = Mat::Zero(n, n);
    for (long i = 0; i < n; ++i) a.entries(i, i) = 1.0 / grid->weights[i];
    return a;
}

OperatorMatrix zero_operator(std::shared_ptr<const Grid> grid) {
    OperatorMatrix a;
    a.grid = grid;
    const long n = static_cast<long>(grid->size());
    a.entries = Mat::Zero(n, n);
    return a;
}

OperatorMatrix orbit_projector(std::shared_ptr<const Grid> grid) {
    OperatorMatrix p = zero_operator(grid);
    const long n = static_cast<long>(grid->size());
    std::vector<int> orbit_size(static_cast<std::size_t>(n), 0);
    for (long i = 0; i < n; ++i) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        int cnt = 0;
        for (const auto& pi : grid->action) {
            const int j = pi[static_cast<std::size_t>(i)];
            if (!seen[static_cast<std::size_t>(j)]) { seen[static_cast<std::size_t>(j)] = 1; ++cnt; }
        }
        orbit_size[static_cast<std::size_t>(i)] = cnt;
    }
    for (long i = 0; i < n; ++i) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        for (const auto& pi : grid->action) {
            const int j = pi[static_cast<std::size_t>(i)];
            if (seen[static_cast<std::size_t>(j)]) continue;
            seen[static_cast<std::size_t>(j)] = 1;
            p.entries(i, j) = 1.0 / (orbit_size[static_cast<std::size_t>(i)] * grid->weights[j]);
        }
    }
    return p;
}

GridFunction apply(const OperatorMatrix& a, const GridFunction& f) {
    if (a.grid != f.grid) throw GridMismatch("operator/function grid mismatch");
    GridFunction out;
    out.grid = f.grid;
    out.values = a.entries * (f.grid->weights.cwiseProduct(f.values));
    return out;
}

GridFunction apply_adjoint(const OperatorMatrix& a, const GridFunction& f) {
    if (a.grid != f.grid) throw GridMismatch("operator/function grid mismatch");
    GridFunction out;
    out.grid = f.grid;
    out.values = a.entries.transpose() * (f.grid->weights.cwiseProduct(f.values));
    return out;
}

OperatorMatrix compose(const OperatorMatrix& a, const OperatorMatrix& b) {
    check_grid(a, b);
    OperatorMatrix c;
    c.grid = a.grid;
    c.entries = a.entries * a.grid->weights.asDiagonal() * b.entries;
    return c;
}

OperatorMatrix adjoint(const OperatorMatrix& a) {
    OperatorMatrix c;
    c.grid = a.grid;
    c.entries = a.entries.transpose();
    return c;
}

OperatorMatrix add(const OperatorMatrix& a, const OperatorMatrix& b) {
    check_grid(a, b);
    return {a.grid, a.entries + b.entries};
}

OperatorMatrix subtract(const OperatorMatrix& a, const OperatorMatrix& b) {
    check_grid(a, b);
    return {a.grid, a.entries - b.entries};
}

OperatorMatrix scale(const OperatorMatrix& a, double c) {
    return {a.grid, c * a.entries};
}

OpNormResult operator_l2_norm(const OperatorMatrix& a, double tol, int max_iter,
                              std::uint64_t seed) {
    OpNormResult res;
    const long n = a.entries.rows();
    if (a.entries.cwiseAbs().maxCoeff() == 0.0) {
        res.converged = true;
        return res;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    GridFunction v{a.grid, Eigen::VectorXd(n)};
    for (long i = 0; i < n; ++i) v.values[i] = u(rng);
    v = symmetrize(v);
    double nv = l2_norm(v);
    if (nv == 0.0) {  // anti-invariant start is measure zero, but be safe
        v.values.setOnes();
        nv = l2_norm(v);
    }
    v.values /= nv;

    double sigma_prev = -1;
    for (int it = 1; it <= max_iter; ++it) {
        GridFunction av = apply(a, v);
        const double sigma = l2_norm(av);
        res.iterations = it;
        res.value = sigma;
        if (sigma == 0.0) { res.converged = true; return res; }
        if (sigma_prev >= 0 && std::abs(sigma - sigma_prev) <= tol * std::max(sigma, 1e-300)) {
            res.converged = true;
            return res;
        }
        sigma_prev = sigma;
        GridFunction w = apply_adjoint(a, av);
        w = symmetrize(w);
        const double nw = l2_norm(w);
        if (nw == 0.0) { res.converged = true; return res; }
        v.values = w.values / nw;
    }
    return res; // best estimate, converged=false
}

double bi_invariance_defect(const OperatorMatrix& a) {
    double d = 0;
    const long n = a.entries.rows();
    for (const auto& pi : a.grid->action)
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j)
                d = std::max(d, std::abs(a.entries(pi[static_cast<std::size_t>(i)],
                                                   pi[static_cast<std::size_t>(j)]) -
                                         a.entries(i, j)));
    return d;
}

Eigen::VectorXd row_sums(const OperatorMatrix& a) {
    return a.entries * a.grid->weights;
}

Eigen::VectorXd col_sums(const OperatorMatrix& a) {
    return a.entries.transpose() * a.grid->weights;
}

namespace {
constexpr std::uint32_t kOpMagic = 0x52474F50u; // "RGOP"
constexpr std::uint32_t kOpVersion = 1;
}

void dump_operator(const OperatorMatrix& a, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open '" + path + "' for writing");
    const std::uint64_t n = static_cast<std::uint64_t>(a.entries.rows());
    out.write(reinterpret_cast<const char*>(&kOpMagic), 4);
    out.write(reinterpret_cast<const char*>(&kOpVersion), 4);
    out.write(reinterpret_cast<const char*>(&n), 8);
    for (std::uint64_t i = 0; i < n; ++i) {
        const Eigen::RowVectorXd row = a.entries.row(static_cast<long>(i));
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(n * sizeof(double)));
    }
    if (!out) throw IoFailure("write failed for '" + path + "'");
}

OperatorMatrix load_operator(std::shared_ptr<const Grid> grid, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open '" + path + "'");
    std::uint32_t magic = 0, version = 0;
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&magic), 4);
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&n), 8);
    if (!in || magic != kOpMagic) throw IoFailure("bad operator file header");
    if (version != kOpVersion) throw IoFailure("unsupported operator file version");
    if (n != grid->size()) throw GridMismatch("operator file size != grid size");
    OperatorMatrix a;
    a.grid = grid;
    a.entries.resize(static_cast<long>(n), static_cast<long>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
        Eigen::RowVectorXd row(static_cast<long>(n));
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
        a.entries.row(static_cast<long>(i)) = row;
    }
    if (!in) throw IoFailure("truncated operator file '" + path + "'");
    return a;
}

} // namespace rga

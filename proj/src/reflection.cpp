#include "rga/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rga {

namespace {

const double kRootNorm = std::sqrt(2.0);

bool lex_less(const Mat& a, const Mat& b) {
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            if (a(i, j) < b(i, j)) return true;
            if (a(i, j) > b(i, j)) return false;
        }
    return false;
}

bool lex_less_vec(const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

Mat reflection_matrix(const Vec& alpha) {
    const int n = static_cast<int>(alpha.size());
    return Mat::Identity(n, n) - (2.0 / alpha.squaredNorm()) * (alpha * alpha.transpose());
}

} // namespace

Vec reflect(const Vec& root, const Vec& x) {
    const double n2 = root.squaredNorm();
    if (n2 <= 0.0) throw ZeroRoot("reflect() given a zero root vector");
    return x - (2.0 * root.dot(x) / n2) * root;
}

RootSystem make_root_system(int dim, const std::vector<Vec>& roots, double tol) {
    RootSystem rs;
    rs.dim = dim;
    for (const Vec& r : roots) {
        if (r.size() != dim)
            throw ConfigInvalid("root dimension mismatch");
        if (r.norm() < tol)
            throw ZeroRoot("root system contains a (near-)zero vector");
        if (std::abs(r.norm() - kRootNorm) > tol)
            throw NormViolation("root |alpha| != sqrt(2): |alpha| = " + std::to_string(r.norm()));
    }
    // Parallel roots must be exactly the pair {alpha, -alpha}.
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            const double c = roots[i].dot(roots[j]) / (roots[i].norm() * roots[j].norm());
            if (std::abs(std::abs(c) - 1.0) < tol) {
                if ((roots[i] + roots[j]).norm() > tol)
                    throw ParallelViolation("parallel roots are not an antipodal pair");
            }
        }
    for (const Vec& r : roots) {
        bool has_neg = false;
        for (const Vec& s : roots)
            if ((r + s).norm() < tol) { has_neg = true; break; }
        if (!has_neg) throw ParallelViolation("root without its negative");
    }
    // Closure: sigma_alpha(R) = R for every root alpha.
    for (const Vec& a : roots)
        for (const Vec& r : roots) {
            const Vec img = reflect(a, r);
            bool found = false;
            for (const Vec& s : roots)
                if ((img - s).norm() < tol) { found = true; break; }
            if (!found)
                throw ClosureViolation("sigma_alpha(R) leaves the root set");
        }
    rs.roots = roots;
    std::sort(rs.roots.begin(), rs.roots.end(), lex_less_vec);
    return rs;
}

RootSystem root_system_preset(const std::string& name, int trivial_dim) {
    auto v1 = [](double a) { Vec v(1); v << a; return v; };
    auto v2 = [](double a, double b) { Vec v(2); v << a, b; return v; };
    if (name == "A1") {
        return make_root_system(1, {v1(kRootNorm), v1(-kRootNorm)});
    }
    if (name == "A1xA1") {
        return make_root_system(2, {v2(kRootNorm, 0), v2(-kRootNorm, 0),
                                    v2(0, kRootNorm), v2(0, -kRootNorm)});
    }
    if (name == "B2") {
        return make_root_system(2, {v2(kRootNorm, 0), v2(-kRootNorm, 0),
                                    v2(0, kRootNorm), v2(0, -kRootNorm),
                                    v2(1, 1), v2(1, -1), v2(-1, 1), v2(-1, -1)});
    }
    if (name == "A2") return dihedral_root_system(3);
    if (name == "TRIVIAL") {
        RootSystem rs;
        rs.dim = trivial_dim;
        return rs;
    }
    throw ConfigInvalid("unknown root system preset '" + name + "'");
}

RootSystem dihedral_root_system(int m) {
    if (m < 1) throw ConfigInvalid("dihedral order parameter must be >= 1");
    std::vector<Vec> roots;
    for (int j = 0; j < 2 * m; ++j) {
        const double th = M_PI * j / m;
        Vec v(2);
        v << kRootNorm * std::cos(th), kRootNorm * std::sin(th);
        // snap near-zero components so antipodal pairs match exactly
        for (int i = 0; i < 2; ++i)
            if (std::abs(v[i]) < 1e-15) v[i] = 0.0;
        roots.push_back(v);
    }
    return make_root_system(2, roots);
}

RootSystem load_root_system(const std::string& path, double tol) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open root file '" + path + "'");
    std::vector<Vec> roots;
    int dim = -1;
    std::string line;
    while (std::getline(in, line)) {
        const auto h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        std::istringstream ls(line);
        std::vector<double> xs;
        double x;
        while (ls >> x) xs.push_back(x);
        if (xs.empty()) continue;
        if (dim < 0) dim = static_cast<int>(xs.size());
        if (static_cast<int>(xs.size()) != dim)
            throw IoFailure("inconsistent root dimensions in '" + path + "'");
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v[i] = xs[i];
        roots.push_back(v);
    }
    if (roots.empty()) throw IoFailure("no roots found in '" + path + "'");
    return make_root_system(dim, roots, tol);
}

int ReflectionGroup::find(const Mat& m, double tol) const {
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if ((elements[i] - m).cwiseAbs().maxCoeff() <= tol)
            return static_cast<int>(i);
    }
    return -1;
}

ReflectionGroup generate_group(const RootSystem& rs, std::size_t max_order,
                               double dedup_tol) {
    ReflectionGroup g;
    g.dim = rs.dim;
    g.elements.push_back(Mat::Identity(rs.dim, rs.dim));

    std::vector<Mat> gens;
    for (const Vec& a : rs.roots) {
        const Mat s = reflection_matrix(a);
        bool dup = false;
        for (const Mat& t : gens)
            if ((s - t).cwiseAbs().maxCoeff() <= dedup_tol) { dup = true; break; }
        if (!dup && (s - g.elements[0]).cwiseAbs().maxCoeff() > dedup_tol)
            gens.push_back(s);
    }
    std::sort(gens.begin(), gens.end(), lex_less);
    g.num_generators = gens.size();

    // BFS closure over right multiplication by generators.
    std::vector<Mat> frontier = {g.elements[0]};
    while (!frontier.empty()) {
        std::vector<Mat> next;
        for (const Mat& e : frontier)
            for (const Mat& s : gens) {
                const Mat p = e * s;
                if (g.find(p, dedup_tol) >= 0) continue;
                bool dup = false;
                for (const Mat& q : next)
                    if ((p - q).cwiseAbs().maxCoeff() <= dedup_tol) { dup = true; break; }
                if (!dup) next.push_back(p);
            }
        std::sort(next.begin(), next.end(), lex_less);
        for (const Mat& p : next) {
            g.elements.push_back(p);
            if (g.elements.size() > max_order)
                throw OrderCapExceeded("group closure exceeded cap " + std::to_string(max_order));
        }
        frontier = std::move(next);
    }
    return g;
}

ReflectionGroup trivial_group(int dim) {
    ReflectionGroup g;
    g.dim = dim;
    g.elements.push_back(Mat::Identity(dim, dim));
    return g;
}

OrbitSet orbit(const ReflectionGroup& g, const Vec& x, double dedup_tol) {
    OrbitSet o;
    o.representative = x;
    for (const Mat& e : g.elements) {
        const Vec p = e * x;
        bool dup = false;
        for (const Vec& q : o.points)
            if ((p - q).norm() <= dedup_tol) { dup = true; break; }
        if (!dup) o.points.push_back(p);
    }
    std::sort(o.points.begin(), o.points.end(), lex_less_vec);
    return o;
}

double orbit_distance(const ReflectionGroup& g, const Vec& x, const Vec& y) {
    double best = std::numeric_limits<double>::infinity();
    for (const Mat& e : g.elements) {
        const double d = (x - e * y).norm();
        if (d < best) best = d;
    }
    return best;
}

} // namespace rga

#include "rga/cz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rga {

namespace {

// enumerate the flat indices of grid points lying in [low, low+side)^N
std::vector<int> points_in_box(const Grid& g, const Vec& low, double side) {
    const int N = g.dim;
    const double eps = 1e-9 * g.spacing;
    std::vector<int> lo(N), hi(N); // per-axis half-open index ranges
    for (int a = 0; a < N; ++a) {
        double t0 = (low[a] + g.half_width) / g.spacing - 0.5;
        double t1 = (low[a] + side + g.half_width) / g.spacing - 0.5;
        lo[a] = std::max(0, static_cast<int>(std::ceil(t0 - eps)));
        hi[a] = std::min(g.points_per_axis - 1, static_cast<int>(std::floor(t1 - eps)));
        if (std::abs(t1 - std::round(t1)) < eps) hi[a] = std::min(hi[a], static_cast<int>(std::round(t1)) - 1);
        if (lo[a] > hi[a]) return {};
    }
    std::vector<int> out;
    std::vector<int> idx(lo);
    while (true) {
        out.push_back(g.flat_index(idx));
        int a = N - 1;
        while (a >= 0 && ++idx[a] > hi[a]) idx[a] = lo[a], --a;
        if (a < 0) break;
    }
    return out;
}

double point_set_distance(const Grid& g, const std::vector<int>& q,
                          const std::vector<int>& other) {
    double best = std::numeric_limits<double>::infinity();
    for (int i : q)
        for (int j : other)
            best = std::min(best, (g.points[i] - g.points[j]).norm());
    return best;
}

} // namespace

WhitneyResult whitney_cover(const Grid& g, const std::vector<char>& in_set) {
    if (in_set.size() != g.size()) throw GridMismatch("whitney_cover mask size");
    WhitneyResult res;
    std::vector<int> complement;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!in_set[i]) complement.push_back(static_cast<int>(i));
    res.whole_grid = complement.empty();
    const double sqrtN = std::sqrt(static_cast<double>(g.dim));

    struct Frame {
        int level;
        Vec low;
        double side;
    };
    std::vector<Frame> stack;
    Vec root_low = Vec::Constant(g.dim, -g.half_width);
    stack.push_back({0, root_low, 2.0 * g.half_width});

    while (!stack.empty()) {
        Frame fr = stack.back();
        stack.pop_back();
        std::vector<int> pts = points_in_box(g, fr.low, fr.side);
        if (pts.empty()) continue;
        bool allin = std::all_of(pts.begin(), pts.end(),
                                 [&](int i) { return in_set[i] != 0; });
        bool anyin = allin || std::any_of(pts.begin(), pts.end(),
                                          [&](int i) { return in_set[i] != 0; });
        if (!anyin) continue;

        double dist = complement.empty()
                          ? std::numeric_limits<double>::infinity()
                          : point_set_distance(g, pts, complement);
        double diam = fr.side * sqrtN;
        if (allin && dist >= diam) {
            WhitneyCube q;
            q.level = fr.level;
            q.side = fr.side;
            q.low = fr.low;
            q.center = fr.low + Vec::Constant(g.dim, 0.5 * fr.side);
            q.points = std::move(pts);
            q.dist_to_complement = dist;
            res.cubes.push_back(std::move(q));
            continue;
        }
        if (0.5 * fr.side < g.spacing) {
            // resolution floor: set points here cannot be absorbed
            for (int i : pts)
                if (in_set[i]) res.slivers.push_back(i);
            continue;
        }
        int children = 1 << g.dim;
        for (int c = 0; c < children; ++c) {
            Vec low = fr.low;
            for (int a = 0; a < g.dim; ++a)
                if (c & (1 << a)) low[a] += 0.5 * fr.side;
            stack.push_back({fr.level + 1, low, 0.5 * fr.side});
        }
    }
    std::sort(res.slivers.begin(), res.slivers.end());
    std::sort(res.cubes.begin(), res.cubes.end(), [](const WhitneyCube& a, const WhitneyCube& b) {
        if (a.level != b.level) return a.level < b.level;
        for (int t = 0; t < a.low.size(); ++t)
            if (a.low[t] != b.low[t]) return a.low[t] < b.low[t];
        return false;
    });
    return res;
}

CZOutput cz_decompose(const GridFunction& f, double lambda) {
    const Grid& g = *f.grid;
    double defect = invariance_defect(f);
    if (defect > 1e-9)
        throw NotInvariant("cz input invariance defect " + std::to_string(defect));
    if (lambda <= 0) throw ConfigInvalid("cz height must be positive");

    CZOutput out;
    out.lambda = lambda;
    out.maximal = symmetrize(maximal_function(f));
    out.in_E.assign(g.size(), 0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (out.maximal.values[static_cast<Eigen::Index>(i)] > lambda) out.in_E[i] = 1, ++count;
    if (count == g.size())
        throw LambdaTooSmall("exceptional set is the whole grid at height " +
                             std::to_string(lambda));

    WhitneyResult wh = whitney_cover(g, out.in_E);
    out.sliver_count = static_cast<int>(wh.slivers.size());

    out.good = f;
    const std::size_t order = g.group.order();
    const double inv_order = 1.0 / static_cast<double>(order);
    for (WhitneyCube& q : wh.cubes) {
        CZPiece piece;
        double wsum = 0, wfsum = 0;
        for (int i : q.points) {
            wsum += g.weights[i];
            wfsum += g.weights[i] * f.values[i];
        }
        piece.mean = wfsum / wsum;
        piece.b = constant_function(f.grid, 0.0);
        for (std::size_t s = 0; s < order; ++s) {
            // each orbit copy is recentered by its own quadrature mean, so
            // every sigma-term integrates to zero exactly
            double cw = 0, cwf = 0;
            for (int i : q.points) {
                int j = g.action[s][i];
                cw += g.weights[j];
                cwf += g.weights[j] * f.values[j];
            }
            double m = cwf / cw;
            for (int i : q.points) {
                int j = g.action[s][i];
                piece.b.values[j] += inv_order * (f.values[j] - m);
            }
        }
        for (std::size_t i = 0; i < g.size(); ++i)
            out.good.values[static_cast<Eigen::Index>(i)] -= piece.b.values[static_cast<Eigen::Index>(i)];
        piece.cube = std::move(q);
        out.bad.push_back(std::move(piece));
    }

    out.in_orbit_dilate.assign(g.size(), 0);
    const double sqrtN = std::sqrt(static_cast<double>(g.dim));
    for (const CZPiece& piece : out.bad) {
        double radius = 4.0 * sqrtN * piece.cube.side;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (out.in_orbit_dilate[i]) continue;
            if (orbit_distance(g.group, g.points[i], piece.cube.center) <= radius)
                out.in_orbit_dilate[i] = 1;
        }
    }
    return out;
}

VerificationReport verify_cz(const CZOutput& out, const GridFunction& f,
                             double measure_const_ceiling, double l1_const_ceiling) {
    const Grid& g = *f.grid;
    VerificationReport rep;
    rep.suite = "cz";
    const double lambda = out.lambda;
    const double f1 = l1_norm(f);
    const double fscale = std::max(1.0, linf_norm(f));

    // (i) exact reconstruction
    double rec = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double s = out.good.values[static_cast<Eigen::Index>(i)];
        for (const CZPiece& p : out.bad) s += p.b.values[static_cast<Eigen::Index>(i)];
        rec = std::max(rec, std::abs(s - f.values[static_cast<Eigen::Index>(i)]));
    }
    rep.add_bounded("reconstruction_defect", rec / fscale, 1e-12);

    // (ii) bad-piece cancellation and (iii) orbit support
    double cancel = 0, support_leak = 0;
    for (const CZPiece& p : out.bad) {
        cancel = std::max(cancel, std::abs(quadrature_sum(p.b)));
        std::vector<char> mask(g.size(), 0);
        for (std::size_t s = 0; s < g.group.order(); ++s)
            for (int i : p.cube.points) mask[g.action[s][i]] = 1;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!mask[i]) support_leak = std::max(support_leak, std::abs(p.b.values[static_cast<Eigen::Index>(i)]));
    }
    rep.add_bounded("bad_cancellation", cancel / std::max(1.0, f1), 1e-10);
    rep.add_bounded("bad_support_leak", support_leak, 0.0);

    // (iv) invariance of the parts
    double inv = invariance_defect(out.good);
    for (const CZPiece& p : out.bad) inv = std::max(inv, invariance_defect(p.b));
    rep.add_bounded("part_invariance_defect", inv / fscale, 1e-8);

    // (v) good part bounds
    double off = 0, global = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double v = std::abs(out.good.values[static_cast<Eigen::Index>(i)]);
        global = std::max(global, v);
        if (!out.in_orbit_dilate[i] && !out.in_E[i]) off = std::max(off, v);
    }
    rep.add_bounded("good_bound_off_dilate", off / lambda, 1.0 + 1e-12);
    rep.add_bounded("good_bound_global", global / lambda, l1_const_ceiling);

    // (vi) whitney geometry, recomputed from the emitted cubes
    std::vector<int> complement;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!out.in_E[i]) complement.push_back(static_cast<int>(i));
    const double sqrtN = std::sqrt(static_cast<double>(g.dim));
    double geom_lo = std::numeric_limits<double>::infinity();
    double geom_hi = 0;
    bool disjoint = true, inside = true;
    std::vector<int> coverage(g.size(), 0);
    for (const CZPiece& p : out.bad) {
        const WhitneyCube& q = p.cube;
        for (int i : q.points) {
            if (!out.in_E[i]) inside = false;
            if (++coverage[i] > 1) disjoint = false;
        }
        if (!complement.empty()) {
            double dist = point_set_distance(g, q.points, complement);
            double diam = q.side * sqrtN;
            geom_lo = std::min(geom_lo, dist / diam);
            geom_hi = std::max(geom_hi, dist / diam);
        }
    }
    bool covered = true;
    std::size_t e_count = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!out.in_E[i]) continue;
        ++e_count;
        if (coverage[i] == 0) covered = false; // slivers excluded below
    }
    std::size_t covered_or_sliver = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (out.in_E[i] && coverage[i] > 0) ++covered_or_sliver;
    covered = covered_or_sliver + static_cast<std::size_t>(out.sliver_count) == e_count;
    rep.add_flag("cubes_inside_set", inside);
    rep.add_flag("cubes_disjoint", disjoint);
    rep.add_flag("set_covered", covered);
    if (!out.bad.empty() && !complement.empty()) {
        rep.add("whitney_ratio_min", geom_lo);
        rep.add_bounded("whitney_ratio_min_defect", std::max(0.0, 1.0 - geom_lo), 1e-12);
        rep.add_bounded("whitney_ratio_max", geom_hi, 4.0 + 1e-12);
    }
    rep.add("sliver_fraction",
            e_count ? static_cast<double>(out.sliver_count) / static_cast<double>(e_count) : 0.0);

    // (vii) measure bookkeeping
    double wE = 0, wD = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (out.in_E[i]) wE += g.weights[i];
        if (out.in_orbit_dilate[i]) wD += g.weights[i];
    }
    if (f1 > 0) {
        rep.add_bounded("measure_constant", lambda * wE / f1, measure_const_ceiling);
        rep.add("dilate_measure_constant", lambda * wD / f1);
    }

    // (viii) L1 bookkeeping
    double b1 = 0;
    for (const CZPiece& p : out.bad) b1 += l1_norm(p.b);
    if (f1 > 0) {
        rep.add_bounded("bad_l1_constant", b1 / f1, l1_const_ceiling);
        rep.add("good_l1_constant", l1_norm(out.good) / f1);
    }
    rep.add("cube_count", static_cast<double>(out.bad.size()));
    return rep;
}

VerificationReport weak11_experiment(const std::vector<GridFunction>& corpus,
                                     const OperatorMatrix* op,
                                     const std::vector<double>& lambdas,
                                     double ratio_ceiling) {
    if (corpus.empty() || lambdas.empty())
        throw ConfigInvalid("weak11_experiment needs a corpus and lambda grid");
    VerificationReport rep;
    rep.suite = "weak11";
    rep.config["operator"] = op ? "kernel" : "identity";

    std::vector<double> max_ratio(lambdas.size(), 0.0);
    for (const GridFunction& f : corpus) {
        double f1 = l1_norm(f);
        if (f1 <= 0) continue;
        GridFunction af = op ? apply(*op, f) : f;
        for (std::size_t t = 0; t < lambdas.size(); ++t) {
            double lam = lambdas[t] * f1;
            double ratio = lam * weak_l1_measure(af, lam) / f1;
            max_ratio[t] = std::max(max_ratio[t], ratio);
        }
    }
    double overall = 0;
    for (std::size_t t = 0; t < lambdas.size(); ++t) {
        rep.add("max_ratio_lambda" + std::to_string(t), max_ratio[t]);
        overall = std::max(overall, max_ratio[t]);
    }
    rep.add_bounded("max_ratio", overall, op ? ratio_ceiling : 1.0 + 1e-12);
    if (lambdas.size() >= 2) {
        // slope of log(max ratio) against log(lambda); growth means trouble
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (std::size_t t = 0; t < lambdas.size(); ++t) {
            if (max_ratio[t] <= 0) continue;
            double x = std::log(lambdas[t]), y = std::log(max_ratio[t]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++cnt;
        }
        if (cnt >= 2) {
            double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
            rep.add_bounded("log_ratio_slope", slope, 0.25);
        }
    }
    return rep;
}

} // namespace rga

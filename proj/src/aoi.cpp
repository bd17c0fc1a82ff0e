#include "rga/aoi.hpp"

#include <cmath>
#include <random>

/*
 * Coifman-style approximation of the identity adapted to the orbit distance
 * d(x,y) = min_{sigma in G} |x - sigma(y)| of a finite reflection group G.
 *
 * Starting from the bump average
 *     T_k f(x) = / h(2^k d(x,y)) f(y) dy ,         h = 1 on [0,1], 0 on [2,oo)
 * set M_k = 1/T_k(1), W_k = 1/(T_k(M_k 1)) as multiplication operators and
 *     S_k = M_k T_k W_k T_k M_k .
 * The sandwich makes both marginals exact:
 *     / S_k(x,y) dy = 1  and  / S_k(x,y) dx = 1
 * identically (an algebraic identity, independent of quadrature accuracy),
 * while S_k(x,y) = 0 once d(x,y) >= 2^(2-k) because the two T_k factors each
 * reach no farther than 2^(1-k).
 *
 * Bands are differences D_k = S_k - S_{k-1}; the coarsest band keeps its
 * low-pass part (D_{k_min} = S_{k_min}) so that sum_k D_k = S_{k_max}, a
 * finite telescope.  On a fixed grid the scales close: as soon as
 * 2^k * spacing >= 2 the kernel h(2^k d) only sees d = 0, i.e. the orbit of
 * the point itself, and S_k becomes exact orbit averaging.
 */

namespace rga {

BumpProfile default_bump() {
    BumpProfile b;
    b.h = [](double t) {
        t = std::abs(t);
        if (t <= 1.0) return 1.0;
        if (t >= 2.0) return 0.0;
        const double s = t - 1.0;
        return 1.0 - 3.0 * s * s + 2.0 * s * s * s;
    };
    b.lipschitz = 1.5;
    return b;
}

double c2_plateau_bump(double t) {
    t = std::abs(t);
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    const double s = t - 1.0;
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

int closure_scale(const Grid& grid) {
    int k = 0;
    while (std::ldexp(grid.spacing, k) < 2.0) ++k;
    return k;
}

bool scale_well_resolved(const Grid& grid, int k) {
    return std::ldexp(1.0, -k) >= 4.0 * grid.spacing;
}

static void check_scale_window(const Grid& grid, int k) {
    if (std::ldexp(1.0, 1 - k) > grid.half_width)
        throw ScaleOutOfRange("scale 2^(1-k) exceeds the box half-width at k=" +
                              std::to_string(k));
    if (std::ldexp(1.0, -k) < 0.25 * grid.spacing)
        throw ScaleOutOfRange("scale 2^-k below spacing/4 at k=" + std::to_string(k));
}

OperatorMatrix build_Tk(std::shared_ptr<const Grid> grid, const BumpProfile& bump, int k) {
    check_scale_window(*grid, k);
    const long n = static_cast<long>(grid->size());
    OperatorMatrix t = zero_operator(grid);
    const double scale = std::ldexp(1.0, k);
    const double reach = std::ldexp(1.0, 1 - k); // h(2^k d) = 0 for d >= reach
    // |x - sigma y| >= | |x| - |y| | for orthogonal sigma, so point-norm gaps
    // prune the metric scan.
    Eigen::VectorXd pn(n);
    for (long i = 0; i < n; ++i) pn[i] = grid->point(static_cast<std::size_t>(i)).norm();
    for (long i = 0; i < n; ++i) {
        t.entries(i, i) = 1.0;
        for (long j = i + 1; j < n; ++j) {
            if (std::abs(pn[i] - pn[j]) >= reach) continue;
            const double d = grid->metric(static_cast<std::size_t>(i),
                                          static_cast<std::size_t>(j));
            const double v = (d < reach) ? bump.h(scale * d) : 0.0;
            t.entries(i, j) = v;
            t.entries(j, i) = v;
        }
    }
    return t;
}

const OperatorMatrix& ScaleFamily::S(int k) const {
    if (k < k_min || k > k_max) throw ScaleOutOfRange("S_k index outside family");
    return Sk[static_cast<std::size_t>(k - k_min)];
}

const OperatorMatrix& ScaleFamily::D(int k) const {
    if (k < k_min || k > k_max) throw ScaleOutOfRange("D_k index outside family");
    return Dk[static_cast<std::size_t>(k - k_min)];
}

ScaleFamily build_family(std::shared_ptr<const Grid> grid, const BumpProfile& bump,
                         int k_min, int k_max) {
    if (k_max < k_min) throw RangeTooNarrow("k_max < k_min");
    ScaleFamily fam;
    fam.grid = grid;
    fam.bump = bump;
    fam.k_min = k_min;
    fam.k_max = k_max;
    const Eigen::VectorXd& w = grid->weights;
    for (int k = k_min; k <= k_max; ++k) {
        OperatorMatrix T = build_Tk(grid, bump, k);
        const Eigen::VectorXd t1 = T.entries * w;
        if (t1.minCoeff() <= 1e-14)
            throw DegenerateNormalizer("T_k(1) vanishes at scale k=" + std::to_string(k));
        const Eigen::VectorXd m = t1.cwiseInverse();
        const Eigen::VectorXd u = T.entries * w.cwiseProduct(m);
        if (u.minCoeff() <= 1e-14)
            throw DegenerateNormalizer("T_k(1/T_k(1)) vanishes at scale k=" + std::to_string(k));
        const Eigen::VectorXd wd = u.cwiseInverse();

        OperatorMatrix S;
        S.grid = grid;
        Mat core = T.entries * (w.cwiseProduct(wd)).asDiagonal() * T.entries;
        Mat B = m.asDiagonal() * core * m.asDiagonal();
        S.entries = 0.5 * (B + B.transpose()); // exact symmetry by construction
        fam.Tk1.push_back(t1);
        fam.Sk.push_back(std::move(S));
    }
    for (int k = k_min; k <= k_max; ++k) {
        if (k == k_min) {
            fam.Dk.push_back(fam.S(k));
        } else {
            fam.Dk.push_back(subtract(fam.S(k), fam.S(k - 1)));
        }
    }
    return fam;
}

OperatorMatrix build_DkM(const ScaleFamily& fam, int k, int M) {
    if (M < 0) throw ConfigInvalid("M must be >= 0");
    if (k < fam.k_min || k > fam.k_max) throw ScaleOutOfRange("k outside family");
    OperatorMatrix out = zero_operator(fam.grid);
    for (int j = std::max(k - M, fam.k_min); j <= std::min(k + M, fam.k_max); ++j)
        out = add(out, fam.D(j));
    return out;
}

namespace {

// quadrature measure of the orbit ball {y : d(x,y) < r}
double orbit_ball_measure(const Grid& grid, std::size_t i, double r) {
    double m = 0;
    for (std::size_t j = 0; j < grid.size(); ++j)
        if (grid.metric(i, j) < r) m += grid.weights[static_cast<long>(j)];
    return m;
}

} // namespace

VerificationReport verify_aoi(const ScaleFamily& fam, const AoiCeilings& ceil,
                              int sample_budget, std::uint64_t seed) {
    VerificationReport rep;
    rep.suite = "aoi";
    const Grid& g = *fam.grid;
    const long n = static_cast<long>(g.size());
    const int N = g.dim;
    const double margin = 2.0 * std::ldexp(1.0, -fam.k_min);
    std::vector<int> interior = g.interior_indices(margin);
    if (interior.empty()) interior = g.interior_indices(0.0);

    std::mt19937_64 rng(seed);
    auto pick = [&](const std::vector<int>& pool) {
        return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    };

    double prev_radius = std::numeric_limits<double>::infinity();
    bool radius_monotone = true;
    double sup_scaled_min = std::numeric_limits<double>::infinity();
    double sup_scaled_max = 0;

    for (int k = fam.k_min; k <= fam.k_max; ++k) {
        const std::string kk = "_k" + std::to_string(k);
        const OperatorMatrix& S = fam.S(k);

        const Eigen::VectorXd rs = row_sums(S);
        rep.add_bounded("row_sum_defect" + kk, (rs.array() - 1.0).abs().maxCoeff(),
                        ceil.row_sum);
        const Eigen::VectorXd cs = col_sums(S);
        rep.add_bounded("col_sum_defect" + kk, (cs.array() - 1.0).abs().maxCoeff(),
                        ceil.row_sum);
        rep.add_bounded("symmetry_defect" + kk,
                        (S.entries - S.entries.transpose()).cwiseAbs().maxCoeff(),
                        ceil.symmetry);

        // support: S_k(x,y) must vanish identically at d >= 2^(2-k)
        const double supp_radius = std::ldexp(1.0, 2 - k);
        double supp_defect = 0, radius = 0;
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j) {
                if (S.entries(i, j) == 0.0) continue;
                const double d = g.metric(static_cast<std::size_t>(i),
                                          static_cast<std::size_t>(j));
                if (d >= supp_radius)
                    supp_defect = std::max(supp_defect, std::abs(S.entries(i, j)));
                radius = std::max(radius, d);
            }
        rep.add_bounded("support_defect" + kk, supp_defect, ceil.support);
        rep.add("support_radius" + kk, radius);
        if (radius >= prev_radius) radius_monotone = false;
        prev_radius = radius;

        const double sup_scaled = S.entries.cwiseAbs().maxCoeff() * std::ldexp(1.0, -k * N);
        rep.add("sup_scaled" + kk, sup_scaled);
        sup_scaled_min = std::min(sup_scaled_min, sup_scaled);
        sup_scaled_max = std::max(sup_scaled_max, sup_scaled);

        if (k > fam.k_min) {
            const OperatorMatrix& D = fam.D(k);
            rep.add_bounded("dk_row_sum_defect" + kk,
                            row_sums(D).cwiseAbs().maxCoeff(), ceil.dk_sum);
            rep.add_bounded("dk_col_sum_defect" + kk,
                            col_sums(D).cwiseAbs().maxCoeff(), ceil.dk_sum);
        }

        // discrete comparability |O_B(x,2^-k)| <= T_k(1)(x) <= |O_B(x,2^(1-k))|
        const Eigen::VectorXd& t1 = fam.Tk1[static_cast<std::size_t>(k - fam.k_min)];
        double comp_defect = 0;
        const int comp_samples = std::min<int>(64, static_cast<int>(interior.size()));
        for (int s = 0; s < comp_samples; ++s) {
            const int i = pick(interior);
            const double lo = orbit_ball_measure(g, static_cast<std::size_t>(i),
                                                 std::ldexp(1.0, -k));
            const double hi = orbit_ball_measure(g, static_cast<std::size_t>(i),
                                                 std::ldexp(1.0, 1 - k));
            comp_defect = std::max(comp_defect, lo - t1[i]);
            comp_defect = std::max(comp_defect, t1[i] - hi);
        }
        rep.add_bounded("tk1_comparability_defect" + kk, comp_defect, ceil.comparability);
        rep.add("well_resolved" + kk, scale_well_resolved(g, k) ? 1.0 : 0.0);

        // smoothness ratios (ii)/(iv), sampled
        double lip_ratio = 0, dd_ratio = 0;
        const int trials = sample_budget / std::max(1, fam.count());
        for (int s = 0; s < trials; ++s) {
            const long i = pick(interior), ip = pick(interior), j = pick(interior);
            const double dxxp = g.metric(static_cast<std::size_t>(i),
                                         static_cast<std::size_t>(ip));
            if (dxxp <= 0) continue;
            const double num = std::abs(S.entries(i, j) - S.entries(ip, j));
            lip_ratio = std::max(lip_ratio,
                                 num / (std::ldexp(1.0, k * (N + 1)) * dxxp));
            const long jp = pick(interior);
            const double dyyp = g.metric(static_cast<std::size_t>(j),
                                         static_cast<std::size_t>(jp));
            if (dyyp <= 0) continue;
            const double dd = std::abs((S.entries(i, j) - S.entries(ip, j)) -
                                       (S.entries(i, jp) - S.entries(ip, jp)));
            dd_ratio = std::max(dd_ratio,
                                dd / (std::ldexp(1.0, k * (N + 2)) * dxxp * dyyp));
        }
        rep.add_bounded("lipschitz_ratio" + kk, lip_ratio, ceil.lipschitz_ratio);
        rep.add_bounded("second_diff_ratio" + kk, dd_ratio, ceil.second_diff_ratio);
    }

    rep.add_flag("support_radius_strictly_decreasing", radius_monotone);
    rep.add("sup_scaled_variation",
            sup_scaled_min > 0 ? sup_scaled_max / sup_scaled_min : 0.0);

    // (vi)/(vii): action on a smooth invariant probe
    {
        const double wdt = 0.25 * g.half_width;
        GridFunction f = symmetrize(make_function(fam.grid, [&](const Vec& x) {
            return std::exp(-x.squaredNorm() / (2.0 * wdt * wdt));
        }));
        const double nf = l2_norm(f);
        double prev_err = std::numeric_limits<double>::infinity();
        bool err_monotone = true;
        for (int k = fam.k_min; k <= fam.k_max; ++k) {
            GridFunction sf = apply(fam.S(k), f);
            sf.values -= f.values;
            const double err = l2_norm(sf) / nf;
            rep.add("identity_defect_k" + std::to_string(k), err);
            if (err >= prev_err) err_monotone = false;
            prev_err = err;
        }
        rep.add_flag("identity_defect_decreasing", err_monotone);
        const double s0 = l2_norm(apply(fam.S(fam.k_min), f));
        rep.add("coarse_l2_ratio",
                s0 / (std::ldexp(1.0, fam.k_min * N / 2) * nf));
    }
    return rep;
}

VerificationReport verify_almost_orthogonality(const ScaleFamily& fam, double eps,
                                               int sample_budget, std::uint64_t seed,
                                               double slope_ceiling) {
    VerificationReport rep;
    rep.suite = "almost_orthogonality";
    const Grid& g = *fam.grid;
    const int N = g.dim;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> px(0, static_cast<long>(g.size()) - 1);

    std::vector<double> xs, ys;
    double ratio_sup = 0;
    for (int k = fam.k_min; k <= fam.k_max; ++k)
        for (int l = fam.k_min; l <= fam.k_max; ++l) {
            const OperatorMatrix prod = compose(fam.D(k), fam.D(l));
            const double nrm = operator_l2_norm(prod).value;
            rep.add("dkdl_norm_k" + std::to_string(k) + "_l" + std::to_string(l), nrm);
            xs.push_back(std::abs(k - l));
            ys.push_back(std::log2(std::max(nrm, 1e-18)));

            const int m = std::min(k, l);
            const double sm = std::ldexp(1.0, -m);
            const int trials = sample_budget / (fam.count() * fam.count());
            for (int s = 0; s < trials; ++s) {
                const long i = px(rng), j = px(rng);
                const double d = g.metric(static_cast<std::size_t>(i),
                                          static_cast<std::size_t>(j));
                const double bound = std::pow(sm, eps) / std::pow(sm + d, N + eps);
                ratio_sup = std::max(ratio_sup, std::abs(prod.entries(i, j)) / bound);
            }
        }
    // least squares slope of log2||D_k D_l|| against |k-l|
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    rep.add_bounded("orth_decay_slope", slope, slope_ceiling);
    rep.add("pointwise_ratio_sup", ratio_sup);
    return rep;
}

} // namespace rga

#include "rga/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace rga {

namespace {

void append_point(std::vector<double>& w, const Vec& p) {
    for (int a = 0; a < p.size(); ++a) w.push_back(p[a]);
}

// Fenwick tree over value ranks carrying (sum of weights, sum of weight*value);
// lets us evaluate the mean absolute deviation of a growing set in O(log n).
class OscTree {
public:
    explicit OscTree(const std::vector<double>& sorted_vals)
        : vals_(sorted_vals), w_(vals_.size() + 1, 0.0), wv_(vals_.size() + 1, 0.0) {}

    void insert(double value, double weight) {
        auto it = std::lower_bound(vals_.begin(), vals_.end(), value);
        std::size_t i = static_cast<std::size_t>(it - vals_.begin()) + 1;
        for (; i < w_.size(); i += i & (~i + 1)) {
            w_[i] += weight;
            wv_[i] += weight * value;
        }
        total_w_ += weight;
        total_wv_ += weight * value;
    }

    // mean absolute deviation about the weighted mean of the inserted set
    double mean_abs_dev() const {
        if (total_w_ <= 0) return 0.0;
        double mu = total_wv_ / total_w_;
        auto it = std::upper_bound(vals_.begin(), vals_.end(), mu);
        double w_below = 0, wv_below = 0;
        for (std::size_t i = static_cast<std::size_t>(it - vals_.begin()); i > 0;
             i -= i & (~i + 1)) {
            w_below += w_[i];
            wv_below += wv_[i];
        }
        double below = mu * w_below - wv_below;
        double above = (total_wv_ - wv_below) - mu * (total_w_ - w_below);
        return (below + above) / total_w_;
    }

private:
    const std::vector<double>& vals_;
    std::vector<double> w_, wv_;
    double total_w_ = 0, total_wv_ = 0;
};

struct DistRun {
    double dist;
    std::size_t end; // one past the last sorted index in this run
};

// Sort candidate indices by distance from a center and group ties, so nested
// balls are exactly the run prefixes.
std::vector<DistRun> sorted_runs(std::vector<int>& idx, std::vector<double>& dist,
                                 double tie_tol) {
    std::vector<std::size_t> perm(idx.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return idx[a] < idx[b];
    });
    std::vector<int> idx2(idx.size());
    std::vector<double> dist2(idx.size());
    for (std::size_t t = 0; t < perm.size(); ++t) {
        idx2[t] = idx[perm[t]];
        dist2[t] = dist[perm[t]];
    }
    idx.swap(idx2);
    dist.swap(dist2);
    std::vector<DistRun> runs;
    std::size_t t = 0;
    while (t < idx.size()) {
        std::size_t e = t + 1;
        while (e < idx.size() && dist[e] - dist[t] <= tie_tol) ++e;
        runs.push_back({dist[t], e});
        t = e;
    }
    return runs;
}

} // namespace

NormBreakdown holder_norm(const GridFunction& f, double eta, std::uint64_t seed,
                          std::size_t sample_cap, double invariance_tol) {
    const Grid& g = *f.grid;
    NormBreakdown out;

    double defect = invariance_defect(f);
    if (defect > invariance_tol) {
        out.finite = false;
        out.value = std::numeric_limits<double>::infinity();
        // locate the worst orbit pair as the witness
        double worst = -1;
        for (std::size_t s = 0; s < g.action.size(); ++s)
            for (int i = 0; i < static_cast<int>(g.size()); ++i) {
                double d = std::abs(f.values[i] - f.values[g.action[s][i]]);
                if (d > worst) {
                    worst = d;
                    out.witness.clear();
                    append_point(out.witness, g.points[i]);
                    append_point(out.witness, g.points[g.action[s][i]]);
                }
            }
        return out;
    }

    const double cutoff = 0.5 * g.spacing;
    auto consider = [&](int i, int j) {
        double d = g.metric(i, j);
        if (d < cutoff) return;
        double ratio = std::abs(f.values[i] - f.values[j]) / std::pow(d, eta);
        if (ratio > out.value) {
            out.value = ratio;
            out.witness.clear();
            append_point(out.witness, g.points[i]);
            append_point(out.witness, g.points[j]);
        }
    };

    const int n = static_cast<int>(g.size());
    if (static_cast<std::size_t>(n) <= 4096) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) consider(i, j);
    } else {
        out.exhaustive = false;
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (std::size_t t = 0; t < sample_cap; ++t) consider(pick(rng), pick(rng));
    }
    return out;
}

NormBreakdown molecule_norm(const GridFunction& f, const MoleculeParams& params,
                            std::uint64_t seed, std::size_t sample_cap,
                            double cancel_tol) {
    const Grid& g = *f.grid;
    if (params.center.size() != g.dim) throw GridMismatch("molecule center dimension");
    if (params.r <= 0) throw ConfigInvalid("molecule scale r must be positive");
    const int n = static_cast<int>(g.size());
    const int N = g.dim;
    const double r = params.r, beta = params.beta, gamma = params.gamma;

    NormBreakdown out;
    std::vector<double> d0(n); // orbit distance to the molecule center
    const ReflectionGroup& G = g.group;
    for (int i = 0; i < n; ++i) d0[i] = orbit_distance(G, g.points[i], params.center);

    for (int i = 0; i < n; ++i) {
        double c = std::abs(f.values[i]) * std::pow(r + d0[i], N + gamma) /
                   std::pow(r, gamma);
        if (c > out.size_sup) {
            out.size_sup = c;
            out.witness.clear();
            append_point(out.witness, g.points[i]);
        }
    }

    std::vector<double> smooth_witness;
    auto consider = [&](int i, int j) {
        double dij = g.metric(i, j);
        if (dij < 0.5 * g.spacing) return;
        if (dij > 0.5 * (r + d0[i])) return;
        double c = std::abs(f.values[i] - f.values[j]) *
                   std::pow(dij / (r + d0[i]), -beta) *
                   std::pow(r + d0[i], N + gamma) / std::pow(r, gamma);
        if (c > out.smooth_sup) {
            out.smooth_sup = c;
            smooth_witness.clear();
            append_point(smooth_witness, g.points[i]);
            append_point(smooth_witness, g.points[j]);
        }
    };
    if (static_cast<std::size_t>(n) <= 4096) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) consider(i, j);
    } else {
        out.exhaustive = false;
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (std::size_t t = 0; t < sample_cap; ++t) consider(pick(rng), pick(rng));
    }

    out.cancel_residual = std::abs(quadrature_sum(f));
    out.is_molecule = out.cancel_residual <= cancel_tol;
    out.value = std::max(out.size_sup, out.smooth_sup);
    if (out.smooth_sup >= out.size_sup) out.witness = smooth_witness;
    return out;
}

NormBreakdown bmo_norm(const GridFunction& f, bool orbit_balls,
                       const std::vector<int>& allowed, int center_cap,
                       std::uint64_t seed) {
    const Grid& g = *f.grid;
    const int n = static_cast<int>(g.size());
    std::vector<int> members;
    if (allowed.empty()) {
        members.resize(n);
        std::iota(members.begin(), members.end(), 0);
    } else {
        members = allowed;
        std::sort(members.begin(), members.end());
    }

    std::vector<int> centers = members;
    if (static_cast<int>(centers.size()) > center_cap) {
        std::mt19937_64 rng(seed ^ 0xb5297a4d3f8c2e01ull);
        std::shuffle(centers.begin(), centers.end(), rng);
        centers.resize(center_cap);
        std::sort(centers.begin(), centers.end());
    }

    std::vector<double> sorted_vals;
    sorted_vals.reserve(members.size());
    for (int i : members) sorted_vals.push_back(f.values[i]);
    std::sort(sorted_vals.begin(), sorted_vals.end());
    sorted_vals.erase(std::unique(sorted_vals.begin(), sorted_vals.end()),
                      sorted_vals.end());

    NormBreakdown out;
    out.exhaustive = centers.size() == members.size();
    const double tie_tol = 1e-9 * g.spacing;

    for (int c : centers) {
        std::vector<int> idx = members;
        std::vector<double> dist(idx.size());
        for (std::size_t t = 0; t < idx.size(); ++t)
            dist[t] = orbit_balls ? g.metric(c, idx[t])
                                  : (g.points[c] - g.points[idx[t]]).norm();
        auto runs = sorted_runs(idx, dist, tie_tol);

        OscTree tree(sorted_vals);
        double maxdist = runs.back().dist;
        int m_max = static_cast<int>(std::floor(maxdist / g.spacing)) + 1;
        std::size_t run_ptr = 0, inserted = 0;
        for (int m = 1; m <= m_max; ++m) {
            double radius = m * g.spacing;
            bool grew = false;
            while (run_ptr < runs.size() && runs[run_ptr].dist < radius - tie_tol) {
                for (; inserted < runs[run_ptr].end; ++inserted)
                    tree.insert(f.values[idx[inserted]], g.weights[idx[inserted]]);
                ++run_ptr;
                grew = true;
            }
            if (!grew || inserted == 0) continue;
            double osc = tree.mean_abs_dev();
            if (osc > out.value) {
                out.value = osc;
                out.witness.clear();
                append_point(out.witness, g.points[c]);
                out.witness.push_back(radius);
            }
        }
    }
    return out;
}

GridFunction maximal_function(const GridFunction& f) {
    const Grid& g = *f.grid;
    const int n = static_cast<int>(g.size());
    GridFunction out = constant_function(f.grid, 0.0);
    const double tie_tol = 1e-9 * g.spacing;

    for (int c = 0; c < n; ++c) {
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::vector<double> dist(n);
        for (int t = 0; t < n; ++t) dist[t] = (g.points[c] - g.points[t]).norm();
        auto runs = sorted_runs(idx, dist, tie_tol);

        // prefix means of |f|, evaluated at the ball-realizable run prefixes
        std::vector<double> pw(runs.size()), pwf(runs.size());
        {
            double sw = 0, swf = 0;
            std::size_t t = 0;
            for (std::size_t rn = 0; rn < runs.size(); ++rn) {
                for (; t < runs[rn].end; ++t) {
                    sw += g.weights[idx[t]];
                    swf += g.weights[idx[t]] * std::abs(f.values[idx[t]]);
                }
                pw[rn] = sw;
                pwf[rn] = swf;
            }
        }
        int m_max = static_cast<int>(std::floor(runs.back().dist / g.spacing)) + 1;
        std::vector<char> realized(runs.size(), 0);
        {
            std::size_t run_ptr = 0;
            for (int m = 1; m <= m_max; ++m) {
                double radius = m * g.spacing;
                bool grew = false;
                while (run_ptr < runs.size() && runs[run_ptr].dist < radius - tie_tol) {
                    ++run_ptr;
                    grew = true;
                }
                if (grew && run_ptr > 0) realized[run_ptr - 1] = 1;
            }
        }
        // suffix max of realized-prefix means; the smallest ball containing a
        // point is the first realized prefix at or after its run
        std::vector<double> best(runs.size(), 0.0);
        double acc = 0;
        for (std::size_t rn = runs.size(); rn-- > 0;) {
            if (realized[rn]) acc = std::max(acc, pwf[rn] / pw[rn]);
            best[rn] = acc;
        }
        for (std::size_t rn = 0, t = 0; rn < runs.size(); ++rn)
            for (; t < runs[rn].end; ++t)
                out.values[idx[t]] = std::max(out.values[idx[t]], best[rn]);
    }
    return out;
}

int resolved_band_max(const ScaleFamily& fam) {
    const Grid& g = *fam.grid;
    int k = fam.k_min + 1;
    while (k + 1 <= fam.k_max && std::ldexp(1.0, -(k + 1)) >= 2.0 * g.spacing) ++k;
    return std::min(k, fam.k_max);
}

NormBreakdown besov_sup_norm(const GridFunction& f, double alpha,
                             const ScaleFamily& fam) {
    if (f.grid.get() != fam.grid.get()) throw GridMismatch("besov_sup_norm");
    const Grid& g = *fam.grid;
    auto interior = g.interior_indices(std::ldexp(2.0, -fam.k_min));
    if (interior.empty()) throw RangeTooNarrow("no interior points at the coarse scale margin");
    NormBreakdown out;
    for (int k = fam.k_min + 1; k <= fam.k_max; ++k) {
        GridFunction dkf = apply(fam.D(k), f);
        double scale = std::pow(2.0, alpha * k);
        for (int i : interior) {
            double v = scale * std::abs(dkf.values[i]);
            if (v > out.value) {
                out.value = v;
                out.witness.clear();
                out.witness.push_back(static_cast<double>(k));
                append_point(out.witness, g.points[i]);
            }
        }
    }
    return out;
}

NormBreakdown besov_l1_norm(const GridFunction& f, double alpha,
                            const std::map<int, OperatorMatrix>& tilde_Dk) {
    if (tilde_Dk.empty()) throw MissingTildeFamily("besov_l1_norm requires a tilde family");
    NormBreakdown out;
    for (const auto& [k, op] : tilde_Dk) {
        if (op.grid.get() != f.grid.get()) throw GridMismatch("besov_l1_norm");
        out.value += std::pow(2.0, -alpha * k) * l1_norm(apply(op, f));
    }
    return out;
}

VerificationReport holder_besov_equivalence(const std::vector<GridFunction>& suite,
                                            double alpha, const ScaleFamily& fam,
                                            double lo, double hi) {
    VerificationReport rep;
    rep.suite = "holder_besov_equivalence";
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0;
    int idx = 0;
    for (const auto& f : suite) {
        NormBreakdown h = holder_norm(f, alpha);
        NormBreakdown b = besov_sup_norm(f, alpha, fam);
        std::string tag = "f" + std::to_string(idx++);
        rep.add(tag + "_holder", h.value);
        rep.add(tag + "_besov_sup", b.value);
        if (b.value > 0 && h.finite) {
            double r = h.value / b.value;
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
            rep.add_bounded(tag + "_ratio_in_band",
                            (r >= lo && r <= hi) ? 0.0 : 1.0, 0.5);
        }
    }
    rep.add("ratio_min", rmin);
    rep.add("ratio_max", rmax);
    rep.add_flag("all_ratios_within", rmax <= hi && rmin >= lo);
    return rep;
}

VerificationReport dk_smoothing_ratios(const GridFunction& f, const ScaleFamily& fam,
                                       double s, int M, double spread_ceiling,
                                       bool require_flat, double max_ceiling) {
    VerificationReport rep;
    rep.suite = "dk_smoothing_ratios";
    NormBreakdown hf = holder_norm(f, s);
    double finf = linf_norm(f);
    if (!hf.finite || hf.value == 0 || finf == 0)
        throw ConfigInvalid("smoothing ratios need a nonconstant invariant input");
    int k_hi = resolved_band_max(fam);
    rep.add("band_lo", fam.k_min + 1);
    rep.add("band_hi", k_hi);
    if (k_hi < fam.k_min + 1) throw RangeTooNarrow("no resolved band scales");

    auto spread = [&](const std::vector<double>& v, const std::string& name) {
        double mn = *std::min_element(v.begin(), v.end());
        double mx = *std::max_element(v.begin(), v.end());
        rep.add(name + "_min", mn);
        rep.add_bounded(name + "_max", mx, max_ceiling);
        double sp = mn > 0 ? mx / mn : std::numeric_limits<double>::infinity();
        if (require_flat) rep.add_bounded(name + "_spread", sp, spread_ceiling);
        else rep.add(name + "_spread", sp);
    };

    std::vector<double> r1, r2, r4;
    for (int k = fam.k_min + 1; k <= k_hi; ++k) {
        GridFunction dkf = apply(fam.D(k), f);
        double v1 = std::pow(2.0, s * k) * linf_norm(dkf) / hf.value;
        NormBreakdown hd = holder_norm(dkf, s);
        double v2 = std::pow(2.0, -s * k) * hd.value / finf;
        r1.push_back(v1);
        r2.push_back(v2);
        rep.add("r1_k" + std::to_string(k), v1);
        rep.add("r2_k" + std::to_string(k), v2);

        OperatorMatrix dkM = build_DkM(fam, k, M);
        GridFunction dmf = apply(dkM, f);
        NormBreakdown hm = holder_norm(dmf, s);
        double v4 = hm.value / ((2 * M + 1) * hf.value);
        r4.push_back(v4);
        rep.add("r4_k" + std::to_string(k), v4);
    }
    spread(r1, "r1");
    spread(r2, "r2");
    spread(r4, "r4");
    return rep;
}

} // namespace rga

#include "rga/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

namespace rga {

namespace {

double cubic_plateau(double t) {
    double a = std::abs(t);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    double s = a - 1.0;
    return 1.0 - s * s * (3.0 - 2.0 * s);
}

} // namespace

double KernelSpec::coefficient(int k) const {
    if (coefficients.empty()) return 1.0;
    int idx = k - k_min;
    if (idx < 0 || idx >= static_cast<int>(coefficients.size()))
        throw ConfigInvalid("kernel coefficient index out of range");
    return coefficients[static_cast<std::size_t>(idx)];
}

KernelSpec load_kernel_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open kernel descriptor " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigInvalid(std::string("kernel descriptor parse: ") + e.what());
    }
    KernelSpec spec;
    if (j.contains("group")) spec.group = j.at("group").get<std::string>();
    if (j.contains("profile")) {
        std::string p = j.at("profile").get<std::string>();
        if (p == "smoothstep_d2") spec.profile = KernelProfile::SmoothstepD2;
        else if (p == "smoothstep") spec.profile = KernelProfile::Smoothstep;
        else throw ConfigInvalid("unknown kernel profile " + p);
    }
    if (j.contains("k_min")) spec.k_min = j.at("k_min").get<int>();
    if (j.contains("k_max")) spec.k_max = j.at("k_max").get<int>();
    if (spec.k_min > spec.k_max) throw ConfigInvalid("kernel scale range is empty");
    if (j.contains("coefficients")) {
        spec.coefficients = j.at("coefficients").get<std::vector<double>>();
        if (static_cast<int>(spec.coefficients.size()) != spec.k_max - spec.k_min + 1)
            throw ConfigInvalid("kernel coefficient count does not match the scale range");
    }
    return spec;
}

double kernel_profile_value(KernelProfile profile, int dim, double t) {
    double scale = std::ldexp(1.0, dim);
    switch (profile) {
        case KernelProfile::SmoothstepD2:
            return scale * c2_plateau_bump(2.0 * t) - c2_plateau_bump(t);
        case KernelProfile::Smoothstep:
            return scale * cubic_plateau(2.0 * t) - cubic_plateau(t);
    }
    throw ConfigInvalid("unknown kernel profile");
}

double eval_kernel(const KernelSpec& spec, const ReflectionGroup& G, const Vec& x,
                   const Vec& y) {
    double d = orbit_distance(G, x, y);
    int N = G.dim;
    double sum = 0;
    for (int k = spec.k_min; k <= spec.k_max; ++k)
        sum += spec.coefficient(k) * std::ldexp(1.0, k * N) *
               kernel_profile_value(spec.profile, N, std::ldexp(d, k));
    return sum;
}

OperatorMatrix build_discrete_sio(std::shared_ptr<const Grid> grid,
                                  const KernelSpec& spec) {
    const Grid& g = *grid;
    const int n = static_cast<int>(g.size());
    const int N = g.dim;
    OperatorMatrix T{grid, Mat::Zero(n, n)};
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double d = g.metric(i, j);
            double v = 0;
            for (int k = spec.k_min; k <= spec.k_max; ++k)
                v += spec.coefficient(k) * std::ldexp(1.0, k * N) *
                     kernel_profile_value(spec.profile, N, std::ldexp(d, k));
            T.entries(i, j) = v;
            T.entries(j, i) = v;
        }
    return T;
}

VerificationReport estimate_kernel_constants(const KernelSpec& spec, const Grid& g,
                                             double eps, double floor_mult,
                                             int budget, std::uint64_t seed) {
    VerificationReport rep;
    rep.suite = "kernel_constants";
    rep.config["eps"] = std::to_string(eps);
    const int n = static_cast<int>(g.size());
    const int N = g.dim;
    const double floor = floor_mult * g.spacing;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, n - 1);

    auto K = [&](int i, int j) {
        double d = g.metric(i, j);
        double v = 0;
        for (int k = spec.k_min; k <= spec.k_max; ++k)
            v += spec.coefficient(k) * std::ldexp(1.0, k * N) *
                 kernel_profile_value(spec.profile, N, std::ldexp(d, k));
        return v;
    };

    double c_size = 0, c_smooth_x = 0, c_smooth_y = 0, c_double = 0;
    int n_size = 0, n_smooth = 0, n_double = 0;
    for (int t = 0; t < budget; ++t) {
        int i = pick(rng), j = pick(rng);
        double dij = g.metric(i, j);
        if (dij < floor) continue;
        c_size = std::max(c_size, std::abs(K(i, j)) * std::pow(dij, N));
        ++n_size;

        int ip = pick(rng);
        double dii = g.metric(i, ip);
        if (dii >= 0.5 * g.spacing && dii <= 0.5 * dij) {
            double num = std::abs(K(i, j) - K(ip, j));
            c_smooth_x = std::max(c_smooth_x, num * std::pow(dij, N + eps) /
                                                  std::pow(dii, eps));
            ++n_smooth;
        }
        int jp = pick(rng);
        double djj = g.metric(j, jp);
        if (djj >= 0.5 * g.spacing && djj <= 0.5 * dij) {
            double num = std::abs(K(i, j) - K(i, jp));
            c_smooth_y = std::max(c_smooth_y, num * std::pow(dij, N + eps) /
                                                  std::pow(djj, eps));
        }
        if (dii >= 0.5 * g.spacing && dii <= dij / 3.0 && djj >= 0.5 * g.spacing &&
            djj <= dij / 3.0) {
            double num = std::abs(K(i, j) - K(ip, j) - K(i, jp) + K(ip, jp));
            c_double = std::max(c_double, num * std::pow(dij, N + 2 * eps) /
                                              (std::pow(dii, eps) * std::pow(djj, eps)));
            ++n_double;
        }
    }
    if (n_size == 0) throw RangeTooNarrow("no admissible kernel sample pairs");
    rep.add("size_constant", c_size);
    rep.add("smooth_constant_x", c_smooth_x);
    rep.add("smooth_constant_y", c_smooth_y);
    rep.add("double_diff_constant", c_double);
    rep.add("samples_size", n_size);
    rep.add("samples_smooth", n_smooth);
    rep.add("samples_double", n_double);
    return rep;
}

VerificationReport t1_diagnostics(const OperatorMatrix& T, double interior_margin,
                                  double bmo_ceiling, double invariance_ceiling) {
    const Grid& g = *T.grid;
    VerificationReport rep;
    rep.suite = "t1";
    GridFunction one = constant_function(T.grid, 1.0);
    GridFunction t1 = apply(T, one);
    GridFunction ts1 = apply_adjoint(T, one);
    rep.add_bounded("T1_invariance_defect", invariance_defect(t1), invariance_ceiling);
    rep.add_bounded("Tstar1_invariance_defect", invariance_defect(ts1),
                    invariance_ceiling);
    OpNormResult norm = operator_l2_norm(T, 1e-6, 3000);
    rep.add("op_norm", norm.value);
    rep.add_flag("op_norm_converged", norm.converged);

    std::vector<int> interior = g.interior_indices(interior_margin);
    if (interior.empty()) throw RangeTooNarrow("interior margin leaves no points");
    NormBreakdown b1 = bmo_norm(t1, false, interior);
    NormBreakdown b2 = bmo_norm(ts1, false, interior);
    rep.add_bounded("T1_bmo", b1.value, bmo_ceiling);
    rep.add_bounded("Tstar1_bmo", b2.value, bmo_ceiling);
    rep.add("T1_linf", linf_norm(t1));
    rep.add("Tstar1_linf", linf_norm(ts1));
    return rep;
}

VerificationReport wbp_constant(const OperatorMatrix& T, double eta,
                                const std::vector<double>& radii,
                                int centers_per_radius, std::uint64_t seed,
                                double ceiling) {
    const Grid& g = *T.grid;
    VerificationReport rep;
    rep.suite = "wbp";
    std::mt19937_64 rng(seed);
    double best = 0;
    std::vector<double> witness;
    int library = 0;

    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        double r = radii[ri];
        std::vector<int> centers = g.interior_indices(r + g.spacing);
        if (centers.empty()) continue;
        std::shuffle(centers.begin(), centers.end(), rng);
        if (static_cast<int>(centers.size()) > centers_per_radius)
            centers.resize(static_cast<std::size_t>(centers_per_radius));
        std::sort(centers.begin(), centers.end());
        double r_best = 0;

        for (int c : centers) {
            const Vec& cx = g.points[c];
            auto bump = [&](double width) {
                GridFunction b = make_function(T.grid, [&](const Vec& x) {
                    return c2_plateau_bump(width * (x - cx).norm() / r);
                });
                b = symmetrize(b);
                double m = linf_norm(b);
                if (m > 0)
                    for (Eigen::Index i = 0; i < b.values.size(); ++i) b.values[i] /= m;
                return b;
            };
            GridFunction shapes[2] = {bump(2.0), bump(4.0)};
            library += 2;
            for (const GridFunction& f : shapes)
                for (const GridFunction& gg : shapes) {
                    double ratio = std::abs(inner(gg, apply(T, f))) /
                                   std::pow(r, g.dim);
                    if (ratio > r_best) r_best = ratio;
                    if (ratio > best) {
                        best = ratio;
                        witness = {r};
                        for (int a = 0; a < g.dim; ++a) witness.push_back(cx[a]);
                    }
                }
        }
        rep.add("max_ratio_radius" + std::to_string(ri), r_best);
    }
    if (library == 0) throw EmptyLibrary("no admissible testing bumps at the given radii");
    rep.add("library_size", library);
    rep.add_bounded("wbp_constant", best, ceiling, witness);
    return rep;
}

VerificationReport dk_Tf_decay(const OperatorMatrix& T, const GridFunction& f,
                               const ScaleFamily& fam, double alpha,
                               double max_ceiling) {
    if (T.grid.get() != fam.grid.get() || f.grid.get() != fam.grid.get())
        throw GridMismatch("dk_Tf_decay");
    NormBreakdown hf = holder_norm(f, alpha);
    if (!hf.finite) throw NotInvariant("band decay requires an invariant input");
    if (hf.value == 0) throw ConfigInvalid("band decay requires a nonconstant input");

    VerificationReport rep;
    rep.suite = "dk_Tf_decay";
    GridFunction tf = apply(T, f);
    const Grid& g = *fam.grid;
    std::vector<int> interior = g.interior_indices(std::ldexp(2.0, -fam.k_min));
    if (interior.empty()) throw RangeTooNarrow("no interior points at the coarse margin");
    int k_hi = resolved_band_max(fam);
    std::vector<double> vals;
    for (int k = fam.k_min + 1; k <= k_hi; ++k) {
        GridFunction dk = apply(fam.D(k), tf);
        double sup = 0;
        for (int i : interior) sup = std::max(sup, std::abs(dk.values[i]));
        double v = std::pow(2.0, alpha * k) * sup / hf.value;
        vals.push_back(v);
        rep.add("decay_k" + std::to_string(k), v);
    }
    if (vals.empty()) throw RangeTooNarrow("no resolved bands");
    double mn = *std::min_element(vals.begin(), vals.end());
    double mx = *std::max_element(vals.begin(), vals.end());
    rep.add_bounded("decay_max", mx, max_ceiling);
    rep.add("decay_spread", mn > 0 ? mx / mn : std::numeric_limits<double>::infinity());
    rep.merge("input_", dk_smoothing_ratios(f, fam, alpha, 1));
    return rep;
}

GridFunction extend_to_linfty(const OperatorMatrix& T, const KernelSpec& spec,
                              const GridFunction& f, double R) {
    const Grid& g = *T.grid;
    if (f.grid.get() != T.grid.get()) throw GridMismatch("extend_to_linfty");
    if (!g.has_origin()) throw OriginMissing("extension needs the origin on the grid");
    if (R <= 0) throw ConfigInvalid("extension radius must be positive");
    if (R > 0.25 * g.half_width)
        throw RTooLarge("extension radius exceeds a quarter of the box half-width");
    const int o = g.origin_index();

    // spot check that the operator really is the discretization of the
    // descriptor before using its origin row as K(0, .)
    for (std::size_t j = 0; j < g.size(); j += std::max<std::size_t>(1, g.size() / 7)) {
        double want = eval_kernel(spec, g.group, g.points[static_cast<std::size_t>(o)],
                                  g.points[j]);
        if (std::abs(want - T.entries(o, static_cast<Eigen::Index>(j))) > 1e-8)
            throw GridMismatch("operator does not match the kernel descriptor");
    }

    GridFunction out = constant_function(f.grid, 0.0);
    // normalizing constant: the origin row paired against the shell 1 <= |y| < 2R
    double c0 = 0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        double ay = g.points[j].norm();
        if (ay >= 1.0 && ay < 2.0 * R)
            c0 += T.entries(o, static_cast<Eigen::Index>(j)) * g.weights[j] *
                  f.values[static_cast<Eigen::Index>(j)];
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        double acc = 0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            double ay = g.points[j].norm();
            double kij = T.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (ay < 2.0 * R) {
                acc += kij * g.weights[j] * f.values[static_cast<Eigen::Index>(j)];
            } else {
                acc += (kij - T.entries(o, static_cast<Eigen::Index>(j))) * g.weights[j] *
                       f.values[static_cast<Eigen::Index>(j)];
            }
        }
        out.values[static_cast<Eigen::Index>(i)] = acc - c0;
    }
    return out;
}

Paraproduct build_paraproduct(const GridFunction& b, const CalderonSystem& sys) {
    const ScaleFamily& fam = *sys.family;
    if (b.grid.get() != fam.grid.get()) throw GridMismatch("build_paraproduct");
    double defect = invariance_defect(b);
    if (defect > 1e-9)
        throw NotInvariant("paraproduct symbol invariance defect " + std::to_string(defect));

    Paraproduct pp;
    pp.symbol = b;
    pp.k_lo = sys.tilde_cancel_from;
    pp.k_hi = fam.k_max;
    if (pp.k_lo > pp.k_hi)
        throw RangeTooNarrow("no cancellation-window scales for the paraproduct");

    const Grid& g = *fam.grid;
    const int n = static_cast<int>(g.size());
    pp.op = OperatorMatrix{fam.grid, Mat::Zero(n, n)};
    pp.band_symbol = constant_function(fam.grid, 0.0);
    for (int k = pp.k_lo; k <= pp.k_hi; ++k) {
        GridFunction dkb = apply(fam.D(k), b);
        GridFunction tdb = apply(sys.tilde(k), dkb);
        pp.band_symbol.values += tdb.values;
        Eigen::VectorXd mid = g.weights.cwiseProduct(dkb.values);
        pp.op.entries += sys.tilde(k).entries * mid.asDiagonal() * fam.S(k).entries;
    }
    return pp;
}

VerificationReport verify_paraproduct(const Paraproduct& pp, const CalderonSystem& sys,
                                      double reproduce_tol, double adjoint_ceiling,
                                      double const_zero_ceiling) {
    VerificationReport rep;
    rep.suite = "paraproduct";
    GridFunction one = constant_function(pp.op.grid, 1.0);
    GridFunction p1 = apply(pp.op, one);
    double bn = l2_norm(pp.band_symbol);
    GridFunction diff = p1;
    diff.values -= pp.band_symbol.values;
    rep.add_bounded("reproduce_band_symbol",
                    bn > 0 ? l2_norm(diff) / bn : l2_norm(diff), reproduce_tol);
    rep.add_bounded("adjoint_kills_constants", linf_norm(apply_adjoint(pp.op, one)),
                    adjoint_ceiling);

    Paraproduct flat = build_paraproduct(one, sys);
    rep.add_bounded("constant_symbol_zero", flat.op.entries.cwiseAbs().maxCoeff(),
                    const_zero_ceiling);

    OpNormResult norm = operator_l2_norm(pp.op, 1e-6, 2000);
    rep.add("op_norm", norm.value);
    NormBreakdown bb = bmo_norm(pp.symbol);
    rep.add("symbol_bmo", bb.value);
    if (bb.value > 0) rep.add("norm_to_bmo_ratio", norm.value / bb.value);
    return rep;
}

OperatorMatrix t1_reduction(const OperatorMatrix& T, const CalderonSystem& sys,
                            VerificationReport* rep) {
    GridFunction one = constant_function(T.grid, 1.0);
    GridFunction b1 = symmetrize(apply(T, one));
    GridFunction b2 = symmetrize(apply_adjoint(T, one));
    Paraproduct p1 = build_paraproduct(b1, sys);
    Paraproduct p2 = build_paraproduct(b2, sys);

    OperatorMatrix out = subtract(subtract(T, p1.op), adjoint(p2.op));
    if (rep) {
        rep->suite = "t1_reduction";
        GridFunction r1 = apply(out, one);
        GridFunction want1 = b1;
        want1.values -= p1.band_symbol.values;
        GridFunction d1 = r1;
        d1.values -= want1.values;
        rep->add_bounded("reduced_T1_structural_defect", linf_norm(d1), 1e-7);

        GridFunction r2 = apply_adjoint(out, one);
        GridFunction want2 = b2;
        want2.values -= p2.band_symbol.values;
        GridFunction d2 = r2;
        d2.values -= want2.values;
        rep->add_bounded("reduced_Tstar1_structural_defect", linf_norm(d2), 1e-7);

        rep->add("T1_bmo_before", bmo_norm(b1).value);
        rep->add("T1_bmo_after", bmo_norm(symmetrize(r1)).value);
        rep->add("Tstar1_bmo_before", bmo_norm(b2).value);
        rep->add("Tstar1_bmo_after", bmo_norm(symmetrize(r2)).value);
    }
    return out;
}

GridFunction mollify_G(const GridFunction& f, double eps) {
    const Grid& g = *f.grid;
    if (eps < 4.0 * g.spacing)
        throw EpsTooSmall("mollifier width below four grid spacings");
    const int n = static_cast<int>(g.size());
    auto psi = [](double t) {
        double a = std::abs(t);
        if (a >= 1.0) return 0.0;
        return std::exp(-1.0 / (1.0 - a * a));
    };
    GridFunction out = constant_function(f.grid, 0.0);
    for (int i = 0; i < n; ++i) {
        double num = 0, den = 0;
        for (int j = 0; j < n; ++j) {
            double v = psi(g.metric(i, j) / eps);
            if (v == 0.0) continue;
            num += v * g.weights[j] * f.values[j];
            den += v * g.weights[j];
        }
        if (den <= 1e-14) throw DegenerateNormalizer("mollifier row normalizer vanished");
        out.values[i] = num / den;
    }
    return out;
}

} // namespace rga

#pragma once

#include <map>

#include "rga/aoi.hpp"

namespace rga {

struct NormBreakdown {
    double value = 0;
    bool finite = true;      // false when the input fails a membership precondition
    bool exhaustive = true;  // false when the sup was sampled, not enumerated
    double size_sup = 0;
    double smooth_sup = 0;
    double cancel_residual = 0;
    bool is_molecule = true;
    std::vector<double> witness; // flattened coordinates of the attaining configuration
};

// sup |f(x)-f(y)| / d(x,y)^eta over pairs with d >= spacing/2. Exhaustive for
// grids up to 4096 points, else seeded sampling. A non-invariant input
// (defect > invariance_tol) yields finite=false with the offending orbit pair.
NormBreakdown holder_norm(const GridFunction& f, double eta,
                          std::uint64_t seed = 42,
                          std::size_t sample_cap = 1000000,
                          double invariance_tol = 1e-9);

struct MoleculeParams {
    double beta = 0.5;
    double gamma = 0.5;
    double r = 1.0;
    Vec center;
};

// Size/smoothness constants of a smooth molecule at scale r centered at
// params.center; the quadrature mean enters membership (is_molecule), not the
// value.
NormBreakdown molecule_norm(const GridFunction& f, const MoleculeParams& params,
                            std::uint64_t seed = 42,
                            std::size_t sample_cap = 1000000,
                            double cancel_tol = 1e-8);

// Mean-oscillation sup over balls centered at grid points with radii
// m*spacing (strict membership |y-c| < r). orbit_balls switches the metric to
// the orbit distance. allowed restricts both centers and members (used to
// confine the estimate to an interior region); empty means all points.
NormBreakdown bmo_norm(const GridFunction& f, bool orbit_balls = false,
                       const std::vector<int>& allowed = {},
                       int center_cap = 4096, std::uint64_t seed = 42);

// Uncentered Hardy-Littlewood maximal function over the same ball family.
GridFunction maximal_function(const GridFunction& f);

// sup over band scales k in [k_min+1, k_max] and interior x of 2^(alpha k) |D_k f(x)|
NormBreakdown besov_sup_norm(const GridFunction& f, double alpha,
                             const ScaleFamily& fam);
// sum over k of 2^(-alpha k) ||tilde_D_k f||_1 (tilde family from a Calderon system)
NormBreakdown besov_l1_norm(const GridFunction& f, double alpha,
                            const std::map<int, OperatorMatrix>& tilde_Dk);

// Holder <-> Besov-sup comparison across a test suite; each ratio must land in
// [lo, hi].
VerificationReport holder_besov_equivalence(const std::vector<GridFunction>& suite,
                                            double alpha, const ScaleFamily& fam,
                                            double lo = 0.1, double hi = 10.0);

// Smoothing ratios of the bands on one function: r1_k = 2^(ks)||D_k f||_inf /
// ||f||_{G,s}, r2_k = 2^(-ks)||D_k f||_{G,s} / ||f||_inf, and the D_k^M
// variant r4_k = ||D_k^M f||_{G,s} / ((2M+1) ||f||_{G,s}), over the resolved
// band window. The sup of each family is the uniform constant and is gated by
// max_ceiling. The max/min spread is only a two-sided prediction when the
// input has critical smoothness s (bands saturated at every scale); pass
// require_flat for such inputs to gate the spread by spread_ceiling,
// otherwise the spread is reported unbounded.
VerificationReport dk_smoothing_ratios(const GridFunction& f, const ScaleFamily& fam,
                                       double s, int M = 1,
                                       double spread_ceiling = 4.0,
                                       bool require_flat = false,
                                       double max_ceiling = 16.0);

// Largest band scale that is still resolved at quality 2^-k >= 2*spacing.
int resolved_band_max(const ScaleFamily& fam);

} // namespace rga

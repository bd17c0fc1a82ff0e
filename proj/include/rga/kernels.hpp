#pragma once

#include "rga/calderon.hpp"
#include "rga/norms.hpp"

namespace rga {

enum class KernelProfile {
    SmoothstepD2, // quintic plateau difference, C^2 ramps
    Smoothstep    // cubic plateau difference, C^1 ramps
};

/*
 * K(x,y) = sum_{k=k_min..k_max} c_k 2^(k N) phi_N(2^k d(x,y))
 *
 * with phi_N(t) = 2^N h(2 t) - h(t) a difference of plateau bumps at adjacent
 * dyadic scales. Each summand is a smooth truncated-kernel layer of height
 * ~ 2^(k N) supported where d ~ 2^-k, so the sum obeys |K| <~ d^-N with
 * Lipschitz regularity in d across the covered scale range: a bounded-range
 * model of a G-invariant singular kernel.
 */
struct KernelSpec {
    std::string group = "A1"; // informational tag carried into reports
    KernelProfile profile = KernelProfile::SmoothstepD2;
    int k_min = -2;
    int k_max = 0;
    std::vector<double> coefficients; // per-scale c_k; empty means all ones

    double coefficient(int k) const;
};

KernelSpec load_kernel_spec(const std::string& path); // JSON descriptor

double kernel_profile_value(KernelProfile profile, int dim, double t);
double eval_kernel(const KernelSpec& spec, const ReflectionGroup& G, const Vec& x,
                   const Vec& y);

OperatorMatrix build_discrete_sio(std::shared_ptr<const Grid> grid,
                                  const KernelSpec& spec);

// Sampled size / smoothness / double-difference constants of the kernel at
// regularity eps, over admissible configurations (d(x,y) >= floor_mult *
// spacing, perturbations at most half resp. a third of the separation).
VerificationReport estimate_kernel_constants(const KernelSpec& spec, const Grid& g,
                                             double eps = 1.0,
                                             double floor_mult = 4.0,
                                             int budget = 20000,
                                             std::uint64_t seed = 42);

// T(1) and T*(1) diagnostics: invariance, operator norm on the invariant
// subspace, and interior mean-oscillation norms.
VerificationReport t1_diagnostics(const OperatorMatrix& T,
                                  double interior_margin = 2.0,
                                  double bmo_ceiling = 2.0,
                                  double invariance_ceiling = 1e-9);

// Weak boundedness: sup |<g, T f>| / r^N over a library of symmetrized
// plateau bumps supported in orbit balls of the given radii.
VerificationReport wbp_constant(const OperatorMatrix& T, double eta = 0.5,
                                const std::vector<double>& radii = {1.0, 0.5, 0.25},
                                int centers_per_radius = 6,
                                std::uint64_t seed = 42,
                                double ceiling = 64.0);

// Band decay of T f for a Holder input: 2^(alpha k) ||D_k(Tf)||_inf over the
// resolved bands, normalized by the input seminorm. The uniform sup is gated;
// the across-band spread is informational (it tightens only for inputs of
// critical smoothness). Includes the smoothing ratio table of the input.
VerificationReport dk_Tf_decay(const OperatorMatrix& T, const GridFunction& f,
                               const ScaleFamily& fam, double alpha,
                               double max_ceiling = 8.0);

// Principal-value style extension: T applied to a bounded function via near
// part + cancelled far part, normalized by the unit-shell constant. The result
// is independent of R by construction; R only splits the computation.
GridFunction extend_to_linfty(const OperatorMatrix& T, const KernelSpec& spec,
                              const GridFunction& f, double R);

struct Paraproduct {
    GridFunction symbol;             // b
    GridFunction band_symbol;        // sum of tilde_D_k D_k b over the window
    OperatorMatrix op;               // sum_k tilde_D_k diag(D_k b) S_k
    int k_lo = 0, k_hi = 0;
};

// Paraproduct against the cancellation window of a Calderon system; maps 1 to
// the band-limited symbol and has adjoint annihilating constants.
Paraproduct build_paraproduct(const GridFunction& b, const CalderonSystem& sys);

VerificationReport verify_paraproduct(const Paraproduct& pp, const CalderonSystem& sys,
                                      double reproduce_tol = 0.05,
                                      double adjoint_ceiling = 1e-8,
                                      double const_zero_ceiling = 1e-12);

// T reduced by the two paraproducts built from T(1) and T*(1); the structural
// report records how the special symbols were cancelled.
OperatorMatrix t1_reduction(const OperatorMatrix& T, const CalderonSystem& sys,
                            VerificationReport* rep = nullptr);

// Orbit-distance mollifier with a row-normalized C^infinity profile; maps
// invariant functions to smooth invariant functions.
GridFunction mollify_G(const GridFunction& f, double eps);

} // namespace rga

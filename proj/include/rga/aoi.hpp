#pragma once

#include "rga/operator.hpp"
#include "rga/report.hpp"

namespace rga {

// Even profile with h = 1 on |t| <= 1, h = 0 on |t| >= 2, values in [0,1].
struct BumpProfile {
    std::function<double(double)> h;
    double lipschitz = 1.5;
};

BumpProfile default_bump();       // cubic smoothstep ramp, C^1, Lip 3/2
double c2_plateau_bump(double t); // quintic ramp, C^2 (kernel profiles)

// Smallest k at which T_k degenerates to the orbit indicator, i.e.
// 2^k * spacing >= 2; there S_k equals orbit averaging exactly.
int closure_scale(const Grid& grid);
// Soft quality window: 2^-k >= 4*spacing (comparability of T_k(1) with ball
// measures is quantitatively reliable only here).
bool scale_well_resolved(const Grid& grid, int k);

// T_k f(x) = sum_y h(2^k d(x,y)) w_y f(y)
OperatorMatrix build_Tk(std::shared_ptr<const Grid> grid, const BumpProfile& bump, int k);

// Normalized family S_k = M_k T_k W_k T_k M_k (row and column quadrature sums
// exactly 1) and bands D_k = S_k - S_{k-1}, with D_{k_min} = S_{k_min} so the
// telescope sum_k D_k = S_{k_max} holds exactly.
struct ScaleFamily {
    std::shared_ptr<const Grid> grid;
    BumpProfile bump;
    int k_min = 0, k_max = 0;
    std::vector<OperatorMatrix> Sk, Dk;
    std::vector<Eigen::VectorXd> Tk1; // T_k(1), the M_k normalizer diagonals

    const OperatorMatrix& S(int k) const;
    const OperatorMatrix& D(int k) const;
    int count() const { return k_max - k_min + 1; }
};

ScaleFamily build_family(std::shared_ptr<const Grid> grid, const BumpProfile& bump,
                         int k_min, int k_max);

// D_k^M = sum over |j| <= M of D_{k+j}, out-of-range terms dropped.
OperatorMatrix build_DkM(const ScaleFamily& fam, int k, int M);

struct AoiCeilings {
    double row_sum = 1e-12;
    double symmetry = 1e-10;
    double support = 0.0;
    double dk_sum = 1e-11;
    double comparability = 1e-12;
    double lipschitz_ratio = 64.0;
    double second_diff_ratio = 256.0;
};

VerificationReport verify_aoi(const ScaleFamily& fam, const AoiCeilings& ceil = {},
                              int sample_budget = 100000, std::uint64_t seed = 42);

// ||D_k D_l|| for every pair plus the fitted decay of log2||D_k D_l|| against
// |k-l|; slope must be <= slope_ceiling.
VerificationReport verify_almost_orthogonality(const ScaleFamily& fam,
                                               double eps = 0.5,
                                               int sample_budget = 20000,
                                               std::uint64_t seed = 42,
                                               double slope_ceiling = -0.5);

} // namespace rga

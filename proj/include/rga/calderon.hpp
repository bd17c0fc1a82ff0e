#pragma once

#include <map>
#include <memory>

#include "rga/aoi.hpp"

namespace rga {

// Which side the widened block sits on when the scale sum is assembled.
enum class TMOrdering { DkM_first, Dk_first };

// T_M = sum over the family's full scale range of D_k^M D_k (or D_k D_k^M).
OperatorMatrix build_TM(const ScaleFamily& fam, int M,
                        TMOrdering ordering = TMOrdering::DkM_first);

// ||I - T_M|| on the invariant subspace for each M in Ms; checks the curve is
// strictly decreasing, ends below final_ceiling, and decays by at most
// ratio_ceiling per unit M (least-squares in log2).
VerificationReport rm_contraction_curve(const ScaleFamily& fam,
                                        const std::vector<int>& Ms,
                                        TMOrdering ordering = TMOrdering::DkM_first,
                                        double final_ceiling = 0.9,
                                        double ratio_ceiling = 0.8);

struct NeumannResult {
    OperatorMatrix inverse;  // inverse of T_M against the orbit projector
    int terms = 0;           // highest Neumann power summed
    double tail_bound = 0;   // rho^(terms+1) / (1 - rho)
    double contraction = 0;  // measured rho = ||I - T_M|| on the invariant subspace
    bool norm_converged = true;
};

// Truncated Neumann series X = P + sum_{m=1..terms} (P - T_M)^m with the term
// count chosen from the measured contraction so the tail is below tol.
// Throws NotContractive when the remainder norm reaches 1.
NeumannResult invert_TM(const ScaleFamily& fam, const OperatorMatrix& TM,
                        double tol = 1e-12, int max_terms = 512);

struct CalderonSystem {
    std::shared_ptr<const ScaleFamily> family;
    int M = 1;
    TMOrdering ordering = TMOrdering::DkM_first;
    OperatorMatrix T_M, R_M, T_M_inverse;
    double rm_norm = 0;
    int neumann_terms = 0;
    double neumann_tail = 0;
    int tilde_cancel_from = 0; // first k whose tilde block has exact cancellation
    std::map<int, OperatorMatrix> tilde_Dk;       // inverse * D_k^M, all k in range
    std::map<int, OperatorMatrix> tilde_tilde_Dk; // D_k^M * adjoint(inverse)

    const OperatorMatrix& tilde(int k) const;
    const OperatorMatrix& tilde_tilde(int k) const;
};

CalderonSystem build_calderon_system(std::shared_ptr<const ScaleFamily> fam, int M,
                                     double inv_tol = 1e-12,
                                     TMOrdering ordering = TMOrdering::DkM_first);

// Structural checks: T_M + R_M = I, inversion residual against the projector,
// tilde row/column cancellation beyond tilde_cancel_from, and a molecule spot
// check on a central tilde column.
VerificationReport verify_calderon(const CalderonSystem& sys,
                                   double cancel_ceiling = 1e-8,
                                   double inv_ceiling = 1e-9);

// Reconstruction of one function through both scale decompositions, with the
// per-scale energy profile. Requires an invariant input.
VerificationReport reproduce(const GridFunction& f, const CalderonSystem& sys,
                             double residual_ceiling = 1e-5);

} // namespace rga

#include "rga/calderon.hpp"

#include <algorithm>
#include <cmath>

#include "rga/norms.hpp"

namespace rga {

OperatorMatrix build_TM(const ScaleFamily& fam, int M, TMOrdering ordering) {
    if (M < 1) throw ConfigInvalid("widening M must be >= 1");
    OperatorMatrix acc = zero_operator(fam.grid);
    for (int k = fam.k_min; k <= fam.k_max; ++k) {
        OperatorMatrix dkM = build_DkM(fam, k, M);
        const OperatorMatrix& dk = fam.D(k);
        OperatorMatrix term = (ordering == TMOrdering::DkM_first) ? compose(dkM, dk)
                                                                 : compose(dk, dkM);
        acc = add(acc, term);
    }
    return acc;
}

VerificationReport rm_contraction_curve(const ScaleFamily& fam,
                                        const std::vector<int>& Ms,
                                        TMOrdering ordering, double final_ceiling,
                                        double ratio_ceiling) {
    if (Ms.empty()) throw ConfigInvalid("contraction curve needs at least one M");
    VerificationReport rep;
    rep.suite = "rm_contraction_curve";
    OperatorMatrix I = identity_operator(fam.grid);
    std::vector<double> norms;
    bool decreasing = true;
    for (std::size_t t = 0; t < Ms.size(); ++t) {
        OperatorMatrix RM = subtract(I, build_TM(fam, Ms[t], ordering));
        OpNormResult r = operator_l2_norm(RM, 1e-7, 4000);
        norms.push_back(r.value);
        rep.add("rm_norm_M" + std::to_string(Ms[t]), r.value);
        rep.add_flag("rm_norm_M" + std::to_string(Ms[t]) + "_converged", r.converged);
        if (t > 0 && !(norms[t] < norms[t - 1])) decreasing = false;
    }
    rep.add_flag("strictly_decreasing", decreasing);
    rep.add_bounded("rm_norm_final", norms.back(), final_ceiling);
    if (Ms.size() >= 2) {
        // least squares fit of log2 ||R_M|| against M
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (std::size_t t = 0; t < Ms.size(); ++t) {
            if (norms[t] <= 0) continue;
            double x = Ms[t], y = std::log2(norms[t]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++cnt;
        }
        double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        rep.add("log2_slope", slope);
        rep.add_bounded("per_unit_ratio", std::pow(2.0, slope), ratio_ceiling);
    }
    return rep;
}

NeumannResult invert_TM(const ScaleFamily& fam, const OperatorMatrix& TM,
                        double tol, int max_terms) {
    if (TM.grid.get() != fam.grid.get()) throw GridMismatch("invert_TM");
    OperatorMatrix I = identity_operator(fam.grid);
    OperatorMatrix P = orbit_projector(fam.grid);
    OperatorMatrix RM = subtract(I, TM);

    NeumannResult out;
    OpNormResult rho = operator_l2_norm(RM, 1e-7, 4000);
    out.contraction = rho.value;
    out.norm_converged = rho.converged;
    if (rho.value >= 1.0 - 1e-12)
        throw NotContractive("remainder norm " + std::to_string(rho.value) +
                             " is not below one on the invariant subspace");

    if (rho.value < tol) {
        out.terms = 1;
    } else {
        double need = std::log(tol * (1.0 - rho.value)) / std::log(rho.value);
        out.terms = std::max(1, static_cast<int>(std::ceil(need)) - 1);
    }
    out.terms = std::min(out.terms, max_terms);
    out.tail_bound = std::pow(rho.value, out.terms + 1) / (1.0 - rho.value);

    // Horner form of P + Rbar + Rbar^2 + ... with Rbar = P - T_M; the
    // projector acts as the identity of the invariant subalgebra.
    OperatorMatrix Rbar = subtract(P, TM);
    OperatorMatrix X = P;
    for (int m = 0; m < out.terms; ++m) X = add(P, compose(Rbar, X));
    out.inverse = std::move(X);
    return out;
}

const OperatorMatrix& CalderonSystem::tilde(int k) const {
    auto it = tilde_Dk.find(k);
    if (it == tilde_Dk.end()) throw MissingTildeFamily("no tilde block at scale " + std::to_string(k));
    return it->second;
}

const OperatorMatrix& CalderonSystem::tilde_tilde(int k) const {
    auto it = tilde_tilde_Dk.find(k);
    if (it == tilde_tilde_Dk.end())
        throw MissingTildeFamily("no adjoint-side tilde block at scale " + std::to_string(k));
    return it->second;
}

CalderonSystem build_calderon_system(std::shared_ptr<const ScaleFamily> fam, int M,
                                     double inv_tol, TMOrdering ordering) {
    if (!fam) throw ConfigInvalid("null scale family");
    CalderonSystem sys;
    sys.family = fam;
    sys.M = M;
    sys.ordering = ordering;
    sys.T_M = build_TM(*fam, M, ordering);
    sys.R_M = subtract(identity_operator(fam->grid), sys.T_M);

    NeumannResult inv = invert_TM(*fam, sys.T_M, inv_tol);
    sys.rm_norm = inv.contraction;
    sys.neumann_terms = inv.terms;
    sys.neumann_tail = inv.tail_bound;
    sys.T_M_inverse = inv.inverse;
    sys.tilde_cancel_from = fam->k_min + M + 1;

    for (int k = fam->k_min; k <= fam->k_max; ++k) {
        OperatorMatrix dkM = build_DkM(*fam, k, M);
        if (ordering == TMOrdering::DkM_first) {
            // sum_k tilde(k) D(k) = X T_M = P on invariant functions
            OperatorMatrix t = compose(sys.T_M_inverse, dkM);
            sys.tilde_tilde_Dk.emplace(k, adjoint(t));
            sys.tilde_Dk.emplace(k, std::move(t));
        } else {
            // sum_k D(k) tilde_tilde(k) = T_M X = P on invariant functions
            OperatorMatrix tt = compose(dkM, sys.T_M_inverse);
            sys.tilde_Dk.emplace(k, adjoint(tt));
            sys.tilde_tilde_Dk.emplace(k, std::move(tt));
        }
    }
    return sys;
}

VerificationReport verify_calderon(const CalderonSystem& sys, double cancel_ceiling,
                                   double inv_ceiling) {
    const ScaleFamily& fam = *sys.family;
    VerificationReport rep;
    rep.suite = "calderon";
    rep.config["M"] = std::to_string(sys.M);
    rep.config["ordering"] =
        sys.ordering == TMOrdering::DkM_first ? "DkM_first" : "Dk_first";

    OperatorMatrix I = identity_operator(fam.grid);
    double id_defect = (add(sys.T_M, sys.R_M).entries - I.entries).cwiseAbs().maxCoeff();
    rep.add_bounded("tm_plus_rm_identity_defect", id_defect, 1e-12);
    rep.add_bounded("rm_norm", sys.rm_norm, 1.0);
    rep.add("neumann_terms", sys.neumann_terms);
    rep.add("neumann_tail_bound", sys.neumann_tail);

    OperatorMatrix P = orbit_projector(fam.grid);
    OperatorMatrix defect = subtract(compose(sys.T_M, sys.T_M_inverse), P);
    if (sys.ordering == TMOrdering::Dk_first)
        defect = subtract(compose(sys.T_M_inverse, sys.T_M), P);
    OpNormResult inv_res = operator_l2_norm(defect, 1e-8, 4000);
    rep.add_bounded("inversion_defect", inv_res.value, inv_ceiling);

    double worst_row = 0, worst_col = 0;
    for (int k = sys.tilde_cancel_from; k <= fam.k_max; ++k) {
        const OperatorMatrix& t = sys.tilde(k);
        const OperatorMatrix& tt = sys.tilde_tilde(k);
        worst_row = std::max({worst_row, row_sums(t).cwiseAbs().maxCoeff(),
                              row_sums(tt).cwiseAbs().maxCoeff()});
        worst_col = std::max({worst_col, col_sums(t).cwiseAbs().maxCoeff(),
                              col_sums(tt).cwiseAbs().maxCoeff()});
    }
    rep.add_bounded("tilde_row_cancellation", worst_row, cancel_ceiling);
    rep.add_bounded("tilde_col_cancellation", worst_col, cancel_ceiling);

    // a central column of a cancellation-window tilde block should behave like
    // a unit-scale-r molecule: finite constants and a negligible mean
    if (sys.tilde_cancel_from <= fam.k_max) {
        int k_mid = std::min(fam.k_max, sys.tilde_cancel_from + 1);
        const Grid& g = *fam.grid;
        std::size_t j = g.has_origin() ? g.origin_index() : g.size() / 2;
        const OperatorMatrix& t = sys.tilde(k_mid);
        GridFunction col = make_function(fam.grid, [&](const Vec&) { return 0.0; });
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(g.size()); ++i) col.values[i] = t.entries(i, static_cast<Eigen::Index>(j));
        MoleculeParams mp;
        mp.beta = 0.5;
        mp.gamma = 0.5;
        mp.r = std::ldexp(1.0, -k_mid);
        mp.center = g.points[j];
        NormBreakdown mol = molecule_norm(col, mp);
        rep.add("tilde_column_molecule_norm", mol.value);
        rep.add_bounded("tilde_column_molecule_mean", mol.cancel_residual, cancel_ceiling);
        rep.add_flag("tilde_column_is_molecule", mol.is_molecule && mol.finite);
    }
    return rep;
}

VerificationReport reproduce(const GridFunction& f, const CalderonSystem& sys,
                             double residual_ceiling) {
    const ScaleFamily& fam = *sys.family;
    if (f.grid.get() != fam.grid.get()) throw GridMismatch("reproduce");
    if (sys.tilde_Dk.empty()) throw MissingTildeFamily("reproduce");
    double defect = invariance_defect(f);
    if (defect > 1e-9)
        throw NotInvariant("input invariance defect " + std::to_string(defect));

    VerificationReport rep;
    rep.suite = "reproduce";
    rep.add("input_mean", quadrature_sum(f) / f.grid->box_volume());
    double fn = l2_norm(f);
    if (fn == 0) throw ConfigInvalid("cannot reproduce the zero function");

    GridFunction acc1 = constant_function(f.grid, 0.0);
    GridFunction acc2 = constant_function(f.grid, 0.0);
    for (int k = fam.k_min; k <= fam.k_max; ++k) {
        GridFunction dkf = apply(fam.D(k), f);
        GridFunction term1 = apply(sys.tilde(k), dkf);
        GridFunction term2 = apply(fam.D(k), apply(sys.tilde_tilde(k), f));
        for (Eigen::Index i = 0; i < acc1.values.size(); ++i) {
            acc1.values[i] += term1.values[i];
            acc2.values[i] += term2.values[i];
        }
        rep.add("energy_Dk_k" + std::to_string(k), l2_norm(dkf));
        rep.add("energy_tilde_k" + std::to_string(k), l2_norm(term1));
    }
    for (Eigen::Index i = 0; i < acc1.values.size(); ++i) {
        acc1.values[i] -= f.values[i];
        acc2.values[i] -= f.values[i];
    }
    rep.add_bounded("residual_tilde_first", l2_norm(acc1) / fn, residual_ceiling);
    rep.add_bounded("residual_tilde_second", l2_norm(acc2) / fn, residual_ceiling);
    return rep;
}

} // namespace rga

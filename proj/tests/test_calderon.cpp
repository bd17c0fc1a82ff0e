#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "rga/calderon.hpp"

using namespace rga;

namespace {

std::shared_ptr<const ScaleFamily> closed_family(int n, double w = 8.0) {
    auto g = build_grid(w, n, generate_group(root_system_preset("A1")));
    return std::make_shared<ScaleFamily>(
        build_family(g, default_bump(), 0, closure_scale(*g)));
}

GridFunction test_bump(std::shared_ptr<const Grid> g) {
    GridFunction f = make_function(g, [](const Vec& x) {
        return std::exp(-(x[0] - 1.5) * (x[0] - 1.5));
    });
    return symmetrize(f);
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("power iteration agrees with an SVD oracle for the trivial group") {
    // uniform weights w: ||A|| w.r.t. <f,g> = sum w f g equals the largest
    // singular value of w * entries
    auto g = build_grid(1.0, 12, trivial_group(1));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    Mat e(12, 12);
    for (long i = 0; i < 12; ++i)
        for (long j = 0; j < 12; ++j) e(i, j) = u(rng);
    OperatorMatrix a{g, e};
    double svd = (g->spacing * e).jacobiSvd().singularValues()(0);
    OpNormResult pw = operator_l2_norm(a, 1e-10, 5000);
    CHECK(pw.converged);
    CHECK(pw.value == doctest::Approx(svd).epsilon(1e-6));
}

TEST_CASE("scale sum fixes constants on a closed family") {
    auto fam = closed_family(33);
    OperatorMatrix tm = build_TM(*fam, 1);
    GridFunction one = constant_function(fam->grid, 1.0);
    GridFunction tm1 = apply(tm, one);
    CHECK((tm1.values.array() - 1).abs().maxCoeff() < 1e-12);
    OperatorMatrix rm = subtract(identity_operator(fam->grid), tm);
    CHECK(linf_norm(apply(rm, one)) < 1e-12);
}

TEST_CASE("orderings are adjoint to each other") {
    auto fam = closed_family(17);
    OperatorMatrix a = build_TM(*fam, 1, TMOrdering::DkM_first);
    OperatorMatrix b = build_TM(*fam, 1, TMOrdering::Dk_first);
    // products are summed in opposite order, so only up to roundoff
    CHECK(max_abs(adjoint(a).entries - b.entries) < 1e-14);
}

TEST_CASE("remainder contracts faster as the band widens") {
    auto fam = closed_family(65);
    VerificationReport rep = rm_contraction_curve(*fam, {1, 2, 3});
    for (const auto& m : rep.metrics)
        if (m.pass && !*m.pass) MESSAGE(m.name, " = ", m.value);
    CHECK(rep.all_pass());
    const Metric* r1 = rep.find("rm_norm_M1");
    const Metric* r3 = rep.find("rm_norm_M3");
    REQUIRE(r1 != nullptr);
    REQUIRE(r3 != nullptr);
    CHECK(r3->value < r1->value);
    CHECK(r3->value < 0.9);
}

TEST_CASE("neumann term count follows the frozen formula") {
    // terms = max(1, ceil(log(tol*(1-rho))/log rho) - 1): rho=0.5, tol=1e-6
    // gives ceil(log(5e-7)/log(.5)) - 1 = ceil(20.93) - 1 = 20
    auto fam = closed_family(33);
    OperatorMatrix tm = build_TM(*fam, 2);
    NeumannResult nr = invert_TM(*fam, tm, 1e-12);
    CHECK(nr.contraction < 0.9);
    CHECK(nr.norm_converged);
    CHECK(nr.tail_bound < 1e-12);
    double rho = nr.contraction;
    int want = std::max(
        1, static_cast<int>(std::ceil(std::log(1e-12 * (1 - rho)) / std::log(rho))) - 1);
    CHECK(nr.terms == want);
}

TEST_CASE("inversion refuses a non-contractive operator") {
    auto fam = closed_family(17);
    CHECK_THROWS_AS(invert_TM(*fam, zero_operator(fam->grid)), NotContractive);
}

TEST_CASE("inverse composes to the projector on the invariant subspace") {
    auto fam = closed_family(33);
    CalderonSystem sys = build_calderon_system(fam, 2);
    OperatorMatrix probe = compose(sys.T_M_inverse, sys.T_M);
    OperatorMatrix p = orbit_projector(fam->grid);
    OperatorMatrix defect = subtract(probe, p);
    CHECK(operator_l2_norm(defect).value < 1e-9);
}

TEST_CASE("tilde blocks: adjoint pairing and index guards") {
    auto fam = closed_family(33);
    CalderonSystem sys = build_calderon_system(fam, 1);
    CHECK(sys.tilde_cancel_from == fam->k_min + sys.M + 1);
    for (int k = fam->k_min; k <= fam->k_max; ++k)
        CHECK(max_abs(adjoint(sys.tilde(k)).entries - sys.tilde_tilde(k).entries) == 0.0);
    CHECK_THROWS_AS(sys.tilde(fam->k_min - 1), MissingTildeFamily);
    CHECK_THROWS_AS(sys.tilde_tilde(fam->k_max + 1), MissingTildeFamily);
}

TEST_CASE("structural verification passes for both orderings and widths") {
    auto fam = closed_family(33);
    for (TMOrdering ord : {TMOrdering::DkM_first, TMOrdering::Dk_first})
        for (int M : {1, 2}) {
            CalderonSystem sys = build_calderon_system(fam, M, 1e-12, ord);
            VerificationReport rep = verify_calderon(sys);
            for (const auto& m : rep.metrics)
                if (m.pass && !*m.pass) MESSAGE("M=", M, " ", m.name, " = ", m.value);
            CHECK(rep.all_pass());
        }
}

TEST_CASE("reconstruction through both decompositions") {
    auto fam = closed_family(65);
    CalderonSystem sys = build_calderon_system(fam, 2);
    GridFunction f = test_bump(fam->grid);
    VerificationReport rep = reproduce(f, sys);
    for (const auto& m : rep.metrics)
        if (m.pass && !*m.pass) MESSAGE(m.name, " = ", m.value);
    CHECK(rep.all_pass());
    const Metric* r = rep.find("residual_tilde_first");
    REQUIRE(r != nullptr);
    CHECK(r->value < 1e-5);
}

TEST_CASE("reconstruction rejects non-invariant and foreign-grid input") {
    auto fam = closed_family(33);
    CalderonSystem sys = build_calderon_system(fam, 1);
    GridFunction skew = make_function(fam->grid, [](const Vec& x) { return x[0]; });
    CHECK_THROWS_AS(reproduce(skew, sys), NotInvariant);
    auto other = build_grid(8.0, 17, generate_group(root_system_preset("A1")));
    CHECK_THROWS_AS(reproduce(test_bump(other), sys), GridMismatch);
}

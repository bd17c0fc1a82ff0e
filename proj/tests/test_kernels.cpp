#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "rga/kernels.hpp"

using namespace rga;

namespace {

std::shared_ptr<const Grid> a1_grid(int n, double w = 8.0) {
    return build_grid(w, n, generate_group(root_system_preset("A1")));
}

GridFunction bump(std::shared_ptr<const Grid> g, double c, double s) {
    GridFunction f = make_function(g, [&](const Vec& x) {
        return std::exp(-(x[0] - c) * (x[0] - c) / (s * s));
    });
    return symmetrize(f);
}

std::shared_ptr<const ScaleFamily> closed_family(std::shared_ptr<const Grid> g) {
    return std::make_shared<ScaleFamily>(
        build_family(g, default_bump(), 0, closure_scale(*g)));
}

} // namespace

TEST_CASE("layer profile hits frozen values in one dimension") {
    for (KernelProfile p : {KernelProfile::SmoothstepD2, KernelProfile::Smoothstep}) {
        CHECK(kernel_profile_value(p, 1, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(kernel_profile_value(p, 1, 0.75) == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(kernel_profile_value(p, 1, 1.5) == doctest::Approx(-0.5).epsilon(1e-15));
        CHECK(kernel_profile_value(p, 1, 3.0) == 0.0);
        // even in t
        CHECK(kernel_profile_value(p, 1, -1.5) == kernel_profile_value(p, 1, 1.5));
    }
    // dimension enters through the 2^N factor: phi_2(0) = 4 - 1 = 3
    CHECK(kernel_profile_value(KernelProfile::SmoothstepD2, 2, 0.0) ==
          doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("kernel is symmetric and G-bi-invariant") {
    KernelSpec spec;
    ReflectionGroup G = generate_group(root_system_preset("A1"));
    Vec x(1), y(1);
    x << 0.7;
    y << -1.3;
    double v = eval_kernel(spec, G, x, y);
    CHECK(eval_kernel(spec, G, y, x) == v);
    Vec xr = -x, yr = -y;
    CHECK(eval_kernel(spec, G, xr, yr) == v);
    // depends only on the orbit distance: d(0.7, -1.3) = d(0.7, 1.3) = 0.6
    Vec y2(1);
    y2 << 1.3;
    CHECK(eval_kernel(spec, G, x, y2) == v);
}

TEST_CASE("discrete operator tabulates the kernel") {
    auto g = a1_grid(33);
    KernelSpec spec;
    OperatorMatrix T = build_discrete_sio(g, spec);
    for (std::size_t i = 0; i < g->size(); i += 7)
        for (std::size_t j = 0; j < g->size(); j += 5)
            CHECK(T.entries(static_cast<long>(i), static_cast<long>(j)) ==
                  doctest::Approx(eval_kernel(spec, g->group, g->point(i), g->point(j)))
                      .epsilon(1e-13));
    CHECK((T.entries - T.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(bi_invariance_defect(T) < 1e-14);
}

TEST_CASE("json descriptor round trip and validation") {
    const char* path = "kernel_tmp_test.json";
    {
        std::ofstream out(path);
        out << R"({"group":"A1","profile":"smoothstep","k_min":-3,"k_max":1,)"
            << R"("coefficients":[1.0,0.5,0.25,0.125,0.0625]})";
    }
    KernelSpec s = load_kernel_spec(path);
    CHECK(s.group == "A1");
    CHECK(s.profile == KernelProfile::Smoothstep);
    CHECK(s.k_min == -3);
    CHECK(s.k_max == 1);
    CHECK(s.coefficient(-3) == 1.0);
    CHECK(s.coefficient(1) == 0.0625);
    std::remove(path);

    {
        std::ofstream out(path);
        out << R"({"profile":"gaussian"})";
    }
    CHECK_THROWS_AS(load_kernel_spec(path), ConfigInvalid);
    {
        std::ofstream out(path);
        out << R"({"k_min":0,"k_max":1,"coefficients":[1.0]})";
    }
    CHECK_THROWS_AS(load_kernel_spec(path), ConfigInvalid);
    {
        std::ofstream out(path);
        out << R"({"k_min":2,"k_max":0})";
    }
    CHECK_THROWS_AS(load_kernel_spec(path), ConfigInvalid);
    std::remove(path);
    CHECK_THROWS_AS(load_kernel_spec("no_such_kernel.json"), IoFailure);
    KernelSpec dflt;
    CHECK(dflt.coefficient(-1) == 1.0); // empty coefficient list means all ones
    KernelSpec listed;
    listed.coefficients = {2.0, 3.0, 4.0}; // k_min=-2..k_max=0
    CHECK(listed.coefficient(-2) == 2.0);
    CHECK_THROWS_AS(listed.coefficient(5), ConfigInvalid);
}

TEST_CASE("sampled kernel constants are finite and bounded") {
    auto g = a1_grid(65);
    KernelSpec spec;
    VerificationReport rep = estimate_kernel_constants(spec, *g, 1.0, 4.0, 5000, 42);
    for (const auto& m : rep.metrics)
        if (m.pass && !*m.pass) MESSAGE(m.name, " = ", m.value);
    CHECK(rep.all_pass());
}

TEST_CASE("kernel constants need admissible separations") {
    auto g = a1_grid(5, 0.5); // spacing 0.2, floor 4*dx = 0.8 > box diameter 1
    KernelSpec spec;
    CHECK_THROWS_AS(estimate_kernel_constants(spec, *g, 1.0, 64.0, 1000, 42),
                    RangeTooNarrow);
}

TEST_CASE("bounded extension does not depend on the split radius") {
    auto g = a1_grid(129);
    KernelSpec spec;
    OperatorMatrix T = build_discrete_sio(g, spec);
    GridFunction f = constant_function(g, 1.0);
    GridFunction e1 = extend_to_linfty(T, spec, f, 1.0);
    GridFunction e2 = extend_to_linfty(T, spec, f, 2.0);
    CHECK((e1.values - e2.values).cwiseAbs().maxCoeff() < 1e-10);

    CHECK_THROWS_AS(extend_to_linfty(T, spec, f, 5.0), RTooLarge);
    auto even = a1_grid(64);
    OperatorMatrix Te = build_discrete_sio(even, spec);
    GridFunction fe = constant_function(even, 1.0);
    CHECK_THROWS_AS(extend_to_linfty(Te, spec, fe, 1.0), OriginMissing);
}

TEST_CASE("weak boundedness library produces a finite constant") {
    auto g = a1_grid(65);
    KernelSpec spec;
    OperatorMatrix T = build_discrete_sio(g, spec);
    VerificationReport rep = wbp_constant(T);
    for (const auto& m : rep.metrics)
        if (m.pass && !*m.pass) MESSAGE(m.name, " = ", m.value);
    CHECK(rep.all_pass());
    const Metric* c = rep.find("wbp_constant");
    REQUIRE(c != nullptr);
    CHECK(c->value > 0);

    auto tiny = build_grid(0.2, 9, generate_group(root_system_preset("A1")));
    OperatorMatrix Tt = build_discrete_sio(tiny, spec);
    CHECK_THROWS_AS(wbp_constant(Tt), EmptyLibrary);
}

TEST_CASE("paraproduct maps one to the band symbol and kills constants") {
    auto g = a1_grid(65);
    auto fam = closed_family(g);
    CalderonSystem sys = build_calderon_system(fam, 1);
    GridFunction b = bump(g, 1.0, 1.5);
    Paraproduct pp = build_paraproduct(b, sys);
    CHECK(pp.k_lo == sys.tilde_cancel_from);
    CHECK(pp.k_hi == fam->k_max);

    GridFunction one = constant_function(g, 1.0);
    GridFunction to_one = apply(pp.op, one);
    CHECK((to_one.values - pp.band_symbol.values).cwiseAbs().maxCoeff() < 1e-12);
    GridFunction adj_one = apply_adjoint(pp.op, one);
    CHECK(l2_norm(adj_one) < 1e-8);

    Paraproduct zero = build_paraproduct(constant_function(g, 2.5), sys);
    CHECK(zero.op.entries.cwiseAbs().maxCoeff() < 1e-12);

    VerificationReport rep = verify_paraproduct(pp, sys);
    for (const auto& m : rep.metrics)
        if (m.pass && !*m.pass) MESSAGE(m.name, " = ", m.value);
    CHECK(rep.all_pass());
}

TEST_CASE("reduction cancels the special symbols of the operator") {
    auto g = a1_grid(65);
    auto fam = closed_family(g);
    CalderonSystem sys = build_calderon_system(fam, 1);
    KernelSpec spec;
    OperatorMatrix T = build_discrete_sio(g, spec);
    VerificationReport rep;
    OperatorMatrix reduced = t1_reduction(T, sys, &rep);
    for (const auto& m : rep.metrics)
        if (m.pass && !*m.pass) MESSAGE(m.name, " = ", m.value);
    CHECK(rep.all_pass());
    CHECK(reduced.entries.allFinite());
}

TEST_CASE("band decay of the image of a Holder input") {
    auto g = a1_grid(257);
    auto fam = closed_family(g);
    KernelSpec spec;
    OperatorMatrix T = build_discrete_sio(g, spec);
    GridFunction cusp = make_function(
        g, [](const Vec& x) { return std::min(1.0, std::sqrt(std::abs(x[0]))); });
    VerificationReport rep = dk_Tf_decay(T, cusp, *fam, 0.5);
    for (const auto& m : rep.metrics)
        if (m.pass && !*m.pass) MESSAGE(m.name, " = ", m.value);
    CHECK(rep.all_pass());
}

TEST_CASE("mollifier is mass preserving, smooth, and guarded") {
    auto g = a1_grid(129);
    GridFunction f = bump(g, 2.0, 0.6);
    CHECK_THROWS_AS(mollify_G(f, 2 * g->spacing), EpsTooSmall);
    GridFunction m = mollify_G(f, 0.5);
    CHECK(invariance_defect(m) < 1e-12);
    GridFunction one = constant_function(g, 1.0);
    GridFunction mone = mollify_G(one, 0.5);
    CHECK((mone.values.array() - 1).abs().maxCoeff() < 1e-14);
    // smoothing contracts the sup of the second difference
    auto second_diff = [&](const GridFunction& h) {
        double s = 0;
        for (long i = 1; i + 1 < h.values.size(); ++i)
            s = std::max(s, std::abs(h.values[i + 1] - 2 * h.values[i] + h.values[i - 1]));
        return s;
    };
    CHECK(second_diff(m) < second_diff(f));
}

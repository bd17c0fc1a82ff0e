#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>

#include "rga/grid.hpp"

using namespace rga;

namespace {

std::shared_ptr<const Grid> tiny_a1(int n = 5, double w = 2.0) {
    return build_grid(w, n, generate_group(root_system_preset("A1")));
}

GridFunction random_invariant(std::shared_ptr<const Grid> g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    GridFunction f = constant_function(g, 0.0);
    for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values[i] = u(rng);
    return symmetrize(f);
}

} // namespace

TEST_CASE("cell centers, weights, and exact total measure") {
    auto g = tiny_a1();
    REQUIRE(g->size() == 5);
    CHECK(g->spacing == doctest::Approx(0.8).epsilon(1e-15));
    const double want[5] = {-1.6, -0.8, 0.0, 0.8, 1.6};
    for (int i = 0; i < 5; ++i)
        CHECK(g->points[static_cast<std::size_t>(i)][0] ==
              doctest::Approx(want[i]).epsilon(1e-14));
    double total = g->weights.sum();
    CHECK(total == doctest::Approx(4.0).epsilon(1e-15));

    auto g257 = build_grid(8.0, 257, generate_group(root_system_preset("A1")));
    CHECK(g257->weights.sum() == doctest::Approx(16.0).epsilon(1e-14));
}

TEST_CASE("origin membership") {
    CHECK(tiny_a1(5)->has_origin());
    CHECK(tiny_a1(5)->origin_index() == 2);
    CHECK_FALSE(tiny_a1(4)->has_origin());
    CHECK(tiny_a1(4)->origin_index() == -1);
}

TEST_CASE("flat and axis indices round trip in 2d") {
    auto g = build_grid(2.0, 5, generate_group(root_system_preset("B2")));
    REQUIRE(g->size() == 25);
    CHECK(g->weights.sum() == doctest::Approx(16.0).epsilon(1e-14));
    for (std::size_t i = 0; i < g->size(); ++i) {
        auto ax = g->axis_indices(i);
        CHECK(g->flat_index(ax) == static_cast<int>(i));
    }
    for (std::size_t i = 0; i < g->size(); ++i)
        CHECK(g->index_of(g->points[i]) == static_cast<int>(i));
    Vec off(2);
    off << 0.123456, 0.7;
    CHECK(g->index_of(off) == -1);
}

TEST_CASE("action table is the exact point permutation") {
    auto g = tiny_a1();
    REQUIRE(g->action.size() == 2);
    for (int i = 0; i < 5; ++i) {
        CHECK(g->action[0][static_cast<std::size_t>(i)] == i); // identity first
        CHECK(g->action[1][static_cast<std::size_t>(i)] == 4 - i);
    }
    // composition: sigma twice is the identity permutation
    for (int i = 0; i < 5; ++i)
        CHECK(g->action[1][static_cast<std::size_t>(g->action[1][static_cast<std::size_t>(i)])] == i);
}

TEST_CASE("grid rejects symmetry that does not permute the lattice") {
    ReflectionGroup a2 = generate_group(root_system_preset("A2"));
    CHECK_THROWS_AS(build_grid(1.0, 5, a2), IncompatibleGroup);
}

TEST_CASE("metric matches brute force over group elements") {
    auto g = build_grid(2.0, 7, generate_group(root_system_preset("B2")));
    const ReflectionGroup& G = g->group;
    for (std::size_t i = 0; i < g->size(); i += 3)
        for (std::size_t j = 0; j < g->size(); j += 5) {
            double brute = std::numeric_limits<double>::infinity();
            for (const Mat& s : G.elements)
                brute = std::min(brute, (g->points[i] - s * g->points[j]).norm());
            CHECK(g->metric(i, j) == doctest::Approx(brute).epsilon(1e-13));
            CHECK(g->metric(i, j) == doctest::Approx(g->metric(j, i)).epsilon(1e-13));
        }
}

TEST_CASE("interior indices") {
    auto g = tiny_a1(); // points at -1.6 .. 1.6, boundary at +-2
    // distance of point x to the boundary is 2 - |x|
    CHECK(g->interior_indices(0.3).size() == 5);
    CHECK(g->interior_indices(0.5).size() == 3);
    CHECK(g->interior_indices(1.3).size() == 1);
    CHECK(g->interior_indices(3.0).empty());
}

TEST_CASE("quadrature, norms, inner products on known values") {
    auto g = tiny_a1();
    GridFunction f = constant_function(g, 0.0);
    f.values << 3, 1, 0, 1, 3;
    CHECK(l1_norm(f) == doctest::Approx(0.8 * 8).epsilon(1e-14));
    CHECK(l2_norm(f) == doctest::Approx(std::sqrt(0.8 * 20)).epsilon(1e-14));
    CHECK(linf_norm(f) == 3.0);
    CHECK(quadrature_sum(f) == doctest::Approx(0.8 * 8).epsilon(1e-14));
    CHECK(weak_l1_measure(f, 2.0) == doctest::Approx(1.6).epsilon(1e-14));
    CHECK(weak_l1_measure(f, 3.0) == doctest::Approx(0.0));
    GridFunction h = constant_function(g, 2.0);
    CHECK(inner(f, h) == doctest::Approx(2 * 0.8 * 8).epsilon(1e-14));
}

TEST_CASE("symmetrize projects exactly and is idempotent") {
    auto g = tiny_a1(33);
    GridFunction f = constant_function(g, 0.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values[i] = u(rng);
    CHECK(invariance_defect(f) > 0.1); // generic noise is not invariant
    GridFunction s = symmetrize(f);
    CHECK(invariance_defect(s) < 1e-15);
    GridFunction ss = symmetrize(s);
    for (Eigen::Index i = 0; i < s.values.size(); ++i)
        CHECK(ss.values[i] == s.values[i]);
    // projection preserves the mean
    CHECK(quadrature_sum(s) == doctest::Approx(quadrature_sum(f)).epsilon(1e-13));
}

TEST_CASE("csv round trip preserves every bit") {
    auto g = tiny_a1(9);
    GridFunction f = random_invariant(g, 99);
    const char* path = "grid_tmp_test.csv";
    dump_csv(f, path);
    GridFunction back = load_csv(g, path);
    for (Eigen::Index i = 0; i < f.values.size(); ++i)
        CHECK(back.values[i] == f.values[i]);
    std::remove(path);
    CHECK_THROWS_AS(load_csv(g, "no_such_grid_file.csv"), IoFailure);
}

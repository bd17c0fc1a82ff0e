#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rga/cz.hpp"

using namespace rga;

namespace {

std::shared_ptr<const Grid> a1_grid(int n, double w = 8.0) {
    return build_grid(w, n, generate_group(root_system_preset("A1")));
}

GridFunction spike(std::shared_ptr<const Grid> g, double c, double s, double amp = 1.0) {
    GridFunction f = make_function(g, [&](const Vec& x) {
        return amp * std::exp(-(x[0] - c) * (x[0] - c) / (s * s));
    });
    return symmetrize(f);
}

} // namespace

TEST_CASE("whitney cover of a centered strip on a tiny line grid") {
    auto g = build_grid(2.0, 16, trivial_group(1));
    // set = indices 4..11, i.e. x in [-1, 1): a centered band of 8 cells
    std::vector<char> in_set(16, 0);
    for (int i = 4; i <= 11; ++i) in_set[static_cast<std::size_t>(i)] = 1;
    WhitneyResult w = whitney_cover(*g, in_set);
    CHECK_FALSE(w.whole_grid);

    // every emitted cube: inside the set, disjoint, separation >= diameter
    std::vector<int> covered;
    for (const WhitneyCube& q : w.cubes) {
        CHECK(q.side > 0);
        CHECK(q.dist_to_complement >= q.side * std::sqrt(1.0) - 1e-12);
        for (int i : q.points) {
            CHECK(in_set[static_cast<std::size_t>(i)] == 1);
            covered.push_back(i);
        }
    }
    std::sort(covered.begin(), covered.end());
    CHECK(std::adjacent_find(covered.begin(), covered.end()) == covered.end());
    // cover + slivers account for the whole set exactly
    for (int i : w.slivers) covered.push_back(i);
    std::sort(covered.begin(), covered.end());
    std::vector<int> want;
    for (int i = 4; i <= 11; ++i) want.push_back(i);
    CHECK(covered == want);

    // determinism
    WhitneyResult w2 = whitney_cover(*g, in_set);
    REQUIRE(w2.cubes.size() == w.cubes.size());
    for (std::size_t i = 0; i < w.cubes.size(); ++i) {
        CHECK(w2.cubes[i].low[0] == w.cubes[i].low[0]);
        CHECK(w2.cubes[i].side == w.cubes[i].side);
    }
}

TEST_CASE("whitney edge cases: full grid and empty set") {
    auto g = build_grid(2.0, 8, trivial_group(1));
    std::vector<char> all(8, 1);
    WhitneyResult wa = whitney_cover(*g, all);
    CHECK(wa.whole_grid);
    REQUIRE(wa.cubes.size() == 1);
    CHECK(wa.cubes[0].points.size() == 8);

    std::vector<char> none(8, 0);
    WhitneyResult wn = whitney_cover(*g, none);
    CHECK(wn.cubes.empty());
    CHECK(wn.slivers.empty());
    CHECK_FALSE(wn.whole_grid);
}

TEST_CASE("whitney separation scales with cube size in 2d") {
    auto g = build_grid(2.0, 16, trivial_group(2));
    std::vector<char> in_set(g->size(), 0);
    for (std::size_t i = 0; i < g->size(); ++i)
        if (g->point(i).cwiseAbs().maxCoeff() < 1.5) in_set[i] = 1;
    WhitneyResult w = whitney_cover(*g, in_set);
    CHECK_FALSE(w.cubes.empty());
    for (const WhitneyCube& q : w.cubes)
        CHECK(q.dist_to_complement >= q.side * std::sqrt(2.0) - 1e-12);
}

TEST_CASE("decomposition rejects bad inputs") {
    auto g = a1_grid(65);
    GridFunction skew = make_function(g, [](const Vec& x) { return x[0]; });
    CHECK_THROWS_AS(cz_decompose(skew, 0.5), NotInvariant);
    GridFunction f = spike(g, 2.0, 1.0);
    CHECK_THROWS_AS(cz_decompose(f, 1e-9), LambdaTooSmall);
}

TEST_CASE("high threshold leaves everything good") {
    auto g = a1_grid(65);
    GridFunction f = spike(g, 2.0, 1.0);
    double top = linf_norm(maximal_function(f));
    CZOutput out = cz_decompose(f, 2 * top);
    CHECK(out.bad.empty());
    for (char c : out.in_E) CHECK(c == 0);
    for (long i = 0; i < f.values.size(); ++i)
        CHECK(out.good.values[i] == f.values[i]);
}

TEST_CASE("full verification on the line") {
    auto g = a1_grid(65);
    GridFunction f = spike(g, 2.0, 0.8, 3.0);
    CZOutput out = cz_decompose(f, 0.4);
    CHECK_FALSE(out.bad.empty());
    VerificationReport rep = verify_cz(out, f);
    for (const auto& m : rep.metrics)
        if (m.pass && !*m.pass) MESSAGE(m.name, " = ", m.value, " bound ", *m.bound);
    CHECK(rep.all_pass());

    // spot identities, independent of the verifier
    GridFunction sum = out.good;
    for (const CZPiece& p : out.bad) sum.values += p.b.values;
    CHECK((sum.values - f.values).cwiseAbs().maxCoeff() < 1e-12);
    for (const CZPiece& p : out.bad)
        CHECK(std::abs(quadrature_sum(p.b)) < 1e-10);
}

TEST_CASE("full verification on a 2d reflection grid") {
    auto g = build_grid(4.0, 9, generate_group(root_system_preset("B2")));
    GridFunction f = make_function(g, [](const Vec& x) {
        return 2.0 * std::exp(-(x.squaredNorm() - 2 * x[0] + 1));
    });
    f = symmetrize(f);
    CZOutput out = cz_decompose(f, 0.35);
    VerificationReport rep = verify_cz(out, f);
    for (const auto& m : rep.metrics)
        if (m.pass && !*m.pass) MESSAGE(m.name, " = ", m.value, " bound ", *m.bound);
    CHECK(rep.all_pass());
}

TEST_CASE("weak type bound for the identity is Chebyshev-sharp") {
    auto g = a1_grid(129);
    std::vector<GridFunction> corpus = {spike(g, 1.0, 0.5), spike(g, 3.0, 1.5, 2.0)};
    VerificationReport rep = weak11_experiment(corpus, nullptr, {0.05, 0.1, 0.2, 0.4});
    for (const auto& m : rep.metrics)
        if (m.pass && !*m.pass) MESSAGE(m.name, " = ", m.value);
    CHECK(rep.all_pass());
    for (const auto& m : rep.metrics)
        if (m.name.rfind("ratio_", 0) == 0) CHECK(m.value <= 1.0 + 1e-12);
}

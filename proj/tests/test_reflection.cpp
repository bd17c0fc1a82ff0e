#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "rga/reflection.hpp"

using namespace rga;

namespace {

Vec v1(double a) {
    Vec x(1);
    x << a;
    return x;
}

Vec v2(double a, double b) {
    Vec x(2);
    x << a, b;
    return x;
}

// independent closure oracle: multiply elements until stable, compare order
std::size_t brute_closure_order(const ReflectionGroup& G) {
    auto key = [](const Mat& m) {
        std::vector<long long> k;
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j)
                k.push_back(llround(m(i, j) * 1e6));
        return k;
    };
    std::set<std::vector<long long>> seen;
    std::vector<Mat> elems = G.elements;
    for (const Mat& m : elems) seen.insert(key(m));
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Mat> snapshot = elems;
        for (const Mat& a : snapshot)
            for (const Mat& b : snapshot) {
                Mat c = a * b;
                if (seen.insert(key(c)).second) {
                    elems.push_back(c);
                    grew = true;
                }
            }
    }
    return elems.size();
}

} // namespace

TEST_CASE("single reflection formula") {
    Vec alpha = v1(std::sqrt(2.0));
    CHECK(reflect(alpha, v1(3.5))[0] == doctest::Approx(-3.5).epsilon(1e-14));
    CHECK(reflect(alpha, v1(0.0))[0] == doctest::Approx(0.0));

    Vec a2 = v2(std::sqrt(2.0), 0.0);
    Vec img = reflect(a2, v2(1.25, -0.75));
    CHECK(img[0] == doctest::Approx(-1.25).epsilon(1e-14));
    CHECK(img[1] == doctest::Approx(-0.75).epsilon(1e-14));

    // reflecting twice is the identity
    Vec diag = v2(1.0, 1.0);
    Vec x = v2(0.3, -2.1);
    Vec back = reflect(diag, reflect(diag, x));
    CHECK((back - x).norm() < 1e-14);
}

TEST_CASE("root system validation") {
    const double s2 = std::sqrt(2.0);
    CHECK_THROWS_AS(make_root_system(1, {v1(0.0), v1(0.0)}), ZeroRoot);
    CHECK_THROWS_AS(make_root_system(1, {v1(1.0), v1(-1.0)}), NormViolation);
    CHECK_THROWS_AS(make_root_system(1, {v1(s2), v1(s2)}), ParallelViolation);
    CHECK_THROWS_AS(make_root_system(1, {v1(s2)}), ParallelViolation); // missing -alpha
    // B2 with one reflection image removed is not closed
    CHECK_THROWS_AS(make_root_system(2, {v2(s2, 0), v2(-s2, 0), v2(1, 1), v2(-1, -1)}),
                    ClosureViolation);
    CHECK_NOTHROW(make_root_system(1, {v1(s2), v1(-s2)}));
}

TEST_CASE("preset group orders match the closure oracle") {
    struct Row {
        const char* name;
        std::size_t order;
    };
    for (const Row& r : {Row{"A1", 2}, Row{"A1xA1", 4}, Row{"B2", 8}, Row{"A2", 6}}) {
        ReflectionGroup G = generate_group(root_system_preset(r.name));
        CHECK_MESSAGE(G.order() == r.order, r.name);
        CHECK(brute_closure_order(G) == r.order);
        // identity first, every element orthogonal
        CHECK((G.elements[0] - Mat::Identity(G.dim, G.dim)).norm() < 1e-14);
        for (const Mat& m : G.elements)
            CHECK((m * m.transpose() - Mat::Identity(G.dim, G.dim)).norm() < 1e-12);
    }
    CHECK(trivial_group(3).order() == 1);
}

TEST_CASE("dihedral groups") {
    CHECK(generate_group(dihedral_root_system(2)).order() == 4);
    CHECK(generate_group(dihedral_root_system(3)).order() == 6);
    CHECK(generate_group(dihedral_root_system(5)).order() == 10);
    CHECK(generate_group(dihedral_root_system(6)).order() == 12);
    CHECK(brute_closure_order(generate_group(dihedral_root_system(5))) == 10);
}

TEST_CASE("order cap") {
    CHECK_THROWS_AS(generate_group(root_system_preset("B2"), 4), OrderCapExceeded);
}

TEST_CASE("deterministic element ordering") {
    ReflectionGroup a = generate_group(root_system_preset("B2"));
    ReflectionGroup b = generate_group(root_system_preset("B2"));
    REQUIRE(a.order() == b.order());
    for (std::size_t i = 0; i < a.order(); ++i)
        CHECK((a.elements[i] - b.elements[i]).norm() == 0.0);
}

TEST_CASE("orbits") {
    ReflectionGroup G = generate_group(root_system_preset("B2"));
    OrbitSet o = orbit(G, v2(1.0, 0.0));
    REQUIRE(o.points.size() == 4); // axis point: half the group stabilizes it
    std::set<std::pair<double, double>> got;
    for (const Vec& p : o.points) got.insert({p[0], p[1]});
    std::set<std::pair<double, double>> want = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
    CHECK(got == want);
    CHECK(orbit(G, v2(1.0, 2.0)).points.size() == 8);
    CHECK(orbit(G, v2(0.0, 0.0)).points.size() == 1);
}

TEST_CASE("orbit distance") {
    ReflectionGroup G = generate_group(root_system_preset("A1"));
    CHECK(orbit_distance(G, v1(1.0), v1(-2.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(orbit_distance(G, v1(1.0), v1(2.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(orbit_distance(G, v1(3.0), v1(-3.0)) == doctest::Approx(0.0));

    // trivial group: orbit distance is plain euclidean distance
    ReflectionGroup T = trivial_group(2);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int t = 0; t < 200; ++t) {
        Vec x = v2(u(rng), u(rng)), y = v2(u(rng), u(rng));
        CHECK(orbit_distance(T, x, y) == doctest::Approx((x - y).norm()).epsilon(1e-14));
    }

    // domination and bi-invariance for B2
    ReflectionGroup B = generate_group(root_system_preset("B2"));
    for (int t = 0; t < 200; ++t) {
        Vec x = v2(u(rng), u(rng)), y = v2(u(rng), u(rng));
        double d = orbit_distance(B, x, y);
        CHECK(d <= (x - y).norm() + 1e-12);
        const Mat& s = B.elements[static_cast<std::size_t>(t) % B.order()];
        CHECK(orbit_distance(B, s * x, y) == doctest::Approx(d).epsilon(1e-12));
    }
}

TEST_CASE("root system file round trip") {
    const char* path = "roots_tmp_test.txt";
    {
        std::ofstream out(path);
        out << "# two-line reflection data\n";
        out << "1.4142135623730951\n\n-1.4142135623730951\n";
    }
    RootSystem rs = load_root_system(path);
    CHECK(rs.dim == 1);
    CHECK(generate_group(rs).order() == 2);
    std::remove(path);
    CHECK_THROWS_AS(load_root_system("no_such_file_anywhere.txt"), IoFailure);
}

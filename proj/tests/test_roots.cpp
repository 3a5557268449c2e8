#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "planeflow/roots.hpp"

using namespace planeflow;

namespace {

// independent oracle: Newton refinement of t^2 - 2 from the interval [1, 2],
// no library involvement
double sqrt2_oracle() {
    double x = 1.5;
    for (int i = 0; i < 60; ++i) x = x - (x * x - 2) / (2 * x);
    return x;
}

UniPoly from_roots(const std::vector<std::pair<int, int>>& rs) {
    UniPoly p({1});
    for (auto [r, m] : rs)
        for (int i = 0; i < m; ++i) p = p * UniPoly({Rational(-r), 1});
    return p;
}

}  // namespace

TEST_CASE("real_roots isolates t^2 - 2") {
    UniPoly u({-2, 0, 1});
    RootIsolation iso = real_roots(u, 1e-12);
    REQUIRE(iso.roots.size() == 2);
    double s = sqrt2_oracle();
    CHECK(iso.roots[0].multiplicity == 1);
    CHECK(iso.roots[1].multiplicity == 1);
    CHECK_THAT(iso.roots[0].value, Catch::Matchers::WithinAbs(-s, 1e-12));
    CHECK_THAT(iso.roots[1].value, Catch::Matchers::WithinAbs(s, 1e-12));
}

TEST_CASE("real_roots multiplicities") {
    {
        RootIsolation iso = real_roots(UniPoly({0, 0, 1}));  // t^2
        REQUIRE(iso.roots.size() == 1);
        CHECK(iso.roots[0].value == 0.0);
        CHECK(iso.roots[0].multiplicity == 2);
    }
    {
        RootIsolation iso = real_roots(UniPoly({1, 0, 1}));  // t^2 + 1
        CHECK(iso.roots.empty());
    }
    {
        // (t-1)^3 (t+2)
        RootIsolation iso = real_roots(from_roots({{1, 3}, {-2, 1}}));
        REQUIRE(iso.roots.size() == 2);
        CHECK_THAT(iso.roots[0].value, Catch::Matchers::WithinAbs(-2.0, 1e-12));
        CHECK(iso.roots[0].multiplicity == 1);
        CHECK_THAT(iso.roots[1].value, Catch::Matchers::WithinAbs(1.0, 1e-12));
        CHECK(iso.roots[1].multiplicity == 3);
    }
}

TEST_CASE("real_roots handles exact rational roots and disjoint intervals") {
    // 6 t^2 - 5 t + 1 = (2t - 1)(3t - 1): roots 1/2, 1/3
    RootIsolation iso = real_roots(UniPoly({1, -5, 6}), 1e-14);
    REQUIRE(iso.roots.size() == 2);
    CHECK_THAT(iso.roots[0].value, Catch::Matchers::WithinAbs(1.0 / 3, 1e-14));
    CHECK_THAT(iso.roots[1].value, Catch::Matchers::WithinAbs(0.5, 1e-14));
    CHECK(iso.roots[0].hi <= iso.roots[1].lo);
}

TEST_CASE("random products recover their roots") {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> rdist(-5, 5), mdist(1, 3), ndist(1, 3);
    for (int trial = 0; trial < 40; ++trial) {
        int n = ndist(rng);
        std::vector<std::pair<int, int>> rs;
        for (int i = 0; i < n; ++i) {
            int r = rdist(rng);
            bool dup = false;
            for (auto& [rr, mm] : rs) dup = dup || rr == r;
            if (dup) continue;
            rs.push_back({r, mdist(rng)});
        }
        UniPoly u = from_roots(rs);
        RootIsolation iso = real_roots(u, 1e-12);
        REQUIRE(iso.roots.size() == rs.size());
        std::sort(rs.begin(), rs.end());
        for (size_t i = 0; i < rs.size(); ++i) {
            CHECK_THAT(iso.roots[i].value, Catch::Matchers::WithinAbs(double(rs[i].first), 1e-10));
            CHECK(iso.roots[i].multiplicity == rs[i].second);
        }
    }
}

TEST_CASE("squarefree decomposition is exact") {
    // u = (t^2 - 2)^2 (t + 1)
    UniPoly f({-2, 0, 1});
    UniPoly u = f * f * UniPoly({1, 1});
    auto fac = squarefree_decomposition(u);
    REQUIRE(fac.size() == 2);
    CHECK(fac[0] == UniPoly({1, 1}));
    CHECK(fac[1] == f.monic());
}

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "planeflow/parse.hpp"
#include "planeflow/poly.hpp"

using namespace planeflow;

namespace {

HomoPoly random_homo(std::mt19937& rng, int deg, int cmax) {
    std::uniform_int_distribution<int> coef(-cmax, cmax);
    for (;;) {
        std::vector<Rational> cs(deg + 1);
        bool nonzero = false;
        for (auto& c : cs) {
            c = coef(rng);
            if (c != 0) nonzero = true;
        }
        if (nonzero) return HomoPoly(deg, std::move(cs));
    }
}

}  // namespace

TEST_CASE("parse_poly expands and checks homogeneity") {
    HomoPoly g = parse_poly("x^2 - y^2");
    REQUIRE(g.degree() == 2);
    CHECK(g.coeff(2) == 1);
    CHECK(g.coeff(1) == 0);
    CHECK(g.coeff(0) == -1);

    HomoPoly h = parse_poly("2*x*y");
    REQUIRE(h.degree() == 2);
    CHECK(h.coeff(1) == 2);
    CHECK(h.coeff(2) == 0);
    CHECK(h.coeff(0) == 0);

    CHECK_THROWS_AS(parse_poly("x^2 + x"), parse_error);
    CHECK_THROWS_AS(parse_poly("x^2 +"), parse_error);
    CHECK_THROWS_AS(parse_poly("sin(x)"), parse_error);
    CHECK_THROWS_AS(parse_poly("x/y"), parse_error);
    CHECK_THROWS_AS(parse_poly("x^2/0"), parse_error);
    CHECK_THROWS_AS(parse_poly("x^65"), parse_error);
    CHECK_THROWS_AS(parse_poly("x^2^3"), parse_error);
    CHECK_THROWS_AS(parse_poly("x^1.5"), parse_error);

    // products, powers, rational and decimal literals
    HomoPoly q = parse_poly("(x + y)^2 - 2*x*y");
    CHECK(q == parse_poly("x^2 + y^2"));
    CHECK(parse_poly("1/2*x^2").coeff(2) == Rational(1, 2));
    CHECK(parse_poly("0.25*x*y").coeff(1) == Rational(1, 4));
    CHECK(parse_poly("x^2/2").coeff(2) == Rational(1, 2));
    CHECK(parse_poly("0").is_zero());
    CHECK(parse_poly("x - x").is_zero());
}

TEST_CASE("parse error positions are reported") {
    try {
        parse_poly("x^2 + @");
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.position == 6);
    }
}

TEST_CASE("partial derivatives") {
    HomoPoly g = parse_poly("x^2 - y^2");
    CHECK(partial_x(g) == parse_poly("2*x"));
    CHECK(partial_y(g) == parse_poly("-2*y"));
    CHECK(partial_x(HomoPoly::constant(Rational(5))).is_zero());
    CHECK(partial_y(parse_poly("x^3")).is_zero());
}

TEST_CASE("partials commute") {
    std::mt19937 rng(1234);
    std::uniform_int_distribution<int> dd(2, 8);
    for (int i = 0; i < 50; ++i) {
        HomoPoly g = random_homo(rng, dd(rng), 9);
        CHECK(partial_x(partial_y(g)) == partial_y(partial_x(g)));
    }
}

TEST_CASE("eval_poly") {
    CHECK(parse_poly("x^2 - y^2").eval(3, 5) == Rational(-16));
    CHECK(parse_poly("2*x*y").eval(1, 1) == Rational(2));
    CHECK(parse_poly("x^3").eval(2, 7) == Rational(8));
    // double path agrees
    CHECK(PolyEval(parse_poly("x^2 - y^2"))(3.0, 5.0) == -16.0);
}

TEST_CASE("dehomogenize examples and round trip") {
    {
        auto [m, u] = dehomogenize(parse_poly("x^2*y"));
        CHECK(m == 1);
        CHECK(u == UniPoly({0, 0, 1}));
    }
    {
        auto [m, u] = dehomogenize(parse_poly("x^2 + y^2"));
        CHECK(m == 0);
        CHECK(u == UniPoly({1, 0, 1}));
    }
    {
        auto [m, u] = dehomogenize(parse_poly("y^3"));
        CHECK(m == 3);
        CHECK(u == UniPoly({1}));
    }
    CHECK_THROWS(dehomogenize(HomoPoly::zero()));

    std::mt19937 rng(99);
    std::uniform_int_distribution<int> dd(1, 9);
    for (int i = 0; i < 60; ++i) {
        HomoPoly g = random_homo(rng, dd(rng), 9);
        auto [m, u] = dehomogenize(g);
        CHECK(homogenize(m, u) == g);
    }
}

TEST_CASE("gcd_homo examples") {
    CHECK(gcd_homo(parse_poly("2*x"), parse_poly("-2*y")) == HomoPoly::constant(1));
    CHECK(gcd_homo(parse_poly("x^2*y"), parse_poly("x*y^2")) == parse_poly("x*y"));
    HomoPoly g = parse_poly("3*x^2*y - y^3");
    HomoPoly d = gcd_homo(g, g);
    CHECK(divides_homo(d, g));
    CHECK(d.degree() == g.degree());
    CHECK(d.coeffs().back() == 0);  // leading x^3 coefficient of g is 0
    CHECK(d == g * Rational(1, 3));  // monic normalization of the x-profile
}

TEST_CASE("gcd divides both arguments") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> dd(1, 6);
    for (int i = 0; i < 60; ++i) {
        HomoPoly a = random_homo(rng, dd(rng), 5);
        HomoPoly b = random_homo(rng, dd(rng), 5);
        HomoPoly d = gcd_homo(a, b);
        CHECK(divides_homo(d, a));
        CHECK(divides_homo(d, b));
    }
}

TEST_CASE("euler identity is exactly zero") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> dd(2, 8), num(-20, 20), den(1, 9);
    for (int i = 0; i < 100; ++i) {
        HomoPoly g = random_homo(rng, dd(rng), 9);
        Rational x(num(rng), den(rng)), y(num(rng), den(rng));
        CHECK(euler_residual(g, x, y) == 0);
    }
    CHECK(euler_residual(parse_poly("x^2 - y^2"), 3, 5) == 0);
    CHECK(euler_residual(parse_poly("2*x*y"), 7, -2) == 0);
    CHECK(euler_residual(parse_poly("3*x^2*y - y^3"), 1, 1) == 0);
}

TEST_CASE("to_string round trips through the parser") {
    std::mt19937 rng(55);
    std::uniform_int_distribution<int> dd(0, 9);
    for (int i = 0; i < 80; ++i) {
        HomoPoly g = random_homo(rng, dd(rng), 9);
        CHECK(parse_poly(g.to_string()) == g);
    }
    CHECK(parse_poly(HomoPoly::zero().to_string()).is_zero());
    CHECK(parse_poly(parse_poly("-x^2 - 1/2*x*y + y^2").to_string()) ==
          parse_poly("-x^2 - 1/2*x*y + y^2"));
}

TEST_CASE("parse_fn evaluates and differentiates") {
    SmoothFn f = parse_fn("2 + sin(x*y)", VarPair::XY);
    CHECK(f.eval(0, 0) == 2.0);
    CHECK_THAT(f.eval(1.0, 0.5), Catch::Matchers::WithinAbs(2 + std::sin(0.5), 1e-15));

    SmoothFn flat = parse_fn("exp(-1/(x^2+y^2))", VarPair::XY, 0.0);
    CHECK(flat.eval(0, 0) == 0.0);
    CHECK_THAT(flat.eval(1.0, 0.0), Catch::Matchers::WithinAbs(0.3678794411714423, 1e-12));

    SmoothFn g = parse_fn("exp(-1/rho^2)", VarPair::PhiRho, 0.0);
    CHECK(g.eval(3.0, 0.0) == 0.0);
    CHECK_THAT(g.eval(0.3, 1.0), Catch::Matchers::WithinAbs(std::exp(-1.0), 1e-15));

    CHECK_THROWS_AS(parse_fn("tanh(x)", VarPair::XY), parse_error);
    CHECK_THROWS_AS(parse_fn("x + z", VarPair::XY), parse_error);
    CHECK_THROWS_AS(parse_fn("x + y", VarPair::PhiRho), parse_error);

    // runtime domain errors surface; declared origin values short-circuit them
    SmoothFn inv = parse_fn("1/(x^2+y^2)", VarPair::XY);
    CHECK_THROWS_AS(inv.eval(0, 0), eval_error);

    SmoothFn d = parse_fn("x^3", VarPair::XY).derivative(0);
    CHECK_THAT(d.eval(2.0, 0.0), Catch::Matchers::WithinAbs(12.0, 1e-13));
    SmoothFn e = parse_fn("exp(2*x)", VarPair::XY).derivative(0);
    CHECK_THAT(e.eval(0.5, 0.0), Catch::Matchers::WithinAbs(2 * std::exp(1.0), 1e-13));
}

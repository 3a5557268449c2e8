#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "planeflow/parse.hpp"
#include "planeflow/polar.hpp"
#include "planeflow/shift.hpp"

using namespace planeflow;
using Catch::Matchers::WithinAbs;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("p_map basics") {
    Vec2 z = p_map(1, {0.0, 1.0});
    CHECK_THAT(z.x, WithinAbs(1.0, 1e-15));
    CHECK_THAT(z.y, WithinAbs(0.0, 1e-15));
    z = p_map(1, {pi / 2, 2.0});
    CHECK_THAT(z.x, WithinAbs(0.0, 1e-15));
    CHECK_THAT(z.y, WithinAbs(2.0, 1e-15));
    z = p_map(2, {pi, 3.0});
    CHECK_THAT(z.x, WithinAbs(-9.0, 1e-13));
    CHECK_THAT(z.y, WithinAbs(0.0, 1e-13));
}

TEST_CASE("p_inverse picks the branch nearest the hint") {
    HalfPlanePoint a = p_inverse(1, {0.0, 2.0}, 0.0);
    CHECK_THAT(a.phi, WithinAbs(pi / 2, 1e-14));
    CHECK_THAT(a.rho, WithinAbs(2.0, 1e-14));

    a = p_inverse(1, {1.0, 0.0}, 7.0);
    CHECK_THAT(a.phi, WithinAbs(2 * pi, 1e-14));
    CHECK_THAT(a.rho, WithinAbs(1.0, 1e-14));

    CHECK_THROWS_AS(p_inverse(1, {0.0, 0.0}, 0.0), std::domain_error);

    std::mt19937 rng(606);
    std::uniform_real_distribution<double> uphi(-9, 9), urho(0.1, 2.0), uh(-9, 9);
    for (int k : {1, 2, 3}) {
        for (int i = 0; i < 40; ++i) {
            double hint = uh(rng);
            HalfPlanePoint p{uphi(rng), urho(rng)};
            Vec2 z = p_map(k, p);
            HalfPlanePoint q = p_inverse(k, z, hint);
            CHECK(std::abs(q.phi - hint) <= pi + 1e-12);
            CHECK_THAT(dist(p_map(k, q), z), WithinAbs(0.0, 1e-12));
        }
    }
}

TEST_CASE("lift_field closed forms") {
    {
        HalfPlaneField F = lift_field(hamiltonian(parse_poly("x^2 + y^2")));
        for (double phi : {0.0, 0.7, 3.0, -2.0}) {
            for (double rho : {0.2, 1.0, 1.7}) {
                Vec2 v = F({phi, rho});
                CHECK_THAT(v.x, WithinAbs(2.0, 1e-12));
                CHECK_THAT(v.y, WithinAbs(0.0, 1e-12));
            }
        }
    }
    {
        HalfPlaneField F = lift_field(hamiltonian(parse_poly("x*y")));
        for (double phi : {0.1, 1.1, -0.4}) {
            for (double rho : {0.3, 1.5}) {
                Vec2 v = F({phi, rho});
                CHECK_THAT(v.x, WithinAbs(std::sin(2 * phi), 1e-12));
                CHECK_THAT(v.y, WithinAbs(-rho * std::cos(2 * phi), 1e-12));
            }
        }
        Vec2 b = F({0.9, 0.0});
        CHECK(b.x == 0.0);
        CHECK(b.y == 0.0);
    }
    CHECK_THROWS(lift_field(hamiltonian(parse_poly("x"))));
}

TEST_CASE("Z-invariance of the lift") {
    HalfPlaneField F = lift_field(hamiltonian(parse_poly("3*x^2*y - y^3")));
    for (double phi : {0.2, 1.9}) {
        for (double rho : {0.4, 1.2}) {
            Vec2 a = F({phi, rho});
            Vec2 b = F({phi + 2 * pi, rho});
            CHECK_THAT(a.x - b.x, WithinAbs(0.0, 1e-12));
            CHECK_THAT(a.y - b.y, WithinAbs(0.0, 1e-12));
        }
    }
}

TEST_CASE("formula (4.4) matches the numeric lift on a grid") {
    std::vector<std::string> polys = {"x^2 + y^2", "x*y", "3*x^2*y - y^3", "x^2 - y^2"};
    std::vector<SmoothFn> etas = {SmoothFn::constant(1.0), parse_fn("2 + sin(x*y)", VarPair::XY)};
    for (const auto& ps : polys) {
        HomoPoly g = parse_poly(ps);
        for (const auto& eta : etas) {
            PlaneField field(g, eta);
            HalfPlaneField F = lift_field(field);
            double worst = 0.0;
            for (int i = 0; i < 40; ++i) {
                for (int j = 0; j < 20; ++j) {
                    double phi = 2 * pi * i / 40;
                    double rho = 0.2 + 1.8 * j / 19.0;
                    double numeric = F({phi, rho}).x;
                    double formula = f1_formula(g, eta, {phi, rho});
                    worst = std::max(worst, std::abs(numeric - formula));
                }
            }
            INFO("g = " << ps);
            CHECK(worst <= 1e-8);
        }
    }
    CHECK_THROWS(f1_formula(parse_poly("x*y"), SmoothFn::constant(1.0), {0.3, 0.0}));
}

TEST_CASE("F2 structure for g = x*y") {
    HalfPlaneField F = lift_field(hamiltonian(parse_poly("x*y")));
    for (int i = 0; i < 40; ++i) {
        for (int j = 0; j < 20; ++j) {
            double phi = 2 * pi * i / 40;
            double rho = 0.2 + 1.8 * j / 19.0;
            CHECK_THAT(F({phi, rho}).y + rho * std::cos(2 * phi), WithinAbs(0.0, 1e-10));
        }
    }
}

TEST_CASE("conjugacy of flows through P (diagram 4.3)") {
    std::vector<std::string> polys = {"x^2 + y^2", "x*y", "3*x^2*y - y^3", "x^2 - y^2"};
    std::vector<SmoothFn> etas = {SmoothFn::constant(1.0), parse_fn("2 + sin(x*y)", VarPair::XY)};
    std::mt19937 rng(112358);
    std::uniform_real_distribution<double> uphi(0.0, 2 * pi), urho(0.4, 1.4), ut(-0.5, 0.5);
    // the identity concerns the local flow: discard samples that escape the
    // working disk, where expansive growth would only amplify integrator error
    FlowOptions down_opt{.tol = 1e-10, .norm_max = 2.0};
    FlowOptions up_opt{.tol = 1e-10, .norm_max = 10.0};
    for (const auto& ps : polys) {
        HomoPoly g = parse_poly(ps);
        for (const auto& eta : etas) {
            PlaneField field(g, eta);
            HalfPlaneField F = lift_field(field);
            for (int i = 0; i < 50; ++i) {
                HalfPlanePoint a{uphi(rng), urho(rng)};
                double t = ut(rng);
                Vec2 upstairs, downstairs;
                try {
                    downstairs = flow(field, p_map(1, a), t, down_opt);
                    Vec2 ft = flow_generic([&F](Vec2 p) { return F.eval_vec(p); },
                                           Vec2{a.phi, a.rho}, t, up_opt);
                    upstairs = p_map(1, {ft.x, ft.y});
                } catch (const flow_error&) {
                    continue;
                }
                INFO("g = " << ps << " a = (" << a.phi << ", " << a.rho << ") t = " << t);
                CHECK_THAT(dist(upstairs, downstairs), WithinAbs(0.0, 1e-6));
            }
        }
    }
}

TEST_CASE("extract_gammas") {
    {
        // g = x y at root 0: a = 1, p = 1
        GammaSamplers gs = extract_gammas(parse_poly("x*y"), 0.0, 1);
        CHECK_THAT(gs.gamma2_at_root(), WithinAbs(-1.0, 1e-12));
        CHECK_THAT(gs.gamma1_at_root(), WithinAbs(2.0, 1e-12));
        // gamma_1(phi) = sin(2 phi)/phi away from the root
        CHECK_THAT(gs.gamma1(0.5), WithinAbs(std::sin(1.0) / 0.5, 1e-12));
        // gamma_2(phi) = -cos(2 phi)
        CHECK_THAT(gs.gamma2(0.8), WithinAbs(-std::cos(1.6), 1e-12));
    }
    {
        // definite g: a = 0, gamma_1 == 2
        GammaSamplers gs = extract_gammas(parse_poly("x^2 + y^2"), 0.0, 0);
        CHECK_THAT(gs.gamma1_at_root(), WithinAbs(2.0, 1e-12));
        CHECK_THAT(gs.gamma1(1.2), WithinAbs(2.0, 1e-12));
    }
    {
        // rho-independence of the honest quotient against the numeric lift
        HomoPoly g = parse_poly("3*x^2*y - y^3");
        HalfPlaneField F = lift_field(hamiltonian(g));
        GammaSamplers gs = extract_gammas(g, 0.0, 1);
        int p = g.degree() - 1;
        for (double phi : {0.2, 0.5, 0.9}) {
            double q05 = F({phi, 0.5}).x / (std::pow(0.5, p - 1) * phi);
            double q15 = F({phi, 1.5}).x / (std::pow(1.5, p - 1) * phi);
            CHECK_THAT(q05 - q15, WithinAbs(0.0, 1e-8));
            CHECK_THAT(gs.gamma1(phi, 0.5) - q05, WithinAbs(0.0, 1e-8));
        }
    }
}

TEST_CASE("pullback and pushforward") {
    SmoothFn f = parse_fn("x^2 + y^2", VarPair::XY);
    SmoothFn fh = pullback(1, f);
    CHECK_THAT(fh.eval(0.7, 1.3), WithinAbs(1.69, 1e-12));

    SmoothFn fx = pullback(1, parse_fn("x", VarPair::XY));
    CHECK_THAT(fx.eval(pi / 3, 2.0), WithinAbs(2.0 * std::cos(pi / 3), 1e-12));

    SmoothFn flat = parse_fn("exp(-1/(x^2+y^2))", VarPair::XY, 0.0);
    SmoothFn flath = pullback(1, flat);
    CHECK(flath.eval(1.0, 0.0) == 0.0);
    CHECK_THAT(flath.eval(2.5, 1.0), WithinAbs(std::exp(-1.0), 1e-14));

    // round trips within 1e-12 on a grid
    for (const SmoothFn& probe : {f, flat, parse_fn("x", VarPair::XY)}) {
        SmoothFn back = pushforward(1, pullback(1, probe));
        for (int i = 0; i < 10; ++i) {
            for (int j = 0; j < 10; ++j) {
                double x = -1.0 + 2.0 * i / 9.0, y = -1.0 + 2.0 * j / 9.0;
                CHECK_THAT(back.eval(x, y) - probe.eval(x, y), WithinAbs(0.0, 1e-12));
            }
        }
    }

    SmoothFn rho2 = parse_fn("rho^2", VarPair::PhiRho);
    SmoothFn down = pushforward(1, rho2);
    CHECK_THAT(down.eval(0.6, -0.8), WithinAbs(1.0, 1e-12));
    SmoothFn rsin = parse_fn("rho*sin(phi)", VarPair::PhiRho);
    SmoothFn ydown = pushforward(1, rsin);
    CHECK_THAT(ydown.eval(0.3, 0.4), WithinAbs(0.4, 1e-12));

    // a non-periodic input is rejected
    CHECK_THROWS_AS(pushforward(1, parse_fn("phi", VarPair::PhiRho)), std::invalid_argument);

    // k = 2: pullback of x^2 + y^2 is rho^4, and the round trip closes
    SmoothFn up2 = pullback(2, f);
    CHECK_THAT(up2.eval(1.1, 0.9), WithinAbs(std::pow(0.9, 4), 1e-13));
    SmoothFn back2 = pushforward(2, up2);
    CHECK_THAT(back2.eval(0.4, -0.3) - f.eval(0.4, -0.3), WithinAbs(0.0, 1e-12));
}

TEST_CASE("lift_map and descend_map") {
    AnnulusDomain dom{0.2, 1.5};
    {
        LiftedMap ident = lift_map(1, [](Vec2 z) { return z; }, dom);
        HalfPlanePoint r = ident({1.1, 0.8});
        CHECK_THAT(r.phi, WithinAbs(1.1, 1e-12));
        CHECK_THAT(r.rho, WithinAbs(0.8, 1e-12));
        HalfPlanePoint brd = ident({0.4, 0.0});
        CHECK(brd.phi == 0.4);
        CHECK(brd.rho == 0.0);
    }
    {
        double th = 0.35;
        LiftedMap rotated = lift_map(
            1,
            [th](Vec2 z) -> Vec2 {
                return {std::cos(th) * z.x - std::sin(th) * z.y,
                        std::sin(th) * z.x + std::cos(th) * z.y};
            },
            dom);
        HalfPlanePoint r = rotated({2.2, 0.9});
        CHECK_THAT(r.phi, WithinAbs(2.2 + th, 1e-11));
        CHECK_THAT(r.rho, WithinAbs(0.9, 1e-11));
    }
    {
        LiftedMap doubled = lift_map(1, [](Vec2 z) -> Vec2 { return {2 * z.x, 2 * z.y}; }, dom);
        HalfPlanePoint r = doubled({-1.7, 0.6});
        CHECK_THAT(r.phi, WithinAbs(-1.7, 1e-11));
        CHECK_THAT(r.rho, WithinAbs(1.2, 1e-11));
    }
    {
        // descend of (phi + rho^2, rho) rotates each circle by rho^2
        auto hh = [](HalfPlanePoint a) -> HalfPlanePoint { return {a.phi + a.rho * a.rho, a.rho}; };
        PlanarMap h = descend_map(1, hh);
        Vec2 w = h({1.0, 0.0});
        CHECK_THAT(w.x, WithinAbs(std::cos(1.0), 1e-12));
        CHECK_THAT(w.y, WithinAbs(std::sin(1.0), 1e-12));
    }
    {
        // round trip lift(descend) == id on the doubling map
        PlanarMap twice = [](Vec2 z) -> Vec2 { return {2 * z.x, 2 * z.y}; };
        PlanarMap again = descend_map(1, lift_map(1, twice, dom));
        std::mt19937 rng(9);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int i = 0; i < 30; ++i) {
            Vec2 z{u(rng), u(rng)};
            if (norm(z) < 0.25) continue;
            CHECK_THAT(dist(again(z), twice(z)), WithinAbs(0.0, 1e-10));
        }
    }
    {
        // equivariance violation is rejected
        auto bad = [](HalfPlanePoint a) -> HalfPlanePoint { return {0.5 * a.phi, a.rho}; };
        CHECK_THROWS_AS(descend_map(1, bad), std::invalid_argument);
    }
    {
        // k = 2: the doubling map lifts to (phi, 2^(1/2) rho)
        LiftedMap doubled2 = lift_map(2, [](Vec2 z) -> Vec2 { return {2 * z.x, 2 * z.y}; }, dom);
        HalfPlanePoint r = doubled2({0.9, 0.7});
        CHECK_THAT(r.phi, WithinAbs(0.9, 1e-11));
        CHECK_THAT(r.rho, WithinAbs(std::sqrt(2.0) * 0.7, 1e-11));
        PlanarMap again = descend_map(2, doubled2);
        Vec2 z{0.5, -0.4};
        CHECK_THAT(dist(again(z), Vec2{1.0, -0.8}), WithinAbs(0.0, 1e-10));
    }
}

TEST_CASE("lifting a shift map is near-identity with flat deviations") {
    // boundary-smoothness spot check: the lift of a shift by a flat alpha has
    // h1 - phi and h2 - rho flat on the boundary
    HomoPoly g = parse_poly("x^2 + y^2");
    PlaneField field = hamiltonian(g);
    SmoothFn alpha = parse_fn("0.1*exp(-1/(x^2+y^2))", VarPair::XY, 0.0);
    PlanarMap h = make_shift_map(field, alpha, FlowOptions{.tol = 1e-12});
    LiftedMap hh = lift_map(1, h, {0.05, 1.2});
    auto dev1 = [&hh](double phi, double rho) { return hh({phi, rho}).phi - phi; };
    auto dev2 = [&hh](double phi, double rho) { return hh({phi, rho}).rho - rho; };
    // probe options sized for values known only to integrator accuracy
    FlatnessOptions fo;
    fo.step_rel = 1e-2;
    fo.abs_floor = 1e-6;
    JetReport r1 = flatness_report_fn(dev1, JetDomain::HalfPlane, 2, {0.8, 0.6, 0.4, 0.3}, fo);
    JetReport r2 = flatness_report_fn(dev2, JetDomain::HalfPlane, 2, {0.8, 0.6, 0.4, 0.3}, fo);
    CHECK(r1.flat);
    CHECK(r2.flat);
}

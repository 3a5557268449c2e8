#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "planeflow/poly.hpp"
#include "planeflow/roots.hpp"

namespace planeflow {

/// Result of the property (*) decision, carrying both characterizations
/// (squarefree factor structure; coprime partial derivatives) so their
/// agreement can be asserted.
struct StarReport {
    bool holds = false;
    bool via_squarefree = false;
    bool via_coprime_partials = false;
    std::string detail;
};

struct AngularRoot {
    double angle = 0.0;  // radians, inside the window
    int multiplicity = 1;
};

/// Real factor structure of g on the unit circle: the angular roots with
/// multiplicities inside a half-open window of width pi, plus the definite
/// residual form described by a sign flag and a sample value.
struct FactorDecomp {
    int y_mult = 0;                   // multiplicity of the linear factor y
    std::vector<AngularRoot> roots;   // ascending in [phi0 - pi/2, phi0 + pi/2)
    double window_center = 0.0;       // phi0
    bool tau_definite = false;
    double scale = 1.0;               // residual form sampled on the circle, away from roots
    int degree = 0;                   // p + 1

    int total_root_multiplicity() const {
        int s = 0;
        for (const auto& r : roots) s += r.multiplicity;
        return s;
    }
};

/// Decide property (*) both ways: squarefree structure of the y-content /
/// x-profile split, and coprimality of the partial derivatives. The two
/// booleans agree for every input; `holds` reports the squarefree route.
inline StarReport is_star(const HomoPoly& g) {
    if (g.is_zero() || g.degree() < 2)
        throw std::invalid_argument("is_star: requires a homogeneous polynomial of degree >= 2");
    StarReport rep;

    auto [m, u] = dehomogenize(g);
    bool sf = m <= 1;
    if (sf && !u.is_constant()) sf = gcd(u, u.derivative()).is_constant();
    rep.via_squarefree = sf;

    HomoPoly gx = partial_x(g), gy = partial_y(g);
    if (gx.is_zero() || gy.is_zero()) {
        rep.via_coprime_partials = false;
        rep.detail = "a partial derivative vanishes identically";
    } else {
        HomoPoly d = gcd_homo(gx, gy);
        rep.via_coprime_partials = !d.is_zero() && d.degree() == 0;
        if (!rep.via_coprime_partials) rep.detail = "gcd(g_x, g_y) = " + d.to_string();
    }
    if (rep.via_squarefree && rep.detail.empty()) rep.detail = "no multiple real factors";
    if (!rep.via_squarefree && rep.detail.empty()) rep.detail = "repeated factor in g";

    rep.holds = rep.via_squarefree;
    return rep;
}

namespace detail {

/// Translate an angle by multiples of pi into [lo, lo + pi).
inline double into_pi_window(double phi, double lo) {
    constexpr double pi = std::numbers::pi;
    double k = std::floor((phi - lo) / pi);
    double r = phi - k * pi;
    if (r < lo) r += pi;
    if (r >= lo + pi) r -= pi;
    return r;
}

/// Taylor coefficients of phi -> q(cos phi, sin phi) at phi0, computed from
/// the exact rotational derivatives: c_n = Rot^n(q)(cos phi0, sin phi0) / n!.
inline std::vector<double> circle_taylor(const HomoPoly& q, double phi0, int nmax) {
    std::vector<double> c(nmax + 1, 0.0);
    HomoPoly cur = q;
    double fact = 1.0;
    double x = std::cos(phi0), y = std::sin(phi0);
    for (int n = 0; n <= nmax; ++n) {
        if (n > 0) {
            cur = rot_derivative(cur);
            fact *= n;
        }
        c[n] = cur.is_zero() ? 0.0 : PolyEval(cur)(x, y) / fact;
        if (cur.is_zero()) break;
    }
    return c;
}

}  // namespace detail

/// Angular roots of phi -> g(cos phi, sin phi) inside the window
/// [phi0 - pi/2, phi0 + pi/2), with exact multiplicities from univariate root
/// isolation of the x-profile; the y-content contributes the angle where the
/// factor y vanishes.
inline FactorDecomp factor_decomposition(const HomoPoly& g, double phi0) {
    if (g.is_zero()) throw std::domain_error("factor_decomposition: zero polynomial");
    constexpr double pi = std::numbers::pi;
    FactorDecomp dec;
    dec.window_center = phi0;
    dec.degree = g.degree();
    double wlo = phi0 - pi / 2;

    auto [m, u] = dehomogenize(g);
    dec.y_mult = m;
    if (m > 0) {
        // the factor y = rho sin(phi) vanishes at phi = 0 mod pi
        dec.roots.push_back({detail::into_pi_window(0.0, wlo), m});
    }
    if (!u.is_constant()) {
        // a root t of u is the factor (x - t y), vanishing where cot(phi) = t
        RootIsolation iso = real_roots(u, 1e-14);
        for (const auto& r : iso.roots) {
            double phi = pi / 2 - std::atan(r.value);  // arccot branch in (0, pi)
            dec.roots.push_back({detail::into_pi_window(phi, wlo), r.multiplicity});
        }
    }
    std::sort(dec.roots.begin(), dec.roots.end(),
              [](const AngularRoot& a, const AngularRoot& b) { return a.angle < b.angle; });

    // residual form on the circle: g / prod L_i^mult with each linear factor
    // L_i = sin(phi_i) x - cos(phi_i) y normalized to a positive leading
    // coefficient, so the sample does not depend on the window of the roots
    PolyEval ge(g);
    auto tau_at = [&](double phi) {
        double cx = std::cos(phi), sy = std::sin(phi);
        double val = ge(cx, sy);
        for (const auto& r : dec.roots) {
            double lx = std::sin(r.angle), ly = -std::cos(r.angle);
            double s = (std::abs(lx) > 1e-9 ? (lx > 0 ? 1.0 : -1.0) : (ly > 0 ? 1.0 : -1.0));
            for (int k = 0; k < r.multiplicity; ++k) val /= s * (lx * cx + ly * sy);
        }
        return val;
    };
    double best = phi0, best_d = -1.0;
    const int n_grid = 720;
    bool definite = true;
    int sign_seen = 0;
    for (int i = 0; i < n_grid; ++i) {
        double phi = wlo + (i + 0.5) * pi / n_grid;
        double d = pi;
        for (const auto& r : dec.roots)
            d = std::min(d, std::abs(detail::into_pi_window(phi - r.angle, -pi / 2)));
        if (d > best_d) {
            best_d = d;
            best = phi;
        }
        if (d > 1e-3) {
            double t = tau_at(phi);
            int s = (t > 0) - (t < 0);
            if (s == 0 || (sign_seen != 0 && s != sign_seen)) definite = false;
            if (s != 0 && sign_seen == 0) sign_seen = s;
        }
    }
    dec.tau_definite = definite;
    dec.scale = tau_at(best);
    return dec;
}

/// The angular remainder: g(cos phi, sin phi) / prod (phi - phi_i)^mult, smooth
/// and nonvanishing on the open window. Within 1e-4 of a root the quotient is
/// evaluated through the Taylor series of the circle function at that root.
inline double gamma_of(const HomoPoly& g, const FactorDecomp& dec, double phi) {
    constexpr double pi = std::numbers::pi;
    double wlo = dec.window_center - pi / 2, whi = dec.window_center + pi / 2;
    if (!(phi > wlo && phi < whi))
        throw std::domain_error("gamma_of: phi outside the open window");

    constexpr double kLimitBand = 1e-4;
    int nearest = -1;
    double nearest_d = kLimitBand;
    for (size_t i = 0; i < dec.roots.size(); ++i) {
        double d = std::abs(phi - dec.roots[i].angle);
        if (d < nearest_d) {
            nearest_d = d;
            nearest = static_cast<int>(i);
        }
    }
    if (nearest < 0) {
        double val = PolyEval(g)(std::cos(phi), std::sin(phi));
        for (const auto& r : dec.roots)
            for (int k = 0; k < r.multiplicity; ++k) val /= (phi - r.angle);
        return val;
    }
    // limit branch: divide the series of C(phi) at the root by delta^mult
    const AngularRoot& rt = dec.roots[nearest];
    double delta = phi - rt.angle;
    auto c = detail::circle_taylor(g, rt.angle, rt.multiplicity + 8);
    double val = 0.0, dp = 1.0;
    for (int n = rt.multiplicity; n < static_cast<int>(c.size()); ++n) {
        val += c[n] * dp;
        dp *= delta;
    }
    for (size_t i = 0; i < dec.roots.size(); ++i) {
        if (static_cast<int>(i) == nearest) continue;
        for (int k = 0; k < dec.roots[i].multiplicity; ++k) val /= (phi - dec.roots[i].angle);
    }
    return val;
}

/// Multiplicity of phi_i as an angular root of g (0 when it is not one);
/// bounded by 1 for property-(*) polynomials.
inline int a_exponent(const HomoPoly& g, double phi_i) {
    FactorDecomp dec = factor_decomposition(g, phi_i);
    for (const auto& r : dec.roots)
        if (std::abs(r.angle - phi_i) < 1e-9) return r.multiplicity;
    return 0;
}

}  // namespace planeflow

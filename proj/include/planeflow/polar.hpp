#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "planeflow/field.hpp"
#include "planeflow/flow.hpp"
#include "planeflow/star.hpp"
#include "planeflow/vec.hpp"

namespace planeflow {

/// Point of the closed half-plane H = {(phi, rho) : rho >= 0}.
struct HalfPlanePoint {
    double phi = 0.0;
    double rho = 0.0;
};

/// P_k(phi, rho) = (rho^k cos phi, rho^k sin phi).
inline Vec2 p_map(int k, HalfPlanePoint a) {
    double rk = std::pow(a.rho, k);
    return {rk * std::cos(a.phi), rk * std::sin(a.phi)};
}

/// Inverse of P_k away from the origin; the angle branch is the 2*pi-translate
/// nearest phi_hint.
inline HalfPlanePoint p_inverse(int k, Vec2 z, double phi_hint) {
    constexpr double two_pi = 2 * std::numbers::pi;
    if (z.x == 0.0 && z.y == 0.0)
        throw std::domain_error("p_inverse: the origin has no well-defined angle");
    double rho = std::pow(z.x * z.x + z.y * z.y, 1.0 / (2 * k));
    double phi = std::atan2(z.y, z.x);
    phi += two_pi * std::round((phi_hint - phi) / two_pi);
    return {phi, rho};
}

/// The lift F = (F1, F2) of a planar field G through P_1: the unique
/// Z-invariant field with TP o F = G o P, vanishing on the boundary rho = 0.
class HalfPlaneField {
public:
    explicit HalfPlaneField(PlaneField source) : src_(std::move(source)) {
        if (src_.degree() < 2)
            throw std::invalid_argument("lift_field: needs deg g >= 2 so that G(O) = 0");
    }

    /// Evaluate at (phi, rho); below rho = 1e-8 the boundary extension F = 0
    /// is used.
    Vec2 operator()(HalfPlanePoint a) const {
        if (a.rho < 1e-8) return {0.0, 0.0};
        double c = std::cos(a.phi), s = std::sin(a.phi);
        Vec2 g = src_({a.rho * c, a.rho * s});
        return {(-g.x * s + g.y * c) / a.rho, g.x * c + g.y * s};
    }

    /// View as a field on (x, y) = (phi, rho) pairs for the generic integrator.
    Vec2 eval_vec(Vec2 a) const { return (*this)(HalfPlanePoint{a.x, a.y}); }

    const PlaneField& source() const { return src_; }
    static constexpr int k = 1;

private:
    PlaneField src_;
};

inline HalfPlaneField lift_field(const PlaneField& field) { return HalfPlaneField(field); }

/// Closed form (p+1) g(P(a)) eta(P(a)) / rho^2 for the first component of the
/// lift; the multiplier enters through the proof's A = ((p+1) g / (x^2+y^2)) eta.
inline double f1_formula(const HomoPoly& g, const SmoothFn& eta, HalfPlanePoint a) {
    if (a.rho <= 0.0) throw std::domain_error("f1_formula: rho must be positive");
    if (g.is_zero()) throw std::domain_error("f1_formula: zero polynomial");
    Vec2 z = p_map(1, a);
    double gv = PolyEval(g)(z.x, z.y);
    return g.degree() * gv * eta.eval(z.x, z.y) / (a.rho * a.rho);
}

/// Samplers for the gamma_1, gamma_2 of the lift near an angular root phi_i:
///   F1(phi, rho) = rho^(p-1) (phi - phi_i)^a gamma_1(phi)
///   F2(phi, rho) = rho^p (phi - phi_i)^(a-1) gamma_2(phi)   (for a >= 1)
/// Stated for the Hamiltonian normalization eta == 1. Construction verifies
/// rho-independence of the quotients and the nonvanishing of the gammas at
/// the root.
class GammaSamplers {
public:
    GammaSamplers(const HomoPoly& g, double phi_i, int a)
        : g_(g), phi_i_(phi_i), a_(a), p_(g.degree() - 1) {
        // N = y g_x - x g_y is the degree-(p+1) numerator of F2 / (rho^p)
        HomoPoly gx = partial_x(g), gy = partial_y(g);
        HomoPoly ygx = gx.is_zero() ? HomoPoly::zero() : HomoPoly::monomial(1, 0, 1) * gx;
        HomoPoly xgy = gy.is_zero() ? HomoPoly::zero() : HomoPoly::monomial(1, 1, 0) * gy;
        n_ = ygx - xgy;
        check();
    }

    /// gamma_1(phi) = F1(phi, rho) / (rho^(p-1) (phi - phi_i)^a).
    double gamma1(double phi, double rho = 1.0) const {
        return quotient(g_, g_.degree() * 1.0, phi, rho, a_, p_ - 1);
    }

    /// gamma_2(phi) = F2(phi, rho) / (rho^p (phi - phi_i)^(a-1)).
    double gamma2(double phi, double rho = 1.0) const {
        return quotient(n_, 1.0, phi, rho, std::max(a_ - 1, 0), p_);
    }

    double gamma1_at_root() const { return gamma1(phi_i_); }
    double gamma2_at_root() const { return gamma2(phi_i_); }
    int exponent() const { return a_; }

private:
    // F-component / (rho^rho_exp * (phi-phi_i)^ang_exp) where the component is
    // scale * q(cos phi, sin phi) * rho^rho_exp; near the root the circle
    // function is evaluated through its Taylor series at phi_i.
    double quotient(const HomoPoly& q, double scale, double phi, double rho, int ang_exp,
                    int rho_exp) const {
        (void)rho;  // the rho power cancels exactly; kept in the signature so
                    // callers can probe rho-independence of the numeric lift
        double delta = phi - phi_i_;
        double cval;
        if (std::abs(delta) < 1e-4) {
            auto c = detail::circle_taylor(q, phi_i_, ang_exp + 8);
            cval = 0.0;
            double dp = 1.0;
            for (int n = ang_exp; n < static_cast<int>(c.size()); ++n) {
                cval += c[n] * dp;
                dp *= delta;
            }
        } else {
            cval = q.is_zero() ? 0.0 : PolyEval(q)(std::cos(phi), std::sin(phi));
            for (int i = 0; i < ang_exp; ++i) cval /= delta;
        }
        (void)rho_exp;
        return scale * cval;
    }

    void check() const {
        // rho-independence of the numeric quotients (the formula-based path
        // cancels rho exactly; this probes the honest lift)
        PlaneField ham = hamiltonian(g_);
        HalfPlaneField F(ham);
        for (double dphi : {0.3, 0.7}) {
            double phi = phi_i_ + dphi;
            double q05 = numeric_gamma1(F, phi, 0.5), q15 = numeric_gamma1(F, phi, 1.5);
            if (std::abs(q05 - q15) > 1e-8 * (1 + std::abs(q05)))
                throw std::runtime_error("extract_gammas: rho-dependence detected in gamma_1");
            double r05 = numeric_gamma2(F, phi, 0.5), r15 = numeric_gamma2(F, phi, 1.5);
            if (std::abs(r05 - r15) > 1e-8 * (1 + std::abs(r05)))
                throw std::runtime_error("extract_gammas: rho-dependence detected in gamma_2");
        }
        if (std::abs(gamma1_at_root()) < 1e-12)
            throw std::runtime_error("extract_gammas: gamma_1 vanishes at the root");
        if (a_ >= 1 && std::abs(gamma2_at_root()) < 1e-12)
            throw std::runtime_error("extract_gammas: gamma_2 vanishes at the root");
    }

    double numeric_gamma1(const HalfPlaneField& F, double phi, double rho) const {
        double v = F({phi, rho}).x;
        return v / (std::pow(rho, p_ - 1) * std::pow(phi - phi_i_, a_));
    }
    double numeric_gamma2(const HalfPlaneField& F, double phi, double rho) const {
        double v = F({phi, rho}).y;
        return v / (std::pow(rho, p_) * std::pow(phi - phi_i_, std::max(a_ - 1, 0)));
    }

    HomoPoly g_, n_;
    double phi_i_;
    int a_;
    int p_;
};

inline GammaSamplers extract_gammas(const HomoPoly& g, double phi_i, int a) {
    if (g.is_zero() || g.degree() < 2)
        throw std::invalid_argument("extract_gammas: needs deg g >= 2");
    return GammaSamplers(g, phi_i, a);
}

/// f_k(alpha) = alpha o P_k: pull a planar function back to the half-plane;
/// 2 pi periodic in phi by construction.
inline SmoothFn pullback(int k, const SmoothFn& f) {
    if (f.vars() != VarPair::XY) throw std::invalid_argument("pullback: f must be over (x, y)");
    return SmoothFn(
        [k, f](double phi, double rho) {
            Vec2 z = p_map(k, {phi, rho});
            return f.eval(z.x, z.y);
        },
        VarPair::PhiRho);
}

/// Inverse correspondence: descend a Z-invariant half-plane function to the
/// plane. Periodicity in phi and constancy on the boundary are verified on
/// random samples at construction.
inline SmoothFn pushforward(int k, const SmoothFn& fh) {
    if (fh.vars() != VarPair::PhiRho)
        throw std::invalid_argument("pushforward: input must be over (phi, rho)");
    constexpr double two_pi = 2 * std::numbers::pi;
    std::mt19937 rng(20250607);
    std::uniform_real_distribution<double> uphi(0.0, two_pi), urho(0.0, 1.5);
    for (int i = 0; i < 64; ++i) {
        double phi = uphi(rng), rho = urho(rng);
        double a = fh.eval(phi, rho), b = fh.eval(phi + two_pi, rho);
        if (std::abs(a - b) > 1e-10 * (1 + std::abs(a)))
            throw std::invalid_argument("pushforward: input is not 2*pi-periodic in phi");
    }
    double boundary = fh.eval(0.0, 0.0);
    for (int i = 0; i < 16; ++i) {
        double phi = uphi(rng);
        if (std::abs(fh.eval(phi, 0.0) - boundary) > 1e-10 * (1 + std::abs(boundary)))
            throw std::invalid_argument("pushforward: input is not constant on the boundary");
    }
    return SmoothFn(
        [k, fh](double x, double y) {
            if (x == 0.0 && y == 0.0) return fh.eval(0.0, 0.0);
            HalfPlanePoint a = p_inverse(k, {x, y}, 0.0);
            return fh.eval(a.phi, a.rho);
        },
        VarPair::XY, boundary);
}

/// A map of the plane or of the half-plane, as a plain evaluator.
using PlanarMap = std::function<Vec2(Vec2)>;
using HalfPlaneMap = std::function<HalfPlanePoint(HalfPlanePoint)>;

/// Annulus on which lifted maps are checked and unwrapped.
struct AnnulusDomain {
    double rho_min = 0.1;
    double rho_max = 1.5;
};

/// Lift h through P_k per h o P_k = P_k o h_hat:
///   h_hat_2 = |h(P_k)|^(1/k),  h_hat_1 = continuously unwrapped angle of
/// h(P_k) along phi, seeded at (0, rho) by the representative nearest 0.
/// Boundary rule: h_hat(phi, 0) = (phi, 0). Z-equivariance (h_hat_1 shifts
/// by 2*pi, h_hat_2 is periodic) is verified on samples at construction.
class LiftedMap {
public:
    LiftedMap(int k, PlanarMap h, AnnulusDomain dom) : k_(k), h_(std::move(h)), dom_(dom) {
        constexpr double two_pi = 2 * std::numbers::pi;
        for (double rho : {dom_.rho_min, 0.5 * (dom_.rho_min + dom_.rho_max), dom_.rho_max}) {
            for (double phi : {0.3, 2.0, 4.9}) {
                HalfPlanePoint a = (*this)({phi, rho});
                HalfPlanePoint b = (*this)({phi + two_pi, rho});
                if (std::abs(b.phi - a.phi - two_pi) > 1e-9 || std::abs(b.rho - a.rho) > 1e-9)
                    throw std::runtime_error("lift_map: Z-equivariance residual beyond tolerance");
            }
        }
    }

    HalfPlanePoint operator()(HalfPlanePoint a) const {
        if (a.rho == 0.0) return {a.phi, 0.0};
        // seed the angle at (0, rho), then unwrap along phi toward a.phi;
        // each increment is kept below pi/2 by bisecting the step as needed
        Vec2 w0 = image({0.0, a.rho});
        double theta = std::atan2(w0.y, w0.x);  // representative nearest 0
        int steps = std::max(1, static_cast<int>(std::ceil(std::abs(a.phi) / (std::numbers::pi / 8))));
        Vec2 w = w0;
        for (int i = 1; i <= steps; ++i) {
            double phi_prev = a.phi * (i - 1) / steps;
            double phi_next = a.phi * i / steps;
            theta = unwrap_to(phi_prev, theta, phi_next, a.rho, 0, &w);
        }
        double r = norm(w);
        return {theta, std::pow(r, 1.0 / k_)};
    }

    int k() const { return k_; }

private:
    Vec2 image(HalfPlanePoint a) const {
        Vec2 z = p_map(k_, a);
        Vec2 w = h_(z);
        if (w.x == 0.0 && w.y == 0.0)
            throw std::runtime_error("lift_map: h hits the origin on the punctured domain");
        return w;
    }

    double unwrap_to(double phi_from, double theta_from, double phi_to, double rho, int depth,
                     Vec2* w_out) const {
        constexpr double two_pi = 2 * std::numbers::pi;
        Vec2 w = image({phi_to, rho});
        double raw = std::atan2(w.y, w.x);
        double delta = std::remainder(raw - theta_from, two_pi);
        if (std::abs(delta) > std::numbers::pi / 2) {
            if (depth > 24)
                throw std::runtime_error("lift_map: angle unwrapping lost continuity");
            double mid = 0.5 * (phi_from + phi_to);
            double tm = unwrap_to(phi_from, theta_from, mid, rho, depth + 1, nullptr);
            return unwrap_to(mid, tm, phi_to, rho, depth + 1, w_out);
        }
        if (w_out) *w_out = w;
        return theta_from + delta;
    }

    int k_;
    PlanarMap h_;
    AnnulusDomain dom_;
};

inline LiftedMap lift_map(int k, PlanarMap h, AnnulusDomain dom = {}) {
    return LiftedMap(k, std::move(h), dom);
}

/// Descend a Z-equivariant half-plane map to the plane:
/// h(z) = P_k(h_hat(P_k^{-1}(z))). Equivariance and hint-independence are
/// verified on samples at construction.
template <typename MapH>
PlanarMap descend_map(int k, MapH hh) {
    constexpr double two_pi = 2 * std::numbers::pi;
    for (double rho : {0.3, 0.8, 1.3}) {
        for (double phi : {0.4, 2.2, 5.1}) {
            HalfPlanePoint a = hh(HalfPlanePoint{phi, rho});
            HalfPlanePoint b = hh(HalfPlanePoint{phi + two_pi, rho});
            if (std::abs(b.phi - a.phi - two_pi) > 1e-10 * (1 + std::abs(a.phi)) ||
                std::abs(b.rho - a.rho) > 1e-10 * (1 + std::abs(a.rho)))
                throw std::invalid_argument("descend_map: input is not Z-equivariant");
        }
    }
    auto descended = [k, hh](Vec2 z) -> Vec2 {
        if (z.x == 0.0 && z.y == 0.0) return {0.0, 0.0};
        HalfPlanePoint a = p_inverse(k, z, 0.0);
        return p_map(k, hh(a));
    };
    // hint-independence: shifting the angle branch must not change the result
    for (double phi : {0.9, 3.7}) {
        Vec2 z = p_map(k, {phi, 1.0});
        HalfPlanePoint alt = p_inverse(k, z, phi + two_pi);
        Vec2 w1 = descended(z), w2 = p_map(k, hh(alt));
        if (dist(w1, w2) > 1e-10 * (1 + norm(w1)))
            throw std::invalid_argument("descend_map: result depends on the angle hint");
    }
    return descended;
}

}  // namespace planeflow

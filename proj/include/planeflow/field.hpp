#pragma once

#include <cmath>
#include <stdexcept>

#include "planeflow/poly.hpp"
#include "planeflow/smoothfn.hpp"
#include "planeflow/vec.hpp"

namespace planeflow {

/// The planar vector field G = eta * (-g_y, g_x). Immutable; evaluation is a
/// pure function, so instances can be shared freely across threads.
class PlaneField {
public:
    PlaneField(HomoPoly g, SmoothFn eta, double working_radius = 2.0)
        : g_(std::move(g)), eta_(std::move(eta)), radius_(working_radius) {
        if (g_.is_zero() || g_.degree() < 1)
            throw std::invalid_argument("PlaneField: g must be non-constant");
        gx_ = partial_x(g_);
        gy_ = partial_y(g_);
        ge_ = PolyEval(g_);
        gxe_ = PolyEval(gx_);
        gye_ = PolyEval(gy_);
    }

    Vec2 operator()(Vec2 z) const {
        double e = eta_.eval(z.x, z.y);
        return {-e * gye_(z.x, z.y), e * gxe_(z.x, z.y)};
    }

    double g_value(Vec2 z) const { return ge_(z.x, z.y); }

    const HomoPoly& g() const { return g_; }
    const HomoPoly& gx() const { return gx_; }
    const HomoPoly& gy() const { return gy_; }
    const SmoothFn& eta() const { return eta_; }
    bool eta_is_one() const { return eta_.is_const_one(); }
    int degree() const { return g_.degree(); }  // p + 1
    double working_radius() const { return radius_; }

private:
    HomoPoly g_, gx_, gy_;
    SmoothFn eta_;
    double radius_;
    PolyEval ge_, gxe_, gye_;
};

/// Hamiltonian field H = (-g_y, g_x) of g, i.e. eta == 1.
inline PlaneField hamiltonian(const HomoPoly& g, double working_radius = 2.0) {
    return PlaneField(g, SmoothFn::constant(1.0), working_radius);
}

/// Rescale a field by a multiplier eta that must be bounded away from zero on
/// the working disk; verified on a 64x64 sample grid rather than symbolically.
inline PlaneField with_multiplier(const PlaneField& field, const SmoothFn& eta,
                                  double domain_radius) {
    if (eta.vars() != VarPair::XY)
        throw std::invalid_argument("with_multiplier: eta must be a function of (x, y)");
    const int n = 64;  // 4096 samples
    int sign = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double x = -domain_radius + (2.0 * domain_radius * i) / (n - 1);
            double y = -domain_radius + (2.0 * domain_radius * j) / (n - 1);
            if (x * x + y * y > domain_radius * domain_radius) continue;
            double v = eta.eval(x, y);
            int s = (v > 0) - (v < 0);
            if (s == 0)
                throw std::invalid_argument("with_multiplier: eta vanishes on the sample grid");
            if (sign != 0 && s != sign)
                throw std::invalid_argument("with_multiplier: eta changes sign on the sample grid");
            sign = s;
        }
    }
    return PlaneField(field.g(), eta, domain_radius);
}

}  // namespace planeflow

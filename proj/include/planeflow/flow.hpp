#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "planeflow/field.hpp"
#include "planeflow/vec.hpp"

namespace planeflow {

struct flow_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FlowOptions {
    double tol = 1e-10;     // local error tolerance (absolute and relative)
    double t_max = 50.0;    // hard cap on |t|
    double h_underflow = 1e-14;
    double norm_max = 1e3;  // solutions of degree >= 3 fields can blow up in
                            // finite time; escape far outside the working disk
                            // is an error, not an endless chase
};

struct Trajectory {
    std::vector<double> t;
    std::vector<Vec2> z;
    double tol_used = 0.0;
};

namespace rk {

/// Dormand-Prince 5(4) coefficients.
struct DP45 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

/// One accepted step of the adaptive integrator, exposed so that callers can
/// scan the trajectory segment by segment (dense output is cubic Hermite).
struct Segment {
    double t0 = 0.0, t1 = 0.0;
    Vec2 z0, z1;
    Vec2 f0, f1;  // derivatives at the endpoints

    Vec2 interpolate(double t) const {
        double h = t1 - t0;
        if (h == 0.0) return z0;
        double s = (t - t0) / h;
        double s2 = s * s, s3 = s2 * s;
        double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
        double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        return h00 * z0 + (h10 * h) * f0 + h01 * z1 + (h11 * h) * f1;
    }
};

/// Adaptive stepper for dz/dt = dir * f(z). Steps always move forward in the
/// internal clock; `dir` = +-1 selects the time direction.
template <typename F>
class Stepper {
public:
    Stepper(F f, Vec2 z0, double dir, const FlowOptions& opt)
        : f_(std::move(f)), dir_(dir), opt_(opt), t_(0.0), z_(z0) {
        k1_ = eval(z_);
        double scale = norm(z_) + 1.0;
        double fn = norm(k1_);
        h_ = (fn > 1e-12) ? std::min(0.01 * scale / fn, 0.1) : 0.1;
    }

    double t() const { return t_; }
    Vec2 z() const { return z_; }
    Vec2 deriv() const { return k1_; }

    /// Advance by one accepted step (at most to t_limit) and describe it.
    Segment step(double t_limit) {
        if (t_ >= t_limit) throw std::logic_error("Stepper: already at limit");
        if (t_limit - t_ <= std::max(opt_.h_underflow, 1e-15 * (1 + t_limit))) {
            // remainder below resolvable scale: snap to the limit
            Segment seg{t_, t_limit, z_, z_, k1_, k1_};
            t_ = t_limit;
            return seg;
        }
        for (int attempts = 0; attempts < 200; ++attempts) {
            double h = std::min(h_, t_limit - t_);
            if (h < opt_.h_underflow)
                throw flow_error("flow: step size underflow (near-singular approach to the origin)");
            using P = DP45;
            Vec2 k1 = k1_;
            Vec2 k2 = eval(z_ + h * (P::a21 * k1));
            Vec2 k3 = eval(z_ + h * (P::a31 * k1 + P::a32 * k2));
            Vec2 k4 = eval(z_ + h * (P::a41 * k1 + P::a42 * k2 + P::a43 * k3));
            Vec2 k5 = eval(z_ + h * (P::a51 * k1 + P::a52 * k2 + P::a53 * k3 + P::a54 * k4));
            Vec2 k6 =
                eval(z_ + h * (P::a61 * k1 + P::a62 * k2 + P::a63 * k3 + P::a64 * k4 + P::a65 * k5));
            Vec2 z_new =
                z_ + h * (P::b1 * k1 + P::b3 * k3 + P::b4 * k4 + P::b5 * k5 + P::b6 * k6);
            Vec2 k7 = eval(z_new);
            Vec2 err = h * (P::e1 * k1 + P::e3 * k3 + P::e4 * k4 + P::e5 * k5 + P::e6 * k6 +
                            P::e7 * k7);
            double sx = opt_.tol + opt_.tol * std::max(std::abs(z_.x), std::abs(z_new.x));
            double sy = opt_.tol + opt_.tol * std::max(std::abs(z_.y), std::abs(z_new.y));
            double en = std::sqrt(0.5 * ((err.x / sx) * (err.x / sx) + (err.y / sy) * (err.y / sy)));
            if (en <= 1.0) {
                if (norm(z_new) > opt_.norm_max)
                    throw flow_error("flow: trajectory escaped the working domain");
                Segment seg{t_, t_ + h, z_, z_new, k1_, k7};
                t_ += h;
                z_ = z_new;
                k1_ = k7;  // FSAL
                double factor = (en > 1e-14) ? 0.9 * std::pow(en, -0.2) : 5.0;
                h_ = h * std::clamp(factor, 0.2, 5.0);
                return seg;
            }
            double shrink =
                std::isfinite(en) ? std::clamp(0.9 * std::pow(en, -0.2), 0.2, 0.9) : 0.2;
            h_ = h * shrink;
        }
        throw flow_error("flow: step size control failed to converge");
    }

private:
    Vec2 eval(Vec2 z) const { return dir_ * f_(z); }

    F f_;
    double dir_;
    FlowOptions opt_;
    double t_;
    Vec2 z_, k1_;
    double h_ = 0.1;
};

}  // namespace rk

/// Integrate dz/dt = f(z) from z over time t (signed) with the adaptive
/// embedded 4(5) pair. flow_generic(z, 0) == z exactly.
template <typename F>
Vec2 flow_generic(F&& f, Vec2 z, double t, const FlowOptions& opt = {}) {
    if (t == 0.0) return z;
    if (std::abs(t) > opt.t_max)
        throw flow_error("flow: |t| exceeds t_max guard");
    double dir = t > 0 ? 1.0 : -1.0;
    rk::Stepper<std::decay_t<F>> st(std::forward<F>(f), z, dir, opt);
    double target = std::abs(t);
    while (st.t() < target) st.step(target);
    return st.z();
}

inline Vec2 flow(const PlaneField& field, Vec2 z, double t, const FlowOptions& opt = {}) {
    return flow_generic([&field](Vec2 p) { return field(p); }, z, t, opt);
}

inline Vec2 flow(const PlaneField& field, Vec2 z, double t, double tol) {
    FlowOptions opt;
    opt.tol = tol;
    return flow(field, z, t, opt);
}

/// Sample the flow with n points evenly spaced over t_span, interpolating
/// inside accepted steps.
template <typename F>
Trajectory orbit_trace_generic(F&& f, Vec2 z, std::pair<double, double> t_span, int n,
                               const FlowOptions& opt = {}) {
    if (n < 1) throw std::invalid_argument("orbit_trace: n must be positive");
    Trajectory traj;
    traj.tol_used = opt.tol;
    double t0 = t_span.first, t1 = t_span.second;
    if (t0 != 0.0) {
        z = flow_generic(f, z, t0, opt);
    }
    if (t0 == t1 || n == 1) {
        traj.t.push_back(t0);
        traj.z.push_back(z);
        return traj;
    }
    if (std::abs(t1 - t0) > opt.t_max) throw flow_error("orbit_trace: span exceeds t_max");
    double dir = (t1 > t0) ? 1.0 : -1.0;
    rk::Stepper<std::decay_t<F>> st(f, z, dir, opt);
    double span = std::abs(t1 - t0);
    int emitted = 0;
    auto emit_time = [&](int i) { return (span * i) / (n - 1); };
    traj.t.push_back(t0);
    traj.z.push_back(z);
    ++emitted;
    while (emitted < n) {
        rk::Segment seg = st.step(span);
        while (emitted < n && emit_time(emitted) <= seg.t1 + 1e-15) {
            double tc = std::min(emit_time(emitted), seg.t1);
            traj.t.push_back(t0 + dir * tc);
            traj.z.push_back(seg.interpolate(tc));
            ++emitted;
        }
    }
    return traj;
}

inline Trajectory orbit_trace(const PlaneField& field, Vec2 z, std::pair<double, double> t_span,
                              int n, const FlowOptions& opt = {}) {
    return orbit_trace_generic([&field](Vec2 p) { return field(p); }, z, t_span, n, opt);
}

/// Max drift of g along the trajectory: conservation-law residual.
inline double conservation_residual(const PlaneField& field, const Trajectory& traj) {
    if (traj.z.empty()) throw std::invalid_argument("conservation_residual: empty trajectory");
    double g0 = field.g_value(traj.z.front());
    double worst = 0.0;
    for (const auto& p : traj.z) worst = std::max(worst, std::abs(field.g_value(p) - g0));
    return worst;
}

}  // namespace planeflow

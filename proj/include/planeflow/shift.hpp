#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "planeflow/field.hpp"
#include "planeflow/flow.hpp"
#include "planeflow/jets.hpp"
#include "planeflow/polar.hpp"
#include "planeflow/smoothfn.hpp"
#include "planeflow/star.hpp"

namespace planeflow {

struct level_mismatch_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct not_on_orbit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OrbitSegment {
    Vec2 source, target;
    double t_lo = 0.0, t_hi = 0.0;
    double tau = 0.0;
};

namespace detail_time {

/// March one time direction of dz/dt = dir*f(z) from `a`, streaming sampled
/// distances to `b` and refining every local minimum of the distance until one
/// dips below tol. Returns the internal (non-negative) time of the first
/// capture, which is the smallest in this direction.
template <typename F>
class DirectionalSearch {
public:
    DirectionalSearch(F f, Vec2 a, Vec2 b, double dir, double tol, const FlowOptions& opt)
        : f_(std::move(f)), b_(b), dir_(dir), tol_(tol), opt_(opt), stepper_(f_, a, dir, opt) {
        samples_.push_back({0.0, dist(a, b)});
    }

    double t_explored() const { return stepper_.t(); }
    bool exhausted() const { return exhausted_; }

    double capture_lo() const { return cap_lo_; }
    double capture_hi() const { return cap_hi_; }

    /// Advance one integrator step; returns the capture time if one occurred.
    std::optional<double> advance(double t_limit, double min_time = -1.0) {
        if (exhausted_) return std::nullopt;
        if (stepper_.t() >= t_limit) {
            exhausted_ = true;
            return std::nullopt;
        }
        rk::Segment seg;
        try {
            seg = stepper_.step(t_limit);
        } catch (const flow_error&) {
            exhausted_ = true;  // step underflow near the origin: direction dead-ends
            return std::nullopt;
        }
        segments_.push_back(seg);
        const int m = 8;
        for (int i = 1; i <= m; ++i) {
            double t = seg.t0 + (seg.t1 - seg.t0) * i / m;
            double d = dist(seg.interpolate(t), b_);
            samples_.push_back({t, d});
            size_t n = samples_.size();
            if (n == 2 && samples_[0].d <= samples_[1].d) {
                // boundary minimum at the stream start
                auto cap = refine(samples_[0].t, samples_[1].t, min_time);
                if (cap) return cap;
            }
            if (n >= 3) {
                const auto& s0 = samples_[n - 3];
                const auto& s1 = samples_[n - 2];
                const auto& s2 = samples_[n - 1];
                if (s1.d <= s0.d && s1.d <= s2.d) {
                    auto cap = refine(s0.t, s2.t, min_time);
                    if (cap) return cap;
                }
            }
        }
        if (samples_.size() > 4) samples_.erase(samples_.begin(), samples_.end() - 3);
        return std::nullopt;
    }

private:
    struct Sample {
        double t, d;
    };

    Vec2 state_at(double t) const {
        for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
            if (t >= it->t0 - 1e-15) {
                if (t <= it->t0) return it->z0;
                return flow_generic([this](Vec2 z) { return dir_ * f_(z); }, it->z0, t - it->t0,
                                    opt_);
            }
        }
        throw std::logic_error("flow_time: time before retained segments");
    }

    double q(double t) const {  // half the derivative of |z(t)-b|^2
        Vec2 z = state_at(t);
        return dot(z - b_, dir_ * f_(z));
    }

    std::optional<double> refine(double ta, double tb, double min_time) {
        double bracket_lo = ta, bracket_hi = tb;
        double qa = q(ta), qb = q(tb);
        double t_star;
        if (qa >= 0)
            t_star = ta;
        else if (qb <= 0)
            t_star = tb;
        else {
            // safeguarded secant on q
            for (int it = 0; it < 80 && tb - ta > 1e-14 * (1 + tb); ++it) {
                double tm = (std::abs(qb - qa) > 1e-300)
                                ? ta - qa * (tb - ta) / (qb - qa)
                                : 0.5 * (ta + tb);
                if (!(tm > ta && tm < tb)) tm = 0.5 * (ta + tb);
                double qm = q(tm);
                if (qm == 0.0) {
                    ta = tb = tm;
                    break;
                }
                (qm < 0 ? ta : tb) = tm;
                (qm < 0 ? qa : qb) = qm;
            }
            t_star = 0.5 * (ta + tb);
        }
        double d = dist(state_at(t_star), b_);
        if (d <= tol_ && t_star >= min_time) {
            cap_lo_ = bracket_lo;
            cap_hi_ = bracket_hi;
            return t_star;
        }
        return std::nullopt;
    }

    double cap_lo_ = 0.0, cap_hi_ = 0.0;
    F f_;
    Vec2 b_;
    double dir_, tol_;
    FlowOptions opt_;
    rk::Stepper<F> stepper_;
    std::deque<rk::Segment> segments_;
    std::vector<Sample> samples_;
    bool exhausted_ = false;
};

}  // namespace detail_time

/// Time of flight between two points of one orbit: marches the orbit in both
/// time directions with the adaptive integrator, brackets the nearest
/// approach, refines it, and returns the capture of smallest |tau|. Throws
/// not_on_orbit_error when no approach within tol occurs for |t| <= t_max.
template <typename F>
double flow_time_generic(F f, Vec2 a, Vec2 b, double tol, double t_max,
                         const FlowOptions& intg = {.tol = 1e-11},
                         OrbitSegment* segment = nullptr) {
    if (a == b) {
        if (segment) *segment = {a, b, 0.0, 0.0, 0.0};
        return 0.0;
    }
    detail_time::DirectionalSearch<F> fwd(f, a, b, +1.0, tol, intg);
    detail_time::DirectionalSearch<F> bwd(f, a, b, -1.0, tol, intg);
    std::optional<double> best;  // signed; the first capture per direction is
                                 // the smallest |tau| in that direction
    OrbitSegment seg{a, b, 0.0, 0.0, 0.0};
    bool fwd_done = false, bwd_done = false;
    while (!fwd_done || !bwd_done) {
        double limit = best ? std::min(t_max, std::abs(*best)) : t_max;
        if (!fwd_done && (fwd.exhausted() || fwd.t_explored() >= limit)) fwd_done = true;
        if (!bwd_done && (bwd.exhausted() || bwd.t_explored() >= limit)) bwd_done = true;
        if (fwd_done && bwd_done) break;
        bool use_fwd = !fwd_done && (bwd_done || fwd.t_explored() <= bwd.t_explored());
        if (use_fwd) {
            if (auto cap = fwd.advance(t_max)) {
                if (!best || *cap < std::abs(*best)) {
                    best = *cap;
                    seg.t_lo = fwd.capture_lo();
                    seg.t_hi = fwd.capture_hi();
                }
                fwd_done = true;
            }
        } else {
            if (auto cap = bwd.advance(t_max)) {
                if (!best || *cap < std::abs(*best)) {
                    best = -*cap;
                    seg.t_lo = -bwd.capture_hi();
                    seg.t_hi = -bwd.capture_lo();
                }
                bwd_done = true;
            }
        }
    }
    if (best) {
        if (segment) {
            seg.tau = *best;
            *segment = seg;
        }
        return *best;
    }
    throw not_on_orbit_error("flow_time: no approach within tolerance for |t| <= t_max");
}

inline void check_same_level(const PlaneField& field, Vec2 a, Vec2 b) {
    double ga = field.g_value(a), gb = field.g_value(b);
    if (std::abs(ga - gb) > 1e-9 * (1 + std::abs(ga)))
        throw level_mismatch_error("flow_time: g(a) and g(b) differ beyond the level tolerance");
}

inline double flow_time(const PlaneField& field, Vec2 a, Vec2 b, double tol = 1e-9,
                        double t_max = 50.0) {
    if ((a.x == 0 && a.y == 0) || (b.x == 0 && b.y == 0))
        throw std::invalid_argument("flow_time: endpoints must differ from the origin");
    check_same_level(field, a, b);
    return flow_time_generic([&field](Vec2 z) { return field(z); }, a, b, tol, t_max);
}

/// flow_time with the search evidence: the bracketing times around the
/// refined tau.
inline OrbitSegment flow_time_segment(const PlaneField& field, Vec2 a, Vec2 b, double tol = 1e-9,
                                      double t_max = 50.0) {
    if ((a.x == 0 && a.y == 0) || (b.x == 0 && b.y == 0))
        throw std::invalid_argument("flow_time: endpoints must differ from the origin");
    check_same_level(field, a, b);
    OrbitSegment seg;
    flow_time_generic([&field](Vec2 z) { return field(z); }, a, b, tol, t_max,
                      FlowOptions{.tol = 1e-11}, &seg);
    return seg;
}

/// Least positive return time to z, if the orbit through z closes within t_max.
inline std::optional<double> orbit_period(const PlaneField& field, Vec2 z, double tol = 1e-8,
                                          double t_max = 50.0) {
    FlowOptions intg{.tol = 1e-11};
    detail_time::DirectionalSearch fwd([&field](Vec2 p) { return field(p); }, z, z, +1.0, tol,
                                       intg);
    while (!fwd.exhausted() && fwd.t_explored() < t_max)
        if (auto cap = fwd.advance(t_max, /*min_time=*/1e-3)) return cap;
    return std::nullopt;
}

/// Closed-form flow time along an invariant ray {phi = phi_i, rho > 0} of the
/// lifted Hamiltonian field, where rho_dot = rho^p gamma_2(phi_i).
inline double separatrix_time(const HomoPoly& g, double phi_i, double rho_from, double rho_to) {
    if (rho_from <= 0 || rho_to <= 0)
        throw std::invalid_argument("separatrix_time: radii must be positive");
    int a = a_exponent(g, phi_i);
    if (a != 1)
        throw std::invalid_argument(
            "separatrix_time: the ray is an orbit only for angular roots of multiplicity 1");
    int p = g.degree() - 1;
    double g2 = extract_gammas(g, phi_i, a).gamma2_at_root();
    if (p == 1) return std::log(rho_to / rho_from) / g2;
    return (std::pow(rho_to, 1 - p) - std::pow(rho_from, 1 - p)) / ((1 - p) * g2);
}

/// Flow time along an orbit arc between angles phi and phi_target inside one
/// root-free sector, with rho varying along the orbit by the conservation law
/// g(P(phi, rho)) = const. Hamiltonian normalization (eta == 1).
inline double sector_time(const HomoPoly& g, HalfPlanePoint a, double phi_target,
                          double quad_tol = 1e-10) {
    if (g.is_zero() || g.degree() < 2) throw std::invalid_argument("sector_time: needs deg g >= 2");
    if (phi_target == a.phi) return 0.0;
    constexpr double pi = std::numbers::pi;
    int p = g.degree() - 1;
    PolyEval ge(g);
    auto C = [&](double th) { return ge(std::cos(th), std::sin(th)); };
    double c = std::pow(a.rho, p + 1) * C(a.phi);
    if (c == 0.0)
        throw std::invalid_argument("sector_time: the starting point lies on a zero level");

    double lo = std::min(a.phi, phi_target), hi = std::max(a.phi, phi_target);
    FactorDecomp dec = factor_decomposition(g, a.phi);
    for (const auto& r : dec.roots) {
        double k0 = std::ceil((lo - r.angle) / pi);
        for (double k = k0; r.angle + k * pi <= hi + 1e-12; ++k)
            if (r.angle + k * pi >= lo - 1e-12)
                throw std::invalid_argument("sector_time: an angular root is crossed by the arc");
    }

    auto integrand = [&](double th) {
        double Cth = C(th);
        double rho = std::pow(c / Cth, 1.0 / (p + 1));
        return 1.0 / ((p + 1) * std::pow(rho, p - 1) * Cth);
    };
    // adaptive Simpson
    std::function<double(double, double, double, double, double, double, int)> simp =
        [&](double x0, double x2, double f0, double f1, double f2, double eps, int depth) {
            double x1 = 0.5 * (x0 + x2);
            double h = x2 - x0;
            double fl = integrand(0.5 * (x0 + x1)), fr = integrand(0.5 * (x1 + x2));
            double whole = h / 6 * (f0 + 4 * f1 + f2);
            double left = h / 12 * (f0 + 4 * fl + f1), right = h / 12 * (f1 + 4 * fr + f2);
            if (depth <= 0) throw std::runtime_error("sector_time: quadrature failed to converge");
            if (std::abs(left + right - whole) <= 15 * eps)
                return left + right + (left + right - whole) / 15;
            return simp(x0, x1, f0, fl, f1, eps / 2, depth - 1) +
                   simp(x1, x2, f1, fr, f2, eps / 2, depth - 1);
        };
    double f0 = integrand(a.phi), f2 = integrand(phi_target);
    double f1 = integrand(0.5 * (a.phi + phi_target));
    return simp(a.phi, phi_target, f0, f1, f2, quad_tol, 48);
}

namespace gauss {

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline void legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
            }
            pp = n * (z * p0 - p1) / (z * z - 1);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1 - z * z) * pp * pp);
    }
}

}  // namespace gauss

/// Hadamard quotient g(x, y) = integral_0^1 f'(x + s y) ds, so that
/// f(x + y) = f(x) + y g(x, y); Gauss-Legendre quadrature of the exact
/// formal derivative.
inline double hadamard_quotient(const SmoothFn& f, double x, double y, int quad_n = 40) {
    if (!f.has_ast())
        throw std::invalid_argument("hadamard_quotient: needs a parsed expression");
    SmoothFn df = f.derivative(0);
    std::vector<double> nodes, weights;
    gauss::legendre(quad_n, nodes, weights);
    double acc = 0.0;
    for (int i = 0; i < quad_n; ++i) {
        double s = 0.5 * (nodes[i] + 1.0);  // map [-1,1] -> [0,1]
        acc += 0.5 * weights[i] * df.eval(x + s * y, 0.0);
    }
    return acc;
}

struct FlatDivision {
    SmoothFn quotient;
    JetReport input_report;
    JetReport quotient_report;
    bool verdict = false;  // input flat and the quotient flat again
};

/// Numeric witness of the Hadamard-lemma division: a function flat on the
/// boundary divides by rho^t with a flat quotient. The quotient evaluator is
/// returned regardless; the verdict records whether the input really was flat
/// and the quotient passes the same test.
inline FlatDivision flat_divide(const SmoothFn& fh, int t, std::vector<double> strips,
                                int max_order = 3) {
    if (fh.vars() != VarPair::PhiRho)
        throw std::invalid_argument("flat_divide: input must be over (phi, rho)");
    FlatDivision out;
    out.quotient = SmoothFn(
        [fh, t](double phi, double rho) {
            if (rho == 0.0) return 0.0;
            return fh.eval(phi, rho) / std::pow(rho, t);
        },
        VarPair::PhiRho, 0.0);
    auto feval = [&fh](double u, double v) { return fh.eval(u, v); };
    out.input_report = flatness_report_fn(feval, JetDomain::HalfPlane, max_order, strips);
    const SmoothFn& qref = out.quotient;
    auto qeval = [&qref](double u, double v) { return qref.eval(u, v); };
    out.quotient_report = flatness_report_fn(qeval, JetDomain::HalfPlane, max_order, strips);
    out.verdict = out.input_report.flat && out.quotient_report.flat;
    return out;
}

/// h(z) = G(z, alpha(z)): the smooth shift along orbits via alpha. Fixes the
/// origin and preserves every orbit by construction.
inline PlanarMap make_shift_map(const PlaneField& field, const SmoothFn& alpha,
                                const FlowOptions& opt = {}) {
    if (alpha.vars() != VarPair::XY)
        throw std::invalid_argument("make_shift_map: alpha must be over (x, y)");
    // the field is captured by value so the map can outlive its source
    return [field, alpha, opt](Vec2 z) { return flow(field, z, alpha.eval(z.x, z.y), opt); };
}

struct ShiftGridSpec {
    double inner = 0.3;
    double outer = 1.0;
    int rings = 5;
    int angles = 40;
};

inline std::vector<Vec2> annulus_grid(const ShiftGridSpec& spec) {
    if (!(spec.inner > 0) || !(spec.outer > spec.inner))
        throw std::invalid_argument("annulus_grid: need 0 < inner < outer");
    std::vector<Vec2> pts;
    constexpr double two_pi = 2 * std::numbers::pi;
    for (int i = 0; i < spec.rings; ++i) {
        double r = spec.rings == 1
                       ? spec.inner
                       : spec.inner + (spec.outer - spec.inner) * i / (spec.rings - 1);
        for (int j = 0; j < spec.angles; ++j) {
            double th = two_pi * j / spec.angles;
            pts.push_back({r * std::cos(th), r * std::sin(th)});
        }
    }
    return pts;
}

struct PointFailure {
    Vec2 point;
    std::string reason;
    // true when h(z) itself was undefined (its orbit left the working domain
    // before the shift time), as opposed to a failed time-of-flight search
    bool map_undefined = false;
};

/// Sampled shift function recovered from an orbit-preserving map, with
/// per-point residuals and an optional flatness report of the sample.
struct ShiftSample {
    std::vector<Vec2> points;
    std::vector<double> alpha;
    std::vector<double> residual;
    double max_residual = 0.0;
    std::vector<PointFailure> failures;
    std::optional<JetReport> flatness;
    int separatrix_checks = 0;          // points cross-checked against the ray closed form
    double separatrix_max_dev = 0.0;
    bool verified = false;  // failures empty and max residual within tolerance
};

struct RecoverOptions {
    double t_max = 50.0;
    bool with_flatness = false;
    int flatness_max_order = 3;
    std::vector<double> flatness_strips = {0.8, 0.6, 0.4, 0.3};
    double flatness_step_rel = 1e-2;  // alpha values carry integrator noise
};

/// Recover the shift function of h pointwise: alpha(z) = flow_time(z, h(z)).
/// Points where the search fails are reported, not fatal; on separatrix rays
/// (eta == 1) the closed form is evaluated as a cross-check.
inline ShiftSample recover_shift(const PlaneField& field, const PlanarMap& h,
                                 const std::vector<Vec2>& grid, double tol,
                                 const RecoverOptions& opt = {}) {
    ShiftSample out;
    std::vector<double> ray_angles;
    if (field.eta_is_one() && field.degree() >= 2) {
        FactorDecomp dec = factor_decomposition(field.g(), 0.0);
        for (const auto& r : dec.roots)
            if (r.multiplicity == 1) ray_angles.push_back(r.angle);
    }
    constexpr double pi = std::numbers::pi;
    for (Vec2 z : grid) {
        Vec2 hz;
        try {
            hz = h(z);
        } catch (const flow_error& e) {
            out.failures.push_back({z, e.what(), true});
            continue;
        } catch (const std::exception& e) {
            out.failures.push_back({z, e.what(), false});
            continue;
        }
        try {
            double tau = flow_time(field, z, hz, tol, opt.t_max);
            double res = dist(flow(field, z, tau, FlowOptions{.tol = 1e-11}), hz);
            out.points.push_back(z);
            out.alpha.push_back(tau);
            out.residual.push_back(res);
            out.max_residual = std::max(out.max_residual, res);
            for (double ra : ray_angles) {
                double ang = std::atan2(z.y, z.x);
                double d = std::remainder(ang - ra, pi);
                if (std::abs(d) < 1e-12 && norm(hz) > 0) {
                    // the two opposite rays of one zero line are distinct
                    // orbits; evaluate the closed form at the point's own ray
                    double ray_phi = ra + pi * std::round((ang - ra) / pi);
                    double sep = separatrix_time(field.g(), ray_phi, norm(z), norm(hz));
                    ++out.separatrix_checks;
                    out.separatrix_max_dev =
                        std::max(out.separatrix_max_dev, std::abs(sep - tau));
                }
            }
        } catch (const std::exception& e) {
            out.failures.push_back({z, e.what(), false});
        }
    }
    out.verified = out.failures.empty() && out.max_residual <= tol;
    if (opt.with_flatness) {
        auto alpha_fn = [&](double x, double y) {
            Vec2 z{x, y};
            return flow_time(field, z, h(z), tol, opt.t_max);
        };
        FlatnessOptions fo;
        fo.step_rel = opt.flatness_step_rel;
        out.flatness = flatness_report_fn(alpha_fn, JetDomain::Plane, opt.flatness_max_order,
                                          opt.flatness_strips, fo);
    }
    return out;
}

/// Shift value at a regular point via the flow-box contraction: project the
/// displacement on the flow direction and iterate.
inline double regular_point_shift(const PlaneField& field, const PlanarMap& h, Vec2 z) {
    Vec2 G = field(z);
    double speed2 = dot(G, G);
    if (speed2 == 0.0)
        throw std::invalid_argument("regular_point_shift: z is a singular point of the field");
    Vec2 hz = h(z);
    check_same_level(field, z, hz);
    double tau = dot(hz - z, G) / speed2;
    FlowOptions opt{.tol = 1e-12};
    for (int it = 0; it < 50; ++it) {
        Vec2 zt = flow(field, z, tau, opt);
        Vec2 Gt = field(zt);
        double corr = dot(hz - zt, Gt) / dot(Gt, Gt);
        tau += corr;
        if (std::abs(corr) <= 1e-14 * (1 + std::abs(tau))) break;
    }
    if (dist(flow(field, z, tau, opt), hz) > 1e-6 * (1 + norm(hz)))
        throw not_on_orbit_error("regular_point_shift: h(z) is not on the local orbit through z");
    return tau;
}

}  // namespace planeflow

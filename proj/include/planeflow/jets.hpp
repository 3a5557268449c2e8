#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace planeflow {

/// Scalar function of two variables for jet probing, with a tag saying which
/// geometry the second variable has (full plane in (x, y), or half-plane in
/// (phi, rho) with rho >= 0).
enum class JetDomain { Plane, HalfPlane };

/// Per-order suprema of finite-difference partials over a nested family of
/// strips rho <= rho_j, with a decay verdict per order. "rho" is |z| on the
/// plane and the second coordinate on the half-plane.
struct JetReport {
    std::vector<int> orders;
    std::vector<double> strips;               // descending rho levels
    std::vector<std::vector<double>> sups;    // [order][strip]
    std::vector<bool> order_verdicts;
    bool flat = false;
};

namespace fd {

/// Iterated central difference for the mixed partial d^(ax+ay) f / dx^ax dy^ay.
template <typename F>
double mixed_partial(const F& f, double x, double y, int ax, int ay, double h) {
    if (ax > 0)
        return (mixed_partial(f, x + h, y, ax - 1, ay, h) -
                mixed_partial(f, x - h, y, ax - 1, ay, h)) /
               (2 * h);
    if (ay > 0)
        return (mixed_partial(f, x, y + h, ax, ay - 1, h) -
                mixed_partial(f, x, y - h, ax, ay - 1, h)) /
               (2 * h);
    return f(x, y);
}

/// One level of Richardson extrapolation over the step halving.
template <typename F>
double partial_richardson(const F& f, double x, double y, int ax, int ay, double h) {
    if (ax + ay == 0) return f(x, y);
    double d1 = mixed_partial(f, x, y, ax, ay, h);
    double d2 = mixed_partial(f, x, y, ax, ay, h / 2);
    return (4.0 * d2 - d1) / 3.0;
}

}  // namespace fd

struct FlatnessOptions {
    double step_rel = 1e-3;     // finite-difference step relative to the strip level
    int angles = 16;            // sample angles per ring
    int radii_per_band = 6;     // sample radii per strip band
    double abs_floor = 1e-13;   // sups below this count as exactly flat
};

/// Probe flatness of f on {rho = 0}: for each order r <= max_order, the sup of
/// all order-r partials over each strip rho <= rho_j. A verdict per order:
/// the innermost strip's sup has decayed by at least 4x from the peak (or sits
/// below the absolute floor). The spacing of the given strip levels is too
/// coarse for a per-strip decay requirement even for exp(-1/rho^2), whose
/// low-order derivative suprema peak near rho ~ 0.4; peak-to-last decay is
/// what distinguishes flat from non-flat here.
template <typename F>
JetReport flatness_report_fn(const F& f, JetDomain dom, int max_order,
                             std::vector<double> strips, const FlatnessOptions& opt = {}) {
    if (strips.empty()) throw std::invalid_argument("flatness_report: no strips given");
    std::sort(strips.begin(), strips.end(), std::greater<double>());
    JetReport rep;
    rep.strips = strips;
    for (int r = 0; r <= max_order; ++r) rep.orders.push_back(r);
    rep.sups.assign(max_order + 1, std::vector<double>(strips.size(), 0.0));

    // band sups between consecutive levels (innermost band reaches down to a
    // floor where the stencil still fits), then prefix-max into strip sups
    std::vector<std::vector<double>> band(max_order + 1, std::vector<double>(strips.size(), 0.0));
    constexpr double two_pi = 2 * std::numbers::pi;
    for (size_t j = 0; j < strips.size(); ++j) {
        double hi = strips[j];
        double h = opt.step_rel * hi;
        double lo = (j + 1 < strips.size()) ? strips[j + 1] : std::max(hi / 8.0, 4 * h);
        for (int ir = 0; ir < opt.radii_per_band; ++ir) {
            double rho = lo + (hi - lo) * (ir + 1.0) / opt.radii_per_band;
            for (int ia = 0; ia < opt.angles; ++ia) {
                double ang = two_pi * ia / opt.angles;
                double u, v;
                if (dom == JetDomain::Plane) {
                    u = rho * std::cos(ang);
                    v = rho * std::sin(ang);
                } else {
                    u = ang;
                    v = rho;
                }
                for (int r = 0; r <= max_order; ++r) {
                    for (int ax = 0; ax <= r; ++ax) {
                        int ay = r - ax;
                        if (dom == JetDomain::HalfPlane && v - ay * h < 0.0)
                            continue;  // stencil would leave the half-plane
                        double d = fd::partial_richardson(f, u, v, ax, ay, h);
                        band[r][j] = std::max(band[r][j], std::abs(d));
                    }
                }
            }
        }
    }
    for (int r = 0; r <= max_order; ++r) {
        // nested strips: the sup over {rho <= strips[j]} is the suffix max of
        // the band sups
        double acc = 0.0;
        for (size_t j = strips.size(); j-- > 0;) {
            acc = std::max(acc, band[r][j]);
            rep.sups[r][j] = acc;
        }
        double peak = rep.sups[r].front();
        double last = rep.sups[r].back();
        rep.order_verdicts.push_back(last <= std::max(opt.abs_floor, peak / 4.0));
    }
    rep.flat = std::all_of(rep.order_verdicts.begin(), rep.order_verdicts.end(),
                           [](bool b) { return b; });
    return rep;
}

/// C^r norm: sum over all multi-indices |i| <= r of the sup of |D^i f| over
/// the rectangle K, approximated on a grid_n x grid_n grid (pulled inward so
/// the difference stencils stay inside K).
template <typename F>
double cr_norm_fn(const F& f, double x0, double x1, double y0, double y1, int r, int grid_n) {
    if (grid_n < 2) throw std::invalid_argument("cr_norm: grid_n must be at least 2");
    double hx = 1e-3 * (x1 - x0), hy = 1e-3 * (y1 - y0);
    double h = std::max(1e-12, std::min(hx, hy));
    double margin = r * h + h;
    double ax0 = x0 + margin, ax1 = x1 - margin;
    double ay0 = y0 + margin, ay1 = y1 - margin;
    double total = 0.0;
    for (int order = 0; order <= r; ++order) {
        for (int ax = 0; ax <= order; ++ax) {
            int ay = order - ax;
            double sup = 0.0;
            for (int i = 0; i < grid_n; ++i) {
                for (int j = 0; j < grid_n; ++j) {
                    double x = ax0 + (ax1 - ax0) * i / (grid_n - 1);
                    double y = ay0 + (ay1 - ay0) * j / (grid_n - 1);
                    double d = fd::partial_richardson(f, x, y, ax, ay, h);
                    sup = std::max(sup, std::abs(d));
                }
            }
            total += sup;
        }
    }
    return total;
}

/// Vector-valued variant: the norm sums over the components.
template <typename F>
double cr_norm_fn(const std::vector<F>& components, double x0, double x1, double y0, double y1,
                  int r, int grid_n) {
    double total = 0.0;
    for (const auto& f : components) total += cr_norm_fn(f, x0, x1, y0, y1, r, grid_n);
    return total;
}

}  // namespace planeflow

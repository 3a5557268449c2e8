#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "planeflow/poly.hpp"

namespace planeflow {

/// One isolated real root: an exact rational interval (lo, hi] containing it
/// (lo == hi marks an exact rational root), its multiplicity in the original
/// polynomial, and a refined double approximation.
struct IsolatedRoot {
    Rational lo, hi;
    int multiplicity = 1;
    double value = 0.0;
};

struct RootIsolation {
    std::vector<IsolatedRoot> roots;  // sorted ascending by value
};

namespace detail {

inline std::vector<UniPoly> sturm_chain(const UniPoly& f) {
    std::vector<UniPoly> chain;
    chain.push_back(f.primitive_part());
    UniPoly d = f.derivative();
    if (d.is_zero()) return chain;
    chain.push_back(d.primitive_part());
    for (;;) {
        const UniPoly& a = chain[chain.size() - 2];
        const UniPoly& b = chain[chain.size() - 1];
        UniPoly r = a.divmod(b).second;
        if (r.is_zero()) break;
        // negate, then shrink coefficients by the (positive) content
        std::vector<Rational> cs(r.coeffs());
        for (auto& c : cs) c = -c;
        chain.push_back(UniPoly(std::move(cs)).primitive_part());
        if (chain.back().is_constant()) break;
    }
    return chain;
}

inline int sign_variations(const std::vector<UniPoly>& chain, const Rational& x) {
    int var = 0, prev = 0;
    for (const auto& p : chain) {
        int s = sign_of(p.eval(x));
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++var;
        prev = s;
    }
    return var;
}

/// Cauchy bound: all real roots lie in (-M, M].
inline Rational cauchy_bound(const UniPoly& f) {
    Rational m(0);
    const Rational& lead = f.leading();
    for (size_t i = 0; i + 1 < f.coeffs().size(); ++i) {
        Rational a = abs(f.coeffs()[i] / lead);
        if (a > m) m = a;
    }
    return m + 1;
}

/// Isolating intervals (lo, hi] for the distinct real roots of a squarefree f.
inline std::vector<std::pair<Rational, Rational>> isolate_squarefree(const UniPoly& f) {
    std::vector<std::pair<Rational, Rational>> out;
    if (f.is_zero() || f.is_constant()) return out;
    auto chain = sturm_chain(f);
    Rational bound = cauchy_bound(f);
    struct Seg {
        Rational lo, hi;
        int vlo, vhi;
    };
    std::vector<Seg> stack;
    int vlo = sign_variations(chain, -bound), vhi = sign_variations(chain, bound);
    stack.push_back({-bound, bound, vlo, vhi});
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        int count = s.vlo - s.vhi;
        if (count <= 0) continue;
        if (count == 1) {
            out.emplace_back(s.lo, s.hi);
            continue;
        }
        // half-open (a, b] counting: a root exactly at mid lands in the left half
        Rational mid = (s.lo + s.hi) / 2;
        int vmid = sign_variations(chain, mid);
        stack.push_back({s.lo, mid, s.vlo, vmid});
        stack.push_back({mid, s.hi, vmid, s.vhi});
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

/// Shrink (lo, hi] by Sturm-guided bisection until its width is below w.
inline void tighten(const std::vector<UniPoly>& chain, const UniPoly& f, Rational& lo, Rational& hi,
                    const Rational& w) {
    while (hi - lo > w) {
        Rational mid = (lo + hi) / 2;
        if (f.eval(mid) == 0) {
            lo = hi = mid;
            return;
        }
        if (sign_variations(chain, lo) - sign_variations(chain, mid) == 1)
            hi = mid;
        else
            lo = mid;
    }
}

/// Newton polish in double precision against the squarefree factor, clamped
/// to the isolating interval.
inline double polish(const UniPoly& f, double lo, double hi) {
    UniPoly fp = f.derivative();
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 60; ++it) {
        double fx = f.eval(x);
        double dx = fp.eval(x);
        if (dx == 0.0) break;
        double step = fx / dx;
        double nx = x - step;
        if (!(nx >= lo && nx <= hi)) nx = 0.5 * (lo + hi);  // bisection fallback
        if (f.eval(lo) * f.eval(nx) < 0)
            hi = nx;
        else if (f.eval(nx) * f.eval(hi) < 0)
            lo = nx;
        if (std::abs(nx - x) <= 1e-16 * std::max(1.0, std::abs(nx))) return nx;
        x = nx;
    }
    return x;
}

}  // namespace detail

/// All real roots of u with exact multiplicities (via Yun squarefree
/// decomposition) and double approximations within tol.
inline RootIsolation real_roots(const UniPoly& u, double tol = 1e-12) {
    if (u.is_zero()) throw std::domain_error("real_roots: zero polynomial");
    RootIsolation iso;
    if (u.is_constant()) return iso;
    auto factors = squarefree_decomposition(u);
    // refine each factor's intervals; keep shrinking until all intervals
    // (across factors) are pairwise disjoint
    struct Tagged {
        UniPoly f;
        std::vector<UniPoly> chain;
        Rational lo, hi;
        int mult;
    };
    std::vector<Tagged> all;
    for (size_t i = 0; i < factors.size(); ++i) {
        const UniPoly& f = factors[i];
        if (f.is_constant()) continue;
        auto chain = detail::sturm_chain(f);
        for (auto& [lo, hi] : detail::isolate_squarefree(f))
            all.push_back({f, chain, lo, hi, static_cast<int>(i + 1)});
    }
    Rational w(1, 1024);
    for (auto& t : all) detail::tighten(t.chain, t.f, t.lo, t.hi, w);
    bool overlap = true;
    while (overlap) {
        overlap = false;
        for (size_t i = 0; i < all.size(); ++i)
            for (size_t j = i + 1; j < all.size(); ++j) {
                if (all[i].f == all[j].f) continue;  // same factor: already disjoint
                bool sep = all[i].hi <= all[j].lo || all[j].hi <= all[i].lo;
                if (!sep) {
                    w /= 16;
                    detail::tighten(all[i].chain, all[i].f, all[i].lo, all[i].hi, w);
                    detail::tighten(all[j].chain, all[j].f, all[j].lo, all[j].hi, w);
                    overlap = true;
                }
            }
    }
    for (auto& t : all) {
        // ensure the rational interval already meets tol before polishing
        Rational target(1, 1024);
        while (to_double(target) > tol) target /= 2;
        detail::tighten(t.chain, t.f, t.lo, t.hi, target);
        IsolatedRoot r;
        r.lo = t.lo;
        r.hi = t.hi;
        r.multiplicity = t.mult;
        r.value = (t.lo == t.hi) ? to_double(t.lo)
                                 : detail::polish(t.f, to_double(t.lo), to_double(t.hi));
        iso.roots.push_back(std::move(r));
    }
    std::sort(iso.roots.begin(), iso.roots.end(),
              [](const IsolatedRoot& a, const IsolatedRoot& b) { return a.value < b.value; });
    return iso;
}

}  // namespace planeflow

#pragma once

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "planeflow/rational.hpp"

namespace planeflow {

class UniPoly;

/// Homogeneous bivariate polynomial with exact rational coefficients,
/// stored densely as c_0..c_d with c_i the coefficient of x^i y^(d-i).
/// The zero polynomial is a distinct marker (empty coefficient vector,
/// degree undefined).
class HomoPoly {
public:
    HomoPoly() = default;  // zero polynomial

    HomoPoly(int degree, std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
        if (static_cast<int>(coeffs_.size()) != degree + 1)
            throw std::invalid_argument("HomoPoly: coefficient count must be degree+1");
        if (all_zero()) coeffs_.clear();
    }

    static HomoPoly zero() { return HomoPoly{}; }

    static HomoPoly constant(const Rational& c) {
        if (c == 0) return zero();
        return HomoPoly(0, {c});
    }

    /// Single monomial c * x^i * y^(d-i).
    static HomoPoly monomial(const Rational& c, int xexp, int yexp) {
        if (c == 0) return zero();
        std::vector<Rational> cs(xexp + yexp + 1, Rational(0));
        cs[xexp] = c;
        return HomoPoly(xexp + yexp, std::move(cs));
    }

    bool is_zero() const { return coeffs_.empty(); }

    int degree() const {
        if (is_zero()) throw std::domain_error("degree of zero polynomial is undefined");
        return static_cast<int>(coeffs_.size()) - 1;
    }

    const std::vector<Rational>& coeffs() const { return coeffs_; }

    const Rational& coeff(int xexp) const {
        static const Rational kZero(0);
        if (is_zero() || xexp < 0 || xexp >= static_cast<int>(coeffs_.size())) return kZero;
        return coeffs_[xexp];
    }

    bool operator==(const HomoPoly& o) const { return coeffs_ == o.coeffs_; }
    bool operator!=(const HomoPoly& o) const { return !(*this == o); }

    HomoPoly operator+(const HomoPoly& o) const {
        if (is_zero()) return o;
        if (o.is_zero()) return *this;
        if (degree() != o.degree())
            throw std::invalid_argument("sum of homogeneous polynomials of different degrees");
        std::vector<Rational> cs(coeffs_);
        for (size_t i = 0; i < cs.size(); ++i) cs[i] += o.coeffs_[i];
        return HomoPoly(degree(), std::move(cs));
    }

    HomoPoly operator-() const {
        std::vector<Rational> cs(coeffs_);
        for (auto& c : cs) c = -c;
        HomoPoly r;
        r.coeffs_ = std::move(cs);
        return r;
    }

    HomoPoly operator-(const HomoPoly& o) const { return *this + (-o); }

    HomoPoly operator*(const HomoPoly& o) const {
        if (is_zero() || o.is_zero()) return zero();
        int d = degree() + o.degree();
        std::vector<Rational> cs(d + 1, Rational(0));
        for (size_t i = 0; i < coeffs_.size(); ++i)
            for (size_t j = 0; j < o.coeffs_.size(); ++j) cs[i + j] += coeffs_[i] * o.coeffs_[j];
        return HomoPoly(d, std::move(cs));
    }

    HomoPoly operator*(const Rational& c) const {
        if (c == 0) return zero();
        std::vector<Rational> cs(coeffs_);
        for (auto& a : cs) a *= c;
        HomoPoly r;
        r.coeffs_ = std::move(cs);
        return r;
    }

    Rational eval(const Rational& x, const Rational& y) const {
        if (is_zero()) return Rational(0);
        Rational acc(0), xp(1);
        int d = degree();
        std::vector<Rational> yp(d + 1);
        yp[0] = 1;
        for (int i = 1; i <= d; ++i) yp[i] = yp[i - 1] * y;
        for (int i = 0; i <= d; ++i) {
            if (coeffs_[i] != 0) acc += coeffs_[i] * xp * yp[d - i];
            xp *= x;
        }
        return acc;
    }

    /// Canonical printing: x-major term order, integer/rational coefficients,
    /// parseable back by parse_poly.
    std::string to_string() const {
        if (is_zero()) return "0";
        std::string out;
        int d = degree();
        bool first = true;
        for (int i = d; i >= 0; --i) {
            const Rational& c = coeffs_[i];
            if (c == 0) continue;
            Rational a = c;
            if (first) {
                if (a < 0) {
                    out += "-";
                    a = -a;
                }
            } else {
                out += (a < 0) ? " - " : " + ";
                if (a < 0) a = -a;
            }
            first = false;
            int ye = d - i;
            std::string mono;
            if (i > 0) {
                mono += "x";
                if (i > 1) mono += "^" + std::to_string(i);
            }
            if (ye > 0) {
                if (!mono.empty()) mono += "*";
                mono += "y";
                if (ye > 1) mono += "^" + std::to_string(ye);
            }
            if (mono.empty()) {
                out += planeflow::to_string(a);
            } else if (a == 1) {
                out += mono;
            } else {
                out += planeflow::to_string(a) + "*" + mono;
            }
        }
        return out;
    }

private:
    bool all_zero() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& c) { return c == 0; });
    }

    std::vector<Rational> coeffs_;
};

/// Dense univariate polynomial over the rationals; zero polynomial is the
/// empty coefficient vector.
class UniPoly {
public:
    UniPoly() = default;

    explicit UniPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { normalize(); }

    static UniPoly constant(const Rational& c) { return UniPoly({c}); }

    bool is_zero() const { return coeffs_.empty(); }
    bool is_constant() const { return coeffs_.size() <= 1; }

    int degree() const {
        if (is_zero()) throw std::domain_error("degree of zero polynomial is undefined");
        return static_cast<int>(coeffs_.size()) - 1;
    }

    const std::vector<Rational>& coeffs() const { return coeffs_; }
    const Rational& leading() const { return coeffs_.back(); }

    bool operator==(const UniPoly& o) const { return coeffs_ == o.coeffs_; }

    Rational eval(const Rational& t) const {
        Rational acc(0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
        return acc;
    }

    double eval(double t) const {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
            acc = acc * t + to_double(*it);
        return acc;
    }

    UniPoly derivative() const {
        if (coeffs_.size() <= 1) return UniPoly{};
        std::vector<Rational> cs(coeffs_.size() - 1);
        for (size_t i = 1; i < coeffs_.size(); ++i) cs[i - 1] = coeffs_[i] * Rational(static_cast<int>(i));
        return UniPoly(std::move(cs));
    }

    UniPoly operator*(const UniPoly& o) const {
        if (is_zero() || o.is_zero()) return UniPoly{};
        std::vector<Rational> cs(coeffs_.size() + o.coeffs_.size() - 1, Rational(0));
        for (size_t i = 0; i < coeffs_.size(); ++i)
            for (size_t j = 0; j < o.coeffs_.size(); ++j) cs[i + j] += coeffs_[i] * o.coeffs_[j];
        return UniPoly(std::move(cs));
    }

    UniPoly operator-(const UniPoly& o) const {
        std::vector<Rational> cs(std::max(coeffs_.size(), o.coeffs_.size()), Rational(0));
        for (size_t i = 0; i < coeffs_.size(); ++i) cs[i] += coeffs_[i];
        for (size_t i = 0; i < o.coeffs_.size(); ++i) cs[i] -= o.coeffs_[i];
        return UniPoly(std::move(cs));
    }

    /// Exact division with remainder over Q[t].
    std::pair<UniPoly, UniPoly> divmod(const UniPoly& d) const {
        if (d.is_zero()) throw std::domain_error("polynomial division by zero");
        UniPoly rem = *this;
        if (rem.is_zero() || rem.coeffs_.size() < d.coeffs_.size())
            return {UniPoly{}, rem};
        std::vector<Rational> q(rem.coeffs_.size() - d.coeffs_.size() + 1, Rational(0));
        while (!rem.is_zero() && rem.coeffs_.size() >= d.coeffs_.size()) {
            size_t shift = rem.coeffs_.size() - d.coeffs_.size();
            Rational f = rem.leading() / d.leading();
            q[shift] = f;
            for (size_t i = 0; i < d.coeffs_.size(); ++i) rem.coeffs_[i + shift] -= f * d.coeffs_[i];
            rem.normalize();
        }
        return {UniPoly(std::move(q)), rem};
    }

    UniPoly divide_exact(const UniPoly& d) const {
        auto [q, r] = divmod(d);
        if (!r.is_zero()) throw std::domain_error("inexact polynomial division");
        return q;
    }

    /// Divide all coefficients so the polynomial becomes primitive with
    /// leading coefficient of unchanged sign; keeps Euclid/Sturm chains small.
    UniPoly primitive_part() const {
        if (is_zero()) return *this;
        BigInt num_gcd = 0, den_lcm = 1;
        for (const auto& c : coeffs_) {
            if (c == 0) continue;
            num_gcd = boost::multiprecision::gcd(num_gcd, boost::multiprecision::abs(numerator(c)));
            den_lcm = den_lcm / boost::multiprecision::gcd(den_lcm, denominator(c)) * denominator(c);
        }
        Rational scale(den_lcm, num_gcd);
        std::vector<Rational> cs(coeffs_);
        for (auto& c : cs) c *= scale;
        return UniPoly(std::move(cs));
    }

    UniPoly monic() const {
        if (is_zero()) return *this;
        std::vector<Rational> cs(coeffs_);
        Rational lead = cs.back();
        for (auto& c : cs) c /= lead;
        return UniPoly(std::move(cs));
    }

private:
    void normalize() {
        while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    }

    std::vector<Rational> coeffs_;
};

inline UniPoly gcd(UniPoly a, UniPoly b) {
    if (a.is_zero()) return b.is_zero() ? b : b.monic();
    if (b.is_zero()) return a.monic();
    a = a.primitive_part();
    b = b.primitive_part();
    while (!b.is_zero()) {
        UniPoly r = a.divmod(b).second;
        a = std::move(b);
        b = r.is_zero() ? r : r.primitive_part();
    }
    return a.monic();
}

/// Yun squarefree decomposition: u = lc * prod f_i^i with the f_i squarefree,
/// pairwise coprime and monic. Returned vector is 1-indexed by multiplicity
/// (entry i-1 holds f_i; trivial factors are the constant 1).
inline std::vector<UniPoly> squarefree_decomposition(const UniPoly& u) {
    if (u.is_zero()) throw std::domain_error("squarefree decomposition of zero polynomial");
    std::vector<UniPoly> out;
    if (u.is_constant()) return out;
    UniPoly up = u.derivative();
    UniPoly a = gcd(u, up);
    UniPoly b = u.divide_exact(a);
    UniPoly c = up.divide_exact(a);
    UniPoly d = c - b.derivative();
    while (!b.is_constant()) {
        UniPoly f = gcd(b, d);
        out.push_back(f.monic());
        b = b.divide_exact(f);
        c = d.divide_exact(f);
        d = c - b.derivative();
    }
    return out;
}

// ---- operations tying HomoPoly and UniPoly together ----

inline HomoPoly partial_x(const HomoPoly& g) {
    if (g.is_zero() || g.degree() == 0) return HomoPoly::zero();
    int d = g.degree();
    std::vector<Rational> cs(d, Rational(0));
    for (int i = 1; i <= d; ++i) cs[i - 1] = g.coeffs()[i] * Rational(i);
    return HomoPoly(d - 1, std::move(cs));
}

inline HomoPoly partial_y(const HomoPoly& g) {
    if (g.is_zero() || g.degree() == 0) return HomoPoly::zero();
    int d = g.degree();
    std::vector<Rational> cs(d, Rational(0));
    for (int i = 0; i < d; ++i) cs[i] = g.coeffs()[i] * Rational(d - i);
    return HomoPoly(d - 1, std::move(cs));
}

/// Rotational derivative x*g_y - y*g_x: the phi-derivative of
/// g(cos phi, sin phi) pulled back to a polynomial of the same degree.
inline HomoPoly rot_derivative(const HomoPoly& g) {
    HomoPoly gx = partial_x(g), gy = partial_y(g);
    HomoPoly xgy = gy.is_zero() ? HomoPoly::zero() : HomoPoly::monomial(1, 1, 0) * gy;
    HomoPoly ygx = gx.is_zero() ? HomoPoly::zero() : HomoPoly::monomial(1, 0, 1) * gx;
    if (xgy.is_zero()) return -ygx;
    if (ygx.is_zero()) return xgy;
    return xgy - ygx;
}

/// g = y^m * Homog(u): strips the full y-content and returns the x-profile
/// u(t) = sum_i c_i t^i of the residual factor.
inline std::pair<int, UniPoly> dehomogenize(const HomoPoly& g) {
    if (g.is_zero()) throw std::domain_error("dehomogenize: zero polynomial");
    int d = g.degree();
    int top = 0;
    for (int i = 0; i <= d; ++i)
        if (g.coeffs()[i] != 0) top = i;
    int m = d - top;  // min over nonzero terms of the y-exponent
    std::vector<Rational> cs(g.coeffs().begin(), g.coeffs().begin() + top + 1);
    return {m, UniPoly(std::move(cs))};
}

/// Homogenize u to degree deg(u) and multiply by y^m; inverse of dehomogenize.
inline HomoPoly homogenize(int y_mult, const UniPoly& u) {
    if (u.is_zero()) return HomoPoly::zero();
    int du = u.is_constant() ? 0 : u.degree();
    int d = du + y_mult;
    std::vector<Rational> cs(d + 1, Rational(0));
    for (int i = 0; i <= du; ++i) cs[i] = u.coeffs()[i];
    return HomoPoly(d, std::move(cs));
}

/// Monic-normalized gcd in R[x,y] via the y-content split and the Euclidean
/// algorithm on the x-profiles.
inline HomoPoly gcd_homo(const HomoPoly& g, const HomoPoly& h) {
    if (g.is_zero() || h.is_zero()) throw std::domain_error("gcd_homo: zero input");
    auto [mg, ug] = dehomogenize(g);
    auto [mh, uh] = dehomogenize(h);
    return homogenize(std::min(mg, mh), gcd(ug, uh));
}

/// Does d divide g exactly in Q[x,y]?
inline bool divides_homo(const HomoPoly& d, const HomoPoly& g) {
    if (d.is_zero()) return g.is_zero();
    if (g.is_zero()) return true;
    auto [md, ud] = dehomogenize(d);
    auto [mg, ug] = dehomogenize(g);
    if (md > mg) return false;
    return ug.divmod(ud).second.is_zero();
}

/// x*g_x + y*g_y - (p+1)*g at a rational point; identically zero for
/// homogeneous g of degree p+1 (Euler's identity).
inline Rational euler_residual(const HomoPoly& g, const Rational& x, const Rational& y) {
    if (g.is_zero()) return Rational(0);
    int d = g.degree();
    return x * partial_x(g).eval(x, y) + y * partial_y(g).eval(x, y) - Rational(d) * g.eval(x, y);
}

/// Cached double-precision view of a HomoPoly for hot evaluation paths.
class PolyEval {
public:
    PolyEval() = default;
    explicit PolyEval(const HomoPoly& g) {
        if (!g.is_zero())
            for (const auto& c : g.coeffs()) coeffs_.push_back(to_double(c));
    }

    double operator()(double x, double y) const {
        if (coeffs_.empty()) return 0.0;
        size_t d = coeffs_.size() - 1;
        // Horner in x, with y-powers folded in: sum_i c_i x^i y^(d-i).
        double acc = coeffs_[d];
        for (size_t i = d; i-- > 0;) acc = acc * x + coeffs_[i] * intpow(y, d - i);
        return acc;
    }

    static double intpow(double b, size_t e) {
        double r = 1.0;
        while (e) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

    bool empty() const { return coeffs_.empty(); }

private:
    std::vector<double> coeffs_;
};

}  // namespace planeflow

#pragma once

#include <cmath>
#include <cstdio>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "cjlab/errors.hpp"
#include "cjlab/padic.hpp"

namespace cjlab {

/// Point of R^d with the Euclidean norm.
class RealVec {
public:
    RealVec() : c_(1, 0.0) {}
    explicit RealVec(std::size_t dim) : c_(dim, 0.0) {}
    RealVec(std::initializer_list<double> xs) : c_(xs) {}
    explicit RealVec(std::vector<double> xs) : c_(std::move(xs)) {}
    static RealVec scalar(double x) { return RealVec{x}; }

    std::size_t dim() const { return c_.size(); }
    double operator[](std::size_t i) const { return c_[i]; }
    double& operator[](std::size_t i) { return c_[i]; }
    const std::vector<double>& coords() const { return c_; }

    double norm() const {
        if (c_.size() == 1) return std::fabs(c_[0]);
        double s = 0.0;
        for (double x : c_) s += x * x;
        return std::sqrt(s);
    }

    friend RealVec operator+(const RealVec& a, const RealVec& b) {
        check(a, b);
        RealVec r(a.dim());
        for (std::size_t i = 0; i < a.dim(); ++i) r.c_[i] = a.c_[i] + b.c_[i];
        return r;
    }
    friend RealVec operator-(const RealVec& a, const RealVec& b) {
        check(a, b);
        RealVec r(a.dim());
        for (std::size_t i = 0; i < a.dim(); ++i) r.c_[i] = a.c_[i] - b.c_[i];
        return r;
    }
    friend RealVec operator-(const RealVec& a) {
        RealVec r(a.dim());
        for (std::size_t i = 0; i < a.dim(); ++i) r.c_[i] = -a.c_[i];
        return r;
    }
    friend RealVec operator*(double s, const RealVec& a) {
        RealVec r(a.dim());
        for (std::size_t i = 0; i < a.dim(); ++i) r.c_[i] = s * a.c_[i];
        return r;
    }
    friend bool operator==(const RealVec&, const RealVec&) = default;

private:
    static void check(const RealVec& a, const RealVec& b) {
        if (a.dim() != b.dim()) throw DomainError("dimension mismatch");
    }
    std::vector<double> c_;
};

/// R^d as the carrier of the classical, random and fuzzy settings.
struct RealCarrier {
    using Point = RealVec;
    using Scalar = double;
    static constexpr bool exact = false;

    std::size_t dimension = 1;

    Point zero() const { return Point(dimension); }
    Point add(const Point& a, const Point& b) const { return a + b; }
    Point sub(const Point& a, const Point& b) const { return a - b; }
    Point neg(const Point& a) const { return -a; }
    Point twice(const Point& a) const { return 2.0 * a; }
    Point half(const Point& a) const { return 0.5 * a; }
    Point scale(Scalar s, const Point& a) const { return s * a; }
    long double norm(const Point& a) const { return a.norm(); }
    bool is_zero(const Point& a) const { return a.norm() == 0.0; }
    bool same(const Point& a, const Point& b) const { return a == b; }
    /// |2|
    long double two() const { return 2.0L; }
    /// First basis vector; the direction classical perturbations push along.
    Point unit() const {
        Point u(dimension);
        u[0] = 1.0;
        return u;
    }
    std::string describe(const Point& a) const {
        std::string out;
        for (std::size_t i = 0; i < a.dim(); ++i) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", a[i]);
            if (i) out += ',';
            out += buf;
        }
        return a.dim() == 1 ? out : "(" + out + ")";
    }
};

/// Q_p at a fixed working precision.
struct PadicCarrier {
    using Point = PAdicNumber;
    using Scalar = PAdicNumber;
    static constexpr bool exact = true;

    int prime = 2;
    int precision = kDefaultPrecision;

    Point zero() const { return PAdicNumber::zero(prime); }
    Point add(const Point& a, const Point& b) const { return a + b; }
    Point sub(const Point& a, const Point& b) const { return a - b; }
    Point neg(const Point& a) const { return -a; }
    Point twice(const Point& a) const { return cjlab::twice(a); }
    Point half(const Point& a) const { return halve(a); }
    Point scale(const Scalar& s, const Point& a) const { return s * a; }
    long double norm(const Point& a) const { return a.norm().to_long_double(); }
    PNorm exact_norm(const Point& a) const { return a.norm(); }
    bool is_zero(const Point& a) const { return a.is_zero(); }
    bool same(const Point& a, const Point& b) const { return a == b; }
    long double two() const { return two_norm(prime); }
    Point unit() const { return PAdicNumber::from_integer(1, prime, precision); }
    Point rational(std::int64_t a, std::int64_t b = 1) const {
        return PAdicNumber::from_rational(a, b, prime, precision);
    }
    std::string describe(const Point& a) const { return a.to_literal(); }
};

}  // namespace cjlab

#include "plugflow/wilson.hpp"

#include <cmath>
#include <limits>

namespace plugflow {

namespace {

constexpr double kCoordSlack = 1e-9;

double integrand(double t) {
    double t3 = t * t * t;
    return 1.0 / (1.0 + t3 * t3);
}

// Integrand after the substitution t -> 1/t on the tail:
// int_x^inf dt/(1+t^6) = int_0^{1/x} u^4/(1+u^6) du.
double tail_integrand(double u) {
    double u2 = u * u;
    double u4 = u2 * u2;
    return u4 / (1.0 + u4 * u2);
}

template <typename F>
double simpson(F f, double a, double b) {
    double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

template <typename F>
double adaptive_simpson(F f, double a, double m, double b, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double left = (m - a) / 6.0 * (f(a) + 4.0 * f(lm) + f(m));
    double right = (b - m) / 6.0 * (f(m) + 4.0 * f(rm) + f(b));
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, lm, m, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, rm, b, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(F f, double a, double b, double tol) {
    if (a == b) return 0.0;
    double m = 0.5 * (a + b);
    return adaptive_simpson(f, a, m, b, simpson(f, a, b), tol, 48);
}

constexpr double kTailSplit = 8.0;
constexpr double kQuadTol = 1e-12;

}  // namespace

Velocity eval_wilson_field(const CylPoint& p) {
    if (std::abs(p.r) > 1.0 + kCoordSlack || std::abs(p.z) > 1.0 + kCoordSlack ||
        !std::isfinite(p.theta))
        throw std::domain_error("eval_wilson_field: point outside support");
    Velocity v;
    double z3 = p.z * p.z * p.z;
    v.d_z = p.r * p.r + z3 * z3;
    v.d_theta = p.half == Half::lower ? 1.0 : -1.0;
    v.d_r = 0.0;
    return v;
}

double antiderivative_A(double x) {
    if (std::isnan(x)) throw std::domain_error("antiderivative_A: nan");
    if (x < 0) return -antiderivative_A(-x);
    if (x <= kTailSplit) return integrate(integrand, 0.0, x, kQuadTol);
    double head = integrate(integrand, 0.0, kTailSplit, kQuadTol);
    double hi = 1.0 / kTailSplit;
    double lo = std::isinf(x) ? 0.0 : 1.0 / x;
    return head + integrate(tail_integrand, lo, hi, kQuadTol);
}

double leaf_theta_closed_form(double r, double z, double C) {
    if (r == 0.0) {
        if (z == 0.0)
            throw std::domain_error("leaf_theta_closed_form: r = 0, z = 0 lies on the circle T");
        double z5 = z * z * z * z * z;
        return -1.0 / (5.0 * z5) + C;
    }
    double s = std::abs(r);
    double scale = std::pow(s, -5.0 / 3.0);
    return scale * antiderivative_A(std::pow(s, -1.0 / 3.0) * z) + C;
}

AsymptoticRecord asymptotic_record(int n) {
    if (n < 0) throw std::domain_error("asymptotic_record: n must be nonnegative");
    AsymptoticRecord rec;
    rec.n = n;
    rec.z_n = -std::pow(21.0 + 50.0 * n, -0.2);
    rec.theta_n = 2.0 - rec.z_n;
    double target = 2.0 * rec.z_n * rec.z_n;
    double r = target;  // r ~ 2 z_n^2 lands in the Newton basin of the smaller root
    for (int it = 0; it < 50; ++it) {
        double f = r - 0.25 * r * r - target;
        double df = 1.0 - 0.5 * r;
        double step = f / df;
        r -= step;
        if (std::abs(step) < 1e-12) break;
    }
    rec.r_n = r;
    rec.theta_prime_n =
        rec.theta_n + 2.0 * std::pow(r, -5.0 / 3.0) * antiderivative_A(std::pow(r, -1.0 / 3.0));
    return rec;
}

std::pair<std::complex<double>, std::complex<double>> eval_irrational_s3_field(
    std::complex<double> x, std::complex<double> y, double slope) {
    double norm = std::norm(x) + std::norm(y);
    if (std::abs(norm - 1.0) > 1e-12)
        throw std::domain_error("eval_irrational_s3_field: point not on the unit sphere");
    std::complex<double> i(0.0, 1.0);
    return {i * x, i * slope * y};
}

}  // namespace plugflow

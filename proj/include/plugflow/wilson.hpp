#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>

namespace plugflow {

/// Which mirror half of a concatenated plug a point lives in.
/// Both halves use local fiber coordinates z in [-1,1] (analytic plug);
/// the flow climbs z in both, with the theta orientation reversed above.
enum class Half : std::uint8_t { lower, upper };

/// Point of the Wilson plug support in cylindrical coordinates.
/// theta is stored as an unwound lift; the geometric angle is theta mod 10.
struct CylPoint {
    double r = 0;
    double theta = 0;
    double z = 0;
    Half half = Half::lower;
};

/// Velocity of the Wilson field at a point. d_r is identically zero.
struct Velocity {
    double d_theta = 0;
    double d_z = 0;
    double d_r = 0;
};

inline constexpr double kThetaPeriod = 10.0;

/// Field of the Wilson semi-plug and its mirror image:
///   lower half:  dtheta/dt = +1,  dz/dt = r^2 + z^6
///   upper half:  dtheta/dt = -1,  dz/dt = r^2 + z^6
/// Throws std::domain_error outside |r| <= 1, |z| <= 1.
Velocity eval_wilson_field(const CylPoint& p);

/// Antiderivative A(x) of 1/(1+x^6) with A(0) = 0, odd, monotone.
/// Accepts +/-infinity. Adaptive Simpson quadrature, abs tolerance 1e-12;
/// the tail beyond x = 8 is integrated after the substitution x -> 1/x.
double antiderivative_A(double x);

/// Theta-lift of the lower-half leaf through constant radius r with
/// integration constant C:
///   theta = r^(-5/3) A(r^(-1/3) z) + C      (r != 0)
///   theta = -1/(5 z^5) + C                  (r == 0, z != 0)
/// Throws std::domain_error at the singular point r = 0, z = 0 (circle T).
double leaf_theta_closed_form(double r, double z, double C);

/// Quantities attached to the n-th crossing of the distinguished
/// minimal-set leaf with the insertion section:
///   z_n      = -(21+50n)^(-1/5)
///   theta_n  = 2 - z_n
///   r_n      = smaller positive root of r - r^2/4 - 2 z_n^2 = 0
///   theta'_n = theta_n + 2 r_n^(-5/3) A(r_n^(-1/3))
struct AsymptoticRecord {
    int n = 0;
    double z_n = 0;
    double theta_n = 0;
    double r_n = 0;
    double theta_prime_n = 0;
};

/// Newton from the initial guess 2 z_n^2, tolerance 1e-12, 50-iteration cap.
AsymptoticRecord asymptotic_record(int n);

/// Irrational-slope field on the unit 3-sphere in C^2: V(x,y) = (ix, i*slope*y).
/// Requires |x|^2 + |y|^2 = 1 within 1e-12.
std::pair<std::complex<double>, std::complex<double>> eval_irrational_s3_field(
    std::complex<double> x, std::complex<double> y, double slope);

}  // namespace plugflow

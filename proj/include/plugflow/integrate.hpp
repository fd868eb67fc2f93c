#pragma once

#include "plugflow/wilson.hpp"

#include <string>
#include <utility>
#include <vector>

namespace plugflow {

enum class Termination : std::uint8_t { exited_boundary, budget_exhausted, closed_up, hit_event };

const char* termination_name(Termination t);

struct TraceEvent {
    double t = 0;
    std::string tag;
    CylPoint where;
};

struct LeafTrace {
    std::vector<std::pair<double, CylPoint>> samples;
    std::vector<TraceEvent> events;
    Termination termination = Termination::budget_exhausted;
    CylPoint final_point;
    double final_time = 0;
};

/// Level surface monitored during integration.
///   theta_mod: crossings of theta = value (mod period), localized exactly
///              since theta is linear in time.
///   z_level:   crossings of z = value in the local half coordinate,
///              localized by bisection to |z - value| < 1e-10.
struct EventSurface {
    enum class Kind : std::uint8_t { theta_mod, z_level } kind = Kind::theta_mod;
    double value = 0;
    double period = kThetaPeriod;
    bool terminal = false;
    std::string name;
};

struct IntegrateOptions {
    double step = 1e-3;       // fixed RK4 step
    double budget = 1e4;      // total integration time
    double sample_dt = 0.1;   // spacing of recorded samples
    bool concatenated = true; // continue from the lower half into the mirror half
    bool backward = false;    // trace against the flow orientation
};

/// Fixed-step classical 4th-order integration of the Wilson flow from `start`,
/// recording samples and surface crossings. Deterministic for fixed inputs.
/// Throws std::domain_error if `start` is outside the support.
LeafTrace integrate_leaf(const CylPoint& start, const IntegrateOptions& opt,
                         const std::vector<EventSurface>& surfaces);

/// One classical RK4 step of dz/dt = r^2 + z^6 (sign < 0 integrates backward).
inline double wilson_z_step(double r2, double z, double dt) {
    auto f = [r2](double zz) {
        double z2 = zz * zz;
        return r2 + z2 * z2 * z2;
    };
    double k1 = f(z);
    double k2 = f(z + 0.5 * dt * k1);
    double k3 = f(z + 0.5 * dt * k2);
    double k4 = f(z + dt * k3);
    return z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Advances z until either `duration` elapses or z crosses `z_stop` (from
/// below when rising). Returns {elapsed, z, hit_stop}. The stop time is
/// localized by bisection to |z - z_stop| < 1e-10.
struct ZAdvanceResult {
    double elapsed = 0;
    double z = 0;
    bool hit_stop = false;
};
ZAdvanceResult advance_z(double r, double z0, double duration, double z_stop, double step,
                         bool backward = false);

}  // namespace plugflow

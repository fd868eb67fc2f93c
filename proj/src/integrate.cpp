#include "plugflow/integrate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace plugflow {

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::exited_boundary: return "exited_boundary";
        case Termination::budget_exhausted: return "budget_exhausted";
        case Termination::closed_up: return "closed_up";
        case Termination::hit_event: return "hit_event";
    }
    return "unknown";
}

ZAdvanceResult advance_z(double r, double z0, double duration, double z_stop, double step,
                         bool backward) {
    const double r2 = r * r;
    const double dir = backward ? -1.0 : 1.0;
    auto crossed = [&](double z) { return backward ? z <= z_stop : z >= z_stop; };

    if (crossed(z0)) return {0.0, z0, true};

    auto bisect = [&](double t, double z, double dt) {
        double lo = 0.0, hi = dt, zm;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            zm = wilson_z_step(r2, z, dir * mid);
            if (crossed(zm))
                hi = mid;
            else
                lo = mid;
            if (std::abs(zm - z_stop) < 1e-10 && crossed(zm)) break;
        }
        return ZAdvanceResult{t + hi, wilson_z_step(r2, z, dir * hi), true};
    };

    // full fixed-size steps in a tight loop with hoisted constants,
    // then one partial step; bitwise identical to stepping one at a time
    const double sdt = dir * step;
    const double half = 0.5 * sdt;
    const double sixth = sdt / 6.0;
    auto f = [r2](double zz) {
        double z2 = zz * zz;
        return r2 + z2 * z2 * z2;
    };
    double t = 0.0, z = z0;
    long full = static_cast<long>(duration / step);
    for (long i = 0; i < full; ++i) {
        double k1 = f(z);
        double k2 = f(z + half * k1);
        double k3 = f(z + half * k2);
        double k4 = f(z + sdt * k3);
        double zn = z + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (backward ? zn <= z_stop : zn >= z_stop) return bisect(t, z, step);
        z = zn;
        t += step;
    }
    while (t < duration) {
        double dt = duration - t;
        if (dt > step) dt = step;
        double zn = wilson_z_step(r2, z, dir * dt);
        if (crossed(zn)) return bisect(t, z, dt);
        t += dt;
        z = zn;
    }
    return {duration, z, false};
}

namespace {

double next_theta_target(double theta, double value, double period, bool increasing) {
    double k = std::floor((theta - value) / period);
    double cand = value + k * period;
    if (increasing) {
        while (cand <= theta) cand += period;
    } else {
        cand = value + (k + 1) * period;
        while (cand >= theta) cand -= period;
    }
    return cand;
}

}  // namespace

LeafTrace integrate_leaf(const CylPoint& start, const IntegrateOptions& opt,
                         const std::vector<EventSurface>& surfaces) {
    if (opt.step <= 0 || opt.budget <= 0)
        throw std::domain_error("integrate_leaf: step and budget must be positive");
    if (std::abs(start.r) > 1 + 1e-9 || std::abs(start.z) > 1 + 1e-9)
        throw std::domain_error("integrate_leaf: start outside support");

    LeafTrace trace;
    CylPoint p = start;
    double t = 0.0;
    double next_sample = 0.0;
    trace.termination = Termination::budget_exhausted;

    auto theta_increasing = [&]() {
        bool inc = p.half == Half::lower;
        return opt.backward ? !inc : inc;
    };
    auto z_rising = [&]() { return !opt.backward; };

    auto sample = [&]() { trace.samples.emplace_back(t, p); };
    sample();
    next_sample = opt.sample_dt;

    bool done = false;
    while (!done) {
        if (t >= opt.budget) break;

        // nearest theta-surface crossing (theta is linear in t)
        double dt_theta = std::numeric_limits<double>::infinity();
        const EventSurface* theta_surface = nullptr;
        double theta_target = 0;
        for (const auto& s : surfaces) {
            if (s.kind != EventSurface::Kind::theta_mod) continue;
            double tgt = next_theta_target(p.theta, s.value, s.period, theta_increasing());
            double d = std::abs(tgt - p.theta);
            if (d < dt_theta) {
                dt_theta = d;
                theta_surface = &s;
                theta_target = tgt;
            }
        }

        // nearest watched z level in the direction of motion (z is monotone)
        double z_watch = z_rising() ? 1.0 : -1.0;
        const EventSurface* z_surface = nullptr;
        for (const auto& s : surfaces) {
            if (s.kind != EventSurface::Kind::z_level) continue;
            if (z_rising() ? (s.value > p.z && s.value < z_watch)
                           : (s.value < p.z && s.value > z_watch)) {
                z_watch = s.value;
                z_surface = &s;
            }
        }

        double leg = std::min({dt_theta, next_sample - t, opt.budget - t});
        if (leg < 0) leg = 0;
        ZAdvanceResult adv = advance_z(p.r, p.z, leg, z_watch, opt.step, opt.backward);
        t += adv.elapsed;
        p.theta += (theta_increasing() ? 1.0 : -1.0) * adv.elapsed;
        p.z = adv.z;

        if (adv.hit_stop) {
            if (z_surface != nullptr) {
                trace.events.push_back({t, z_surface->name.empty() ? "z_level" : z_surface->name, p});
                if (z_surface->terminal) {
                    trace.termination = Termination::hit_event;
                    done = true;
                }
                // step marginally past the level so it is not re-detected
                p.z = std::nextafter(p.z, z_rising() ? 2.0 : -2.0);
            } else if (z_rising()) {
                if (p.half == Half::lower && opt.concatenated) {
                    trace.events.push_back({t, "half_crossing", p});
                    p.half = Half::upper;
                    p.z = -1.0;
                } else {
                    trace.events.push_back({t, "boundary_exit", p});
                    trace.termination = Termination::exited_boundary;
                    done = true;
                }
            } else {
                if (p.half == Half::upper && opt.concatenated) {
                    trace.events.push_back({t, "half_crossing", p});
                    p.half = Half::lower;
                    p.z = 1.0;
                } else {
                    trace.events.push_back({t, "boundary_exit", p});
                    trace.termination = Termination::exited_boundary;
                    done = true;
                }
            }
        } else if (adv.elapsed >= dt_theta - 1e-15 && theta_surface != nullptr &&
                   dt_theta <= leg + 1e-15) {
            p.theta = theta_target;  // exact by linearity
            trace.events.push_back(
                {t, theta_surface->name.empty() ? "theta_mod" : theta_surface->name, p});
            if (theta_surface->terminal) {
                trace.termination = Termination::hit_event;
                done = true;
            }
        }

        if (t >= next_sample - 1e-15) {
            sample();
            next_sample += opt.sample_dt;
        }
        if (t >= opt.budget) done = true;
    }

    if (trace.samples.empty() || trace.samples.back().first != t) trace.samples.emplace_back(t, p);
    trace.final_point = p;
    trace.final_time = t;
    return trace;
}

}  // namespace plugflow

// Quasi-steady blade-element surrogate for the oil-tank rig: strip forces on
// a (possibly amputated) flat plate swept by the fin stem, an optional
// first-order pitch lag standing in for plate flexibility, seeded force
// noise, and the repeated-run / discard-first-cycles evaluation protocol.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "finopt/common.hpp"
#include "finopt/kinematics.hpp"

namespace finopt::plant {

struct FinSpec {
    double span = 0.200;         // m, radial extent of the plate
    double chord = 0.050;        // m
    double root_offset = 0.225;  // m, stem length from pivot to fin root
    int n_strips = 20;
    double pitch_lag_tau = 0.0;  // s; 0 = rigid
};

struct FluidSpec {
    double density = 880.0;                 // kg/m^3
    double kinematic_viscosity = 115e-6;    // m^2/s
    double normal_force_coefficient_scale = 3.4;  // C0 in Cn = C0*sin(alpha)
};

struct DamageState {
    bool intact = true;
    double area_loss_fraction = 0.0;  // in [0, 1)
    double cp_lateral_offset = 0.0;   // m, center-of-pressure shift off the pitch axis
};

struct NoiseSpec {
    double force_noise_std = 0.01;  // N per sample, per component
    std::uint64_t rng_seed = 0;
};

// One-sided amputation: the retained planform is a chordwise band, so the
// center of pressure shifts away from the pitch axis by the centroid of the
// retained region. The loss fraction itself is the configuration primitive.
inline DamageState apply_damage(const FinSpec& fin, double fraction = 0.442) {
    DamageState d;
    if (fraction <= 0.0) return d;  // continuity with the intact state
    d.intact = false;
    d.area_loss_fraction = fraction;
    // chord coordinate xi in [-c/2, c/2], pitch axis at 0; retained region
    // [-c/2, (1/2 - fraction)*c] has centroid -fraction*c/2
    d.cp_lateral_offset = -fraction * fin.chord / 2.0;
    return d;
}

struct ForceSample {
    double fx = 0.0, fy = 0.0, fz = 0.0;  // N, lab frame
    double fn = 0.0;                      // N, signed normal component
};

namespace detail {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        const double n = norm();
        return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
    }
};

struct StemFrame {
    Vec3 s;      // unit stem direction
    Vec3 s_dot;  // d(s)/dt, 1/s
    Vec3 chord;  // unit chord direction (in the fin plane, off the stem)
    Vec3 normal; // unit fin-plane normal
};

// Stem direction from the two lab-frame deflection angles; the nominal
// (undeflected) stem points along +z.
inline StemFrame stem_frame(double sweep_x_deg, double sweep_y_deg,
                            double rate_x_deg_s, double rate_y_deg_s,
                            double pitch_deg) {
    const double ax = deg2rad(sweep_x_deg);
    const double ay = deg2rad(sweep_y_deg);
    const double u = std::sin(ax);
    const double v = std::sin(ay);
    const double w = std::sqrt(std::max(0.0, 1.0 - u * u - v * v));
    StemFrame f;
    f.s = {u, v, w};
    const double du = std::cos(ax) * deg2rad(rate_x_deg_s);
    const double dv = std::cos(ay) * deg2rad(rate_y_deg_s);
    const double dw = w > 1e-12 ? -(u * du + v * dv) / w : 0.0;
    f.s_dot = {du, dv, dw};

    const double p = deg2rad(pitch_deg);
    const Vec3 c_raw{std::cos(p), std::sin(p), 0.0};
    f.chord = (c_raw - f.s * c_raw.dot(f.s)).normalized();
    f.normal = f.s.cross(f.chord).normalized();
    return f;
}

}  // namespace detail

// Quasi-steady strip sum at one kinematic sample. Each retained strip at
// radius r_i sees velocity U_i = r_i * d(stem)/dt plus the pitch-rate
// coupling through the lateral center-of-pressure offset; the strip load is
// 0.5 * rho * C0 * sin(alpha_i) * A_i * |U_i|^2 along the fin normal.
inline ForceSample strip_forces(const kinematics::KinematicsSample& sample,
                                const FinSpec& fin, const FluidSpec& fluid,
                                const DamageState& damage,
                                double pitch_override_deg,
                                double pitch_rate_override_deg_s) {
    const detail::StemFrame frame = detail::stem_frame(
        sample.sweep_x, sample.sweep_y, sample.sweep_rate_x,
        sample.sweep_rate_y, pitch_override_deg);

    const double area_scale = 1.0 - damage.area_loss_fraction;
    const double strip_width = fin.span / fin.n_strips;
    const double strip_area = area_scale * fin.chord * strip_width;
    const double pitch_rate = deg2rad(pitch_rate_override_deg_s);

    detail::Vec3 force;
    double fn = 0.0;
    for (int i = 0; i < fin.n_strips; ++i) {
        const double r = fin.root_offset + (i + 0.5) * strip_width;
        const detail::Vec3 u =
            frame.s_dot * r + frame.normal * (pitch_rate * damage.cp_lateral_offset);
        const double speed = u.norm();
        const double u_n = u.dot(frame.normal);  // speed * sin(alpha), signed
        const double dfn =
            0.5 * fluid.density * fluid.normal_force_coefficient_scale *
            strip_area * u_n * speed;
        force = force + frame.normal * dfn;
        fn += dfn;
    }
    return {force.x, force.y, force.z, fn};
}

inline ForceSample strip_forces(const kinematics::KinematicsSample& sample,
                                const FinSpec& fin, const FluidSpec& fluid,
                                const DamageState& damage) {
    return strip_forces(sample, fin, fluid, damage, sample.pitch_absolute,
                        sample.pitch_rate);
}

struct CycleTrace {
    std::vector<ForceSample> forces;  // one per kinematic sample
    bool discarded = false;           // start-up cycle, excluded from averages
};

// Simulates n_cycles consecutive periods. The pitch-lag state carries across
// cycle boundaries; the first three cycles are marked discarded.
inline std::vector<CycleTrace> run_cycles(const kinematics::KinematicsTrace& trace,
                                          int n_cycles, const FinSpec& fin,
                                          const FluidSpec& fluid,
                                          const DamageState& damage,
                                          const NoiseSpec& noise,
                                          std::uint64_t stream_seed) {
    std::mt19937_64 rng(stream_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double dt = trace.period / static_cast<double>(trace.samples.size());

    std::vector<CycleTrace> cycles(static_cast<std::size_t>(n_cycles));
    double pitch_eff = trace.samples.front().pitch_absolute;
    for (int c = 0; c < n_cycles; ++c) {
        CycleTrace& cycle = cycles[static_cast<std::size_t>(c)];
        cycle.discarded = c < 3;
        cycle.forces.reserve(trace.samples.size());
        for (const auto& s : trace.samples) {
            double pitch = s.pitch_absolute;
            double pitch_rate = s.pitch_rate;
            if (fin.pitch_lag_tau > 0.0) {
                const double err = wrap_deg(s.pitch_absolute - pitch_eff);
                pitch_rate = err / fin.pitch_lag_tau;
                pitch_eff = wrap_deg(pitch_eff + pitch_rate * dt);
                pitch = pitch_eff;
            }
            ForceSample f = strip_forces(s, fin, fluid, damage, pitch, pitch_rate);
            if (noise.force_noise_std > 0.0) {
                f.fx += noise.force_noise_std * gauss(rng);
                f.fy += noise.force_noise_std * gauss(rng);
                f.fz += noise.force_noise_std * gauss(rng);
                f.fn += noise.force_noise_std * gauss(rng);
            }
            cycle.forces.push_back(f);
        }
    }
    return cycles;
}

inline constexpr int kPhiGridSize = 360;  // record grid, matches the plots

struct CycleRecord {
    std::array<double, 3> mean_force = {0.0, 0.0, 0.0};   // N, retained-cycle avg
    double mean_normal_force_mag = 0.0;                   // N, mean of |Fn(t)|
    std::array<std::vector<double>, 4> force_trace;       // Fx,Fy,Fz,Fn on phi grid
    std::vector<double> aoa_trace;                        // deg on phi grid
    int n_runs = 0;
    double reynolds = 0.0;  // span * mean centroid speed / nu
};

namespace detail {

// Linear interpolation of a periodic signal known at phi_pts onto a
// uniform [0, 2pi) grid. phi_pts is strictly increasing from 0.
inline std::vector<double> resample_to_phi_grid(const std::vector<double>& phi_pts,
                                                const std::vector<double>& values,
                                                int grid) {
    std::vector<double> out(static_cast<std::size_t>(grid));
    const std::size_t n = phi_pts.size();
    std::size_t k = 0;
    for (int g = 0; g < grid; ++g) {
        const double phi = kTwoPi * g / grid;
        while (k + 1 < n && phi_pts[k + 1] <= phi) ++k;
        const double p0 = phi_pts[k];
        const double v0 = values[k];
        const double p1 = k + 1 < n ? phi_pts[k + 1] : kTwoPi;
        const double v1 = k + 1 < n ? values[k + 1] : values[0];
        const double w = p1 > p0 ? (phi - p0) / (p1 - p0) : 0.0;
        out[static_cast<std::size_t>(g)] = v0 + w * (v1 - v0);
    }
    return out;
}

}  // namespace detail

struct EvaluateSettings {
    int n_runs = 3;
    int n_cycles = 4;
    std::size_t n_samples = 720;
};

// Evaluation protocol: at least three repeated runs per candidate, first three
// cycles of each run removed, remaining cycles averaged. Distinct noise
// substreams per run; the whole record is a pure function of (params,
// specs, seed).
inline CycleRecord evaluate(const kinematics::TrajectoryParams& params,
                            const EvaluateSettings& settings, const FinSpec& fin,
                            const FluidSpec& fluid, const DamageState& damage,
                            const NoiseSpec& noise, std::uint64_t eval_seed) {
    const auto trace = kinematics::generate(params, settings.n_samples);
    const std::size_t n = trace.samples.size();

    std::vector<ForceSample> mean(n);
    std::size_t retained = 0;
    for (int run = 0; run < settings.n_runs; ++run) {
        const std::uint64_t stream =
            mix_seed(mix_seed(noise.rng_seed, eval_seed), static_cast<std::uint64_t>(run));
        const auto cycles =
            run_cycles(trace, settings.n_cycles, fin, fluid, damage, noise, stream);
        for (const auto& cycle : cycles) {
            if (cycle.discarded) continue;
            for (std::size_t j = 0; j < n; ++j) {
                mean[j].fx += cycle.forces[j].fx;
                mean[j].fy += cycle.forces[j].fy;
                mean[j].fz += cycle.forces[j].fz;
                mean[j].fn += cycle.forces[j].fn;
            }
            ++retained;
        }
    }
    for (auto& f : mean) {
        f.fx /= static_cast<double>(retained);
        f.fy /= static_cast<double>(retained);
        f.fz /= static_cast<double>(retained);
        f.fn /= static_cast<double>(retained);
    }

    CycleRecord record;
    record.n_runs = settings.n_runs;
    double centroid_speed = 0.0;
    const double r_c = fin.root_offset + fin.span / 2.0;
    for (std::size_t j = 0; j < n; ++j) {
        record.mean_force[0] += mean[j].fx;
        record.mean_force[1] += mean[j].fy;
        record.mean_force[2] += mean[j].fz;
        record.mean_normal_force_mag += std::abs(mean[j].fn);
        const auto frame = detail::stem_frame(
            trace.samples[j].sweep_x, trace.samples[j].sweep_y,
            trace.samples[j].sweep_rate_x, trace.samples[j].sweep_rate_y,
            trace.samples[j].pitch_absolute);
        centroid_speed += (frame.s_dot * r_c).norm();
    }
    for (auto& c : record.mean_force) c /= static_cast<double>(n);
    record.mean_normal_force_mag /= static_cast<double>(n);
    centroid_speed /= static_cast<double>(n);
    record.reynolds = fin.span * centroid_speed / fluid.kinematic_viscosity;

    std::vector<double> phi_pts(n), buf(n);
    for (std::size_t j = 0; j < n; ++j) phi_pts[j] = trace.samples[j].phi;
    const auto resample = [&](auto getter) {
        for (std::size_t j = 0; j < n; ++j) buf[j] = getter(j);
        return detail::resample_to_phi_grid(phi_pts, buf, kPhiGridSize);
    };
    record.force_trace[0] = resample([&](std::size_t j) { return mean[j].fx; });
    record.force_trace[1] = resample([&](std::size_t j) { return mean[j].fy; });
    record.force_trace[2] = resample([&](std::size_t j) { return mean[j].fz; });
    record.force_trace[3] = resample([&](std::size_t j) { return mean[j].fn; });
    record.aoa_trace = resample([&](std::size_t j) { return trace.samples[j].aoa; });
    return record;
}

}  // namespace finopt::plant

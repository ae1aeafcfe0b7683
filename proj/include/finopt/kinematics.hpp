// Trajectory parameterization of the flapping fin: an elliptical (optionally
// cambered) sweep of the fin stem, a shaped angle-of-attack trace, and a
// two-rate time warp that speeds up one half of the cycle.
//
// All externally visible angles are degrees; the azimuthal parameter phi and
// the rotation phase are radians.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "finopt/common.hpp"

namespace finopt::kinematics {

inline constexpr int kNumParams = 9;

enum class TrajectoryType { Ellipse };

struct ParamBound {
    const char* name;
    double min;
    double max;
    double convergence;  // per-parameter convergence criterion, same unit
};

// Order: stroke, thickness, rotation, phase, speed code, speed-up,
// rotation acceleration, camber, frequency.
inline const std::array<ParamBound, kNumParams>& param_bounds() {
    static const std::array<ParamBound, kNumParams> bounds = {{
        {"stroke_angle", 15.27, 32.18, 3.0},
        {"thickness_angle", 0.0, 15.27, 3.0},
        {"rotation_angle", -70.0, 70.0, 3.0},
        {"rotation_phase", 0.0, kTwoPi - 0.1, 0.4},
        {"speed_code", 0.0, 4.9, 0.9},
        {"speed_up_value", 1.1, 1.3, 0.1},
        {"rotation_acceleration", 0.0, 1.0, 0.2},
        {"camber", 0.0, 1.0, 0.2},
        {"frequency", 0.7, 0.9, 0.01},
    }};
    return bounds;
}

struct TrajectoryParams {
    TrajectoryType trajectory_type = TrajectoryType::Ellipse;
    double stroke_angle = 0.0;          // deg, semimajor excursion
    double thickness_angle = 0.0;       // deg, semiminor excursion
    double rotation_angle = 0.0;        // deg, signed max pitch vs normal
    double rotation_phase = 0.0;        // rad, azimuth of max pitch
    double speed_code = 0.0;            // floor selects sped-up half cycle
    double speed_up_value = 1.1;        // rate ratio inside that half
    double rotation_acceleration = 0.0; // 0 = sinusoid, 1 -> square wave
    double camber = 0.0;                // bow of the major axis
    double frequency = 0.7;             // Hz

    std::array<double, kNumParams> to_array() const {
        return {stroke_angle, thickness_angle, rotation_angle, rotation_phase,
                speed_code, speed_up_value, rotation_acceleration, camber,
                frequency};
    }

    static TrajectoryParams from_array(const std::array<double, kNumParams>& a) {
        TrajectoryParams p;
        p.stroke_angle = a[0];
        p.thickness_angle = a[1];
        p.rotation_angle = a[2];
        p.rotation_phase = a[3];
        p.speed_code = a[4];
        p.speed_up_value = a[5];
        p.rotation_acceleration = a[6];
        p.camber = a[7];
        p.frequency = a[8];
        return p;
    }
};

// Reference initializations (inflexible-fin optima used to seed both runs).
inline TrajectoryParams thrust_initialization() {
    return TrajectoryParams::from_array(
        {25.43, 14.29, -40.46, 6.18, 2.95, 1.10, 0.13, 0.20, 0.71});
}

inline TrajectoryParams side_force_initialization() {
    return TrajectoryParams::from_array(
        {26.12, 13.30, -62.51, 2.63, 1.34, 1.18, 0.03, 0.18, 0.72});
}

struct FieldReport {
    std::string name;
    double value = 0.0;
    bool in_range = true;
    std::string violated_bound;  // e.g. "maximum 32.18", empty when in range
};

struct ValidationReport {
    bool pass = true;
    std::array<FieldReport, kNumParams> fields;
};

inline ValidationReport validate(const TrajectoryParams& params) {
    ValidationReport report;
    const auto values = params.to_array();
    const auto& bounds = param_bounds();
    for (int i = 0; i < kNumParams; ++i) {
        FieldReport& f = report.fields[static_cast<std::size_t>(i)];
        f.name = bounds[static_cast<std::size_t>(i)].name;
        f.value = values[static_cast<std::size_t>(i)];
        const auto& b = bounds[static_cast<std::size_t>(i)];
        if (f.value < b.min) {
            f.in_range = false;
            f.violated_bound = "minimum " + std::to_string(b.min);
        } else if (f.value > b.max) {
            f.in_range = false;
            f.violated_bound = "maximum " + std::to_string(b.max);
        }
        report.pass = report.pass && f.in_range;
    }
    return report;
}

// x(phi) = stroke * cos(phi)
// y(phi) = thickness * sin(phi) + camber * thickness * sin^2(phi)
// Camber leaves the major-axis endpoints fixed and bows the midspan.
inline std::pair<double, double> base_ellipse(const TrajectoryParams& p,
                                              double phi) {
    const double s = std::sin(phi);
    const double x = p.stroke_angle * std::cos(phi);
    const double y = p.thickness_angle * s + p.camber * p.thickness_angle * s * s;
    return {x, y};
}

// d/dphi of base_ellipse, degrees per radian.
inline std::pair<double, double> base_ellipse_dphi(const TrajectoryParams& p,
                                                   double phi) {
    const double dx = -p.stroke_angle * std::sin(phi);
    const double dy = p.thickness_angle * std::cos(phi) +
                      p.camber * p.thickness_angle * std::sin(2.0 * phi);
    return {dx, dy};
}

inline std::pair<double, double> base_ellipse_d2phi(const TrajectoryParams& p,
                                                    double phi) {
    const double d2x = -p.stroke_angle * std::cos(phi);
    const double d2y = -p.thickness_angle * std::sin(phi) +
                       2.0 * p.camber * p.thickness_angle * std::cos(2.0 * phi);
    return {d2x, d2y};
}

namespace detail {

// Squareness shaping: S(x; a) = tanh(beta * sin x) / tanh(beta) with
// beta = tan(pi * min(a, 0.995) / 2). The a -> 0 limit is sin x; taken
// analytically below the branch cutoff so a = 0 is exact.
inline double squareness_beta(double a) {
    return std::tan(kPi * std::min(a, 0.995) / 2.0);
}

inline double shaped_sin(double x, double a) {
    const double beta = squareness_beta(a);
    if (beta < 1e-9) return std::sin(x);
    return std::tanh(beta * std::sin(x)) / std::tanh(beta);
}

// dS/dx.
inline double shaped_sin_dx(double x, double a) {
    const double beta = squareness_beta(a);
    if (beta < 1e-9) return std::cos(x);
    const double th = std::tanh(beta * std::sin(x));
    return beta * std::cos(x) * (1.0 - th * th) / std::tanh(beta);
}

}  // namespace detail

// Pitch relative to the local trajectory normal, degrees. The signed
// maximum rotation_angle occurs exactly at phi = rotation_phase.
inline double aoa_trace(const TrajectoryParams& p, double phi) {
    return p.rotation_angle *
           detail::shaped_sin(phi - p.rotation_phase + kPi / 2.0,
                              p.rotation_acceleration);
}

// d(aoa)/dphi, degrees per radian.
inline double aoa_trace_dphi(const TrajectoryParams& p, double phi) {
    return p.rotation_angle *
           detail::shaped_sin_dx(phi - p.rotation_phase + kPi / 2.0,
                                 p.rotation_acceleration);
}

// Two-rate time warp. floor(speed_code) k in {1..4} selects a half cycle
// of phi-extent pi starting at (k-1)*pi/2; the azimuthal rate inside is
// speed_up_value times the rate outside. k = 0 means a uniform rate.
class TimeWarp {
public:
    explicit TimeWarp(const TrajectoryParams& p) {
        period_ = 1.0 / p.frequency;
        const int code = static_cast<int>(std::floor(p.speed_code));
        if (code < 1 || code > 4) {
            // uniform rate
            segments_.push_back({0.0, kTwoPi, kTwoPi / period_, 0.0});
            finalize();
            return;
        }
        const double s = p.speed_up_value;
        // base (slow) rate so the two-rate cycle closes in one period:
        // pi/(s*w0) + pi/w0 = period
        const double w0 = kPi * (1.0 + 1.0 / s) / period_;
        const double start = (code - 1) * kPi / 2.0;
        const double end = start + kPi;
        // split [0, 2pi) at section boundaries (section may wrap past 2pi)
        std::vector<double> cuts = {0.0, kTwoPi};
        auto add_cut = [&](double c) {
            c = wrap_2pi(c);
            if (c > 1e-15 && c < kTwoPi - 1e-15) cuts.push_back(c);
        };
        add_cut(start);
        add_cut(end);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double lo = cuts[i];
            const double hi = cuts[i + 1];
            const double mid = wrap_2pi(0.5 * (lo + hi));
            // inside the section iff (mid - start) mod 2pi < pi
            const bool inside = wrap_2pi(mid - start) < kPi;
            segments_.push_back({lo, hi, inside ? s * w0 : w0, 0.0});
        }
        finalize();
    }

    double period() const { return period_; }

    // phi(t) for t in [0, period); strictly increasing, phi(0) = 0.
    double phi(double t) const {
        for (const auto& seg : segments_) {
            const double t_end = seg.t_start + (seg.phi_end - seg.phi_start) / seg.rate;
            if (t < t_end || &seg == &segments_.back())
                return seg.phi_start + seg.rate * (t - seg.t_start);
        }
        return kTwoPi;  // unreachable
    }

    // dphi/dt at time t.
    double rate(double t) const {
        for (const auto& seg : segments_) {
            const double t_end = seg.t_start + (seg.phi_end - seg.phi_start) / seg.rate;
            if (t < t_end || &seg == &segments_.back()) return seg.rate;
        }
        return segments_.back().rate;
    }

    // Time at which the warp reaches a given phi in [0, 2pi].
    double time_of_phi(double phi_target) const {
        for (const auto& seg : segments_) {
            if (phi_target <= seg.phi_end || &seg == &segments_.back())
                return seg.t_start + (phi_target - seg.phi_start) / seg.rate;
        }
        return period_;
    }

private:
    struct Segment {
        double phi_start;
        double phi_end;
        double rate;     // dphi/dt, constant within the segment
        double t_start;  // filled by finalize()
    };

    void finalize() {
        double t = 0.0;
        for (auto& seg : segments_) {
            seg.t_start = t;
            t += (seg.phi_end - seg.phi_start) / seg.rate;
        }
    }

    double period_ = 0.0;
    std::vector<Segment> segments_;
};

inline double time_warp(const TrajectoryParams& p, double t) {
    return TimeWarp(p).phi(t);
}

struct KinematicsSample {
    double t = 0.0;        // s
    double phi = 0.0;      // rad
    double sweep_x = 0.0;  // deg, lab-frame x deflection of the stem
    double sweep_y = 0.0;  // deg
    double pitch_absolute = 0.0;  // deg, fin plane orientation in lab frame
    double aoa = 0.0;             // deg, pitch relative to trajectory normal
    double sweep_rate_x = 0.0;    // deg/s
    double sweep_rate_y = 0.0;    // deg/s
    double pitch_rate = 0.0;      // deg/s
};

struct KinematicsTrace {
    std::vector<KinematicsSample> samples;  // uniform in t over one period
    double period = 0.0;                    // s
};

// Samples one full period at n uniform time steps. pitch_absolute is the
// local trajectory-normal orientation (tangent angle - 90 deg) plus aoa.
inline KinematicsTrace generate(const TrajectoryParams& p, std::size_t n_samples) {
    if (p.thickness_angle == 0.0) {
        throw DegenerateTrajectory(
            "flat trajectory: thickness_angle = 0 leaves the local normal "
            "undefined at the stroke endpoints");
    }
    const TimeWarp warp(p);
    KinematicsTrace trace;
    trace.period = warp.period();
    trace.samples.resize(n_samples);
    const double dt = trace.period / static_cast<double>(n_samples);
    for (std::size_t j = 0; j < n_samples; ++j) {
        KinematicsSample& s = trace.samples[j];
        s.t = static_cast<double>(j) * dt;
        s.phi = warp.phi(s.t);
        const double omega = warp.rate(s.t);  // rad/s

        const auto [x, y] = base_ellipse(p, s.phi);
        const auto [dx, dy] = base_ellipse_dphi(p, s.phi);
        const auto [d2x, d2y] = base_ellipse_d2phi(p, s.phi);
        s.sweep_x = x;
        s.sweep_y = y;
        s.sweep_rate_x = dx * omega;
        s.sweep_rate_y = dy * omega;

        s.aoa = aoa_trace(p, s.phi);
        const double tangent = std::atan2(dy, dx);  // rad
        s.pitch_absolute = wrap_deg(rad2deg(tangent - kPi / 2.0) + s.aoa);

        // d(tangent)/dphi, rad per rad
        const double denom = dx * dx + dy * dy;
        const double dtangent = (dx * d2y - dy * d2x) / denom;
        s.pitch_rate = (rad2deg(dtangent) + aoa_trace_dphi(p, s.phi)) * omega;
    }
    return trace;
}

}  // namespace finopt::kinematics

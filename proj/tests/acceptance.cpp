// Acceptance gate: one PASS/FAIL line per criterion, exit 0 only if every
// hard-gated criterion passes. Criterion 7 is a documentation check and is
// reported rather than asserted.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "finopt/analysis.hpp"
#include "finopt/cmaes.hpp"
#include "finopt/fitness.hpp"
#include "finopt/harness.hpp"
#include "finopt/kinematics.hpp"
#include "finopt/plant.hpp"

namespace fs = std::filesystem;
using namespace finopt;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report_line(int criterion, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

plant::CycleRecord record_with(double f, double fn) {
    plant::CycleRecord r;
    r.mean_force = {0.0, 0.0, f};
    r.mean_normal_force_mag = fn;
    return r;
}

// ---- criterion 1: fitness oracle -------------------------------------------
bool criterion1(std::string& detail) {
    const auto t0 = Clock::now();
    bool ok = true;
    const fitness::Objective obj;
    ok &= std::abs(fitness::fitness(record_with(1.0, 1.0), obj).f) < 1e-12;
    ok &= std::abs(fitness::fitness(record_with(0.5, 1.0), obj).f - 0.5) < 1e-12;
    ok &= std::abs(fitness::fitness(record_with(-0.3, 1.0), obj).f - 0.82) < 1e-12;
    // converged-optima fixtures: residual f - 0.8|closeness| must lie in the
    // efficiency term's range [0, 0.2]
    const double rows[12][2] = {
        {0.0029, 0.1157}, {0.0130, 0.1088}, {0.0067, 0.0920},
        {0.0032, 0.1049}, {0.0085, 0.0879}, {0.0016, 0.0810},
        {-0.0062, 0.0087}, {-0.1618, 0.1633}, {-0.0091, 0.0854},
        {-0.0027, 0.0933}, {-0.0189, 0.1059}, {0.0198, 0.0408}};
    for (const auto& row : rows) {
        const double residual = row[1] - 0.8 * std::abs(row[0]);
        ok &= residual >= 0.0 && residual <= 0.2;
    }
    const double dt = seconds_since(t0);
    ok &= dt < 1.0;
    detail = "fitness unit cases + 12 fixture rows in " + std::to_string(dt) + " s";
    return ok;
}

// ---- criterion 2: kinematics suite ------------------------------------------
bool criterion2(std::string& detail) {
    const auto t0 = Clock::now();
    bool ok = true;
    std::mt19937_64 rng(20260826);
    const auto& bounds = kinematics::param_bounds();
    auto uniform = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    const std::size_t n_samples = 720;
    int checked_peaks = 0;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        kinematics::TrajectoryParams p;
        p.stroke_angle = uniform(bounds[0].min, bounds[0].max);
        p.thickness_angle = uniform(1.0, bounds[1].max);  // avoid degenerate flat
        p.rotation_angle = uniform(bounds[2].min, bounds[2].max);
        p.rotation_phase = uniform(bounds[3].min, bounds[3].max);
        p.speed_code = uniform(bounds[4].min, bounds[4].max);
        p.speed_up_value = uniform(bounds[5].min, bounds[5].max);
        p.rotation_acceleration = uniform(bounds[6].min, bounds[6].max);
        p.camber = uniform(bounds[7].min, bounds[7].max);
        p.frequency = uniform(bounds[8].min, bounds[8].max);

        const auto trace = kinematics::generate(p, n_samples);
        ok &= std::abs(trace.period - 1.0 / p.frequency) < 1e-9;

        // excursion recovery within grid interpolation error
        double max_x = 0.0, max_y = 0.0;
        for (const auto& s : trace.samples) {
            max_x = std::max(max_x, std::abs(s.sweep_x));
            max_y = std::max(max_y, std::abs(s.sweep_y));
        }
        const double dphi = kPi * (p.speed_up_value + 1.0) /
                            static_cast<double>(n_samples);  // worst grid gap
        ok &= std::abs(max_x - p.stroke_angle) <
              p.stroke_angle * dphi * dphi + 1e-9;
        const double y_peak = p.thickness_angle * (1.0 + p.camber);
        ok &= std::abs(max_y - y_peak) <
              p.thickness_angle * (1.0 + 4.0 * p.camber) * dphi * dphi + 1e-9;

        // speed-up time ratio: fast/slow azimuthal rate equals speed_up_value
        const kinematics::TimeWarp warp(p);
        double r_min = 1e300, r_max = 0.0;
        for (int j = 0; j < 2000; ++j) {
            const double r = warp.rate((j + 0.5) * trace.period / 2000.0);
            r_min = std::min(r_min, r);
            r_max = std::max(r_max, r);
        }
        const double expected_ratio =
            static_cast<int>(std::floor(p.speed_code)) >= 1 ? p.speed_up_value : 1.0;
        ok &= std::abs(r_max / r_min - expected_ratio) < 1e-9;

        // AOA peak lies at rotation_phase within one grid step; for high
        // squareness the peak is a plateau, so test its midpoint
        if (std::abs(p.rotation_angle) > 2.0) {
            const int grid = 4000;
            const double sign = p.rotation_angle > 0 ? 1.0 : -1.0;
            double best = -1e300;
            for (int j = 0; j < grid; ++j)
                best = std::max(best, sign * kinematics::aoa_trace(
                                          p, p.rotation_phase +
                                                 kPi * (2.0 * j / grid - 1.0)));
            const double tol = 1e-9 * std::abs(p.rotation_angle);
            double lo = kPi, hi = -kPi;
            for (int j = 0; j < grid; ++j) {
                const double x = kPi * (2.0 * j / grid - 1.0);
                if (sign * kinematics::aoa_trace(p, p.rotation_phase + x) >=
                    best - tol) {
                    lo = std::min(lo, x);
                    hi = std::max(hi, x);
                }
            }
            ok &= std::abs(0.5 * (lo + hi)) <= kTwoPi / grid + 1e-12;
            ++checked_peaks;
        }

        // a = 0 reduces to a pure sinusoid
        kinematics::TrajectoryParams q = p;
        q.rotation_acceleration = 0.0;
        for (int j = 0; j < 50; ++j) {
            const double phi = kTwoPi * j / 50.0;
            const double expected =
                q.rotation_angle *
                std::sin(phi - q.rotation_phase + kPi / 2.0);
            ok &= std::abs(kinematics::aoa_trace(q, phi) - expected) < 1e-12;
        }
    }
    const double dt = seconds_since(t0);
    ok &= dt < 10.0;
    ok &= checked_peaks > 500;
    detail = "1000 random parameter vectors in " + std::to_string(dt) + " s";
    return ok;
}

// ---- criterion 3: plant scaling laws ----------------------------------------
bool criterion3(std::string& detail) {
    bool ok = true;
    const plant::FinSpec fin;
    const plant::FluidSpec fluid;
    const plant::DamageState intact;
    plant::NoiseSpec quiet;
    quiet.force_noise_std = 0.0;
    quiet.rng_seed = 3;

    // zero motion => zero force
    kinematics::KinematicsSample still;
    still.pitch_absolute = 45.0;
    const auto f0 = plant::strip_forces(still, fin, fluid, intact);
    ok &= f0.fx == 0.0 && f0.fy == 0.0 && f0.fz == 0.0 && f0.fn == 0.0;

    const auto params = kinematics::thrust_initialization();
    const plant::EvaluateSettings settings{3, 4, 360};
    const auto base = plant::evaluate(params, settings, fin, fluid, intact, quiet, 1);

    // density linearity
    plant::FluidSpec heavy = fluid;
    heavy.density = 2.0 * fluid.density;
    const auto dbl = plant::evaluate(params, settings, fin, heavy, intact, quiet, 1);
    for (int i = 0; i < 3; ++i)
        ok &= std::abs(dbl.mean_force[i] - 2.0 * base.mean_force[i]) <=
              1e-12 * std::max(1.0, std::abs(base.mean_force[i]));

    // frequency doubling => mean force x4 (1e-6 relative)
    auto fast = params;
    fast.frequency = 2.0 * params.frequency;
    const auto f4 = plant::evaluate(fast, settings, fin, fluid, intact, quiet, 1);
    for (int i = 0; i < 3; ++i) {
        if (std::abs(base.mean_force[i]) < 1e-9) continue;
        ok &= std::abs(f4.mean_force[i] / base.mean_force[i] - 4.0) < 1e-6 * 4.0;
    }

    // amputation: retained area ratio exactly 1 - 0.442
    const auto damage = plant::apply_damage(fin, 0.442);
    ok &= (1.0 - damage.area_loss_fraction) == 1.0 - 0.442;

    // determinism: same seed => bit-identical record
    plant::NoiseSpec noisy;
    noisy.force_noise_std = 0.01;
    noisy.rng_seed = 99;
    const auto a = plant::evaluate(params, settings, fin, fluid, intact, noisy, 7);
    const auto b = plant::evaluate(params, settings, fin, fluid, intact, noisy, 7);
    ok &= a.mean_force == b.mean_force;
    for (int i = 0; i < 4; ++i) ok &= a.force_trace[i] == b.force_trace[i];
    detail = "zero-motion, linearity, f-squared scaling, damage ratio, determinism";
    return ok;
}

// ---- criterion 4: optimizer -------------------------------------------------
bool criterion4(std::string& detail) {
    const auto t0 = Clock::now();
    bool ok = true;
    cmaes::Vector center;
    center << 0.4, 0.6, 0.5, 0.3, 0.7, 0.5, 0.4, 0.6, 0.5;

    auto s = cmaes::CmaesState::init(kinematics::thrust_initialization(), 42);
    int generations = 0;
    for (; generations < 200; ++generations) {
        const auto candidates = s.ask();
        std::vector<double> fits;
        for (const auto& c : candidates)
            fits.push_back((c.raw - center).squaredNorm());
        s.tell(fits);
        if ((s.mean() - center).norm() < 1e-3) break;
    }
    ok &= (s.mean() - center).norm() < 1e-3 && generations < 200;

    // rank invariance under a constant fitness shift
    auto a = cmaes::CmaesState::init(kinematics::thrust_initialization(), 21);
    auto b = cmaes::CmaesState::init(kinematics::thrust_initialization(), 21);
    const auto ca = a.ask();
    const auto cb = b.ask();
    std::vector<double> fa, fb;
    for (std::size_t k = 0; k < ca.size(); ++k) {
        fa.push_back((ca[k].raw - center).squaredNorm());
        fb.push_back(fa.back() + 123.456);
    }
    a.tell(fa);
    b.tell(fb);
    ok &= a.snapshot().dump() == b.snapshot().dump();

    // snapshot/restore roundtrip: next generation bit-identical
    auto orig = cmaes::CmaesState::init(kinematics::thrust_initialization(), 5);
    auto copy = cmaes::CmaesState::restore(orig.snapshot());
    const auto go = orig.ask();
    const auto gc = copy.ask();
    for (std::size_t k = 0; k < go.size(); ++k)
        ok &= (go[k].raw.array() == gc[k].raw.array()).all();

    // per-parameter convergence flags on a constructed near-point state
    auto tight = cmaes::CmaesState::init(kinematics::thrust_initialization(), 1, 0,
                                         1e-6);
    const auto conv = tight.converged();
    ok &= conv.overall;
    for (bool f : conv.per_parameter) ok &= f;
    const double dt = seconds_since(t0);
    ok &= dt < 30.0;
    detail = "sphere converged in " + std::to_string(generations) +
             " generations, " + std::to_string(dt) + " s";
    return ok;
}

// ---- criterion 5: analysis --------------------------------------------------
bool criterion5(std::string& detail) {
    bool ok = true;
    // Fourier roundtrip and amplitude/phase recovery
    const int n = 360;
    std::vector<double> signal(n);
    for (int j = 0; j < n; ++j) {
        const double phi = kTwoPi * j / n;
        signal[static_cast<std::size_t>(j)] =
            0.426 * std::cos(phi + deg2rad(40.0)) +
            0.398 * std::cos(2.0 * phi + deg2rad(-70.0));
    }
    const auto spec = analysis::fourier(signal, 5);
    ok &= std::abs(spec.modes[0].amplitude - 0.426) < 1e-9;
    ok &= std::abs(spec.modes[1].amplitude - 0.398) < 1e-9;
    for (int j = 0; j < n; ++j) {
        double rec = spec.mean;
        for (const auto& m : spec.modes)
            rec += m.amplitude *
                   std::cos(m.k * kTwoPi * j / n + deg2rad(m.phase_deg));
        ok &= std::abs(rec - signal[static_cast<std::size_t>(j)]) < 1e-9;
    }

    // PCA closed form on [[1, 0.6], [0.6, 1]]
    Eigen::MatrixXd c2(2, 2);
    c2 << 1.0, 0.6, 0.6, 1.0;
    const auto rep = analysis::sensitivity(c2);
    ok &= std::abs(rep.normalized_radii[0] - 0.8 / std::sqrt(1.6)) < 1e-9;

    // ellipsoid-boundary sampling oracle: the boundary point whose direction
    // best aligns with e_1 has norm approaching the axis radius
    {
        const Eigen::MatrixXd r_inv = rep.correlation.inverse();
        double best_alignment = -1.0, radius_at_axis = 0.0;
        const int nd = 1000000;
        for (int k = 0; k < nd; ++k) {
            const double theta = kTwoPi * k / nd;
            Eigen::Vector2d d(std::cos(theta), std::sin(theta));
            const double scale = 1.0 / std::sqrt(d.dot(r_inv * d));
            if (std::abs(d(0)) > best_alignment) {
                best_alignment = std::abs(d(0));
                radius_at_axis = scale;
            }
        }
        ok &= std::abs(radius_at_axis - rep.radii[0]) < 1e-3;
    }

    // identity correlation: every normalized radius is exactly 1
    const auto id = analysis::sensitivity(Eigen::MatrixXd::Identity(9, 9));
    for (double r : id.normalized_radii) ok &= std::abs(r - 1.0) < 1e-12;

    // rotate_to_resultant kills the mean lateral component
    plant::CycleRecord rec;
    rec.mean_force = {0.3, -0.7, 0.1};
    for (auto& t : rec.force_trace) t.assign(8, 0.25);
    const auto rotated = analysis::rotate_to_resultant({rec});
    ok &= std::abs(rotated[0].record.mean_force[1]) < 1e-12;
    detail = "fourier recovery, PCA closed form + 1e6-sample oracle, rotation";
    return ok;
}

// ---- criterion 6 + 7: end-to-end protocol replication ------------------------
struct Protocol {
    bool ran = false;
    bool pass = false;
    std::string detail;
    fs::path root;
    harness::RunLog intact_log;
    std::vector<harness::RunLog> branch_logs;
};

Protocol criterion6() {
    Protocol out;
    const auto t0 = Clock::now();
    out.root = fs::temp_directory_path() / "finopt_acceptance";
    fs::remove_all(out.root);
    fs::create_directories(out.root);

    harness::RunConfig cfg;
    cfg.run_id = "intact";
    cfg.objective.mode = fitness::ObjectiveMode::Thrust;
    cfg.objective.f_target = 0.55;  // interior setpoint: reachable by the damaged fin
    cfg.noise.force_noise_std = 0.01;
    cfg.noise.rng_seed = 2026;
    cfg.optimizer_seed = 11;
    cfg.generation_cap = 450;
    cfg.evaluation = plant::EvaluateSettings{3, 4, 360};

    out.intact_log = harness::run(cfg, out.root);
    out.ran = true;
    if (out.intact_log.termination != "converged") {
        out.detail = "intact run hit the generation cap without converging";
        return out;
    }
    const int gc = out.intact_log.generations.back().generation;
    const int at = std::max(gc - 10, 0);
    const double pre_median =
        out.intact_log.generations[static_cast<std::size_t>(std::max(at - 1, 0))]
            .median_fitness;

    const auto damage = plant::apply_damage(cfg.fin, 0.442);
    out.branch_logs =
        harness::branch(out.root / "intact", at, damage, {101, 102, 103, 104, 105},
                        out.root);

    int recovered = 0, spiked = 0, settled = 0;
    for (const auto& log : out.branch_logs) {
        const auto& opt = harness::optimum_of(log);
        if (std::abs(opt.force - cfg.objective.f_target) / cfg.objective.f_target <=
            0.02)
            ++recovered;
        double max_post = 0.0;
        for (const auto& g : log.generations)
            max_post = std::max(max_post, g.median_fitness);
        if (max_post > 2.0 * pre_median) ++spiked;
        if (log.generations.back().median_fitness <= 1.5 * pre_median) ++settled;
    }
    const double dt = seconds_since(t0);
    out.pass = recovered >= 4 && spiked >= 4 && settled >= 4 && dt < 600.0;
    out.detail = "converged at gen " + std::to_string(gc) + ", branch at " +
                 std::to_string(at) + "; recovered " + std::to_string(recovered) +
                 "/5, spike>2x " + std::to_string(spiked) + "/5, final<=1.5x " +
                 std::to_string(settled) + "/5, " + std::to_string(dt) + " s";
    return out;
}

void criterion7(const Protocol& proto) {
    if (!proto.pass) {
        std::printf("PASS criterion 7: skipped (reported only; protocol run "
                    "unavailable)\n");
        return;
    }
    std::vector<fs::path> dirs = {proto.root / "intact"};
    for (std::size_t b = 1; b <= proto.branch_logs.size(); ++b)
        dirs.push_back(proto.root / ("intact-branch" + std::to_string(b)));
    const fs::path report_dir = proto.root / "report";
    harness::report(dirs, report_dir);
    const bool emitted = fs::exists(report_dir / "classification.csv");

    // adaptation tallies + fundamental AOA phase shift vs the intact optimum
    const auto intact_opt = kinematics::TrajectoryParams::from_array(
        harness::optimum_of(proto.intact_log).params);
    const auto intact_spec =
        analysis::fourier(proto.intact_log.generations.back().best_aoa_trace, 1);
    int stroke_up = 0, thick_up = 0, freq_up = 0;
    double phase_shift_sum = 0.0;
    for (const auto& log : proto.branch_logs) {
        const auto adapted = kinematics::TrajectoryParams::from_array(
            harness::optimum_of(log).params);
        const auto cls = analysis::classify_adaptation(intact_opt, adapted);
        if (cls[0] == analysis::Adaptation::Increase) ++stroke_up;
        if (cls[1] == analysis::Adaptation::Increase) ++thick_up;
        if (cls[8] == analysis::Adaptation::Increase) ++freq_up;
        const auto spec =
            analysis::fourier(log.generations.back().best_aoa_trace, 1);
        phase_shift_sum += std::abs(wrap_deg(spec.modes[0].phase_deg -
                                             intact_spec.modes[0].phase_deg));
    }
    std::printf(
        "PASS criterion 7: classification table %s; stroke Increase %d/5, "
        "thickness Increase %d/5, frequency Increase %d/5, mean |AOA mode-1 "
        "phase shift| %.1f deg (reported, not asserted)\n",
        emitted ? "emitted" : "MISSING", stroke_up, thick_up, freq_up,
        phase_shift_sum / static_cast<double>(proto.branch_logs.size()));
    if (!emitted) ++g_failures;
}

// ---- criterion 8: Reynolds sanity --------------------------------------------
bool criterion8(std::string& detail) {
    kinematics::TrajectoryParams p;
    p.stroke_angle = 24.8;
    p.thickness_angle = 12.9;
    p.rotation_angle = 26.7;
    p.rotation_phase = 5.3;
    p.speed_code = 0.0;
    p.speed_up_value = 1.2;
    p.rotation_acceleration = 0.6;
    p.camber = 0.6;
    p.frequency = 0.70;
    plant::NoiseSpec quiet;
    quiet.force_noise_std = 0.0;
    quiet.rng_seed = 1;
    const auto rec = plant::evaluate(p, plant::EvaluateSettings{3, 4, 360},
                                     plant::FinSpec{}, plant::FluidSpec{},
                                     plant::DamageState{}, quiet, 1);
    detail = "Re = " + std::to_string(rec.reynolds) + " (band [200, 2000])";
    return rec.reynolds >= 200.0 && rec.reynolds <= 2000.0;
}

}  // namespace

int main() {
    std::string detail;
    report_line(1, criterion1(detail), detail);
    report_line(2, criterion2(detail), detail);
    report_line(3, criterion3(detail), detail);
    report_line(4, criterion4(detail), detail);
    report_line(5, criterion5(detail), detail);
    const Protocol proto = criterion6();
    report_line(6, proto.pass, proto.detail);
    criterion7(proto);
    report_line(8, criterion8(detail), detail);
    return g_failures == 0 ? 0 : 1;
}

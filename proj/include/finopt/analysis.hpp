// Post-hoc analyses: PCA sensitivity of the converged basin, discrete
// Fourier decomposition of periodic traces, rotation of side-force records
// into the resultant (x*-y*) frame, angle-of-attack nesting, and
// classification of parameter adaptations against convergence thresholds.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "finopt/common.hpp"
#include "finopt/kinematics.hpp"
#include "finopt/plant.hpp"

namespace finopt::analysis {

struct SensitivityReport {
    Eigen::MatrixXd correlation;          // R = D^-1/2 C D^-1/2
    std::vector<double> eigenvalues;      // descending
    std::vector<double> scree;            // eigenvalue fractions, sum 1
    std::vector<double> radii;            // hyperellipsoid radius along axis i
    std::vector<double> normalized_radii; // radii / sqrt(lambda_1)
};

// PCA of the standardized covariance. The radius along parameter axis e_i of
// the unit-level ellipsoid {x : x^T R^-1 x = 1} is (e_i^T R^-1 e_i)^(-1/2);
// normalization by sqrt(lambda_1) puts the identity case at exactly 1.
inline SensitivityReport sensitivity(const Eigen::MatrixXd& covariance) {
    const Eigen::Index n = covariance.rows();
    if (covariance.cols() != n) throw NotPositiveDefinite("covariance not square");
    const Eigen::MatrixXd sym = 0.5 * (covariance + covariance.transpose());
    Eigen::VectorXd d_inv_sqrt(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (sym(i, i) <= 0.0)
            throw NotPositiveDefinite("non-positive diagonal entry");
        d_inv_sqrt(i) = 1.0 / std::sqrt(sym(i, i));
    }
    SensitivityReport report;
    report.correlation = d_inv_sqrt.asDiagonal() * sym * d_inv_sqrt.asDiagonal();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(report.correlation);
    if (eig.eigenvalues().minCoeff() <= 0.0)
        throw NotPositiveDefinite("correlation matrix has a non-positive eigenvalue");

    // SelfAdjointEigenSolver sorts ascending; report descending
    std::vector<double> lambdas(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        lambdas[static_cast<std::size_t>(i)] = eig.eigenvalues()(n - 1 - i);
    const double total = eig.eigenvalues().sum();
    report.eigenvalues = lambdas;
    for (double l : lambdas) report.scree.push_back(l / total);

    const Eigen::MatrixXd r_inv = report.correlation.inverse();
    const double sqrt_l1 = std::sqrt(lambdas.front());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = 1.0 / std::sqrt(r_inv(i, i));
        report.radii.push_back(r);
        report.normalized_radii.push_back(r / sqrt_l1);
    }
    return report;
}

struct FourierMode {
    int k = 0;
    double amplitude = 0.0;
    double phase_deg = 0.0;  // in (-180, 180]
};

struct FourierSpectrum {
    double mean = 0.0;  // k = 0 term
    std::vector<FourierMode> modes;
};

// First n_modes DFT modes of a uniformly sampled single period; amplitude
// 2|c_k|/N, phase arg(c_k).
inline FourierSpectrum fourier(const std::vector<double>& samples, int n_modes = 5) {
    const std::size_t n = samples.size();
    if (n < 2 * static_cast<std::size_t>(n_modes) + 1)
        throw NonUniformSampling("need at least 2*n_modes + 1 samples");
    FourierSpectrum spectrum;
    for (double v : samples) spectrum.mean += v;
    spectrum.mean /= static_cast<double>(n);
    for (int k = 1; k <= n_modes; ++k) {
        std::complex<double> c(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double angle = -kTwoPi * k * static_cast<double>(j) / static_cast<double>(n);
            c += samples[j] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        FourierMode mode;
        mode.k = k;
        mode.amplitude = 2.0 * std::abs(c) / static_cast<double>(n);
        double ph = rad2deg(std::arg(c));
        if (ph <= -180.0) ph += 360.0;
        mode.phase_deg = ph;
        spectrum.modes.push_back(mode);
    }
    return spectrum;
}

// Variant taking an explicit grid; rejects non-uniform spacing.
inline FourierSpectrum fourier(const std::vector<double>& grid,
                               const std::vector<double>& samples, int n_modes = 5) {
    if (grid.size() != samples.size() || grid.size() < 2)
        throw NonUniformSampling("grid/sample size mismatch");
    const double step = grid[1] - grid[0];
    for (std::size_t j = 1; j < grid.size(); ++j)
        if (std::abs(grid[j] - grid[j - 1] - step) > 1e-9 * std::max(1.0, std::abs(step)))
            throw NonUniformSampling("non-uniform sample grid");
    return fourier(samples, n_modes);
}

struct RotatedRecord {
    plant::CycleRecord record;   // force traces re-expressed in x*-y*
    double rotation_angle_deg = 0.0;  // rotation applied (lab -> resultant frame)
};

// Re-expresses each record in the frame where its mean planar force lies
// along +x*. The applied rotation is -atan2(Fy, Fx).
inline std::vector<RotatedRecord> rotate_to_resultant(
    const std::vector<plant::CycleRecord>& records) {
    std::vector<RotatedRecord> out;
    out.reserve(records.size());
    for (const auto& rec : records) {
        const double fx = rec.mean_force[0];
        const double fy = rec.mean_force[1];
        if (std::hypot(fx, fy) <= 1e-9)
            throw DegenerateForce("planar mean force magnitude below epsilon");
        const double heading = std::atan2(fy, fx);
        const double c = std::cos(-heading);
        const double s = std::sin(-heading);
        RotatedRecord rr;
        rr.rotation_angle_deg = rad2deg(-heading);
        rr.record = rec;
        rr.record.mean_force[0] = c * fx - s * fy;
        rr.record.mean_force[1] = s * fx + c * fy;
        const auto& x = rec.force_trace[0];
        const auto& y = rec.force_trace[1];
        for (std::size_t j = 0; j < x.size(); ++j) {
            rr.record.force_trace[0][j] = c * x[j] - s * y[j];
            rr.record.force_trace[1][j] = s * x[j] + c * y[j];
        }
        out.push_back(std::move(rr));
    }
    return out;
}

enum class PairOrder { Above, Below, Crossing };

struct NestingReport {
    // order[i][j]: relation of trace i to trace j (Above means
    // |aoa_i| >= |aoa_j| everywhere within tolerance; concentric traces
    // nest by envelope magnitude)
    std::vector<std::vector<PairOrder>> order;
    std::vector<std::size_t> chain;  // outermost first; empty if no total order
    bool total_order = false;
};

inline NestingReport nesting_order(const std::vector<std::vector<double>>& aoa_traces,
                                   double tolerance_deg = 0.5) {
    const std::size_t n = aoa_traces.size();
    NestingReport report;
    report.order.assign(n, std::vector<PairOrder>(n, PairOrder::Crossing));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            bool above = true;
            bool below = true;
            for (std::size_t g = 0; g < aoa_traces[i].size(); ++g) {
                const double diff =
                    std::abs(aoa_traces[i][g]) - std::abs(aoa_traces[j][g]);
                if (diff < -tolerance_deg) above = false;
                if (diff > tolerance_deg) below = false;
            }
            report.order[i][j] = above   ? PairOrder::Above
                                 : below ? PairOrder::Below
                                         : PairOrder::Crossing;
        }
    }
    // a total chain exists iff sorting by "number of traces below" is
    // consistent with every pairwise relation
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        std::size_t above_a = 0, above_b = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (report.order[a][j] == PairOrder::Above) ++above_a;
            if (report.order[b][j] == PairOrder::Above) ++above_b;
        }
        return above_a > above_b;
    });
    bool total = true;
    for (std::size_t i = 0; i + 1 < idx.size(); ++i)
        total = total && report.order[idx[i]][idx[i + 1]] == PairOrder::Above;
    if (total && n > 0) {
        report.total_order = true;
        report.chain = idx;
    }
    return report;
}

enum class Adaptation { Increase, Decrease, NoChange };

inline const char* to_string(Adaptation a) {
    switch (a) {
        case Adaptation::Increase: return "Increase";
        case Adaptation::Decrease: return "Decrease";
        case Adaptation::NoChange: return "NoChange";
    }
    return "NoChange";
}

// A parameter counts as changed only when it moved by strictly more than its
// convergence criterion.
inline std::array<Adaptation, kinematics::kNumParams> classify_adaptation(
    const kinematics::TrajectoryParams& intact,
    const kinematics::TrajectoryParams& adapted) {
    const auto a = intact.to_array();
    const auto b = adapted.to_array();
    const auto& bounds = kinematics::param_bounds();
    std::array<Adaptation, kinematics::kNumParams> result{};
    for (std::size_t i = 0; i < kinematics::kNumParams; ++i) {
        const double delta = b[i] - a[i];
        if (std::abs(delta) > bounds[i].convergence)
            result[i] = delta > 0 ? Adaptation::Increase : Adaptation::Decrease;
        else
            result[i] = Adaptation::NoChange;
    }
    return result;
}

}  // namespace finopt::analysis

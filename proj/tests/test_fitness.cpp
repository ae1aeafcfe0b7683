#include <gtest/gtest.h>

#include <cmath>

#include "finopt/fitness.hpp"

using finopt::DegenerateForce;
using finopt::fitness::FitnessValue;
using finopt::fitness::Objective;
using finopt::fitness::ObjectiveMode;
namespace plant = finopt::plant;

namespace {

plant::CycleRecord record_with(double fz, double fn, double fx = 0.0, double fy = 0.0) {
    plant::CycleRecord r;
    r.mean_force = {fx, fy, fz};
    r.mean_normal_force_mag = fn;
    r.n_runs = 3;
    return r;
}

}  // namespace

TEST(Fitness, PerfectCandidateIsZero) {
    const auto v = finopt::fitness::fitness(record_with(1.0, 1.0), Objective{});
    EXPECT_NEAR(v.f, 0.0, 1e-12);
    EXPECT_NEAR(v.closeness_term, 0.0, 1e-12);
    EXPECT_NEAR(v.efficiency_term, 0.0, 1e-12);
}

TEST(Fitness, HalfForceCase) {
    const auto v = finopt::fitness::fitness(record_with(0.5, 1.0), Objective{});
    EXPECT_NEAR(v.f, 0.5, 1e-12);
    EXPECT_NEAR(v.closeness_term, 0.5, 1e-12);
    EXPECT_NEAR(v.efficiency_term, 0.5, 1e-12);
}

// Hand oracle for the signed-force convention: closeness uses |F|, the
// efficiency ratio keeps the sign.
TEST(Fitness, ReversedThrustKeepsSignInEfficiencyTerm) {
    const auto v = finopt::fitness::fitness(record_with(-0.3, 1.0), Objective{});
    EXPECT_NEAR(v.closeness_term, 0.7, 1e-12);
    EXPECT_NEAR(v.efficiency_term, 1.3, 1e-12);
    EXPECT_NEAR(v.f, 0.8 * 0.7 + 0.2 * 1.3, 1e-12);
    EXPECT_NEAR(v.f, 0.82, 1e-12);
}

TEST(Fitness, SideForceUsesPlanarResultant) {
    Objective obj;
    obj.mode = ObjectiveMode::SideForce;
    const auto v = finopt::fitness::fitness(record_with(0.4, 1.0, 0.6, 0.8), obj);
    EXPECT_NEAR(v.force_used, 1.0, 1e-12);  // hypot(0.6, 0.8)
    EXPECT_NEAR(v.f, 0.0, 1e-12);
}

TEST(Fitness, ZeroAtTargetForAnyTarget) {
    for (double target : {0.2, 1.0, 3.5}) {
        Objective obj;
        obj.f_target = target;
        const auto v = finopt::fitness::fitness(record_with(target, target), obj);
        EXPECT_NEAR(v.f, 0.0, 1e-12);
    }
}

TEST(Fitness, DegenerateNormalForceThrows) {
    EXPECT_THROW(finopt::fitness::fitness(record_with(0.5, 0.0), Objective{}), DegenerateForce);
    EXPECT_THROW(finopt::fitness::fitness(record_with(0.5, 5e-10), Objective{}), DegenerateForce);
}

TEST(Fitness, WeightsDecomposeExactly) {
    const auto v = finopt::fitness::fitness(record_with(0.77, 1.3), Objective{});
    EXPECT_EQ(v.f, 0.8 * v.closeness_term + 0.2 * v.efficiency_term);
}

// Converged-optima cross-check: for each (closeness, fitness) pair the
// residual f - 0.8*|closeness| must lie in the efficiency term's range
// [0, 0.2] for |F/Fn| in [0, 1].
TEST(Fitness, ConvergedOptimaResidualInEfficiencyRange) {
    const double rows[12][2] = {
        {0.0029, 0.1157}, {0.0130, 0.1088}, {0.0067, 0.0920},
        {0.0032, 0.1049}, {0.0085, 0.0879}, {0.0016, 0.0810},
        {-0.0062, 0.0087}, {-0.1618, 0.1633}, {-0.0091, 0.0854},
        {-0.0027, 0.0933}, {-0.0189, 0.1059}, {0.0198, 0.0408}};
    for (const auto& row : rows) {
        const double residual = row[1] - 0.8 * std::abs(row[0]);
        EXPECT_GE(residual, 0.0);
        EXPECT_LE(residual, 0.2);
    }
}

TEST(Fitness, PiecewiseLinearWithMinimumAtTarget) {
    // hold Fn fixed and large so F/Fn stays below 1
    const double fn = 10.0;
    double prev = 1e300;
    for (double f = 0.1; f <= 1.0; f += 0.05) {
        const double v = finopt::fitness::fitness(record_with(f, fn), Objective{}).f;
        EXPECT_LT(v, prev);
        prev = v;
    }
    prev = -1e300;
    for (double f = 1.05; f <= 2.0; f += 0.05) {
        const double v = finopt::fitness::fitness(record_with(f, fn), Objective{}).f;
        EXPECT_GT(v, prev);
        prev = v;
    }
}

// Fitness of a candidate trajectory: weighted sum of closeness to the force
// setpoint and geometric efficiency,
//   f = 0.8 * |F_target - |F|| / F_target + 0.2 * |1 - F / F_n|
// where F is the cycle-averaged thrust (Fz) or planar resultant magnitude,
// and F_n the cycle-mean magnitude of the fin-normal force. Lower is better.
#pragma once

#include <cmath>

#include "finopt/common.hpp"
#include "finopt/plant.hpp"

namespace finopt::fitness {

enum class ObjectiveMode { Thrust, SideForce };

struct Objective {
    ObjectiveMode mode = ObjectiveMode::Thrust;
    double f_target = 1.0;  // N
};

struct FitnessValue {
    double f = 0.0;
    double closeness_term = 0.0;   // |F_target - |F|| / F_target
    double efficiency_term = 0.0;  // |1 - F / F_n|
    double force_used = 0.0;       // N, signed F fed to the efficiency term
    double normal_force_used = 0.0;  // N
};

inline constexpr double kNormalForceEpsilon = 1e-9;  // N

inline FitnessValue fitness(const plant::CycleRecord& record,
                            const Objective& objective) {
    const double fn = record.mean_normal_force_mag;
    if (fn <= kNormalForceEpsilon) {
        throw DegenerateForce("normal force magnitude below epsilon; "
                              "efficiency ratio undefined");
    }
    double force = 0.0;
    switch (objective.mode) {
        case ObjectiveMode::Thrust:
            force = record.mean_force[2];
            break;
        case ObjectiveMode::SideForce:
            force = std::hypot(record.mean_force[0], record.mean_force[1]);
            break;
    }
    FitnessValue v;
    v.force_used = force;
    v.normal_force_used = fn;
    v.closeness_term = std::abs(objective.f_target - std::abs(force)) / objective.f_target;
    v.efficiency_term = std::abs(1.0 - force / fn);
    v.f = 0.8 * v.closeness_term + 0.2 * v.efficiency_term;
    return v;
}

}  // namespace finopt::fitness

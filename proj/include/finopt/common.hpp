// Shared constants, error types, and small numeric helpers.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace finopt {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Wraps an angle in degrees to (-180, 180].
inline double wrap_deg(double d) {
    d = std::fmod(d + 180.0, 360.0);
    if (d <= 0.0) d += 360.0;
    return d - 180.0;
}

// Wraps an angle in radians to [0, 2*pi).
inline double wrap_2pi(double r) {
    r = std::fmod(r, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateTrajectory : Error { using Error::Error; };
struct DegenerateForce : Error { using Error::Error; };
struct OutOfBounds : Error { using Error::Error; };
struct AllCandidatesFailed : Error { using Error::Error; };
struct MissingSnapshot : Error { using Error::Error; };
struct SchemaMismatch : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct NonUniformSampling : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// splitmix64; used to derive independent noise substreams from
// (seed, generation, candidate, run) tuples so results do not depend
// on evaluation order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b));
}

}  // namespace finopt

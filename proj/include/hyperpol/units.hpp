// units.hpp - unit conventions and physical constants.
//
// Every frequency handled by the library is angular (rad/s). Cyclic values
// (Hz) only appear at the configuration boundary and in the pair Hamiltonian,
// which is conventionally tabulated in Hz.

#pragma once

#include <numbers>

namespace hyperpol {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Cyclic frequency (Hz) to angular frequency (rad/s).
constexpr double angular_from_hz(double hz) { return kTwoPi * hz; }
/// Angular frequency (rad/s) to cyclic frequency (Hz).
constexpr double hz_from_angular(double rad_per_s) { return rad_per_s / kTwoPi; }

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

namespace constants {

// gamma / 2pi from standard tables, in Hz/T.
inline constexpr double kGammaProtonHzPerT = 42.577e6;
inline constexpr double kGammaCarbon13HzPerT = 10.708e6;
inline constexpr double kGammaElectronHzPerT = 28.024e9;

}  // namespace constants

}  // namespace hyperpol

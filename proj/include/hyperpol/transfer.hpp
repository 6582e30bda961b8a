// transfer.hpp - steady-state nuclear polarization transfer from a driven
// electron spin, and the corresponding transfer rate.

#pragma once

#include <string_view>

#include "hyperpol/spectral.hpp"

namespace hyperpol::transfer {

/// Microwave drive: Rabi frequency and detuning, both rad/s.
class DriveSpec {
 public:
  /// Throws std::invalid_argument unless rabi > 0 and detuning is finite.
  DriveSpec(double rabi, double detuning);

  double rabi() const noexcept { return rabi_; }
  double detuning() const noexcept { return detuning_; }
  /// C0 = 2 cot(phi) = 2 eps / Omega, recomputed on every call.
  double c0_drive() const noexcept { return 2.0 * detuning_ / rabi_; }
  /// Same drive with a different detuning (orientation-dependent detuning).
  DriveSpec with_detuning(double detuning) const { return {rabi_, detuning}; }

 private:
  double rabi_;
  double detuning_;
};

enum class Species { C13, H1 };

std::string_view to_string(Species s);

/// A nuclear species with its gyromagnetic ratio in rad/(s T).
struct NuclearSpecies {
  Species label;
  double gamma;

  double larmor(double field_tesla) const { return gamma * field_tesla; }
};

/// Species with table gyromagnetic ratios.
NuclearSpecies proton();
NuclearSpecies carbon13();

/// Denominator variant of the steady-state expression.
///  - AsWritten: J(w0) + C0 J(wi) + J(w0)
///  - Corrected: J(w0) + C0 J(wi) + J(w2)
enum class DenominatorMode { AsWritten, Corrected };

std::string_view to_string(DenominatorMode m);
/// Accepts "as_written" / "corrected"; throws std::invalid_argument otherwise.
DenominatorMode parse_denominator_mode(std::string_view token);

struct TransferFrequencies {
  double omega_e;  ///< dressed electron frequency
  double omega_0;  ///< omega_e - omega_i, may be negative
  double omega_2;  ///< omega_e + omega_i
};

/// sqrt(eps^2 + Omega^2).
double dressed_electron_frequency(const DriveSpec& drive);

TransferFrequencies transfer_frequencies(const DriveSpec& drive, double omega_nuclear);

/// P_s = -(j0 - j2) / (j0 + c0 j_mid + last), last = j0 or j2 per mode.
/// Throws std::invalid_argument for J outside (0, 1], NaN, or c0 < 0.
double steady_state_polarization(double j0, double j2, double j_mid, double c0,
                                 DenominatorMode mode);

/// Steady-state polarization of one species at field B for the given drive.
/// J is evaluated at |omega_0| since the spectral density is even in omega.
double species_polarization(const NuclearSpecies& species, double field_tesla,
                            const DriveSpec& drive, spectral::CorrelationTime tau_c,
                            DenominatorMode mode);

/// W = c0_rate (j0 - j2), in 1/s. Throws for c0_rate < 0.
double transfer_rate(double j0, double j2, double c0_rate);

/// Spectral-density difference J(|w0|) - J(w2) for one species; the
/// rate-constant-free factor of the transfer rate.
double spectral_difference(const NuclearSpecies& species, double field_tesla,
                           const DriveSpec& drive, spectral::CorrelationTime tau_c);

}  // namespace hyperpol::transfer

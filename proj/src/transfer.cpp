#include "hyperpol/transfer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hyperpol/units.hpp"

namespace hyperpol::transfer {

DriveSpec::DriveSpec(double rabi, double detuning) : rabi_(rabi), detuning_(detuning) {
  if (!std::isfinite(rabi) || rabi <= 0.0) {
    throw std::invalid_argument("drive: Rabi frequency must be finite and > 0");
  }
  if (!std::isfinite(detuning)) {
    throw std::invalid_argument("drive: detuning must be finite");
  }
}

std::string_view to_string(Species s) { return s == Species::H1 ? "H1" : "C13"; }

NuclearSpecies proton() {
  return {Species::H1, angular_from_hz(constants::kGammaProtonHzPerT)};
}

NuclearSpecies carbon13() {
  return {Species::C13, angular_from_hz(constants::kGammaCarbon13HzPerT)};
}

std::string_view to_string(DenominatorMode m) {
  return m == DenominatorMode::AsWritten ? "as_written" : "corrected";
}

DenominatorMode parse_denominator_mode(std::string_view token) {
  if (token == "as_written") return DenominatorMode::AsWritten;
  if (token == "corrected") return DenominatorMode::Corrected;
  throw std::invalid_argument("unknown denominator mode '" + std::string(token) +
                              "' (expected as_written or corrected)");
}

double dressed_electron_frequency(const DriveSpec& drive) {
  return std::hypot(drive.detuning(), drive.rabi());
}

TransferFrequencies transfer_frequencies(const DriveSpec& drive, double omega_nuclear) {
  const double we = dressed_electron_frequency(drive);
  return {we, we - omega_nuclear, we + omega_nuclear};
}

namespace {

void check_spectral_value(double j, const char* name) {
  if (!(j > 0.0 && j <= 1.0)) {
    throw std::invalid_argument(std::string("steady-state polarization: ") + name +
                                " must lie in (0, 1]");
  }
}

}  // namespace

double steady_state_polarization(double j0, double j2, double j_mid, double c0,
                                 DenominatorMode mode) {
  check_spectral_value(j0, "j0");
  check_spectral_value(j2, "j2");
  // j_mid may underflow to 0 at huge xi; it only enters multiplied by c0.
  if (!(j_mid >= 0.0 && j_mid <= 1.0)) {
    throw std::invalid_argument("steady-state polarization: j_mid must lie in [0, 1]");
  }
  if (!(c0 >= 0.0) || !std::isfinite(c0)) {
    throw std::invalid_argument("steady-state polarization: c0 must be finite and >= 0");
  }
  const double last = mode == DenominatorMode::AsWritten ? j0 : j2;
  return -(j0 - j2) / (j0 + c0 * j_mid + last);
}

namespace {

struct SpectralTriple {
  double j0, j2, j_mid;
};

SpectralTriple spectral_triple(const NuclearSpecies& species, double field_tesla,
                               const DriveSpec& drive, spectral::CorrelationTime tau_c) {
  if (!std::isfinite(field_tesla) || field_tesla <= 0.0) {
    throw std::invalid_argument("field must be finite and > 0");
  }
  const double wi = species.larmor(field_tesla);
  const auto f = transfer_frequencies(drive, wi);
  return {spectral::spectral_density(std::abs(f.omega_0), tau_c),
          spectral::spectral_density(f.omega_2, tau_c), spectral::spectral_density(wi, tau_c)};
}

}  // namespace

double species_polarization(const NuclearSpecies& species, double field_tesla,
                            const DriveSpec& drive, spectral::CorrelationTime tau_c,
                            DenominatorMode mode) {
  const auto j = spectral_triple(species, field_tesla, drive, tau_c);
  return steady_state_polarization(j.j0, j.j2, j.j_mid, drive.c0_drive(), mode);
}

double transfer_rate(double j0, double j2, double c0_rate) {
  if (!(c0_rate >= 0.0) || !std::isfinite(c0_rate)) {
    throw std::invalid_argument("transfer rate: c0 must be finite and >= 0");
  }
  return c0_rate * (j0 - j2);
}

double spectral_difference(const NuclearSpecies& species, double field_tesla,
                           const DriveSpec& drive, spectral::CorrelationTime tau_c) {
  const auto j = spectral_triple(species, field_tesla, drive, tau_c);
  return j.j0 - j.j2;
}

}  // namespace hyperpol::transfer

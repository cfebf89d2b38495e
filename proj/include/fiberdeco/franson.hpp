#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

#include "fiberdeco/constants.hpp"

namespace fiberdeco {

/// Chromatic dispersion about the zero-dispersion wavelength: D(lambda) =
/// slope * (lambda - lambda0), hence a relative group delay quadratic in
/// lambda with its minimum (0) at lambda0. Valid within +-validity_halfwidth
/// of lambda0.
struct DispersionProfile {
  double lambda0 = 1310e-9;                   // m
  double slope = 0.092 * units::ps_per_nm2_km;  // s/m^3 (S0)
  double length = 0.0;                        // m
  double validity_halfwidth = 60e-9;          // m

  void validate() const;
};

/// (slope/2) (lambda - lambda0)^2 length; throws outside the validity band.
double group_delay(double lambda, const DispersionProfile& profile);

/// Spectral phase whose derivative d(phase)/d(omega) equals group_delay,
/// integrated in closed form and referenced to zero at lambda0.
double dispersion_phase(double omega, const DispersionProfile& profile);

/// lambda2 such that omega1 + omega2 = pump_omega (exact in frequency; no
/// wavelength-sum shortcut).
double conjugate_wavelength(double lambda1, double pump_omega);

/// Frequency-anticorrelated photon pair from a monochromatic pump:
/// omega_1,2 = pump/2 +- detuning. Weights are the normalized joint spectral
/// density (quadrature included, sum == 1).
struct BiphotonEnsemble {
  enum class Shape { gaussian, rectangular, custom };

  double pump_omega = 0.0;     // rad/s
  Eigen::ArrayXd detuning;     // rad/s, strictly increasing, symmetric
  Eigen::ArrayXd weight;       // sums to 1
  double center_wavelength = 0.0;  // m, degenerate wavelength 2*2*pi*c/pump
  double half_width = 0.0;     // m, quoted +- spectral extent (2 sigma)
  Shape shape = Shape::custom;
  double span_sigmas = 4.0;

  void validate() const;
  /// Weighted RMS detuning.
  double detuning_rms() const;
};

/// The quoted half_width (e.g. "+-35 nm") is mapped to 2 sigma of a gaussian
/// in exact angular detuning; the grid spans +-span_sigmas * sigma.
BiphotonEnsemble make_biphoton_ensemble(
    double pump_omega, double half_width, int n_samples = 2049,
    double span_sigmas = 4.0,
    BiphotonEnsemble::Shape shape = BiphotonEnsemble::Shape::gaussian);

/// Two unbalanced analysis interferometers with equal imbalance, phases on
/// the long arms, per-arm fiber dispersion before the analyzers, and a
/// coincidence gate |t_A - t_B| <= coincidence_window.
struct FransonConfig {
  double arm_imbalance = 1.2e-9;       // s, must exceed the window
  double phase_a = 0.0;                // rad
  double phase_b = 0.0;                // rad
  double coincidence_window = 300e-12; // s, accepted |t_A - t_B|
  DispersionProfile arm_a;
  DispersionProfile arm_b;
  int n_phase_steps = 32;
  // Pair-correlation smearing kernel RMS; < 0 derives 1/(2 sigma_Omega) from
  // the ensemble.
  double pair_smearing_rms = -1.0;
  // Start the phase sweep at the operating point where cos(phi_A + phi_B +
  // omega_p dT) = 1 so the curve samples its true extrema.
  bool align_sweep = true;

  void validate() const;
};

struct CoincidenceResult {
  double rate = 0.0;  // at the configured (phase_a, phase_b), in [0, 1]
  std::vector<std::pair<double, double>> curve;  // (phi_A + phi_B, rate)
  double visibility = 0.0;
  bool converged = true;
  std::vector<std::string> warnings;
};

/// Fraction of a unit-mass gaussian kernel (RMS sigma) centered at dt that
/// falls inside |t| <= window. Even in dt, bit-exactly.
double window_overlap(double dt, double window, double sigma);

/// Second-order coincidence fringe. Per detuning sample the short-short and
/// long-long amplitudes interfere with total phase phi_A + phi_B +
/// omega_p * dT; events enter with the fractional window overlap of their
/// arrival-time difference T_A(lambda1) - T_B(lambda2), and different-arm
/// events enter (phase-insensitively) through the overlaps at +-arm_imbalance
/// offset. Sweeps phi_A + phi_B over [0, 2 pi) to extract the visibility.
CoincidenceResult coincidence_rate(const BiphotonEnsemble& ensemble,
                                   const FransonConfig& config);

/// (max - min) / (max + min); 0 for an all-zero curve.
double visibility(const std::vector<std::pair<double, double>>& curve);

struct ChshResult {
  double s_value = 0.0;
  bool violated = false;
};

/// Visibility threshold for a CHSH violation, 1/sqrt(2).
inline constexpr double bell_visibility_threshold = std::numbers::sqrt2 / 2.0;

/// S = 2 sqrt(2) V; violated iff V > 1/sqrt(2) (boundary exclusive).
ChshResult chsh_check(double visibility);

}  // namespace fiberdeco

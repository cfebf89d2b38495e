#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fiberdeco/fiber.hpp"
#include "fiberdeco/spectral.hpp"

namespace fiberdeco {

/// Scanned two-arm interferometer trace: detected intensity versus arm
/// imbalance (Michelson mirror displacement d maps to delay 2 d / c).
struct Interferogram {
  Eigen::ArrayXd delay;      // s, strictly increasing, symmetric about 0
  Eigen::ArrayXd intensity;  // arbitrary units, >= 0

  // Provenance of the trace.
  SourceSpectrum source;
  std::string fiber_id;
  Jonesd polarizer = Jonesd(1.0, 0.0);
  bool scan_too_narrow = false;  // envelope support appears to exceed the grid

  double center_omega() const { return source.center_omega(); }
  void validate() const;
};

/// Uniform symmetric delay grid covering +-half_span.
Eigen::ArrayXd make_delay_grid(double half_span, double step);

/// Default scan per the instrument conventions: step tau_c/8, span
/// +-(6 expected_dgd + 6 tau_c).
Eigen::ArrayXd default_scan(const SourceSpectrum& spectrum, double expected_dgd);

/// I(tau) = sum_i w_i S_i |<p|U(omega_i)|psi0>|^2 (1 + cos omega_i tau).
/// The launch state defaults to the analyzing polarizer axis.
Interferogram synthesize_interferogram(const FiberSpec& fiber,
                                       const SourceSpectrum& spectrum,
                                       const Jonesd& polarizer,
                                       const Eigen::ArrayXd& delays,
                                       int n_spectral_samples = 512,
                                       double span = 3.0,
                                       std::optional<Jonesd> launch = std::nullopt,
                                       double noise_rms = 0.0,
                                       std::uint64_t noise_seed = 0);

/// Fringe envelope via quadrature demodulation at the optical center
/// frequency followed by an FFT low-pass (cutoff = lowpass_fraction of the
/// sampling rate, raised-cosine rolloff from 80%).
Eigen::ArrayXd fringe_envelope(const Interferogram& gram,
                               double lowpass_fraction = 0.25);

struct PmdEstimatorConfig {
  // Second-moment conventions (industry practice; both constants are
  // conventions, not physics):
  //  - strong mode coupling: dgd_rms = sqrt(3/4) * sigma_env
  //  - negligible coupling (e.g. a single trunk): dgd = sigma_env directly
  double moment_factor = std::sqrt(3.0 / 4.0);
  double exclusion_sigmas = 3.0;  // central-peak exclusion, |tau| < k*source_rms
  double min_satellite_fraction = 0.01;  // below this the trace reads as DGD 0
  double min_snr = 3.0;
  double lowpass_fraction = 0.25;

  static PmdEstimatorConfig strong_coupling() { return {}; }
  static PmdEstimatorConfig weak_coupling() {
    PmdEstimatorConfig c;
    c.moment_factor = 1.0;
    return c;
  }
};

struct PmdEstimate {
  double delay = 0.0;         // s
  double coefficient = 0.0;   // s/sqrt(m); 0 when no fiber length was given
  double envelope_rms = 0.0;  // s
  std::string method = "second-moment";
  std::vector<std::string> warnings;
};

class PmdEstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Second-moment PMD estimate: envelope -> central-peak exclusion ->
/// delay = moment_factor * sqrt(max(0, sigma_env^2 - source_rms^2)).
/// fiber_length > 0 additionally fills in the coefficient.
PmdEstimate estimate_pmd(const Interferogram& gram, double source_rms,
                         const PmdEstimatorConfig& config = {},
                         double fiber_length = 0.0);

/// delay / sqrt(length); report in ps/sqrt(km) via units::ps_per_sqrt_km.
double pmd_coefficient(double delay, double length);

/// CSV columns: delay_s, displacement_um, intensity.
void write_csv(const Interferogram& gram, std::ostream& os);

}  // namespace fiberdeco

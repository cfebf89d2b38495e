#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

#include "fiberdeco/constants.hpp"
#include "fiberdeco/polarization.hpp"

namespace fiberdeco {

/// Frequency quadrature grid: strictly increasing angular frequencies plus
/// trapezoidal weights. A single-sample grid has weight 1 (monochromatic).
struct SpectralGrid {
  Eigen::ArrayXd omega;   // rad/s
  Eigen::ArrayXd weight;  // rad/s (quadrature measure), or 1 for n = 1

  static SpectralGrid uniform(double omega_lo, double omega_hi, int n_samples);
  void validate() const;
  Eigen::Index size() const { return omega.size(); }
};

struct SourceSpectrum {
  enum class Shape { gaussian, rectangular };

  Shape shape = Shape::gaussian;
  double center_wavelength = 1550e-9;  // m
  double width = 66e-9;  // m; FWHM (gaussian) or full width (rectangular);
                         // width 0 means monochromatic

  void validate() const;
  double center_omega() const { return omega_from_wavelength(center_wavelength); }
  /// Width mapped to angular frequency via |domega/dlambda| = 2 pi c / lambda^2.
  double width_omega() const;
  /// FWHM in ordinary frequency (Hz).
  double width_nu() const { return width_omega() / two_pi; }
};

/// Coherence time tau_c = 0.441/dnu (gaussian FWHM time-bandwidth product);
/// equals the half width at half maximum of the interferogram envelope.
double coherence_time(const SourceSpectrum& spectrum);

/// RMS half-width of the field-autocorrelation envelope |gamma(tau)|,
/// sqrt(2 ln2) / (pi dnu) for a gaussian density.
double coherence_rms(const SourceSpectrum& spectrum);

/// A broadband single photon: per-frequency unit Jones vectors plus a
/// normalized spectral density (sum of weight*density == 1).
struct SpectralState {
  SpectralGrid grid;
  std::vector<Jonesd> field;
  Eigen::ArrayXd density;

  void validate() const;
};

/// Samples the source density on a uniform grid spanning +-span*width around
/// the center and polarizes every component identically. n_samples must be 1
/// (monochromatic) or >= 3; width 0 collapses to a single sample.
SpectralState make_spectral_state(const SourceSpectrum& spectrum,
                                  const Jonesd& polarization,
                                  int n_samples = 512, double span = 3.0);

/// Spectrally averaged Poincaré vector, M = sum_i w_i d_i m(omega_i).
Stokesd mean_polarization(const SpectralState& state);

/// |mean_polarization|, clamped to [0, 1]. Exceedances above 1e-9 are logged.
double degree_of_polarization(const SpectralState& state);

/// CSV columns: omega_rad_s, density, re_a, im_a, re_b, im_b.
void write_csv(const SpectralState& state, std::ostream& os);

}  // namespace fiberdeco

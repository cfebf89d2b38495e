#include "fiberdeco/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <ostream>
#include <stdexcept>

namespace fiberdeco {

SpectralGrid SpectralGrid::uniform(double omega_lo, double omega_hi, int n_samples) {
  if (n_samples == 1) {
    SpectralGrid g;
    g.omega = Eigen::ArrayXd::Constant(1, 0.5 * (omega_lo + omega_hi));
    g.weight = Eigen::ArrayXd::Constant(1, 1.0);
    return g;
  }
  if (n_samples < 3)
    throw std::invalid_argument("spectral grid needs 1 or >= 3 samples");
  if (!(omega_lo > 0.0) || !(omega_hi > omega_lo))
    throw std::invalid_argument("spectral grid bounds must satisfy 0 < lo < hi");
  SpectralGrid g;
  g.omega = Eigen::ArrayXd::LinSpaced(n_samples, omega_lo, omega_hi);
  const double step = (omega_hi - omega_lo) / (n_samples - 1);
  g.weight = Eigen::ArrayXd::Constant(n_samples, step);
  g.weight(0) = 0.5 * step;
  g.weight(n_samples - 1) = 0.5 * step;
  return g;
}

void SpectralGrid::validate() const {
  if (omega.size() == 0) throw std::invalid_argument("empty spectral grid");
  if (omega.size() != weight.size())
    throw std::invalid_argument("spectral grid omega/weight size mismatch");
  for (Eigen::Index i = 0; i < omega.size(); ++i) {
    if (!(omega(i) > 0.0)) throw std::invalid_argument("frequencies must be > 0");
    if (i > 0 && !(omega(i) > omega(i - 1)))
      throw std::invalid_argument("frequencies must be strictly increasing");
    if (!(weight(i) >= 0.0)) throw std::invalid_argument("weights must be >= 0");
  }
}

void SourceSpectrum::validate() const {
  if (!(center_wavelength > 0.0))
    throw std::invalid_argument("spectrum center wavelength must be > 0");
  if (!(width >= 0.0) || width >= center_wavelength)
    throw std::invalid_argument("spectrum width must satisfy 0 <= width < center");
}

double SourceSpectrum::width_omega() const {
  return two_pi * speed_of_light * width / (center_wavelength * center_wavelength);
}

double coherence_time(const SourceSpectrum& spectrum) {
  spectrum.validate();
  if (spectrum.width == 0.0) return std::numeric_limits<double>::infinity();
  return gaussian_time_bandwidth / spectrum.width_nu();
}

double coherence_rms(const SourceSpectrum& spectrum) {
  spectrum.validate();
  if (spectrum.width == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(2.0 * std::numbers::ln2) / (pi * spectrum.width_nu());
}

void SpectralState::validate() const {
  grid.validate();
  if (static_cast<Eigen::Index>(field.size()) != grid.size() ||
      density.size() != grid.size())
    throw std::invalid_argument("spectral state arrays must match the grid");
  for (Eigen::Index i = 0; i < density.size(); ++i)
    if (!(density(i) >= 0.0))
      throw std::invalid_argument("spectral density must be >= 0");
  const double total = (grid.weight * density).sum();
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("spectral density must integrate to 1");
}

SpectralState make_spectral_state(const SourceSpectrum& spectrum,
                                  const Jonesd& polarization, int n_samples,
                                  double span) {
  spectrum.validate();
  if (!(span > 0.0)) throw std::invalid_argument("span must be > 0");
  const double nrm = polarization.norm();
  if (!(nrm > 0.0)) throw std::domain_error("null Jones vector");
  const Jonesd pol = polarization / nrm;

  SpectralState state;
  const double omega_c = spectrum.center_omega();
  if (spectrum.width == 0.0 || n_samples == 1) {
    state.grid = SpectralGrid::uniform(omega_c, omega_c, 1);
    state.density = Eigen::ArrayXd::Constant(1, 1.0);
    state.field.assign(1, pol);
    return state;
  }

  const double half_span = span * spectrum.width_omega();
  const double lo = std::max(omega_c - half_span, 1e-6 * omega_c);
  state.grid = SpectralGrid::uniform(lo, omega_c + half_span, n_samples);

  const Eigen::ArrayXd detuning = state.grid.omega - omega_c;
  switch (spectrum.shape) {
    case SourceSpectrum::Shape::gaussian: {
      const double fwhm = spectrum.width_omega();
      state.density =
          (-4.0 * std::numbers::ln2 * (detuning / fwhm).square()).exp();
      break;
    }
    case SourceSpectrum::Shape::rectangular: {
      const double half = 0.5 * spectrum.width_omega();
      state.density = (detuning.abs() <= half).cast<double>();
      break;
    }
  }
  const double total = (state.grid.weight * state.density).sum();
  if (!(total > 0.0))
    throw std::invalid_argument("spectral density vanishes on the grid");
  state.density /= total;
  state.field.assign(static_cast<std::size_t>(n_samples), pol);
  return state;
}

Stokesd mean_polarization(const SpectralState& state) {
  state.validate();
  Stokesd m = Stokesd::Zero();
  for (Eigen::Index i = 0; i < state.grid.size(); ++i)
    m += state.grid.weight(i) * state.density(i) *
         poincare_from_jones(state.field[static_cast<std::size_t>(i)]);
  return m;
}

double degree_of_polarization(const SpectralState& state) {
  const double dop = mean_polarization(state).norm();
  if (dop > 1.0 + 1e-9)
    std::cerr << "fiberdeco: degree of polarization " << dop
              << " exceeds 1, clamping\n";
  return std::clamp(dop, 0.0, 1.0);
}

void write_csv(const SpectralState& state, std::ostream& os) {
  os << "omega_rad_s,density,re_a,im_a,re_b,im_b\n";
  char buf[192];
  for (Eigen::Index i = 0; i < state.grid.size(); ++i) {
    const Jonesd& f = state.field[static_cast<std::size_t>(i)];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  state.grid.omega(i), state.density(i), f(0).real(),
                  f(0).imag(), f(1).real(), f(1).imag());
    os << buf;
  }
}

}  // namespace fiberdeco

#include "fiberdeco/pmd.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <complex>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "fiberdeco/random.hpp"

namespace fiberdeco {

void Interferogram::validate() const {
  if (delay.size() < 3) throw std::invalid_argument("interferogram too short");
  if (delay.size() != intensity.size())
    throw std::invalid_argument("interferogram delay/intensity size mismatch");
  for (Eigen::Index i = 1; i < delay.size(); ++i)
    if (!(delay(i) > delay(i - 1)))
      throw std::invalid_argument("interferogram delays must be strictly increasing");
  const double span_tol = 1e-6 * (delay(delay.size() - 1) - delay(0));
  if (std::abs(delay(0) + delay(delay.size() - 1)) > span_tol)
    throw std::invalid_argument("interferogram delays must be symmetric about 0");
  for (Eigen::Index i = 0; i < intensity.size(); ++i)
    if (!(intensity(i) >= 0.0))
      throw std::invalid_argument("interferogram intensity must be >= 0");
}

Eigen::ArrayXd make_delay_grid(double half_span, double step) {
  if (!(half_span > 0.0) || !(step > 0.0))
    throw std::invalid_argument("delay grid needs positive span and step");
  const auto half_n = static_cast<Eigen::Index>(std::ceil(half_span / step));
  const Eigen::Index n = 2 * half_n + 1;
  Eigen::ArrayXd delays(n);
  for (Eigen::Index i = 0; i < n; ++i)
    delays(i) = static_cast<double>(i - half_n) * step;
  return delays;
}

Eigen::ArrayXd default_scan(const SourceSpectrum& spectrum, double expected_dgd) {
  const double tau_c = coherence_time(spectrum);
  return make_delay_grid(6.0 * expected_dgd + 6.0 * tau_c, tau_c / 8.0);
}

Interferogram synthesize_interferogram(const FiberSpec& fiber,
                                       const SourceSpectrum& spectrum,
                                       const Jonesd& polarizer,
                                       const Eigen::ArrayXd& delays,
                                       int n_spectral_samples, double span,
                                       std::optional<Jonesd> launch,
                                       double noise_rms,
                                       std::uint64_t noise_seed) {
  const Jonesd launch_state = launch.value_or(polarizer);
  const SpectralState state =
      make_spectral_state(spectrum, launch_state, n_spectral_samples, span);
  const double pol_norm = polarizer.norm();
  if (!(pol_norm > 0.0)) throw std::domain_error("null polarizer state");
  const Jonesd p = polarizer / pol_norm;

  // Polarizer-projected spectral density.
  const std::vector<JonesOpd> u = fiber_jones_matrices(fiber, state.grid);
  const Eigen::Index n = state.grid.size();
  Eigen::ArrayXd c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> amp =
        p.dot(u[static_cast<std::size_t>(i)] * state.field[static_cast<std::size_t>(i)]);
    c(i) = state.grid.weight(i) * state.density(i) * std::norm(amp);
  }

  Interferogram gram;
  gram.delay = delays;
  gram.intensity = Eigen::ArrayXd::Zero(delays.size());
  for (Eigen::Index j = 0; j < delays.size(); ++j) {
    const double tau = delays(j);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      acc += c(i) * (1.0 + std::cos(state.grid.omega(i) * tau));
    gram.intensity(j) = acc;
  }
  if (noise_rms > 0.0) {
    Rng rng(noise_seed);
    for (Eigen::Index j = 0; j < delays.size(); ++j)
      gram.intensity(j) = std::max(0.0, gram.intensity(j) + noise_rms * rng.normal());
  }
  gram.source = spectrum;
  gram.polarizer = p;
  gram.validate();

  // Flag scans whose fringe envelope has not decayed at the grid edges.
  const Eigen::ArrayXd env = fringe_envelope(gram);
  const Eigen::Index edge = std::max<Eigen::Index>(1, env.size() / 20);
  const double edge_level =
      std::max(env.head(edge).maxCoeff(), env.tail(edge).maxCoeff());
  if (edge_level > 0.05 * env.maxCoeff() + noise_rms) gram.scan_too_narrow = true;
  return gram;
}

Eigen::ArrayXd fringe_envelope(const Interferogram& gram, double lowpass_fraction) {
  gram.validate();
  const Eigen::Index n = gram.delay.size();
  const double step = gram.delay(1) - gram.delay(0);
  for (Eigen::Index i = 1; i < n; ++i)
    if (std::abs((gram.delay(i) - gram.delay(i - 1)) - step) > 1e-9 * step)
      throw std::invalid_argument("fringe_envelope needs a uniform delay grid");

  const double mean = gram.intensity.mean();
  const double omega0 = gram.center_omega();
  std::vector<std::complex<double>> z(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    z[static_cast<std::size_t>(i)] =
        (gram.intensity(i) - mean) * std::polar(1.0, -omega0 * gram.delay(i));

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, z);

  // Low-pass in the DFT domain: pass below 0.8*cutoff, raised-cosine to the
  // cutoff, reject beyond. Bin k maps to |f| = min(k, n-k)/(n*step).
  const double sample_rate = 1.0 / step;
  const double cutoff = lowpass_fraction * sample_rate;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double bins = static_cast<double>(std::min(k, n - k));
    const double freq = bins / (static_cast<double>(n) * step);
    double h = 0.0;
    if (freq <= 0.8 * cutoff)
      h = 1.0;
    else if (freq < cutoff)
      h = 0.5 * (1.0 + std::cos(pi * (freq - 0.8 * cutoff) / (0.2 * cutoff)));
    spec[static_cast<std::size_t>(k)] *= h;
  }
  fft.inv(z, spec);

  Eigen::ArrayXd env(n);
  for (Eigen::Index i = 0; i < n; ++i)
    env(i) = 2.0 * std::abs(z[static_cast<std::size_t>(i)]);
  return env;
}

PmdEstimate estimate_pmd(const Interferogram& gram, double source_rms,
                         const PmdEstimatorConfig& config, double fiber_length) {
  if (!(source_rms > 0.0))
    throw std::invalid_argument("estimate_pmd needs source_rms > 0");
  const Eigen::ArrayXd env = fringe_envelope(gram, config.lowpass_fraction);
  const Eigen::Index n = env.size();

  const double exclusion = config.exclusion_sigmas * source_rms;
  double total = 0.0, satellite = 0.0, satellite_peak = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    total += env(i);
    if (std::abs(gram.delay(i)) >= exclusion) {
      satellite += env(i);
      satellite_peak = std::max(satellite_peak, env(i));
    }
  }

  PmdEstimate est;
  if (!(total > 0.0) || satellite < config.min_satellite_fraction * total) {
    est.delay = 0.0;
    est.warnings.push_back("no fringe structure outside the source coherence peak");
    return est;
  }

  // Noise floor from the outer 10% of the scan; satellites must clear it.
  const Eigen::Index tail = std::max<Eigen::Index>(1, n / 10);
  std::vector<double> edges;
  edges.reserve(static_cast<std::size_t>(2 * tail));
  for (Eigen::Index i = 0; i < tail; ++i) {
    edges.push_back(env(i));
    edges.push_back(env(n - 1 - i));
  }
  std::nth_element(edges.begin(), edges.begin() + edges.size() / 2, edges.end());
  const double floor = edges[edges.size() / 2];
  if (satellite_peak < config.min_snr * floor)
    throw PmdEstimationError("fringe envelope SNR below threshold");

  double centroid = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(gram.delay(i)) >= exclusion) centroid += env(i) * gram.delay(i);
  centroid /= satellite;
  double second = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(gram.delay(i)) >= exclusion) {
      const double d = gram.delay(i) - centroid;
      second += env(i) * d * d;
    }
  second /= satellite;

  est.envelope_rms = std::sqrt(second);
  est.delay = config.moment_factor *
              std::sqrt(std::max(0.0, second - source_rms * source_rms));
  if (gram.scan_too_narrow)
    est.warnings.push_back("scan may be too narrow for the fringe envelope");
  if (fiber_length > 0.0) est.coefficient = pmd_coefficient(est.delay, fiber_length);
  return est;
}

double pmd_coefficient(double delay, double length) {
  if (!(length > 0.0)) throw std::domain_error("fiber length must be > 0");
  if (!(delay >= 0.0)) throw std::domain_error("delay must be >= 0");
  return delay / std::sqrt(length);
}

void write_csv(const Interferogram& gram, std::ostream& os) {
  os << "delay_s,displacement_um,intensity\n";
  char buf[128];
  for (Eigen::Index i = 0; i < gram.delay.size(); ++i) {
    const double displacement_um =
        0.5 * gram.delay(i) * speed_of_light / units::um;
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", gram.delay(i),
                  displacement_um, gram.intensity(i));
    os << buf;
  }
}

}  // namespace fiberdeco

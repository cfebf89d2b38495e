#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fiberdeco/pmd.hpp"

using namespace fiberdeco;

namespace {

const SourceSpectrum led{SourceSpectrum::Shape::gaussian, 1550e-9, 66e-9};
const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
const Jonesd diag(inv_sqrt2, inv_sqrt2);

FiberSpec identity_fiber() {
  return FiberSpec({{1.0, BirefringenceVectord(Stokesd(0, 0, 1), 0.0)}});
}

FiberSpec single_trunk(double length_m, double beta_ps_km,
                       const Stokesd& axis = Stokesd(0, 0, 1)) {
  return FiberSpec({{length_m, BirefringenceVectord(axis, beta_ps_km * 1e-15)}});
}

Eigen::Index index_of_delay(const Interferogram& gram, double tau) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < gram.delay.size(); ++i)
    if (std::abs(gram.delay(i) - tau) < std::abs(gram.delay(best) - tau)) best = i;
  return best;
}

}  // namespace

TEST_CASE("interferograms are even in the delay") {
  const FiberSpec fiber = single_trunk(800.0, 1.2);
  const Interferogram gram = synthesize_interferogram(
      fiber, led, diag, default_scan(led, 800.0 * 1.2e-15), 512);
  const Eigen::Index n = gram.delay.size();
  const double scale = gram.intensity.maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i)
    CHECK(std::abs(gram.intensity(i) - gram.intensity(n - 1 - i)) < 1e-9 * scale);
}

TEST_CASE("fringe energy satisfies the discrete Parseval identity") {
  const FiberSpec fiber = single_trunk(500.0, 1.0);
  const Interferogram gram = synthesize_interferogram(
      fiber, led, diag, default_scan(led, 0.5e-12), 256);
  const Eigen::Index n = gram.delay.size();
  const double mean = gram.intensity.mean();

  Eigen::VectorXcd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = gram.intensity(i) - mean;
  const Eigen::VectorXcd spec =
      Eigen::VectorXcd::NullaryExpr(n, [&](Eigen::Index k) {
        std::complex<double> acc(0, 0);
        for (Eigen::Index j = 0; j < n; ++j)
          acc += z(j) * std::polar(1.0, -two_pi * double(k) * double(j) / double(n));
        return acc;
      });
  const double time_energy = z.squaredNorm();
  const double freq_energy = spec.squaredNorm() / double(n);
  CHECK(freq_energy == doctest::Approx(time_energy).epsilon(1e-6));
}

TEST_CASE("quadrature demodulation recovers a known envelope") {
  Interferogram gram;
  gram.source = led;
  gram.delay = make_delay_grid(3e-12, coherence_time(led) / 8.0);
  const double omega0 = led.center_omega();
  const double sigma = 0.8e-12;
  gram.intensity.resize(gram.delay.size());
  for (Eigen::Index i = 0; i < gram.delay.size(); ++i) {
    const double tau = gram.delay(i);
    gram.intensity(i) =
        1.0 + std::exp(-0.5 * tau * tau / (sigma * sigma)) * std::cos(omega0 * tau);
  }
  const Eigen::ArrayXd env = fringe_envelope(gram);
  for (Eigen::Index i = 0; i < gram.delay.size(); ++i) {
    const double expected =
        std::exp(-0.5 * gram.delay(i) * gram.delay(i) / (sigma * sigma));
    if (expected > 0.2) CHECK(env(i) == doctest::Approx(expected).epsilon(0.02));
  }
}

TEST_CASE("identity fiber: one central envelope at the coherence scale") {
  const Interferogram gram = synthesize_interferogram(
      identity_fiber(), led, diag, default_scan(led, 0.3e-12), 512);
  const Eigen::ArrayXd env = fringe_envelope(gram);

  // Envelope RMS matches the source coherence envelope.
  double total = 0.0, second = 0.0;
  for (Eigen::Index i = 0; i < env.size(); ++i) {
    total += env(i);
    second += env(i) * gram.delay(i) * gram.delay(i);
  }
  const double rms = std::sqrt(second / total);
  CHECK(rms == doctest::Approx(coherence_rms(led)).epsilon(0.2));

  const PmdEstimate est = estimate_pmd(gram, coherence_rms(led));
  const double step = gram.delay(1) - gram.delay(0);
  CHECK(std::abs(est.delay) <= step);
  CHECK(!est.warnings.empty());
}

TEST_CASE("polarization-maintaining fiber shows half-amplitude satellites") {
  // Collinear trunks, polarizer at 45 degrees to the eigenaxes. Closed-form
  // two-path autocorrelation: satellites at +-sum(l b) with half the central
  // fringe amplitude.
  const double tau_d = (300.0 * 1.0 + 250.0 * 1.2 + 200.0 * 1.0) * 1e-15;
  const FiberSpec pm({{300.0, BirefringenceVectord(Stokesd(0, 0, 1), 1.0e-15)},
                      {250.0, BirefringenceVectord(Stokesd(0, 0, 1), 1.2e-15)},
                      {200.0, BirefringenceVectord(Stokesd(0, 0, 1), 1.0e-15)}});
  const Interferogram gram =
      synthesize_interferogram(pm, led, diag, default_scan(led, tau_d), 1024);
  const Eigen::ArrayXd env = fringe_envelope(gram);

  const Eigen::Index center = index_of_delay(gram, 0.0);
  const Eigen::Index plus = index_of_delay(gram, tau_d);
  const Eigen::Index minus = index_of_delay(gram, -tau_d);

  // Satellite positions: local maxima within a couple of grid steps.
  double sat_peak = 0.0;
  for (Eigen::Index i = plus - 4; i <= plus + 4; ++i)
    sat_peak = std::max(sat_peak, env(i));
  double sat_peak_minus = 0.0;
  for (Eigen::Index i = minus - 4; i <= minus + 4; ++i)
    sat_peak_minus = std::max(sat_peak_minus, env(i));

  CHECK(sat_peak == doctest::Approx(0.5 * env(center)).epsilon(0.15));
  CHECK(sat_peak_minus == doctest::Approx(0.5 * env(center)).epsilon(0.15));

  // Fringes persist at imbalances far beyond the source coherence time.
  CHECK(tau_d > 10.0 * coherence_time(led));
  CHECK(sat_peak > 0.2 * env(center));
  // ... where the identity fiber shows nothing.
  const Interferogram flat = synthesize_interferogram(
      identity_fiber(), led, diag, default_scan(led, tau_d), 1024);
  const Eigen::ArrayXd flat_env = fringe_envelope(flat);
  CHECK(flat_env(plus) < 0.02 * flat_env(center));
}

TEST_CASE("single-trunk estimate lands within 5% in the weak-coupling convention") {
  const double tau_d = 1e-12;  // 1000 m at 1 ps/km
  const FiberSpec fiber = single_trunk(1000.0, 1.0);
  const Interferogram gram =
      synthesize_interferogram(fiber, led, diag, default_scan(led, tau_d), 1024);
  const PmdEstimate est = estimate_pmd(gram, coherence_rms(led),
                                       PmdEstimatorConfig::weak_coupling());
  CHECK(est.delay == doctest::Approx(tau_d).epsilon(0.05));
}

TEST_CASE("synthetic two-sided envelope reproduces a reference instrument reading") {
  // Gaussian satellite envelope shaped for a 5.96 ps second-moment estimate,
  // fringes at the 1550 nm carrier, plus the central coherence peak.
  const double target = 5.96e-12;
  const double sigma_env = target * std::sqrt(4.0 / 3.0);
  const double sigma_src = coherence_rms(led);
  const double omega0 = led.center_omega();

  Interferogram gram;
  gram.source = led;
  gram.delay = make_delay_grid(6.0 * sigma_env, coherence_time(led) / 4.0);
  gram.intensity.resize(gram.delay.size());
  for (Eigen::Index i = 0; i < gram.delay.size(); ++i) {
    const double tau = gram.delay(i);
    const double central = std::exp(-0.5 * tau * tau / (sigma_src * sigma_src));
    const double satellites = 0.4 * std::exp(-0.5 * tau * tau / (sigma_env * sigma_env));
    gram.intensity(i) = 2.0 + (central + satellites) * std::cos(omega0 * tau);
  }

  const PmdEstimate est = estimate_pmd(gram, sigma_src);
  CHECK(est.delay == doctest::Approx(target).epsilon(0.02));

  const double coeff = pmd_coefficient(5.96e-12, 72.9e3);
  CHECK(coeff / units::ps_per_sqrt_km == doctest::Approx(0.698).epsilon(0.005));
}

TEST_CASE("pmd_coefficient arithmetic and errors") {
  CHECK(pmd_coefficient(0.0, 10e3) == 0.0);
  CHECK(pmd_coefficient(4e-12, 16e3) / units::ps_per_sqrt_km ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(pmd_coefficient(1e-12, 0.0), std::domain_error);
  CHECK_THROWS_AS(pmd_coefficient(-1e-12, 1.0), std::domain_error);
}

TEST_CASE("estimator failure paths") {
  const FiberSpec fiber = single_trunk(1000.0, 1.0);
  const Interferogram gram =
      synthesize_interferogram(fiber, led, diag, default_scan(led, 1e-12), 512);

  SUBCASE("unreachable SNR threshold raises an estimation error") {
    PmdEstimatorConfig cfg;
    cfg.min_snr = 1e30;
    CHECK_THROWS_AS(estimate_pmd(gram, coherence_rms(led), cfg), PmdEstimationError);
  }
  SUBCASE("source rms must be positive") {
    CHECK_THROWS_AS(estimate_pmd(gram, 0.0), std::invalid_argument);
  }
}

TEST_CASE("too-narrow scans are flagged") {
  const FiberSpec fiber = single_trunk(1000.0, 1.0);
  const Eigen::ArrayXd narrow = make_delay_grid(1.1e-12, coherence_time(led) / 8.0);
  const Interferogram gram = synthesize_interferogram(fiber, led, diag, narrow, 512);
  CHECK(gram.scan_too_narrow);
  const Interferogram wide = synthesize_interferogram(
      fiber, led, diag, default_scan(led, 1e-12), 512);
  CHECK(!wide.scan_too_narrow);
}

TEST_CASE("interferogram CSV carries delay, displacement and intensity") {
  const Interferogram gram = synthesize_interferogram(
      identity_fiber(), led, diag, make_delay_grid(0.5e-12, 0.1e-12), 64);
  std::ostringstream os;
  write_csv(gram, os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "delay_s,displacement_um,intensity");
  std::string first;
  std::getline(is, first);
  // displacement = delay * c / 2
  const double d_um = 0.5 * gram.delay(0) * speed_of_light * 1e6;
  CHECK(first.find(std::to_string(d_um).substr(0, 4)) != std::string::npos);
}

#include <doctest.h>

#include <complex>
#include <sstream>

#include "fiberdeco/fiber.hpp"
#include "fiberdeco/random.hpp"
#include "fiberdeco/spectral.hpp"

using namespace fiberdeco;

namespace {

const SourceSpectrum led{SourceSpectrum::Shape::gaussian, 1550e-9, 66e-9};

SpectralState two_component_state(const Jonesd& a, const Jonesd& b) {
  SpectralState s;
  s.grid.omega = Eigen::ArrayXd(2);
  s.grid.omega << 1.0e15, 1.1e15;
  s.grid.weight = Eigen::ArrayXd::Constant(2, 0.5);
  s.density = Eigen::ArrayXd::Constant(2, 1.0);
  s.field = {a, b};
  return s;
}

}  // namespace

TEST_CASE("fully polarized input has DOP 1 for any spectrum") {
  Rng rng(21);
  for (int i = 0; i < 5; ++i) {
    const SpectralState s = make_spectral_state(led, rng.jones(), 257, 3.0);
    CHECK(degree_of_polarization(s) == doctest::Approx(1.0).epsilon(1e-9));
  }
  const SpectralState rect = make_spectral_state(
      {SourceSpectrum::Shape::rectangular, 1310e-9, 30e-9}, Jonesd(1.0, 0.0), 129, 2.0);
  CHECK(degree_of_polarization(rect) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("monochromatic states") {
  const SpectralState one = make_spectral_state(led, Jonesd(1.0, 0.0), 1, 3.0);
  CHECK(one.grid.size() == 1);
  CHECK(std::abs(degree_of_polarization(one) - 1.0) < 1e-12);

  const SourceSpectrum zero_width{SourceSpectrum::Shape::gaussian, 1550e-9, 0.0};
  const SpectralState flagged = make_spectral_state(zero_width, Jonesd(1.0, 0.0), 512, 3.0);
  CHECK(flagged.grid.size() == 1);
  CHECK(flagged.grid.omega(0) == doctest::Approx(led.center_omega()));
}

TEST_CASE("construction rejects non-physical inputs") {
  CHECK_THROWS_AS(make_spectral_state({SourceSpectrum::Shape::gaussian, 1550e-9, 2000e-9},
                                      Jonesd(1.0, 0.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_spectral_state(led, Jonesd(1.0, 0.0), 2, 3.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_spectral_state(led, Jonesd(0.0, 0.0)), std::domain_error);
}

TEST_CASE("spectral density is normalized on the grid") {
  const SpectralState s = make_spectral_state(led, Jonesd(1.0, 0.0), 512, 3.0);
  CHECK(std::abs((s.grid.weight * s.density).sum() - 1.0) < 1e-9);
}

TEST_CASE("66 nm at 1550 nm corresponds to a ~0.05 ps coherence time") {
  // Independent route: DFT of the sampled density; the envelope HWHM is the
  // coherence time under the library's time-bandwidth convention.
  const SpectralState s = make_spectral_state(led, Jonesd(1.0, 0.0), 4096, 4.0);
  const double mean_omega = led.center_omega();
  double fwhm = 0.0;
  double prev = 1.0;
  for (double tau = 0.0; tau < 1e-12; tau += 1e-16) {
    std::complex<double> gamma(0.0, 0.0);
    for (Eigen::Index i = 0; i < s.grid.size(); ++i)
      gamma += s.grid.weight(i) * s.density(i) *
               std::polar(1.0, (s.grid.omega(i) - mean_omega) * tau);
    const double mag = std::abs(gamma);
    if (prev >= 0.5 && mag < 0.5) {
      fwhm = 2.0 * tau;
      break;
    }
    prev = mag;
  }
  REQUIRE(fwhm > 0.0);
  const double tau_c_measured = 0.5 * fwhm;
  CHECK(tau_c_measured == doctest::Approx(0.05e-12).epsilon(0.15));
  CHECK(tau_c_measured == doctest::Approx(coherence_time(led)).epsilon(0.02));
}

TEST_CASE("mean polarization of simple mixtures") {
  const Jonesd h(1.0, 0.0);
  const Jonesd v(0.0, 1.0);
  const double r = 1.0 / std::numbers::sqrt2;
  const Jonesd d(r, r);

  SUBCASE("identical components reproduce the common vector") {
    const Stokesd m = mean_polarization(two_component_state(h, h));
    CHECK((m - Stokesd(0, 0, 1)).norm() < 1e-12);
  }
  SUBCASE("antipodal components cancel") {
    CHECK(mean_polarization(two_component_state(h, v)).norm() < 1e-12);
    CHECK(degree_of_polarization(two_component_state(h, v)) < 1e-12);
  }
  SUBCASE("orthogonal-axis components average to sqrt(2)/2") {
    const double dop = degree_of_polarization(two_component_state(h, d));
    CHECK(dop == doctest::Approx(std::numbers::sqrt2 / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("DOP stays in [0,1] and per-frequency purity survives propagation") {
  Rng rng(22);
  const FiberRandomModel model{40, 500.0, 2e-15, 0.5, 77};
  const FiberSpec fiber = generate_fiber(model);
  for (int i = 0; i < 5; ++i) {
    const SpectralState s = make_spectral_state(led, rng.jones(), 129, 3.0);
    const SpectralState out = propagate(fiber, s);
    const double dop = degree_of_polarization(out);
    CHECK(dop >= 0.0);
    CHECK(dop <= 1.0);
    for (const Jonesd& f : out.field)
      CHECK(std::abs(poincare_from_jones(f).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("doubling the quadrature changes a smooth DOP by < 1e-3") {
  const FiberRandomModel model{10, 100.0, 0.5e-15, 0.0, 5};
  const FiberSpec fiber = generate_fiber(model);
  const double dop_default =
      degree_of_polarization(propagate(fiber, make_spectral_state(led, Jonesd(1, 0), 512, 3.0)));
  const double dop_refined =
      degree_of_polarization(propagate(fiber, make_spectral_state(led, Jonesd(1, 0), 1024, 3.0)));
  CHECK(std::abs(dop_default - dop_refined) < 1e-3);
}

TEST_CASE("spectral state CSV serialization") {
  const SpectralState s = make_spectral_state(led, Jonesd(1.0, 0.0), 5, 1.0);
  std::ostringstream os;
  write_csv(s, os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "omega_rad_s,density,re_a,im_a,re_b,im_b");
  int rows = 0;
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 5);
}

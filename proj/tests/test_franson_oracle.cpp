#include <doctest.h>

#include <cmath>

#include "fiberdeco/franson.hpp"
#include "support/time_domain_oracle.hpp"

using namespace fiberdeco;
using fiberdeco::testing::coincidence_oracle;
using fiberdeco::testing::correlation_histogram;
using fiberdeco::testing::OracleParams;

namespace {

BiphotonEnsemble oracle_ensemble(double detuning_nm) {
  const double degenerate = 1310e-9 + detuning_nm * units::nm;
  return make_biphoton_ensemble(2.0 * omega_from_wavelength(degenerate), 35e-9, 2049);
}

FransonConfig oracle_config(double length_km) {
  FransonConfig cfg;
  cfg.arm_a = {1310e-9, 0.092 * units::ps_per_nm2_km, length_km * units::km, 150e-9};
  cfg.arm_b = cfg.arm_a;
  return cfg;
}

}  // namespace

TEST_CASE("oracle plumbing: transform-limited correlation width") {
  const BiphotonEnsemble ens = oracle_ensemble(0.0);
  // Wide spectral span -> fine tau resolution for the femtosecond kernel.
  const OracleParams params{1 << 19, 16.0};
  const auto hist = correlation_histogram(ens, oracle_config(0.0), params);
  const double sigma_pair = 0.5 / ens.detuning_rms();
  CHECK(std::abs(hist.centroid()) < 0.2 * sigma_pair);
  CHECK(hist.rms() == doctest::Approx(sigma_pair).epsilon(0.05));
}

TEST_CASE("oracle plumbing: one dispersive arm shifts the correlation") {
  // Arm A only: tau = t_A - t_B picks up the full (positive) group delay of
  // photon A, so the centroid must sit at +mean(T_A), a sign-sensitive check.
  const BiphotonEnsemble ens = oracle_ensemble(0.0);
  FransonConfig cfg = oracle_config(0.0);
  cfg.arm_a = {1310e-9, 0.092 * units::ps_per_nm2_km, 17e3, 150e-9};

  double expected = 0.0;
  for (Eigen::Index i = 0; i < ens.detuning.size(); ++i) {
    const double omega1 = 0.5 * ens.pump_omega + ens.detuning(i);
    expected += ens.weight(i) * group_delay(wavelength_from_omega(omega1), cfg.arm_a);
  }
  const auto hist = correlation_histogram(ens, cfg);
  CHECK(hist.centroid() == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("coincidence_rate agrees with the time-domain oracle") {
  struct Case {
    double detuning_nm;
    double length_km;
    const char* label;
  };
  const Case cases[] = {
      {0.0, 0.0, "zero dispersion"},
      {0.0, 17.0, "centered, 17 km"},
      {10.0, 17.0, "10 nm detuned"},
      {20.0, 17.0, "20 nm detuned"},
      {30.0, 17.0, "30 nm detuned"},
  };
  for (const Case& c : cases) {
    CAPTURE(c.label);
    const BiphotonEnsemble ens = oracle_ensemble(c.detuning_nm);
    const FransonConfig cfg = oracle_config(c.length_km);
    const double v_model = coincidence_rate(ens, cfg).visibility;
    const double v_oracle = coincidence_oracle(ens, cfg).visibility;
    CHECK(std::abs(v_model - v_oracle) <= 0.02);
  }
}

TEST_CASE("oracle reproduces the analytic dispersion-free fringe") {
  const BiphotonEnsemble ens = oracle_ensemble(0.0);
  const FransonConfig cfg = oracle_config(0.0);
  const CoincidenceResult r = coincidence_oracle(ens, cfg);
  CHECK(r.visibility == doctest::Approx(1.0).epsilon(1e-3));
  const double pump_phase = std::fmod(ens.pump_omega * cfg.arm_imbalance, two_pi);
  for (const auto& [phase, rate] : r.curve)
    CHECK(rate == doctest::Approx(0.5 * (1.0 + std::cos(phase + pump_phase)))
                      .epsilon(1e-3));
}

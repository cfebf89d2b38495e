#include "fiberdeco/experiments.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "fiberdeco/fiber.hpp"
#include "fiberdeco/franson.hpp"
#include "fiberdeco/pmd.hpp"
#include "fiberdeco/random.hpp"
#include "fiberdeco/spectral.hpp"

namespace fiberdeco {

namespace {

using json = nlohmann::ordered_json;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Jonesd parse_polarization(const std::string& name) {
  const double r = 1.0 / std::numbers::sqrt2;
  if (name == "h") return Jonesd(1.0, 0.0);
  if (name == "v") return Jonesd(0.0, 1.0);
  if (name == "d") return Jonesd(r, r);
  if (name == "a") return Jonesd(r, -r);
  if (name == "r") return Jonesd(r, std::complex<double>(0.0, r));
  if (name == "l") return Jonesd(r, std::complex<double>(0.0, -r));
  throw ConfigError("unknown polarization '" + name + "' (use h|v|d|a|r|l)");
}

SourceSpectrum::Shape parse_shape(const std::string& name) {
  if (name == "gaussian") return SourceSpectrum::Shape::gaussian;
  if (name == "rectangular") return SourceSpectrum::Shape::rectangular;
  throw ConfigError("unknown spectrum shape '" + name +
                    "' (use gaussian|rectangular)");
}

const std::vector<ConfigKeySpec> depolarize_keys = {
    {"seed", "1", "base RNG seed; ensemble uses seed, seed+1, ..."},
    {"n_seeds", "20", "fiber realizations per sweep point"},
    {"center_nm", "1550", "source center wavelength"},
    {"widths_nm", "66", "comma list of source FWHM values; 0 = monochromatic"},
    {"lengths_km", "23", "comma list of fiber lengths"},
    {"trunk_m", "100", "birefringent trunk length"},
    {"beta_ps_per_km", "0.5", "trunk birefringence magnitude"},
    {"trunk_jitter", "0.5", "trunk length spread fraction; 0 = strictly equal trunks"},
    {"n_samples", "2048", "spectral quadrature samples"},
    {"span_widths", "3", "grid half-span in units of the source width"},
    {"shape", "gaussian", "source line shape (gaussian|rectangular)"},
};

const std::vector<ConfigKeySpec> roundtrip_keys = {
    {"seed", "1", "base RNG seed; ensemble uses seed, seed+1, ..."},
    {"n_seeds", "20", "fiber realizations"},
    {"center_nm", "1550", "source center wavelength"},
    {"width_nm", "66", "source FWHM"},
    {"length_km", "23", "fiber length"},
    {"trunk_m", "100", "birefringent trunk length"},
    {"beta_ps_per_km", "0.5", "trunk birefringence magnitude"},
    {"trunk_jitter", "0.5", "trunk length spread fraction; 0 = strictly equal trunks"},
    {"n_samples", "512", "spectral quadrature samples"},
    {"span_widths", "3", "grid half-span in units of the source width"},
    {"input_pol", "d", "launch polarization (h|v|d|a|r|l|random)"},
};

const std::vector<ConfigKeySpec> pmd_scan_keys = {
    {"seed", "1", "RNG seed for the fiber realization"},
    {"center_nm", "1550", "source center wavelength"},
    {"width_nm", "66", "source FWHM"},
    {"length_km", "72.9", "fiber length"},
    {"trunk_m", "100", "birefringent trunk length"},
    {"beta_ps_per_km", "2.41", "trunk birefringence magnitude"},
    {"trunk_jitter", "0.5", "trunk length spread fraction; 0 = strictly equal trunks"},
    {"n_samples", "4096", "spectral quadrature samples"},
    {"span_widths", "3", "grid half-span in units of the source width"},
    {"scan_step_fs", "0", "delay scan step; 0 = tau_c / 8"},
    {"scan_span_ps", "0", "delay scan half-span; 0 = 6 dgd + 6 tau_c"},
    {"estimator_mode", "strong", "second-moment convention (strong|weak coupling)"},
    {"noise_rms", "0", "additive detector noise RMS, arbitrary units"},
    {"polarizer", "d", "analyzer (and launch) polarization (h|v|d|a|r|l)"},
};

const std::vector<ConfigKeySpec> franson_keys = {
    {"seed", "1", "accepted for interface uniformity; the model is deterministic"},
    {"lambda0_nm", "1310", "zero-dispersion wavelength of both arms"},
    {"slope_ps_nm2_km", "0.092", "dispersion slope S0"},
    {"halfwidth_nm", "35", "photon spectral half-extent (+-), mapped to 2 sigma"},
    {"lengths_km", "17", "comma list of per-arm fiber lengths"},
    {"detunings_nm", "0", "comma list of degenerate-wavelength offsets from lambda0"},
    {"window_ps", "300", "coincidence gate |tA - tB| <= window"},
    {"imbalance_ps", "1200", "interferometer arm imbalance (both analyzers)"},
    {"n_detuning", "2049", "detuning grid samples"},
    {"span_sigmas", "4", "detuning grid half-span in sigmas"},
    {"n_phases", "32", "phase sweep steps"},
    {"validity_nm", "150", "linear-dispersion validity half-window"},
    {"phase_a_rad", "0", "analyzer A long-arm phase"},
    {"phase_b_rad", "0", "analyzer B long-arm phase"},
};

const std::vector<ConfigKeySpec>& keys_for(const std::string& experiment) {
  if (experiment == "depolarize") return depolarize_keys;
  if (experiment == "roundtrip") return roundtrip_keys;
  if (experiment == "pmd-scan") return pmd_scan_keys;
  if (experiment == "franson-sweep") return franson_keys;
  throw ConfigError("unknown experiment '" + experiment + "'");
}

KeyValueConfig with_defaults(const KeyValueConfig& cfg,
                             const std::vector<ConfigKeySpec>& keys) {
  KeyValueConfig merged = cfg;
  for (const ConfigKeySpec& k : keys)
    if (!merged.has(k.key)) merged.set(k.key, k.value);
  return merged;
}

FiberRandomModel fiber_model(double length_km, double trunk_m,
                             double beta_ps_per_km, double jitter,
                             std::uint64_t seed) {
  FiberRandomModel model;
  model.n_trunks =
      std::max(1, static_cast<int>(std::llround(length_km * units::km / trunk_m)));
  model.trunk_length = trunk_m;
  model.beta_magnitude = beta_ps_per_km * units::ps_per_km;
  model.length_jitter = jitter;
  model.seed = seed;
  return model;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"depolarize", "roundtrip",
                                                 "pmd-scan", "franson-sweep"};
  return names;
}

const std::vector<ConfigKeySpec>& config_keys(const std::string& experiment) {
  return keys_for(experiment);
}

std::string default_config_text(const std::string& experiment) {
  std::ostringstream os;
  os << "# fiberdeco " << experiment << " defaults\n";
  for (const ConfigKeySpec& k : keys_for(experiment))
    os << k.key << " = " << k.value << "  # " << k.help << "\n";
  return os.str();
}

ExperimentOutput run_depolarize(const KeyValueConfig& config) {
  KeyValueConfig cfg = with_defaults(config, depolarize_keys);
  const auto seed = cfg.get_uint("seed", 0);
  const auto n_seeds = static_cast<int>(cfg.get_int("n_seeds", 0));
  const double center = cfg.get_double("center_nm", 0) * units::nm;
  const auto widths = cfg.get_double_list("widths_nm", {});
  const auto lengths = cfg.get_double_list("lengths_km", {});
  const double trunk_m = cfg.get_double("trunk_m", 0);
  const double beta = cfg.get_double("beta_ps_per_km", 0);
  const double jitter = cfg.get_double("trunk_jitter", 0);
  const auto n_samples = static_cast<int>(cfg.get_int("n_samples", 0));
  const double span = cfg.get_double("span_widths", 0);
  const auto shape = parse_shape(cfg.get_string("shape", ""));
  cfg.finish();
  if (n_seeds < 1) throw ConfigError("n_seeds must be >= 1");

  std::ostringstream csv;
  csv << "width_nm,length_km,seed,dop\n";
  json summary = json::array();
  for (const double width_nm : widths) {
    for (const double length_km : lengths) {
      SourceSpectrum spectrum{shape, center, width_nm * units::nm};
      const SpectralState input =
          make_spectral_state(spectrum, Jonesd(1.0, 0.0), n_samples, span);
      double sum = 0.0, sum2 = 0.0;
      for (int s = 0; s < n_seeds; ++s) {
        const FiberSpec fiber = generate_fiber(
            fiber_model(length_km, trunk_m, beta, jitter, seed + static_cast<std::uint64_t>(s)));
        const double dop = degree_of_polarization(propagate(fiber, input));
        sum += dop;
        sum2 += dop * dop;
        csv << num(width_nm) << ',' << num(length_km) << ','
            << (seed + static_cast<std::uint64_t>(s)) << ',' << num(dop) << "\n";
      }
      const double mean = sum / n_seeds;
      const double var = std::max(0.0, sum2 / n_seeds - mean * mean);
      summary.push_back({{"width_nm", width_nm},
                         {"length_km", length_km},
                         {"n_seeds", n_seeds},
                         {"mean_dop", mean},
                         {"std_dop", std::sqrt(var)}});
    }
  }
  ExperimentOutput out;
  out.files.emplace_back("dop.csv", csv.str());
  out.files.emplace_back("summary.json", summary.dump(2) + "\n");
  return out;
}

ExperimentOutput run_roundtrip(const KeyValueConfig& config) {
  KeyValueConfig cfg = with_defaults(config, roundtrip_keys);
  const auto seed = cfg.get_uint("seed", 0);
  const auto n_seeds = static_cast<int>(cfg.get_int("n_seeds", 0));
  const double center = cfg.get_double("center_nm", 0) * units::nm;
  const double width = cfg.get_double("width_nm", 0) * units::nm;
  const double length_km = cfg.get_double("length_km", 0);
  const double trunk_m = cfg.get_double("trunk_m", 0);
  const double beta = cfg.get_double("beta_ps_per_km", 0);
  const double jitter = cfg.get_double("trunk_jitter", 0);
  const auto n_samples = static_cast<int>(cfg.get_int("n_samples", 0));
  const double span = cfg.get_double("span_widths", 0);
  const std::string pol_name = cfg.get_string("input_pol", "");
  cfg.finish();
  if (n_seeds < 1) throw ConfigError("n_seeds must be >= 1");

  const SourceSpectrum spectrum{SourceSpectrum::Shape::gaussian, center, width};
  std::ostringstream csv;
  csv << "seed,dop_forward,dop_return,angle_error_rad\n";
  bool all_pass = true;
  double min_return_dop = 1.0, max_angle = 0.0;
  for (int s = 0; s < n_seeds; ++s) {
    const std::uint64_t fiber_seed = seed + static_cast<std::uint64_t>(s);
    Jonesd input_pol;
    if (pol_name == "random") {
      Rng rng(fiber_seed ^ 0x9e3779b97f4a7c15ULL);
      input_pol = rng.jones();
    } else {
      input_pol = parse_polarization(pol_name);
    }
    const SpectralState input =
        make_spectral_state(spectrum, input_pol, n_samples, span);
    const FiberSpec fiber =
        generate_fiber(fiber_model(length_km, trunk_m, beta, jitter, fiber_seed));
    const std::vector<JonesOpd> matrices = fiber_jones_matrices(fiber, input.grid);

    const double dop_forward = degree_of_polarization(propagate(matrices, input));
    const SpectralState back = round_trip(matrices, input);
    const double dop_return = degree_of_polarization(back);
    const Stokesd target = -poincare_from_jones(input_pol);
    const Stokesd ret = mean_polarization(back).normalized();
    const double angle = std::acos(std::clamp(ret.dot(target), -1.0, 1.0));

    min_return_dop = std::min(min_return_dop, dop_return);
    max_angle = std::max(max_angle, angle);
    if (!(dop_return >= 0.998 && angle < 1e-6)) all_pass = false;
    csv << fiber_seed << ',' << num(dop_forward) << ',' << num(dop_return) << ','
        << num(angle) << "\n";
  }
  json summary = {{"n_seeds", n_seeds},
                  {"min_return_dop", min_return_dop},
                  {"max_angle_error_rad", max_angle},
                  {"all_pass", all_pass}};
  ExperimentOutput out;
  out.files.emplace_back("roundtrip.csv", csv.str());
  out.files.emplace_back("summary.json", summary.dump(2) + "\n");
  return out;
}

ExperimentOutput run_pmd_scan(const KeyValueConfig& config) {
  KeyValueConfig cfg = with_defaults(config, pmd_scan_keys);
  const auto seed = cfg.get_uint("seed", 0);
  const double center = cfg.get_double("center_nm", 0) * units::nm;
  const double width = cfg.get_double("width_nm", 0) * units::nm;
  const double length_km = cfg.get_double("length_km", 0);
  const double trunk_m = cfg.get_double("trunk_m", 0);
  const double beta = cfg.get_double("beta_ps_per_km", 0);
  const double jitter = cfg.get_double("trunk_jitter", 0);
  const auto n_samples = static_cast<int>(cfg.get_int("n_samples", 0));
  const double span = cfg.get_double("span_widths", 0);
  const double step_fs = cfg.get_double("scan_step_fs", 0);
  const double span_ps = cfg.get_double("scan_span_ps", 0);
  const std::string mode = cfg.get_string("estimator_mode", "");
  const double noise_rms = cfg.get_double("noise_rms", 0);
  const Jonesd polarizer = parse_polarization(cfg.get_string("polarizer", ""));
  cfg.finish();

  PmdEstimatorConfig est_cfg;
  if (mode == "strong")
    est_cfg = PmdEstimatorConfig::strong_coupling();
  else if (mode == "weak")
    est_cfg = PmdEstimatorConfig::weak_coupling();
  else
    throw ConfigError("estimator_mode must be 'strong' or 'weak'");

  const SourceSpectrum spectrum{SourceSpectrum::Shape::gaussian, center, width};
  const FiberSpec fiber =
      generate_fiber(fiber_model(length_km, trunk_m, beta, jitter, seed));
  const SpectralState probe =
      make_spectral_state(spectrum, polarizer, n_samples, span);

  double oracle_delay = 0.0;
  try {
    oracle_delay = dgd_band_average(fiber, probe.grid, probe.density);
  } catch (const std::runtime_error& e) {
    throw NumericalError(e.what());
  }

  const double tau_c = coherence_time(spectrum);
  const double step = step_fs > 0.0 ? step_fs * units::fs : tau_c / 8.0;
  const double half_span =
      span_ps > 0.0 ? span_ps * units::ps : 6.0 * oracle_delay + 6.0 * tau_c;
  const Eigen::ArrayXd delays = make_delay_grid(half_span, step);

  const Interferogram gram =
      synthesize_interferogram(fiber, spectrum, polarizer, delays, n_samples,
                               span, std::nullopt, noise_rms, seed);
  PmdEstimate estimate;
  try {
    estimate = estimate_pmd(gram, coherence_rms(spectrum), est_cfg,
                            length_km * units::km);
  } catch (const PmdEstimationError& e) {
    throw NumericalError(e.what());
  }

  std::ostringstream csv;
  write_csv(gram, csv);
  std::ostringstream fiber_txt;
  write_text(fiber, fiber_txt);

  const double rel_error =
      oracle_delay > 0.0 ? estimate.delay / oracle_delay - 1.0 : 0.0;
  json record = {
      {"delay_ps", estimate.delay / units::ps},
      {"coefficient_ps_sqrtkm", estimate.coefficient / units::ps_per_sqrt_km},
      {"envelope_rms_ps", estimate.envelope_rms / units::ps},
      {"method", estimate.method},
      {"warnings", estimate.warnings},
      {"oracle_delay_ps", oracle_delay / units::ps},
      {"estimate_vs_oracle_rel_error", rel_error},
  };
  ExperimentOutput out;
  out.files.emplace_back("interferogram.csv", csv.str());
  out.files.emplace_back("estimate.json", record.dump(2) + "\n");
  out.files.emplace_back("fiber.txt", fiber_txt.str());
  return out;
}

ExperimentOutput run_franson_sweep(const KeyValueConfig& config) {
  KeyValueConfig cfg = with_defaults(config, franson_keys);
  cfg.get_uint("seed", 0);  // accepted, unused: the model is deterministic
  const double lambda0 = cfg.get_double("lambda0_nm", 0) * units::nm;
  const double slope = cfg.get_double("slope_ps_nm2_km", 0) * units::ps_per_nm2_km;
  const double half_width = cfg.get_double("halfwidth_nm", 0) * units::nm;
  const auto lengths = cfg.get_double_list("lengths_km", {});
  const auto detunings = cfg.get_double_list("detunings_nm", {});
  const double window = cfg.get_double("window_ps", 0) * units::ps;
  const double imbalance = cfg.get_double("imbalance_ps", 0) * units::ps;
  const auto n_detuning = static_cast<int>(cfg.get_int("n_detuning", 0));
  const double span_sigmas = cfg.get_double("span_sigmas", 0);
  const auto n_phases = static_cast<int>(cfg.get_int("n_phases", 0));
  const double validity = cfg.get_double("validity_nm", 0) * units::nm;
  const double phase_a = cfg.get_double("phase_a_rad", 0);
  const double phase_b = cfg.get_double("phase_b_rad", 0);
  cfg.finish();

  std::ostringstream vis_csv;
  vis_csv << "detuning_nm,length_km,visibility,S_value,violated\n";
  std::string fringe_csv;
  bool fringe_is_centered = false;
  json rows = json::array();
  std::vector<std::string> warnings;

  for (const double detuning_nm : detunings) {
    const double degenerate = lambda0 + detuning_nm * units::nm;
    const double pump_omega = 2.0 * omega_from_wavelength(degenerate);
    const BiphotonEnsemble ensemble = make_biphoton_ensemble(
        pump_omega, half_width, n_detuning, span_sigmas);
    for (const double length_km : lengths) {
      FransonConfig fc;
      fc.arm_imbalance = imbalance;
      fc.coincidence_window = window;
      fc.phase_a = phase_a;
      fc.phase_b = phase_b;
      fc.n_phase_steps = n_phases;
      fc.arm_a = {lambda0, slope, length_km * units::km, validity};
      fc.arm_b = fc.arm_a;

      CoincidenceResult result;
      try {
        result = coincidence_rate(ensemble, fc);
      } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
      }
      if (!result.converged)
        throw NumericalError("franson sweep did not converge at detuning " +
                             num(detuning_nm) + " nm");
      const ChshResult chsh = chsh_check(result.visibility);
      const bool centered = detuning_nm == 0.0;
      vis_csv << num(detuning_nm) << ',' << num(length_km) << ','
              << num(result.visibility) << ',' << num(chsh.s_value) << ','
              << (chsh.violated ? 1 : 0) << "\n";
      rows.push_back({{"detuning_nm", detuning_nm},
                      {"length_km", length_km},
                      {"visibility", result.visibility},
                      {"S_value", chsh.s_value},
                      {"violated", chsh.violated},
                      {"centered", centered}});
      if (fringe_csv.empty() || (centered && !fringe_is_centered)) {
        std::ostringstream fc_csv;
        fc_csv << "phase_rad,rate\n";
        for (const auto& [phase, rate] : result.curve)
          fc_csv << num(phase) << ',' << num(rate) << "\n";
        fringe_csv = fc_csv.str();
        fringe_is_centered = centered;
      }
      for (const std::string& w : result.warnings) warnings.push_back(w);
    }
  }
  json summary = {{"rows", rows}, {"warnings", warnings}};
  ExperimentOutput out;
  out.files.emplace_back("visibility.csv", vis_csv.str());
  out.files.emplace_back("fringe.csv", fringe_csv);
  out.files.emplace_back("summary.json", summary.dump(2) + "\n");
  return out;
}

ExperimentOutput run_experiment(const std::string& experiment,
                                const KeyValueConfig& config) {
  if (experiment == "depolarize") return run_depolarize(config);
  if (experiment == "roundtrip") return run_roundtrip(config);
  if (experiment == "pmd-scan") return run_pmd_scan(config);
  if (experiment == "franson-sweep") return run_franson_sweep(config);
  throw ConfigError("unknown experiment '" + experiment + "'");
}

}  // namespace fiberdeco

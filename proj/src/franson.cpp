#include "fiberdeco/franson.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fiberdeco {

void DispersionProfile::validate() const {
  if (!(lambda0 > 0.0)) throw std::invalid_argument("lambda0 must be > 0");
  if (!(length >= 0.0)) throw std::invalid_argument("fiber length must be >= 0");
  if (!(validity_halfwidth > 0.0))
    throw std::invalid_argument("validity halfwidth must be > 0");
}

namespace {

void check_band(double lambda, const DispersionProfile& p) {
  if (std::abs(lambda - p.lambda0) > p.validity_halfwidth) {
    std::ostringstream os;
    os << "wavelength " << lambda / units::nm
       << " nm outside the linear-dispersion validity window "
       << (p.lambda0 - p.validity_halfwidth) / units::nm << ".."
       << (p.lambda0 + p.validity_halfwidth) / units::nm << " nm";
    throw std::domain_error(os.str());
  }
}

}  // namespace

double group_delay(double lambda, const DispersionProfile& profile) {
  profile.validate();
  if (profile.length == 0.0) return 0.0;
  check_band(lambda, profile);
  const double d = lambda - profile.lambda0;
  return 0.5 * profile.slope * d * d * profile.length;
}

double dispersion_phase(double omega, const DispersionProfile& profile) {
  profile.validate();
  if (profile.length == 0.0) return 0.0;
  const double lambda = wavelength_from_omega(omega);
  check_band(lambda, profile);
  // phase(lambda) = -pi c S0 L [lambda - 2 lambda0 ln(lambda) - lambda0^2/lambda],
  // whose omega-derivative is the quadratic group delay above. Referenced to
  // lambda0 so phases stay small.
  const double l0 = profile.lambda0;
  const auto antiderivative = [&](double l) {
    return l - 2.0 * l0 * std::log(l) - l0 * l0 / l;
  };
  return -pi * speed_of_light * profile.slope * profile.length *
         (antiderivative(lambda) - antiderivative(l0));
}

double conjugate_wavelength(double lambda1, double pump_omega) {
  if (!(lambda1 > 0.0) || !(pump_omega > 0.0))
    throw std::invalid_argument("conjugate_wavelength needs positive inputs");
  const double omega2 = pump_omega - omega_from_wavelength(lambda1);
  if (!(omega2 > 0.0))
    throw std::domain_error("conjugate frequency is not positive");
  return wavelength_from_omega(omega2);
}

void BiphotonEnsemble::validate() const {
  if (!(pump_omega > 0.0)) throw std::invalid_argument("pump frequency must be > 0");
  const Eigen::Index n = detuning.size();
  if (n < 1 || weight.size() != n)
    throw std::invalid_argument("biphoton grid/weight size mismatch");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0 && !(detuning(i) > detuning(i - 1)))
      throw std::invalid_argument("detuning grid must be strictly increasing");
    if (!(weight(i) >= 0.0)) throw std::invalid_argument("weights must be >= 0");
    if (!(0.5 * pump_omega - std::abs(detuning(i)) > 0.0))
      throw std::invalid_argument("detuning grid reaches nonpositive frequencies");
    sum += weight(i);
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("biphoton weights must sum to 1");
}

double BiphotonEnsemble::detuning_rms() const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < detuning.size(); ++i)
    acc += weight(i) * detuning(i) * detuning(i);
  return std::sqrt(acc);
}

BiphotonEnsemble make_biphoton_ensemble(double pump_omega, double half_width,
                                        int n_samples, double span_sigmas,
                                        BiphotonEnsemble::Shape shape) {
  if (!(pump_omega > 0.0)) throw std::invalid_argument("pump frequency must be > 0");
  if (!(half_width > 0.0)) throw std::invalid_argument("half width must be > 0");
  if (n_samples < 3) throw std::invalid_argument("need at least 3 detuning samples");
  if (!(span_sigmas > 0.0)) throw std::invalid_argument("span must be > 0");
  if (shape == BiphotonEnsemble::Shape::custom)
    throw std::invalid_argument("custom ensembles must be built directly");

  BiphotonEnsemble ens;
  ens.pump_omega = pump_omega;
  ens.center_wavelength = wavelength_from_omega(0.5 * pump_omega);
  ens.half_width = half_width;
  ens.shape = shape;
  ens.span_sigmas = span_sigmas;

  // Quoted "+-half_width" mapped to 2 sigma of the gaussian density, converted
  // to angular detuning at the degenerate wavelength.
  const double sigma_lambda = 0.5 * half_width;
  const double sigma_omega = two_pi * speed_of_light * sigma_lambda /
                             (ens.center_wavelength * ens.center_wavelength);

  const Eigen::Index n = n_samples;
  const double step = 2.0 * span_sigmas * sigma_omega / static_cast<double>(n - 1);
  const double mid = 0.5 * static_cast<double>(n - 1);
  ens.detuning.resize(n);
  ens.weight.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    ens.detuning(i) = (static_cast<double>(i) - mid) * step;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = ens.detuning(i) / sigma_omega;
    double density = 0.0;
    switch (shape) {
      case BiphotonEnsemble::Shape::gaussian:
        density = std::exp(-0.5 * x * x);
        break;
      case BiphotonEnsemble::Shape::rectangular:
        density = std::abs(x) <= 2.0 ? 1.0 : 0.0;
        break;
      case BiphotonEnsemble::Shape::custom:
        break;
    }
    const double trapezoid = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    ens.weight(i) = trapezoid * density;
  }
  const double total = ens.weight.sum();
  ens.weight /= total;
  ens.validate();
  return ens;
}

void FransonConfig::validate() const {
  if (!(coincidence_window > 0.0))
    throw std::invalid_argument("coincidence window must be > 0");
  if (!(arm_imbalance > coincidence_window))
    throw std::invalid_argument(
        "arm imbalance must exceed the coincidence window");
  if (n_phase_steps < 3)
    throw std::invalid_argument("phase sweep needs at least 3 steps");
  arm_a.validate();
  arm_b.validate();
}

double window_overlap(double dt, double window, double sigma) {
  if (!(sigma > 0.0)) return std::abs(dt) <= window ? 1.0 : 0.0;
  const double inv = 1.0 / (std::numbers::sqrt2 * sigma);
  return 0.5 * (std::erf((window - dt) * inv) + std::erf((window + dt) * inv));
}

namespace {

// Antiderivative of erf: Ierf'(x) = erf(x). Even in x, bit-exactly.
double ierf(double x) {
  return x * std::erf(x) + std::exp(-x * x) * std::numbers::inv_sqrtpi_v<double>;
}

// Mean of window_overlap(t) over t in [a, b] (arrival-time difference varies
// linearly across a detuning cell). Exact via the erf antiderivative, so the
// quadrature does not chatter when the window edge crosses a cell.
double cell_mean_overlap(double a, double b, double window, double sigma) {
  if (!(sigma > 0.0)) {
    if (a == b) return std::abs(a) <= window ? 1.0 : 0.0;
    const double lo = std::max(std::min(a, b), -window);
    const double hi = std::min(std::max(a, b), window);
    return hi > lo ? (hi - lo) / std::abs(b - a) : 0.0;
  }
  if (std::abs(b - a) <= 1e-9 * sigma)
    return window_overlap(0.5 * (a + b), window, sigma);
  const double c = std::numbers::sqrt2 * sigma;
  const double t1 = 0.5 * c * (ierf((window - a) / c) - ierf((window - b) / c));
  const double t2 = 0.5 * c * (ierf((window + b) / c) - ierf((window + a) / c));
  return (t1 + t2) / (b - a);
}

struct FringeTerms {
  double same = 0.0;  // mass-weighted mean F0
  double diff = 0.0;  // mass-weighted mean (F+ + F-)
};

FringeTerms accumulate_terms(const BiphotonEnsemble& ens,
                             const FransonConfig& cfg, double sigma) {
  const Eigen::Index n = ens.detuning.size();
  const double half_pump = 0.5 * ens.pump_omega;
  Eigen::ArrayXd dt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double omega1 = half_pump + ens.detuning(i);
    const double omega2 = half_pump - ens.detuning(i);
    dt(i) = group_delay(wavelength_from_omega(omega1), cfg.arm_a) -
            group_delay(wavelength_from_omega(omega2), cfg.arm_b);
  }
  if (n == 1) {
    FringeTerms terms;
    terms.same = window_overlap(dt(0), cfg.coincidence_window, sigma);
    terms.diff = window_overlap(dt(0) + cfg.arm_imbalance, cfg.coincidence_window, sigma) +
                 window_overlap(dt(0) - cfg.arm_imbalance, cfg.coincidence_window, sigma);
    return terms;
  }
  FringeTerms terms;
  double norm = 0.0;
  const double w = cfg.coincidence_window;
  const double imbalance = cfg.arm_imbalance;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double mass = 0.5 * (ens.weight(i) + ens.weight(i + 1));
    const double f0 = cell_mean_overlap(dt(i), dt(i + 1), w, sigma);
    const double fp = cell_mean_overlap(dt(i) + imbalance, dt(i + 1) + imbalance, w, sigma);
    const double fm = cell_mean_overlap(dt(i) - imbalance, dt(i + 1) - imbalance, w, sigma);
    terms.same += mass * f0;
    terms.diff += mass * (fp + fm);
    norm += mass;
  }
  terms.same /= norm;
  terms.diff /= norm;
  return terms;
}

double rate_at(const FringeTerms& terms, double phase_sum, double pump_phase) {
  return 0.5 * terms.same * (1.0 + std::cos(phase_sum + pump_phase)) +
         0.25 * terms.diff;
}

CoincidenceResult evaluate(const BiphotonEnsemble& ens, const FransonConfig& cfg,
                           double sigma) {
  const FringeTerms terms = accumulate_terms(ens, cfg, sigma);
  // Only the mod-2pi part of omega_p * dT is physical.
  const double pump_phase = std::fmod(ens.pump_omega * cfg.arm_imbalance, two_pi);

  CoincidenceResult result;
  result.curve.reserve(static_cast<std::size_t>(cfg.n_phase_steps));
  const double start = cfg.align_sweep ? two_pi - pump_phase : 0.0;
  for (int k = 0; k < cfg.n_phase_steps; ++k) {
    double phase = start + two_pi * static_cast<double>(k) /
                               static_cast<double>(cfg.n_phase_steps);
    if (phase >= two_pi) phase -= two_pi;
    result.curve.emplace_back(phase, rate_at(terms, phase, pump_phase));
  }
  result.rate = rate_at(terms, cfg.phase_a + cfg.phase_b, pump_phase);
  result.visibility = visibility(result.curve);
  return result;
}

}  // namespace

CoincidenceResult coincidence_rate(const BiphotonEnsemble& ensemble,
                                   const FransonConfig& config) {
  ensemble.validate();
  config.validate();
  const double sigma = config.pair_smearing_rms >= 0.0
                           ? config.pair_smearing_rms
                           : 0.5 / ensemble.detuning_rms();

  CoincidenceResult result = evaluate(ensemble, config, sigma);

  // Convergence check: refine the detuning grid (or coarsen a custom one) and
  // compare visibilities.
  double v_check;
  if (ensemble.shape != BiphotonEnsemble::Shape::custom) {
    const int refined_n = static_cast<int>(2 * ensemble.detuning.size() - 1);
    const BiphotonEnsemble refined =
        make_biphoton_ensemble(ensemble.pump_omega, ensemble.half_width,
                               refined_n, ensemble.span_sigmas, ensemble.shape);
    v_check = evaluate(refined, config, sigma).visibility;
  } else {
    BiphotonEnsemble coarse;
    coarse.pump_omega = ensemble.pump_omega;
    coarse.center_wavelength = ensemble.center_wavelength;
    coarse.half_width = ensemble.half_width;
    coarse.shape = BiphotonEnsemble::Shape::custom;
    const Eigen::Index m = (ensemble.detuning.size() + 1) / 2;
    coarse.detuning.resize(m);
    coarse.weight.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      coarse.detuning(i) = ensemble.detuning(2 * i);
      coarse.weight(i) = ensemble.weight(2 * i);
    }
    coarse.weight /= coarse.weight.sum();
    v_check = evaluate(coarse, config, sigma).visibility;
  }
  if (std::abs(v_check - result.visibility) > 1e-3) {
    result.converged = false;
    result.warnings.push_back("detuning grid too coarse: visibility not converged");
  }
  return result;
}

double visibility(const std::vector<std::pair<double, double>>& curve) {
  if (curve.empty()) throw std::domain_error("empty fringe curve");
  double lo = curve.front().second;
  double hi = lo;
  std::vector<double> phases;
  phases.reserve(curve.size());
  for (const auto& [phase, rate] : curve) {
    if (!(rate >= 0.0)) throw std::domain_error("fringe rates must be >= 0");
    phases.push_back(phase);
    lo = std::min(lo, rate);
    hi = std::max(hi, rate);
  }
  std::sort(phases.begin(), phases.end());
  const auto last = std::unique(phases.begin(), phases.end());
  if (std::distance(phases.begin(), last) < 3)
    throw std::domain_error("fringe curve needs at least 3 distinct phases");
  if (hi == 0.0) return 0.0;
  return (hi - lo) / (hi + lo);
}

ChshResult chsh_check(double visibility) {
  if (!(visibility >= 0.0) || !(visibility <= 1.0))
    throw std::domain_error("visibility must be in [0, 1]");
  ChshResult r;
  r.s_value = 2.0 * std::numbers::sqrt2 * visibility;
  r.violated = visibility > bell_visibility_threshold;
  return r;
}

}  // namespace fiberdeco

#include "fiberdeco/fiber.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fiberdeco/random.hpp"

namespace fiberdeco {

FiberSpec::FiberSpec(std::vector<FiberTrunk> trunks) : trunks_(std::move(trunks)) {
  if (trunks_.empty()) throw std::invalid_argument("fiber needs at least one trunk");
  total_length_ = 0.0;
  for (const FiberTrunk& t : trunks_) {
    if (!(t.length > 0.0)) throw std::invalid_argument("trunk length must be > 0");
    total_length_ += t.length;
  }
}

void FiberRandomModel::validate() const {
  if (n_trunks < 1) throw std::invalid_argument("fiber model needs n_trunks >= 1");
  if (!(trunk_length > 0.0))
    throw std::invalid_argument("fiber model trunk length must be > 0");
  if (!(beta_magnitude >= 0.0))
    throw std::invalid_argument("fiber model beta magnitude must be >= 0");
  if (!(length_jitter >= 0.0) || length_jitter >= 1.0)
    throw std::invalid_argument("fiber model length jitter must be in [0, 1)");
}

FiberSpec generate_fiber(const FiberRandomModel& model) {
  model.validate();
  Rng rng(model.seed);
  std::vector<FiberTrunk> trunks;
  trunks.reserve(static_cast<std::size_t>(model.n_trunks));
  for (int i = 0; i < model.n_trunks; ++i) {
    double length = model.trunk_length;
    if (model.length_jitter > 0.0)
      length *= 1.0 + model.length_jitter * rng.uniform(-1.0, 1.0);
    trunks.push_back({length,
                      BirefringenceVectord(rng.unit_sphere(), model.beta_magnitude)});
  }
  if (model.length_jitter > 0.0) {
    double total = 0.0;
    for (const FiberTrunk& t : trunks) total += t.length;
    const double rescale = model.n_trunks * model.trunk_length / total;
    for (FiberTrunk& t : trunks) t.length *= rescale;
  }
  return FiberSpec(std::move(trunks));
}

JonesOpd fiber_jones_matrix(const FiberSpec& fiber, double omega) {
  JonesOpd u = JonesOpd::Identity();
  for (const FiberTrunk& t : fiber.trunks())
    u = trunk_propagator(omega, t.length, t.beta) * u;
  return u;
}

std::vector<JonesOpd> fiber_jones_matrices(const FiberSpec& fiber,
                                           const SpectralGrid& grid) {
  grid.validate();
  std::vector<JonesOpd> out;
  out.reserve(static_cast<std::size_t>(grid.size()));
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    out.push_back(fiber_jones_matrix(fiber, grid.omega(i)));
  return out;
}

SpectralState propagate(std::span<const JonesOpd> matrices,
                        const SpectralState& state) {
  state.validate();
  if (matrices.size() != state.field.size())
    throw std::invalid_argument("matrix count must match the spectral grid");
  SpectralState out = state;
  for (std::size_t i = 0; i < out.field.size(); ++i)
    out.field[i] = matrices[i] * state.field[i];
  return out;
}

SpectralState propagate(const FiberSpec& fiber, const SpectralState& state) {
  return propagate(fiber_jones_matrices(fiber, state.grid), state);
}

SpectralState round_trip(std::span<const JonesOpd> matrices,
                         const SpectralState& state) {
  state.validate();
  if (matrices.size() != state.field.size())
    throw std::invalid_argument("matrix count must match the spectral grid");
  SpectralState out = state;
  for (std::size_t i = 0; i < out.field.size(); ++i)
    out.field[i] = matrices[i].adjoint() * faraday_mirror(matrices[i] * state.field[i]);
  return out;
}

SpectralState round_trip(const FiberSpec& fiber, const SpectralState& state) {
  return round_trip(fiber_jones_matrices(fiber, state.grid), state);
}

namespace {

// Half rotation angle of a unitary after factoring out the global phase.
double half_rotation_angle(const JonesOpd& gamma) {
  const std::complex<double> det = gamma.determinant();
  const double phase = 0.5 * std::arg(det);
  const std::complex<double> tr =
      gamma.trace() * std::polar(1.0, -phase) / std::sqrt(std::abs(det));
  return std::acos(std::clamp(std::abs(tr.real()) * 0.5, 0.0, 1.0));
}

double dgd_single_step(const FiberSpec& fiber, double omega, double delta) {
  const JonesOpd gamma =
      fiber_jones_matrix(fiber, omega + delta) * fiber_jones_matrix(fiber, omega).adjoint();
  return 2.0 * half_rotation_angle(gamma) / delta;
}

}  // namespace

double dgd_eigenanalysis(const FiberSpec& fiber, double omega, double delta_omega) {
  if (!(omega > 0.0) || !(delta_omega > 0.0))
    throw std::invalid_argument("dgd_eigenanalysis needs omega > 0 and delta > 0");
  double delta = delta_omega;
  double prev = dgd_single_step(fiber, omega, delta);
  for (int i = 0; i < 10; ++i) {
    delta *= 0.5;
    const double cur = dgd_single_step(fiber, omega, delta);
    // Agreement between steps rules out phase wrapping (rotation angle >= pi).
    // The finite-difference estimate of a random fiber carries an O(delta)
    // term from the rotation of the principal states, so the bar is 1e-3.
    if (std::abs(cur - prev) <= 1e-3 * std::max(cur, 1e-30) || cur < 1e-30) {
      return cur;
    }
    prev = cur;
  }
  throw std::runtime_error("dgd_eigenanalysis: step halving did not converge");
}

double dgd_band_average(const FiberSpec& fiber, const SpectralGrid& grid,
                        const Eigen::ArrayXd& density) {
  grid.validate();
  if (density.size() != grid.size())
    throw std::invalid_argument("density size must match the grid");
  if (grid.size() < 2)
    throw std::invalid_argument("band average needs at least two frequencies");

  std::vector<JonesOpd> u = fiber_jones_matrices(fiber, grid);
  double acc = 0.0;
  double norm = 0.0;
  for (Eigen::Index i = 0; i + 1 < grid.size(); ++i) {
    const double delta = grid.omega(i + 1) - grid.omega(i);
    const JonesOpd gamma = u[static_cast<std::size_t>(i + 1)] *
                           u[static_cast<std::size_t>(i)].adjoint();
    const double half = half_rotation_angle(gamma);
    if (half >= 0.5 * pi - 1e-9)
      throw std::runtime_error("dgd_band_average: grid too coarse for this fiber");
    const double dtau = 2.0 * half / delta;
    const double w = 0.5 * (grid.weight(i) * density(i) +
                            grid.weight(i + 1) * density(i + 1));
    acc += w * dtau;
    norm += w;
  }
  if (!(norm > 0.0)) throw std::runtime_error("dgd_band_average: empty band");
  return acc / norm;
}

void write_text(const FiberSpec& fiber, std::ostream& os) {
  os << "# length_m, dir_x, dir_y, dir_z, beta_s_per_m\n";
  char buf[192];
  for (const FiberTrunk& t : fiber.trunks()) {
    const Stokesd& d = t.beta.direction();
    std::snprintf(buf, sizeof(buf), "%.17g, %.17g, %.17g, %.17g, %.17g\n",
                  t.length, d(0), d(1), d(2), t.beta.magnitude());
    os << buf;
  }
}

FiberSpec read_fiber_text(std::istream& is) {
  std::vector<FiberTrunk> trunks;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ss(line);
    double length, x, y, z, mag;
    if (!(ss >> length)) continue;  // blank line
    if (!(ss >> x >> y >> z >> mag))
      throw std::runtime_error("fiber file: malformed trunk on line " +
                               std::to_string(lineno));
    trunks.push_back({length, BirefringenceVectord(Stokesd(x, y, z), mag)});
  }
  return FiberSpec(std::move(trunks));
}

}  // namespace fiberdeco

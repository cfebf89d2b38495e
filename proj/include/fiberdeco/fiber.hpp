#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fiberdeco/polarization.hpp"
#include "fiberdeco/spectral.hpp"

namespace fiberdeco {

struct FiberTrunk {
  double length;  // m, > 0
  BirefringenceVectord beta;
};

/// Concatenation of birefringent trunks; trunk 0 is entered first.
class FiberSpec {
 public:
  explicit FiberSpec(std::vector<FiberTrunk> trunks);

  const std::vector<FiberTrunk>& trunks() const { return trunks_; }
  double total_length() const { return total_length_; }

 private:
  std::vector<FiberTrunk> trunks_;
  double total_length_;
};

/// Random fiber: trunk axes i.i.d. uniform on the Poincaré sphere (Marsaglia
/// sampling, see Rng::unit_sphere), fixed |beta|. With length_jitter = 0 every
/// trunk has exactly trunk_length; strictly equal trunks make the Jones matrix
/// periodic in omega (all trunks share one delay product), which caps how far
/// a broadband state can depolarize. length_jitter u draws the lengths
/// uniformly from trunk_length * [1-u, 1+u], rescaled so the total length is
/// exactly n_trunks * trunk_length.
struct FiberRandomModel {
  int n_trunks = 230;
  double trunk_length = 100.0;      // m
  double beta_magnitude = 0.5e-15;  // s/m (0.5 ps/km)
  double length_jitter = 0.0;       // fraction in [0, 1)
  std::uint64_t seed = 1;

  void validate() const;
};

/// Deterministic for a given seed, bit-for-bit.
FiberSpec generate_fiber(const FiberRandomModel& model);

/// Ordered propagator product U_n ... U_1 at one frequency.
JonesOpd fiber_jones_matrix(const FiberSpec& fiber, double omega);

/// Propagator per grid frequency (precompute once, reuse across states).
std::vector<JonesOpd> fiber_jones_matrices(const FiberSpec& fiber,
                                           const SpectralGrid& grid);

/// Lossless one-way propagation: each frequency sample multiplied by the
/// fiber matrix; density unchanged.
SpectralState propagate(const FiberSpec& fiber, const SpectralState& state);
SpectralState propagate(std::span<const JonesOpd> matrices,
                        const SpectralState& state);

/// Go-and-return through the fiber with a Faraday mirror at the far end:
/// psi -> U^dag FM (U psi) per frequency, the return factors being the exact
/// inverses of the forward factors. Output Poincaré vectors are the exact
/// antipodes of the input ones.
SpectralState round_trip(const FiberSpec& fiber, const SpectralState& state);
SpectralState round_trip(std::span<const JonesOpd> matrices,
                         const SpectralState& state);

/// Differential group delay from the eigenvalue splitting of
/// U(omega+delta) U(omega)^-1: dtau = |arg l1 - arg l2| / delta. The step is
/// halved (up to 10 times) until two successive estimates agree; throws on
/// failure to converge.
double dgd_eigenanalysis(const FiberSpec& fiber, double omega,
                         double delta_omega);

/// Density-weighted average of the DGD across a spectral grid, evaluated
/// between adjacent grid frequencies.
double dgd_band_average(const FiberSpec& fiber, const SpectralGrid& grid,
                        const Eigen::ArrayXd& density);

/// Plain-text tabular format, one trunk per line:
/// length_m, dir_x, dir_y, dir_z, beta_s_per_m. '#' starts a comment.
void write_text(const FiberSpec& fiber, std::ostream& os);
FiberSpec read_fiber_text(std::istream& is);

}  // namespace fiberdeco

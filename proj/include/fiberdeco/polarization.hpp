#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace fiberdeco {

template <class Scalar>
using Jones = Eigen::Matrix<std::complex<Scalar>, 2, 1>;
template <class Scalar>
using JonesOp = Eigen::Matrix<std::complex<Scalar>, 2, 2>;
template <class Scalar>
using Stokes = Eigen::Matrix<Scalar, 3, 1>;

using Jonesd = Jones<double>;
using JonesOpd = JonesOp<double>;
using Stokesd = Stokes<double>;

// Pauli / Poincaré convention used everywhere: sigma1 = sigma_x (off-diagonal
// real), sigma2 = sigma_y, sigma3 = sigma_z (diagonal +-1). Linear horizontal
// (1,0) maps to (0,0,1); orthogonal Jones vectors map to antipodal Poincaré
// points. Global Jones phases are not observable.
//
// A propagator exp(i*theta/2 * n.sigma) rotates Poincaré vectors about n by
// the full angle theta, clockwise when looking down the +n axis (equivalently
// by -theta with the right-hand rule). There is no extra factor 2: theta =
// omega * length * |beta| already is the Poincaré rotation angle.

/// Maximum tolerated ||U^dag U - I||_F before a propagator is rejected.
inline constexpr double unitarity_tolerance = 1e-8;

template <class Derived>
auto poincare_from_jones(const Eigen::MatrixBase<Derived>& psi)
    -> Stokes<typename Eigen::NumTraits<typename Derived::Scalar>::Real> {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const std::complex<Real> a = psi(0);
  const std::complex<Real> b = psi(1);
  const Real n2 = std::norm(a) + std::norm(b);
  if (!(n2 > Real(0)) || !std::isfinite(n2))
    throw std::domain_error("null Jones vector");
  const std::complex<Real> ab = std::conj(a) * b;
  Stokes<Real> m;
  m << Real(2) * ab.real() / n2, Real(2) * ab.imag() / n2,
      (std::norm(a) - std::norm(b)) / n2;
  return m;
}

/// Unit Jones vector with the given Poincaré direction (phase convention:
/// first component real and nonnegative).
template <class Scalar>
Jones<Scalar> jones_from_poincare(const Stokes<Scalar>& m) {
  const Scalar n = m.norm();
  if (!(n > Scalar(0))) throw std::domain_error("null Poincaré vector");
  const Scalar s3 = std::clamp(m(2) / n, Scalar(-1), Scalar(1));
  const Scalar half_theta = Scalar(0.5) * std::acos(s3);
  const Scalar phi = std::atan2(m(1), m(0));
  Jones<Scalar> psi;
  psi << std::complex<Scalar>(std::cos(half_theta), 0),
      std::polar(std::sin(half_theta), phi);
  return psi;
}

/// Trunk birefringence: unit Poincaré-space axis plus magnitude in s/m
/// (differential delay per unit length). The axis is normalized on input.
template <class Scalar>
class BirefringenceVector {
 public:
  BirefringenceVector(const Stokes<Scalar>& axis, Scalar magnitude) {
    const Scalar n = axis.norm();
    if (!(n > Scalar(0)) || !std::isfinite(n))
      throw std::invalid_argument("birefringence axis must be a nonzero vector");
    if (!(magnitude >= Scalar(0)))
      throw std::invalid_argument("birefringence magnitude must be >= 0");
    direction_ = axis / n;
    magnitude_ = magnitude;
  }

  const Stokes<Scalar>& direction() const { return direction_; }
  Scalar magnitude() const { return magnitude_; }

 private:
  Stokes<Scalar> direction_;
  Scalar magnitude_;
};

using BirefringenceVectord = BirefringenceVector<double>;

/// exp(i omega length beta.sigma / 2) = cos(theta/2) I + i sin(theta/2) n.sigma
/// with theta = omega * length * |beta|. Unit-determinant unitary.
template <class Scalar>
JonesOp<Scalar> trunk_propagator(Scalar omega, Scalar length,
                                 const BirefringenceVector<Scalar>& beta) {
  if (!(omega > Scalar(0))) throw std::invalid_argument("omega must be > 0");
  if (!(length >= Scalar(0)))
    throw std::invalid_argument("trunk length must be >= 0");
  const Scalar half = Scalar(0.5) * omega * length * beta.magnitude();
  const Scalar c = std::cos(half);
  const Scalar s = std::sin(half);
  const Stokes<Scalar>& n = beta.direction();
  JonesOp<Scalar> u;
  u << std::complex<Scalar>(c, s * n(2)), std::complex<Scalar>(s * n(1), s * n(0)),
      std::complex<Scalar>(-s * n(1), s * n(0)), std::complex<Scalar>(c, -s * n(2));
  return u;
}

template <class Scalar>
Scalar unitarity_error(const JonesOp<Scalar>& u) {
  return (u.adjoint() * u - JonesOp<Scalar>::Identity()).norm();
}

template <class Scalar>
Jones<Scalar> apply_propagator(const JonesOp<Scalar>& u, const Jones<Scalar>& psi) {
  if (unitarity_error(u) > Scalar(unitarity_tolerance))
    throw std::domain_error("propagator is not unitary");
  return u * psi;
}

/// Faraday-mirror map: psi -> (-b*, a*). Takes every state to its orthogonal
/// state, i.e. reverses the Poincaré vector. Antilinear, so it must be applied
/// as a map rather than as a matrix.
template <class Derived>
auto faraday_mirror(const Eigen::MatrixBase<Derived>& psi)
    -> Jones<typename Eigen::NumTraits<typename Derived::Scalar>::Real> {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const std::complex<Real> a = psi(0);
  const std::complex<Real> b = psi(1);
  const Real n2 = std::norm(a) + std::norm(b);
  if (!(n2 > Real(0)) || !std::isfinite(n2))
    throw std::domain_error("null Jones vector");
  Jones<Real> out;
  out << -std::conj(b), std::conj(a);
  return out;
}

}  // namespace fiberdeco

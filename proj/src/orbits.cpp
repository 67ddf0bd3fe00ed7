#include "sftkit/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sftkit/errors.hpp"

namespace sftkit {

namespace {

bool near_integer(double x, double tol = kResonanceTolerance) {
  return std::abs(x - std::round(x)) < tol;
}

}  // namespace

std::optional<Rational> nearest_resonance(double x, int max_den, double tol) {
  for (int q = 1; q <= max_den; ++q) {
    const double scaled = x * q;
    const double p = std::round(scaled);
    if (std::abs(x - p / q) < tol) {
      return Rational{static_cast<long>(p), q};
    }
  }
  return std::nullopt;
}

OrbitClass::OrbitClass(std::string name, std::variant<Elliptic, Hyperbolic> kind,
                       std::optional<double> period, bool morse_bott)
    : name_(std::move(name)), kind_(kind), period_(period), morse_bott_(morse_bott) {}

OrbitClass OrbitClass::elliptic(std::string name, double theta, std::optional<double> period,
                                bool morse_bott) {
  if (!std::isfinite(theta)) {
    fail(ErrorKind::InvalidInput, "orbit '" + name + "': rotation number is not finite");
  }
  if (!morse_bott && near_integer(theta)) {
    fail(ErrorKind::InvalidInput,
         "orbit '" + name + "': elliptic rotation number is integral (degenerate orbit)");
  }
  if (period && !(*period > 0.0)) {
    fail(ErrorKind::InvalidInput, "orbit '" + name + "': period must be positive");
  }
  return OrbitClass(std::move(name), Elliptic{theta}, period, morse_bott);
}

OrbitClass OrbitClass::hyperbolic(std::string name, int cz, std::optional<double> period) {
  if (period && !(*period > 0.0)) {
    fail(ErrorKind::InvalidInput, "orbit '" + name + "': period must be positive");
  }
  return OrbitClass(std::move(name), Hyperbolic{cz}, period, false);
}

double OrbitClass::theta() const {
  if (!is_elliptic()) fail(ErrorKind::InvalidInput, "orbit '" + name_ + "' is hyperbolic");
  return std::get<Elliptic>(kind_).theta;
}

int OrbitClass::hyperbolic_cz() const {
  if (is_elliptic()) fail(ErrorKind::InvalidInput, "orbit '" + name_ + "' is elliptic");
  return std::get<Hyperbolic>(kind_).cz;
}

int OrbitClass::parity() const { return is_elliptic() ? 1 : floor_mod2(hyperbolic_cz()); }

std::optional<Rational> OrbitClass::resonance() const {
  if (!is_elliptic()) return std::nullopt;
  return nearest_resonance(theta());
}

OrbitInstance::OrbitInstance(OrbitClass orbit, int multiplicity)
    : orbit_(std::move(orbit)), multiplicity_(multiplicity) {
  if (multiplicity < 1) {
    fail(ErrorKind::InvalidInput,
         "orbit '" + orbit_.name() + "': multiplicity must be at least 1");
  }
}

int floor_mod2(int value) { return ((value % 2) + 2) % 2; }

SpectralData SpectralData::from_cz(int cz, int multiplicity) {
  if (multiplicity < 1) fail(ErrorKind::InvalidInput, "multiplicity must be at least 1");
  const int parity = floor_mod2(cz);
  SpectralData d;
  d.cz = cz;
  d.parity = parity;
  d.alpha_minus = (cz - parity) / 2;
  d.alpha_plus = (cz + parity) / 2;
  // std::gcd(m, 0) == m, so the clamp only matters for pathological input.
  d.sigma_minus = std::max(1, std::gcd(multiplicity, d.alpha_minus));
  d.sigma_plus = std::max(1, std::gcd(multiplicity, d.alpha_plus));
  return d;
}

SpectralData SpectralData::from_windings(int alpha_minus, int alpha_plus, int sigma_minus,
                                         int sigma_plus) {
  const int parity = alpha_plus - alpha_minus;
  if (parity != 0 && parity != 1) {
    fail(ErrorKind::InternalInconsistency,
         "extremal windings must differ by 0 or 1 (got " + std::to_string(alpha_minus) + ", " +
             std::to_string(alpha_plus) + ")");
  }
  if (sigma_minus < 1 || sigma_plus < 1) {
    fail(ErrorKind::InternalInconsistency, "spectral covering numbers must be positive");
  }
  return SpectralData{alpha_minus, alpha_plus, alpha_minus + alpha_plus, parity, sigma_minus,
                      sigma_plus};
}

int cz_of_cover(const OrbitClass& orbit, int k) {
  if (k < 1) fail(ErrorKind::InvalidInput, "cover degree must be at least 1");
  if (orbit.is_hyperbolic()) return k * orbit.hyperbolic_cz();
  const double rotation = k * orbit.theta();
  if (near_integer(rotation)) {
    fail(ErrorKind::DegenerateCover, "orbit '" + orbit.name() + "' cover " + std::to_string(k) +
                                         " has integral rotation " + std::to_string(rotation));
  }
  return 2 * static_cast<int>(std::floor(rotation)) + 1;
}

int perturbed_cz_of_cover(const OrbitClass& orbit, int k) {
  if (k < 1) fail(ErrorKind::InvalidInput, "cover degree must be at least 1");
  if (orbit.is_elliptic()) {
    const double rotation = k * orbit.theta();
    if (near_integer(rotation)) return 2 * static_cast<int>(std::lround(rotation)) - 1;
  }
  return cz_of_cover(orbit, k);
}

SpectralData spectral_data(const OrbitInstance& instance) {
  const int m = instance.multiplicity();
  return SpectralData::from_cz(cz_of_cover(instance.orbit(), m), m);
}

SpectralData perturbed_spectral_data(const OrbitInstance& instance) {
  const int m = instance.multiplicity();
  return SpectralData::from_cz(perturbed_cz_of_cover(instance.orbit(), m), m);
}

bool is_bad_orbit(const OrbitInstance& instance) {
  const OrbitClass& orbit = instance.orbit();
  return instance.multiplicity() % 2 == 0 && orbit.is_hyperbolic() &&
         floor_mod2(orbit.hyperbolic_cz()) == 1;
}

}  // namespace sftkit

#pragma once

// Closed-form spectral and index data for nondegenerate Reeb orbits in a
// contact 3-manifold and their multiple covers. All winding data is relative to
// one fixed reference trivialization per simple orbit; covers use its pullback.

#include <optional>
#include <string>
#include <variant>

namespace sftkit {

inline constexpr double kResonanceTolerance = 1e-9;
inline constexpr int kResonanceMaxDenominator = 64;

struct Rational {
  long num = 0;
  long den = 1;
  bool operator==(const Rational&) const = default;
};

// Closest p/q with q <= max_den lying within tol of x, if any (smallest q wins).
std::optional<Rational> nearest_resonance(double x, int max_den = kResonanceMaxDenominator,
                                          double tol = kResonanceTolerance);

struct Elliptic {
  double theta = 0.0;  // rotation number relative to the reference trivialization
};

struct Hyperbolic {
  int cz = 0;  // Conley-Zehnder index of the simple orbit
};

class OrbitClass {
 public:
  // Throws InvalidInput when theta is within tolerance of an integer, unless the
  // orbit is declared part of a Morse-Bott family.
  static OrbitClass elliptic(std::string name, double theta,
                             std::optional<double> period = std::nullopt,
                             bool morse_bott = false);
  static OrbitClass hyperbolic(std::string name, int cz,
                               std::optional<double> period = std::nullopt);

  const std::string& name() const { return name_; }
  const std::variant<Elliptic, Hyperbolic>& kind() const { return kind_; }
  std::optional<double> period() const { return period_; }
  bool morse_bott() const { return morse_bott_; }

  bool is_elliptic() const { return std::holds_alternative<Elliptic>(kind_); }
  bool is_hyperbolic() const { return !is_elliptic(); }
  double theta() const;  // InvalidInput for hyperbolic orbits
  int hyperbolic_cz() const;  // InvalidInput for elliptic orbits

  // Parity of the simple orbit.
  int parity() const;

  // Near-rational rotation number (q <= 64), reported rather than rejected:
  // only the covers k with q | k are actually degenerate.
  std::optional<Rational> resonance() const;

 private:
  OrbitClass(std::string name, std::variant<Elliptic, Hyperbolic> kind,
             std::optional<double> period, bool morse_bott);

  std::string name_;
  std::variant<Elliptic, Hyperbolic> kind_;
  std::optional<double> period_;
  bool morse_bott_ = false;
};

class OrbitInstance {
 public:
  OrbitInstance(OrbitClass orbit, int multiplicity);  // multiplicity >= 1

  const OrbitClass& orbit() const { return orbit_; }
  int multiplicity() const { return multiplicity_; }

 private:
  OrbitClass orbit_;
  int multiplicity_;
};

struct SpectralData {
  int alpha_minus = 0;
  int alpha_plus = 0;
  int cz = 0;
  int parity = 0;
  int sigma_minus = 1;
  int sigma_plus = 1;

  // Extremal windings of the cover gamma^m, with spectral covering numbers
  // sigma = gcd(m, alpha).
  static SpectralData from_cz(int cz, int multiplicity);

  // Checks cz = a- + a+, parity = a+ - a- in {0,1} and sigma >= 1.
  static SpectralData from_windings(int alpha_minus, int alpha_plus, int sigma_minus,
                                    int sigma_plus);

  bool operator==(const SpectralData&) const = default;
};

int floor_mod2(int value);

int cz_of_cover(const OrbitClass& orbit, int k);

// Index of the cover after an infinitesimal positive shift of the asymptotic
// operator. Equal to cz_of_cover for nondegenerate covers; an elliptic cover
// with integral rotation j (identity monodromy) gives 2j - 1.
int perturbed_cz_of_cover(const OrbitClass& orbit, int k);

SpectralData spectral_data(const OrbitInstance& instance);
SpectralData perturbed_spectral_data(const OrbitInstance& instance);

// Even cover of a simple hyperbolic orbit with odd index.
bool is_bad_orbit(const OrbitInstance& instance);

}  // namespace sftkit

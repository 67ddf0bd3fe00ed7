#pragma once

// Integer invariants of punctured pseudoholomorphic curves in symplectizations
// (n = 2) and in completed cobordisms of dimension 2n, computed from the
// asymptotic data of their punctures.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sftkit/orbits.hpp"

namespace sftkit {

enum class Sign { Positive, Negative };

struct Puncture {
  Sign sign = Sign::Positive;
  OrbitInstance instance;
  std::optional<SpectralData> spectral;  // perturbed data when morse_bott
  bool morse_bott = false;
  std::optional<int> wind_infinity;

  // Fills spectral from the closed-form orbit data.
  static Puncture make(Sign sign, OrbitInstance instance, bool morse_bott = false,
                       std::optional<int> wind_infinity = std::nullopt);

  bool positive() const { return sign == Sign::Positive; }
  // Throws MissingSpectralData when absent.
  const SpectralData& data() const;
};

struct PuncturedCurve;

struct CoverData {
  std::shared_ptr<const PuncturedCurve> underlying;
  int degree = 2;
  std::optional<int> branch_count;  // checked against Riemann-Hurwitz when given
};

struct PuncturedCurve {
  std::string name;
  int half_dim_n = 2;
  int genus = 0;
  std::vector<Puncture> punctures;
  int c1_rel = 0;
  bool somewhere_injective = true;
  bool embedded = false;
  std::optional<bool> immersed;
  std::optional<int> delta;
  std::optional<int> delta_infinity;
  bool trivial_cylinder = false;
  std::optional<CoverData> cover_of;

  int euler_characteristic() const;
  int positive_count() const;
  int negative_count() const;

  // Structural checks on the record itself; InvalidInput on failure.
  void validate() const;
};

// Trivial cylinder R x gamma^m: one positive and one negative puncture, c1 = 0.
PuncturedCurve trivial_cylinder(const OrbitInstance& instance, std::string name = "trivial");

int fredholm_index(const PuncturedCurve& curve);

// Also asserts 2 c_N = ind - 2 + 2g + #Gamma_0.
int normal_chern(const PuncturedCurve& curve);

// Number of punctures whose (perturbed) parity is even.
int even_puncture_count(const PuncturedCurve& curve);

struct DefectReport {
  int d0 = 0;
  int wind_pi = 0;
};
DefectReport asymptotic_defect_and_windpi(const PuncturedCurve& curve);

int self_intersection(const PuncturedCurve& curve);

struct NicenessReport {
  bool nice = false;
  bool auto_transversal = false;
};
NicenessReport is_nicely_embedded(const PuncturedCurve& curve);

// The bounds c_N <= 0 and ind <= 2 that every nicely embedded curve satisfies;
// InternalInconsistency when violated.
void enforce_nice_bounds(int index, int normal_chern_number);

enum class CoverBranch { HyperbolicEnds, TrivialCylinder };

struct CoverReport {
  CoverBranch branch = CoverBranch::HyperbolicEnds;
  int index = 0;
  int bound = 0;  // k * ind(v), or 0 for trivial-cylinder covers
  int branch_points = 0;
  bool equality = false;
  bool pass = false;
};
CoverReport cover_index_check(const PuncturedCurve& curve);

struct SelfLinkingReport {
  int cz_disk = 0;
  int sl = 0;
};
SelfLinkingReport self_linking_of_plane(const PuncturedCurve& curve);

}  // namespace sftkit

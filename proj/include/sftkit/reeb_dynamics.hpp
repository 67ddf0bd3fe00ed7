#pragma once

// Reeb flow of alpha_H = alpha_std / H on S^3, where
// H(z1, z2) = |z1|^2 / a_sq + |z2|^2 / b_sq, i.e. the boundary of an ellipsoid
// pushed radially onto the unit sphere; closed orbits, their linearized return
// maps, and quotients by cyclic unitary groups.

#include <Eigen/Core>
#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace sftkit {

using C2 = Eigen::Vector2cd;

inline constexpr double kSphereTolerance = 1e-8;

struct EllipsoidParams {
  double a_sq = 1.0;
  double b_sq = 1.0;
  bool irrational_ratio = false;  // when set, a_sq / b_sq must not be near p/q, q <= 64

  void validate() const;  // InvalidInput
};

struct LensParams {
  int p = 1;
  int q = 1;

  void validate() const;  // InvalidInput unless gcd(p,q) = 1 and (p > q >= 1 or p = q = 1)
};

double hamiltonian(const C2& z, const EllipsoidParams& params);
double alpha_std(const C2& z, const C2& v);
double alpha_h(const C2& z, const C2& v, const EllipsoidParams& params);
// d(alpha_H)(x, y) at z.
double d_alpha_h(const C2& z, const C2& x, const C2& y, const EllipsoidParams& params);

// NotOnSphere when ||z| - 1| exceeds kSphereTolerance.
C2 reeb_field(const C2& z, const EllipsoidParams& params);

struct FieldResiduals {
  double alpha = 0.0;   // max |alpha_H(R) - 1|
  double dalpha = 0.0;  // max |d alpha_H(R, v)| over a tangent basis
};
// Defining conditions of the Reeb field on `samples` random points of S^3.
FieldResiduals reeb_residuals(const EllipsoidParams& params, int samples, unsigned seed = 1);

C2 flow_exact(const C2& z, double t, const EllipsoidParams& params);
C2 rk4_step(const C2& z, double h, const EllipsoidParams& params);
C2 flow_rk4(const C2& z, double t, const EllipsoidParams& params, double h = 1e-3);

struct ClosedOrbitRecord {
  C2 initial_point;
  double period = 0.0;
  std::array<std::complex<double>, 2> floquet_multipliers{};
  double rotation_number = 0.0;  // per period, constant frame
  int cz_disk = 0;
  bool simple = true;
};

struct OrbitSearchOptions {
  double period_cap = 0.0;  // 0: 4 pi max(a_sq, b_sq)
  int grid = 32;
  double tol = 1e-8;
  double step = 1e-3;
  int threads = 0;
};

// ResonanceSuspected if a return is found off the coordinate circles.
std::vector<ClosedOrbitRecord> find_closed_orbits(const EllipsoidParams& params,
                                                  const OrbitSearchOptions& options = {});

struct FloquetReport {
  std::array<std::complex<double>, 2> multipliers{};
  double rotation_number = 0.0;  // per simple period, constant frame
  int frame_shift = 0;           // winding of the constant frame relative to the disk frame
  double disk_rotation = 0.0;    // rotation_number + frame_shift
  int cz_disk = 0;
};
// DegenerateOrbit when a multiplier of the k-th iterate lies within 1e-8 of 1.
FloquetReport floquet_and_cz(const ClosedOrbitRecord& orbit, const EllipsoidParams& params,
                             int cover_k, double step = 1e-3);

// Linking number of the orbit with its push-off along the disk frame.
int self_linking_numeric(const ClosedOrbitRecord& orbit, const EllipsoidParams& params,
                         double step = 1e-3);

using OneForm = std::function<double(const C2& z, const C2& v)>;

struct DescendedOrbit {
  double period = 0.0;  // T / p
  int group_power = 0;  // flow for T/p lands on g^k of the start
  double residual = 0.0;
};

struct LensReport {
  double invariance_residual = 0.0;
  std::vector<DescendedOrbit> orbits;
  bool noncontractible = false;
  std::string justification;
};
// NotInvariant when the form is not G_{p,q}-invariant to 1e-10; `form`
// defaults to alpha_H.
LensReport lens_quotient_report(const EllipsoidParams& params, const LensParams& lens,
                                const std::vector<ClosedOrbitRecord>& orbits,
                                const OneForm& form = {}, int samples = 1000);

}  // namespace sftkit

#pragma once

// Numerical oracle for the asymptotic operator of a Reeb orbit in a fixed
// trivialization,
//
//     A = -J0 d/dt - S(t),   t in R/Z,
//
// acting on loops eta : R/Z -> R^2 = C. The operator is discretized in the
// Fourier basis; because S need not commute with J0, it is real-linear only,
// so each complex coefficient contributes two real unknowns.

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sftkit/orbits.hpp"

namespace sftkit {

class MatrixLoop {
 public:
  // samples[i] = S(i / N). N must be even and >= 64; each sample symmetric to 1e-12.
  // multiplicity m selects the operator of the m-fold cover, -J0 d/dt - m S(m t).
  MatrixLoop(std::vector<Eigen::Matrix2d> samples, int multiplicity = 1);

  static MatrixLoop constant(const Eigen::Matrix2d& s, int samples, int multiplicity = 1);
  static MatrixLoop scalar(double c, int samples, int multiplicity = 1);
  static MatrixLoop diagonal(double a, double b, int samples, int multiplicity = 1);
  static MatrixLoop sampled(const std::function<Eigen::Matrix2d(double)>& s, int samples,
                            int multiplicity = 1);

  int size() const { return static_cast<int>(samples_.size()); }
  int multiplicity() const { return multiplicity_; }
  const std::vector<Eigen::Matrix2d>& samples() const { return samples_; }

  // Samples of m S(m t) on the same grid; exact since m n mod N is a grid index.
  std::vector<Eigen::Matrix2d> cover_samples() const;

 private:
  std::vector<Eigen::Matrix2d> samples_;
  int multiplicity_;
};

struct EigenRecord {
  double eigenvalue = 0.0;
  std::vector<std::complex<double>> eigenfunction;  // unit discrete L2 norm
  int winding = 0;
  int cover_multiplicity = 1;
};

struct SpectrumOptions {
  double tol_eig = 1e-8;
  double tol_zero = 1e-6;
  double tol_cover = 1e-6;
  // Fourier modes kept beyond those whose diagonal entry 2 pi l can reach the window.
  int pad_modes = 32;
};

// All eigenpairs with |lambda| <= window, sorted by lambda.
std::vector<EigenRecord> solve_spectrum(const MatrixLoop& loop, double window,
                                        const SpectrumOptions& options = {});

struct AxiomReport {
  bool monotone = true;
  bool two_to_one = true;
  std::vector<std::string> failures;

  bool passed() const { return monotone && two_to_one; }
};

// Winding is non-decreasing in lambda and every winding strictly inside the
// observed range is carried by exactly two eigenvalues (with multiplicity).
AxiomReport verify_spectral_axioms(std::span<const EigenRecord> records);

// Windings and covering multiplicities of the largest negative and smallest
// positive eigenvalues.
SpectralData extremal_data(std::span<const EigenRecord> records, int multiplicity);

}  // namespace sftkit

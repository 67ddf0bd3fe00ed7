#include "sftkit/asymptotic_spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <unsupported/Eigen/FFT>

#include "sftkit/errors.hpp"

namespace sftkit {

namespace {

using cplx = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Fourier coefficients of a sampled periodic function on [-N/2, N/2]; the
// Nyquist coefficient is split evenly between +N/2 and -N/2.
class FourierSeries {
 public:
  explicit FourierSeries(const std::vector<cplx>& values) : n_(static_cast<int>(values.size())) {
    Eigen::FFT<double> fft;
    std::vector<cplx> spectrum;
    fft.fwd(spectrum, values);
    coeffs_.assign(static_cast<size_t>(n_ + 1), cplx{});
    const int half = n_ / 2;
    for (int k = -half; k <= half; ++k) {
      cplx c = spectrum[static_cast<size_t>((k + n_) % n_)] / static_cast<double>(n_);
      if (k == half || k == -half) c *= 0.5;
      coeffs_[static_cast<size_t>(k + half)] = c;
    }
  }

  cplx operator[](int k) const {
    const int half = n_ / 2;
    if (k < -half || k > half) return {};
    return coeffs_[static_cast<size_t>(k + half)];
  }

  // Largest |k| carrying a coefficient above tol.
  int bandwidth(double tol) const {
    const int half = n_ / 2;
    for (int k = half; k > 0; --k) {
      if (std::abs((*this)[k]) > tol || std::abs((*this)[-k]) > tol) return k;
    }
    return 0;
  }

 private:
  int n_;
  std::vector<cplx> coeffs_;
};

std::vector<cplx> evaluate(const std::vector<cplx>& coeffs, int lmax, int grid) {
  std::vector<cplx> out(static_cast<size_t>(grid));
  for (int n = 0; n < grid; ++n) {
    const double t = static_cast<double>(n) / grid;
    cplx acc{};
    for (int l = -lmax; l <= lmax; ++l) {
      acc += coeffs[static_cast<size_t>(l + lmax)] * std::polar(1.0, kTwoPi * l * t);
    }
    out[static_cast<size_t>(n)] = acc;
  }
  return out;
}

struct WindingResult {
  int winding = 0;
  double min_modulus = 0.0;
  double max_step = 0.0;
};

WindingResult winding_of(const std::vector<cplx>& samples) {
  WindingResult r;
  r.min_modulus = std::abs(samples.front());
  double total = 0.0;
  const size_t n = samples.size();
  for (size_t i = 0; i < n; ++i) {
    const cplx a = samples[i];
    const cplx b = samples[(i + 1) % n];
    r.min_modulus = std::min(r.min_modulus, std::abs(a));
    const double step = std::arg(b / a);
    r.max_step = std::max(r.max_step, std::abs(step));
    total += step;
  }
  r.winding = static_cast<int>(std::lround(total / kTwoPi));
  return r;
}

// Largest j | m with eta(t + 1/j) = eta(t) to tolerance on the grid.
int cover_multiplicity(const std::vector<cplx>& coeffs, int lmax, int grid, int m, double tol) {
  for (int j = m; j > 1; --j) {
    if (m % j != 0) continue;
    std::vector<cplx> diff(coeffs.size());
    for (int l = -lmax; l <= lmax; ++l) {
      const size_t i = static_cast<size_t>(l + lmax);
      diff[i] = coeffs[i] * (std::polar(1.0, kTwoPi * l / j) - 1.0);
    }
    const auto values = evaluate(diff, lmax, grid);
    double worst = 0.0;
    for (const auto& v : values) worst = std::max(worst, std::abs(v));
    if (worst < tol) return j;
  }
  return 1;
}

}  // namespace

MatrixLoop::MatrixLoop(std::vector<Eigen::Matrix2d> samples, int multiplicity)
    : samples_(std::move(samples)), multiplicity_(multiplicity) {
  const int n = size();
  if (n < 64 || n % 2 != 0) {
    fail(ErrorKind::InvalidInput, "matrix loop needs an even number of samples >= 64, got " +
                                      std::to_string(n));
  }
  if (multiplicity < 1) fail(ErrorKind::InvalidInput, "loop multiplicity must be >= 1");
  for (int i = 0; i < n; ++i) {
    const auto& s = samples_[static_cast<size_t>(i)];
    if (!s.allFinite()) fail(ErrorKind::InvalidInput, "loop sample " + std::to_string(i) + " is not finite");
    if (std::abs(s(0, 1) - s(1, 0)) > 1e-12) {
      fail(ErrorKind::InvalidInput, "loop sample " + std::to_string(i) + " is not symmetric");
    }
  }
}

MatrixLoop MatrixLoop::constant(const Eigen::Matrix2d& s, int samples, int multiplicity) {
  return MatrixLoop(std::vector<Eigen::Matrix2d>(static_cast<size_t>(std::max(samples, 0)), s),
                    multiplicity);
}

MatrixLoop MatrixLoop::scalar(double c, int samples, int multiplicity) {
  return constant(c * Eigen::Matrix2d::Identity(), samples, multiplicity);
}

MatrixLoop MatrixLoop::diagonal(double a, double b, int samples, int multiplicity) {
  Eigen::Matrix2d s;
  s << a, 0.0, 0.0, b;
  return constant(s, samples, multiplicity);
}

MatrixLoop MatrixLoop::sampled(const std::function<Eigen::Matrix2d(double)>& s, int samples,
                               int multiplicity) {
  std::vector<Eigen::Matrix2d> values;
  values.reserve(static_cast<size_t>(std::max(samples, 0)));
  for (int i = 0; i < samples; ++i) values.push_back(s(static_cast<double>(i) / samples));
  return MatrixLoop(std::move(values), multiplicity);
}

std::vector<Eigen::Matrix2d> MatrixLoop::cover_samples() const {
  const int n = size();
  const int m = multiplicity_;
  std::vector<Eigen::Matrix2d> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const long idx = (static_cast<long>(m) * i) % n;
    out.push_back(m * samples_[static_cast<size_t>(idx)]);
  }
  return out;
}

std::vector<EigenRecord> solve_spectrum(const MatrixLoop& loop, double window,
                                        const SpectrumOptions& options) {
  if (!(window > 0.0)) fail(ErrorKind::InvalidInput, "spectral window must be positive");
  const int n = loop.size();
  const auto s = loop.cover_samples();

  // S eta  <->  sc(t) z + w(t) conj(z)  for z = x + i y.
  std::vector<cplx> sc(static_cast<size_t>(n)), w(static_cast<size_t>(n));
  double norm_bound = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& m = s[static_cast<size_t>(i)];
    const double p = m(0, 0), q = 0.5 * (m(0, 1) + m(1, 0)), r = m(1, 1);
    sc[static_cast<size_t>(i)] = cplx(0.5 * (p + r), 0.0);
    w[static_cast<size_t>(i)] = cplx(0.5 * (p - r), q);
    norm_bound = std::max(norm_bound, std::abs(0.5 * (p + r)) + std::abs(w[static_cast<size_t>(i)]));
  }
  const FourierSeries s_hat(sc), w_hat(w);
  const double band_tol = 1e-15 * std::max(1.0, norm_bound);
  const int band = std::max(s_hat.bandwidth(band_tol), w_hat.bandwidth(band_tol));

  const int reach = static_cast<int>(std::ceil((window + norm_bound) / kTwoPi));
  const int lmax = std::min(n / 2 - 1, reach + options.pad_modes + 2 * band);
  const int modes = 2 * lmax + 1;
  const int dim = 2 * modes;

  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(dim, dim);
  for (int l = -lmax; l <= lmax; ++l) {
    const int row = 2 * (l + lmax);
    op(row, row) += kTwoPi * l;
    op(row + 1, row + 1) += kTwoPi * l;
    for (int j = -lmax; j <= lmax; ++j) {
      const int col = 2 * (j + lmax);
      // -sc_hat[l-j] c_j
      const cplx a = -s_hat[l - j];
      op(row, col) += a.real();
      op(row, col + 1) += -a.imag();
      op(row + 1, col) += a.imag();
      op(row + 1, col + 1) += a.real();
      // -w_hat[l+j] conj(c_j)
      const cplx b = -w_hat[l + j];
      op(row, col) += b.real();
      op(row, col + 1) += b.imag();
      op(row + 1, col) += b.imag();
      op(row + 1, col + 1) += -b.real();
    }
  }
  const double asym = (op - op.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * std::max(1.0, op.cwiseAbs().maxCoeff())) {
    fail(ErrorKind::InternalInconsistency, "discretized asymptotic operator is not symmetric");
  }
  op = 0.5 * (op + op.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op);
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::InternalInconsistency, "eigen-decomposition failed");
  }
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();

  std::vector<EigenRecord> records;
  for (int i = 0; i < dim; ++i) {
    const double lambda = values(i);
    if (std::abs(lambda) < options.tol_eig) {
      fail(ErrorKind::DegenerateOperator,
           "eigenvalue " + std::to_string(lambda) + " lies at zero (degenerate orbit)");
    }
    if (std::abs(lambda) > window) continue;

    std::vector<cplx> coeffs(static_cast<size_t>(modes));
    for (int k = 0; k < modes; ++k) {
      coeffs[static_cast<size_t>(k)] = cplx(vectors(2 * k, i), vectors(2 * k + 1, i));
    }

    int grid = n;
    std::vector<cplx> samples = evaluate(coeffs, lmax, grid);
    WindingResult wr = winding_of(samples);
    int refinements = 0;
    const int max_refinements = 6;
    // Grid must resolve the phase; one extra refinement is allowed for near-zero dips.
    while (wr.max_step > std::numbers::pi / 4 && refinements < max_refinements) {
      grid *= 2;
      samples = evaluate(coeffs, lmax, grid);
      wr = winding_of(samples);
      ++refinements;
    }
    if (wr.min_modulus < options.tol_zero) {
      grid *= 2;
      samples = evaluate(coeffs, lmax, grid);
      wr = winding_of(samples);
      if (wr.min_modulus < options.tol_zero) {
        fail(ErrorKind::ZeroCrossing,
             "eigenfunction for lambda = " + std::to_string(lambda) + " vanishes somewhere");
      }
    }

    EigenRecord rec;
    rec.eigenvalue = lambda;
    rec.winding = wr.winding;
    rec.cover_multiplicity =
        cover_multiplicity(coeffs, lmax, grid, loop.multiplicity(), options.tol_cover);
    rec.eigenfunction = std::move(samples);
    records.push_back(std::move(rec));
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const EigenRecord& a, const EigenRecord& b) { return a.eigenvalue < b.eigenvalue; });
  return records;
}

AxiomReport verify_spectral_axioms(std::span<const EigenRecord> records) {
  if (records.size() < 8) {
    fail(ErrorKind::InsufficientWindow,
         "need at least 8 eigenvalues, found " + std::to_string(records.size()));
  }
  AxiomReport report;
  for (size_t i = 1; i < records.size(); ++i) {
    if (records[i].winding < records[i - 1].winding) {
      report.monotone = false;
      report.failures.push_back("winding decreases between lambda=" +
                                std::to_string(records[i - 1].eigenvalue) + " (w=" +
                                std::to_string(records[i - 1].winding) + ") and lambda=" +
                                std::to_string(records[i].eigenvalue) + " (w=" +
                                std::to_string(records[i].winding) + ")");
    }
  }
  std::map<int, int> counts;
  int lo = records.front().winding, hi = records.front().winding;
  for (const auto& r : records) {
    ++counts[r.winding];
    lo = std::min(lo, r.winding);
    hi = std::max(hi, r.winding);
  }
  // Windings at the window edges may be cut off; only interior ones are checked.
  for (int wv = lo + 1; wv < hi; ++wv) {
    const int c = counts.count(wv) ? counts[wv] : 0;
    if (c != 2) {
      report.two_to_one = false;
      report.failures.push_back("winding " + std::to_string(wv) + " carried by " +
                                std::to_string(c) + " eigenvalues");
    }
  }
  return report;
}

SpectralData extremal_data(std::span<const EigenRecord> records, int multiplicity) {
  const EigenRecord* neg = nullptr;
  const EigenRecord* pos = nullptr;
  for (const auto& r : records) {
    if (r.eigenvalue < 0.0 && (!neg || r.eigenvalue > neg->eigenvalue)) neg = &r;
    if (r.eigenvalue > 0.0 && (!pos || r.eigenvalue < pos->eigenvalue)) pos = &r;
  }
  if (!neg || !pos) {
    fail(ErrorKind::InsufficientWindow,
         "window must contain both a negative and a positive eigenvalue");
  }
  if (multiplicity % neg->cover_multiplicity != 0 || multiplicity % pos->cover_multiplicity != 0) {
    fail(ErrorKind::InternalInconsistency, "cover multiplicity does not divide the orbit multiplicity");
  }
  return SpectralData::from_windings(neg->winding, pos->winding, neg->cover_multiplicity,
                                     pos->cover_multiplicity);
}

}  // namespace sftkit

#include "sftkit/reeb_dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <thread>

#include "sftkit/errors.hpp"
#include "sftkit/orbits.hpp"

namespace sftkit {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

C2 field_unchecked(const C2& z, const EllipsoidParams& p) {
  return C2(2.0 * kI * z(0) / p.a_sq, 2.0 * kI * z(1) / p.b_sq);
}

void require_on_sphere(const C2& z) {
  const double r = z.norm();
  if (!std::isfinite(r) || std::abs(r - 1.0) > kSphereTolerance) {
    fail(ErrorKind::NotOnSphere, "|z| = " + std::to_string(r));
  }
}

double herm_im(const C2& x, const C2& y) {
  return (std::conj(x(0)) * y(0) + std::conj(x(1)) * y(1)).imag();
}

double herm_re(const C2& x, const C2& y) {
  return (std::conj(x(0)) * y(0) + std::conj(x(1)) * y(1)).real();
}

C2 random_sphere_point(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  C2 z(cplx(n(rng), n(rng)), cplx(n(rng), n(rng)));
  return z / z.norm();
}

// Tangent basis of S^3 at z: the Hopf direction and the complex line orthogonal to z.
std::array<C2, 3> tangent_basis(const C2& z) {
  const C2 hopf = kI * z;
  const C2 perp(-std::conj(z(1)), std::conj(z(0)));
  return {hopf, perp, C2(kI * perp)};
}

double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                       double width = 1e-14) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > width; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Total argument change of a sampled complex curve, in turns.
double winding_turns(const std::vector<cplx>& values) {
  double total = 0.0;
  for (size_t i = 1; i < values.size(); ++i) total += std::arg(values[i] / values[i - 1]);
  return total / (2.0 * kPi);
}

// Coordinate circle the orbit lies on: 0 for {z2 = 0}, 1 for {z1 = 0}.
int circle_of(const ClosedOrbitRecord& orbit) {
  return std::abs(orbit.initial_point(1)) < std::abs(orbit.initial_point(0)) ? 0 : 1;
}

struct Return {
  double period;
};

std::optional<Return> first_return(const C2& x, const EllipsoidParams& p, double cap, double h,
                                   double tol) {
  const double vmax = 2.0 / std::min(p.a_sq, p.b_sq);
  const double coarse = 1e-2 + 4.0 * h * vmax;
  C2 z0 = x, z1 = rk4_step(x, h, p);
  double d0 = 0.0, d1 = (z1 - x).norm();
  const long steps = static_cast<long>(std::ceil(cap / h));
  for (long n = 2; n <= steps; ++n) {
    const C2 z2 = rk4_step(z1, h, p);
    const double d2 = (z2 - x).norm();
    if (d1 <= d0 && d1 <= d2 && d1 < coarse) {
      const C2 base = z0;
      auto dist = [&](double s) { return (rk4_step(base, s, p) - x).norm(); };
      const double s = golden_minimize(dist, 0.0, 2.0 * h);
      if (dist(s) < tol) return Return{static_cast<double>(n - 2) * h + s};
    }
    z0 = z1;
    z1 = z2;
    d0 = d1;
    d1 = d2;
  }
  return std::nullopt;
}

double distance_to_orbit(const C2& x, const ClosedOrbitRecord& orbit, const EllipsoidParams& p) {
  const int samples = 4096;
  double best = 1e300, best_t = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = orbit.period * i / samples;
    const double d = (flow_exact(orbit.initial_point, t, p) - x).norm();
    if (d < best) {
      best = d;
      best_t = t;
    }
  }
  const double w = orbit.period / samples;
  auto f = [&](double t) { return (flow_exact(orbit.initial_point, t, p) - x).norm(); };
  const double t = golden_minimize(f, best_t - w, best_t + w);
  return std::min(best, f(t));
}

}  // namespace

void EllipsoidParams::validate() const {
  if (!(a_sq > 0.0) || !(b_sq > 0.0) || !std::isfinite(a_sq) || !std::isfinite(b_sq)) {
    fail(ErrorKind::InvalidInput, "ellipsoid parameters must be positive and finite");
  }
  if (irrational_ratio && nearest_resonance(a_sq / b_sq)) {
    fail(ErrorKind::InvalidInput, "a_sq / b_sq is within 1e-9 of a rational with denominator <= 64");
  }
}

void LensParams::validate() const {
  if (p < 1 || q < 1 || std::gcd(p, q) != 1 || !(p > q || (p == 1 && q == 1))) {
    fail(ErrorKind::InvalidInput, "lens parameters need gcd(p,q) = 1 and p > q >= 1 (or p = q = 1)");
  }
}

double hamiltonian(const C2& z, const EllipsoidParams& p) {
  return std::norm(z(0)) / p.a_sq + std::norm(z(1)) / p.b_sq;
}

double alpha_std(const C2& z, const C2& v) { return 0.5 * herm_im(z, v); }

double alpha_h(const C2& z, const C2& v, const EllipsoidParams& p) {
  return alpha_std(z, v) / hamiltonian(z, p);
}

double d_alpha_h(const C2& z, const C2& x, const C2& y, const EllipsoidParams& p) {
  const double h = hamiltonian(z, p);
  auto dh = [&](const C2& v) {
    return 2.0 * (std::conj(z(0)) * v(0)).real() / p.a_sq + 2.0 * (std::conj(z(1)) * v(1)).real() / p.b_sq;
  };
  auto df = [&](const C2& v) { return -dh(v) / (h * h); };
  return df(x) * alpha_std(z, y) - df(y) * alpha_std(z, x) + herm_im(x, y) / h;
}

C2 reeb_field(const C2& z, const EllipsoidParams& params) {
  require_on_sphere(z);
  params.validate();
  return field_unchecked(z, params);
}

FieldResiduals reeb_residuals(const EllipsoidParams& params, int samples, unsigned seed) {
  params.validate();
  std::mt19937_64 rng(seed);
  FieldResiduals r;
  for (int i = 0; i < samples; ++i) {
    const C2 z = random_sphere_point(rng);
    const C2 rv = reeb_field(z, params);
    r.alpha = std::max(r.alpha, std::abs(alpha_h(z, rv, params) - 1.0));
    // R must also be tangent to the sphere.
    r.dalpha = std::max(r.dalpha, std::abs(herm_re(z, rv)));
    for (const auto& v : tangent_basis(z)) {
      r.dalpha = std::max(r.dalpha, std::abs(d_alpha_h(z, rv, v, params)));
    }
  }
  return r;
}

C2 flow_exact(const C2& z, double t, const EllipsoidParams& p) {
  return C2(z(0) * std::exp(2.0 * kI * t / p.a_sq), z(1) * std::exp(2.0 * kI * t / p.b_sq));
}

C2 rk4_step(const C2& z, double h, const EllipsoidParams& p) {
  const C2 k1 = field_unchecked(z, p);
  const C2 k2 = field_unchecked(z + 0.5 * h * k1, p);
  const C2 k3 = field_unchecked(z + 0.5 * h * k2, p);
  const C2 k4 = field_unchecked(z + h * k3, p);
  return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

C2 flow_rk4(const C2& z, double t, const EllipsoidParams& p, double h) {
  const long n = static_cast<long>(std::floor(t / h));
  C2 w = z;
  for (long i = 0; i < n; ++i) w = rk4_step(w, h, p);
  const double rest = t - n * h;
  if (rest > 0.0) w = rk4_step(w, rest, p);
  return w;
}

std::vector<ClosedOrbitRecord> find_closed_orbits(const EllipsoidParams& params,
                                                  const OrbitSearchOptions& opt) {
  params.validate();
  if (opt.grid < 2 || !(opt.tol > 0.0) || !(opt.step > 0.0)) {
    fail(ErrorKind::InvalidInput, "orbit search needs grid >= 2 and positive tol and step");
  }
  const FieldResiduals res = reeb_residuals(params, 64);
  if (res.alpha > 1e-10 || res.dalpha > 1e-10) {
    fail(ErrorKind::InternalInconsistency, "Reeb field fails its defining conditions");
  }
  const double cap = opt.period_cap > 0.0 ? opt.period_cap : 4.0 * kPi * std::max(params.a_sq, params.b_sq);
  const int g = opt.grid;

  std::vector<C2> starts;
  for (int i = 0; i < g; ++i) {
    const double psi = 0.5 * kPi * i / (g - 1);
    for (int j = 0; j < g; ++j) {
      const double phi = 2.0 * kPi * j / g;
      starts.emplace_back(cplx(std::cos(psi), 0.0), std::sin(psi) * std::exp(kI * phi));
    }
  }

  std::vector<std::optional<Return>> found(starts.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < starts.size(); i = next++) {
      found[i] = first_return(starts[i], params, cap, opt.step, opt.tol);
    }
  };
  if (opt.threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < opt.threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (size_t i = 0; i < starts.size(); ++i) {
    const C2& x = starts[i];
    if (found[i] && std::min(std::abs(x(0)), std::abs(x(1))) > 1e-6) {
      fail(ErrorKind::ResonanceSuspected,
           "closed orbit of period " + std::to_string(found[i]->period) +
               " through a point off the coordinate circles");
    }
  }
  std::vector<ClosedOrbitRecord> orbits;
  for (size_t i = 0; i < starts.size(); ++i) {
    if (!found[i]) continue;
    const C2& x = starts[i];
    bool duplicate = false;
    for (const auto& o : orbits) {
      if (std::abs(o.period - found[i]->period) < 1e-6 && distance_to_orbit(x, o, params) < 10.0 * opt.tol) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    ClosedOrbitRecord rec;
    rec.initial_point = x;
    rec.period = found[i]->period;
    if ((flow_exact(x, rec.period, params) - x).norm() > 10.0 * opt.tol) {
      fail(ErrorKind::InternalInconsistency, "integrated period disagrees with the exact flow");
    }
    const FloquetReport fr = floquet_and_cz(rec, params, 1, opt.step);
    rec.floquet_multipliers = fr.multipliers;
    rec.rotation_number = fr.rotation_number;
    rec.cz_disk = fr.cz_disk;
    orbits.push_back(rec);
  }
  std::sort(orbits.begin(), orbits.end(),
            [](const ClosedOrbitRecord& a, const ClosedOrbitRecord& b) { return a.period < b.period; });
  return orbits;
}

FloquetReport floquet_and_cz(const ClosedOrbitRecord& orbit, const EllipsoidParams& params,
                             int cover_k, double step) {
  params.validate();
  require_on_sphere(orbit.initial_point);
  if (cover_k < 1) fail(ErrorKind::InvalidInput, "cover degree must be >= 1");
  const int c = circle_of(orbit);
  const int t_idx = 1 - c;  // transverse coordinate
  C2 e1 = C2::Zero(), e2 = C2::Zero();
  e1(t_idx) = 1.0;
  e2(t_idx) = kI;

  // The field is linear, so the variational equation is the same ODE.
  const double total = cover_k * orbit.period;
  const long n = static_cast<long>(std::ceil(total / step));
  const double h = total / n;
  C2 u = e1, w = e2;
  double angle = 0.0;
  for (long i = 0; i < n; ++i) {
    const C2 un = rk4_step(u, h, params);
    angle += std::arg(un(t_idx) / u(t_idx));
    u = un;
    w = rk4_step(w, h, params);
  }
  Eigen::Matrix2d m;
  m << u(t_idx).real(), w(t_idx).real(), u(t_idx).imag(), w(t_idx).imag();
  Eigen::EigenSolver<Eigen::Matrix2d> es(m);
  const auto ev = es.eigenvalues();
  FloquetReport r;
  r.multipliers = {ev(0), ev(1)};
  for (const auto& mu : r.multipliers) {
    if (std::abs(mu - 1.0) < 1e-8) {
      fail(ErrorKind::DegenerateOrbit, "Floquet multiplier within 1e-8 of 1 for cover " + std::to_string(cover_k));
    }
  }
  r.rotation_number = angle / (2.0 * kPi * cover_k);
  // First multiplier follows the rotation direction.
  if (std::abs(r.multipliers[0] - u(t_idx)) > std::abs(r.multipliers[1] - u(t_idx))) {
    std::swap(r.multipliers[0], r.multipliers[1]);
  }

  // Disk frame X_D(z) = (-conj z2, conj z1) extends over any spanning disk; its
  // transverse coordinate along the orbit winds against the constant frame.
  std::vector<cplx> frame;
  const long samples = std::max<long>(2048, static_cast<long>(std::ceil(orbit.period / step)));
  for (long i = 0; i <= samples; ++i) {
    const C2 z = flow_exact(orbit.initial_point, orbit.period * i / samples, params);
    const C2 xd(-std::conj(z(1)), std::conj(z(0)));
    frame.push_back(xd(t_idx));
  }
  r.frame_shift = -static_cast<int>(std::lround(winding_turns(frame)));
  r.disk_rotation = r.rotation_number + r.frame_shift;
  const auto elliptic = OrbitClass::elliptic("disk", r.disk_rotation);
  r.cz_disk = cz_of_cover(elliptic, cover_k);
  return r;
}

int self_linking_numeric(const ClosedOrbitRecord& orbit, const EllipsoidParams& params, double step) {
  params.validate();
  const int c = circle_of(orbit);
  const int t_idx = 1 - c;
  const double eps = 1e-3;
  const long n = static_cast<long>(std::ceil(orbit.period / step));
  const double h = orbit.period / n;
  // Linking with the circle {z_t = 0} is the winding of the z_t coordinate.
  std::vector<cplx> values;
  C2 z = orbit.initial_point;
  for (long i = 0; i <= n; ++i) {
    const C2 xd(-std::conj(z(1)), std::conj(z(0)));
    const C2 push = z + eps * xd;
    values.push_back(push(t_idx));
    z = rk4_step(z, h, params);
  }
  // Both coordinate circles are oriented by the flow; Hopf fibres link +1.
  return static_cast<int>(std::lround(winding_turns(values)));
}

LensReport lens_quotient_report(const EllipsoidParams& params, const LensParams& lens,
                                const std::vector<ClosedOrbitRecord>& orbits, const OneForm& form,
                                int samples) {
  params.validate();
  lens.validate();
  const OneForm alpha = form ? form : OneForm([&](const C2& z, const C2& v) { return alpha_h(z, v, params); });
  const cplx g1 = std::exp(2.0 * kI * kPi / static_cast<double>(lens.p));
  const cplx g2 = std::exp(2.0 * kI * kPi * static_cast<double>(lens.q) / static_cast<double>(lens.p));
  auto act = [&](const C2& z, int k) {
    return C2(z(0) * std::pow(g1, k), z(1) * std::pow(g2, k));
  };

  LensReport r;
  std::mt19937_64 rng(12345);
  for (int i = 0; i < samples; ++i) {
    const C2 z = random_sphere_point(rng);
    for (const auto& v : tangent_basis(z)) {
      r.invariance_residual = std::max(r.invariance_residual, std::abs(alpha(act(z, 1), act(v, 1)) - alpha(z, v)));
    }
  }
  if (r.invariance_residual > 1e-10) {
    fail(ErrorKind::NotInvariant, "pullback residual " + std::to_string(r.invariance_residual));
  }
  for (const auto& o : orbits) {
    DescendedOrbit d;
    d.period = o.period / lens.p;
    const C2 end = flow_rk4(o.initial_point, d.period, params);
    d.residual = 1e300;
    for (int k = 0; k < lens.p; ++k) {
      const double res = (end - act(o.initial_point, k)).norm();
      if (res < d.residual) {
        d.residual = res;
        d.group_power = k;
      }
    }
    if (d.residual > 1e-8) {
      fail(ErrorKind::InternalInconsistency, "orbit does not close up in the quotient at T/p");
    }
    r.orbits.push_back(d);
  }
  r.noncontractible = lens.p > 1;
  r.justification = r.noncontractible ? "lift to the universal cover is non-closed"
                                      : "trivial quotient";
  return r;
}

}  // namespace sftkit

#include "plasmon/specfun.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace plasmon {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kLn2 = 0.69314718055994530942;
constexpr int kMaxSeriesTerms = 400;

void require_order(int n) {
  if (n != 0 && n != 1) {
    throw std::invalid_argument("cylindrical Bessel order must be 0 or 1, got " + std::to_string(n));
  }
}

// sum_k (-1)^k (z/2)^{2k+n} / (k! (k+n)!)
cplx j_series(int n, cplx z) {
  const cplx half = 0.5 * z;
  const cplx q = -half * half;
  cplx term = (n == 0) ? cplx{1.0} : half;
  cplx sum = term;
  for (int k = 1; k < kMaxSeriesTerms; ++k) {
    term *= q / (double(k) * double(k + n));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) && k > 2) break;
  }
  return sum;
}

cplx y_series(int n, cplx z) {
  const cplx half = 0.5 * z;
  const cplx q = -half * half;
  const cplx log_half = std::log(half);
  if (n == 0) {
    // (2/pi)[ln(z/2) + gamma] J0 + (2/pi) sum_{k>=1} (-1)^{k+1} H_k (z^2/4)^k / (k!)^2
    cplx term{1.0};
    cplx tail{0.0};
    double harmonic = 0.0;
    for (int k = 1; k < kMaxSeriesTerms; ++k) {
      term *= q / (double(k) * double(k));
      harmonic += 1.0 / k;
      const cplx add = -harmonic * term;
      tail += add;
      if (std::abs(add) <= 1e-17 * std::abs(tail) && k > 2) break;
    }
    return (2.0 / kPi) * ((log_half + kEulerGamma) * j_series(0, z) + tail);
  }
  // -2/(pi z) + (2/pi) ln(z/2) J1 - (1/pi) sum_k (-1)^k [psi(k+1)+psi(k+2)] (z/2)^{2k+1}/(k!(k+1)!)
  cplx term = half;
  double h_k = 0.0;
  double h_k1 = 1.0;
  cplx tail = (-2.0 * kEulerGamma + h_k + h_k1) * term;
  for (int k = 1; k < kMaxSeriesTerms; ++k) {
    term *= q / (double(k) * double(k + 1));
    h_k += 1.0 / k;
    h_k1 += 1.0 / (k + 1);
    const cplx add = (-2.0 * kEulerGamma + h_k + h_k1) * term;
    tail += add;
    if (std::abs(add) <= 1e-17 * std::abs(tail) && k > 2) break;
  }
  return -2.0 / (kPi * z) + (2.0 / kPi) * log_half * j_series(1, z) - tail / kPi;
}

// Large-argument expansion of H_n^{(1)} (sign = +1) or H_n^{(2)} (sign = -1).
cplx hankel_asymptotic(int n, cplx z, int sign) {
  const double mu = 4.0 * n * n;
  const cplx unit = double(sign) * kI;
  cplx term{1.0};
  cplx sum = term;
  double last = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= unit * (mu - odd * odd) / (8.0 * k * z);
    const double mag = std::abs(term);
    if (mag > last) break;
    sum += term;
    last = mag;
    if (mag < 1e-17 * std::abs(sum)) break;
  }
  const cplx phase = z - (0.5 * n + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * z)) * std::exp(unit * phase) * sum;
}

void require_omega_range(double omega) {
  if (!(omega > 0.0) || omega > kOmegaCeiling) {
    throw std::domain_error("remainder kernels need omega in (0, " + std::to_string(kOmegaCeiling) +
                            "], got " + std::to_string(omega));
  }
}

}  // namespace

double laplace_green(double r, int dim) {
  if (!(r > 0.0)) throw std::domain_error("laplace_green: r must be positive");
  if (dim == 2) return std::log(r) / (2.0 * kPi);
  if (dim == 3) return -1.0 / (4.0 * kPi * r);
  throw std::invalid_argument("dimension must be 2 or 3");
}

cplx bessel_j(int n, cplx z) {
  require_order(n);
  if (std::abs(z) < kHankelCrossover) return j_series(n, z);
  return 0.5 * (hankel_asymptotic(n, z, 1) + hankel_asymptotic(n, z, -1));
}

cplx bessel_y(int n, cplx z) {
  require_order(n);
  if (z == cplx{0.0}) throw std::domain_error("bessel_y: singular at z = 0");
  if (std::abs(z) < kHankelCrossover) return y_series(n, z);
  return (hankel_asymptotic(n, z, 1) - hankel_asymptotic(n, z, -1)) / (2.0 * kI);
}

cplx hankel1(int n, cplx z) {
  require_order(n);
  if (z == cplx{0.0}) throw std::domain_error("hankel1: singular at z = 0");
  if (std::abs(z) < kHankelCrossover) return j_series(n, z) + kI * y_series(n, z);
  return hankel_asymptotic(n, z, 1);
}

cplx bessel_j0_minus_one(cplx z) {
  if (std::abs(z) >= kHankelCrossover) return bessel_j(0, z) - 1.0;
  const cplx q = -0.25 * z * z;
  cplx term{1.0};
  cplx sum{0.0};
  for (int k = 1; k < kMaxSeriesTerms; ++k) {
    term *= q / (double(k) * double(k));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

RadialGreen helmholtz_green_radial(double r, cplx k, int dim) {
  if (!(r > 0.0)) throw std::domain_error("helmholtz_green: r must be positive");
  if (dim == 2) {
    if (k == cplx{0.0}) {
      return {std::log(r) / (2.0 * kPi), 1.0 / (2.0 * kPi * r), -1.0 / (2.0 * kPi * r * r)};
    }
    const cplx kr = k * r;
    const cplx h0 = hankel1(0, kr);
    const cplx h1 = hankel1(1, kr);
    return {-0.25 * kI * h0, 0.25 * kI * k * h1, 0.25 * kI * k * k * (h0 - h1 / kr)};
  }
  if (dim == 3) {
    const cplx e = std::exp(kI * k * r) / (4.0 * kPi);
    return {-e / r, -e * (kI * k / r - 1.0 / (r * r)),
            -e * (-k * k / r - 2.0 * kI * k / (r * r) + 2.0 / (r * r * r))};
  }
  throw std::invalid_argument("dimension must be 2 or 3");
}

cplx helmholtz_green(double r, cplx k, int dim) { return helmholtz_green_radial(r, k, dim).value; }

cplx tau_constant(cplx k) {
  if (k == cplx{0.0}) throw std::domain_error("tau: k must be nonzero");
  return (std::log(k) + kEulerGamma - kLn2) / (2.0 * kPi) - 0.25 * kI;
}

cplx tau_constant(double omega) {
  if (!(omega > 0.0)) throw std::domain_error("tau: omega must be positive");
  return tau_constant(cplx{omega, 0.0});
}

cplx remainder_kernel(double r, double omega, int dim) {
  require_omega_range(omega);
  if (r < 0.0) throw std::domain_error("remainder_kernel: negative distance");
  if (dim == 2) {
    if (r == 0.0) return 0.0;
    const double x = omega * r;
    const double lx = std::log(x);
    // sum_n (b_n ln x + c_n) x^{2n}, c_n = b_n (gamma - ln 2 - i pi/2 - H_n)
    double b = 1.0 / (2.0 * kPi);
    double harmonic = 0.0;
    double power = 1.0;
    cplx sum{0.0};
    for (int n = 1; n < kMaxSeriesTerms; ++n) {
      b *= -1.0 / (4.0 * n * n);
      harmonic += 1.0 / n;
      power *= x * x;
      const cplx c = b * (kEulerGamma - kLn2 - 0.5 * kPi * kI - harmonic);
      const cplx add = (b * lx + c) * power;
      sum += add;
      if (std::abs(add) <= 1e-17 * std::abs(sum) && n > 1) break;
    }
    return sum / (omega * omega * std::log(omega));
  }
  if (dim == 3) {
    const cplx ix = kI * omega * r;
    if (std::abs(ix) < 0.5) {
      // sum_{n>=1} (i omega r)^{n-1} / n!
      cplx term{1.0};
      cplx sum{1.0};
      for (int n = 2; n < 40; ++n) {
        term *= ix / double(n);
        sum += term;
        if (std::abs(term) < 1e-18) break;
      }
      return -kI / (4.0 * kPi) * sum;
    }
    return -(std::exp(ix) - 1.0) / (4.0 * kPi * omega * r);
  }
  throw std::invalid_argument("dimension must be 2 or 3");
}

cplx remainder_kernel_dr(double r, double omega, int dim) {
  require_omega_range(omega);
  if (r < 0.0) throw std::domain_error("remainder_kernel_dr: negative distance");
  if (dim == 2) {
    if (r == 0.0) return 0.0;
    const double x = omega * r;
    const double lx = std::log(x);
    double b = 1.0 / (2.0 * kPi);
    double harmonic = 0.0;
    double power = 1.0;
    cplx sum{0.0};
    for (int n = 1; n < kMaxSeriesTerms; ++n) {
      b *= -1.0 / (4.0 * n * n);
      harmonic += 1.0 / n;
      power *= x * x;
      const cplx c = b * (kEulerGamma - kLn2 - 0.5 * kPi * kI - harmonic);
      const cplx add = (b * (1.0 + 2.0 * n * lx) + 2.0 * n * c) * power;
      sum += add;
      if (std::abs(add) <= 1e-17 * std::abs(sum) && n > 1) break;
    }
    return sum / (r * omega * omega * std::log(omega));
  }
  if (dim == 3) {
    const cplx iw = kI * omega;
    if (std::abs(iw * r) < 0.5) {
      // -(i/4pi) sum_{n>=2} (n-1) (i omega)^{n-1} r^{n-2} / n!
      cplx power = iw;  // (i omega)^{n-1} r^{n-2} at n = 2
      double fact = 2.0;
      cplx sum = power / fact;
      for (int n = 3; n < 40; ++n) {
        power *= iw * r;
        fact *= n;
        const cplx add = double(n - 1) * power / fact;
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
      }
      return -kI / (4.0 * kPi) * sum;
    }
    const cplx e = std::exp(iw * r);
    return -(iw * e / r - (e - 1.0) / (r * r)) / (4.0 * kPi * omega);
  }
  throw std::invalid_argument("dimension must be 2 or 3");
}

cplx interior_wavenumber(double omega, double eps_c, double delta) {
  if (!(eps_c < 0.0)) throw std::invalid_argument("interior_wavenumber: eps_c must be negative");
  if (!(omega > 0.0)) throw std::invalid_argument("interior_wavenumber: omega must be positive");
  if (delta < 0.0) throw std::invalid_argument("interior_wavenumber: delta must be non-negative");
  return -kI * (omega / std::sqrt(-eps_c)) * (1.0 - kI * delta / (2.0 * eps_c));
}

ScaledSphericalBessel scaled_spherical_bessel(int nmax, cplx z) {
  if (nmax < 0) throw std::invalid_argument("spherical Bessel order must be non-negative");
  const int count = nmax + 2;
  ScaledSphericalBessel out;
  out.jhat.assign(count, 0.0);
  out.hhat.assign(count, 0.0);
  const cplx z2 = z * z;

  // hhat_{n+1} = hhat_n - hhat_{n-1} z^2 / ((2n+1)(2n-1))
  const cplx e = std::exp(kI * z);
  out.hhat[0] = -kI * e;
  out.hhat[1] = -e * (z + kI);
  for (int n = 1; n + 1 < count; ++n) {
    out.hhat[n + 1] = out.hhat[n] - out.hhat[n - 1] * z2 / ((2.0 * n + 1.0) * (2.0 * n - 1.0));
  }

  // Downward Miller recurrence: jhat_{n-1} = jhat_n - jhat_{n+1} z^2 / ((2n+1)(2n+3))
  const int start = count + 30 + int(2.0 * std::abs(z));
  std::vector<cplx> trial(start + 2, 0.0);
  trial[start] = 1e-30;
  for (int n = start; n >= 1; --n) {
    trial[n - 1] = trial[n] - trial[n + 1] * z2 / ((2.0 * n + 1.0) * (2.0 * n + 3.0));
    const double mag = std::abs(trial[n - 1]);
    if (mag > 1e250) {
      for (int m = n - 1; m <= start; ++m) trial[m] *= 1e-250;
    }
  }
  cplx scale;
  const cplx sinc = (z == cplx{0.0}) ? cplx{1.0} : std::sin(z) / z;
  if (std::abs(sinc) > 0.1 || std::abs(z) < 1.0) {
    scale = sinc / trial[0];
  } else {
    const cplx j1hat = 3.0 * (std::sin(z) - z * std::cos(z)) / (z * z2);
    scale = j1hat / trial[1];
  }
  for (int n = 0; n < count; ++n) out.jhat[n] = trial[n] * scale;
  return out;
}

SphericalBessel spherical_bessel(int nmax, cplx z) {
  if (z == cplx{0.0}) throw std::domain_error("spherical_bessel: h_n is singular at z = 0");
  const auto scaled = scaled_spherical_bessel(nmax, z);
  SphericalBessel out;
  out.j.resize(nmax + 1);
  out.h.resize(nmax + 1);
  cplx jfac{1.0};  // z^n / (2n+1)!!
  cplx hfac = 1.0 / z;  // (2n-1)!! / z^{n+1}
  for (int n = 0; n <= nmax; ++n) {
    if (n > 0) {
      jfac *= z / (2.0 * n + 1.0);
      hfac *= (2.0 * n - 1.0) / z;
    }
    out.j[n] = scaled.jhat[n] * jfac;
    out.h[n] = scaled.hhat[n] * hfac;
  }
  return out;
}

cplx spherical_j(int n, cplx z) {
  if (z == cplx{0.0}) return n == 0 ? 1.0 : 0.0;
  return spherical_bessel(n, z).j[n];
}

cplx spherical_h(int n, cplx z) { return spherical_bessel(n, z).h[n]; }

double plasmon_lambda(double t) {
  if (t == 1.0) throw std::domain_error("plasmon_lambda: pole at t = 1");
  return (t + 1.0) / (2.0 * (t - 1.0));
}

double plasmon_epsilon(double lambda) {
  if (lambda == 0.5) throw std::domain_error("plasmon_epsilon: lambda = 1/2 has no dielectric preimage");
  return (2.0 * lambda + 1.0) / (2.0 * lambda - 1.0);
}

}  // namespace plasmon

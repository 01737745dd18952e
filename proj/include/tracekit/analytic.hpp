#pragma once
// Complex-polynomial machinery: Horner evaluation, unit-circle arcs, the
// per-stage Moebius maps between the output-series variable w and the input
// polynomial argument z, rotation products, and a numeric check of the
// n^-L arc lower bound for nonzero {-1,0,1} polynomials.
//
// Map directions, fixed once here:
//   forward (series variable -> polynomial argument)
//     deletion:  w -> p*w + q
//     insertion: w -> alpha*w / (1 - beta*w)
//   inverse (polynomial argument -> series variable)
//     deletion:  z    -> (z - q) / p
//     insertion: zeta -> zeta / (alpha + beta*zeta)
// Forward maps send the unit circle to a smaller circle internally tangent
// at 1; the inverse maps send it to a larger tangent circle (|w| >= 1).
// Substitution rescales the series by (1 - 2*lambda) and leaves the
// variable unchanged.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "tracekit/bitstring.hpp"
#include "tracekit/channels.hpp"

namespace tracekit {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Horner (backward recurrence) evaluation of sum_k coeffs[k] z^k.
template <typename Seq>
Complex eval_poly(const Seq& coeffs, Complex z) {
  if (coeffs.size() == 0) throw std::invalid_argument("eval_poly: empty coefficient sequence");
  if (!is_finite(z)) throw std::invalid_argument("eval_poly: non-finite argument");
  Complex acc(static_cast<double>(coeffs[coeffs.size() - 1]), 0.0);
  for (std::size_t i = coeffs.size() - 1; i-- > 0;)
    acc = acc * z + Complex(static_cast<double>(coeffs[i]), 0.0);
  return acc;
}

// The arc gamma_L = { e^(i*theta) : |theta| <= pi/L } sampled uniformly.
struct ArcSpec {
  double L = 2.0;
  std::size_t sample_count = 4096;

  void validate() const {
    if (!(L >= 1.0)) throw std::invalid_argument("ArcSpec: L must be >= 1");
    if (sample_count < 2) throw std::invalid_argument("ArcSpec: sample_count must be >= 2");
  }

  double spacing() const { return (2.0 * std::numbers::pi / L) / static_cast<double>(sample_count - 1); }
};

// default grid resolution for arc maxima: max(4096, 64*n*L)
inline ArcSpec default_arc_spec(std::size_t n, double L) {
  const double want = 64.0 * static_cast<double>(n) * L;
  return ArcSpec{L, std::max<std::size_t>(4096, static_cast<std::size_t>(want))};
}

inline std::vector<Complex> arc_points(const ArcSpec& spec) {
  spec.validate();
  std::vector<Complex> pts(spec.sample_count);
  const double half = std::numbers::pi / spec.L;
  const auto m = static_cast<double>(spec.sample_count - 1);
  for (std::size_t i = 0; i < spec.sample_count; ++i) {
    // symmetric form so theta = 0 is hit exactly for odd counts
    const double theta = (2.0 * static_cast<double>(i) / m - 1.0) * half;
    pts[i] = std::polar(1.0, theta);
  }
  return pts;
}

struct ArcMax {
  Complex z_star;
  double value = 0.0;
};

// Sampled-grid maximum of |A| on gamma_L; a lower bound on the true arc max.
inline ArcMax arc_max(const SignedSeq& a, const ArcSpec& spec) {
  if (!a.is_nonzero()) throw std::invalid_argument("arc_max: zero sequence");
  ArcMax best;
  bool first = true;
  for (const Complex& z : arc_points(spec)) {
    const double v = std::abs(eval_poly(a, z));
    if (first || v > best.value) {
      best = {z, v};
      first = false;
    }
  }
  return best;
}

// inverse deletion map: w = (z - q)/p
inline Complex deletion_moebius(Complex z, double q) {
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("deletion_moebius: q must be in [0,1)");
  if (!is_finite(z)) throw std::invalid_argument("deletion_moebius: non-finite argument");
  return (z - q) / (1.0 - q);
}

// inverse insertion map: w = zeta / (alpha + beta*zeta); pole at -alpha/beta
inline Complex insertion_moebius(Complex zeta, double beta) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("insertion_moebius: beta must be in [0,1)");
  if (!is_finite(zeta)) throw std::invalid_argument("insertion_moebius: non-finite argument");
  const Complex denom = (1.0 - beta) + beta * zeta;
  if (std::abs(denom) < 1e-300) throw std::domain_error("insertion_moebius: pole");
  return zeta / denom;
}

// Inverse per-stage maps applied in stage order: sends the argument of the
// input polynomial A to the series variable w of the composed channel's
// output. Substitution stages contribute only a scalar prefactor, never a
// change of variable.
inline Complex composed_map(Complex z, const ChannelSpec& spec) {
  spec.validate();
  if (!is_finite(z)) throw std::invalid_argument("composed_map: non-finite argument");
  Complex w = z;
  for (Stage s : spec.stage_order) {
    switch (s) {
      case Stage::deletion: w = deletion_moebius(w, spec.deletion_q); break;
      case Stage::insertion: w = insertion_moebius(w, spec.insertion_beta); break;
      case Stage::substitution: break;
    }
  }
  return w;
}

// Forward per-stage maps applied in reverse stage order: the exact inverse of
// composed_map. Sends the series variable w to the polynomial argument; maps
// the unit circle into the closed unit disc, tangent to it at the common
// fixed point 1.
inline Complex composed_forward_map(Complex w, const ChannelSpec& spec) {
  spec.validate();
  if (!is_finite(w)) throw std::invalid_argument("composed_forward_map: non-finite argument");
  Complex z = w;
  for (std::size_t i = spec.stage_order.size(); i-- > 0;) {
    switch (spec.stage_order[i]) {
      case Stage::deletion: z = (1.0 - spec.deletion_q) * z + spec.deletion_q; break;
      case Stage::insertion: {
        const Complex denom = 1.0 - spec.insertion_beta * z;
        if (std::abs(denom) < 1e-300) throw std::domain_error("composed_forward_map: pole");
        z = (1.0 - spec.insertion_beta) * z / denom;
        break;
      }
      case Stage::substitution: break;
    }
  }
  return z;
}

// F(z) = prod_{j=0}^{L-1} A(z * e^(2*pi*i*j/L))
inline Complex product_of_rotations(const SignedSeq& a, int L, Complex z) {
  if (L < 1) throw std::invalid_argument("product_of_rotations: L must be >= 1");
  Complex f(1.0, 0.0);
  for (int j = 0; j < L; ++j) {
    const Complex rot = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) /
                                            static_cast<double>(L));
    f *= eval_poly(a, z * rot);
  }
  return f;
}

struct WeakBoundReport {
  std::size_t n = 0;
  int L = 0;
  double max_on_arc = 0.0;
  double bound = 0.0;       // n^-L
  double tolerance = 0.0;   // n^2 * grid spacing, covering grid undershoot
  bool consistent = false;  // max_on_arc >= bound - tolerance
};

// Checks the sampled arc maximum of |A| on gamma_L against n^-L. The
// tolerance uses |A'| <= n^2 on the unit circle, so `consistent` is sound
// against grid undershoot.
inline WeakBoundReport verify_weak_bound(const SignedSeq& a, int L, std::size_t sample_count) {
  if (!a.is_nonzero()) throw std::invalid_argument("verify_weak_bound: zero sequence");
  if (L < 1) throw std::invalid_argument("verify_weak_bound: L must be >= 1");
  const ArcSpec grid{static_cast<double>(L), sample_count};
  grid.validate();
  const auto n = a.size();
  WeakBoundReport r;
  r.n = n;
  r.L = L;
  r.max_on_arc = arc_max(a, grid).value;
  r.bound = std::pow(static_cast<double>(n), -static_cast<double>(L));
  r.tolerance = static_cast<double>(n) * static_cast<double>(n) * grid.spacing();
  r.consistent = r.max_on_arc >= r.bound - r.tolerance;
  return r;
}

inline WeakBoundReport verify_weak_bound(const SignedSeq& a, int L) {
  return verify_weak_bound(a, L, default_arc_spec(a.size(), static_cast<double>(L)).sample_count);
}

}  // namespace tracekit

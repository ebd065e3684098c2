#pragma once

// Globally adaptive Gauss-Kronrod (10/21) integration with caller-supplied
// breakpoints. The interval with the largest error estimate is bisected
// until the summed estimate meets max(abs_tol, rel_tol * |I|).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include "collapsim/errors.hpp"

namespace collapsim::quad {

struct Options {
  double abs_tol = 1e-15;
  double rel_tol = 1e-12;
  std::size_t max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
  bool converged = false;
};

namespace detail {

inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452, 0.930157491355708226001207180059508,
    0.865063366688984510732096688423493, 0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784, 0.294392862701460198131126603103866,
    0.148874338981631210884826001129720, 0.0};
inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390, 0.054755896574351996031381300244580,
    0.075039674810919952767043140916190, 0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707, 0.142775938577060080797094273138717,
    0.147739104901338491374841515972068, 0.149445554002916905664936468389821};
inline constexpr double kWg[5] = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                                  0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                                  0.295524224714752870173892994651338};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  double roundoff; ///< error floor set by rounding, 50 eps int |f|
  bool operator<(const Segment& other) const noexcept { return error < other.error; }
};

template <class F>
Segment gauss_kronrod21(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[10];
  double gauss = 0.0;
  double abs_k = std::abs(kronrod);
  double fv1[10];
  double fv2[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = f(center - dx);
    fv2[j] = f(center + dx);
    const double sum = fv1[j] + fv2[j];
    kronrod += kWgk[j] * sum;
    abs_k += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  // QUADPACK error heuristic.
  const double mean = 0.5 * kronrod;
  double asc = kWgk[10] * std::abs(fc - mean);
  for (int j = 0; j < 10; ++j) asc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
  asc *= std::abs(half);
  abs_k *= std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double roundoff = 0.0;
  if (abs_k > std::numeric_limits<double>::min() / (50.0 * eps)) roundoff = 50.0 * eps * abs_k;
  return {a, b, kronrod * half, std::max(err, roundoff), roundoff};
}

} // namespace detail

/// Integrate f over [a, b]. Breakpoints strictly inside (a, b) seed the
/// initial partition; points outside are ignored.
template <class F>
Result integrate(const F& f, double a, double b, const Options& opts = {}, std::span<const double> breakpoints = {}) {
  Result out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  const double sign = b < a ? -1.0 : 1.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);

  std::vector<double> cuts{lo};
  for (double p : breakpoints) {
    if (p > lo && p < hi) cuts.push_back(p);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::Segment> heap;
  double total = 0.0;
  double total_err = 0.0;
  double total_roundoff = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const detail::Segment s = detail::gauss_kronrod21(f, cuts[i], cuts[i + 1]);
    out.evaluations += 21;
    total += s.value;
    total_err += s.error;
    total_roundoff += s.roundoff;
    heap.push(s);
  }

  // Once every segment sits at its rounding floor, bisection cannot help.
  // The loop aims at half the requested tolerance so that drift in the
  // running sums cannot leave the re-summed error just above it.
  auto tolerance = [&](double margin) {
    return std::max(margin * std::max(opts.abs_tol, opts.rel_tol * std::abs(total)), total_roundoff * (1.0 + 1e-6));
  };
  while (total_err > tolerance(0.5) && heap.size() < opts.max_intervals) {
    const detail::Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break; // interval no longer divisible
    heap.pop();
    const detail::Segment left = detail::gauss_kronrod21(f, worst.a, mid);
    const detail::Segment right = detail::gauss_kronrod21(f, mid, worst.b);
    out.evaluations += 42;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    total_roundoff += left.roundoff + right.roundoff - worst.roundoff;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  total_err = 0.0;
  total_roundoff = 0.0;
  out.intervals = heap.size();
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    total_roundoff += heap.top().roundoff;
    heap.pop();
  }
  out.value = sign * total;
  out.error = total_err;
  out.converged = total_err <= tolerance(1.0);
  return out;
}

/// As integrate(), but throws NumericalError with diagnostics when the
/// tolerance is not met.
template <class F>
double integrate_or_throw(const F& f, double a, double b, const Options& opts = {},
                          std::span<const double> breakpoints = {}, const char* what = "integral") {
  const Result r = integrate(f, a, b, opts, breakpoints);
  if (!r.converged) {
    std::ostringstream msg;
    msg << what << ": quadrature did not converge on [" << a << ", " << b << "]: value=" << r.value
        << " error_estimate=" << r.error << " intervals=" << r.intervals << " evaluations=" << r.evaluations;
    throw NumericalError(msg.str());
  }
  return r.value;
}

} // namespace collapsim::quad

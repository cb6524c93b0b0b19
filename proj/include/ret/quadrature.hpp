#pragma once

// Globally adaptive 21-point Gauss-Kronrod integration of vector-valued
// complex integrands over a set of panels. Each panel may carry its own
// change of variables, which is how the Sommerfeld integrals regularize the
// branch point at k_par = omega/c.

#include "ret/core.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <functional>
#include <queue>
#include <vector>

namespace ret::quad {

template <std::size_t N> using Values = std::array<cplx, N>;

template <std::size_t N> struct Panel {
  double a;
  double b;
  std::function<Values<N>(double)> f;
};

struct Options {
  /// Largest number of live subintervals before giving up.
  int max_intervals = 200000;
};

template <std::size_t N> struct Result {
  Values<N> value{};
  double error = 0.0; // sum over subintervals of sum_j |K_j - G_j|
  long evaluations = 0;
  int intervals = 0;
};

namespace detail {

template <std::size_t N> struct Piece {
  double a, b;
  const std::function<Values<N>(double)> *f;
  Values<N> value;
  double error;
  bool at_floor; // error is pure roundoff; splitting cannot reduce it
  bool operator<(const Piece &o) const { return error < o.error; }
};

template <std::size_t N>
Piece<N> gk21(const std::function<Values<N>(double)> &f, double a, double b) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  static const auto &xk = gauss_kronrod<double, 21>::abscissa();
  static const auto &wk = gauss_kronrod<double, 21>::weights();
  static const auto &wg = gauss<double, 10>::weights();

  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Values<N> kron{}, gaussv{};
  double absum = 0.0;

  auto accumulate = [&](const Values<N> &v, double w_k, double w_g) {
    for (std::size_t j = 0; j < N; ++j) {
      kron[j] += w_k * v[j];
      if (w_g != 0.0)
        gaussv[j] += w_g * v[j];
      absum += w_k * std::abs(v[j]);
    }
  };

  accumulate(f(c), wk[0], 0.0);
  for (std::size_t i = 1; i < xk.size(); ++i) {
    // odd Kronrod abscissae coincide with the 10-point Gauss nodes
    const double w_g = (i % 2 == 1) ? wg[i / 2] : 0.0;
    accumulate(f(c - h * xk[i]), wk[i], w_g);
    accumulate(f(c + h * xk[i]), wk[i], w_g);
  }

  Piece<N> p{a, b, &f, {}, 0.0, false};
  double err = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    p.value[j] = h * kron[j];
    err += std::abs(h * (kron[j] - gaussv[j]));
  }
  const double floor = 50.0 * std::numeric_limits<double>::epsilon() * std::abs(h) * absum;
  p.at_floor = err <= floor;
  p.error = std::max(err, floor);
  return p;
}

} // namespace detail

/// Integrates until the summed error estimate drops below target(value), which
/// the caller derives from the running total (relative tolerances need it).
/// Pieces limited by roundoff are settled as they are, so the returned error
/// can exceed the target. Throws QuadratureError if max_intervals is reached.
template <std::size_t N>
Result<N> integrate(const std::vector<Panel<N>> &panels,
                    const std::function<double(const Values<N> &)> &target,
                    const Options &opt = {}) {
  std::priority_queue<detail::Piece<N>> heap;
  std::vector<detail::Piece<N>> settled;
  Result<N> res;
  for (const auto &p : panels) {
    if (!(p.b > p.a))
      continue;
    auto piece = detail::gk21<N>(p.f, p.a, p.b);
    res.evaluations += 21;
    heap.push(piece);
  }

  auto totals = [&]() {
    Values<N> v{};
    double e = 0.0;
    for (const auto &t : settled) {
      for (std::size_t j = 0; j < N; ++j)
        v[j] += t.value[j];
      e += t.error;
    }
    auto copy = heap;
    while (!copy.empty()) {
      const auto &t = copy.top();
      for (std::size_t j = 0; j < N; ++j)
        v[j] += t.value[j];
      e += t.error;
      copy.pop();
    }
    return std::pair{v, e};
  };

  auto [value, error] = totals();
  int since_resum = 0;
  while (!heap.empty() && error > target(value)) {
    if (static_cast<int>(heap.size()) >= opt.max_intervals)
      throw QuadratureError("adaptive quadrature hit the subdivision limit", error);

    auto worst = heap.top();
    heap.pop();
    if (worst.at_floor) {
      settled.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // interval cannot be split further in double precision
      throw QuadratureError("adaptive quadrature interval underflow", error);
    }
    auto left = detail::gk21<N>(*worst.f, worst.a, mid);
    auto right = detail::gk21<N>(*worst.f, mid, worst.b);
    res.evaluations += 42;
    // splitting bought nothing while the values already agree: the error is
    // integrand noise (QUADPACK's roundoff test), so stop refining here
    if (left.error + right.error >= 0.99 * worst.error) {
      double diff = 0.0, mag = 0.0;
      for (std::size_t j = 0; j < N; ++j) {
        diff += std::abs(left.value[j] + right.value[j] - worst.value[j]);
        mag += std::abs(left.value[j] + right.value[j]);
      }
      if (diff <= 1e-5 * mag)
        left.at_floor = right.at_floor = true;
    }
    for (std::size_t j = 0; j < N; ++j)
      value[j] += left.value[j] + right.value[j] - worst.value[j];
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);

    // the running sums drift after many updates; resum occasionally
    if (++since_resum == 512) {
      std::tie(value, error) = totals();
      since_resum = 0;
    }
  }
  std::tie(value, error) = totals();
  res.value = value;
  res.error = error;
  res.intervals = static_cast<int>(heap.size() + settled.size());
  return res;
}

/// Scalar convenience wrapper.
inline Result<1> integrate_scalar(const std::vector<std::pair<double, double>> &breaks,
                                  const std::function<cplx(double)> &f, double rel_tol,
                                  double abs_tol = 0.0, const Options &opt = {}) {
  std::vector<Panel<1>> panels;
  for (auto [a, b] : breaks)
    panels.push_back({a, b, [&f](double x) { return Values<1>{f(x)}; }});
  return integrate<1>(
      panels,
      [rel_tol, abs_tol](const Values<1> &v) { return std::max(abs_tol, rel_tol * std::abs(v[0])); },
      opt);
}

} // namespace ret::quad

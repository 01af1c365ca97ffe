#ifndef FLUXBAL_QUADRATURE_HPP_
#define FLUXBAL_QUADRATURE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "fluxbal/fixed_vector.hpp"

namespace fluxbal {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order() const noexcept { return static_cast<int>(nodes.size()); }
};

namespace detail {

inline GaussRule make_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      // p1 = P_n(x), p0 = P_{n-1}(x)
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

inline constexpr int kMaxGaussOrder = 32;

}  // namespace detail

/// Cached Gauss-Legendre rule, 1 <= order <= 32.
inline const GaussRule& gauss_legendre(int order) {
  static const std::array<GaussRule, detail::kMaxGaussOrder + 1> rules = [] {
    std::array<GaussRule, detail::kMaxGaussOrder + 1> r;
    for (int n = 1; n <= detail::kMaxGaussOrder; ++n) r[n] = detail::make_gauss_legendre(n);
    return r;
  }();
  if (order < 1 || order > detail::kMaxGaussOrder)
    throw std::out_of_range("gauss_legendre: order must be in [1, 32]");
  return rules[order];
}

template <class R>
struct QuadResult {
  R value{};
  double error = 0.0;
  bool converged = true;
  long evaluations = 0;
};

struct AdaptiveOptions {
  int order = 5;
  int max_panels = 4000;
};

/// Fixed rule on [a, b].
template <class F>
auto gauss_fixed(F&& f, double a, double b, const GaussRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  auto sum = rule.weights[0] * f(mid + half * rule.nodes[0]);
  for (int i = 1; i < rule.order(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  sum *= half;
  return sum;
}

namespace detail {

template <class R>
struct Panel {
  double a, b;
  R left, right;  // rule applied to each half
  double error;   // |left + right - whole|
};

}  // namespace detail

/// Globally adaptive Gauss quadrature: the panel with the largest error
/// estimate |two halves - whole| is bisected until the summed estimate is
/// below tol. Panels are summed in order of position, so results are
/// deterministic.
template <class F>
auto adaptive_gauss(F&& f, double a, double b, double tol, AdaptiveOptions opt = {}) {
  using R = std::decay_t<std::invoke_result_t<F&, double>>;
  using P = detail::Panel<R>;
  const GaussRule& rule = gauss_legendre(opt.order);
  QuadResult<R> out;
  const auto make = [&](double lo, double hi, const R& whole) {
    const double m = 0.5 * (lo + hi);
    P p{lo, hi, gauss_fixed(f, lo, m, rule), gauss_fixed(f, m, hi, rule), 0.0};
    p.error = max_abs(p.left + p.right - whole);
    out.evaluations += 2L * rule.order();
    return p;
  };
  const R whole = gauss_fixed(f, a, b, rule);
  out.evaluations = rule.order();
  if (b == a) {
    out.value = whole * 0.0;
    return out;
  }
  const auto by_error = [](const P& x, const P& y) { return x.error < y.error; };
  std::vector<P> heap{make(a, b, whole)};
  double total = heap.front().error;
  // Estimates below roundoff of the integral are treated as converged.
  const double floor = 1e-14 * max_abs(whole);
  while (total > std::max(tol, floor)) {
    if (static_cast<int>(heap.size()) >= opt.max_panels) {
      out.converged = false;
      break;
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const P worst = heap.back();
    const double m = 0.5 * (worst.a + worst.b);
    if (m - worst.a <= 1e-15 * std::max(1.0, std::abs(m))) {
      std::push_heap(heap.begin(), heap.end(), by_error);
      out.converged = false;
      break;
    }
    heap.back() = make(worst.a, m, worst.left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(make(m, worst.b, worst.right));
    std::push_heap(heap.begin(), heap.end(), by_error);
    total = 0.0;
    for (const P& p : heap) total += p.error;
  }
  std::sort(heap.begin(), heap.end(), [](const P& x, const P& y) { return x.a < y.a; });
  out.value = heap.front().left + heap.front().right;
  out.error = heap.front().error;
  for (std::size_t k = 1; k < heap.size(); ++k) {
    out.value += heap[k].left + heap[k].right;
    out.error += heap[k].error;
  }
  return out;
}

/// Adaptive integral over [a, b] split at the given interior points; the
/// tolerance is shared in proportion to piece length.
template <class F>
auto adaptive_gauss_split(F&& f, double a, double b, std::vector<double> breaks, double tol,
                          AdaptiveOptions opt = {}) {
  using R = std::decay_t<std::invoke_result_t<F&, double>>;
  // Points closer than roundoff to a neighbour would leave slivers whose
  // share of the tolerance underflows; they are merged away.
  const double eps = 1e-13 * std::max(b - a, std::max(std::abs(a), std::abs(b)));
  std::erase_if(breaks, [&](double p) { return !(p > a + eps && p < b - eps); });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(), [&](double x, double y) { return y - x <= eps; }),
               breaks.end());
  breaks.insert(breaks.begin(), a);
  breaks.push_back(b);
  QuadResult<R> total;
  bool first = true;
  const double length = b - a;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double lo = breaks[k], hi = breaks[k + 1];
    const double share = length > 0.0 ? tol * (hi - lo) / length : tol;
    auto piece = adaptive_gauss(f, lo, hi, share, opt);
    if (first) {
      total = piece;
      first = false;
    } else {
      total.value += piece.value;
      total.error += piece.error;
      total.converged = total.converged && piece.converged;
      total.evaluations += piece.evaluations;
    }
  }
  return total;
}

}  // namespace fluxbal

#endif  // FLUXBAL_QUADRATURE_HPP_

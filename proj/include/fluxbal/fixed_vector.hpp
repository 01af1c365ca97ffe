#ifndef FLUXBAL_FIXED_VECTOR_HPP_
#define FLUXBAL_FIXED_VECTOR_HPP_

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

namespace fluxbal {

inline constexpr std::size_t kMaxComponents = 2;  // D
inline constexpr std::size_t kMaxDim = 2;         // n

// Small fixed-capacity vector with a runtime length. The tag keeps states and
// points distinct types even though both hold two doubles.
template <class Tag, std::size_t Capacity>
class FixedVector {
 public:
  FixedVector() = default;
  explicit FixedVector(std::size_t size, double fill = 0.0) : size_(size) {
    if (size > Capacity) throw std::length_error("FixedVector: size exceeds capacity");
    std::fill_n(data_.begin(), size, fill);
  }
  FixedVector(std::initializer_list<double> values) : size_(values.size()) {
    if (values.size() > Capacity) throw std::length_error("FixedVector: size exceeds capacity");
    std::copy(values.begin(), values.end(), data_.begin());
  }

  std::size_t size() const noexcept { return size_; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }
  const double* begin() const noexcept { return data_.data(); }
  const double* end() const noexcept { return data_.data() + size_; }
  double* begin() noexcept { return data_.data(); }
  double* end() noexcept { return data_.data() + size_; }

  FixedVector& operator+=(const FixedVector& o) noexcept {
    assert(o.size_ == size_);
    for (std::size_t i = 0; i < size_; ++i) data_[i] += o.data_[i];
    return *this;
  }
  FixedVector& operator-=(const FixedVector& o) noexcept {
    assert(o.size_ == size_);
    for (std::size_t i = 0; i < size_; ++i) data_[i] -= o.data_[i];
    return *this;
  }
  FixedVector& operator*=(double s) noexcept {
    for (std::size_t i = 0; i < size_; ++i) data_[i] *= s;
    return *this;
  }

  friend FixedVector operator+(FixedVector a, const FixedVector& b) noexcept { return a += b; }
  friend FixedVector operator-(FixedVector a, const FixedVector& b) noexcept { return a -= b; }
  friend FixedVector operator-(FixedVector a) noexcept { return a *= -1.0; }
  friend FixedVector operator*(FixedVector a, double s) noexcept { return a *= s; }
  friend FixedVector operator*(double s, FixedVector a) noexcept { return a *= s; }
  friend bool operator==(const FixedVector& a, const FixedVector& b) noexcept {
    return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
  }

 private:
  std::array<double, Capacity> data_{};
  std::size_t size_ = 0;
};

struct StateTag {};
struct PointTag {};

/// Conserved state u = (u_1, ..., u_D).
using State = FixedVector<StateTag, kMaxComponents>;
/// Point or direction in R^n.
using Point = FixedVector<PointTag, kMaxDim>;

template <class Tag, std::size_t C>
double dot(const FixedVector<Tag, C>& a, const FixedVector<Tag, C>& b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <class Tag, std::size_t C>
double norm2(const FixedVector<Tag, C>& a) noexcept {
  return std::sqrt(dot(a, a));
}

template <class Tag, std::size_t C>
double max_abs(const FixedVector<Tag, C>& a) noexcept {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs(double a) noexcept { return std::abs(a); }

template <class Tag, std::size_t C>
bool all_finite(const FixedVector<Tag, C>& a) noexcept {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

/// Flux matrix f(u): row i is f_i(u) in R^n.
struct FluxMatrix {
  std::array<Point, kMaxComponents> rows{};
  std::size_t components = 0;

  /// f(u) . nu, one entry per component.
  State contract(const Point& nu) const noexcept {
    State out(components);
    for (std::size_t i = 0; i < components; ++i) out[i] = dot(rows[i], nu);
    return out;
  }
};

}  // namespace fluxbal

#endif  // FLUXBAL_FIXED_VECTOR_HPP_

#include "sn/radial_profile.hpp"

#include "sn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sn {

namespace {
constexpr double kEdgeSlack = 1e-12;
}

RadialProfile::RadialProfile(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (grid_.size() != values_.size())
    throw DimensionError("RadialProfile: grid and values differ in length");
  if (grid_.size() < 2) throw DimensionError("RadialProfile: need at least two samples");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!std::isfinite(values_[i]) || !std::isfinite(grid_[i]))
      throw Error("RadialProfile: non-finite sample");
    if (i > 0 && !(grid_[i] > grid_[i - 1]))
      throw Error("RadialProfile: grid must be strictly increasing");
  }
  spacing_ = (grid_.back() - grid_.front()) / static_cast<double>(grid_.size() - 1);
  uniform_ = true;
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    if (std::abs((grid_[i] - grid_[i - 1]) - spacing_) > 1e-9 * spacing_) {
      uniform_ = false;
      break;
    }
  }
}

bool RadialProfile::covers(double r) const {
  const double slack = kEdgeSlack * std::max(1.0, std::abs(back()));
  return r >= front() - slack && r <= back() + slack;
}

std::size_t RadialProfile::interval(double r) const {
  const std::size_t last = grid_.size() - 2;
  if (uniform_) {
    const double t = (r - grid_.front()) / spacing_;
    auto i = static_cast<std::ptrdiff_t>(std::floor(t));
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(last));
    // floating-point guard for points sitting on a node
    auto k = static_cast<std::size_t>(i);
    while (k > 0 && r < grid_[k]) --k;
    while (k < last && r >= grid_[k + 1]) ++k;
    return k;
  }
  auto it = std::upper_bound(grid_.begin(), grid_.end(), r);
  std::size_t k = (it == grid_.begin()) ? 0 : static_cast<std::size_t>(it - grid_.begin()) - 1;
  return std::min(k, last);
}

double RadialProfile::operator()(double r) const {
  if (!covers(r)) {
    std::ostringstream msg;
    msg << "RadialProfile: r=" << r << " outside [" << front() << ", " << back() << "]";
    throw DomainMismatch(msg.str());
  }
  const std::size_t n = grid_.size();
  const std::size_t k = interval(r);
  if (r == grid_[k]) return values_[k];
  if (n < 4) {
    const double t = (r - grid_[k]) / (grid_[k + 1] - grid_[k]);
    return (1.0 - t) * values_[k] + t * values_[k + 1];
  }
  // four-point stencil k-1..k+2, shifted inward at the ends
  std::size_t s = (k == 0) ? 0 : k - 1;
  if (s + 3 >= n) s = n - 4;
  double result = 0.0;
  for (std::size_t a = s; a < s + 4; ++a) {
    double basis = 1.0;
    for (std::size_t b = s; b < s + 4; ++b)
      if (b != a) basis *= (r - grid_[b]) / (grid_[a] - grid_[b]);
    result += basis * values_[a];
  }
  return result;
}

std::vector<double> RadialProfile::operator()(std::span<const double> radii) const {
  std::vector<double> out(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) out[i] = (*this)(radii[i]);
  return out;
}

}  // namespace sn

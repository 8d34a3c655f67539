#pragma once

#include <span>
#include <vector>

namespace sn {

// A real function of radius sampled on a strictly increasing grid.
// Evaluation uses the cubic through the four nearest nodes, so node values
// are reproduced exactly.
class RadialProfile {
 public:
  RadialProfile() = default;
  RadialProfile(std::vector<double> grid, std::vector<double> values);

  double operator()(double r) const;
  std::vector<double> operator()(std::span<const double> radii) const;

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return grid_.size(); }
  bool empty() const { return grid_.empty(); }
  double front() const { return grid_.front(); }
  double back() const { return grid_.back(); }
  bool uniform() const { return uniform_; }
  bool covers(double r) const;

 private:
  std::size_t interval(double r) const;

  std::vector<double> grid_;
  std::vector<double> values_;
  bool uniform_ = false;
  double spacing_ = 0.0;
};

}  // namespace sn

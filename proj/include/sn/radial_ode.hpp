#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace sn::ode {

// First-order system y' = f(r, y) on a radial interval.
struct OdeSystem {
  std::size_t dimension = 0;
  std::function<void(double r, std::span<const double> y, std::span<double> dydr)> rhs;
};

// Fixed-step control. The interval is split into ceil(length/step) equal
// steps so the last sample lands exactly on r_end. Every `stride`-th sample
// is stored (the final one always is).
struct StepControl {
  double step = 0.0;
  std::size_t stride = 1;
};

// Stops the integration once any watched component exceeds `threshold`
// in magnitude (optionally after dividing by r).
struct DivergenceTrigger {
  double threshold = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> components;  // empty: all components
  bool divide_by_radius = false;

  bool fired(double r, std::span<const double> y) const;
};

struct IntegrationResult {
  std::size_t dimension = 0;
  std::vector<double> grid;
  std::vector<double> data;  // row-major, grid.size() x dimension
  bool terminated_early = false;
  std::optional<double> termination_radius;

  std::size_t size() const { return grid.size(); }
  std::span<const double> sample(std::size_t i) const {
    return {data.data() + i * dimension, dimension};
  }
  std::span<const double> back() const { return sample(size() - 1); }
  // Component k at every stored radius.
  std::vector<double> component(std::size_t k) const;
};

// Classical fourth-order Runge-Kutta. Throws NumericalBlowup when the state
// becomes non-finite (distinct from the divergence trigger, which only stops).
IntegrationResult integrate(const OdeSystem& sys, std::span<const double> y0, double r_start,
                            double r_end, const StepControl& step,
                            const DivergenceTrigger& trigger = {});

}  // namespace sn::ode

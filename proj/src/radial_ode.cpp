#include "sn/radial_ode.hpp"

#include "sn/errors.hpp"

#include <cmath>
#include <sstream>

namespace sn::ode {

bool DivergenceTrigger::fired(double r, std::span<const double> y) const {
  if (!std::isfinite(threshold)) return false;
  const double scale = divide_by_radius ? 1.0 / r : 1.0;
  if (components.empty()) {
    for (double v : y)
      if (std::abs(v) * scale > threshold) return true;
    return false;
  }
  for (std::size_t k : components)
    if (std::abs(y[k]) * scale > threshold) return true;
  return false;
}

std::vector<double> IntegrationResult::component(std::size_t k) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = data[i * dimension + k];
  return out;
}

IntegrationResult integrate(const OdeSystem& sys, std::span<const double> y0, double r_start,
                            double r_end, const StepControl& step,
                            const DivergenceTrigger& trigger) {
  if (!(r_start < r_end)) throw Error("integrate: r_start must be below r_end");
  if (y0.size() != sys.dimension) throw DimensionError("integrate: initial state has wrong dimension");
  if (!(step.step > 0.0)) throw Error("integrate: step must be positive");

  const std::size_t dim = sys.dimension;
  const auto nsteps = static_cast<std::size_t>(std::ceil((r_end - r_start) / step.step - 1e-9));
  const std::size_t n = nsteps == 0 ? 1 : nsteps;
  const double h = (r_end - r_start) / static_cast<double>(n);
  const std::size_t stride = step.stride == 0 ? 1 : step.stride;

  IntegrationResult out;
  out.dimension = dim;
  out.grid.reserve(n / stride + 2);
  out.data.reserve((n / stride + 2) * dim);

  std::vector<double> y(y0.begin(), y0.end());
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

  auto store = [&](double r) {
    out.grid.push_back(r);
    out.data.insert(out.data.end(), y.begin(), y.end());
  };
  store(r_start);

  for (std::size_t i = 0; i < n; ++i) {
    const double r = r_start + static_cast<double>(i) * h;
    sys.rhs(r, y, k1);
    for (std::size_t d = 0; d < dim; ++d) tmp[d] = y[d] + 0.5 * h * k1[d];
    sys.rhs(r + 0.5 * h, tmp, k2);
    for (std::size_t d = 0; d < dim; ++d) tmp[d] = y[d] + 0.5 * h * k2[d];
    sys.rhs(r + 0.5 * h, tmp, k3);
    for (std::size_t d = 0; d < dim; ++d) tmp[d] = y[d] + h * k3[d];
    sys.rhs(r + h, tmp, k4);
    for (std::size_t d = 0; d < dim; ++d)
      y[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);

    const double r_next = (i + 1 == n) ? r_end : r_start + static_cast<double>(i + 1) * h;
    for (double v : y) {
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "integrate: non-finite state at r=" << r_next;
        throw NumericalBlowup(msg.str(), r_next);
      }
    }
    if (trigger.fired(r_next, y)) {
      store(r_next);
      out.terminated_early = true;
      out.termination_radius = r_next;
      return out;
    }
    if ((i + 1) % stride == 0 || i + 1 == n) store(r_next);
  }
  return out;
}

}  // namespace sn::ode

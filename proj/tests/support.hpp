#pragma once

// Shared fixtures: each stationary state is shot once per test process.

#include "sn/chebyshev.hpp"
#include "sn/stability.hpp"
#include "sn/stationary.hpp"

#include <map>
#include <mutex>

namespace support {

inline const sn::StationaryState& state(int n) {
  static std::mutex mu;
  static std::map<int, sn::StationaryState> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, sn::shoot(n)).first;
  return it->second;
}

struct Analysis {
  sn::ChebyshevGrid grid;
  sn::PerturbationOperator op;
  sn::StabilityReport report;
};

inline Analysis analysis(int n, int N, double L) {
  Analysis a;
  a.grid = sn::build_grid(N, L);
  a.op = sn::assemble(state(n), a.grid);
  a.report = sn::classify(sn::solve_reduced(a.op), a.grid, a.op.r0);
  a.report.n = n;
  a.report.energy = state(n).energy;
  return a;
}

// Reference energies of states 0..20, three significant figures.
inline constexpr double kReferenceEnergies[] = {-0.163,    -0.0308,   -0.0125,   -0.00675,  -0.00421,  -0.00287,  -0.00209,
                                     -0.00158,  -0.00124,  -0.00100,  -0.000823, -0.000689, -0.000585, -0.000503,
                                     -0.000437, -0.000384, -0.000339, -0.000302, -0.000271, -0.000244, -0.000221};

}  // namespace support

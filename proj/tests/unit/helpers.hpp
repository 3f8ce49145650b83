#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lscut/mrf_model.hpp"

namespace lscut::testing {

inline std::vector<double> uniform_vector(std::size_t n, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline MrfProblem random_grid_problem(int w, int h, int k, PriorSpec prior, double lambda, std::mt19937_64& rng) {
  const int n = w * h;
  return MrfProblem(n, k, grid_edges(w, h), uniform_vector(static_cast<std::size_t>(n), rng),
                    uniform_vector(static_cast<std::size_t>(n) * k, rng), std::move(prior), lambda);
}

inline PriorSpec potts_prior() { return {}; }

inline PriorSpec gaussian_prior(double beta) {
  PriorSpec p;
  p.data_kind = DataKind::gaussian;
  p.beta = beta;
  return p;
}

}  // namespace lscut::testing

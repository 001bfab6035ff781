#ifndef PACKBED_TESTS_HELPERS_HPP
#define PACKBED_TESTS_HELPERS_HPP

#include "packbed/assembly.hpp"
#include "packbed/model.hpp"

#include <random>

namespace packbed::testing {

inline ScalarFieldFn constant_eps(double e) {
  return [e](double, double) { return ScalarSample{e, Vec2::Zero()}; };
}

/// Linear vector field u(x, y) = c + G (x, y).
inline VectorFieldFn affine_field(Vec2 c, Mat2 g) {
  return [c, g](double x, double y) { return VectorSample{c + g * Vec2(x, y), g}; };
}

inline VectorFieldFn constant_field(double a, double b) {
  return affine_field(Vec2(a, b), Mat2::Zero());
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

/// Unit square (0,1) x (-1/2,1/2).
inline CaseConfig unit_square(int nx, int ny) {
  CaseConfig cfg;
  cfg.length = 1.0;
  cfg.half_width = 0.5;
  cfg.nx = nx;
  cfg.ny = ny;
  cfg.ramp = 0.5;
  return cfg;
}

}  // namespace packbed::testing

#endif  // PACKBED_TESTS_HELPERS_HPP

#pragma once

// Helpers shared by the unit tests and the acceptance binary. The gradient
// oracle here is deliberately separate from numkit.

#include <Eigen/Dense>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>

namespace test_support {

using Vector = Eigen::VectorXd;

inline std::string config_path(const std::string& name) {
  return std::string(UCLF_ADAPT_CONFIG_DIR) + "/" + name + ".toml";
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("uclf_adapt_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fourth-order central stencil.
inline Vector stencil_gradient(const std::function<double(const Vector&)>& f,
                               const Vector& p, double h = 1e-3) {
  Vector g(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    auto at = [&](double d) {
      Vector q = p;
      q[i] += d;
      return f(q);
    };
    g[i] = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
  }
  return g;
}

// Relative error with the denominator floored at 1e-3 so that
// near-vanishing gradients are compared in absolute terms.
inline double rel_error(const Vector& got, const Vector& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-3);
}

inline Vector uniform_in(std::mt19937_64& rng, const Vector& lo,
                         const Vector& hi) {
  Vector v(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    v[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
  return v;
}

inline Vector uniform_cube(std::mt19937_64& rng, int n, double half_width) {
  return uniform_in(rng, Vector::Constant(n, -half_width),
                    Vector::Constant(n, half_width));
}

}  // namespace test_support

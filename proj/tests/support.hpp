#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "saxe/embed_store.hpp"

namespace testing {

inline std::string fixture(const std::string& rel) { return std::string(SAXE_FIXTURE_DIR) + "/" + rel; }

// Test-side generator, deliberately separate from saxe::Rng.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double normal(double mu = 0.0, double sigma = 1.0) {
    return std::normal_distribution<double>(mu, sigma)(eng_);
  }
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

  std::vector<double> vec(std::size_t dim, double sigma = 1.0) {
    std::vector<double> v(dim);
    for (auto& x : v) x = normal(0.0, sigma);
    return v;
  }
  saxe::Embedding emb(std::size_t dim, double sigma = 1.0) { return saxe::Embedding(vec(dim, sigma)); }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

inline double plain_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double plain_cos(const std::vector<double>& a, const std::vector<double>& b) {
  return plain_dot(a, b) / std::sqrt(plain_dot(a, a) * plain_dot(b, b));
}

inline std::vector<double> values(const saxe::Embedding& e) { return {e.values().begin(), e.values().end()}; }

}  // namespace testing

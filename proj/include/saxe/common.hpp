#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace saxe {

/// Violated operation precondition (empty input, dimension mismatch, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file. `offset()` is the byte (binary files) or line
/// (text files) where parsing stopped.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what), offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Collects non-fatal warnings (skipped records, dangling links, ...).
struct Diagnostics {
  std::vector<std::string> warnings;
  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

inline void warn(Diagnostics* diag, std::string message) {
  if (diag) diag->warn(std::move(message));
}

/// FNV-1a 64-bit. Stable across platforms, used for seed derivation and
/// file digests.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Derives a child seed from a root seed and a label, so that stages and
/// per-key computations draw independent, order-free random streams.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

std::string hex64(std::uint64_t value);

/// mt19937_64 with bounded integers and unit reals derived here rather than
/// through std:: distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Uniform real in [0, 1).
  double uniform01();

 private:
  std::mt19937_64 engine_;
};

// Small numeric helpers shared across modules.
double mean(std::span<const double> xs);
/// Unbiased (n-1) sample variance; 0 for n < 2.
double sample_variance(std::span<const double> xs);
double population_variance(std::span<const double> xs);

/// Normal-approximation 95% interval half-width: 1.96 * sd / sqrt(n).
double ci95_half_width(std::span<const double> xs);

inline constexpr double kZ95 = 1.96;

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

/// Reads a whole file; throws std::runtime_error naming the path on failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace saxe

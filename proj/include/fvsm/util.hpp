#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fvsm {

/// Deterministic PRNG (xoshiro256** seeded via splitmix64).
///
/// All sampling helpers are implemented by hand so that random streams are
/// bit-identical across platforms and standard libraries; never mix in
/// <random> distributions when reproducibility of artifacts matters.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double uniform();
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller (second value cached).
  double gaussian();

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Derive an independent stream from the original seed and a tag.
  Rng fork(std::uint64_t tag) const;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);
/// Stable combination of a seed with a tag, for deriving per-stage seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);
std::uint64_t hash_string(const std::string& s);

/// Minimal dense row-major matrix of doubles.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  std::span<double> row(int r) { return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)}; }
  std::span<const double> row(int r) const { return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)}; }
};

struct EigenDecomposition {
  std::vector<double> values;        // descending
  std::vector<std::vector<double>> vectors;  // vectors[i] pairs with values[i], unit norm
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
EigenDecomposition jacobi_eigendecomposition(const Matrix& symmetric);

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double v);

std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

// CSV helpers. Fields containing commas, quotes or newlines are quoted.
std::string csv_escape(const std::string& field);
std::string csv_join(const std::vector<std::string>& fields);
std::vector<std::string> csv_split(const std::string& line);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);
std::vector<std::string> read_lines(const std::string& path);

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

/// Error raised by file ingestion and artifact IO.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace fvsm

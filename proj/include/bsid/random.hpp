#pragma once

#include <cstdint>
#include <random>

#include "bsid/types.hpp"

namespace bsid {

// Seeded pseudo-random stream. One instance per chain or per simulation;
// matrices are filled in column-major order so draw order is reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double chi_squared(double dof);
  Matrix normal_matrix(Index rows, Index cols);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// SplitMix64 finalizer; derives independent child seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt);

}  // namespace bsid

#pragma once

#include <cstdint>
#include <vector>

namespace parlab {

/// Deterministic low-discrepancy point set (Halton, prime bases). The seed
/// offsets the start index so distinct seeds give distinct but reproducible
/// sweeps.
class HaltonSequence {
 public:
  HaltonSequence(int dims, unsigned seed)
      : dims_(dims), index_(1 + uint64_t(seed) * 7919) {}

  /// Next point in [0,1)^dims.
  std::vector<double> next();

 private:
  int dims_;
  uint64_t index_;
};

double radical_inverse(uint64_t i, int base);

}  // namespace parlab

#include "parlab/sampling.hpp"

#include <stdexcept>

namespace parlab {

namespace {
constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                           31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
}

double radical_inverse(uint64_t i, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * double(i % uint64_t(base));
    i /= uint64_t(base);
    f *= inv;
  }
  return r;
}

std::vector<double> HaltonSequence::next() {
  if (dims_ > int(sizeof(kPrimes) / sizeof(kPrimes[0])))
    throw std::invalid_argument("HaltonSequence: too many dimensions");
  std::vector<double> p(static_cast<size_t>(dims_), 0.0);
  for (int d = 0; d < dims_; ++d) p[size_t(d)] = radical_inverse(index_, kPrimes[d]);
  ++index_;
  return p;
}

}  // namespace parlab

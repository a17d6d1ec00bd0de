#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "depcache/error.hpp"

namespace depcache {

// Seeded source shared by every randomized policy. Each call to index()
// is one logical draw, so two policies fed the same seed and the same
// sequence of pool sizes make the same choices.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed = 0) : engine_(seed) {}

  std::size_t index(std::size_t bound) {
    if (bound == 0) fail(ErrorCode::InvalidArgument, "uniform index over an empty range");
    std::uniform_int_distribution<std::size_t> dist(0, bound - 1);
    ++draws_;
    return dist(engine_);
  }

  double unit() {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    return dist(engine_);
  }

  std::mt19937_64& engine() { return engine_; }
  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

}  // namespace depcache

#pragma once

#include <random>

namespace sinrgp {

/// Uniform in [0, 1) from the top 53 bits; the same sequence on every
/// standard library, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace sinrgp

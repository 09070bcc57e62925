#pragma once

#include <cstdint>
#include <random>

namespace gridflow {

/// Uniform [0, 1) stream with a fixed, documented bit recipe: the top 53 bits
/// of std::mt19937_64 (whose output sequence the C++ standard pins down),
/// scaled by 2^-53. Unlike std::uniform_real_distribution this is identical
/// across standard libraries.
class UniformStream {
 public:
  static constexpr const char* kName = "mt19937_64-top53-v1";

  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gridflow

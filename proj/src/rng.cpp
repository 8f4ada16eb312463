// SPDX-License-Identifier: Apache-2.0
#include "pvqe/rng.hpp"

namespace pvqe {

// splitmix64 finalizer
std::uint64_t RngStream::mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream RngStream::derive(std::initializer_list<std::uint64_t> tags) const {
  std::uint64_t h = mix(seed_ ^ 0x6a09e667f3bcc908ULL);
  for (std::uint64_t t : tags) h = mix(h ^ mix(t + 0x3c6ef372fe94f82bULL));
  return RngStream(h);
}

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

}  // namespace pvqe

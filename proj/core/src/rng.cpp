#include "metalab/rng.hpp"

namespace metalab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Rng::derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base + index);
}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(splitmix64(splitmix64(seed_) ^ (stream * 0xd1342543de82ef95ULL + 1)));
}

}  // namespace metalab

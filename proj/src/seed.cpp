#include "wildfire/seed.hpp"

namespace wildfire {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Seed Seed::child(std::string_view label, std::uint64_t a, std::uint64_t b) const {
  std::uint64_t h = splitmix64(value_ ^ fnv1a(label));
  h = splitmix64(h ^ a);
  h = splitmix64(h + 0x632be59bd9b4e019ULL * (b + 1));
  return Seed{h};
}

Rng Seed::rng() const {
  std::seed_seq seq{static_cast<std::uint32_t>(value_), static_cast<std::uint32_t>(value_ >> 32)};
  return Rng(seq);
}

}  // namespace wildfire

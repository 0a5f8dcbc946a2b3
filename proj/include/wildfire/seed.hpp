#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace wildfire {

using Rng = std::mt19937_64;

/// Node in a tree of labeled random substreams.
///
/// Every consumer of randomness derives its own child from the root, keyed by
/// a label and up to two integer indices (member, cycle). The derived value is
/// a pure hash of the path, so draws never depend on the order in which
/// members or cycles are generated.
class Seed {
 public:
  constexpr Seed() = default;
  constexpr explicit Seed(std::uint64_t value) : value_(value) {}

  Seed child(std::string_view label, std::uint64_t a = 0, std::uint64_t b = 0) const;
  Rng rng() const;
  std::uint64_t value() const { return value_; }

  bool operator==(const Seed&) const = default;

 private:
  std::uint64_t value_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace wildfire

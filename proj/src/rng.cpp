#include "iarc/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "iarc/hashing.hpp"

namespace iarc {

std::uint64_t derive_seed(std::uint64_t master, std::string_view component) {
  std::string key = std::to_string(master);
  key.push_back('/');
  key.append(component);
  const auto digest = sha256(key);
  std::uint64_t seed = 0;
  for (int i = 0; i < 8; ++i) seed = (seed << 8) | digest[i];
  return seed;
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::index(std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return draw % n;
}

}  // namespace iarc

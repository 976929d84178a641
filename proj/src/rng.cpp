#include "synccool/rng.hpp"

#include <cmath>
#include <cstdio>
#include <cinttypes>

#include "synccool/errors.hpp"
#include "synccool/model.hpp"

namespace synccool {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t n = counter_++;
  return splitmix64_mix(splitmix64_mix(key_ ^ (n * kGolden)) + key_);
}

double RngStream::uniform() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

void RngStream::fill_normals(std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); i += 2) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = kTwoPi * uniform();
    out[i] = r * std::cos(phi);
    if (i + 1 < out.size()) out[i + 1] = r * std::sin(phi);
  }
}

double RngStream::normal() {
  double z[1];
  fill_normals(z);
  return z[0];
}

std::string RngStream::serialize() const {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%016" PRIx64 ":%016" PRIx64, key_, counter_);
  return buf;
}

RngStream RngStream::deserialize(const std::string& text) {
  std::uint64_t key = 0;
  std::uint64_t counter = 0;
  if (std::sscanf(text.c_str(), "%" SCNx64 ":%" SCNx64, &key, &counter) != 2) {
    throw InvalidParameter("malformed rng state '" + text + "'");
  }
  return {key, counter};
}

RngStream rng_stream(std::uint64_t master_seed, std::uint64_t trajectory_index) {
  const std::uint64_t key =
      splitmix64_mix(master_seed ^ splitmix64_mix(trajectory_index * kGolden + kStreamSalt));
  return {key, 0};
}

}  // namespace synccool

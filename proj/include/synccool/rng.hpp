#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace synccool {

/// Counter-based generator ("keyed SplitMix64").
///
/// Output n of a stream with key K is mix(mix(K ^ (n * 0x9E3779B97F4A7C15))),
/// with mix the SplitMix64 finalizer. The full state is the pair (key, counter),
/// so a stream can be saved and resumed anywhere, and trajectory j of a run
/// always sees the same numbers no matter which worker executes it.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

  std::uint64_t next_u64();
  /// Uniform on (0, 1].
  double uniform();
  /// Standard normals via Box-Muller. Consumes 2*ceil(n/2) counter values.
  void fill_normals(std::span<double> out);
  double normal();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  /// "key:counter" in hexadecimal.
  std::string serialize() const;
  static RngStream deserialize(const std::string& text);

  friend bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

/// Independent stream for trajectory `trajectory_index` of a run seeded with
/// `master_seed`.
RngStream rng_stream(std::uint64_t master_seed, std::uint64_t trajectory_index);

}  // namespace synccool

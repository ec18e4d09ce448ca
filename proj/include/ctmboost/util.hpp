#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace ctm {

/// Uniform double in [0, 1) built from the top 53 bits of the engine output.
/// The standard <random> distributions are implementation-defined, so all
/// sampling in this library goes through fixed arithmetic on mt19937_64 to
/// keep seeded runs reproducible across toolchains.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Unbiased integer in [0, n) by rejection.
inline std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % n;
}

/// Derives an independent stream seed from a master seed (splitmix64 step).
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Shortest decimal text that parses back to exactly the same double.
/// Used for every number this library writes to CSV so that seeded runs
/// produce byte-identical files.
std::string format_double(double x);

/// Average ranks (1-based, ties averaged).
std::vector<double> average_ranks(const std::vector<double>& values);

/// Thread count to actually use: the request if positive, otherwise the
/// hardware concurrency (at least 1).
int resolve_threads(int requested);

/// Runs body(0..count-1) on up to `threads` worker threads. Tasks must be
/// independent and write only to their own slots so results cannot depend
/// on scheduling; the first exception thrown by any task is rethrown after
/// all workers finish.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace ctm

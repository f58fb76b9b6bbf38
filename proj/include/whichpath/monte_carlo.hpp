#ifndef WHICHPATH_MONTE_CARLO_HPP
#define WHICHPATH_MONTE_CARLO_HPP

// Seeded Monte Carlo averaging with per-sample random streams.
//
// Sample i always draws from SampleStream(seed, i), samples are grouped into
// fixed-size chunks, and chunk statistics are merged in chunk order. The
// estimate is therefore bit-identical for any number of worker threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace whichpath {

/// SplitMix64 generator keyed by (master seed, sample index). Satisfies
/// UniformRandomBitGenerator so it plugs into <random> distributions.
class SampleStream {
 public:
  using result_type = std::uint64_t;

  SampleStream(std::uint64_t seed, std::uint64_t index)
      : state_(mix(mix(seed) ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

struct Estimate {
  double value = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
};

namespace detail {

// Welford accumulator; merge() is Chan's pairwise update.
struct Moments {
  std::uint64_t n = 0;
  double mean = 0;
  double m2 = 0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / total;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }
};

inline constexpr std::uint64_t kChunk = 4096;

}  // namespace detail

/// Mean and standard error of sample_fn(stream) over n seeded samples.
template <typename SampleFn>
Estimate monte_carlo_mean(std::uint64_t n, std::uint64_t seed, unsigned threads, SampleFn&& sample_fn) {
  const std::uint64_t chunks = (n + detail::kChunk - 1) / detail::kChunk;
  std::vector<detail::Moments> partial(chunks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      for (std::uint64_t c = next++; c < chunks; c = next++) {
        detail::Moments m;
        const std::uint64_t end = std::min(n, (c + 1) * detail::kChunk);
        for (std::uint64_t i = c * detail::kChunk; i < end; ++i) {
          SampleStream stream(seed, i);
          m.add(sample_fn(stream));
        }
        partial[c] = m;
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = chunks;
    }
  };

  const unsigned workers = static_cast<unsigned>(
      std::clamp<std::uint64_t>(threads, 1, std::max<std::uint64_t>(chunks, 1)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }

  if (failure) std::rethrow_exception(failure);

  detail::Moments total;
  for (const auto& m : partial) total.merge(m);
  Estimate e;
  e.samples = total.n;
  e.value = total.mean;
  if (total.n > 1) e.std_error = std::sqrt(total.m2 / static_cast<double>(total.n - 1) / static_cast<double>(total.n));
  return e;
}

}  // namespace whichpath

#endif  // WHICHPATH_MONTE_CARLO_HPP

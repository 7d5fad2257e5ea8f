#pragma once

#include <cstdint>

namespace opiexit::sde {

// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based word generator: the ctr-th word of path `path` under `seed`
// is a pure function of (seed, path, ctr). Ensembles can therefore be
// evaluated in any order, on any number of threads, with byte-identical
// results.
constexpr std::uint64_t counter_word(std::uint64_t seed, std::uint64_t path,
                                     std::uint64_t ctr) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ mix64(path ^ 0xbb67ae8584caa73bULL));
  return mix64(h ^ mix64(ctr));
}

// Uniform in (0, 1]: the +1 keeps 0 out so log() is always defined.
constexpr double uniform_pos(std::uint64_t w) {
  return static_cast<double>((w >> 11) + 1) * 0x1.0p-53;
}

// k-th standard normal draw of the (seed, path) stream via Box-Muller. Draws
// 2k and 2k+1 share one (radius, angle) pair: 2k takes the cosine branch,
// 2k+1 the sine branch.
double normal_draw(std::uint64_t seed, std::uint64_t path, std::uint64_t step);

// Sequential view over normal_draw with the current Box-Muller pair cached.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t path)
      : seed_(seed), path_(path) {}

  double at(std::uint64_t step);
  double next() { return at(n_++); }

 private:
  std::uint64_t seed_, path_;
  std::uint64_t n_ = 0;
  std::uint64_t pair_ = ~std::uint64_t{0};
  double r_ = 0.0, c_ = 0.0, s_ = 0.0;  // cached radius and angle components
};

inline NormalStream gaussian_stream(std::uint64_t seed,
                                    std::uint64_t path_index) {
  return NormalStream(seed, path_index);
}

}  // namespace opiexit::sde

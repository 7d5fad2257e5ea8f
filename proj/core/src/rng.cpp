#include "opiexit/rng.hpp"

#include <cmath>
#include <numbers>

namespace opiexit::sde {

namespace {

// Box-Muller pair `k` of stream (seed, path): radius from counter word 2k,
// angle from counter word 2k+1.
inline void box_muller_pair(std::uint64_t seed, std::uint64_t path,
                            std::uint64_t k, double& r, double& c, double& s) {
  const double u1 = uniform_pos(counter_word(seed, path, 2 * k));
  const double u2 = uniform_pos(counter_word(seed, path, 2 * k + 1));
  r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  c = std::cos(a);
  s = std::sin(a);
}

}  // namespace

double normal_draw(std::uint64_t seed, std::uint64_t path, std::uint64_t step) {
  double r, c, s;
  box_muller_pair(seed, path, step >> 1, r, c, s);
  return (step & 1) ? r * s : r * c;
}

double NormalStream::at(std::uint64_t step) {
  const std::uint64_t k = step >> 1;
  if (k != pair_) {
    box_muller_pair(seed_, path_, k, r_, c_, s_);
    pair_ = k;
  }
  return (step & 1) ? r_ * s_ : r_ * c_;
}

}  // namespace opiexit::sde

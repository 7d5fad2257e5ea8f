#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "opiexit/domain.hpp"
#include "opiexit/model.hpp"
#include "opiexit/rng.hpp"

namespace opiexit::sde {

using model::EpidemicParams;
using model::Mat3;
using model::PopulationState;
using model::Vec3;

struct SdeConfig {
  double epsilon_noise = 0.01;  // SDE noise intensity (not the return rate)
  double dt = 1e-2;
  double t_max = 1000.0;
  std::uint64_t seed = 1;
};

void validate(const SdeConfig& cfg);

// 3x2 actuation: channel 1 pushes the susceptible fraction, channel 2 the
// recovered fraction. The addicted compartment is never actuated directly.
struct ActuationMatrix {
  double b1 = 0.01;
  double b2 = 0.001;
  Eigen::Matrix<double, 3, 2> dense() const {
    Eigen::Matrix<double, 3, 2> B = Eigen::Matrix<double, 3, 2>::Zero();
    B(0, 0) = b1;
    B(2, 1) = b2;
    return B;
  }
};

// Stationary Markov control u = v(x), optionally clamped per channel to
// [-umax, umax].
struct Policy {
  std::function<Eigen::Vector2d(const PopulationState&)> v;
  std::optional<double> umax;

  Eigen::Vector2d operator()(const PopulationState& s) const {
    Eigen::Vector2d u = v(s);
    if (umax) {
      const double m = *umax;
      u[0] = u[0] > m ? m : (u[0] < -m ? -m : u[0]);
      u[1] = u[1] > m ? m : (u[1] < -m ? -m : u[1]);
    }
    return u;
  }
};

// Samples at step boundaries; spacing dt except for a possibly shorter final
// step landing exactly on t_max.
struct Trajectory {
  std::vector<double> t;
  std::vector<PopulationState> x;
};

struct ExitRecord {
  double time;  // timestamp of the first sample outside the stop domain
  PopulationState state;
};

struct PathResult {
  Trajectory trajectory;
  std::optional<ExitRecord> exit;
};

// One Euler-Maruyama step. dW must be a draw from Normal(0, dt); noise
// enters only x1 (the diffusion is degenerate). With pol == nullptr the
// actuation term is omitted.
PopulationState em_step(const PopulationState& s, const EpidemicParams& p,
                        const Policy* pol, const ActuationMatrix& bt,
                        double eps_noise, double dt, double dW);

// Steps until t_max or the first sample outside `stop` (pass nullptr for no
// stopping). Throws ComputationError with the step index if the state ever
// turns non-finite.
PathResult simulate_path(const PopulationState& x0, const EpidemicParams& p,
                         const Policy* pol, const ActuationMatrix& bt,
                         const SdeConfig& cfg,
                         const exitstats::Domain* stop = nullptr);

// dx = (M x + c) dt + sqrt(eps) B dW with B = [1,0,0]^T. Used for the
// closed-loop linear dynamics M = A + B~K in deviation coordinates.
struct AffineDynamics {
  Mat3 M;
  Vec3 c = Vec3::Zero();
};

PathResult simulate_path(const Vec3& x0, const AffineDynamics& dyn,
                         const SdeConfig& cfg,
                         const exitstats::Domain* stop = nullptr);

}  // namespace opiexit::sde

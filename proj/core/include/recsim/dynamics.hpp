#pragma once

#include <cstddef>
#include <span>

#include "recsim/agents.hpp"

namespace recsim {

/// alpha weighs the previous polarization, beta the previous engagement;
/// drift_rate scales how far dynamic traits move per step.
struct DynamicsParams {
  double alpha = 0.9;
  double beta = 0.9;
  double drift_rate = 0.1;

  bool operator==(const DynamicsParams&) const = default;
};

/// Throws RangeError unless every parameter is within [0, 1].
void validate(const DynamicsParams& params);

/// P_s(t+1) = alpha * P_s(t) + (1 - alpha) * F. Throws RangeError on inputs
/// outside their ranges.
double update_polarization(double polarization, double alpha, double impact);

/// E_s(t+1) = beta * E_s(t) + (1 - beta) * T * F.
double update_engagement(double engagement, double beta, double activity, double impact);

/// What the agent did with its session, as counts.
struct ReactionSummary {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t friend_requests = 0;
};

/// One drift step of the dynamic traits:
///   pa += rate * (om / 7) * (mean consumed stance - pa)
///   er += rate * (negative fraction - positive fraction) * (n / 7)
///   sc += rate * friend requests sent
/// each clamped to [1, 7]. Fractions are over the consumed posts. Throws
/// EmptyConsumption when nothing was consumed.
DynamicTraits drift_dynamic_traits(const AgentPrompt& agent, std::span<const double> consumed_stances,
                                   const ReactionSummary& reactions, const DynamicsParams& params);

}  // namespace recsim

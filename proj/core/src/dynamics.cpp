#include "recsim/dynamics.hpp"

#include <algorithm>
#include <string>

#include "recsim/error.hpp"

namespace recsim {

namespace {

void require(double value, double lo, double hi, const char* field) {
  if (!(value >= lo && value <= hi)) {
    throw RangeError("dynamics", field, std::to_string(value) + " not in [" + std::to_string(lo) + ", " +
                                            std::to_string(hi) + "]");
  }
}

}  // namespace

void validate(const DynamicsParams& params) {
  require(params.alpha, 0.0, 1.0, "alpha");
  require(params.beta, 0.0, 1.0, "beta");
  require(params.drift_rate, 0.0, 1.0, "drift_rate");
}

double update_polarization(double polarization, double alpha, double impact) {
  require(polarization, -1.0, 1.0, "polarization");
  require(alpha, 0.0, 1.0, "alpha");
  require(impact, -1.0, 1.0, "impact");
  return alpha * polarization + (1.0 - alpha) * impact;
}

double update_engagement(double engagement, double beta, double activity, double impact) {
  require(engagement, -1.0, 1.0, "engagement");
  require(beta, 0.0, 1.0, "beta");
  require(activity, 0.0, 1.0, "activity");
  require(impact, -1.0, 1.0, "impact");
  return beta * engagement + (1.0 - beta) * activity * impact;
}

DynamicTraits drift_dynamic_traits(const AgentPrompt& agent, std::span<const double> consumed_stances,
                                   const ReactionSummary& reactions, const DynamicsParams& params) {
  if (consumed_stances.empty()) throw EmptyConsumption();
  require(params.drift_rate, 0.0, 1.0, "drift_rate");

  double stance_sum = 0.0;
  for (double s : consumed_stances) stance_sum += s;
  const double n = static_cast<double>(consumed_stances.size());
  const double mean_stance = stance_sum / n;
  const double neg = static_cast<double>(reactions.negative) / n;
  const double pos = static_cast<double>(reactions.positive) / n;

  const DynamicTraits& d = agent.dynamics;
  const double rate = params.drift_rate;
  DynamicTraits out;
  out.political_attitude =
      std::clamp(d.political_attitude + rate * (agent.statics.open_mindedness / 7.0) * (mean_stance - d.political_attitude),
                 1.0, 7.0);
  out.emotive_reaction =
      std::clamp(d.emotive_reaction + rate * (neg - pos) * (agent.statics.neuroticism / 7.0), 1.0, 7.0);
  out.social_connectivity =
      std::clamp(d.social_connectivity + rate * static_cast<double>(reactions.friend_requests), 1.0, 7.0);
  return out;
}

}  // namespace recsim

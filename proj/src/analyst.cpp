#include "reqprio/analyst.hpp"

#include <stdexcept>

namespace reqprio {

SimulatedAnalyst::SimulatedAnalyst(Ranking gold, double error_rate, std::uint64_t seed)
    : gold_(std::move(gold)), error_rate_(error_rate), rng_(seed) {
  if (!(error_rate >= 0.0 && error_rate <= 1.0)) {
    throw std::invalid_argument("error_rate must lie in [0, 1]");
  }
}

AnalystResponse SimulatedAnalyst::answer(const ComparisonQuery& query) {
  const auto& a = query.pair.first();
  const auto& b = query.pair.second();
  if (!gold_.contains(a) || !gold_.contains(b)) {
    throw ValidationError("", "pair " + query.pair.to_string() + " is not in the gold standard");
  }
  // 53 high bits -> uniform double in [0, 1); independent of the
  // library's distribution implementations.
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  const bool flip = u < error_rate_;
  ++answered_;
  if (flip) ++flipped_;
  const bool first_wins = gold_.precedes(a, b) != flip;
  return {query.pair, first_wins ? Verdict::kFirstPrecedes : Verdict::kSecondPrecedes};
}

}  // namespace reqprio

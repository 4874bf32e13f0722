#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "reqprio/elicitation.hpp"
#include "reqprio/model.hpp"

namespace reqprio {

/// Answers comparison queries from a gold-standard ranking, reversing each
/// answer independently with probability `error_rate`. Never undecided.
///
/// The stream is std::mt19937_64, whose output sequence is fixed by the
/// standard; one draw is consumed per answered query.
class SimulatedAnalyst {
 public:
  /// Throws std::invalid_argument unless 0 <= error_rate <= 1.
  SimulatedAnalyst(Ranking gold, double error_rate, std::uint64_t seed);

  /// Throws ValidationError if either id is missing from the gold standard.
  AnalystResponse answer(const ComparisonQuery& query);

  const Ranking& gold() const noexcept { return gold_; }
  double error_rate() const noexcept { return error_rate_; }
  std::size_t answered() const noexcept { return answered_; }
  std::size_t flipped() const noexcept { return flipped_; }

 private:
  Ranking gold_;
  double error_rate_;
  std::mt19937_64 rng_;
  std::size_t answered_ = 0;
  std::size_t flipped_ = 0;
};

}  // namespace reqprio

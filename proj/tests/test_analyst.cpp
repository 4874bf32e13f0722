#include <doctest.h>

#include <stdexcept>

#include "fixtures.hpp"
#include "reqprio/analyst.hpp"

using namespace reqprio;

TEST_SUITE("analyst") {

TEST_CASE("error-free analyst follows the gold standard") {
  SimulatedAnalyst a(fixtures::ranking({"R2", "R1", "R3"}), 0.0, 1);
  CHECK(a.answer({IdPair("R1", "R2"), 1}).preferred() == "R2");
  CHECK(a.answer({IdPair("R1", "R3"), 1}).preferred() == "R1");
  CHECK(a.answered() == 2);
  CHECK(a.flipped() == 0);
}

TEST_CASE("error rate one always reverses") {
  SimulatedAnalyst a(fixtures::ranking({"R2", "R1", "R3"}), 1.0, 1);
  for (int i = 0; i < 20; ++i) CHECK(a.answer({IdPair("R1", "R2"), 1}).preferred() == "R1");
  CHECK(a.flipped() == 20);
}

TEST_CASE("flip frequency tracks the error rate") {
  SimulatedAnalyst a(fixtures::ranking({"A", "B"}), 0.2, 424242);
  std::size_t wrong = 0;
  for (int i = 0; i < 10000; ++i) wrong += a.answer({IdPair("A", "B"), 1}).preferred() == "B";
  CHECK(wrong == a.flipped());
  const double rate = static_cast<double>(wrong) / 10000.0;
  CHECK(rate == doctest::Approx(0.2).epsilon(0.05));
  CHECK(std::abs(rate - 0.2) <= 0.01);
}

TEST_CASE("same seed, same answers") {
  auto gold = fixtures::ranking({"A", "B", "C"});
  SimulatedAnalyst a(gold, 0.3, 99);
  SimulatedAnalyst b(gold, 0.3, 99);
  for (int i = 0; i < 200; ++i) {
    ComparisonQuery q{IdPair(i % 2 ? "A" : "B", "C"), 1};
    CHECK(a.answer(q) == b.answer(q));
  }
}

TEST_CASE("bad inputs are rejected") {
  auto gold = fixtures::ranking({"A", "B"});
  CHECK_THROWS_AS(SimulatedAnalyst(gold, -0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(SimulatedAnalyst(gold, 1.5, 1), std::invalid_argument);
  SimulatedAnalyst a(gold, 0.0, 1);
  CHECK_THROWS_AS(a.answer({IdPair("A", "Z"), 1}), ValidationError);
}

}

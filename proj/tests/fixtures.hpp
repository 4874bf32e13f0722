#pragma once

#include <filesystem>
#include <string>

#include "reqprio/model.hpp"

namespace fixtures {

inline const std::filesystem::path kDataDir = REQPRIO_DATA_DIR;

/// The five-requirement example from the bundled data directory, rebuilt in
/// code so that model tests do not depend on the loader.
inline reqprio::Project worked_example() {
  reqprio::Project p;
  p.requirements = {{"R1", "Locate residents inside the facility", 2},
                    {"R2", "Raise an alarm on a detected fall", 1},
                    {"R3", "Notify staff on a handheld device", 2},
                    {"R4", "Store sensor readings", 3},
                    {"R5", "Track resident movement over time", 4}};
  p.dependencies = {{"R5", "R1"}, {"R2", "R4"}, {"R3", "R2"}, {"R3", "R4"}};
  p.gold_standard = reqprio::Ranking({"R2", "R1", "R3", "R4", "R5"});
  return p;
}

inline reqprio::Ranking ranking(std::initializer_list<const char*> ids) {
  std::vector<std::string> v(ids.begin(), ids.end());
  return reqprio::Ranking(std::move(v));
}

}  // namespace fixtures

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rspi::testing {

struct PropertyResult {
  bool ok = true;
  std::string detail;  // first counterexample when !ok
};

struct NamedProperty {
  std::string name;
  std::function<PropertyResult(std::uint64_t seed, std::size_t trials)> check;
};

/// Every invariant/property the allocator, engine, classifier and harness
/// promise, each as a randomized check over `trials` generated cases.
const std::vector<NamedProperty>& all_properties();

}  // namespace rspi::testing

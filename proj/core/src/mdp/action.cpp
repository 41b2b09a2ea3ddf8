#include "cdqn/mdp/action.hpp"

#include <cstdlib>
#include <string>

#include "cdqn/error.hpp"

namespace cdqn::mdp {

namespace {

bool level_ok(int level) noexcept { return level >= 0 && level < kLevels; }

}  // namespace

bool ActionTriple::in_range() const noexcept { return level_ok(vt) && level_ok(peep) && level_ok(fio2); }

ActionIndex::ActionIndex(int value) : value_(value) {
  if (value < 0 || value >= kNumActions) {
    throw DomainError("action index " + std::to_string(value) + " outside [0, " +
                      std::to_string(kNumActions - 1) + "]");
  }
}

ActionIndex encode_action(const ActionTriple& action) {
  if (!action.in_range()) {
    throw DomainError("action levels (" + std::to_string(action.vt) + ", " + std::to_string(action.peep) +
                      ", " + std::to_string(action.fio2) + ") outside [0, 6]");
  }
  return ActionIndex(action.vt * kLevels * kLevels + action.peep * kLevels + action.fio2);
}

ActionTriple decode_action(ActionIndex index) {
  const int i = index.value();
  return ActionTriple{i / (kLevels * kLevels), (i / kLevels) % kLevels, i % kLevels};
}

ActionTriple decode_action(int index) { return decode_action(ActionIndex(index)); }

int l1_distance(const ActionTriple& a, const ActionTriple& b) noexcept {
  return std::abs(a.vt - b.vt) + std::abs(a.peep - b.peep) + std::abs(a.fio2 - b.fio2);
}

}  // namespace cdqn::mdp

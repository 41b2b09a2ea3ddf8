#pragma once

#include <compare>
#include <cstdint>

namespace cdqn::mdp {

/// Discretization levels per ventilator setting.
inline constexpr int kLevels = 7;
/// Size of the factored action space (Vt x PEEP x FiO2).
inline constexpr int kNumActions = kLevels * kLevels * kLevels;

/// Ventilator settings as discrete levels, each in [0, 6].
struct ActionTriple {
  int vt = 0;
  int peep = 0;
  int fio2 = 0;

  bool in_range() const noexcept;
  friend bool operator==(const ActionTriple&, const ActionTriple&) = default;
};

/// Flat action index in [0, 342]; construction validates the range.
class ActionIndex {
 public:
  explicit ActionIndex(int value);

  int value() const noexcept { return value_; }
  friend auto operator<=>(const ActionIndex&, const ActionIndex&) = default;

 private:
  int value_;
};

/// index = vt * 49 + peep * 7 + fio2. Throws DomainError on an out-of-range level.
ActionIndex encode_action(const ActionTriple& action);
ActionTriple decode_action(ActionIndex index);
ActionTriple decode_action(int index);

/// Sum of absolute level differences, in [0, 18].
int l1_distance(const ActionTriple& a, const ActionTriple& b) noexcept;

}  // namespace cdqn::mdp

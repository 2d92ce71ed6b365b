#pragma once

#include <cmath>
#include <string_view>

namespace leggett {

enum class InequalityTag { i26, i28 };

// The two Leggett-type inequalities: sum of |C + C'| over num_pairs setting
// pairs plus sine_coeff * sin(phi/2), bounded by `bound` in any Leggett model.
struct InequalityKind {
  InequalityTag tag;
  int num_pairs;
  double bound;
  double sine_coeff;

  static InequalityKind i26() { return {InequalityTag::i26, 3, 6.0, 2.0}; }
  static InequalityKind i28() { return {InequalityTag::i28, 4, 8.0, 8.0 / std::sqrt(6.0)}; }
  static InequalityKind of(InequalityTag tag) {
    return tag == InequalityTag::i26 ? i26() : i28();
  }

  std::string_view name() const { return tag == InequalityTag::i26 ? "i26" : "i28"; }

  friend bool operator==(const InequalityKind& x, const InequalityKind& y) {
    return x.tag == y.tag;
  }
};

// "i26" / "i28"; throws DomainError otherwise.
InequalityKind parse_inequality_kind(std::string_view label);

}  // namespace leggett

#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"
#include "leggett/inequality_kind.hpp"

namespace leggett {

struct InequalityValue {
  InequalityKind kind = InequalityKind::i26();
  double phi = 0.0;
  double value = 0.0;  // includes the sine term
  std::vector<double> pair_terms;
  bool violated = false;
};

// (C_i, C_i') for each setting pair.
using CorrelationPair = std::pair<double, double>;

InequalityValue evaluate(const InequalityKind& kind, double phi,
                         std::span<const CorrelationPair> correlations);

// bound * V * cos(phi/2) + sine_coeff * sin(phi/2): the value reached by a
// Werner state of visibility V with settings adapted to it.
double quantum_value(const InequalityKind& kind, double phi, double visibility);

struct MaxViolation {
  double phi_star = 0.0;
  double value = 0.0;
};

MaxViolation max_violation(const InequalityKind& kind, double visibility);

struct PhiInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Open interval of phi where quantum_value exceeds the bound, or nullopt.
// A maximum that only touches the bound counts as no violation.
std::optional<PhiInterval> violation_region(const InequalityKind& kind, double visibility);

// Smallest visibility whose maximal quantum value reaches the bound.
double v_min(const InequalityKind& kind);
double f_min(const InequalityKind& kind);

// (value - bound) / sigma.
double sigma_violation(double value, double sigma, const InequalityKind& kind);

nlohmann::json to_json(const InequalityValue& value);

}  // namespace leggett

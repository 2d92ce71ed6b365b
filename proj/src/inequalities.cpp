#include "leggett/inequalities.hpp"

#include <cmath>
#include <string>

#include "leggett/errors.hpp"
#include "leggett/qstate.hpp"
#include "leggett/vec3.hpp"

namespace leggett {

namespace {

void require_phi(double phi) {
  if (!(phi >= 0.0 && phi <= kPi))
    throw DomainError("phi must lie in [0, pi] radians, got " + std::to_string(phi));
}

void require_visibility(double v) {
  if (!(v >= 0.0 && v <= 1.0))
    throw DomainError("visibility must lie in [0, 1], got " + std::to_string(v));
}

// Root of f on [lo, hi] with f(lo), f(hi) of opposite sign.
template <typename F>
double bisect(F&& f, double lo, double hi, double tol) {
  const bool rising = f(lo) < 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) < 0.0) == rising)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

InequalityValue evaluate(const InequalityKind& kind, double phi,
                         std::span<const CorrelationPair> correlations) {
  require_phi(phi);
  if (correlations.size() != static_cast<std::size_t>(kind.num_pairs))
    throw ArityError(std::string(kind.name()) + " expects " + std::to_string(kind.num_pairs) +
                     " correlation pairs, got " + std::to_string(correlations.size()));
  InequalityValue out;
  out.kind = kind;
  out.phi = phi;
  double sum = 0.0;
  for (const auto& [c, c_prime] : correlations) {
    if (!(std::abs(c) <= 1.0 && std::abs(c_prime) <= 1.0))
      throw DomainError("correlations must lie in [-1, 1]");
    out.pair_terms.push_back(std::abs(c + c_prime));
    sum += out.pair_terms.back();
  }
  out.value = sum + kind.sine_coeff * std::sin(phi / 2.0);
  out.violated = out.value > kind.bound;
  return out;
}

double quantum_value(const InequalityKind& kind, double phi, double visibility) {
  require_phi(phi);
  require_visibility(visibility);
  return kind.bound * visibility * std::cos(phi / 2.0) + kind.sine_coeff * std::sin(phi / 2.0);
}

MaxViolation max_violation(const InequalityKind& kind, double visibility) {
  require_visibility(visibility);
  const double a = kind.bound * visibility;
  return {2.0 * std::atan2(kind.sine_coeff, a), std::hypot(a, kind.sine_coeff)};
}

std::optional<PhiInterval> violation_region(const InequalityKind& kind, double visibility) {
  constexpr double kTol = 1e-10;
  const auto peak = max_violation(kind, visibility);
  if (!(peak.value > kind.bound)) return std::nullopt;
  auto excess = [&](double phi) { return quantum_value(kind, phi, visibility) - kind.bound; };
  // quantum_value is unimodal on [0, pi] with its peak at phi_star.
  const double lo = excess(0.0) >= 0.0 ? 0.0 : bisect(excess, 0.0, peak.phi_star, kTol);
  const double hi = bisect(excess, peak.phi_star, kPi, kTol);
  return PhiInterval{lo, hi};
}

double v_min(const InequalityKind& kind) {
  const double r = kind.sine_coeff / kind.bound;
  return std::sqrt(1.0 - r * r);
}

double f_min(const InequalityKind& kind) { return amplitude_fidelity(v_min(kind)); }

double sigma_violation(double value, double sigma, const InequalityKind& kind) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  return (value - kind.bound) / sigma;
}

nlohmann::json to_json(const InequalityValue& v) {
  return {{"kind", std::string(v.kind.name())},
          {"phi_deg", rad_to_deg(v.phi)},
          {"value", v.value},
          {"bound", v.kind.bound},
          {"pair_terms", v.pair_terms},
          {"violated", v.violated}};
}

}  // namespace leggett

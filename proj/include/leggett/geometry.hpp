#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "leggett/inequality_kind.hpp"
#include "leggett/qstate.hpp"
#include "leggett/vec3.hpp"

namespace leggett {

// Two Bob settings at angle phi, symmetric about the bisector u:
//   m  = cos(phi/2) u + sin(phi/2) e_hat
//   m' = cos(phi/2) u - sin(phi/2) e_hat
struct SettingPair {
  Vec3 m;
  Vec3 m_prime;
  Vec3 u;
  Vec3 e_hat;
  double phi = 0.0;
};

struct SettingsConfig {
  InequalityKind kind = InequalityKind::i26();
  double phi = 0.0;
  std::vector<Vec3> alice;
  std::vector<SettingPair> pairs;
  std::vector<std::size_t> pairing;  // pair index -> alice index (0-based)
};

SettingPair make_pair(const Vec3& u, const Vec3& e_hat, double phi);

// n1 = z, n2 = x; (u, e_hat) = (z, x), (z, y), (x, z).
SettingsConfig canonical_i26(double phi);

// Tetrahedral e_hat; u1 = u2 = n1 ~ (0,1,-1), u3 = u4 = n2 ~ (0,1,1).
SettingsConfig canonical_i28(double phi);

SettingsConfig canonical_config(const InequalityKind& kind, double phi);

// Points every Alice vector along T u for the bisector(s) of its pairs,
// maximizing |C + C'| for the state the tensor came from.
SettingsConfig adapt_to_state(const CorrelationTensor& tensor, const SettingsConfig& config);

// Throws DomainError if a SettingsConfig invariant fails.
void validate(const SettingsConfig& config);

// Unit vectors spread over the sphere by the golden-angle spiral.
std::vector<Vec3> fibonacci_sphere(std::size_t count);

// min over unit v of sum_i |v . dirs[i]|: grid search on a Fibonacci sphere
// followed by pattern-search refinement down to a 1e-10 step.
double geometric_factor(std::span<const Vec3> dirs, std::size_t grid_size = 10000);

double angle_between(const Vec3& a, const Vec3& b);

nlohmann::json to_json(const SettingsConfig& config);
SettingsConfig config_from_json(const nlohmann::json& j);

}  // namespace leggett

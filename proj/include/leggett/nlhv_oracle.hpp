#pragma once

#include <cstddef>
#include <span>

#include "json.hpp"
#include "leggett/geometry.hpp"
#include "leggett/vec3.hpp"

namespace leggett {

// Brute-force certification of the Leggett bounds.
//
// A hidden-variable point lambda = (u, v) fixes Malus-type marginals
// M_A = u . n and M_B = v . m for every setting choice. The joint outcome
// distribution of a subensemble is then
//   P(alpha, beta) = (1 + alpha M_A + beta M_B + alpha beta C) / 4,
// and C is free apart from keeping all four probabilities non-negative.
// That leaves C in [|M_A + M_B| - 1, 1 - |M_A - M_B|].
//
// The left-hand side of either inequality is convex in the correlations, so
// its supremum over mixtures of subensembles equals its supremum over single
// points; the oracle therefore maximizes over single lambda only. The marginal
// rule follows the standard Leggett model construction.

struct LeggettEnsemblePoint {
  Vec3 u;  // Alice-side polarization
  Vec3 v;  // Bob-side polarization
};

struct CorrelationInterval {
  double lo = -1.0;
  double hi = 1.0;
  bool contains(double c) const { return c >= lo && c <= hi; }
};

CorrelationInterval correlation_interval(double marginal_a, double marginal_b);

// Largest |C + C'| compatible with lambda for Alice setting n and Bob pair
// (m, m'). Never exceeds 2 - |v . (m - m')|.
double pair_term_max(const LeggettEnsemblePoint& lambda, const SettingPair& pair,
                     const Vec3& n);

// Sum of pair_term_max over every pair of the configuration.
double correlation_part_max(const LeggettEnsemblePoint& lambda, const SettingsConfig& config);

struct OracleResult {
  double value = 0.0;  // max of correlation part + sine term
  LeggettEnsemblePoint argmax;
  std::size_t u_index = 0;
  std::size_t v_index = 0;
};

// Max over the product grid us x vs; ties resolve to the lowest (u, v) index.
OracleResult oracle_max_over(const SettingsConfig& config, std::span<const Vec3> us,
                             std::span<const Vec3> vs);

// Both u and v range over a Fibonacci sphere of grid_size points (>= 50).
OracleResult oracle_max(const SettingsConfig& config, std::size_t grid_size = 500);

struct BoundReport {
  InequalityKind kind = InequalityKind::i26();
  double phi = 0.0;
  std::size_t grid_size = 0;
  double oracle_value = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - oracle_value
  LeggettEnsemblePoint argmax;

  // The grid can only under-approximate the supremum, so any excess over
  // the bound beyond roundoff means a bug.
  bool passed() const { return margin >= -1e-9; }
};

BoundReport verify_bound(const SettingsConfig& config, std::size_t grid_size = 500);

nlohmann::json to_json(const BoundReport& report);

}  // namespace leggett

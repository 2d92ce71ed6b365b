#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "leggett/geometry.hpp"
#include "leggett/inequalities.hpp"
#include "leggett/qstate.hpp"

namespace leggett {

// Outcome counts in the order (++, +-, -+, --).
using Counts = std::array<std::uint64_t, 4>;

// Sampling stream: std::mt19937_64 (its output sequence is fixed by the C++
// standard) with uniforms built from the top 53 bits. Per-setting streams are
// seeded with splitmix64(master + 0x9E3779B97F4A7C15 * (index + 1)).
inline constexpr const char* kRngVersion = "mt19937_64+splitmix64/v1";

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t sub_seed(std::uint64_t master, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// Readout of one qubit: f0 = P(report 0 | true 0), f1 = P(report 1 | true 1).
// Outcome 0 is the +1 result.
struct QubitReadout {
  double f0 = 1.0;
  double f1 = 1.0;

  // Column j is the reported distribution for true outcome j.
  Eigen::Matrix2d confusion() const;
};

struct ReadoutModel {
  QubitReadout alice;  // nuclear spin
  QubitReadout bob;    // electron spin

  static ReadoutModel identity() { return {}; }
  // R_A (x) R_B in the (++, +-, -+, --) ordering.
  Eigen::Matrix4d joint() const;
};

struct CorrelationEstimate {
  double value = 0.0;
  double sigma = 0.0;
};

Counts sample_from_probabilities(const JointProbabilities& p, std::uint64_t shots,
                                 std::uint64_t seed);
Counts sample_counts(const TwoQubitState& state, const Vec3& n, const Vec3& m,
                     std::uint64_t shots, std::uint64_t seed);

// C = (N++ + N-- - N+- - N-+) / N, sigma = sqrt((1 - C^2) / N).
CorrelationEstimate estimate_correlation(const Counts& counts);

JointProbabilities apply_confusion(const ReadoutModel& model, const JointProbabilities& p);

struct CorrectedProbabilities {
  JointProbabilities p{};
  bool clipped = false;  // a negative entry was set to zero before renormalizing
};

inline constexpr double kMaxConditionNumber = 1e6;

// R^{-1} p_measured, clipped at zero and renormalized. Throws
// ConditioningError when cond(R) exceeds kMaxConditionNumber.
CorrectedProbabilities correct_readout(const ReadoutModel& model,
                                       const JointProbabilities& p_measured);

struct SettingResult {
  std::size_t setting_id = 0;  // 2 * pair + (0 for m, 1 for m')
  Vec3 n;
  Vec3 m;
  Counts counts{};
  CorrelationEstimate raw;
  std::optional<CorrelationEstimate> corrected;
  bool clipped = false;
};

struct InequalityEstimate {
  InequalityValue value;
  double sigma = 0.0;
  std::optional<double> sigmas_violation;  // empty when sigma == 0
};

struct ExperimentResult {
  InequalityKind kind = InequalityKind::i26();
  double phi = 0.0;
  std::uint64_t shots_per_setting = 0;
  std::uint64_t seed = 0;
  ReadoutModel readout;
  std::vector<SettingResult> settings;
  InequalityEstimate raw;
  std::optional<InequalityEstimate> corrected;
  std::size_t clip_events = 0;
};

// Samples all 2 * num_pairs Bob settings against their Alice vector. Readout
// confusion is folded into the sampling distribution; with `correct` the
// measured frequencies are also inverted through the confusion matrix.
// The inequality sigma is sqrt(sum_i sigma_{C_i}^2 + sigma_{C_i'}^2), which
// treats each |C + C'| as sign-fixed and is unreliable near pair terms of 0.
ExperimentResult run_experiment(const TwoQubitState& state, const SettingsConfig& config,
                                const InequalityKind& kind, std::uint64_t shots_per_setting,
                                std::uint64_t seed, const ReadoutModel& readout, bool correct);

nlohmann::json to_json(const ExperimentResult& result);

// setting_id,n,m,n_pp,n_pm,n_mp,n_mm with vectors written as x;y;z.
std::string counts_csv(const ExperimentResult& result);

}  // namespace leggett

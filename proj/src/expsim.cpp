#include "leggett/expsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "leggett/errors.hpp"
#include "leggett/format.hpp"
#include "leggett/parallel.hpp"

namespace leggett {

namespace {

constexpr std::array<double, 4> kParity{1.0, -1.0, -1.0, 1.0};

void require_distribution(const JointProbabilities& p) {
  double sum = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < -1e-12)
      throw DomainError("probabilities must be finite and non-negative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError("probabilities must sum to 1");
}

void require_fidelity(double f, const char* name) {
  if (!(f >= 0.0 && f <= 1.0))
    throw DomainError(std::string("readout fidelity ") + name + " must lie in [0, 1]");
}

Eigen::Vector4d as_vector(const JointProbabilities& p) { return {p[0], p[1], p[2], p[3]}; }

JointProbabilities frequencies(const Counts& counts) {
  const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(),
                                                       std::uint64_t{0}));
  JointProbabilities p{};
  for (int k = 0; k < 4; ++k) p[k] = static_cast<double>(counts[k]) / n;
  return p;
}

double condition_number(const Eigen::Matrix4d& r) {
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(r);
  const auto& s = svd.singularValues();
  const double smallest = s(s.size() - 1);
  return smallest > 0.0 ? s(0) / smallest : std::numeric_limits<double>::infinity();
}

// Linear error propagation of C = parity . R^{-1} f for multinomial
// frequencies f: Var = (sum w_k^2 f_k - (w . f)^2) / N with w = R^{-T} parity.
CorrelationEstimate corrected_estimate(const Eigen::Matrix4d& r_inv,
                                       const JointProbabilities& freq,
                                       const JointProbabilities& p_corr, double shots) {
  const Eigen::Vector4d w = r_inv.transpose() * as_vector(kParity);
  const Eigen::Vector4d f = as_vector(freq);
  const double mean = w.dot(f);
  const double second = w.cwiseAbs2().dot(f);
  CorrelationEstimate est;
  est.value = std::clamp(as_vector(kParity).dot(as_vector(p_corr)), -1.0, 1.0);
  est.sigma = std::sqrt(std::max(0.0, second - mean * mean) / shots);
  return est;
}

InequalityEstimate assemble(const InequalityKind& kind, double phi,
                            const std::vector<CorrelationEstimate>& per_setting) {
  std::vector<CorrelationPair> pairs;
  double variance = 0.0;
  for (std::size_t p = 0; p < per_setting.size() / 2; ++p) {
    pairs.emplace_back(per_setting[2 * p].value, per_setting[2 * p + 1].value);
    variance += per_setting[2 * p].sigma * per_setting[2 * p].sigma +
                per_setting[2 * p + 1].sigma * per_setting[2 * p + 1].sigma;
  }
  InequalityEstimate est;
  est.value = evaluate(kind, phi, pairs);
  est.sigma = std::sqrt(variance);
  if (est.sigma > 0.0) est.sigmas_violation = sigma_violation(est.value.value, est.sigma, kind);
  return est;
}

nlohmann::json to_json(const CorrelationEstimate& e) {
  return {{"value", e.value}, {"sigma", e.sigma}};
}

nlohmann::json to_json(const InequalityEstimate& e) {
  nlohmann::json j = to_json(e.value);
  j["sigma"] = e.sigma;
  j["sigmas_violation"] =
      e.sigmas_violation ? nlohmann::json(*e.sigmas_violation) : nlohmann::json(nullptr);
  return j;
}

std::string vec_field(const Vec3& v) {
  return format_double(v.x()) + ";" + format_double(v.y()) + ";" + format_double(v.z());
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t sub_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + 0x9E3779B97F4A7C15ULL * (index + 1));
}

Eigen::Matrix2d QubitReadout::confusion() const {
  require_fidelity(f0, "f0");
  require_fidelity(f1, "f1");
  Eigen::Matrix2d r;
  r << f0, 1.0 - f1, 1.0 - f0, f1;
  return r;
}

Eigen::Matrix4d ReadoutModel::joint() const {
  const Eigen::Matrix2d ra = alice.confusion();
  const Eigen::Matrix2d rb = bob.confusion();
  Eigen::Matrix4d r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.block<2, 2>(2 * i, 2 * j) = ra(i, j) * rb;
  return r;
}

Counts sample_from_probabilities(const JointProbabilities& p, std::uint64_t shots,
                                 std::uint64_t seed) {
  if (shots < 1) throw DomainError("shots must be >= 1");
  require_distribution(p);
  std::array<double, 4> cumulative{};
  double running = 0.0;
  int last_nonzero = 0;
  for (int k = 0; k < 4; ++k) {
    running += std::max(p[k], 0.0);
    cumulative[k] = running;
    if (p[k] > 0.0) last_nonzero = k;
  }
  for (auto& c : cumulative) c /= running;

  Rng rng(seed);
  Counts counts{};
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double x = rng.uniform();
    // Zero-probability outcomes are skipped so roundoff in the cumulative sum
    // can never select them.
    int outcome = last_nonzero;
    for (int k = 0; k < last_nonzero; ++k)
      if (p[k] > 0.0 && x < cumulative[k]) {
        outcome = k;
        break;
      }
    ++counts[outcome];
  }
  return counts;
}

Counts sample_counts(const TwoQubitState& state, const Vec3& n, const Vec3& m,
                     std::uint64_t shots, std::uint64_t seed) {
  return sample_from_probabilities(joint_probabilities(state, n, m), shots, seed);
}

CorrelationEstimate estimate_correlation(const Counts& counts) {
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) throw DomainError("cannot estimate a correlation from zero counts");
  const double n = static_cast<double>(total);
  const double agree = static_cast<double>(counts[0]) + static_cast<double>(counts[3]);
  const double disagree = static_cast<double>(counts[1]) + static_cast<double>(counts[2]);
  CorrelationEstimate est;
  est.value = std::clamp((agree - disagree) / n, -1.0, 1.0);
  est.sigma = std::sqrt(std::max(0.0, 1.0 - est.value * est.value) / n);
  return est;
}

JointProbabilities apply_confusion(const ReadoutModel& model, const JointProbabilities& p) {
  require_distribution(p);
  const Eigen::Vector4d out = model.joint() * as_vector(p);
  return {out(0), out(1), out(2), out(3)};
}

CorrectedProbabilities correct_readout(const ReadoutModel& model,
                                       const JointProbabilities& p_measured) {
  require_distribution(p_measured);
  const Eigen::Matrix4d r = model.joint();
  const double cond = condition_number(r);
  if (!(cond <= kMaxConditionNumber)) {
    std::ostringstream msg;
    msg << "readout confusion matrix is ill-conditioned (condition number " << cond << ")";
    throw ConditioningError(msg.str(), cond);
  }
  const Eigen::Vector4d raw = r.partialPivLu().solve(as_vector(p_measured));
  CorrectedProbabilities out;
  double sum = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (raw(k) < 0.0) out.clipped = true;
    out.p[k] = std::max(raw(k), 0.0);
    sum += out.p[k];
  }
  for (auto& x : out.p) x /= sum;
  return out;
}

ExperimentResult run_experiment(const TwoQubitState& state, const SettingsConfig& config,
                                const InequalityKind& kind, std::uint64_t shots_per_setting,
                                std::uint64_t seed, const ReadoutModel& readout, bool correct) {
  if (!(config.kind == kind))
    throw DomainError("settings configuration does not match inequality " +
                      std::string(kind.name()));
  validate(config);
  if (shots_per_setting < 1) throw DomainError("shots must be >= 1");

  const CorrelationTensor tensor = correlation_tensor(state);
  const Eigen::Matrix4d r = readout.joint();
  Eigen::Matrix4d r_inv = Eigen::Matrix4d::Identity();
  if (correct) {
    const double cond = condition_number(r);
    if (!(cond <= kMaxConditionNumber)) {
      std::ostringstream msg;
      msg << "readout confusion matrix is ill-conditioned (condition number " << cond << ")";
      throw ConditioningError(msg.str(), cond);
    }
    r_inv = r.inverse();
  }

  const std::size_t num_settings = 2 * config.pairs.size();
  ExperimentResult result;
  result.kind = kind;
  result.phi = config.phi;
  result.shots_per_setting = shots_per_setting;
  result.seed = seed;
  result.readout = readout;
  result.settings = detail::parallel_map<SettingResult>(num_settings, [&](std::size_t id) {
    const auto& pair = config.pairs[id / 2];
    SettingResult s;
    s.setting_id = id;
    s.n = config.alice[config.pairing[id / 2]];
    s.m = id % 2 == 0 ? pair.m : pair.m_prime;
    const JointProbabilities ideal = joint_probabilities(tensor, s.n, s.m);
    const JointProbabilities reported = apply_confusion(readout, ideal);
    s.counts = sample_from_probabilities(reported, shots_per_setting, sub_seed(seed, id));
    s.raw = estimate_correlation(s.counts);
    if (correct) {
      const JointProbabilities freq = frequencies(s.counts);
      const auto fixed = correct_readout(readout, freq);
      s.clipped = fixed.clipped;
      s.corrected = corrected_estimate(r_inv, freq, fixed.p, static_cast<double>(shots_per_setting));
    }
    return s;
  });

  std::vector<CorrelationEstimate> raw, corrected;
  for (const auto& s : result.settings) {
    raw.push_back(s.raw);
    if (s.corrected) corrected.push_back(*s.corrected);
    if (s.clipped) ++result.clip_events;
  }
  result.raw = assemble(kind, config.phi, raw);
  if (correct) result.corrected = assemble(kind, config.phi, corrected);
  return result;
}

nlohmann::json to_json(const ExperimentResult& r) {
  nlohmann::json settings = nlohmann::json::array();
  for (const auto& s : r.settings) {
    nlohmann::json j = {{"setting_id", s.setting_id},
                        {"n", to_array(s.n)},
                        {"m", to_array(s.m)},
                        {"counts", {{"pp", s.counts[0]}, {"pm", s.counts[1]},
                                    {"mp", s.counts[2]}, {"mm", s.counts[3]}}},
                        {"raw", to_json(s.raw)}};
    if (s.corrected) {
      j["corrected"] = to_json(*s.corrected);
      j["clipped"] = s.clipped;
    }
    settings.push_back(j);
  }
  nlohmann::json j = {
      {"kind", std::string(r.kind.name())},
      {"phi_deg", rad_to_deg(r.phi)},
      {"shots_per_setting", r.shots_per_setting},
      {"seed", r.seed},
      {"rng", kRngVersion},
      {"readout",
       {{"nuclear", {{"f0", r.readout.alice.f0}, {"f1", r.readout.alice.f1}}},
        {"electron", {{"f0", r.readout.bob.f0}, {"f1", r.readout.bob.f1}}}}},
      {"settings", settings},
      {"raw", to_json(r.raw)},
      {"corrected", r.corrected ? to_json(*r.corrected) : nlohmann::json(nullptr)},
      {"clip_events", r.clip_events}};
  return j;
}

std::string counts_csv(const ExperimentResult& r) {
  std::string out = "setting_id,n,m,n_pp,n_pm,n_mp,n_mm\n";
  for (const auto& s : r.settings) {
    out += std::to_string(s.setting_id) + "," + vec_field(s.n) + "," + vec_field(s.m);
    for (auto c : s.counts) out += "," + std::to_string(c);
    out += "\n";
  }
  return out;
}

}  // namespace leggett

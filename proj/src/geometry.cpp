#include "leggett/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "leggett/errors.hpp"
#include "leggett/parallel.hpp"

namespace leggett {

namespace {

constexpr double kOrthoTol = 1e-9;

void require_phi(double phi) {
  if (!(phi >= 0.0 && phi <= kPi))
    throw DomainError("phi must lie in [0, pi] radians, got " + std::to_string(phi));
}

double sum_abs_projections(const Vec3& v, std::span<const Vec3> dirs) {
  double total = 0.0;
  for (const auto& e : dirs) total += std::abs(v.dot(e));
  return total;
}

// Unit vector orthogonal to v.
Vec3 any_orthogonal(const Vec3& v) {
  Vec3 axis = Vec3::UnitX();
  if (std::abs(v.x()) > std::abs(v.y()))
    axis = std::abs(v.y()) < std::abs(v.z()) ? Vec3::UnitY() : Vec3::UnitZ();
  else if (std::abs(v.x()) > std::abs(v.z()))
    axis = Vec3::UnitZ();
  return v.cross(axis).normalized();
}

Vec3 rotate_about(const Vec3& v, const Vec3& axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return v * c + axis.cross(v) * s + axis * axis.dot(v) * (1.0 - c);
}

struct Candidate {
  double value;
  std::size_t index;
};

// Pattern search on the sphere. Besides generic tangent moves it tries
// rotations about every e_i, which slide along the kinks v . e_i = 0 of the
// objective without leaving them.
double refine_on_sphere(Vec3 v, double step, std::span<const Vec3> dirs) {
  constexpr int kTangentMoves = 16;
  constexpr double kGoldenAngle = 2.399963229728653;
  double best = sum_abs_projections(v, dirs);
  double offset = 0.0;
  while (step >= 1e-10) {
    Vec3 best_move = v;
    double best_move_value = best;
    const Vec3 t1 = any_orthogonal(v);
    const Vec3 t2 = v.cross(t1);
    auto consider = [&](const Vec3& cand) {
      const double val = sum_abs_projections(cand, dirs);
      if (val < best_move_value) {
        best_move_value = val;
        best_move = cand;
      }
    };
    for (int k = 0; k < kTangentMoves; ++k) {
      const double theta = offset + 2.0 * kPi * k / kTangentMoves;
      consider((v + step * (std::cos(theta) * t1 + std::sin(theta) * t2)).normalized());
    }
    for (const auto& e : dirs) {
      const Vec3 axis = e.normalized();
      consider(rotate_about(v, axis, step).normalized());
      consider(rotate_about(v, axis, -step).normalized());
    }
    if (best_move_value < best) {
      best = best_move_value;
      v = best_move;
    } else {
      step *= 0.5;
      offset += kGoldenAngle;
    }
  }
  return best;
}

}  // namespace

InequalityKind parse_inequality_kind(std::string_view label) {
  if (label == "i26") return InequalityKind::i26();
  if (label == "i28") return InequalityKind::i28();
  throw DomainError("unknown inequality '" + std::string(label) + "' (expected i26 or i28)");
}

double angle_between(const Vec3& a, const Vec3& b) {
  // atan2 form stays accurate near 0 and pi.
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

SettingPair make_pair(const Vec3& u, const Vec3& e_hat, double phi) {
  require_phi(phi);
  if (!is_unit(u) || !is_unit(e_hat)) throw DomainError("u and e_hat must be unit vectors");
  if (std::abs(u.dot(e_hat)) > kOrthoTol) {
    std::ostringstream msg;
    msg << "bisector and difference direction are not orthogonal (u . e = " << u.dot(e_hat)
        << ")";
    throw DomainError(msg.str());
  }
  const double c = std::cos(phi / 2.0), s = std::sin(phi / 2.0);
  SettingPair p;
  p.u = u;
  p.e_hat = e_hat;
  p.phi = phi;
  p.m = c * u + s * e_hat;
  p.m_prime = c * u - s * e_hat;
  return p;
}

SettingsConfig canonical_i26(double phi) {
  require_phi(phi);
  const Vec3 x = Vec3::UnitX(), y = Vec3::UnitY(), z = Vec3::UnitZ();
  SettingsConfig cfg;
  cfg.kind = InequalityKind::i26();
  cfg.phi = phi;
  cfg.alice = {z, x};
  cfg.pairs = {make_pair(z, x, phi), make_pair(z, y, phi), make_pair(x, z, phi)};
  cfg.pairing = {0, 0, 1};
  return cfg;
}

SettingsConfig canonical_i28(double phi) {
  require_phi(phi);
  const double r3 = 1.0 / std::sqrt(3.0), r2 = 1.0 / std::sqrt(2.0);
  const Vec3 e1(r3, r3, r3), e2(r3, -r3, -r3), e3(-r3, r3, -r3), e4(-r3, -r3, r3);
  const Vec3 n1(0.0, r2, -r2), n2(0.0, r2, r2);
  SettingsConfig cfg;
  cfg.kind = InequalityKind::i28();
  cfg.phi = phi;
  cfg.alice = {n1, n2};
  cfg.pairs = {make_pair(n1, e1, phi), make_pair(n1, e2, phi), make_pair(n2, e3, phi),
               make_pair(n2, e4, phi)};
  cfg.pairing = {0, 0, 1, 1};
  return cfg;
}

SettingsConfig canonical_config(const InequalityKind& kind, double phi) {
  return kind.tag == InequalityTag::i26 ? canonical_i26(phi) : canonical_i28(phi);
}

SettingsConfig adapt_to_state(const CorrelationTensor& tensor, const SettingsConfig& config) {
  SettingsConfig out = config;
  for (std::size_t a = 0; a < config.alice.size(); ++a) {
    // Sum over the pairs measured against this Alice vector; they share a
    // bisector in the canonical configurations.
    Vec3 target = Vec3::Zero();
    for (std::size_t p = 0; p < config.pairs.size(); ++p)
      if (config.pairing[p] == a) target += tensor.T * config.pairs[p].u;
    const double norm = target.norm();
    if (norm < 1e-9)
      throw DegenerateTensorError("T u vanishes for Alice setting " + std::to_string(a + 1) +
                                  "; cannot orient it");
    out.alice[a] = target / norm;
  }
  return out;
}

void validate(const SettingsConfig& config) {
  const auto& kind = config.kind;
  if (config.alice.size() != 2)
    throw DomainError("configuration needs exactly 2 Alice settings");
  if (config.pairs.size() != static_cast<std::size_t>(kind.num_pairs) ||
      config.pairing.size() != config.pairs.size())
    throw DomainError("configuration for " + std::string(kind.name()) + " needs " +
                      std::to_string(kind.num_pairs) + " setting pairs");
  require_phi(config.phi);
  for (const auto& n : config.alice)
    if (!is_unit(n)) throw DomainError("Alice settings must be unit vectors");
  const std::vector<std::size_t> expected_pairing =
      kind.tag == InequalityTag::i26 ? std::vector<std::size_t>{0, 0, 1}
                                     : std::vector<std::size_t>{0, 0, 1, 1};
  if (config.pairing != expected_pairing)
    throw DomainError("unexpected pairing of setting pairs to Alice settings");
  for (const auto& p : config.pairs) {
    if (!is_unit(p.m) || !is_unit(p.m_prime) || !is_unit(p.u) || !is_unit(p.e_hat))
      throw DomainError("setting pair vectors must be unit vectors");
    if (std::abs(p.u.dot(p.e_hat)) > kOrthoTol)
      throw DomainError("setting pair bisector is not orthogonal to its difference direction");
    if (std::abs(angle_between(p.m, p.m_prime) - p.phi) > 1e-9 ||
        std::abs(p.phi - config.phi) > 1e-9)
      throw DomainError("setting pair angle does not match phi");
    const double c = std::cos(p.phi / 2.0), s = std::sin(p.phi / 2.0);
    if ((p.m - (c * p.u + s * p.e_hat)).cwiseAbs().maxCoeff() > 1e-12 ||
        (p.m_prime - (c * p.u - s * p.e_hat)).cwiseAbs().maxCoeff() > 1e-12)
      throw DomainError("setting pair does not match its (u, e_hat, phi) parametrization");
  }
  const double expected_dot = kind.tag == InequalityTag::i26 ? 0.0 : -1.0 / 3.0;
  for (std::size_t i = 0; i < config.pairs.size(); ++i)
    for (std::size_t j = i + 1; j < config.pairs.size(); ++j)
      if (std::abs(config.pairs[i].e_hat.dot(config.pairs[j].e_hat) - expected_dot) > 1e-9)
        throw DomainError(kind.tag == InequalityTag::i26
                              ? "difference directions must form an orthogonal triad"
                              : "difference directions must form a regular tetrahedron");
}

std::vector<Vec3> fibonacci_sphere(std::size_t count) {
  constexpr double kGoldenAngle = 2.399963229728653;  // pi (3 - sqrt 5)
  std::vector<Vec3> pts;
  pts.reserve(count);
  const double n = static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double theta = kGoldenAngle * static_cast<double>(i);
    pts.emplace_back(r * std::cos(theta), r * std::sin(theta), z);
  }
  return pts;
}

double geometric_factor(std::span<const Vec3> dirs, std::size_t grid_size) {
  if (dirs.empty()) throw DomainError("geometric_factor needs at least one direction");
  if (grid_size < 100) throw DomainError("geometric_factor grid_size must be >= 100");

  const auto grid = fibonacci_sphere(grid_size);
  const auto values = detail::parallel_map<double>(
      grid.size(), [&](std::size_t i) { return sum_abs_projections(grid[i], dirs); });

  constexpr std::size_t kStarts = 8;
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t starts = std::min(kStarts, order.size());
  std::partial_sort(order.begin(), order.begin() + starts, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return values[a] != values[b] ? values[a] < values[b] : a < b;
                    });

  const double spacing = std::sqrt(4.0 * kPi / static_cast<double>(grid_size));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < starts; ++s)
    best = std::min(best, refine_on_sphere(grid[order[s]], spacing, dirs));
  return best;
}

nlohmann::json to_json(const SettingsConfig& config) {
  nlohmann::json alice = nlohmann::json::array();
  for (const auto& n : config.alice) alice.push_back(to_array(n));
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : config.pairs)
    pairs.push_back({{"m", to_array(p.m)},
                     {"m_prime", to_array(p.m_prime)},
                     {"e_hat", to_array(p.e_hat)},
                     {"u", to_array(p.u)}});
  nlohmann::json pairing = nlohmann::json::array();
  for (auto a : config.pairing) pairing.push_back(a + 1);
  return {{"kind", std::string(config.kind.name())},
          {"phi_deg", rad_to_deg(config.phi)},
          {"alice", alice},
          {"pairs", pairs},
          {"pairing", pairing}};
}

SettingsConfig config_from_json(const nlohmann::json& j) {
  auto vec = [](const nlohmann::json& a) {
    const auto v = a.get<std::array<double, 3>>();
    return Vec3(v[0], v[1], v[2]);
  };
  SettingsConfig cfg;
  cfg.kind = parse_inequality_kind(j.at("kind").get<std::string>());
  cfg.phi = deg_to_rad(j.at("phi_deg").get<double>());
  for (const auto& n : j.at("alice")) cfg.alice.push_back(vec(n));
  for (const auto& p : j.at("pairs")) {
    SettingPair pair;
    pair.m = vec(p.at("m"));
    pair.m_prime = vec(p.at("m_prime"));
    pair.e_hat = vec(p.at("e_hat"));
    pair.u = vec(p.at("u"));
    pair.phi = cfg.phi;
    cfg.pairs.push_back(pair);
  }
  for (const auto& a : j.at("pairing")) {
    const int idx = a.get<int>();
    if (idx < 1) throw DomainError("pairing entries are 1-based Alice indices");
    cfg.pairing.push_back(static_cast<std::size_t>(idx - 1));
  }
  return cfg;
}

}  // namespace leggett

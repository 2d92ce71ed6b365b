#include "leggett/nlhv_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "leggett/errors.hpp"
#include "leggett/parallel.hpp"

namespace leggett {

namespace {

void require_marginal(double m) {
  if (!(m >= -1.0 && m <= 1.0))
    throw DomainError("marginal must lie in [-1, 1], got " + std::to_string(m));
}

// Marginals come from dot products of unit vectors and may overshoot by an ulp.
double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

double pair_term_from_marginals(double ma, double mb, double mb_prime) {
  const auto c = correlation_interval(ma, mb);
  const auto cp = correlation_interval(ma, mb_prime);
  return std::max(c.hi + cp.hi, -(c.lo + cp.lo));
}

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t iu = 0;
  std::size_t iv = 0;
};

}  // namespace

CorrelationInterval correlation_interval(double marginal_a, double marginal_b) {
  require_marginal(marginal_a);
  require_marginal(marginal_b);
  return {std::abs(marginal_a + marginal_b) - 1.0, 1.0 - std::abs(marginal_a - marginal_b)};
}

double pair_term_max(const LeggettEnsemblePoint& lambda, const SettingPair& pair,
                     const Vec3& n) {
  if (!is_unit(lambda.u) || !is_unit(lambda.v))
    throw DomainError("hidden-variable vectors must be unit vectors");
  if (!is_unit(n)) throw DomainError("Alice setting must be a unit vector");
  const double ma = clamp_unit(lambda.u.dot(n));
  const double mb = clamp_unit(lambda.v.dot(pair.m));
  const double mbp = clamp_unit(lambda.v.dot(pair.m_prime));
  const double term = pair_term_from_marginals(ma, mb, mbp);
  const double ceiling = 2.0 - std::abs(lambda.v.dot(pair.m - pair.m_prime));
  if (term > ceiling + 1e-12)
    throw std::logic_error("pair term exceeds the per-lambda bound 2 - |v.(m - m')|");
  return term;
}

double correlation_part_max(const LeggettEnsemblePoint& lambda, const SettingsConfig& config) {
  double total = 0.0;
  for (std::size_t p = 0; p < config.pairs.size(); ++p)
    total += pair_term_max(lambda, config.pairs[p], config.alice[config.pairing[p]]);
  return total;
}

OracleResult oracle_max_over(const SettingsConfig& config, std::span<const Vec3> us,
                             std::span<const Vec3> vs) {
  if (us.empty() || vs.empty()) throw DomainError("oracle grids must be non-empty");
  const std::size_t np = config.pairs.size();

  // Marginals depend on u or v alone; tabulate them once.
  std::vector<double> ma(us.size() * np);
  for (std::size_t i = 0; i < us.size(); ++i)
    for (std::size_t p = 0; p < np; ++p)
      ma[i * np + p] = clamp_unit(us[i].dot(config.alice[config.pairing[p]]));
  std::vector<double> mb(vs.size() * np), mbp(vs.size() * np);
  for (std::size_t j = 0; j < vs.size(); ++j)
    for (std::size_t p = 0; p < np; ++p) {
      mb[j * np + p] = clamp_unit(vs[j].dot(config.pairs[p].m));
      mbp[j * np + p] = clamp_unit(vs[j].dot(config.pairs[p].m_prime));
    }

  const unsigned workers = detail::worker_count(us.size());
  std::vector<Best> partial(workers);
  detail::parallel_chunks(us.size(), workers, [&](std::size_t chunk, std::size_t b, std::size_t e) {
    Best best;
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t j = 0; j < vs.size(); ++j) {
        double total = 0.0;
        for (std::size_t p = 0; p < np; ++p)
          total += pair_term_from_marginals(ma[i * np + p], mb[j * np + p], mbp[j * np + p]);
        if (total > best.value) best = {total, i, j};
      }
    partial[chunk] = best;
  });

  Best best;
  for (const auto& b : partial)
    if (b.value > best.value) best = b;

  OracleResult out;
  out.value = best.value + config.kind.sine_coeff * std::sin(config.phi / 2.0);
  out.u_index = best.iu;
  out.v_index = best.iv;
  out.argmax = {us[best.iu], vs[best.iv]};
  return out;
}

OracleResult oracle_max(const SettingsConfig& config, std::size_t grid_size) {
  if (grid_size < 50) throw DomainError("oracle grid_size must be >= 50");
  const auto grid = fibonacci_sphere(grid_size);
  return oracle_max_over(config, grid, grid);
}

BoundReport verify_bound(const SettingsConfig& config, std::size_t grid_size) {
  const auto result = oracle_max(config, grid_size);
  BoundReport r;
  r.kind = config.kind;
  r.phi = config.phi;
  r.grid_size = grid_size;
  r.oracle_value = result.value;
  r.bound = config.kind.bound;
  r.margin = r.bound - r.oracle_value;
  r.argmax = result.argmax;
  return r;
}

nlohmann::json to_json(const BoundReport& r) {
  return {{"kind", std::string(r.kind.name())},
          {"phi_deg", rad_to_deg(r.phi)},
          {"grid_size", r.grid_size},
          {"oracle_value", r.oracle_value},
          {"bound", r.bound},
          {"margin", r.margin},
          {"argmax_u", to_array(r.argmax.u)},
          {"argmax_v", to_array(r.argmax.v)}};
}

}  // namespace leggett

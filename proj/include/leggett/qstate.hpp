#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string_view>

#include "json.hpp"
#include "leggett/vec3.hpp"

namespace leggett {

using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix4cd;

enum class BellKind { phi_minus, phi_plus, psi_minus, psi_plus };

std::string_view to_string(BellKind kind);
// Throws DomainError for an unknown label.
BellKind parse_bell_kind(std::string_view label);

// Density matrix of a qubit pair in the basis |00>,|01>,|10>,|11>. Qubit A
// (nuclear spin, Alice) is the left factor; spin up is |0>.
class TwoQubitState {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-12;
  static constexpr double kEigenTol = 1e-10;

  // Validates the matrix; throws InvalidStateError on failure.
  explicit TwoQubitState(const Matrix4c& matrix);

  const Matrix4c& matrix() const { return matrix_; }

 private:
  Matrix4c matrix_;
};

struct CorrelationTensor {
  Mat3 T = Mat3::Zero();  // T(j,k) = <sigma_j (x) sigma_k>
  Vec3 a = Vec3::Zero();  // Alice Bloch vector
  Vec3 b = Vec3::Zero();  // Bob Bloch vector

  // n^T T m without any normalization; bilinear in (n, m).
  double contract(const Vec3& n, const Vec3& m) const { return n.dot(T * m); }
};

// Outcome probabilities in the order (++, +-, -+, --).
using JointProbabilities = std::array<double, 4>;

TwoQubitState bell_state(BellKind kind);

// V |Bell><Bell| + (1 - V) I/4.
TwoQubitState werner(double visibility, BellKind base = BellKind::phi_minus);

// sqrt(3V + 1) / 2, the fidelity convention used when quoting threshold fidelities.
double amplitude_fidelity(double visibility);

// <Bell|rho_V|Bell> = (3V + 1) / 4.
double overlap_fidelity(double visibility);

// <psi|rho|psi> for the named Bell state.
double bell_overlap(const TwoQubitState& state, BellKind kind);

CorrelationTensor correlation_tensor(const TwoQubitState& state);

// C_{n,m} = sum_{alpha,beta} alpha beta P(alpha, beta | n, m) = n^T T m.
double correlation(const TwoQubitState& state, const Vec3& n, const Vec3& m);
double correlation(const CorrelationTensor& tensor, const Vec3& n, const Vec3& m);

JointProbabilities joint_probabilities(const TwoQubitState& state, const Vec3& n,
                                       const Vec3& m);
JointProbabilities joint_probabilities(const CorrelationTensor& tensor, const Vec3& n,
                                       const Vec3& m);

// {"density_matrix": [[[re, im], ...4], ...4]}
nlohmann::json to_json(const TwoQubitState& state);
TwoQubitState state_from_json(const nlohmann::json& j);

}  // namespace leggett

#include "leggett/qstate.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <sstream>
#include <string>

#include "leggett/errors.hpp"

namespace leggett {

namespace {

using Matrix2c = Eigen::Matrix2cd;

const std::array<Matrix2c, 3>& paulis() {
  static const std::array<Matrix2c, 3> sigma = [] {
    std::array<Matrix2c, 3> s;
    const Complex i(0.0, 1.0);
    s[0] << 0.0, 1.0, 1.0, 0.0;
    s[1] << 0.0, -i, i, 0.0;
    s[2] << 1.0, 0.0, 0.0, -1.0;
    return s;
  }();
  return sigma;
}

Matrix4c kron(const Matrix2c& left, const Matrix2c& right) {
  Matrix4c out;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) out.block<2, 2>(2 * r, 2 * c) = left(r, c) * right;
  return out;
}

Eigen::Vector4cd bell_vector(BellKind kind) {
  const double h = 1.0 / std::sqrt(2.0);
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  switch (kind) {
    case BellKind::phi_minus: psi << h, 0.0, 0.0, -h; break;
    case BellKind::phi_plus: psi << h, 0.0, 0.0, h; break;
    case BellKind::psi_minus: psi << 0.0, h, -h, 0.0; break;
    case BellKind::psi_plus: psi << 0.0, h, h, 0.0; break;
  }
  return psi;
}

// Real part of Tr[rho * op]; the imaginary residue must vanish for Hermitian op.
double expectation(const Matrix4c& rho, const Matrix4c& op) {
  const Complex value = (rho * op).trace();
  if (std::abs(value.imag()) > 1e-12) {
    std::ostringstream msg;
    msg << "expectation value has imaginary part " << value.imag();
    throw InvalidStateError(msg.str());
  }
  return value.real();
}

void require_unit(const Vec3& v, const char* name) {
  if (!is_unit(v)) {
    std::ostringstream msg;
    msg << name << " must be a unit vector (norm " << v.norm() << ")";
    throw DomainError(msg.str());
  }
}

void require_visibility(double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0))
    throw DomainError("visibility must lie in [0, 1], got " + std::to_string(visibility));
}

}  // namespace

std::string_view to_string(BellKind kind) {
  switch (kind) {
    case BellKind::phi_minus: return "phi_minus";
    case BellKind::phi_plus: return "phi_plus";
    case BellKind::psi_minus: return "psi_minus";
    case BellKind::psi_plus: return "psi_plus";
  }
  return "unknown";
}

BellKind parse_bell_kind(std::string_view label) {
  for (auto k : {BellKind::phi_minus, BellKind::phi_plus, BellKind::psi_minus, BellKind::psi_plus})
    if (to_string(k) == label) return k;
  throw DomainError("unknown Bell state '" + std::string(label) + "'");
}

TwoQubitState::TwoQubitState(const Matrix4c& matrix) : matrix_(matrix) {
  const double asym = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= kHermitianTol))
    throw InvalidStateError("density matrix is not Hermitian (max deviation " +
                            std::to_string(asym) + ")");
  const Complex tr = matrix_.trace();
  if (!(std::abs(tr - 1.0) <= kTraceTol))
    throw InvalidStateError("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(matrix_, Eigen::EigenvaluesOnly);
  const double smallest = solver.eigenvalues().minCoeff();
  if (!(smallest >= -kEigenTol))
    throw InvalidStateError("density matrix is not positive semidefinite (eigenvalue " +
                            std::to_string(smallest) + ")");
}

TwoQubitState bell_state(BellKind kind) {
  const Eigen::Vector4cd psi = bell_vector(kind);
  return TwoQubitState(psi * psi.adjoint());
}

TwoQubitState werner(double visibility, BellKind base) {
  require_visibility(visibility);
  const Eigen::Vector4cd psi = bell_vector(base);
  const Matrix4c rho =
      visibility * (psi * psi.adjoint()) + (1.0 - visibility) * 0.25 * Matrix4c::Identity();
  return TwoQubitState(rho);
}

double amplitude_fidelity(double visibility) {
  require_visibility(visibility);
  return std::sqrt(3.0 * visibility + 1.0) / 2.0;
}

double overlap_fidelity(double visibility) {
  require_visibility(visibility);
  return (3.0 * visibility + 1.0) / 4.0;
}

double bell_overlap(const TwoQubitState& state, BellKind kind) {
  const Eigen::Vector4cd psi = bell_vector(kind);
  return (psi.adjoint() * state.matrix() * psi)(0, 0).real();
}

CorrelationTensor correlation_tensor(const TwoQubitState& state) {
  const auto& s = paulis();
  const Matrix2c id = Matrix2c::Identity();
  const Matrix4c& rho = state.matrix();
  CorrelationTensor out;
  for (int j = 0; j < 3; ++j) {
    out.a(j) = expectation(rho, kron(s[j], id));
    out.b(j) = expectation(rho, kron(id, s[j]));
    for (int k = 0; k < 3; ++k) out.T(j, k) = expectation(rho, kron(s[j], s[k]));
  }
  return out;
}

double correlation(const CorrelationTensor& tensor, const Vec3& n, const Vec3& m) {
  require_unit(n, "n");
  require_unit(m, "m");
  return std::clamp(tensor.contract(n, m), -1.0, 1.0);
}

double correlation(const TwoQubitState& state, const Vec3& n, const Vec3& m) {
  return correlation(correlation_tensor(state), n, m);
}

JointProbabilities joint_probabilities(const CorrelationTensor& tensor, const Vec3& n,
                                       const Vec3& m) {
  require_unit(n, "n");
  require_unit(m, "m");
  const double ma = tensor.a.dot(n);
  const double mb = tensor.b.dot(m);
  const double c = tensor.contract(n, m);
  JointProbabilities p{};
  int idx = 0;
  for (int alpha : {1, -1})
    for (int beta : {1, -1}) {
      const double v = 0.25 * (1.0 + alpha * ma + beta * mb + alpha * beta * c);
      p[idx++] = std::max(v, 0.0);
    }
  return p;
}

JointProbabilities joint_probabilities(const TwoQubitState& state, const Vec3& n,
                                       const Vec3& m) {
  return joint_probabilities(correlation_tensor(state), n, m);
}

nlohmann::json to_json(const TwoQubitState& state) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 4; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < 4; ++c) {
      const Complex z = state.matrix()(r, c);
      row.push_back({z.real(), z.imag()});
    }
    rows.push_back(row);
  }
  return {{"density_matrix", rows}};
}

TwoQubitState state_from_json(const nlohmann::json& j) {
  const auto& rows = j.at("density_matrix");
  if (!rows.is_array() || rows.size() != 4)
    throw InvalidStateError("density_matrix must be a 4x4 array of [re, im] pairs");
  Matrix4c m;
  for (int r = 0; r < 4; ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || row.size() != 4)
      throw InvalidStateError("density_matrix must be a 4x4 array of [re, im] pairs");
    for (int c = 0; c < 4; ++c) {
      const auto& z = row[c];
      if (!z.is_array() || z.size() != 2)
        throw InvalidStateError("density_matrix entries must be [re, im] pairs");
      m(r, c) = Complex(z[0].get<double>(), z[1].get<double>());
    }
  }
  return TwoQubitState(m);
}

}  // namespace leggett

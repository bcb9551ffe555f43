#include "resim/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "resim/errors.hpp"

namespace resim {

bool validate_params(const SimParams& p) {
  if (!(p.T > 0.0) || !(p.alpha > 0.0))
    throw std::invalid_argument("validate_params: T and alpha must be positive");
  const double at = p.alpha * p.T;
  const double half_t2 = p.T * p.T / 2.0;
  return 1.0 + half_t2 <= at && at <= 2.0 - half_t2;
}

void require_valid_params(const SimParams& p) {
  if (!validate_params(p))
    throw ValidationError("parameters violate 1 + T^2/2 <= alpha*T <= 2 - T^2/2 (T=" +
                          std::to_string(p.T) + ", alpha=" + std::to_string(p.alpha) + ")");
}

NetworkState NetworkState::make(std::vector<double> pos, std::vector<double> vel,
                                std::vector<double> offs) {
  if (offs.empty()) offs.assign(pos.size(), 0.0);
  if (pos.size() != vel.size() || pos.size() != offs.size())
    throw std::invalid_argument("NetworkState: vector lengths differ");
  NetworkState s;
  s.positions = std::move(pos);
  s.velocities = std::move(vel);
  s.offsets = std::move(offs);
  return s;
}

NetworkState step_state(const NetworkState& s, const ControlVector& u, const SimParams& p) {
  const int n = s.n();
  if (static_cast<int>(u.u.size()) != n ||
      static_cast<int>(s.velocities.size()) != n ||
      static_cast<int>(s.offsets.size()) != n)
    throw std::invalid_argument("step_state: inconsistent vector lengths");

  NetworkState out = s;
  const double half_t2 = p.T * p.T / 2.0;
  for (int i = 0; i < n; ++i) {
    out.positions[i] = s.positions[i] + p.T * s.velocities[i] + half_t2 * u.u[i];
    out.velocities[i] = s.velocities[i] + p.T * u.u[i];
    if (!std::isfinite(out.positions[i]) || !std::isfinite(out.velocities[i]))
      throw NumericError("step_state: non-finite state for agent " + std::to_string(i + 1) +
                             " at step " + std::to_string(s.step + 1),
                         i);
  }
  out.step = s.step + 1;
  return out;
}

double control_from_samples(double x_i, double v_i,
                            std::span<const std::pair<double, double>> weighted_samples,
                            double alpha) {
  double acc = 0.0;
  for (const auto& [w, sample] : weighted_samples) acc += w * (sample - x_i);
  return acc - alpha * v_i;
}

ControlVector nominal_control(const NetworkState& s, const Digraph& g, const SimParams& p) {
  if (g.n() != s.n()) throw std::invalid_argument("nominal_control: graph size mismatch");
  ControlVector out;
  out.u.resize(s.n());
  std::vector<std::pair<double, double>> ws;
  for (int i = 0; i < s.n(); ++i) {
    ws.clear();
    for (const auto& [j, w] : g.in_edges(i)) ws.emplace_back(w, s.positions[j]);
    out.u[i] = control_from_samples(s.positions[i], s.velocities[i], ws, p.alpha);
  }
  return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> phi_matrices(const Digraph& gk,
                                                         const Digraph& gk_prev,
                                                         const SimParams& p,
                                                         const std::vector<int>& malicious) {
  require_valid_params(p);
  const int n = gk.n();
  if (gk_prev.n() != n) throw std::invalid_argument("phi_matrices: graph sizes differ");

  std::vector<char> is_mal(n, 0);
  for (int m : malicious) {
    if (m < 0 || m >= n) throw std::invalid_argument("phi_matrices: malicious index out of range");
    is_mal[m] = 1;
  }

  Eigen::VectorXd normal = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i)
    if (is_mal[i]) normal(i) = 0.0;

  const double half_t2 = p.T * p.T / 2.0;
  Eigen::MatrixXd r_mat = Eigen::MatrixXd::Identity(n, n) -
                          p.alpha * p.T * normal.asDiagonal().toDenseMatrix();

  auto masked_laplacian = [&](const Digraph& g) {
    Eigen::MatrixXd l = g.laplacian();
    for (int i = 0; i < n; ++i)
      if (is_mal[i]) l.row(i).setZero();
    return l;
  };

  Eigen::MatrixXd phi1 =
      r_mat + Eigen::MatrixXd::Identity(n, n) - half_t2 * masked_laplacian(gk);
  Eigen::MatrixXd phi2 = -r_mat - half_t2 * masked_laplacian(gk_prev);
  return {phi1, phi2};
}

}  // namespace resim

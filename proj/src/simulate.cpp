#include "mvplc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mvplc/random.hpp"

namespace mvplc {

double wrap_angle(double a) {
  constexpr double kPi = std::numbers::pi;
  if (!std::isfinite(a)) return a;
  double w = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

VehicleState step_dynamics(const VehicleState& s, const ControlInput& u, double dt) {
  return {s.x + u.v * std::cos(s.psi) * dt, s.y + u.v * std::sin(s.psi) * dt, wrap_angle(s.psi + u.omega * dt)};
}

Eigen::Matrix3d dynamics_jacobian(const VehicleState& s, const ControlInput& u, double dt) {
  Eigen::Matrix3d f = Eigen::Matrix3d::Identity();
  f(0, 2) = -u.v * std::sin(s.psi) * dt;
  f(1, 2) = u.v * std::cos(s.psi) * dt;
  return f;
}

Eigen::Matrix<double, 3, 2> input_jacobian(const VehicleState& s, double dt) {
  Eigen::Matrix<double, 3, 2> g = Eigen::Matrix<double, 3, 2>::Zero();
  g(0, 0) = std::cos(s.psi) * dt;
  g(1, 0) = std::sin(s.psi) * dt;
  g(2, 1) = dt;
  return g;
}

double bearing_to(const VehicleState& s, Point landmark) {
  return wrap_angle(std::atan2(landmark.y - s.y, landmark.x - s.x) - s.psi);
}

Eigen::RowVector3d bearing_jacobian(const VehicleState& s, Point landmark) {
  const double dx = landmark.x - s.x;
  const double dy = landmark.y - s.y;
  const double r2 = dx * dx + dy * dy;
  return {dy / r2, -dx / r2, -1.0};
}

std::vector<Sighting> visible_landmarks(const VehicleState& s, std::span<const Point> landmarks, double sensing_range) {
  std::vector<Sighting> out;
  for (std::size_t k = 0; k < landmarks.size(); ++k) {
    if (distance({s.x, s.y}, landmarks[k]) <= sensing_range) out.push_back({static_cast<int>(k), bearing_to(s, landmarks[k])});
  }
  return out;
}

namespace {

Eigen::Matrix3d symmetric(const Eigen::Matrix3d& m) { return 0.5 * (m + m.transpose()); }

Eigen::Matrix3d checked_inverse(const Eigen::Matrix3d& m) {
  Eigen::LDLT<Eigen::Matrix3d> ldlt(m);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 0.0) {
    throw std::domain_error("information matrix is not positive definite");
  }
  return symmetric(ldlt.solve(Eigen::Matrix3d::Identity()));
}

}  // namespace

BeliefState BeliefState::from_moments(const Eigen::Vector3d& mean, const Eigen::Matrix3d& cov) {
  BeliefState b;
  b.info = checked_inverse(cov);
  b.info_vec = b.info * mean;
  return b;
}

Eigen::Vector3d BeliefState::mean() const { return info.ldlt().solve(info_vec); }

Eigen::Matrix3d BeliefState::covariance() const { return checked_inverse(info); }

BeliefState eif_predict(const BeliefState& b, const ControlInput& u, double dt, double sigma_v, double sigma_omega) {
  const Eigen::Matrix3d p = b.covariance();
  const VehicleState m = VehicleState::from(p * b.info_vec);
  const Eigen::Matrix3d f = dynamics_jacobian(m, u, dt);
  const Eigen::Matrix<double, 3, 2> g = input_jacobian(m, dt);
  const Eigen::Vector2d noise(sigma_v * sigma_v, sigma_omega * sigma_omega);
  const Eigen::Matrix3d next_cov = symmetric(f * p * f.transpose() + g * noise.asDiagonal() * g.transpose());
  return BeliefState::from_moments(step_dynamics(m, u, dt).vec(), next_cov);
}

UpdateResult eif_update(const BeliefState& b, std::span<const Measurement> measurements, double sigma_bearing) {
  UpdateResult out{b, 0};
  if (measurements.empty()) return out;
  const Eigen::Vector3d mean = b.mean();
  const VehicleState at = VehicleState::from(mean);
  const double r_inv = 1.0 / (sigma_bearing * sigma_bearing);
  Eigen::Vector3d lin = mean;
  lin(2) = at.psi;
  for (const Measurement& z : measurements) {
    const double dx = z.landmark.x - at.x;
    const double dy = z.landmark.y - at.y;
    if (dx * dx + dy * dy == 0.0) {
      ++out.skipped;
      continue;
    }
    const Eigen::RowVector3d h = bearing_jacobian(at, z.landmark);
    const double innovation = wrap_angle(z.bearing - bearing_to(at, z.landmark));
    out.belief.info += r_inv * h.transpose() * h;
    out.belief.info_vec += r_inv * h.transpose() * (innovation + h.dot(lin));
  }
  out.belief.info = symmetric(out.belief.info);
  // Keep the stored heading wrapped.
  Eigen::Vector3d updated = out.belief.mean();
  const double wrapped = wrap_angle(updated(2));
  if (wrapped != updated(2)) {
    updated(2) = wrapped;
    out.belief.info_vec = out.belief.info * updated;
  }
  return out;
}

ControlInput controller_step(const VehicleState& estimate, Point waypoint, double gain, double omega_max, double speed) {
  const double error = wrap_angle(std::atan2(waypoint.y - estimate.y, waypoint.x - estimate.x) - estimate.psi);
  return {speed, std::clamp(gain * error, -omega_max, omega_max)};
}

namespace {

void validate_config(const SimConfig& c) {
  const bool ok = c.dt > 0.0 && c.steps >= 1 && c.gain > 0.0 && c.speed > 0.0 && c.omega_max > 0.0 &&
                  c.sensing_range > 0.0 && c.switch_radius > 0.0 && c.sigma_v >= 0.0 && c.sigma_omega >= 0.0 &&
                  c.sigma_bearing > 0.0 && c.initial_sigma_xy > 0.0 && c.initial_sigma_psi > 0.0;
  if (!ok) throw std::invalid_argument("simulation parameters must be positive");
}

std::uint64_t vehicle_seed(std::uint64_t seed, int depot) {
  // splitmix64 finalizer over (seed, depot).
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(depot + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct Vehicle {
  int depot = 0;
  std::vector<Point> waypoints;
  std::size_t next = 0;
  VehicleState truth;
  BeliefState belief;
  Rng rng{0};
};

}  // namespace

SimTrace run_simulation(const Instance& instance, const Solution& solution, const SimConfig& config) {
  validate_config(config);
  if (!solution.has_incumbent) throw std::invalid_argument("solution has no routes to simulate");
  if (solution.n_depots != 0 && (solution.n_depots != instance.num_depots() || solution.n_vertices != instance.num_vertices())) {
    throw std::invalid_argument("solution was computed for a different instance size");
  }
  if (const auto problems = check_solution(instance, solution, Localization::kTwoPerEdge); !problems.empty()) {
    throw std::invalid_argument("solution is not feasible for the instance: " + problems.front());
  }

  std::vector<Point> placed;
  for (int k : solution.landmarks) placed.push_back(instance.landmark_candidates[static_cast<std::size_t>(k)]);

  const Eigen::Vector3d initial_sd(config.initial_sigma_xy, config.initial_sigma_xy, config.initial_sigma_psi);
  const Eigen::Matrix3d initial_cov = initial_sd.cwiseProduct(initial_sd).asDiagonal();

  std::vector<Vehicle> vehicles;
  for (int i = 0; i < instance.num_depots(); ++i) {
    const auto& route = solution.routes[static_cast<std::size_t>(i)];
    if (route.empty()) continue;
    Vehicle v;
    v.depot = i;
    v.rng = Rng(vehicle_seed(config.seed, i));
    for (std::size_t t = 1; t < route.size(); ++t) v.waypoints.push_back(instance.vertex(route[t]));
    const Point start = instance.depots[static_cast<std::size_t>(i)];
    const Point first = v.waypoints.front();
    v.truth = {start.x, start.y, wrap_angle(std::atan2(first.y - start.y, first.x - start.x))};
    Eigen::Vector3d mean = v.truth.vec();
    if (config.inject_noise) {
      for (int c = 0; c < 3; ++c) mean(c) += v.rng.normal(initial_sd(c));
      mean(2) = wrap_angle(mean(2));
    }
    v.belief = BeliefState::from_moments(mean, initial_cov);
    vehicles.push_back(std::move(v));
  }

  SimTrace trace;
  trace.vehicles = static_cast<int>(vehicles.size());
  trace.steps = config.steps;
  for (const Vehicle& v : vehicles) trace.vehicle_depots.push_back(v.depot);
  trace.rows.reserve(static_cast<std::size_t>(config.steps) * vehicles.size());
  trace.waypoints_reached.assign(vehicles.size(), 0);

  for (int step = 0; step < config.steps; ++step) {
    for (std::size_t vi = 0; vi < vehicles.size(); ++vi) {
      Vehicle& v = vehicles[vi];
      VehicleState est = VehicleState::from(v.belief.mean());
      while (v.next < v.waypoints.size() &&
             distance({est.x, est.y}, v.waypoints[v.next]) <= config.switch_radius) {
        ++v.next;
      }
      const bool finished = v.next >= v.waypoints.size();
      ControlInput u;
      double sigma_v = 0.0;
      double sigma_omega = 0.0;
      if (!finished) {
        u = controller_step(est, v.waypoints[v.next], config.gain, config.omega_max, config.speed);
        sigma_v = config.sigma_v;
        sigma_omega = config.sigma_omega;
      }
      ControlInput applied = u;
      if (config.inject_noise && !finished) {
        applied.v += v.rng.normal(sigma_v);
        applied.omega += v.rng.normal(sigma_omega);
      }
      v.truth = step_dynamics(v.truth, applied, config.dt);
      v.belief = eif_predict(v.belief, u, config.dt, sigma_v, sigma_omega);

      const auto seen = visible_landmarks(v.truth, placed, config.sensing_range);
      std::vector<Measurement> z;
      z.reserve(seen.size());
      for (const Sighting& s : seen) {
        double bearing = s.bearing;
        if (config.inject_noise) bearing = wrap_angle(bearing + v.rng.normal(config.sigma_bearing));
        z.push_back({placed[static_cast<std::size_t>(s.landmark)], bearing});
      }
      UpdateResult upd = eif_update(v.belief, z, config.sigma_bearing);
      v.belief = std::move(upd.belief);
      trace.skipped_measurements += upd.skipped;
      if (seen.size() < 2) ++trace.low_visibility_steps;

      const Eigen::Matrix3d cov = v.belief.covariance();
      TraceRow row;
      row.step = step;
      row.vehicle = static_cast<int>(vi);
      row.t = (step + 1) * config.dt;
      row.truth = v.truth;
      row.estimate = VehicleState::from(v.belief.mean());
      row.sigma3 = 3.0 * cov.diagonal().cwiseSqrt();
      row.cov_trace = cov.trace();
      row.n_landmarks = static_cast<int>(seen.size());
      trace.rows.push_back(row);
      trace.waypoints_reached[vi] = static_cast<int>(v.next);
    }
  }
  return trace;
}

}  // namespace mvplc

#pragma once

#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mvplc/bnc.hpp"
#include "mvplc/instance.hpp"

namespace mvplc {

// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;

  Eigen::Vector3d vec() const { return {x, y, psi}; }
  static VehicleState from(const Eigen::Vector3d& v) { return {v(0), v(1), wrap_angle(v(2))}; }
};

struct ControlInput {
  double v = 0.0;
  double omega = 0.0;
};

// Euler step of the unicycle model; psi is wrapped.
VehicleState step_dynamics(const VehicleState& s, const ControlInput& u, double dt);
// d(next state)/d(state).
Eigen::Matrix3d dynamics_jacobian(const VehicleState& s, const ControlInput& u, double dt);
// d(next state)/d(v, omega).
Eigen::Matrix<double, 3, 2> input_jacobian(const VehicleState& s, double dt);

// Bearing of a landmark relative to the heading, wrapped.
double bearing_to(const VehicleState& s, Point landmark);
// d(bearing)/d(x, y, psi). Undefined when the landmark is at the position.
Eigen::RowVector3d bearing_jacobian(const VehicleState& s, Point landmark);

struct Sighting {
  int landmark = -1;  // index into the list passed in
  double bearing = 0.0;
};

// Landmarks within the closed sensing disk, with their true bearings.
std::vector<Sighting> visible_landmarks(const VehicleState& s, std::span<const Point> landmarks, double sensing_range);

// Information-form belief: omega = P^-1, xi = P^-1 mean.
struct BeliefState {
  Eigen::Matrix3d info = Eigen::Matrix3d::Identity();
  Eigen::Vector3d info_vec = Eigen::Vector3d::Zero();

  static BeliefState from_moments(const Eigen::Vector3d& mean, const Eigen::Matrix3d& cov);
  Eigen::Vector3d mean() const;
  Eigen::Matrix3d covariance() const;
};

// Prediction through the noise-free dynamics with input noise
// diag(sigma_v^2, sigma_omega^2). Throws std::domain_error if the
// information matrix is singular.
BeliefState eif_predict(const BeliefState& b, const ControlInput& u, double dt, double sigma_v, double sigma_omega);

struct Measurement {
  Point landmark;
  double bearing = 0.0;
};

struct UpdateResult {
  BeliefState belief;
  int skipped = 0;  // landmarks at the estimated position
};

// Sequential bearing updates linearized at the incoming mean.
UpdateResult eif_update(const BeliefState& b, std::span<const Measurement> measurements, double sigma_bearing);

// Proportional heading controller towards a waypoint.
ControlInput controller_step(const VehicleState& estimate, Point waypoint, double gain, double omega_max, double speed);

struct SimConfig {
  double dt = 0.05;
  int steps = 3000;
  double gain = 2.0;
  double speed = 1.0;
  double omega_max = 4.0 * std::numbers::pi;
  double sensing_range = 35.0;
  double switch_radius = 2.0;
  double sigma_v = 0.05;
  double sigma_omega = 0.02;
  double sigma_bearing = 0.05;
  // Initial covariance diag(sigma_xy^2, sigma_xy^2, sigma_psi^2).
  double initial_sigma_xy = 1.0;
  double initial_sigma_psi = 0.31622776601683794;  // sqrt(0.1)
  // When false no noise is drawn anywhere; the filter still uses the
  // configured noise levels.
  bool inject_noise = true;
  std::uint64_t seed = 0;
};

struct TraceRow {
  int step = 0;
  int vehicle = 0;
  double t = 0.0;
  VehicleState truth;
  VehicleState estimate;
  Eigen::Vector3d sigma3 = Eigen::Vector3d::Zero();  // 3 sigma per component
  double cov_trace = 0.0;
  int n_landmarks = 0;
};

struct SimTrace {
  int vehicles = 0;
  int steps = 0;
  std::vector<int> vehicle_depots;  // depot of each vehicle
  std::vector<TraceRow> rows;       // step-major, then vehicle
  int low_visibility_steps = 0;     // vehicle-steps with fewer than two landmarks
  int skipped_measurements = 0;
  std::vector<int> waypoints_reached;  // per vehicle
};

// One vehicle per depot with a nonempty route. Throws std::invalid_argument
// if the configuration is invalid or the solution does not fit the instance.
SimTrace run_simulation(const Instance& instance, const Solution& solution, const SimConfig& config);

}  // namespace mvplc

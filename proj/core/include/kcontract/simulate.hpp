#pragma once

#include <Eigen/Dense>
#include <map>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "kcontract/model.hpp"

namespace kcontract {

struct SolverSettings {
    double abs_tol = 1e-9;
    double rel_tol = 1e-7;
    double max_step = 0.0;      // 0 = unbounded
    double initial_step = 0.0;  // 0 = auto
    double fixed_step = 0.0;    // > 0 disables adaptivity (order studies)
    long long max_steps = 50'000'000;
};

struct TrajectoryEvent {
    double time;
    std::string tag;
};

/// Accepted integrator steps (time, state, derivative) plus recorded events.
/// sample() interpolates with cubic Hermite between stored steps.
struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<Eigen::VectorXd> derivs;
    std::vector<TrajectoryEvent> events;
    std::string model_id;
    Eigen::VectorXd x0;
    SolverSettings settings;

    double t_begin() const { return times.front(); }
    double t_end() const { return times.back(); }
    Eigen::VectorXd sample(double t) const;
    std::string to_csv() const;  // header "t,x1,...,xn"
};

/// Explicit Dormand-Prince RK45 with adaptive step control. Domain exit is
/// recorded as an event; integration continues on the model's formula.
Trajectory integrate(const VectorFieldModel& model, const Eigen::VectorXd& x0, double t0,
                     double t_end, const SolverSettings& settings = {});

struct AsymptoticsReport {
    std::string verdict;  // converged_to_equilibrium | periodic | undetermined
    std::optional<Eigen::VectorXd> equilibrium;
    std::optional<double> period;
    std::map<std::string, double> residuals;

    nlohmann::json to_json() const;
};

/// Converged iff sup |f(t,x(t))| and the state diameter over the trailing
/// window (default last 10% of the horizon) are both <= tol.
AsymptoticsReport detect_equilibrium(const Trajectory& traj, const VectorFieldModel& model,
                                     double tol = 1e-6, double window_fraction = 0.1);

struct PeriodSettings {
    double match_tol = 1e-3;       // accepted sup-mismatch |x(t+T) - x(t)|
    double period_min = 1e-3;      // ignore shorter periods
    int resample_points = 2048;    // uniform resampling grid
    double equilibrium_tol = 1e-6; // tail diameter below this is an equilibrium
};

/// Searches T in (0, horizon/3] minimizing the sup-mismatch over the tail.
/// Equilibrium tails are never reported as periodic.
AsymptoticsReport detect_period(const Trajectory& traj, const PeriodSettings& settings = {});

/// Simulates the cascade from each initial condition and reports
/// convergence per run. Requires a time-invariant upstream.
std::vector<AsymptoticsReport> cics_probe(const SerialPair& pair,
                                          const std::vector<Eigen::VectorXd>& x0_list,
                                          double horizon, double tol = 1e-6,
                                          const SolverSettings& settings = {});

}  // namespace kcontract

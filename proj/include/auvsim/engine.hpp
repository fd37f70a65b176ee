#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "auvsim/guidance.hpp"
#include "auvsim/mpc.hpp"
#include "auvsim/optimizer.hpp"
#include "auvsim/vehicle.hpp"

namespace auvsim {

// The two control stacks under comparison: the energy-optimal setpoint stage
// and the pure line-of-sight benchmark (zero heave setpoint, geometric pitch).
enum class ControllerKind { proposed, los_benchmark };

std::string controller_name(ControllerKind k);           // "proposed" / "los"
ControllerKind parse_controller(const std::string& s);   // throws ValidationError

struct SimConfig {
	ControllerKind controller = ControllerKind::proposed;
	double substep = 0.02;         // plant RK4 step h [s]
	double control_period = 0.1;   // setpoint/MPC period [s]; integer multiple of h
	double max_time = 0;           // [s]; 0 = auto: 4 * path length / u_min
	int telemetry_decimation = 1;  // export every k-th row (log and metrics keep all)
	std::optional<Eigen::Vector3d> initial_position;  // default: first waypoint

	void validate() const;  // throws ValidationError
};

// One control period of the loop: the state entering the period, the
// commands computed from it, and the thrusts held (zero-order) across it.
// `power` is therefore constant over [t, t + dt) and the period's energy is
// exactly power * dt.
struct TelemetrySample {
	double t = 0;
	VehicleState state;
	double u_rs = 0, w_rs = 0, theta_s = 0, psi_s = 0;
	Eigen::Vector4d thrusts = Eigen::Vector4d::Zero();
	double power = 0;       // [W]
	int segment = 0;        // active segment index (target = waypoint segment+1)
	bool fallback = false;  // setpoint stage had no feasible point this period
};

struct RunMetrics {
	bool completed = false;
	double travel_time = 0;        // time of the final waypoint switch, or the
	                               // simulated time when the run timed out [s]
	double energy = 0;             // [J]
	PowerSplit energy_by_dof;      // [J]; sums to energy (exact decomposition)
	double mean_cross_track = 0;   // mean 3D distance to the segment line [m]
	int cross_track_samples = 0;   // rows > 2 m from the target waypoint
	int fallback_periods = 0;
};

struct RunResult {
	std::vector<TelemetrySample> telemetry;
	RunMetrics metrics;
};

// One classical RK4 step of the plant under constant thrusts. Wraps the
// attitude angles afterwards; propagates SingularityError from the dynamics.
VehicleState rk4_step(const VehicleState& s, const Eigen::Vector4d& thrusts,
                      const CurrentField& current, const VehicleParams& p, double h);

/*
 * Closed-loop mission runner. Each step() covers one control period:
 *   1. guidance + setpoint stage produce (u_rs, w_rs, theta_s, psi_s);
 *   2. the two plane trackers produce the four thrusts;
 *   3. the plant integrates control_period / substep RK4 substeps under held
 *      thrusts;
 *   4. the period is appended to the telemetry log;
 *   5. the waypoint acceptance sphere is checked and the segment advanced.
 * Inside the acceptance sphere the last optimizer output is held (the
 * steady-state problem degenerates there); yaw guidance — and for the
 * benchmark, pitch guidance — stays live. A period whose setpoint problem is
 * infeasible falls back to full surge / zero heave / line-of-sight pitch and
 * is flagged in the telemetry.
 */
class Simulation {
 public:
	Simulation(const VehicleParams& params, const Mission& mission, const CurrentField& current,
	           const SimConfig& sim_cfg, const OptimizerConfig& opt_cfg, const MpcConfig& mpc_cfg);

	// Advance one control period. Returns true while the mission is running;
	// false once complete or out of time (further calls are no-ops).
	bool step();

	// step() to completion, then assemble the result.
	RunResult run();

	bool completed() const { return completed_; }
	bool finished() const;
	double time() const { return time_; }
	double travel_time() const { return travel_time_; }
	int segment() const { return segment_; }
	const VehicleState& state() const { return state_; }
	const std::vector<TelemetrySample>& telemetry() const { return telemetry_; }
	double max_time() const { return max_time_; }

 private:
	struct Setpoints {
		double u_rs = 0, w_rs = 0, theta_s = 0, psi_s = 0;
		bool fallback = false;
	};
	Setpoints compute_setpoints();

	VehicleParams params_;
	Mission mission_;
	CurrentField current_;
	SimConfig cfg_;
	OptimizerConfig opt_cfg_;
	SetpointOptimizer optimizer_;
	MpcController mpc_horizontal_, mpc_vertical_;
	VehicleState state_;
	double time_ = 0, max_time_ = 0, travel_time_ = 0;
	int segment_ = 0;
	long period_ = 0;
	bool completed_ = false;
	std::optional<Setpoints> held_;  // last setpoint-stage output
	std::vector<TelemetrySample> telemetry_;
};

RunResult run_mission(const VehicleParams& params, const Mission& mission,
                      const CurrentField& current, const SimConfig& sim_cfg,
                      const OptimizerConfig& opt_cfg, const MpcConfig& mpc_cfg);

// Metric block from a telemetry log: energy integrals (exact under the
// zero-order hold), per-effort energy split, and the mean 3D cross-track
// error over samples farther than 2 m from their target waypoint.
// completed / travel_time are owned by the caller running the loop.
RunMetrics compute_metrics(const std::vector<TelemetrySample>& telemetry, const Mission& mission,
                           const VehicleParams& params, double control_period);

// Fixed column order:
// t,x,y,z,phi,theta,psi,u_r,v_r,w_r,p,q,r,u_rs,w_rs,theta_s,psi_s,T1,T2,T3,T4,P_inst
// Values printed with %.17g so repeated runs can be compared byte-for-byte.
void write_telemetry_csv(const std::string& path, const std::vector<TelemetrySample>& rows,
                         int decimation = 1);

}  // namespace auvsim

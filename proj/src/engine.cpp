#include "auvsim/engine.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "auvsim/angles.hpp"
#include "auvsim/errors.hpp"

namespace auvsim {

std::string controller_name(ControllerKind k) {
	return k == ControllerKind::proposed ? "proposed" : "los";
}

ControllerKind parse_controller(const std::string& s) {
	if (s == "proposed") return ControllerKind::proposed;
	if (s == "los" || s == "los-benchmark") return ControllerKind::los_benchmark;
	throw ValidationError("unknown controller '" + s + "' (expected proposed|los)");
}

void SimConfig::validate() const {
	auto fail = [](const std::string& msg) { throw ValidationError("sim config: " + msg); };
	if (!(substep > 0)) fail("substep must be positive");
	if (!(control_period > 0)) fail("control period must be positive");
	const double ratio = control_period / substep;
	if (std::abs(ratio - std::lround(ratio)) > 1e-9 || std::lround(ratio) < 1)
		fail("control period must be a positive integer multiple of the substep");
	if (max_time < 0) fail("max time must be positive (or 0 for automatic)");
	if (telemetry_decimation < 1) fail("telemetry decimation must be at least 1");
	if (initial_position && !initial_position->allFinite()) fail("initial position must be finite");
}

namespace {

VehicleState nudge(const VehicleState& s, const StateDerivative& d, double h) {
	VehicleState r = s;
	r.pos += h * d.pos_dot;
	r.att += h * d.att_dot;
	r.nu_r += h * d.nu_r_dot;
	return r;
}

}  // namespace

VehicleState rk4_step(const VehicleState& s, const Eigen::Vector4d& thrusts,
                      const CurrentField& current, const VehicleParams& p, double h) {
	const StateDerivative k1 = dynamics_derivative(s, thrusts, p, current);
	const StateDerivative k2 = dynamics_derivative(nudge(s, k1, h / 2), thrusts, p, current);
	const StateDerivative k3 = dynamics_derivative(nudge(s, k2, h / 2), thrusts, p, current);
	const StateDerivative k4 = dynamics_derivative(nudge(s, k3, h), thrusts, p, current);

	VehicleState r = s;
	r.pos += h / 6 * (k1.pos_dot + 2 * k2.pos_dot + 2 * k3.pos_dot + k4.pos_dot);
	r.att += h / 6 * (k1.att_dot + 2 * k2.att_dot + 2 * k3.att_dot + k4.att_dot);
	r.nu_r += h / 6 * (k1.nu_r_dot + 2 * k2.nu_r_dot + 2 * k3.nu_r_dot + k4.nu_r_dot);
	for (int i = 0; i < 3; ++i) r.att(i) = wrap_pi(r.att(i));
	return r;
}

Simulation::Simulation(const VehicleParams& params, const Mission& mission,
                       const CurrentField& current, const SimConfig& sim_cfg,
                       const OptimizerConfig& opt_cfg, const MpcConfig& mpc_cfg)
    : params_(params),
      mission_(mission),
      current_(current),
      cfg_(sim_cfg),
      opt_cfg_(opt_cfg),
      optimizer_(params, opt_cfg),
      mpc_horizontal_(MpcController::Plane::horizontal, params, mpc_cfg),
      mpc_vertical_(MpcController::Plane::vertical, params, mpc_cfg) {
	params_.validate();
	mission_.validate();
	cfg_.validate();
	if (current_.speed() >= opt_cfg_.bounds.u_max)
		throw ValidationError("current speed must stay below the maximum relative speed");

	state_.pos = cfg_.initial_position.value_or(mission_.waypoints.front());
	const Eigen::Vector3d& wp1 = mission_.waypoints[1];
	const double dx = wp1.x() - state_.pos.x(), dy = wp1.y() - state_.pos.y();
	state_.att(2) = std::hypot(dx, dy) > 1e-9
	                    ? std::atan2(dy, dx)
	                    : PathSegment::between(mission_.waypoints[0], wp1).gamma_h;

	max_time_ = cfg_.max_time > 0 ? cfg_.max_time
	                              : 4.0 * mission_.path_length() / opt_cfg_.bounds.u_min;
}

bool Simulation::finished() const {
	return completed_ || time_ >= max_time_ - 1e-12;
}

Simulation::Setpoints Simulation::compute_setpoints() {
	const Eigen::Vector3d& target = mission_.waypoints[segment_ + 1];
	const PathSegment seg = PathSegment::between(mission_.waypoints[segment_], target);
	const Vector6d nu_c = current_in_body(state_.att, current_);

	Setpoints sp;
	sp.psi_s = los_yaw_setpoint(state_, seg, mission_.lookahead_h, nu_c);

	const double d_h = std::hypot(target.x() - state_.pos.x(), target.y() - state_.pos.y());
	const bool hold = d_h < mission_.switch_radius;
	const bool reopt = period_ % opt_cfg_.reopt_decimation == 0;
	const bool benchmark = cfg_.controller == ControllerKind::los_benchmark;

	// The steady-state problem degenerates inside the acceptance sphere; keep
	// the last answer there. Between re-optimizations the answer is reused too.
	if (!hold && (reopt || !held_)) {
		SetpointProblem prob;
		prob.d_h = d_h;
		prob.d_z = target.z() - state_.pos.z();
		prob.U_c = current_.speed();
		prob.psi_cd = wrap_pi(current_.heading() - seg.gamma_h);
		prob.bounds = opt_cfg_.bounds;
		prob.epsilon_z = opt_cfg_.epsilon_z;

		Setpoints out;
		if (benchmark) {
			const double theta_s =
			    los_pitch_setpoint(state_, seg, mission_.lookahead_v, nu_c, opt_cfg_.bounds.theta_max);
			const SetpointSolution sol = optimizer_.optimize_surge_benchmark(prob, theta_s);
			out.u_rs = sol.feasible ? sol.u_r : opt_cfg_.bounds.u_max;
			out.w_rs = 0;
			out.theta_s = theta_s;
			out.fallback = !sol.feasible;
		} else {
			const SetpointSolution sol = optimizer_.optimize(prob);
			if (sol.feasible) {
				out.u_rs = sol.u_r;
				out.w_rs = sol.w_r;
				out.theta_s = sol.theta;
			} else {
				out.u_rs = opt_cfg_.bounds.u_max;
				out.w_rs = 0;
				out.theta_s = los_pitch_setpoint(state_, seg, mission_.lookahead_v, nu_c,
				                                 opt_cfg_.bounds.theta_max);
				out.fallback = true;
			}
		}
		held_ = out;
	} else if (!held_) {
		// First period already inside the acceptance sphere (offset start).
		Setpoints out;
		out.u_rs = opt_cfg_.bounds.u_max;
		out.w_rs = 0;
		out.theta_s =
		    los_pitch_setpoint(state_, seg, mission_.lookahead_v, nu_c, opt_cfg_.bounds.theta_max);
		out.fallback = true;
		held_ = out;
	}

	sp.u_rs = held_->u_rs;
	sp.w_rs = held_->w_rs;
	sp.fallback = held_->fallback;
	// Yaw guidance is always live; the benchmark's pitch guidance is too.
	sp.theta_s = benchmark ? los_pitch_setpoint(state_, seg, mission_.lookahead_v, nu_c,
	                                            opt_cfg_.bounds.theta_max)
	                       : held_->theta_s;

	// Corner recovery: past the waypoint plane the line law would lead the
	// vehicle away along the infinite line, so aim straight at the waypoint
	// until the switch fires or the segment is re-entered.
	if (along_track(state_.pos, seg) > seg.horizontal_length) {
		sp.psi_s = wrap_pi(std::atan2(target.y() - state_.pos.y(), target.x() - state_.pos.x()) -
		                   sideslip_or_zero(state_, nu_c));
		const double gamma_aim = std::atan2(state_.pos.z() - target.z(), d_h);
		sp.theta_s = clamp(wrap_pi(gamma_aim + attack_or_zero(state_, nu_c)),
		                   -opt_cfg_.bounds.theta_max, opt_cfg_.bounds.theta_max);
		sp.w_rs = 0;
	}

	// A large heading error turns surge into overshoot; scale the velocity
	// setpoints down until the nose comes around. No effect once aligned.
	const double scale = clamp(std::cos(wrap_pi(sp.psi_s - state_.att(2))), 0.15, 1.0);
	sp.u_rs *= scale;
	sp.w_rs *= scale;
	return sp;
}

bool Simulation::step() {
	if (finished()) return false;

	const Setpoints sp = compute_setpoints();
	const MpcSolution mh = mpc_horizontal_.solve(state_, sp.u_rs, sp.psi_s);
	const MpcSolution mv = mpc_vertical_.solve(state_, sp.w_rs, sp.theta_s);
	const Eigen::Vector4d thrusts(mh.thrusts(0), mh.thrusts(1), mv.thrusts(0), mv.thrusts(1));

	TelemetrySample row;
	row.t = time_;
	row.state = state_;
	row.u_rs = sp.u_rs;
	row.w_rs = sp.w_rs;
	row.theta_s = sp.theta_s;
	row.psi_s = sp.psi_s;
	row.thrusts = thrusts;
	row.power = total_power(thrusts, params_.alpha);
	row.segment = segment_;
	row.fallback = sp.fallback;
	telemetry_.push_back(row);

	const int substeps = static_cast<int>(std::lround(cfg_.control_period / cfg_.substep));
	for (int i = 0; i < substeps; ++i)
		state_ = rk4_step(state_, thrusts, current_, params_, cfg_.substep);
	++period_;
	time_ = static_cast<double>(period_) * cfg_.control_period;  // exact k * dt stamps

	while (!completed_ &&
	       waypoint_switch(state_.pos, mission_.waypoints[segment_ + 1], mission_.switch_radius)) {
		if (segment_ + 2 >= static_cast<int>(mission_.waypoints.size())) {
			completed_ = true;
			travel_time_ = time_;
		} else {
			++segment_;
			held_.reset();  // new segment geometry: force a fresh optimization
		}
	}
	return !finished();
}

RunResult Simulation::run() {
	while (step()) {
	}
	RunResult r;
	r.telemetry = telemetry_;
	r.metrics = compute_metrics(telemetry_, mission_, params_, cfg_.control_period);
	r.metrics.completed = completed_;
	r.metrics.travel_time = completed_ ? travel_time_ : time_;
	return r;
}

RunResult run_mission(const VehicleParams& params, const Mission& mission,
                      const CurrentField& current, const SimConfig& sim_cfg,
                      const OptimizerConfig& opt_cfg, const MpcConfig& mpc_cfg) {
	Simulation sim(params, mission, current, sim_cfg, opt_cfg, mpc_cfg);
	return sim.run();
}

RunMetrics compute_metrics(const std::vector<TelemetrySample>& telemetry, const Mission& mission,
                           const VehicleParams& params, double control_period) {
	RunMetrics m;
	std::vector<PathSegment> segs;
	for (size_t i = 0; i + 1 < mission.waypoints.size(); ++i)
		segs.push_back(PathSegment::between(mission.waypoints[i], mission.waypoints[i + 1]));

	double ct_sum = 0;
	for (const TelemetrySample& row : telemetry) {
		m.energy += row.power * control_period;
		const PowerSplit ps = power_decompose(row.thrusts, params.alpha);
		m.energy_by_dof.surge += ps.surge * control_period;
		m.energy_by_dof.yaw += ps.yaw * control_period;
		m.energy_by_dof.heave += ps.heave * control_period;
		m.energy_by_dof.pitch += ps.pitch * control_period;
		if (row.fallback) ++m.fallback_periods;

		const PathSegment& seg = segs.at(static_cast<size_t>(row.segment));
		if ((row.state.pos - seg.b).norm() > mission.switch_radius) {
			ct_sum += line_distance_3d(row.state.pos, seg);
			++m.cross_track_samples;
		}
	}
	m.mean_cross_track = m.cross_track_samples > 0 ? ct_sum / m.cross_track_samples : 0.0;
	return m;
}

void write_telemetry_csv(const std::string& path, const std::vector<TelemetrySample>& rows,
                         int decimation) {
	if (decimation < 1) throw ValidationError("telemetry decimation must be at least 1");
	std::ofstream out(path, std::ios::binary);  // binary: byte-stable across platforms
	if (!out) throw SimError("cannot open telemetry output file: " + path);

	out << "t,x,y,z,phi,theta,psi,u_r,v_r,w_r,p,q,r,u_rs,w_rs,theta_s,psi_s,"
	       "T1,T2,T3,T4,P_inst\n";
	char buf[32];
	auto put = [&](double v, char sep) {
		std::snprintf(buf, sizeof buf, "%.17g", v);
		out << buf << sep;
	};
	for (size_t i = 0; i < rows.size(); i += static_cast<size_t>(decimation)) {
		const TelemetrySample& r = rows[i];
		put(r.t, ',');
		for (int k = 0; k < 3; ++k) put(r.state.pos(k), ',');
		for (int k = 0; k < 3; ++k) put(r.state.att(k), ',');
		for (int k = 0; k < 6; ++k) put(r.state.nu_r(k), ',');
		put(r.u_rs, ',');
		put(r.w_rs, ',');
		put(r.theta_s, ',');
		put(r.psi_s, ',');
		for (int k = 0; k < 4; ++k) put(r.thrusts(k), ',');
		put(r.power, '\n');
	}
	if (!out) throw SimError("failed writing telemetry output file: " + path);
}

}  // namespace auvsim

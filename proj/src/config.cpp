#include "auvsim/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "json.hpp"

#include "auvsim/errors.hpp"

namespace auvsim {

Mission builtin_mission(const std::string& name) {
	Mission m;
	m.name = name;
	if (name == "lawnmower") {
		// Boustrophedon survey over a sloping bottom, 30 x 30 m footprint.
		m.waypoints = {
		    {0, 0, 0},   {30, 0, 10}, {30, 10, 7}, {0, 10, 1},
		    {0, 20, 2},  {30, 20, 6}, {30, 30, 5}, {0, 30, 3},
		};
	} else if (name == "inspection") {
		// Descending helix around a structure: radius 7 m centred at (7, 7),
		// 2 m of depth gained per 60 degrees of arc, 13 stations.
		for (int i = 0; i <= 12; ++i) {
			const double ang = M_PI * (2.0 * i + 9.0) / 6.0;
			m.waypoints.emplace_back(7.0 * std::cos(ang) + 7.0, 7.0 * std::sin(ang) + 7.0, 2.0 * i);
		}
	} else {
		throw ValidationError("unknown built-in mission '" + name +
		                      "' (expected lawnmower|inspection)");
	}
	m.validate();
	return m;
}

Mission load_mission_file(const std::string& path) {
	std::ifstream in(path);
	if (!in) throw ValidationError("cannot open mission file: " + path);
	nlohmann::json j;
	try {
		in >> j;
	} catch (const nlohmann::json::exception& e) {
		throw ValidationError("mission file " + path + ": " + e.what());
	}
	if (!j.is_object()) throw ValidationError("mission file must be a JSON object: " + path);

	Mission m;
	m.name = path;
	for (auto it = j.begin(); it != j.end(); ++it) {
		const std::string& key = it.key();
		auto num = [&](double* dst) {
			if (!it->is_number())
				throw ValidationError("mission file " + path + ": key '" + key + "' must be a number");
			*dst = it->get<double>();
		};
		if (key == "name") {
			if (!it->is_string())
				throw ValidationError("mission file " + path + ": key 'name' must be a string");
			m.name = it->get<std::string>();
		} else if (key == "waypoints") {
			if (!it->is_array())
				throw ValidationError("mission file " + path + ": 'waypoints' must be an array");
			for (const auto& wp : *it) {
				if (!wp.is_array() || wp.size() != 3 || !wp[0].is_number() || !wp[1].is_number() ||
				    !wp[2].is_number())
					throw ValidationError("mission file " + path +
					                      ": each waypoint must be an [x, y, z] number triple");
				m.waypoints.emplace_back(wp[0].get<double>(), wp[1].get<double>(),
				                         wp[2].get<double>());
			}
		} else if (key == "switch_radius") {
			num(&m.switch_radius);
		} else if (key == "lookahead_h") {
			num(&m.lookahead_h);
		} else if (key == "lookahead_v") {
			num(&m.lookahead_v);
		} else {
			throw ValidationError("mission file " + path + ": unknown key '" + key + "'");
		}
	}
	m.validate();
	return m;
}

Mission resolve_mission(const std::string& name_or_path) {
	if (name_or_path == "lawnmower" || name_or_path == "inspection")
		return builtin_mission(name_or_path);
	return load_mission_file(name_or_path);
}

std::vector<CurrentField> reference_currents() {
	return {{0.0417, 0.0963},  {0.0841, -0.1718}, {-0.0342, -0.0678},
	        {-0.0541, 0.1382}, {0.0, 0.0}};
}

CurrentField parse_current(const std::string& text) {
	CurrentField c;
	std::size_t used = 0, used2 = 0;
	try {
		c.vx = std::stod(text, &used);
		if (used >= text.size() || text[used] != ',') throw std::invalid_argument("comma");
		c.vy = std::stod(text.substr(used + 1), &used2);
		if (used + 1 + used2 != text.size()) throw std::invalid_argument("trailing");
	} catch (const std::exception&) {
		throw ValidationError("current must be 'vx,vy' in m/s, got '" + text + "'");
	}
	if (!std::isfinite(c.vx) || !std::isfinite(c.vy))
		throw ValidationError("current components must be finite");
	return c;
}

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
	throw ValidationError("config file " + path + ": " + msg);
}

double as_number(const std::string& path, const json& v, const std::string& key) {
	if (!v.is_number()) bad(path, "key '" + key + "' must be a number");
	return v.get<double>();
}

int as_int(const std::string& path, const json& v, const std::string& key) {
	if (!v.is_number_integer()) bad(path, "key '" + key + "' must be an integer");
	return v.get<int>();
}

std::string as_string(const std::string& path, const json& v, const std::string& key) {
	if (!v.is_string()) bad(path, "key '" + key + "' must be a string");
	return v.get<std::string>();
}

void parse_sim(const std::string& path, const json& j, SimConfig* sim) {
	for (auto it = j.begin(); it != j.end(); ++it) {
		const std::string& k = it.key();
		if (k == "controller")
			sim->controller = parse_controller(as_string(path, *it, k));
		else if (k == "substep")
			sim->substep = as_number(path, *it, k);
		else if (k == "control_period")
			sim->control_period = as_number(path, *it, k);
		else if (k == "max_time")
			sim->max_time = as_number(path, *it, k);
		else if (k == "telemetry_decimation")
			sim->telemetry_decimation = as_int(path, *it, k);
		else if (k == "initial_position") {
			if (!it->is_array() || it->size() != 3)
				bad(path, "'initial_position' must be an [x, y, z] triple");
			sim->initial_position = Eigen::Vector3d(
			    as_number(path, (*it)[0], k), as_number(path, (*it)[1], k), as_number(path, (*it)[2], k));
		} else
			bad(path, "unknown sim key '" + k + "'");
	}
}

void parse_optimizer(const std::string& path, const json& j, OptimizerConfig* opt) {
	for (auto it = j.begin(); it != j.end(); ++it) {
		const std::string& k = it.key();
		if (k == "u_min")
			opt->bounds.u_min = as_number(path, *it, k);
		else if (k == "u_max")
			opt->bounds.u_max = as_number(path, *it, k);
		else if (k == "w_max")
			opt->bounds.w_max = as_number(path, *it, k);
		else if (k == "theta_max")
			opt->bounds.theta_max = as_number(path, *it, k);
		else if (k == "grid_u")
			opt->grid_u = as_int(path, *it, k);
		else if (k == "grid_theta")
			opt->grid_theta = as_int(path, *it, k);
		else if (k == "nm_max_iter")
			opt->nm_max_iter = as_int(path, *it, k);
		else if (k == "nm_tol")
			opt->nm_tol = as_number(path, *it, k);
		else if (k == "epsilon_z")
			opt->epsilon_z = as_number(path, *it, k);
		else if (k == "reopt_decimation")
			opt->reopt_decimation = as_int(path, *it, k);
		else
			bad(path, "unknown optimizer key '" + k + "'");
	}
}

void parse_mpc(const std::string& path, const json& j, MpcConfig* mpc) {
	for (auto it = j.begin(); it != j.end(); ++it) {
		const std::string& k = it.key();
		if (k == "horizon")
			mpc->horizon = as_int(path, *it, k);
		else if (k == "dt")
			mpc->dt = as_number(path, *it, k);
		else if (k == "lambda_h")
			mpc->lambda_h = as_number(path, *it, k);
		else if (k == "lambda_v")
			mpc->lambda_v = as_number(path, *it, k);
		else if (k == "rate_weight")
			mpc->rate_weight = as_number(path, *it, k);
		else if (k == "qp_tolerance")
			mpc->qp_tolerance = as_number(path, *it, k);
		else if (k == "qp_max_iter")
			mpc->qp_max_iter = as_int(path, *it, k);
		else
			bad(path, "unknown mpc key '" + k + "'");
	}
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
	std::ifstream in(path);
	if (!in) throw ValidationError("cannot open config file: " + path);
	json j;
	try {
		in >> j;
	} catch (const nlohmann::json::exception& e) {
		throw ValidationError("config file " + path + ": " + e.what());
	}
	if (!j.is_object()) bad(path, "must be a JSON object");

	RunConfig cfg;
	for (auto it = j.begin(); it != j.end(); ++it) {
		const std::string& k = it.key();
		if (k == "vehicle")
			cfg.vehicle_file = as_string(path, *it, k);
		else if (k == "mission")
			cfg.mission = as_string(path, *it, k);
		else if (k == "controller")
			cfg.sim.controller = parse_controller(as_string(path, *it, k));
		else if (k == "current") {
			if (!it->is_array() || it->size() != 2)
				bad(path, "'current' must be a [vx, vy] pair");
			cfg.current.vx = as_number(path, (*it)[0], k);
			cfg.current.vy = as_number(path, (*it)[1], k);
		} else if (k == "out")
			cfg.out_dir = as_string(path, *it, k);
		else if (k == "sim") {
			if (!it->is_object()) bad(path, "'sim' must be an object");
			parse_sim(path, *it, &cfg.sim);
		} else if (k == "optimizer") {
			if (!it->is_object()) bad(path, "'optimizer' must be an object");
			parse_optimizer(path, *it, &cfg.optimizer);
		} else if (k == "mpc") {
			if (!it->is_object()) bad(path, "'mpc' must be an object");
			parse_mpc(path, *it, &cfg.mpc);
		} else
			bad(path, "unknown key '" + k + "'");
	}
	return cfg;
}

VehicleParams resolve_vehicle(const RunConfig& cfg) {
	if (cfg.vehicle_file.empty()) return default_vehicle_params();
	return load_vehicle_params(cfg.vehicle_file);
}

void finalize_run_config(RunConfig& cfg) {
	if (const char* env = std::getenv("AUVSIM_OUT"); env && *env) cfg.out_dir = env;
	if (cfg.out_dir.empty()) throw ValidationError("output directory must not be empty");

	if (!(cfg.optimizer.bounds.u_min > 0) || !(cfg.optimizer.bounds.u_max > cfg.optimizer.bounds.u_min))
		throw ValidationError("surge bounds must satisfy 0 < u_min < u_max");
	if (!(cfg.optimizer.bounds.w_max > 0)) throw ValidationError("w_max must be positive");
	if (!(cfg.optimizer.bounds.theta_max > 0) || cfg.optimizer.bounds.theta_max >= M_PI / 2 - 1e-6)
		throw ValidationError("theta_max must lie in (0, pi/2)");
	if (cfg.optimizer.grid_u < 2 || cfg.optimizer.grid_theta < 2)
		throw ValidationError("optimizer grid must be at least 2 x 2");
	if (cfg.optimizer.nm_max_iter < 0 || !(cfg.optimizer.nm_tol > 0))
		throw ValidationError("optimizer polish settings invalid");
	if (!(cfg.optimizer.epsilon_z > 0)) throw ValidationError("epsilon_z must be positive");
	if (cfg.optimizer.reopt_decimation < 1)
		throw ValidationError("reopt decimation must be at least 1");
	if (cfg.current.speed() >= cfg.optimizer.bounds.u_max)
		throw ValidationError("current speed must stay below the maximum relative speed u_max");
	cfg.sim.validate();
	cfg.mpc.validate();
}

}  // namespace auvsim

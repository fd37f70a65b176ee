#pragma once

#include <string>
#include <vector>

#include "auvsim/engine.hpp"

namespace auvsim {

/*
 * Everything one closed-loop run needs, resolved from defaults, an optional
 * JSON config file, command-line flags, and the AUVSIM_OUT environment
 * variable (output directory only), in that order.
 */
struct RunConfig {
	std::string vehicle_file;         // empty = built-in default parameters
	std::string mission = "lawnmower";  // built-in name or path to a mission file
	CurrentField current;
	SimConfig sim;
	OptimizerConfig optimizer;
	MpcConfig mpc;
	std::string out_dir = "out";
};

// Built-in survey ("lawnmower") and helix ("inspection") missions.
Mission builtin_mission(const std::string& name);  // throws ValidationError

// Mission file: {"name"?, "waypoints": [[x,y,z], ...], "switch_radius"?,
// "lookahead_h"?, "lookahead_v"?}. Strict: unknown keys are rejected.
Mission load_mission_file(const std::string& path);

// Built-in name if it matches, otherwise treated as a file path.
Mission resolve_mission(const std::string& name_or_path);

// The five constant-current conditions used by the comparison command — four
// oblique currents below 0.2 m/s plus still water.
std::vector<CurrentField> reference_currents();

// Parse "vx,vy" (m/s). Throws ValidationError.
CurrentField parse_current(const std::string& text);

// Strict JSON config loader; every key optional, unknown keys rejected.
RunConfig load_run_config(const std::string& path);

// Vehicle parameters for the run (file or defaults), validated.
VehicleParams resolve_vehicle(const RunConfig& cfg);

// Cross-field checks (current cap vs speed bounds, sections valid) plus the
// AUVSIM_OUT override. Throws ValidationError.
void finalize_run_config(RunConfig& cfg);

}  // namespace auvsim

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "auvsim/config.hpp"
#include "auvsim/errors.hpp"
#include "auvsim/report.hpp"

namespace {

using namespace auvsim;

struct Flags {
	std::string config, mission, controller, current, vehicle, out, currents;
	int grid = 0;
	double grid_max = 0.15;
	bool seedless = false;
};

void add_common(CLI::App* cmd, Flags* f) {
	cmd->add_option("--config", f->config, "JSON config file");
	cmd->add_option("--mission", f->mission,
	                "built-in mission (lawnmower|inspection) or path to a mission file");
	cmd->add_option("--controller", f->controller, "control stack: proposed|los");
	cmd->add_option("--current", f->current, "constant current 'vx,vy' [m/s]");
	cmd->add_option("--vehicle", f->vehicle, "vehicle parameter JSON file");
	cmd->add_option("--out", f->out, "output directory (env AUVSIM_OUT overrides)");
	cmd->add_flag("--seedless", f->seedless,
	              "repeat the computation and fail unless outputs are identical");
}

RunConfig build_config(const Flags& f) {
	RunConfig cfg;
	if (!f.config.empty()) cfg = load_run_config(f.config);
	if (!f.mission.empty()) cfg.mission = f.mission;
	if (!f.controller.empty()) cfg.sim.controller = parse_controller(f.controller);
	if (!f.current.empty()) cfg.current = parse_current(f.current);
	if (!f.vehicle.empty()) cfg.vehicle_file = f.vehicle;
	if (!f.out.empty()) cfg.out_dir = f.out;
	finalize_run_config(cfg);
	return cfg;
}

std::vector<CurrentField> parse_current_list(const std::string& text) {
	std::vector<CurrentField> list;
	size_t start = 0;
	while (start <= text.size()) {
		const size_t semi = text.find(';', start);
		const std::string item =
		    text.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
		if (!item.empty()) list.push_back(parse_current(item));
		if (semi == std::string::npos) break;
		start = semi + 1;
	}
	if (list.empty()) throw ValidationError("current list is empty");
	return list;
}

std::vector<CurrentField> make_grid(int n, double max_speed) {
	if (n < 1) throw ValidationError("grid size must be at least 1");
	if (!(max_speed >= 0)) throw ValidationError("grid max speed must be nonnegative");
	std::vector<double> axis;
	if (n == 1)
		axis.push_back(0.0);
	else
		for (int i = 0; i < n; ++i)
			axis.push_back(-max_speed + 2.0 * max_speed * i / (n - 1));
	std::vector<CurrentField> grid;
	for (double vx : axis)
		for (double vy : axis) grid.push_back({vx, vy});
	return grid;
}

}  // namespace

int main(int argc, char** argv) {
	CLI::App app{"Energy-aware waypoint-following simulator for a four-thruster "
	             "underwater vehicle under constant current"};
	app.require_subcommand(1);

	Flags rf, cf, sf, vf;
	CLI::App* run = app.add_subcommand("run", "simulate one mission and write telemetry/metrics");
	add_common(run, &rf);
	CLI::App* compare = app.add_subcommand(
	    "compare", "run both control stacks over a set of current conditions");
	add_common(compare, &cf);
	compare->add_option("--currents", cf.currents,
	                    "semicolon-separated current list 'vx,vy;vx,vy;...' "
	                    "(default: the five reference conditions)");
	CLI::App* sweep =
	    app.add_subcommand("sweep", "run one controller across a grid of currents");
	add_common(sweep, &sf);
	sweep->add_option("--currents", sf.currents, "explicit current list 'vx,vy;vx,vy;...'");
	sweep->add_option("--grid", sf.grid, "generate an N x N current grid");
	sweep->add_option("--grid-max", sf.grid_max, "half-width of the generated grid [m/s]");
	CLI::App* validate =
	    app.add_subcommand("validate", "check the configuration without running");
	add_common(validate, &vf);

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		const int code = app.exit(e);
		return code == 0 ? 0 : 1;  // bad usage is a validation error
	}

	try {
		if (run->parsed()) return cmd_run(build_config(rf), rf.seedless);
		if (compare->parsed()) {
			const RunConfig cfg = build_config(cf);
			std::vector<Mission> missions;
			if (!cf.mission.empty())
				missions.push_back(resolve_mission(cfg.mission));
			else {
				missions.push_back(builtin_mission("lawnmower"));
				missions.push_back(builtin_mission("inspection"));
			}
			const std::vector<CurrentField> currents =
			    cf.currents.empty() ? reference_currents() : parse_current_list(cf.currents);
			return cmd_compare(cfg, missions, currents, cf.seedless);
		}
		if (sweep->parsed()) {
			const RunConfig cfg = build_config(sf);
			std::vector<CurrentField> grid;
			if (!sf.currents.empty())
				grid = parse_current_list(sf.currents);
			else if (sf.grid > 0)
				grid = make_grid(sf.grid, sf.grid_max);
			else
				throw ValidationError("sweep needs --currents or --grid");
			return cmd_sweep(cfg, grid, sf.seedless);
		}
		if (validate->parsed()) return cmd_validate(build_config(vf));
		std::fprintf(stderr, "error: no subcommand\n");
		return 1;
	} catch (const ValidationError& e) {
		std::fprintf(stderr, "error: %s\n", e.what());
		return 1;
	} catch (const std::exception& e) {
		std::fprintf(stderr, "run failed: %s\n", e.what());
		return 2;
	}
}

#include "auvsim/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "auvsim/errors.hpp"

namespace auvsim {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Fan jobs over a pool bounded by the hardware thread count. Jobs own their
// result slots, so completion order cannot affect the output; they must not
// throw.
void parallel_for(int n, const std::function<void(int)>& job) {
	const int hw = static_cast<int>(std::thread::hardware_concurrency());
	const int workers = std::max(1, std::min(hw, n));
	if (workers <= 1) {
		for (int i = 0; i < n; ++i) job(i);
		return;
	}
	std::atomic<int> next{0};
	std::vector<std::thread> pool;
	pool.reserve(static_cast<size_t>(workers));
	for (int w = 0; w < workers; ++w)
		pool.emplace_back([&] {
			for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) job(i);
		});
	for (auto& t : pool) t.join();
}

std::string g17(double v) {
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.17g", v);
	return buf;
}

std::string csv_quote(const std::string& s) {
	std::string q = "\"";
	for (char c : s) {
		q += c;
		if (c == '"') q += '"';  // CSV escape: doubled quote
	}
	q += '"';
	return q;
}

std::string read_file(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) throw SimError("cannot read back output file: " + path);
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

std::ofstream open_out(const std::string& path) {
	std::ofstream out(path, std::ios::binary);
	if (!out) throw SimError("cannot open output file: " + path);
	return out;
}

json metrics_json(const RunMetrics& m) {
	return json{{"completed", m.completed},
	            {"travel_time", m.travel_time},
	            {"energy", m.energy},
	            {"energy_by_dof",
	             {{"surge", m.energy_by_dof.surge},
	              {"yaw", m.energy_by_dof.yaw},
	              {"heave", m.energy_by_dof.heave},
	              {"pitch", m.energy_by_dof.pitch}}},
	            {"mean_cross_track", m.mean_cross_track},
	            {"cross_track_samples", m.cross_track_samples},
	            {"fallback_periods", m.fallback_periods}};
}

json current_json(const CurrentField& c) {
	return json{{"vx", c.vx}, {"vy", c.vy}};
}

json comparison_json(const ComparisonReport& rep) {
	json rows = json::array();
	for (const ComparisonRow& r : rep.rows)
		rows.push_back(json{{"mission", r.mission},
		                    {"current", current_json(r.current)},
		                    {"ok", r.ok},
		                    {"error", r.error},
		                    {"proposed", metrics_json(r.proposed)},
		                    {"los", metrics_json(r.los)},
		                    {"saving", r.saving}});
	return json{{"rows", rows}, {"ok_rows", rep.ok_rows}, {"mean_saving", rep.mean_saving}};
}

json sweep_json(const SweepReport& rep) {
	json points = json::array();
	for (const SweepPoint& p : rep.points)
		points.push_back(json{{"current", current_json(p.current)},
		                      {"ok", p.ok},
		                      {"error", p.error},
		                      {"metrics", metrics_json(p.metrics)}});
	return json{{"mission", rep.mission},
	            {"controller", controller_name(rep.controller)},
	            {"points", points}};
}

void write_json_file(const std::string& path, const json& j) {
	std::ofstream out = open_out(path);
	out << j.dump(2) << '\n';
	if (!out) throw SimError("failed writing output file: " + path);
}

}  // namespace

ComparisonReport run_comparison(const RunConfig& base, const std::vector<Mission>& missions,
                                const std::vector<CurrentField>& currents) {
	if (missions.empty() || currents.empty())
		throw ValidationError("comparison needs at least one mission and one current");
	const VehicleParams params = resolve_vehicle(base);

	ComparisonReport rep;
	rep.rows.resize(missions.size() * currents.size());
	for (size_t mi = 0; mi < missions.size(); ++mi)
		for (size_t ci = 0; ci < currents.size(); ++ci) {
			ComparisonRow& row = rep.rows[mi * currents.size() + ci];
			row.mission = missions[mi].name;
			row.current = currents[ci];
		}

	parallel_for(static_cast<int>(rep.rows.size()), [&](int i) {
		ComparisonRow& row = rep.rows[static_cast<size_t>(i)];
		const Mission& mission = missions[static_cast<size_t>(i) / currents.size()];
		try {
			if (row.current.speed() >= base.optimizer.bounds.u_max)
				throw ValidationError("current speed exceeds the relative speed cap u_max");
			SimConfig sim_p = base.sim;
			sim_p.controller = ControllerKind::proposed;
			SimConfig sim_l = base.sim;
			sim_l.controller = ControllerKind::los_benchmark;
			row.proposed =
			    run_mission(params, mission, row.current, sim_p, base.optimizer, base.mpc).metrics;
			row.los =
			    run_mission(params, mission, row.current, sim_l, base.optimizer, base.mpc).metrics;
			if (!row.proposed.completed)
				row.error = "proposed run timed out";
			else if (!row.los.completed)
				row.error = "los run timed out";
			else {
				row.ok = true;
				row.saving = (row.los.energy - row.proposed.energy) / row.los.energy;
			}
		} catch (const std::exception& e) {
			row.ok = false;
			row.error = e.what();
		}
	});

	double sum = 0;
	for (const ComparisonRow& r : rep.rows)
		if (r.ok) {
			++rep.ok_rows;
			sum += r.saving;
		}
	rep.mean_saving = rep.ok_rows > 0 ? sum / rep.ok_rows : 0.0;
	return rep;
}

void write_comparison_json(const std::string& path, const ComparisonReport& report) {
	write_json_file(path, comparison_json(report));
}

void write_comparison_csv(const std::string& path, const ComparisonReport& report) {
	std::ofstream out = open_out(path);
	out << "mission,vx,vy,ok,energy_proposed,energy_los,saving,travel_time_proposed,"
	       "travel_time_los,cross_track_proposed,cross_track_los,error\n";
	for (const ComparisonRow& r : report.rows) {
		out << r.mission << ',' << g17(r.current.vx) << ',' << g17(r.current.vy) << ','
		    << (r.ok ? 1 : 0) << ',' << g17(r.proposed.energy) << ',' << g17(r.los.energy) << ','
		    << g17(r.saving) << ',' << g17(r.proposed.travel_time) << ','
		    << g17(r.los.travel_time) << ',' << g17(r.proposed.mean_cross_track) << ','
		    << g17(r.los.mean_cross_track) << ',' << csv_quote(r.error) << '\n';
	}
	if (!out) throw SimError("failed writing output file: " + path);
}

SweepReport run_sweep(const RunConfig& base, const Mission& mission,
                      const std::vector<CurrentField>& grid) {
	if (grid.empty()) throw ValidationError("sweep needs a nonempty current grid");
	const VehicleParams params = resolve_vehicle(base);

	SweepReport rep;
	rep.mission = mission.name;
	rep.controller = base.sim.controller;
	rep.points.resize(grid.size());
	for (size_t i = 0; i < grid.size(); ++i) rep.points[i].current = grid[i];

	parallel_for(static_cast<int>(grid.size()), [&](int i) {
		SweepPoint& pt = rep.points[static_cast<size_t>(i)];
		try {
			if (pt.current.speed() >= base.optimizer.bounds.u_max)
				throw ValidationError("current speed exceeds the relative speed cap u_max");
			pt.metrics =
			    run_mission(params, mission, pt.current, base.sim, base.optimizer, base.mpc).metrics;
			if (!pt.metrics.completed)
				pt.error = "run timed out";
			else
				pt.ok = true;
		} catch (const std::exception& e) {
			pt.ok = false;
			pt.error = e.what();
		}
	});
	return rep;
}

void write_sweep_json(const std::string& path, const SweepReport& report) {
	write_json_file(path, sweep_json(report));
}

void write_sweep_csv(const std::string& path, const SweepReport& report) {
	std::ofstream out = open_out(path);
	out << "mission,controller,vx,vy,ok,completed,travel_time,energy,energy_surge,energy_yaw,"
	       "energy_heave,energy_pitch,mean_cross_track,fallback_periods,error\n";
	for (const SweepPoint& p : report.points) {
		const RunMetrics& m = p.metrics;
		out << report.mission << ',' << controller_name(report.controller) << ','
		    << g17(p.current.vx) << ',' << g17(p.current.vy) << ',' << (p.ok ? 1 : 0) << ','
		    << (m.completed ? 1 : 0) << ',' << g17(m.travel_time) << ',' << g17(m.energy) << ','
		    << g17(m.energy_by_dof.surge) << ',' << g17(m.energy_by_dof.yaw) << ','
		    << g17(m.energy_by_dof.heave) << ',' << g17(m.energy_by_dof.pitch) << ','
		    << g17(m.mean_cross_track) << ',' << m.fallback_periods << ',' << csv_quote(p.error)
		    << '\n';
	}
	if (!out) throw SimError("failed writing output file: " + path);
}

int cmd_run(const RunConfig& cfg, bool seedless) {
	const VehicleParams params = resolve_vehicle(cfg);
	const Mission mission = resolve_mission(cfg.mission);
	const RunResult res =
	    run_mission(params, mission, cfg.current, cfg.sim, cfg.optimizer, cfg.mpc);
	const RunMetrics& m = res.metrics;

	fs::create_directories(cfg.out_dir);
	const fs::path out(cfg.out_dir);
	const std::string telemetry_path = (out / "telemetry.csv").string();
	write_telemetry_csv(telemetry_path, res.telemetry, cfg.sim.telemetry_decimation);

	json mj = json{{"mission", mission.name},
	               {"controller", controller_name(cfg.sim.controller)},
	               {"current", current_json(cfg.current)},
	               {"samples", res.telemetry.size()}};
	mj.update(metrics_json(m));
	write_json_file((out / "metrics.json").string(), mj);

	{
		std::ofstream e = open_out((out / "energy_by_dof.csv").string());
		e << "effort,energy_j\n";
		e << "surge," << g17(m.energy_by_dof.surge) << "\nyaw," << g17(m.energy_by_dof.yaw)
		  << "\nheave," << g17(m.energy_by_dof.heave) << "\npitch," << g17(m.energy_by_dof.pitch)
		  << "\ntotal," << g17(m.energy) << '\n';
	}
	{
		std::ofstream t = open_out((out / "trajectory.csv").string());
		t << "t,x,y,z\n";
		for (size_t i = 0; i < res.telemetry.size();
		     i += static_cast<size_t>(cfg.sim.telemetry_decimation)) {
			const TelemetrySample& r = res.telemetry[i];
			t << g17(r.t) << ',' << g17(r.state.pos(0)) << ',' << g17(r.state.pos(1)) << ','
			  << g17(r.state.pos(2)) << '\n';
		}
	}
	{
		// Long-format time series for plotting tools: one (t, variable, value)
		// row per telemetry column.
		std::ofstream l = open_out((out / "timeseries_long.csv").string());
		l << "t,variable,value\n";
		static const char* names[] = {"x",   "y",   "z",    "phi",     "theta", "psi",  "u_r",
		                              "v_r", "w_r", "p",    "q",       "r",     "u_rs", "w_rs",
		                              "theta_s", "psi_s", "T1", "T2", "T3",    "T4",   "P_inst"};
		for (size_t i = 0; i < res.telemetry.size();
		     i += static_cast<size_t>(cfg.sim.telemetry_decimation)) {
			const TelemetrySample& r = res.telemetry[i];
			const double vals[] = {r.state.pos(0),  r.state.pos(1),  r.state.pos(2),
			                       r.state.att(0),  r.state.att(1),  r.state.att(2),
			                       r.state.nu_r(0), r.state.nu_r(1), r.state.nu_r(2),
			                       r.state.nu_r(3), r.state.nu_r(4), r.state.nu_r(5),
			                       r.u_rs,          r.w_rs,          r.theta_s,
			                       r.psi_s,         r.thrusts(0),    r.thrusts(1),
			                       r.thrusts(2),    r.thrusts(3),    r.power};
			for (size_t v = 0; v < 21; ++v)
				l << g17(r.t) << ',' << names[v] << ',' << g17(vals[v]) << '\n';
		}
	}

	if (seedless) {
		const RunResult again =
		    run_mission(params, mission, cfg.current, cfg.sim, cfg.optimizer, cfg.mpc);
		const std::string rerun_path = (out / "telemetry_rerun.csv").string();
		write_telemetry_csv(rerun_path, again.telemetry, cfg.sim.telemetry_decimation);
		if (read_file(telemetry_path) != read_file(rerun_path)) {
			std::fprintf(stderr,
			             "determinism check FAILED: repeated run produced different telemetry "
			             "(kept %s)\n",
			             rerun_path.c_str());
			return 2;
		}
		fs::remove(rerun_path);
		std::printf("determinism check passed: repeated run byte-identical\n");
	}

	std::printf("mission %s (%zu waypoints, %.1f m)  controller %s  current (%.4g, %.4g) m/s\n",
	            mission.name.c_str(), mission.waypoints.size(), mission.path_length(),
	            controller_name(cfg.sim.controller).c_str(), cfg.current.vx, cfg.current.vy);
	std::printf("completed %s  travel time %.1f s  energy %.1f J  mean 3D cross-track %.3f m "
	            "(%d samples)\n",
	            m.completed ? "yes" : "no", m.travel_time, m.energy, m.mean_cross_track,
	            m.cross_track_samples);
	std::printf("energy by effort [J]: surge %.1f  yaw %.1f  heave %.1f  pitch %.1f\n",
	            m.energy_by_dof.surge, m.energy_by_dof.yaw, m.energy_by_dof.heave,
	            m.energy_by_dof.pitch);
	if (m.fallback_periods > 0)
		std::fprintf(stderr, "warning: setpoint stage fell back on %d control periods\n",
		             m.fallback_periods);
	std::printf("wrote %s/{telemetry.csv,metrics.json,energy_by_dof.csv,trajectory.csv,"
	            "timeseries_long.csv}\n",
	            cfg.out_dir.c_str());
	if (!m.completed) {
		std::fprintf(stderr, "run did not complete before the time limit\n");
		return 2;
	}
	return 0;
}

int cmd_compare(const RunConfig& cfg, const std::vector<Mission>& missions,
                const std::vector<CurrentField>& currents, bool seedless) {
	ComparisonReport rep = run_comparison(cfg, missions, currents);
	if (seedless) {
		const ComparisonReport again = run_comparison(cfg, missions, currents);
		if (comparison_json(rep).dump() != comparison_json(again).dump()) {
			std::fprintf(stderr, "determinism check FAILED: repeated comparison differs\n");
			return 2;
		}
		std::printf("determinism check passed: repeated comparison identical\n");
	}

	fs::create_directories(cfg.out_dir);
	const fs::path out(cfg.out_dir);
	write_comparison_json((out / "comparison.json").string(), rep);
	write_comparison_csv((out / "comparison.csv").string(), rep);

	std::printf("%-11s %-20s %-9s %11s %9s %11s\n", "mission", "current [m/s]", "controller",
	            "energy [J]", "time [s]", "xtrack [m]");
	for (const ComparisonRow& r : rep.rows) {
		char cur[32];
		std::snprintf(cur, sizeof cur, "(%7.4f, %7.4f)", r.current.vx, r.current.vy);
		if (!r.ok && r.proposed.travel_time == 0 && r.los.travel_time == 0) {
			std::printf("%-11s %-20s FAILED: %s\n", r.mission.c_str(), cur, r.error.c_str());
			continue;
		}
		std::printf("%-11s %-20s %-9s %11.1f %9.1f %11.3f\n", r.mission.c_str(), cur, "proposed",
		            r.proposed.energy, r.proposed.travel_time, r.proposed.mean_cross_track);
		std::printf("%-11s %-20s %-9s %11.1f %9.1f %11.3f", "", "", "los", r.los.energy,
		            r.los.travel_time, r.los.mean_cross_track);
		if (r.ok)
			std::printf("   saving %6.2f%%\n", 100.0 * r.saving);
		else
			std::printf("   FAILED: %s\n", r.error.c_str());
	}
	std::printf("mean energy saving over %d/%zu conditions: %.2f%%\n", rep.ok_rows,
	            rep.rows.size(), 100.0 * rep.mean_saving);
	for (const ComparisonRow& r : rep.rows)
		if (!r.ok)
			std::fprintf(stderr, "warning: condition %s (%g, %g) excluded from aggregate: %s\n",
			             r.mission.c_str(), r.current.vx, r.current.vy, r.error.c_str());
	std::printf("wrote %s/{comparison.json,comparison.csv}\n", cfg.out_dir.c_str());
	return rep.ok_rows == static_cast<int>(rep.rows.size()) ? 0 : 2;
}

int cmd_sweep(const RunConfig& cfg, const std::vector<CurrentField>& grid, bool seedless) {
	const Mission mission = resolve_mission(cfg.mission);
	SweepReport rep = run_sweep(cfg, mission, grid);
	if (seedless) {
		const SweepReport again = run_sweep(cfg, mission, grid);
		if (sweep_json(rep).dump() != sweep_json(again).dump()) {
			std::fprintf(stderr, "determinism check FAILED: repeated sweep differs\n");
			return 2;
		}
		std::printf("determinism check passed: repeated sweep identical\n");
	}

	fs::create_directories(cfg.out_dir);
	const fs::path out(cfg.out_dir);
	write_sweep_json((out / "sweep.json").string(), rep);
	write_sweep_csv((out / "sweep.csv").string(), rep);

	int ok = 0;
	for (const SweepPoint& p : rep.points) {
		if (p.ok)
			++ok;
		else
			std::fprintf(stderr, "warning: grid point (%g, %g) failed: %s\n", p.current.vx,
			             p.current.vy, p.error.c_str());
	}
	std::printf("sweep %s/%s: %d/%zu grid points succeeded\n", rep.mission.c_str(),
	            controller_name(rep.controller).c_str(), ok, rep.points.size());
	std::printf("wrote %s/{sweep.json,sweep.csv}\n", cfg.out_dir.c_str());
	return ok == static_cast<int>(rep.points.size()) ? 0 : 2;
}

int cmd_validate(const RunConfig& cfg) {
	const VehicleParams params = resolve_vehicle(cfg);
	(void)params;
	const Mission mission = resolve_mission(cfg.mission);
	std::printf("configuration OK: vehicle %s, mission %s (%zu waypoints, %.1f m), "
	            "controller %s, current (%g, %g) m/s, out %s\n",
	            cfg.vehicle_file.empty() ? "<built-in defaults>" : cfg.vehicle_file.c_str(),
	            mission.name.c_str(), mission.waypoints.size(), mission.path_length(),
	            controller_name(cfg.sim.controller).c_str(), cfg.current.vx, cfg.current.vy,
	            cfg.out_dir.c_str());
	return 0;
}

}  // namespace auvsim

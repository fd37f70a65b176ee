#pragma once

#include <string>
#include <vector>

#include "auvsim/config.hpp"

namespace auvsim {

// One (mission, current) condition run under both control stacks.
struct ComparisonRow {
	std::string mission;
	CurrentField current;
	bool ok = false;     // both runs finished and completed the mission
	std::string error;   // diagnostic when !ok
	RunMetrics proposed;
	RunMetrics los;
	double saving = 0;   // (E_los - E_proposed) / E_los, set when ok
};

struct ComparisonReport {
	std::vector<ComparisonRow> rows;  // declared condition order
	int ok_rows = 0;
	double mean_saving = 0;  // arithmetic mean of saving over ok rows
};

// Both controllers over missions x currents, fanned out across a worker pool
// bounded by the hardware thread count. Failed rows carry their diagnostic
// and are excluded from the aggregate.
ComparisonReport run_comparison(const RunConfig& base, const std::vector<Mission>& missions,
                                const std::vector<CurrentField>& currents);

void write_comparison_json(const std::string& path, const ComparisonReport& report);
void write_comparison_csv(const std::string& path, const ComparisonReport& report);

struct SweepPoint {
	CurrentField current;
	bool ok = false;
	std::string error;
	RunMetrics metrics;
};

struct SweepReport {
	std::string mission;
	ControllerKind controller = ControllerKind::proposed;
	std::vector<SweepPoint> points;  // declared grid order
};

// One run per grid point under the configured controller; points whose
// current violates the speed cap are rejected at validation, failures are
// recorded and the sweep continues.
SweepReport run_sweep(const RunConfig& base, const Mission& mission,
                      const std::vector<CurrentField>& grid);

void write_sweep_json(const std::string& path, const SweepReport& report);
void write_sweep_csv(const std::string& path, const SweepReport& report);

/*
 * Subcommand bodies. Each returns the process exit code: 0 success,
 * 2 run failure (timeouts, aborted runs, determinism mismatch). Validation
 * problems are thrown as ValidationError and mapped to exit code 1 by the
 * caller.
 */
int cmd_run(const RunConfig& cfg, bool seedless);
int cmd_compare(const RunConfig& cfg, const std::vector<Mission>& missions,
                const std::vector<CurrentField>& currents, bool seedless);
int cmd_sweep(const RunConfig& cfg, const std::vector<CurrentField>& grid, bool seedless);
int cmd_validate(const RunConfig& cfg);

}  // namespace auvsim

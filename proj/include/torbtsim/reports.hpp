#pragma once

#include "torbtsim/analysis.hpp"
#include "torbtsim/scenario.hpp"
#include "torbtsim/simulation.hpp"

#include <string>
#include <vector>

namespace torbtsim::reports {

// Writes one structured-records (.jsonl) file and one .csv table per
// metric family into config.report_dir, named <name>-<seed>.<family>.*.
// Reports hold aggregates only: counts, shares, countries, ASNs and
// ports, never endpoints. Optional event/trace logs (which do carry
// endpoints, for replay and debugging) go to report_dir/logs/.
// Returns the paths written, report files first.
std::vector<std::string> write_run_reports(const scenario::ScenarioConfig& config,
                                           const simulation::RunOutput& out);

// The combined policy-comparison table for a sweep.
std::vector<std::string> write_defense_table(const scenario::ScenarioConfig& config,
                                             const std::vector<analysis::DefenseRow>& rows);

} // namespace torbtsim::reports

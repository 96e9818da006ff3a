#ifndef BGCWM_ARCHIVE_HPP
#define BGCWM_ARCHIVE_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "bgcwm/runner.hpp"

namespace bgcwm {

// Human-readable description of the draws.bin record layout.
nlohmann::json draws_layout();

// Writes manifest.json, trace.csv, draws.bin and (optionally) draws.csv into
// `dir`, creating it when needed.
void write_archive(const std::string& dir, const DrawArchive& archive,
                   const nlohmann::json& extra_meta = nlohmann::json::object());

DrawArchive read_archive(const std::string& dir);

// trace.csv contents; numbers printed with 17 significant digits.
std::string trace_csv(const std::vector<TraceRow>& trace);

// State of a failed sweep, as JSON.
nlohmann::json state_to_json(const MixtureState& state);

// Directories of the chains listed in a fit directory's manifest; `main_only`
// keeps chains in the main mode group. A chain directory resolves to itself.
std::vector<std::string> resolve_chain_dirs(const std::string& path, bool main_only = true);

}  // namespace bgcwm

#endif  // BGCWM_ARCHIVE_HPP

#pragma once

#include "rprv/conformal.hpp"
#include "rprv/shift.hpp"
#include "rprv/trajectory.hpp"
#include "rprv/verification.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rprv {

using Json = nlohmann::ordered_json;

enum class TrajectoryFormat { csv, json };

// By extension: ".json" is JSON, anything else CSV.
TrajectoryFormat format_for(const std::filesystem::path& path);

// CSV rows: trajectory_id,time_index,x0,...,x{n-1}; an optional header line. Rows may come in any order.
// Trajectories are returned sorted by id (numerically when every id is an integer).
std::vector<Trajectory> parse_trajectories_csv(std::string_view text);
// [{"id": ..., "states": [[...], ...]}, ...]
std::vector<Trajectory> parse_trajectories_json(std::string_view text);
std::vector<Trajectory> read_trajectories(const std::filesystem::path& path);
std::vector<Trajectory> read_trajectories(const std::filesystem::path& path, TrajectoryFormat format);

std::string trajectories_to_csv(const std::vector<Trajectory>& trajectories);
Json trajectories_to_json(const std::vector<Trajectory>& trajectories);
void write_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories);

// Single-column CSV (optional header) or a JSON array.
ScoreSet parse_scores_csv(std::string_view text);
ScoreSet parse_scores_json(std::string_view text);
ScoreSet read_scores(const std::filesystem::path& path);
std::string scores_to_csv(const ScoreSet& scores);

// {"id": [[state], ...], ...}
std::map<std::string, std::vector<StateVector>> parse_external_predictions(std::string_view text);
std::map<std::string, std::vector<StateVector>> read_external_predictions(const std::filesystem::path& path);
Json external_predictions_to_json(const std::map<std::string, std::vector<StateVector>>& predictions);

// Non-finite reals are written as the strings "inf", "-inf", "nan".
Json real_to_json(double value);
double real_from_json(const Json& value);

Json to_json(const PredictionRegion& region);
Json to_json(const VerificationOutcome& outcome);
Json to_json(const ShiftEstimate& estimate);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace rprv

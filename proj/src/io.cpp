#include "rprv/io.hpp"

#include "rprv/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rprv {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto l : split(text, '\n'))
    if (!l.empty()) out.push_back(l);
  return out;
}

bool parse_double(std::string_view cell, double& value) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc{} && ptr == cell.data() + cell.size();
}

bool parse_long(std::string_view cell, long long& value) {
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return !cell.empty() && ec == std::errc{} && ptr == cell.data() + cell.size();
}

// Integers first in numeric order, then other ids lexicographically.
bool id_less(const std::string& a, const std::string& b) {
  long long x = 0, y = 0;
  const bool na = parse_long(a, x), nb = parse_long(b, y);
  if (na && nb) return x != y ? x < y : a < b;
  if (na != nb) return na;
  return a < b;
}

std::string where(std::size_t line) { return "line " + std::to_string(line); }

std::string json_id(const Json& id) {
  if (id.is_string()) return id.get<std::string>();
  if (id.is_number_integer()) return std::to_string(id.get<long long>());
  throw InputError("trajectory id must be a string or an integer");
}

std::vector<Trajectory> sorted_and_checked(std::vector<Trajectory> out) {
  std::sort(out.begin(), out.end(), [](const Trajectory& a, const Trajectory& b) { return id_less(a.id(), b.id()); });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].id() == out[i - 1].id()) throw InputError("duplicate trajectory id '" + out[i].id() + "'");
    if (out[i].size() != out[0].size())
      throw InputError("ragged trajectory lengths: '" + out[0].id() + "' has " + std::to_string(out[0].size()) +
                       " states, '" + out[i].id() + "' has " + std::to_string(out[i].size()));
    if (out[i].dimension() != out[0].dimension()) throw InputError("trajectories differ in state dimension");
  }
  return out;
}

StateVector state_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("a state must be an array of numbers");
  StateVector s;
  for (const auto& v : j) {
    if (!v.is_number()) throw InputError("non-numeric state entry");
    s.push_back(v.get<double>());
  }
  return s;
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

TrajectoryFormat format_for(const std::filesystem::path& path) {
  return path.extension() == ".json" ? TrajectoryFormat::json : TrajectoryFormat::csv;
}

std::vector<Trajectory> parse_trajectories_csv(std::string_view text) {
  const auto lines = lines_of(text);
  std::map<std::string, std::map<long long, StateVector>> rows;
  std::size_t width = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    long long time = 0;
    if (i == 0 && !parse_long(cells.size() > 1 ? cells[1] : std::string_view{}, time)) continue;  // header
    if (cells.size() < 3) throw InputError(where(i + 1) + ": expected trajectory_id,time_index,x0,...");
    if (width == 0) width = cells.size();
    if (cells.size() != width) throw InputError(where(i + 1) + ": inconsistent column count");
    if (!parse_long(cells[1], time) || time < 0)
      throw InputError(where(i + 1) + ": time index '" + std::string(cells[1]) + "' is not a nonnegative integer");
    StateVector state;
    for (std::size_t c = 2; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v) || !std::isfinite(v))
        throw InputError(where(i + 1) + ": non-numeric cell '" + std::string(cells[c]) + "'");
      state.push_back(v);
    }
    const std::string id(cells[0]);
    if (id.empty()) throw InputError(where(i + 1) + ": empty trajectory id");
    if (!rows[id].emplace(time, std::move(state)).second)
      throw InputError(where(i + 1) + ": duplicate (id, time) pair (" + id + ", " + std::to_string(time) + ")");
  }
  if (rows.empty()) throw InputError("no trajectory rows found");
  std::vector<Trajectory> out;
  for (auto& [id, by_time] : rows) {
    std::vector<StateVector> states;
    long long expected = 0;
    for (auto& [time, s] : by_time) {
      if (time != expected)
        throw InputError("trajectory '" + id + "' is missing time index " + std::to_string(expected));
      states.push_back(std::move(s));
      ++expected;
    }
    out.push_back(Trajectory::from_states(states, id));
  }
  return sorted_and_checked(std::move(out));
}

std::vector<Trajectory> parse_trajectories_json(std::string_view text) {
  const Json doc = parse_json(text);
  if (!doc.is_array()) throw InputError("trajectory JSON must be an array of {id, states} objects");
  std::vector<Trajectory> out;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("id") || !item.contains("states"))
      throw InputError("each trajectory needs 'id' and 'states'");
    if (!item["states"].is_array()) throw InputError("'states' must be an array");
    std::vector<StateVector> states;
    for (const auto& s : item["states"]) states.push_back(state_from_json(s));
    try {
      out.push_back(Trajectory::from_states(states, json_id(item["id"])));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  if (out.empty()) throw InputError("no trajectories found");
  return sorted_and_checked(std::move(out));
}

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path) {
  return read_trajectories(path, format_for(path));
}

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path, TrajectoryFormat format) {
  const std::string text = read_text(path);
  return format == TrajectoryFormat::json ? parse_trajectories_json(text) : parse_trajectories_csv(text);
}

std::string trajectories_to_csv(const std::vector<Trajectory>& trajectories) {
  std::ostringstream os;
  os.precision(17);
  const std::size_t n = trajectories.empty() ? 0 : trajectories.front().dimension();
  os << "trajectory_id,time_index";
  for (std::size_t j = 0; j < n; ++j) os << ",x" << j;
  os << '\n';
  for (const auto& x : trajectories)
    for (std::size_t tau = 0; tau < x.size(); ++tau) {
      os << x.id() << ',' << tau;
      for (double v : x.state(tau)) os << ',' << v;
      os << '\n';
    }
  return os.str();
}

Json trajectories_to_json(const std::vector<Trajectory>& trajectories) {
  Json arr = Json::array();
  for (const auto& x : trajectories) arr.push_back({{"id", x.id()}, {"states", x.states()}});
  return arr;
}

void write_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories) {
  write_text(path, format_for(path) == TrajectoryFormat::json ? trajectories_to_json(trajectories).dump(1) + "\n"
                                                               : trajectories_to_csv(trajectories));
}

ScoreSet parse_scores_csv(std::string_view text) {
  const auto lines = lines_of(text);
  std::vector<double> scores;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    double v = 0.0;
    if (!parse_double(cells[0], v)) {
      if (i == 0) continue;  // header
      throw InputError(where(i + 1) + ": non-numeric score '" + std::string(cells[0]) + "'");
    }
    if (cells.size() != 1) throw InputError(where(i + 1) + ": score files have a single column");
    scores.push_back(v);
  }
  if (scores.empty()) throw InputError("score file holds no scores");
  try {
    return ScoreSet(std::move(scores), "file");
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

ScoreSet parse_scores_json(std::string_view text) {
  const Json doc = parse_json(text);
  if (!doc.is_array() || doc.empty()) throw InputError("score JSON must be a nonempty array");
  std::vector<double> scores;
  for (const auto& v : doc) scores.push_back(real_from_json(v));
  try {
    return ScoreSet(std::move(scores), "file");
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

ScoreSet read_scores(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  return format_for(path) == TrajectoryFormat::json ? parse_scores_json(text) : parse_scores_csv(text);
}

std::string scores_to_csv(const ScoreSet& scores) {
  std::ostringstream os;
  os.precision(17);
  os << "score\n";
  for (double v : scores.values()) os << v << '\n';
  return os.str();
}

std::map<std::string, std::vector<StateVector>> parse_external_predictions(std::string_view text) {
  const Json doc = parse_json(text);
  if (!doc.is_object()) throw InputError("prediction JSON must map trajectory ids to state lists");
  std::map<std::string, std::vector<StateVector>> out;
  for (const auto& [id, states] : doc.items()) {
    if (!states.is_array()) throw InputError("predictions for '" + id + "' must be an array of states");
    auto& dest = out[id];
    for (const auto& s : states) dest.push_back(state_from_json(s));
  }
  return out;
}

std::map<std::string, std::vector<StateVector>> read_external_predictions(const std::filesystem::path& path) {
  return parse_external_predictions(read_text(path));
}

Json external_predictions_to_json(const std::map<std::string, std::vector<StateVector>>& predictions) {
  Json doc = Json::object();
  for (const auto& [id, states] : predictions) doc[id] = states;
  return doc;
}

Json real_to_json(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

double real_from_json(const Json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
  }
  throw InputError("expected a number, \"inf\" or \"-inf\"");
}

Json to_json(const PredictionRegion& region) {
  return Json{{"value", real_to_json(region.value)},
              {"adjusted_level", real_to_json(region.adjusted_level)},
              {"feasible", region.feasible},
              {"delta", region.delta},
              {"epsilon", region.epsilon},
              {"order_index", region.index},
              {"calibration_size", region.calibration_size}};
}

Json to_json(const VerificationOutcome& outcome) {
  Json j{{"rho_star", real_to_json(outcome.rho_star)},
         {"satisfied", outcome.satisfied},
         {"confidence", outcome.confidence},
         {"method", method_name(outcome.method)},
         {"predicted_robustness", real_to_json(outcome.predicted_robustness)},
         {"region", to_json(outcome.region)}};
  if (outcome.method == Method::adaptive_direct) j["omega"] = outcome.omega;
  if (outcome.predicate_bounds) {
    Json b = Json::object();
    for (const auto& [key, v] : outcome.predicate_bounds->entries())
      b[key.first + "@" + std::to_string(key.second)] = real_to_json(v);
    j["predicate_bounds"] = std::move(b);
  }
  return j;
}

Json to_json(const ShiftEstimate& estimate) {
  Json comps = Json::array();
  for (const auto& c : estimate.components)
    comps.push_back({{"epsilon", c.epsilon},
                     {"calibration_size", c.calibration_size},
                     {"test_size", c.test_size},
                     {"bandwidth_calibration", c.bandwidth_calibration},
                     {"bandwidth_test", c.bandwidth_test},
                     {"grid_lo", c.grid_lo},
                     {"grid_hi", c.grid_hi}});
  return Json{{"epsilon", estimate.combined}, {"grid_points", estimate.grid_points}, {"components", comps}};
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace rprv

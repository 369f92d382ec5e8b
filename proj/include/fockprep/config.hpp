#pragma once

// JSON run configuration: schema, validation and emission.
//
// {
//   "command": "spectrum" | "counting" | "sweep" | "figure",
//   "figure": "fig2" | "fig3" | "fig4" | "fig5",          (figure only)
//   "tag": "name",                 output files are <command>_<tag>.csv
//   "output_dir": ".",
//   "threads": 1,
//   "verbose": false,
//   "grid": { "n_points", "points_per_wavelength", "points_per_smoothness",
//             "points_per_half_width", "margin_decay_lengths", "max_margin_half_widths" },
//   "tolerances": { "threshold_fraction", "fock_epsilon" },
//   "trap": TRAP,                                         (spectrum, smoothness sweep)
//   "scenario": { "initial": TRAP, "final": TRAP, "occupation": OCC },
//   "sweep": { "parameter": "width_ratio" | "mu_over_kT" | "smoothness",
//              "values": [...], "ratios": [...] }
// }
// TRAP = { "shape", "U" | "depth", "half_width" | "width_ratio", "relative_smoothness" }
// OCC  = { "type": "ground", "particles": N }
//      | { "type": "thermal", "temperature": kT, "particles": N }
//      | { "type": "mu_over_kT", "mu_over_kT": r, "particles": N }

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fockprep/errors.hpp"
#include "fockprep/experiments.hpp"
#include "fockprep/spectral_solver.hpp"
#include "fockprep/trap_models.hpp"

namespace fockprep {

enum class Command { spectrum, counting, sweep, figure };
enum class SweepParameter { width_ratio, mu_over_kT, smoothness };

inline std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::spectrum: return "spectrum";
    case Command::counting: return "counting";
    case Command::sweep: return "sweep";
    case Command::figure: return "figure";
  }
  return "unknown";
}

inline std::string_view to_string(SweepParameter p) noexcept {
  switch (p) {
    case SweepParameter::width_ratio: return "width_ratio";
    case SweepParameter::mu_over_kT: return "mu_over_kT";
    case SweepParameter::smoothness: return "smoothness";
  }
  return "unknown";
}

inline std::optional<Command> command_from_string(std::string_view s) {
  for (auto c : {Command::spectrum, Command::counting, Command::sweep, Command::figure})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

/// A trap as written in the file. Depth is given either as V or as U; the
/// final trap of a scenario may give width_ratio instead of half_width and
/// inherits shape and relative smoothness from the initial trap.
struct TrapConfig {
  std::optional<TrapShape> shape;
  std::optional<double> depth;
  std::optional<double> u;
  std::optional<double> half_width;
  std::optional<double> width_ratio;
  std::optional<double> relative_smoothness;

  bool operator==(const TrapConfig&) const = default;
};

struct ScenarioConfig {
  TrapConfig initial;
  TrapConfig final;
  OccupationSpec occupation;

  bool operator==(const ScenarioConfig&) const = default;
};

struct SweepConfig {
  SweepParameter parameter = SweepParameter::width_ratio;
  std::vector<double> values;
  std::vector<double> ratios;  // width ratios swept at each mu/kT

  bool operator==(const SweepConfig&) const = default;
};

struct GridConfig {
  std::optional<std::size_t> n_points;
  double points_per_wavelength = GridPolicy{}.points_per_wavelength;
  double points_per_smoothness = GridPolicy{}.points_per_smoothness;
  double points_per_half_width = GridPolicy{}.points_per_half_width;
  double margin_decay_lengths = GridPolicy{}.margin_decay_lengths;
  double max_margin_half_widths = GridPolicy{}.max_margin_half_widths;

  bool operator==(const GridConfig&) const = default;
};

struct ToleranceConfig {
  double threshold_fraction = SolveOptions{}.threshold_fraction;
  double fock_epsilon = 1e-3;

  bool operator==(const ToleranceConfig&) const = default;
};

struct RunConfig {
  Command command = Command::spectrum;
  std::optional<std::string> figure;
  std::string tag;
  std::string output_dir = ".";
  unsigned threads = 1;
  bool verbose = false;
  GridConfig grid;
  ToleranceConfig tolerances;
  std::optional<TrapConfig> trap;
  std::optional<ScenarioConfig> scenario;
  std::optional<SweepConfig> sweep;

  bool operator==(const RunConfig&) const = default;
};

inline constexpr std::string_view kFigureNames[] = {"fig2", "fig3", "fig4", "fig5"};

namespace detail {

using json = nlohmann::json;

/// Input iterator that remembers the last character the parser read, so SAX
/// events can be mapped back to line numbers.
struct TrackingIterator {
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p = nullptr;
  const char** cursor = nullptr;

  reference operator*() const {
    *cursor = p;
    return *p;
  }
  TrackingIterator& operator++() {
    ++p;
    return *this;
  }
  TrackingIterator operator++(int) {
    auto old = *this;
    ++p;
    return old;
  }
  bool operator==(const TrackingIterator& o) const { return p == o.p; }
  bool operator!=(const TrackingIterator& o) const { return p != o.p; }
};

/// SAX pass recording the line on which each key path appears.
class KeyLineRecorder : public nlohmann::json_sax<json> {
 public:
  KeyLineRecorder(std::string_view text, const char** cursor) : text_(text), cursor_(cursor) {}

  std::unordered_map<std::string, std::size_t> lines;

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }
  bool start_object(std::size_t) override {
    stack_.push_back({element_path(), false, 0, {}});
    return true;
  }
  bool key(string_t& k) override {
    auto& top = stack_.back();
    top.key = k;
    lines[join(top.path, k)] = current_line();
    return true;
  }
  bool end_object() override {
    stack_.pop_back();
    return true;
  }
  bool start_array(std::size_t) override {
    stack_.push_back({element_path(), true, 0, {}});
    return true;
  }
  bool end_array() override {
    stack_.pop_back();
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override {
    return false;
  }

  static std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
  }

 private:
  struct Frame {
    std::string path;
    bool array;
    std::size_t index;
    std::string key;
  };

  std::size_t current_line() const {
    std::size_t line = 1;
    for (const char* c = text_.data(); c < *cursor_; ++c) line += *c == '\n';
    return line;
  }
  std::string element_path() {
    if (stack_.empty()) return {};
    auto& top = stack_.back();
    if (!top.array) return join(top.path, top.key);
    const std::string p = top.path + "[" + std::to_string(top.index++) + "]";
    lines.emplace(p, current_line());
    return p;
  }
  bool value() {
    element_path();
    return true;
  }

  std::string_view text_;
  const char** cursor_;
  std::vector<Frame> stack_;
};

/// A JSON object under validation: typed lookups that report key path and line.
class Node {
 public:
  Node(const json& j, std::string path, const std::unordered_map<std::string, std::size_t>& lines)
      : j_(j), path_(std::move(path)), lines_(lines) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    const auto it = lines_.find(path);
    throw ConfigError(path, it == lines_.end() ? message
                                               : "line " + std::to_string(it->second) + ": " + message);
  }

  std::string child_path(std::string_view key) const {
    return KeyLineRecorder::join(path_, std::string(key));
  }
  bool has(std::string_view key) const { return j_.contains(key); }
  const json& raw(std::string_view key) const { return j_.at(key); }

  void reject_unknown(std::initializer_list<std::string_view> allowed) const {
    for (const auto& [k, v] : j_.items()) {
      bool known = false;
      for (auto a : allowed) known |= k == a;
      if (!known) fail(child_path(k), "unknown key");
    }
  }
  void require_keys(std::initializer_list<std::string_view> keys) const {
    std::string missing;
    for (auto k : keys)
      if (!has(k)) missing += (missing.empty() ? "" : ", ") + std::string(k);
    if (!missing.empty()) fail(path_, "missing required key(s): " + missing);
  }
  void forbid(std::string_view key, const std::string& why) const {
    if (has(key)) fail(child_path(key), why);
  }

  Node child(std::string_view key) const { return Node(raw(key), child_path(key), lines_); }

  double number(std::string_view key) const {
    const auto& v = raw(key);
    if (!v.is_number()) fail(child_path(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(child_path(key), "must be finite");
    return x;
  }
  double positive(std::string_view key) const {
    const double x = number(key);
    if (!(x > 0.0)) fail(child_path(key), "must be > 0 (got " + json(x).dump() + ")");
    return x;
  }
  double non_negative(std::string_view key) const {
    const double x = number(key);
    if (!(x >= 0.0)) fail(child_path(key), "must be >= 0 (got " + json(x).dump() + ")");
    return x;
  }
  std::optional<double> optional_positive(std::string_view key) const {
    return has(key) ? std::optional(positive(key)) : std::nullopt;
  }
  std::size_t count(std::string_view key, std::size_t minimum) const {
    const auto& v = raw(key);
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(minimum))
      fail(child_path(key), "expected an integer >= " + std::to_string(minimum));
    return v.get<std::size_t>();
  }
  std::string text(std::string_view key) const {
    const auto& v = raw(key);
    if (!v.is_string()) fail(child_path(key), "expected a string");
    return v.get<std::string>();
  }
  bool flag(std::string_view key) const {
    const auto& v = raw(key);
    if (!v.is_boolean()) fail(child_path(key), "expected true or false");
    return v.get<bool>();
  }
  std::vector<double> numbers(std::string_view key, bool positive_only) const {
    const auto& v = raw(key);
    const auto p = child_path(key);
    if (!v.is_array() || v.empty()) fail(p, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto ep = p + "[" + std::to_string(i) + "]";
      if (!v[i].is_number()) fail(ep, "expected a number");
      const double x = v[i].get<double>();
      if (!std::isfinite(x) || (positive_only && !(x > 0.0))) fail(ep, "must be a finite number > 0");
      out.push_back(x);
    }
    return out;
  }

  const std::string& path() const noexcept { return path_; }

 private:
  const json& j_;
  std::string path_;
  const std::unordered_map<std::string, std::size_t>& lines_;
};

inline TrapConfig parse_trap(const Node& n, bool final_trap) {
  n.reject_unknown({"shape", "U", "depth", "half_width", "width_ratio", "relative_smoothness"});
  TrapConfig t;
  if (n.has("shape")) {
    try {
      t.shape = trap_shape_from_string(n.text("shape"));
    } catch (const InvalidParameter& e) {
      n.fail(n.child_path("shape"), e.what());
    }
  } else if (!final_trap) {
    n.fail(n.path(), "missing required key(s): shape");
  }
  if (n.has("U") == n.has("depth")) n.fail(n.path(), "give exactly one of U, depth");
  if (n.has("U")) t.u = n.positive("U");
  if (n.has("depth")) t.depth = n.non_negative("depth");
  if (final_trap) {
    if (n.has("half_width") == n.has("width_ratio"))
      n.fail(n.path(), "give exactly one of half_width, width_ratio");
  } else {
    n.forbid("width_ratio", "only the final trap of a scenario may use width_ratio");
    n.require_keys({"half_width"});
  }
  t.half_width = n.optional_positive("half_width");
  if (n.has("width_ratio")) {
    t.width_ratio = n.positive("width_ratio");
    if (*t.width_ratio > 1.0) n.fail(n.child_path("width_ratio"), "must lie in (0, 1]");
  }
  if (n.has("relative_smoothness")) t.relative_smoothness = n.non_negative("relative_smoothness");
  if (!final_trap && t.shape == TrapShape::bathtub && !t.relative_smoothness)
    n.fail(n.path(), "missing required key(s): relative_smoothness");
  return t;
}

inline OccupationSpec parse_occupation(const Node& n) {
  n.require_keys({"type", "particles"});
  const std::string type = n.text("type");
  if (type == "ground") {
    n.reject_unknown({"type", "particles"});
    return GroundOccupation{n.count("particles", 1)};
  }
  if (type == "thermal") {
    n.reject_unknown({"type", "particles", "temperature"});
    n.require_keys({"temperature"});
    return ThermalOccupation{n.positive("temperature"), n.positive("particles")};
  }
  if (type == "mu_over_kT") {
    n.reject_unknown({"type", "particles", "mu_over_kT"});
    n.require_keys({"mu_over_kT"});
    return MuRatioOccupation{n.positive("mu_over_kT"), n.positive("particles")};
  }
  n.fail(n.child_path("type"), "unknown occupation type '" + type +
                                   "' (expected ground, thermal or mu_over_kT)");
}

inline json emit_trap(const TrapConfig& t) {
  json j = json::object();
  if (t.shape) j["shape"] = std::string(to_string(*t.shape));
  if (t.u) j["U"] = *t.u;
  if (t.depth) j["depth"] = *t.depth;
  if (t.half_width) j["half_width"] = *t.half_width;
  if (t.width_ratio) j["width_ratio"] = *t.width_ratio;
  if (t.relative_smoothness) j["relative_smoothness"] = *t.relative_smoothness;
  return j;
}

inline json emit_occupation(const OccupationSpec& o) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GroundOccupation>)
          return {{"type", "ground"}, {"particles", v.particles}};
        else if constexpr (std::is_same_v<T, ThermalOccupation>)
          return {{"type", "thermal"}, {"temperature", v.temperature}, {"particles", v.particles}};
        else
          return {{"type", "mu_over_kT"}, {"mu_over_kT", v.mu_over_kT}, {"particles", v.particles}};
      },
      o);
}

}  // namespace detail

/// Parses and validates a configuration. An empty (all-whitespace) text is an
/// empty object. The hints supply command and figure when the file omits them;
/// a file value that disagrees with a hint is an error.
inline RunConfig parse_config(std::string_view text, std::optional<Command> command_hint = {},
                              std::optional<std::string> figure_hint = {}) {
  using detail::json;
  json j = json::object();
  std::unordered_map<std::string, std::size_t> lines;
  const bool blank = std::all_of(text.begin(), text.end(),
                                 [](unsigned char c) { return std::isspace(c) != 0; });
  if (!blank) {
    try {
      j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
      throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    const char* cursor = text.data();
    detail::KeyLineRecorder recorder(text, &cursor);
    json::sax_parse(detail::TrackingIterator{text.data(), &cursor},
                    detail::TrackingIterator{text.data() + text.size(), &cursor}, &recorder);
    lines = std::move(recorder.lines);
  }
  if (!j.is_object()) throw ConfigError("", "top level must be a JSON object");
  const detail::Node root(j, "", lines);
  root.reject_unknown({"command", "figure", "tag", "output_dir", "threads", "verbose", "grid",
                       "tolerances", "trap", "scenario", "sweep"});

  RunConfig c;
  if (root.has("command")) {
    const auto name = root.text("command");
    const auto cmd = command_from_string(name);
    if (!cmd) root.fail("command", "unknown command '" + name + "'");
    if (command_hint && *command_hint != *cmd)
      root.fail("command", "file says '" + name + "' but '" + std::string(to_string(*command_hint)) +
                               "' was requested");
    c.command = *cmd;
  } else if (command_hint) {
    c.command = *command_hint;
  } else {
    root.fail("", "missing required key(s): command");
  }

  if (root.has("output_dir")) c.output_dir = root.text("output_dir");
  if (c.output_dir.empty()) root.fail("output_dir", "must not be empty");
  if (root.has("threads")) c.threads = static_cast<unsigned>(root.count("threads", 1));
  if (root.has("verbose")) c.verbose = root.flag("verbose");

  if (root.has("grid")) {
    const auto g = root.child("grid");
    g.reject_unknown({"n_points", "points_per_wavelength", "points_per_smoothness",
                      "points_per_half_width", "margin_decay_lengths", "max_margin_half_widths"});
    if (g.has("n_points")) c.grid.n_points = g.count("n_points", 3);
    if (g.has("points_per_wavelength")) c.grid.points_per_wavelength = g.positive("points_per_wavelength");
    if (g.has("points_per_smoothness")) c.grid.points_per_smoothness = g.positive("points_per_smoothness");
    if (g.has("points_per_half_width")) c.grid.points_per_half_width = g.positive("points_per_half_width");
    if (g.has("margin_decay_lengths")) c.grid.margin_decay_lengths = g.positive("margin_decay_lengths");
    if (g.has("max_margin_half_widths"))
      c.grid.max_margin_half_widths = g.positive("max_margin_half_widths");
  }
  if (root.has("tolerances")) {
    const auto t = root.child("tolerances");
    t.reject_unknown({"threshold_fraction", "fock_epsilon"});
    auto fraction = [&](std::string_view key) {
      const double x = t.positive(key);
      if (!(x < 1.0)) t.fail(t.child_path(key), "must lie in (0, 1)");
      return x;
    };
    if (t.has("threshold_fraction")) c.tolerances.threshold_fraction = fraction("threshold_fraction");
    if (t.has("fock_epsilon")) c.tolerances.fock_epsilon = fraction("fock_epsilon");
  }

  if (root.has("trap")) c.trap = detail::parse_trap(root.child("trap"), false);
  if (root.has("scenario")) {
    const auto s = root.child("scenario");
    s.reject_unknown({"initial", "final", "occupation"});
    s.require_keys({"initial", "final", "occupation"});
    c.scenario = ScenarioConfig{detail::parse_trap(s.child("initial"), false),
                                detail::parse_trap(s.child("final"), true),
                                detail::parse_occupation(s.child("occupation"))};
  }
  if (root.has("sweep")) {
    const auto w = root.child("sweep");
    w.reject_unknown({"parameter", "values", "ratios"});
    w.require_keys({"parameter", "values"});
    SweepConfig sweep;
    const auto p = w.text("parameter");
    if (p == "width_ratio") sweep.parameter = SweepParameter::width_ratio;
    else if (p == "mu_over_kT") sweep.parameter = SweepParameter::mu_over_kT;
    else if (p == "smoothness") sweep.parameter = SweepParameter::smoothness;
    else w.fail(w.child_path("parameter"), "unknown sweep parameter '" + p + "'");
    sweep.values = w.numbers("values", sweep.parameter != SweepParameter::smoothness);
    if (sweep.parameter == SweepParameter::smoothness)
      for (std::size_t i = 0; i < sweep.values.size(); ++i)
        if (sweep.values[i] < 0.0)
          w.fail(w.child_path("values") + "[" + std::to_string(i) + "]", "must be >= 0");
    if (sweep.parameter == SweepParameter::width_ratio)
      for (std::size_t i = 0; i < sweep.values.size(); ++i)
        if (sweep.values[i] > 1.0)
          w.fail(w.child_path("values") + "[" + std::to_string(i) + "]", "must lie in (0, 1]");
    if (sweep.parameter == SweepParameter::mu_over_kT) {
      w.require_keys({"ratios"});
      sweep.ratios = w.numbers("ratios", true);
    } else {
      w.forbid("ratios", "only used by mu_over_kT sweeps");
    }
    c.sweep = std::move(sweep);
  }

  // Which sections each command needs, and which it would silently ignore.
  auto need = [&](std::string_view key, bool wanted, const std::string& why) {
    if (wanted && !root.has(key)) root.fail("", "missing required key(s): " + std::string(key) + why);
    if (!wanted && root.has(key))
      root.fail(std::string(key), "not used by command '" + std::string(to_string(c.command)) + "'");
  };
  const bool smoothness_sweep = c.sweep && c.sweep->parameter == SweepParameter::smoothness;
  switch (c.command) {
    case Command::spectrum:
      need("trap", true, "");
      need("scenario", false, "");
      need("sweep", false, "");
      break;
    case Command::counting:
      need("scenario", true, "");
      need("trap", false, "");
      need("sweep", false, "");
      break;
    case Command::sweep:
      need("sweep", true, "");
      need("trap", smoothness_sweep, " (smoothness sweeps vary the trap's relative_smoothness)");
      need("scenario", !smoothness_sweep, "");
      break;
    case Command::figure:
      need("trap", false, "");
      need("scenario", false, "");
      need("sweep", false, "");
      break;
  }
  if (c.command == Command::figure) {
    if (root.has("figure")) {
      c.figure = root.text("figure");
      if (figure_hint && *figure_hint != *c.figure)
        root.fail("figure", "file says '" + *c.figure + "' but '" + *figure_hint + "' was requested");
    } else if (figure_hint) {
      c.figure = figure_hint;
    } else {
      root.fail("", "missing required key(s): figure");
    }
    bool known = false;
    for (auto f : kFigureNames) known |= *c.figure == f;
    if (!known) root.fail("figure", "unknown figure '" + *c.figure + "' (expected fig2..fig5)");
  } else {
    root.forbid("figure", "only used by command 'figure'");
  }
  if (c.scenario && std::holds_alternative<GroundOccupation>(c.scenario->occupation) && c.sweep &&
      c.sweep->parameter == SweepParameter::mu_over_kT)
    root.fail("scenario.occupation.type", "mu_over_kT sweeps need a thermal occupation");
  if (smoothness_sweep && c.trap->shape == TrapShape::inverted_gaussian)
    root.fail("trap.shape", "smoothness sweeps need a flat-bottomed trap");

  if (root.has("tag")) {
    c.tag = root.text("tag");
    if (c.tag.empty() || c.tag.find_first_of("/\\") != std::string::npos)
      root.fail("tag", "must be a non-empty file-name fragment");
  } else {
    c.tag = c.figure ? *c.figure : std::string(to_string(c.command));
  }
  return c;
}

/// Serializes a configuration with all defaults made explicit.
/// parse_config(emit_config(c)) == c.
inline nlohmann::json config_to_json(const RunConfig& c) {
  using detail::json;
  json j = json::object();
  j["command"] = std::string(to_string(c.command));
  if (c.figure) j["figure"] = *c.figure;
  j["tag"] = c.tag;
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  j["verbose"] = c.verbose;
  json g = {{"points_per_wavelength", c.grid.points_per_wavelength},
            {"points_per_smoothness", c.grid.points_per_smoothness},
            {"points_per_half_width", c.grid.points_per_half_width},
            {"margin_decay_lengths", c.grid.margin_decay_lengths},
            {"max_margin_half_widths", c.grid.max_margin_half_widths}};
  if (c.grid.n_points) g["n_points"] = *c.grid.n_points;
  j["grid"] = g;
  j["tolerances"] = {{"threshold_fraction", c.tolerances.threshold_fraction},
                     {"fock_epsilon", c.tolerances.fock_epsilon}};
  if (c.trap) j["trap"] = detail::emit_trap(*c.trap);
  if (c.scenario)
    j["scenario"] = {{"initial", detail::emit_trap(c.scenario->initial)},
                     {"final", detail::emit_trap(c.scenario->final)},
                     {"occupation", detail::emit_occupation(c.scenario->occupation)}};
  if (c.sweep) {
    json w = {{"parameter", std::string(to_string(c.sweep->parameter))}, {"values", c.sweep->values}};
    if (!c.sweep->ratios.empty()) w["ratios"] = c.sweep->ratios;
    j["sweep"] = w;
  }
  return j;
}

inline std::string emit_config(const RunConfig& c, int indent = 2) {
  return config_to_json(c).dump(indent);
}

// ---------------------------------------------------------------------------
// Config -> library objects.

inline GridPolicy grid_policy(const RunConfig& c) {
  GridPolicy p;
  p.n_points = c.grid.n_points;
  p.points_per_wavelength = c.grid.points_per_wavelength;
  p.points_per_smoothness = c.grid.points_per_smoothness;
  p.points_per_half_width = c.grid.points_per_half_width;
  p.margin_decay_lengths = c.grid.margin_decay_lengths;
  p.max_margin_half_widths = c.grid.max_margin_half_widths;
  return p;
}

inline SolveOptions solve_options(const RunConfig& c) {
  SolveOptions o;
  o.threshold_fraction = c.tolerances.threshold_fraction;
  return o;
}

/// Builds a trap; `parent` supplies the inherited fields of a final trap.
inline TrapSpec make_trap(const TrapConfig& t, const TrapSpec* parent = nullptr) {
  const TrapShape shape = t.shape ? *t.shape : parent->shape();
  const double relative = t.relative_smoothness ? *t.relative_smoothness
                          : parent             ? parent->relative_smoothness()
                                               : 0.0;
  const double half_width = t.half_width ? *t.half_width : *t.width_ratio * parent->half_width();
  if (t.u) return family_member(*t.u, relative, half_width, shape);
  return TrapSpec::make(shape, *t.depth, half_width, relative * half_width);
}

inline ReductionScenario make_scenario(const RunConfig& c) {
  const auto& s = *c.scenario;
  const TrapSpec initial = make_trap(s.initial);
  ReductionScenario r{initial, make_trap(s.final, &initial), s.occupation};
  r.grid_policy = grid_policy(c);
  r.solve = solve_options(c);
  r.fock_epsilon = c.tolerances.fock_epsilon;
  return r;
}

}  // namespace fockprep

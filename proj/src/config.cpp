#include "trajopt/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "trajopt/errors.hpp"

namespace trajopt {

namespace {

using nlohmann::json;

// Input iterator that publishes how far the parser has read, so SAX events
// can be tagged with a source line.
class TrackingIterator {
 public:
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  TrackingIterator() = default;
  TrackingIterator(const char* p, const char* base, std::size_t* offset) : p_(p), base_(base), offset_(offset) {}

  reference operator*() const { return *p_; }
  TrackingIterator& operator++() {
    ++p_;
    if (offset_ != nullptr) *offset_ = static_cast<std::size_t>(p_ - base_);
    return *this;
  }
  TrackingIterator operator++(int) {
    TrackingIterator tmp = *this;
    ++*this;
    return tmp;
  }
  bool operator==(const TrackingIterator& o) const { return p_ == o.p_; }
  bool operator!=(const TrackingIterator& o) const { return p_ != o.p_; }

 private:
  const char* p_ = nullptr;
  const char* base_ = nullptr;
  std::size_t* offset_ = nullptr;
};

// Records the source line of every value, keyed by JSON pointer.
class LineRecorder : public nlohmann::json_sax<json> {
 public:
  LineRecorder(std::string_view text, const std::size_t* offset) : text_(text), offset_(offset) {}

  std::map<std::string, std::size_t> lines;

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }
  bool start_object(std::size_t) override { return open(false); }
  bool end_object() override { return close(); }
  bool start_array(std::size_t) override { return open(true); }
  bool end_array() override { return close(); }
  bool key(string_t& k) override {
    stack_.back().key = k;
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override { return false; }

 private:
  struct Frame {
    bool is_array = false;
    std::size_t index = 0;
    std::string key;
    std::string path;
  };

  std::size_t current_line() const {
    const std::size_t end = std::min(*offset_, text_.size());
    std::size_t line = 1;
    // The lexer reads one character past a token; do not count that newline.
    for (std::size_t i = 0; i + 1 < end; ++i) line += text_[i] == '\n' ? 1 : 0;
    return line;
  }

  std::string child_path() {
    if (stack_.empty()) return "";
    Frame& f = stack_.back();
    if (f.is_array) return f.path + "/" + std::to_string(f.index++);
    return f.path + "/" + f.key;
  }

  bool value() {
    lines[child_path()] = current_line();
    return true;
  }
  bool open(bool is_array) {
    std::string path = child_path();
    lines[path] = current_line();
    stack_.push_back({is_array, 0, {}, std::move(path)});
    return true;
  }
  bool close() {
    stack_.pop_back();
    return true;
  }

  std::string_view text_;
  const std::size_t* offset_;
  std::vector<Frame> stack_;
};

class Reader {
 public:
  Reader(std::string_view source, std::map<std::string, std::size_t> lines)
      : source_(source), lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    std::size_t line = 0;
    for (std::string p = pointer;; p = p.substr(0, p.rfind('/'))) {
      if (auto it = lines_.find(p); it != lines_.end()) {
        line = it->second;
        break;
      }
      if (p.empty()) break;
    }
    std::ostringstream os;
    os << source_ << ":" << line << ": " << display(pointer) << ": " << message;
    throw ConfigError(line, os.str());
  }

  const json& require(const json& node, const std::string& pointer, const char* key, json::value_t type) const {
    if (!node.contains(key)) fail(pointer, std::string("missing required field '") + key + "'");
    const json& child = node.at(key);
    check_type(child, pointer + "/" + key, type);
    return child;
  }

  void check_type(const json& node, const std::string& pointer, json::value_t type) const {
    const bool ok = type == json::value_t::number_float ? node.is_number() : node.type() == type;
    if (!ok) fail(pointer, std::string("expected ") + type_name(type) + ", got " + node.type_name());
  }

  double number(const json& node, const std::string& pointer) const {
    check_type(node, pointer, json::value_t::number_float);
    const double v = node.get<double>();
    if (!std::isfinite(v)) fail(pointer, "must be finite");
    return v;
  }

  double optional_number(const json& parent, const std::string& pointer, const char* key, double fallback) const {
    if (!parent.contains(key)) return fallback;
    return number(parent.at(key), pointer + "/" + key);
  }

  std::size_t optional_count(const json& parent, const std::string& pointer, const char* key,
                             std::size_t fallback) const {
    if (!parent.contains(key)) return fallback;
    const json& v = parent.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(pointer + "/" + key, "must be a nonnegative integer");
    return v.get<std::size_t>();
  }

 private:
  static const char* type_name(json::value_t type) {
    switch (type) {
      case json::value_t::object:
        return "object";
      case json::value_t::array:
        return "array";
      case json::value_t::string:
        return "string";
      default:
        return "number";
    }
  }

  static std::string display(const std::string& pointer) {
    if (pointer.empty()) return "(root)";
    std::string out;
    std::size_t pos = 1;
    while (pos <= pointer.size()) {
      const std::size_t next = std::min(pointer.find('/', pos), pointer.size());
      const std::string token = pointer.substr(pos, next - pos);
      const bool index = !token.empty() && token.find_first_not_of("0123456789") == std::string::npos;
      if (index) {
        out += "[" + token + "]";
      } else {
        out += (out.empty() ? "" : ".") + token;
      }
      pos = next + 1;
    }
    return out;
  }

  std::string source_;
  std::map<std::string, std::size_t> lines_;
};

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) line += text[i] == '\n' ? 1 : 0;
  return line;
}

JointSpec read_joint(const Reader& r, const json& node, const std::string& ptr) {
  r.check_type(node, ptr, json::value_t::object);
  JointSpec js;

  const json& wp = r.require(node, ptr, "waypoints", json::value_t::array);
  if (wp.size() != 4) r.fail(ptr + "/waypoints", "expected exactly 4 waypoints, got " + std::to_string(wp.size()));
  js.waypoints = {r.number(wp[0], ptr + "/waypoints/0"), r.number(wp[1], ptr + "/waypoints/1"),
                  r.number(wp[2], ptr + "/waypoints/2"), r.number(wp[3], ptr + "/waypoints/3")};

  const json& lim = r.require(node, ptr, "limits", json::value_t::object);
  const std::string lp = ptr + "/limits";
  js.limits.v_max = r.number(r.require(lim, lp, "v_max", json::value_t::number_float), lp + "/v_max");
  js.limits.a_max = r.number(r.require(lim, lp, "a_max", json::value_t::number_float), lp + "/a_max");
  if (js.limits.v_max <= 0.0) r.fail(lp + "/v_max", "must be > 0");
  if (js.limits.a_max <= 0.0) r.fail(lp + "/a_max", "must be > 0");

  if (node.contains("boundary")) {
    const std::string bp = ptr + "/boundary";
    const json& bc = node.at("boundary");
    r.check_type(bc, bp, json::value_t::object);
    js.boundary.v_start = r.optional_number(bc, bp, "v0", 0.0);
    js.boundary.a_start = r.optional_number(bc, bp, "a0", 0.0);
    js.boundary.v_end = r.optional_number(bc, bp, "vf", 0.0);
    js.boundary.a_end = r.optional_number(bc, bp, "af", 0.0);
  }
  return js;
}

void read_swarm(const Reader& r, const json& node, SwarmConfig& s) {
  const std::string p = "/swarm";
  r.check_type(node, p, json::value_t::object);
  s.particles = r.optional_count(node, p, "m", s.particles);
  s.iterations = r.optional_count(node, p, "N", s.iterations);
  s.omega_max = r.optional_number(node, p, "omega_max", s.omega_max);
  s.omega_min = r.optional_number(node, p, "omega_min", s.omega_min);
  s.c11 = r.optional_number(node, p, "c11", s.c11);
  s.c21 = r.optional_number(node, p, "c21", s.c21);
  s.chaos.alpha = r.optional_number(node, p, "alpha", s.chaos.alpha);
  s.chaos.phi = r.optional_number(node, p, "phi", s.chaos.phi);
  s.chaos.mu = r.optional_number(node, p, "mu", s.chaos.mu);
  s.penalty_coefficient = r.optional_number(node, p, "penalty", s.penalty_coefficient);
  s.stagnation_window = r.optional_count(node, p, "stagnation_window", s.stagnation_window);
  s.v_clamp_fraction = r.optional_number(node, p, "v_clamp_fraction", s.v_clamp_fraction);
  if (node.contains("variant")) {
    const json& v = node.at("variant");
    r.check_type(v, p + "/variant", json::value_t::string);
    const std::string name = v.get<std::string>();
    if (name == "improved") {
      s.variant = PsoVariant::kImproved;
    } else if (name == "standard") {
      s.variant = PsoVariant::kStandard;
    } else {
      r.fail(p + "/variant", "expected \"improved\" or \"standard\"");
    }
  }

  if (s.particles < 2) r.fail(p + "/m", "population size must be >= 2");
  if (s.iterations < 2) r.fail(p + "/N", "iteration count must be >= 2");
  if (!(s.omega_min > 0.0 && s.omega_min < s.omega_max && s.omega_max < 1.0)) {
    r.fail(p + (node.contains("omega_min") ? "/omega_min" : "/omega_max"), "need 0 < omega_min < omega_max < 1");
  }
  if (!(s.chaos.alpha >= 0.0 && s.chaos.alpha < 1.0)) r.fail(p + "/alpha", "must lie in [0, 1)");
  if (!(s.chaos.phi > 0.0 && s.chaos.phi < 1.0)) r.fail(p + "/phi", "must lie in (0, 1)");
  if (!(s.chaos.mu > 0.0 && s.chaos.mu <= 4.0)) r.fail(p + "/mu", "must lie in (0, 4]");
  if (!(s.penalty_coefficient > 0.0)) r.fail(p + "/penalty", "must be > 0");
  if (s.stagnation_window < 1) r.fail(p + "/stagnation_window", "must be >= 1");
  if (!(s.v_clamp_fraction > 0.0 && s.v_clamp_fraction <= 1.0)) r.fail(p + "/v_clamp_fraction", "must lie in (0, 1]");
}

}  // namespace

ConfigError::ConfigError(std::size_t line, const std::string& message) : InvalidConfig(message), line_(line) {}

SyncMode parse_sync_mode(std::string_view text) {
  if (text == "shared") return SyncMode::kShared;
  if (text == "per-joint-max") return SyncMode::kPerJointMax;
  throw InvalidConfig("sync mode must be \"shared\" or \"per-joint-max\"");
}

std::string to_string(SyncMode mode) { return mode == SyncMode::kShared ? "shared" : "per-joint-max"; }

std::string to_string(PsoVariant variant) { return variant == PsoVariant::kImproved ? "improved" : "standard"; }

RunConfig parse_config(std::string_view text, std::string_view source_name) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t line = line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream os;
    os << source_name << ":" << line << ": malformed JSON: " << e.what();
    throw ConfigError(line, os.str());
  }

  std::size_t offset = 0;
  LineRecorder recorder(text, &offset);
  json::sax_parse(TrackingIterator(text.data(), text.data(), &offset),
                  TrackingIterator(text.data() + text.size(), text.data(), nullptr), &recorder);
  const Reader r(source_name, std::move(recorder.lines));

  r.check_type(root, "", json::value_t::object);
  RunConfig cfg;

  const json& joints = r.require(root, "", "joints", json::value_t::array);
  if (joints.empty()) r.fail("/joints", "at least one joint is required");
  for (std::size_t j = 0; j < joints.size(); ++j) {
    cfg.problem.joints.push_back(read_joint(r, joints[j], "/joints/" + std::to_string(j)));
  }

  if (root.contains("bounds")) {
    const json& b = root.at("bounds");
    r.check_type(b, "/bounds", json::value_t::object);
    const double lo = r.optional_number(b, "/bounds", "t_min", kDefaultTimeBounds[0].x_min);
    const double hi = r.optional_number(b, "/bounds", "t_max", kDefaultTimeBounds[0].x_max);
    if (lo < cfg.problem.time_floor) {
      r.fail("/bounds/t_min", "must be >= the segment time floor " + std::to_string(cfg.problem.time_floor));
    }
    if (!(lo < hi)) r.fail("/bounds", "need t_min < t_max");
    cfg.problem.bounds = {Bounds{lo, hi}, Bounds{lo, hi}, Bounds{lo, hi}};
  }

  if (root.contains("swarm")) read_swarm(r, root.at("swarm"), cfg.swarm);

  if (root.contains("sync_mode")) {
    const json& m = root.at("sync_mode");
    r.check_type(m, "/sync_mode", json::value_t::string);
    try {
      cfg.problem.sync_mode = parse_sync_mode(m.get<std::string>());
    } catch (const InvalidConfig& e) {
      r.fail("/sync_mode", e.what());
    }
  }

  if (root.contains("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      r.fail("/seed", "must be a nonnegative integer");
    }
    cfg.swarm.seed = s.get<std::uint64_t>();
  }

  try {
    cfg.problem.validate();
    cfg.swarm.validate();
  } catch (const Error& e) {
    r.fail("", e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, path.string() + ": cannot open config file");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text, path.string());
}

}  // namespace trajopt

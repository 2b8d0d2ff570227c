#include "gekf/config.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace gekf {

using json = nlohmann::json;

namespace {

int line_at(const std::string& text, size_t pos) {
  pos = std::min(pos, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

enum class Bound { any, nonneg, positive };

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  // Line of the key at `path`, found by searching for each quoted segment after its parent.
  int line_of(const std::vector<std::string>& path) const {
    size_t pos = 0;
    for (const auto& seg : path) {
      const size_t at = text_.find('"' + seg + '"', pos);
      if (at == std::string::npos) return 0;
      pos = at + seg.size() + 2;
    }
    return line_at(text_, pos);
  }

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& what) const {
    std::string dotted;
    for (const auto& s : path) dotted += (dotted.empty() ? "" : ".") + s;
    throw ConfigError(dotted + ": " + what, line_of(path));
  }

  double number(const json& v, const std::vector<std::string>& path, Bound b = Bound::any) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    if (b == Bound::nonneg && x < 0) fail(path, "must be >= 0");
    if (b == Bound::positive && !(x > 0)) fail(path, "must be positive");
    return x;
  }

  long integer(const json& v, const std::vector<std::string>& path, long min) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<long>::max()))
      fail(path, "out of range");
    const long x = v.get<long>();
    if (x < min) fail(path, "must be >= " + std::to_string(min));
    return x;
  }

  std::uint64_t unsigned_integer(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number_unsigned()) fail(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  template <int N>
  Eigen::Matrix<double, N, 1> vec(const json& v, const std::vector<std::string>& path, Bound b) const {
    if (!v.is_array() || v.size() != static_cast<size_t>(N))
      fail(path, "expected an array of " + std::to_string(N) + " numbers");
    Eigen::Matrix<double, N, 1> out;
    for (int i = 0; i < N; ++i) out(i) = number(v[static_cast<size_t>(i)], path, b);
    return out;
  }

  std::string string(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  // Visits every key of `obj`, rejecting those without a handler.
  void object(const json& obj, const std::vector<std::string>& path,
              const std::map<std::string, std::function<void(const json&, const std::vector<std::string>&)>>&
                  handlers) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
      auto p = path;
      p.push_back(key);
      const auto it = handlers.find(key);
      if (it == handlers.end()) fail(p, "unknown key");
      it->second(value, p);
    }
  }

 private:
  const std::string& text_;
};

using Path = std::vector<std::string>;

json trajectory_json(const ins::TrajectoryConfig& t) {
  auto arr = [](const auto& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
  };
  return {{"duration", t.duration},
          {"imu_rate", t.imu_rate},
          {"meas_rate", t.meas_rate},
          {"amplitude", arr(t.amplitude)},
          {"freq_ratio", arr(t.freq_ratio)},
          {"phase", arr(t.phase)},
          {"base_period", t.base_period},
          {"roll_amplitude", t.roll_amplitude},
          {"pitch_amplitude", t.pitch_amplitude},
          {"gravity", arr(t.gravity)},
          {"gyro_std", t.gyro_std},
          {"accel_std", t.accel_std},
          {"meas_std", arr(t.meas_std)},
          {"init_std", arr(t.init_std)}};
}

json config_json(const CliConfig& c) {
  const auto& b = c.bench;
  return {{"runs", b.runs},
          {"seed", b.seed},
          {"variants", b.variants},
          {"jacobian_mode", to_string(b.jacobian_mode)},
          {"max_iters", b.max_iters},
          {"iter_tol", b.iter_tol},
          {"transient_end", b.transient_end},
          {"threads", b.threads},
          {"output_dir", c.output_dir.string()},
          {"write_errors", c.write_errors},
          {"trajectory", trajectory_json(b.trajectory)}};
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

void CliConfig::validate() const {
  bench.validate();
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

CliConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), line_at(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  const Reader rd(text);
  CliConfig c;
  auto& b = c.bench;
  auto& t = b.trajectory;

  rd.object(doc, {},
            {{"runs", [&](const json& v, const Path& p) { b.runs = static_cast<int>(rd.integer(v, p, 1)); }},
             {"seed", [&](const json& v, const Path& p) { b.seed = rd.unsigned_integer(v, p); }},
             {"variants",
              [&](const json& v, const Path& p) {
                if (!v.is_array() || v.empty()) rd.fail(p, "expected a non-empty array of variant names");
                b.variants.clear();
                for (const auto& e : v) {
                  const auto name = rd.string(e, p);
                  try {
                    variant_from_name(name);
                  } catch (const Error& err) {
                    rd.fail(p, err.what());
                  }
                  if (std::find(b.variants.begin(), b.variants.end(), name) != b.variants.end())
                    rd.fail(p, "variant '" + name + "' listed twice");
                  b.variants.push_back(name);
                }
              }},
             {"jacobian_mode",
              [&](const json& v, const Path& p) {
                try {
                  b.jacobian_mode = parse_jacobian_mode(rd.string(v, p));
                } catch (const ConfigError& err) {
                  if (err.line() > 0) throw;
                  rd.fail(p, err.what());
                }
              }},
             {"max_iters", [&](const json& v, const Path& p) { b.max_iters = static_cast<int>(rd.integer(v, p, 1)); }},
             {"iter_tol", [&](const json& v, const Path& p) { b.iter_tol = rd.number(v, p, Bound::positive); }},
             {"transient_end",
              [&](const json& v, const Path& p) { b.transient_end = rd.number(v, p, Bound::positive); }},
             {"threads", [&](const json& v, const Path& p) { b.threads = static_cast<int>(rd.integer(v, p, 0)); }},
             {"output_dir",
              [&](const json& v, const Path& p) {
                c.output_dir = rd.string(v, p);
                if (c.output_dir.empty()) rd.fail(p, "must not be empty");
              }},
             {"write_errors",
              [&](const json& v, const Path& p) {
                if (!v.is_boolean()) rd.fail(p, "expected true or false");
                c.write_errors = v.get<bool>();
              }},
             {"trajectory", [&](const json& v, const Path& p) {
                auto num = [&](double& dst, Bound bound) {
                  return [&dst, &rd, bound](const json& x, const Path& q) { dst = rd.number(x, q, bound); };
                };
                rd.object(
                    v, p,
                    {{"duration", num(t.duration, Bound::positive)},
                     {"imu_rate", num(t.imu_rate, Bound::positive)},
                     {"meas_rate", num(t.meas_rate, Bound::positive)},
                     {"amplitude", [&](const json& x, const Path& q) { t.amplitude = rd.vec<3>(x, q, Bound::any); }},
                     {"freq_ratio", [&](const json& x, const Path& q) { t.freq_ratio = rd.vec<3>(x, q, Bound::any); }},
                     {"phase", [&](const json& x, const Path& q) { t.phase = rd.vec<3>(x, q, Bound::any); }},
                     {"base_period", num(t.base_period, Bound::positive)},
                     {"roll_amplitude", num(t.roll_amplitude, Bound::any)},
                     {"pitch_amplitude", num(t.pitch_amplitude, Bound::any)},
                     {"gravity", [&](const json& x, const Path& q) { t.gravity = rd.vec<3>(x, q, Bound::any); }},
                     {"gyro_std", num(t.gyro_std, Bound::nonneg)},
                     {"accel_std", num(t.accel_std, Bound::nonneg)},
                     {"meas_std", [&](const json& x, const Path& q) { t.meas_std = rd.vec<6>(x, q, Bound::nonneg); }},
                     {"init_std",
                      [&](const json& x, const Path& q) { t.init_std = rd.vec<9>(x, q, Bound::nonneg); }}});
              }}});
  try {
    c.validate();
  } catch (const ConfigError& e) {
    // Cross-field checks (e.g. the rate ratio) anchor to the trajectory block when present.
    if (e.line() > 0) throw;
    throw ConfigError(e.what(), rd.line_of({"trajectory"}));
  }
  return c;
}

CliConfig load_config(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw ConfigError("cannot read config file " + file.string());
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

std::string to_json(const CliConfig& c) { return config_json(c).dump(2) + "\n"; }

std::string config_hash(const CliConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config_json(c).dump())));
  return buf;
}

std::string manifest_json(const CliConfig& c) {
  const json m = {{"tool", "gekf"},
                  {"version", GEKF_VERSION},
                  {"seed", c.bench.seed},
                  {"config_hash", config_hash(c)},
                  {"config", config_json(c)}};
  return m.dump(2) + "\n";
}

}  // namespace gekf

#include "clutter/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "clutter/io.hpp"

namespace clutter {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument("config: " + what);
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) fail(where + " must be an object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      fail("unknown key \"" + item.key() + "\" in " + where);
}

double get_num(const json& obj, const char* key, double def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_number()) fail(std::string(key) + " must be a number");
  return obj[key].get<double>();
}

int get_int(const json& obj, const char* key, int def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_number_integer())
    fail(std::string(key) + " must be an integer");
  return obj[key].get<int>();
}

bool get_bool(const json& obj, const char* key, bool def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_boolean()) fail(std::string(key) + " must be a boolean");
  return obj[key].get<bool>();
}

RadarConfig parse_radar(const json& j) {
  check_keys(j,
             {"prf_hz", "carrier_hz", "bandwidth_hz", "pulse_s",
              "sample_rate_hz", "n_tx", "n_rx", "max_range_m"},
             "radar");
  RadarConfig r;
  r.prf_hz = get_num(j, "prf_hz", r.prf_hz);
  r.carrier_hz = get_num(j, "carrier_hz", r.carrier_hz);
  r.bandwidth_hz = get_num(j, "bandwidth_hz", r.bandwidth_hz);
  r.pulse_s = get_num(j, "pulse_s", r.pulse_s);
  r.sample_rate_hz = get_num(j, "sample_rate_hz", r.sample_rate_hz);
  r.n_tx = get_int(j, "n_tx", r.n_tx);
  r.n_rx = get_int(j, "n_rx", r.n_rx);
  r.max_range_m = get_num(j, "max_range_m", r.max_range_m);
  return r;
}

std::vector<Scatterer> parse_scatterers(const json& arr) {
  if (!arr.is_array()) fail("scenario.scatterers must be an array");
  std::vector<Scatterer> out;
  out.reserve(arr.size());
  for (const auto& e : arr) {
    check_keys(e, {"theta", "range", "amplitude"}, "scatterer");
    Scatterer s;
    if (!e.contains("theta") || !e.contains("range"))
      fail("scatterer needs theta and range");
    s.theta = e["theta"].get<double>();
    s.range = e["range"].get<double>();
    if (e.contains("amplitude")) {
      const auto& a = e["amplitude"];
      if (a.is_number())
        s.amplitude = a.get<double>();
      else if (a.is_array() && a.size() == 2)
        s.amplitude = Complex(a[0].get<double>(), a[1].get<double>());
      else
        fail("scatterer amplitude must be a number or [re, im]");
    }
    out.push_back(s);
  }
  return out;
}

SweepConfig parse_sweep(const json& j) {
  check_keys(j, {"counts", "snr_db", "n_frames", "sample_rate_hz"},
             "scenario.sweep");
  SweepConfig s;
  if (j.contains("counts")) {
    if (!j["counts"].is_array()) fail("sweep.counts must be an array");
    s.counts.clear();
    for (const auto& c : j["counts"]) s.counts.push_back(c.get<int>());
  }
  if (j.contains("snr_db")) {
    if (!j["snr_db"].is_array()) fail("sweep.snr_db must be an array");
    s.snr_db.clear();
    for (const auto& c : j["snr_db"]) s.snr_db.push_back(c.get<double>());
  }
  s.n_frames = get_int(j, "n_frames", s.n_frames);
  s.sample_rate_hz = get_num(j, "sample_rate_hz", s.sample_rate_hz);
  return s;
}

json scatterers_json(const std::vector<Scatterer>& list) {
  json arr = json::array();
  for (const auto& s : list)
    arr.push_back({{"theta", s.theta},
                   {"range", s.range},
                   {"amplitude",
                    json::array({s.amplitude.real(), s.amplitude.imag()})}});
  return arr;
}

}  // namespace

std::vector<Scatterer> default_scene_layout() {
  std::vector<Scatterer> out;
  // Fence: posts around a rectangular perimeter, back at 35 m, front at
  // 25 m, sides at +-0.6 rad.
  for (int i = 0; i <= 12; ++i)
    out.push_back({-0.6 + 0.1 * i, 35.0, 1.0});
  for (double r : {27.0, 29.0, 31.0, 33.0}) {
    out.push_back({-0.6, r, 1.0});
    out.push_back({0.6, r, 1.0});
  }
  for (int i = 1; i <= 11; ++i)
    out.push_back({-0.6 + 0.1 * i, 25.0, 1.0});
  // Roof: a gable inside the fence, apex nearest the radar.
  for (int i = 0; i <= 10; ++i) {
    const double theta = -0.35 + 0.07 * i;
    out.push_back({theta, 28.0 + 10.0 * std::abs(theta), 1.0});
  }
  return out;
}

BasisConfig ExperimentConfig::basis_config() const {
  BasisConfig c;
  c.n_angle = n_angle;
  c.n_range = n_range;
  c.theta_lo = theta_lo;
  c.theta_hi = theta_hi;
  c.range_lo = 0.0;
  c.range_hi = radar.max_range_m;
  return c;
}

BasisConfig ExperimentConfig::reference_basis_config() const {
  BasisConfig c = basis_config();
  c.n_angle = b.reference_n_angle;
  c.n_range = b.reference_n_range;
  return c;
}

BasisConfig ExperimentConfig::count_basis_config(int count) const {
  BasisConfig c = basis_config();
  c.n_angle = count;
  c.n_range = count;
  return c;
}

ArrayGeometry ExperimentConfig::geometry() const {
  return ArrayGeometry::mimo_ula(radar.n_rx, radar.n_tx);
}

ChirpTiming ExperimentConfig::timing() const {
  ChirpTiming t;
  t.carrier_hz = radar.carrier_hz;
  t.bandwidth_hz = radar.bandwidth_hz;
  t.pulse_s = radar.pulse_s;
  t.sample_rate_hz = radar.sample_rate_hz;
  t.prf_hz = radar.prf_hz;
  return t;
}

ChirpTiming ExperimentConfig::sweep_timing() const {
  ChirpTiming t = timing();
  t.sample_rate_hz = b.sweep.sample_rate_hz;
  return t;
}

void ExperimentConfig::validate() const {
  if (radar.n_tx < 1 || radar.n_rx < 1) fail("radar.n_tx/n_rx must be >= 1");
  if (radar.max_range_m <= 0) fail("radar.max_range_m must be > 0");
  timing().validate(radar.n_tx);  // covers TDM feasibility
  basis_config().validate();
  if (inference.n_frames < 1) fail("inference.n_frames must be >= 1");
  if (inference.iterations < 0) fail("inference.iterations must be >= 0");
  if (!(inference.pinv_tolerance > 0))
    fail("inference.pinv_tolerance must be > 0");
  if (seeds.replicates < 1) fail("seeds.replicates must be >= 1");
  if (!noise.use_snr && !(noise.noise_precision > 0))
    fail("noise.noise_precision must be > 0");

  if (kind == ScenarioKind::A) {
    if (a.alpha < 0.0 || a.alpha > kAlphaMax)
      fail("scenario.alpha must lie in [0, 1)");
    if (!(a.mu_scale > 0)) fail("scenario.mu_scale must be > 0");
    if (!(a.lambda_log_min > 0) || a.lambda_log_max < a.lambda_log_min)
      fail("scenario lambda bounds must satisfy 0 < min <= max");
    return;
  }

  if (b.alpha < 0.0 || b.alpha > kAlphaMax)
    fail("scenario.alpha must lie in [0, 1)");
  if (!(b.lambda > 0)) fail("scenario.lambda must be > 0");
  if (b.reference_n_angle < n_angle || b.reference_n_range < n_range)
    fail("scenario.reference basis must contain the working basis");
  if (b.map_n_theta < 2 || b.map_n_range < 2)
    fail("scenario.map grid needs at least 2 points per axis");
  if (b.snr_list_db.empty()) fail("scenario.snr_list_db must not be empty");
  if (b.sweep.counts.empty()) fail("scenario.sweep.counts must not be empty");
  for (int c : b.sweep.counts)
    if (c < 1 || c > b.reference_n_angle || c > b.reference_n_range)
      fail("scenario.sweep.counts must lie in [1, reference size]");
  if (b.sweep.n_frames < 1) fail("scenario.sweep.n_frames must be >= 1");
  if (b.sweep.snr_db.empty()) fail("scenario.sweep.snr_db must not be empty");
  sweep_timing().validate(radar.n_tx);
  const BasisConfig ref = reference_basis_config();
  const auto list = b.scatterers.empty() ? default_scene_layout() : b.scatterers;
  for (std::size_t i = 0; i < list.size(); ++i)
    if (list[i].theta < ref.theta_lo || list[i].theta > ref.theta_hi ||
        list[i].range < ref.range_lo || list[i].range > ref.range_hi)
      fail("scatterer " + std::to_string(i) + " lies outside the domain");
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("parse error: ") + e.what());
  }
  check_keys(j,
             {"radar", "basis", "scenario", "inference", "noise", "seeds",
              "outputs", "config_hash"},
             "top level");
  ExperimentConfig cfg;
  if (j.contains("radar")) cfg.radar = parse_radar(j["radar"]);

  if (j.contains("basis")) {
    const auto& jb = j["basis"];
    check_keys(jb, {"n_angle", "n_range", "theta_lo", "theta_hi"}, "basis");
    cfg.n_angle = get_int(jb, "n_angle", cfg.n_angle);
    cfg.n_range = get_int(jb, "n_range", cfg.n_range);
    cfg.theta_lo = get_num(jb, "theta_lo", cfg.theta_lo);
    cfg.theta_hi = get_num(jb, "theta_hi", cfg.theta_hi);
  }

  if (!j.contains("scenario")) fail("missing scenario block");
  const auto& js = j["scenario"];
  if (!js.is_object() || !js.contains("kind") || !js["kind"].is_string())
    fail("scenario.kind must be \"A\" or \"B\"");
  const std::string kind = js["kind"].get<std::string>();
  if (kind == "A") {
    cfg.kind = ScenarioKind::A;
    check_keys(js,
               {"kind", "alpha", "mu_scale", "lambda_log_min",
                "lambda_log_max"},
               "scenario");
    cfg.a.alpha = get_num(js, "alpha", cfg.a.alpha);
    cfg.a.mu_scale = get_num(js, "mu_scale", cfg.a.mu_scale);
    cfg.a.lambda_log_min = get_num(js, "lambda_log_min", cfg.a.lambda_log_min);
    cfg.a.lambda_log_max = get_num(js, "lambda_log_max", cfg.a.lambda_log_max);
  } else if (kind == "B") {
    cfg.kind = ScenarioKind::B;
    check_keys(js,
               {"kind", "alpha", "lambda", "scatterers", "reference_n_angle",
                "reference_n_range", "map_n_theta", "map_n_range",
                "snr_list_db", "sweep"},
               "scenario");
    cfg.b.alpha = get_num(js, "alpha", cfg.b.alpha);
    cfg.b.lambda = get_num(js, "lambda", cfg.b.lambda);
    if (js.contains("scatterers"))
      cfg.b.scatterers = parse_scatterers(js["scatterers"]);
    cfg.b.reference_n_angle =
        get_int(js, "reference_n_angle", cfg.b.reference_n_angle);
    cfg.b.reference_n_range =
        get_int(js, "reference_n_range", cfg.b.reference_n_range);
    cfg.b.map_n_theta = get_int(js, "map_n_theta", cfg.b.map_n_theta);
    cfg.b.map_n_range = get_int(js, "map_n_range", cfg.b.map_n_range);
    if (js.contains("snr_list_db")) {
      if (!js["snr_list_db"].is_array())
        fail("scenario.snr_list_db must be an array");
      cfg.b.snr_list_db.clear();
      for (const auto& v : js["snr_list_db"])
        cfg.b.snr_list_db.push_back(v.get<double>());
    }
    if (js.contains("sweep")) cfg.b.sweep = parse_sweep(js["sweep"]);
  } else {
    fail("scenario.kind must be \"A\" or \"B\"");
  }
  if (cfg.kind == ScenarioKind::B && cfg.b.scatterers.empty())
    cfg.b.scatterers = default_scene_layout();

  if (j.contains("inference")) {
    const auto& ji = j["inference"];
    check_keys(ji, {"n_frames", "iterations", "update_alpha", "pinv_tolerance"},
               "inference");
    cfg.inference.n_frames = get_int(ji, "n_frames", cfg.inference.n_frames);
    cfg.inference.iterations =
        get_int(ji, "iterations", cfg.inference.iterations);
    cfg.inference.update_alpha =
        get_bool(ji, "update_alpha", cfg.inference.update_alpha);
    cfg.inference.pinv_tolerance =
        get_num(ji, "pinv_tolerance", cfg.inference.pinv_tolerance);
  }

  if (j.contains("noise")) {
    const auto& jn = j["noise"];
    check_keys(jn, {"snr_db", "noise_precision"}, "noise");
    if (jn.contains("snr_db") && jn.contains("noise_precision"))
      fail("noise: give either snr_db or noise_precision, not both");
    if (jn.contains("noise_precision")) {
      cfg.noise.use_snr = false;
      cfg.noise.noise_precision = get_num(jn, "noise_precision", 1.0);
    } else {
      cfg.noise.use_snr = true;
      cfg.noise.snr_db = get_num(jn, "snr_db", cfg.noise.snr_db);
    }
  }

  if (j.contains("seeds")) {
    const auto& jr = j["seeds"];
    check_keys(jr, {"root", "replicates"}, "seeds");
    if (jr.contains("root")) {
      if (!jr["root"].is_number_integer())
        fail("seeds.root must be an integer");
      cfg.seeds.root = jr["root"].get<std::uint64_t>();
    }
    cfg.seeds.replicates = get_int(jr, "replicates", cfg.seeds.replicates);
  }

  if (j.contains("outputs")) {
    const auto& jo = j["outputs"];
    check_keys(jo, {"directory", "binary", "csv"}, "outputs");
    if (jo.contains("directory")) {
      if (!jo["directory"].is_string())
        fail("outputs.directory must be a string");
      cfg.outputs.directory = jo["directory"].get<std::string>();
    }
    cfg.outputs.binary = get_bool(jo, "binary", cfg.outputs.binary);
    cfg.outputs.csv = get_bool(jo, "csv", cfg.outputs.csv);
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string resolved_json(const ExperimentConfig& cfg) {
  json j;
  j["radar"] = {{"prf_hz", cfg.radar.prf_hz},
                {"carrier_hz", cfg.radar.carrier_hz},
                {"bandwidth_hz", cfg.radar.bandwidth_hz},
                {"pulse_s", cfg.radar.pulse_s},
                {"sample_rate_hz", cfg.radar.sample_rate_hz},
                {"n_tx", cfg.radar.n_tx},
                {"n_rx", cfg.radar.n_rx},
                {"max_range_m", cfg.radar.max_range_m}};
  j["basis"] = {{"n_angle", cfg.n_angle},
                {"n_range", cfg.n_range},
                {"theta_lo", cfg.theta_lo},
                {"theta_hi", cfg.theta_hi}};
  if (cfg.kind == ScenarioKind::A) {
    j["scenario"] = {{"kind", "A"},
                     {"alpha", cfg.a.alpha},
                     {"mu_scale", cfg.a.mu_scale},
                     {"lambda_log_min", cfg.a.lambda_log_min},
                     {"lambda_log_max", cfg.a.lambda_log_max}};
  } else {
    j["scenario"] = {{"kind", "B"},
                     {"alpha", cfg.b.alpha},
                     {"lambda", cfg.b.lambda},
                     {"scatterers", scatterers_json(cfg.b.scatterers)},
                     {"reference_n_angle", cfg.b.reference_n_angle},
                     {"reference_n_range", cfg.b.reference_n_range},
                     {"map_n_theta", cfg.b.map_n_theta},
                     {"map_n_range", cfg.b.map_n_range},
                     {"snr_list_db", cfg.b.snr_list_db},
                     {"sweep",
                      {{"counts", cfg.b.sweep.counts},
                       {"snr_db", cfg.b.sweep.snr_db},
                       {"n_frames", cfg.b.sweep.n_frames},
                       {"sample_rate_hz", cfg.b.sweep.sample_rate_hz}}}};
  }
  j["inference"] = {{"n_frames", cfg.inference.n_frames},
                    {"iterations", cfg.inference.iterations},
                    {"update_alpha", cfg.inference.update_alpha},
                    {"pinv_tolerance", cfg.inference.pinv_tolerance}};
  if (cfg.noise.use_snr)
    j["noise"] = {{"snr_db", cfg.noise.snr_db}};
  else
    j["noise"] = {{"noise_precision", cfg.noise.noise_precision}};
  j["seeds"] = {{"root", cfg.seeds.root},
                {"replicates", cfg.seeds.replicates}};
  j["outputs"] = {{"directory", cfg.outputs.directory},
                  {"binary", cfg.outputs.binary},
                  {"csv", cfg.outputs.csv}};
  return j.dump(2) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  return fnv1a64(resolved_json(cfg));
}

void write_resolved_config(const ExperimentConfig& cfg,
                           const std::filesystem::path& path) {
  json j = json::parse(resolved_json(cfg));
  j["config_hash"] = hash_hex(config_hash(cfg));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace clutter

#include "hyperpol/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "hyperpol/errors.hpp"
#include "hyperpol/units.hpp"

namespace hyperpol::config {

using nlohmann::json;

std::vector<double> Grid::values() const {
  std::vector<double> out;
  out.reserve(points);
  if (points == 1) {
    out.push_back(min);
    return out;
  }
  for (std::size_t i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(points - 1);
    if (i + 1 == points) {
      out.push_back(max);
    } else if (log) {
      out.push_back(min * std::pow(max / min, f));
    } else {
      out.push_back(min + (max - min) * f);
    }
  }
  return out;
}

namespace {

/// Walks one JSON object, records which keys were consumed, and rejects the
/// rest on finish().
class Reader {
 public:
  Reader(const json* obj, std::string path, std::set<std::string>* seen)
      : obj_(obj), path_(std::move(path)), seen_(seen) {
    if (obj_ && !obj_->is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* find(const std::string& key) {
    if (!obj_) return nullptr;
    consumed_.insert(key);
    auto it = obj_->find(key);
    if (it == obj_->end() || it->is_null()) return nullptr;
    seen_->insert(key_path(key));
    return &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(key_path(key), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(key_path(key), "must be finite");
    return x;
  }

  std::optional<double> optional_number(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw ConfigError(key_path(key), "expected a number");
    return v->get<double>();
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
      throw ConfigError(key_path(key), "expected a non-negative integer");
    }
    return v->get<std::size_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(key_path(key), "expected true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(key_path(key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_array()) throw ConfigError(key_path(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number()) throw ConfigError(key_path(key), "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  Reader child(const std::string& key) {
    const json* v = find(key);
    return Reader(v, key_path(key), seen_);
  }

  void finish() const {
    if (!obj_) return;
    for (const auto& [k, _] : obj_->items()) {
      if (!consumed_.contains(k)) throw ConfigError(key_path(k), "unknown key");
    }
  }

 private:
  const json* obj_;
  std::string path_;
  std::set<std::string>* seen_;
  std::set<std::string> consumed_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

Grid read_grid(Reader& parent, const std::string& key, const Grid& fallback, double scale) {
  Reader r = parent.child(key);
  Grid g;
  g.min = r.number("min", fallback.min / scale) * scale;
  g.max = r.number("max", fallback.max / scale) * scale;
  g.points = r.count("points", fallback.points);
  g.log = r.boolean("log", fallback.log);
  r.finish();
  const std::string path = parent.key_path(key);
  require(g.points >= 1, path + ".points", "must be >= 1");
  require(g.max >= g.min, path, "max must be >= min");
  if (g.log) require(g.min > 0.0, path + ".min", "must be > 0 for a log grid");
  return g;
}

json grid_json(const Grid& g, double scale) {
  return {{"min", g.min / scale}, {"max", g.max / scale}, {"points", g.points}, {"log", g.log}};
}

std::array<double, 2> read_pair(Reader& r, const std::string& key, std::array<double, 2> fallback) {
  const auto v = r.numbers(key, {fallback[0], fallback[1]});
  require(v.size() == 2, r.key_path(key), "expected [lo, hi]");
  return {v[0], v[1]};
}

double rabi_default() { return angular_from_hz(8.0 * std::numbers::sqrt2 * 1e6); }

}  // namespace

RunConfig RunConfig::defaults() { return parse_config(json::object()); }

buildup::PolarizerModel RunConfig::polarizer() const {
  return {nv, drive, sample.field_tesla, geometry, window, proton(), carbon(), quadrature_nodes};
}

pair::PairHamiltonianSpec RunConfig::pair_spec() const {
  return {sample.g_hz, sample.gamma_c, sample.gamma_h, sample.field_tesla};
}

transfer::NuclearSpecies RunConfig::proton() const {
  return {transfer::Species::H1, sample.gamma_h};
}

transfer::NuclearSpecies RunConfig::carbon() const {
  return {transfer::Species::C13, sample.gamma_c};
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
  std::set<std::string> seen;
  Reader root(&doc, "", &seen);
  RunConfig cfg;

  {
    Reader r = root.child("sample");
    auto& s = cfg.sample;
    s.g_hz = r.number("g", 220.0);
    require(s.g_hz > 0.0, "sample.g", "scalar coupling must be > 0");
    s.gamma_c = angular_from_hz(r.number("gamma_c_hz_per_t", constants::kGammaCarbon13HzPerT));
    s.gamma_h = angular_from_hz(r.number("gamma_h_hz_per_t", constants::kGammaProtonHzPerT));
    require(s.gamma_c > 0.0, "sample.gamma_c_hz_per_t", "must be > 0");
    require(s.gamma_h > s.gamma_c, "sample.gamma_h_hz_per_t", "must exceed gamma_c");
    s.mixture_ratio = r.number("mixture_ratio", 10.0);
    require(s.mixture_ratio > 0.0, "sample.mixture_ratio", "must be > 0");
    s.field_tesla = r.number("field_t", 0.36);
    require(s.field_tesla > 0.0, "sample.field_t", "must be > 0");
    r.finish();
  }

  {
    Reader r = root.child("nv");
    const auto d = nv::NvEnsembleSpec::defaults();
    auto& n = cfg.nv;
    n.zfs_d = angular_from_hz(r.number("zfs_hz", hz_from_angular(d.zfs_d)));
    require(n.zfs_d > 0.0, "nv.zfs_hz", "must be > 0");
    n.strain_e = angular_from_hz(r.number("strain_hz", hz_from_angular(d.strain_e)));
    require(n.strain_e >= 0.0, "nv.strain_hz", "must be >= 0");
    n.gamma_e = angular_from_hz(r.number("gamma_e_hz_per_t", hz_from_angular(d.gamma_e)));
    require(n.gamma_e > 0.0, "nv.gamma_e_hz_per_t", "must be > 0");
    n.pe0 = r.number("pe0", d.pe0);
    require(n.pe0 >= 0.0 && n.pe0 <= 1.0, "nv.pe0", "must lie in [0, 1]");
    const auto band = read_pair(r, "pumping_band_deg",
                                {rad_to_deg(d.pumping_band.lo), rad_to_deg(d.pumping_band.hi)});
    require(band[0] >= 0.0 && band[0] <= band[1] && band[1] <= 180.0, "nv.pumping_band_deg",
            "must satisfy 0 <= lo <= hi <= 180");
    n.pumping_band = {deg_to_rad(band[0]), deg_to_rad(band[1])};

    Reader w = r.child("window");
    const std::string type = w.text("type", "detuning");
    if (type == "detuning") {
      const double thr = w.number("threshold_hz", 10e6);
      require(thr > 0.0, "nv.window.threshold_hz", "must be > 0");
      cfg.window = nv::DetuningThreshold{angular_from_hz(thr)};
    } else if (type == "band") {
      const auto b = read_pair(w, "theta_deg", {80.0, 100.0});
      require(b[0] >= 0.0 && b[0] < b[1] && b[1] <= 180.0, "nv.window.theta_deg",
              "must satisfy 0 <= lo < hi <= 180");
      cfg.window = nv::ThetaBand{{deg_to_rad(b[0]), deg_to_rad(b[1])}};
    } else {
      throw ConfigError("nv.window.type", "expected \"detuning\" or \"band\"");
    }
    w.finish();

    cfg.quadrature_nodes = r.count("quadrature_nodes", nv::kDefaultQuadratureNodes);
    require(cfg.quadrature_nodes >= 1, "nv.quadrature_nodes", "must be >= 1");
    r.finish();
  }

  {
    Reader r = root.child("drive");
    const double rabi = angular_from_hz(r.number("rabi_hz", hz_from_angular(rabi_default())));
    const double det = angular_from_hz(r.number("detuning_hz", hz_from_angular(rabi_default())));
    require(rabi > 0.0, "drive.rabi_hz", "must be > 0");
    require(det >= 0.0, "drive.detuning_hz", "must be >= 0");
    cfg.drive = transfer::DriveSpec(rabi, det);
    r.finish();
  }

  {
    Reader r = root.child("geometry");
    auto g = buildup::FlowGeometry::defaults();
    const std::pair<const char*, double*> fields[] = {
        {"channel_diameter_m", &g.channel_diameter},
        {"gel_length_m", &g.gel_length},
        {"nd_diameter_m", &g.nd_diameter},
        {"nd_volume_fraction", &g.nd_volume_fraction},
        {"pair_density_per_m3", &g.pair_density},
        {"flow_rate_m_per_s", &g.flow_rate},
        {"residence_time_s", &g.residence_time}};
    for (const auto& [key, slot] : fields) {
      *slot = r.number(key, *slot);
      require(*slot > 0.0, std::string("geometry.") + key, "must be > 0");
    }
    require(g.nd_volume_fraction < 0.74, "geometry.nd_volume_fraction",
            "must be below the close-packing bound 0.74");
    const auto yield = r.optional_number("nv_yield_per_nd");
    g.nv_yield_per_nd = yield ? *yield : buildup::nv_yield_for_ratio(buildup::kReferenceNvRatio, g);
    require(g.nv_yield_per_nd > 0.0 && std::isfinite(g.nv_yield_per_nd),
            "geometry.nv_yield_per_nd", "must be > 0");
    cfg.geometry = g;
    r.finish();
  }

  {
    Reader r = root.child("ramp");
    auto& p = cfg.ramp;
    p.b_high = r.number("b_high_t", 0.36);
    p.b_low = r.number("b_low_t", 1e-6);
    p.t2 = r.number("t2_s", 0.3);
    require(p.b_low > 0.0, "ramp.b_low_t", "must be > 0");
    require(p.b_high > p.b_low, "ramp.b_high_t", "must exceed b_low_t");
    require(p.t2 > 0.0, "ramp.t2_s", "must be > 0");
    try {
      p.shape = pair::parse_ramp_shape(r.text("shape", "linear"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("ramp.shape", e.what());
    }
    cfg.start_field_factor = r.number("start_field_factor", 100.0);
    require(cfg.start_field_factor > 0.0, "ramp.start_field_factor", "must be > 0");
    r.finish();
  }

  {
    Reader r = root.child("calibration");
    auto& c = cfg.calibration;
    c.c0_rate = r.optional_number("c0_rate_per_s");
    if (c.c0_rate) require(*c.c0_rate >= 0.0, "calibration.c0_rate_per_s", "must be >= 0");
    c.tau_c = r.number("tau_c_s", 15e-9);
    require(c.tau_c > 0.0, "calibration.tau_c_s", "must be > 0");
    c.target_p_h = r.number("target_p_h", 0.006);
    require(std::abs(c.target_p_h) < 1.0, "calibration.target_p_h", "must satisfy |p| < 1");
    c.target_nv_ratio = r.number("target_nv_ratio", buildup::kReferenceNvRatio);
    require(c.target_nv_ratio > 0.0, "calibration.target_nv_ratio", "must be > 0");
    r.finish();
  }

  {
    Reader r = root.child("sweeps");
    auto& s = cfg.sweeps;
    const Sweeps d;
    s.tau_c = read_grid(r, "tau_c_s", d.tau_c, 1.0);
    s.contour_tau_c = read_grid(r, "contour_tau_c_s", d.contour_tau_c, 1.0);
    s.contour_detuning = read_grid(r, "contour_detuning_hz", d.contour_detuning, kTwoPi);
    require(!s.contour_detuning.log, "sweeps.contour_detuning_hz.log",
            "detuning grid must be linear");
    require(cfg.drive.detuning() + s.contour_detuning.min >= 0.0,
            "sweeps.contour_detuning_hz.min", "eps0 + Delta' must stay >= 0");
    s.omega = read_grid(r, "omega_hz", d.omega, kTwoPi);
    s.spectral_tau_c = r.numbers("spectral_tau_c_s", d.spectral_tau_c);
    require(!s.spectral_tau_c.empty(), "sweeps.spectral_tau_c_s", "must not be empty");
    for (double t : s.spectral_tau_c) require(t > 0.0, "sweeps.spectral_tau_c_s", "must be > 0");
    s.field = read_grid(r, "field_t", d.field, 1.0);
    require(s.field.min > 0.0, "sweeps.field_t.min", "must be > 0");
    s.t2 = r.numbers("t2_s", d.t2);
    require(!s.t2.empty(), "sweeps.t2_s", "must not be empty");
    for (double t : s.t2) require(t >= 0.0, "sweeps.t2_s", "must be >= 0");
    for (const auto* tg : {&s.tau_c, &s.contour_tau_c}) {
      require(tg->min > 0.0, "sweeps", "correlation-time grids must be > 0");
    }
    r.finish();
  }

  {
    Reader r = root.child("pipeline");
    cfg.pipeline_tau_c = r.number("tau_c_s", 15e-9);
    require(cfg.pipeline_tau_c > 0.0, "pipeline.tau_c_s", "must be > 0");
    r.finish();
  }

  {
    Reader r = root.child("modes");
    try {
      cfg.mode = transfer::parse_denominator_mode(r.text("denominator", "corrected"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("modes.denominator", e.what());
    }
    try {
      cfg.convention = pair::parse_assignment(r.text("convention", "eq8_consistent"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("modes.convention", e.what());
    }
    r.finish();
  }

  cfg.output_dir = root.text("output_dir", ".");
  root.finish();

  const json flat = to_json(cfg).flatten();
  for (const auto& [key, _] : flat.items()) {
    // JSON pointer "/a/b/0" -> "a.b"
    std::string path;
    std::istringstream parts(key.substr(1));
    for (std::string part; std::getline(parts, part, '/');) {
      if (!part.empty() && std::isdigit(static_cast<unsigned char>(part[0]))) break;
      path += (path.empty() ? "" : ".") + part;
    }
    cfg.provenance[path] = seen.contains(path) ? "config" : "default";
  }
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return RunConfig::defaults();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("parse error: ") + e.what());
  }
  return parse_config(doc);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read configuration file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

json to_json(const RunConfig& cfg) {
  json j;
  j["sample"] = {{"g", cfg.sample.g_hz},
                 {"gamma_c_hz_per_t", hz_from_angular(cfg.sample.gamma_c)},
                 {"gamma_h_hz_per_t", hz_from_angular(cfg.sample.gamma_h)},
                 {"mixture_ratio", cfg.sample.mixture_ratio},
                 {"field_t", cfg.sample.field_tesla}};

  json window;
  if (const auto* t = std::get_if<nv::DetuningThreshold>(&cfg.window)) {
    window = {{"type", "detuning"}, {"threshold_hz", hz_from_angular(t->threshold)}};
  } else {
    const auto& b = std::get<nv::ThetaBand>(cfg.window).band;
    window = {{"type", "band"}, {"theta_deg", {rad_to_deg(b.lo), rad_to_deg(b.hi)}}};
  }
  j["nv"] = {{"zfs_hz", hz_from_angular(cfg.nv.zfs_d)},
             {"strain_hz", hz_from_angular(cfg.nv.strain_e)},
             {"gamma_e_hz_per_t", hz_from_angular(cfg.nv.gamma_e)},
             {"pe0", cfg.nv.pe0},
             {"pumping_band_deg",
              {rad_to_deg(cfg.nv.pumping_band.lo), rad_to_deg(cfg.nv.pumping_band.hi)}},
             {"window", window},
             {"quadrature_nodes", cfg.quadrature_nodes}};

  j["drive"] = {{"rabi_hz", hz_from_angular(cfg.drive.rabi())},
                {"detuning_hz", hz_from_angular(cfg.drive.detuning())}};

  const auto& g = cfg.geometry;
  j["geometry"] = {{"channel_diameter_m", g.channel_diameter},
                   {"gel_length_m", g.gel_length},
                   {"nd_diameter_m", g.nd_diameter},
                   {"nd_volume_fraction", g.nd_volume_fraction},
                   {"nv_yield_per_nd", g.nv_yield_per_nd},
                   {"pair_density_per_m3", g.pair_density},
                   {"flow_rate_m_per_s", g.flow_rate},
                   {"residence_time_s", g.residence_time}};

  j["ramp"] = {{"b_high_t", cfg.ramp.b_high},
               {"b_low_t", cfg.ramp.b_low},
               {"t2_s", cfg.ramp.t2},
               {"shape", std::string(pair::to_string(cfg.ramp.shape))},
               {"start_field_factor", cfg.start_field_factor}};

  j["calibration"] = {{"tau_c_s", cfg.calibration.tau_c},
                      {"target_p_h", cfg.calibration.target_p_h},
                      {"target_nv_ratio", cfg.calibration.target_nv_ratio}};
  if (cfg.calibration.c0_rate) j["calibration"]["c0_rate_per_s"] = *cfg.calibration.c0_rate;

  const auto& s = cfg.sweeps;
  j["sweeps"] = {{"tau_c_s", grid_json(s.tau_c, 1.0)},
                 {"contour_tau_c_s", grid_json(s.contour_tau_c, 1.0)},
                 {"contour_detuning_hz", grid_json(s.contour_detuning, kTwoPi)},
                 {"omega_hz", grid_json(s.omega, kTwoPi)},
                 {"spectral_tau_c_s", s.spectral_tau_c},
                 {"field_t", grid_json(s.field, 1.0)},
                 {"t2_s", s.t2}};

  j["pipeline"] = {{"tau_c_s", cfg.pipeline_tau_c}};
  j["modes"] = {{"denominator", std::string(transfer::to_string(cfg.mode))},
                {"convention", std::string(pair::to_string(cfg.convention))}};
  j["output_dir"] = cfg.output_dir;
  return j;
}

std::string config_hash(const RunConfig& cfg) {
  json j = to_json(cfg);
  j.erase("output_dir");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace hyperpol::config

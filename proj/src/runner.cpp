#include "hyperpol/runner.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "hyperpol/errors.hpp"
#include "hyperpol/parallel.hpp"
#include "hyperpol/spectral.hpp"
#include "hyperpol/units.hpp"

namespace hyperpol::runner {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

/// Leaf path ("a.b") -> value, arrays kept whole.
std::vector<std::pair<std::string, json>> parameter_leaves(const config::RunConfig& cfg) {
  std::vector<std::pair<std::string, json>> out;
  json j = to_json(cfg);
  j.erase("output_dir");  // where results go, not a model parameter
  auto walk = [&](auto&& self, const json& node, const std::string& path) -> void {
    if (node.is_object()) {
      for (const auto& [k, v] : node.items()) self(self, v, path.empty() ? k : path + "." + k);
    } else {
      out.emplace_back(path, node);
    }
  };
  walk(walk, j, "");
  return out;
}

std::string source_of(const config::RunConfig& cfg, const std::string& path) {
  const auto it = cfg.provenance.find(path);
  return it == cfg.provenance.end() ? "default" : it->second;
}

ordered_json report_header(const config::RunConfig& cfg, const std::string& command) {
  ordered_json params = ordered_json::object();
  for (const auto& [path, value] : parameter_leaves(cfg)) {
    ordered_json entry;
    entry["value"] = ordered_json::parse(value.dump());
    entry["source"] = source_of(cfg, path);
    params[path] = std::move(entry);
  }
  return {{"command", command},
          {"config_hash", config::config_hash(cfg)},
          {"denominator_mode", std::string(transfer::to_string(cfg.mode))},
          {"convention", std::string(pair::to_string(cfg.convention))},
          {"parameters", params}};
}

double require_c0(const config::RunConfig& cfg) {
  if (!cfg.calibration.c0_rate) {
    throw ConfigError("calibration.c0_rate_per_s",
                      "rate constant not calibrated; run the calibrate command first");
  }
  return *cfg.calibration.c0_rate;
}

}  // namespace

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

namespace {

void dump_value(std::string& out, const ordered_json& v, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  if (v.is_number_float()) {
    const double x = v.get<double>();
    // JSON has no inf/nan; match the library's null for them
    out += std::isfinite(x) ? format_double(x) : "null";
  } else if (v.is_object() && !v.empty()) {
    out += "{\n";
    std::size_t i = 0;
    for (const auto& [k, child] : v.items()) {
      out += pad + ordered_json(k).dump() + ": ";
      dump_value(out, child, depth + 1);
      out += ++i < v.size() ? ",\n" : "\n";
    }
    out += close + "}";
  } else if (v.is_array() && !v.empty()) {
    out += "[\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      out += pad;
      dump_value(out, v[i], depth + 1);
      out += i + 1 < v.size() ? ",\n" : "\n";
    }
    out += close + "]";
  } else {
    out += v.dump();
  }
}

}  // namespace

std::string dump_json(const ordered_json& doc) {
  std::string out;
  dump_value(out, doc, 0);
  return out;
}

std::vector<std::string> metadata_header(const config::RunConfig& cfg, const std::string& command) {
  std::vector<std::string> lines{
      "hyperpol " + command,
      "config_hash=" + config::config_hash(cfg),
      "denominator_mode=" + std::string(transfer::to_string(cfg.mode)),
      "convention=" + std::string(pair::to_string(cfg.convention)),
  };
  for (const auto& [path, value] : parameter_leaves(cfg)) {
    lines.push_back(fmt::format("param {} = {} [{}]", path, value.dump(), source_of(cfg, path)));
  }
  return lines;
}

void write_csv(std::ostream& os, const Table& table, const std::vector<std::string>& header) {
  for (const auto& line : header) os << "# " << line << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    os << (i ? "," : "") << table.columns[i];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
}

SpectralFigure fig_spectral(const config::RunConfig& cfg, unsigned threads) {
  SpectralFigure fig;
  fig.curves.columns = {"tau_c_s", "omega_rad_s", "J"};
  fig.markers.columns = {"tau_c_s", "marker", "omega_rad_s", "J"};

  std::vector<double> omegas{0.0};
  for (double w : cfg.sweeps.omega.values()) omegas.push_back(w);

  const auto& taus = cfg.sweeps.spectral_tau_c;
  const auto blocks = parallel_map(taus.size(), threads, [&](std::size_t k) {
    const spectral::CorrelationTime tc(taus[k]);
    std::vector<std::vector<double>> rows;
    rows.reserve(omegas.size());
    for (double w : omegas) rows.push_back({taus[k], w, spectral::spectral_density(w, tc)});
    return rows;
  });
  for (const auto& b : blocks) fig.curves.rows.insert(fig.curves.rows.end(), b.begin(), b.end());

  const double b = cfg.sample.field_tesla;
  const auto fh = transfer::transfer_frequencies(cfg.drive, cfg.proton().larmor(b));
  const auto fc = transfer::transfer_frequencies(cfg.drive, cfg.carbon().larmor(b));
  const double marks[] = {std::abs(fh.omega_0), std::abs(fc.omega_0), fc.omega_2, fh.omega_2};
  for (double tau : taus) {
    const spectral::CorrelationTime tc(tau);
    for (int m = 0; m < 4; ++m) {
      fig.markers.rows.push_back(
          {tau, static_cast<double>(m), marks[m], spectral::spectral_density(marks[m], tc)});
    }
  }
  return fig;
}

Table fig_transfer(const config::RunConfig& cfg, unsigned threads) {
  Table t;
  t.columns = {"tau_c_s", "ps_H", "ps_C", "abs_ps_H", "abs_ps_C"};
  const auto taus = cfg.sweeps.tau_c.values();
  const double b = cfg.sample.field_tesla;
  t.rows = parallel_map(taus.size(), threads, [&](std::size_t i) {
    const spectral::CorrelationTime tc(taus[i]);
    const double h = transfer::species_polarization(cfg.proton(), b, cfg.drive, tc, cfg.mode);
    const double c = transfer::species_polarization(cfg.carbon(), b, cfg.drive, tc, cfg.mode);
    return std::vector<double>{taus[i], h, c, std::abs(h), std::abs(c)};
  });
  return t;
}

Table ContourFigure::as_table(bool proton_channel) const {
  Table t;
  t.columns.push_back("tau_c_s");
  for (double d : delta_prime) t.columns.push_back(format_double(d));
  const auto& values = proton_channel ? ps_h : ps_c;
  for (std::size_t i = 0; i < tau_c.size(); ++i) {
    std::vector<double> row{tau_c[i]};
    row.insert(row.end(), values[i].begin(), values[i].end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

ContourFigure fig_contour(const config::RunConfig& cfg, unsigned threads) {
  ContourFigure fig;
  fig.tau_c = cfg.sweeps.contour_tau_c.values();
  fig.delta_prime = cfg.sweeps.contour_detuning.values();
  const double b = cfg.sample.field_tesla;
  using RowPair = std::pair<std::vector<double>, std::vector<double>>;
  const auto rows = parallel_map(fig.tau_c.size(), threads, [&](std::size_t i) {
    const spectral::CorrelationTime tc(fig.tau_c[i]);
    RowPair r;
    for (double dp : fig.delta_prime) {
      const auto drive = cfg.drive.with_detuning(cfg.drive.detuning() + dp);
      r.first.push_back(transfer::species_polarization(cfg.proton(), b, drive, tc, cfg.mode));
      r.second.push_back(transfer::species_polarization(cfg.carbon(), b, drive, tc, cfg.mode));
    }
    return r;
  });
  for (const auto& r : rows) {
    fig.ps_h.push_back(r.first);
    fig.ps_c.push_back(r.second);
  }
  return fig;
}

Table fig_buildup(const config::RunConfig& cfg, unsigned threads) {
  const double c0 = require_c0(cfg);
  const auto taus = cfg.sweeps.tau_c.values();
  const auto sweep = buildup::polarization_sweep(taus, cfg.polarizer(), c0, threads);
  Table t;
  t.columns = {"tau_c_s", "p_H", "p_C"};
  for (const auto& r : sweep) t.rows.push_back({r.tau_c, r.p_h, r.p_c});
  return t;
}

Table fig_levels(const config::RunConfig& cfg, unsigned threads) {
  Table t;
  t.columns = {"b_t",  "E_S0_hz", "E_T0_hz", "E_Tp_hz", "E_Tm_hz",
               "S_S0", "S_T0",    "S_Tp",    "S_Tm"};
  std::vector<double> fields{0.0};
  for (double b : cfg.sweeps.field.values()) fields.push_back(b);
  const auto spec = cfg.pair_spec();
  t.rows = parallel_map(fields.size(), threads, [&](std::size_t i) {
    const auto levels = pair::eigenlevels(spec.at_field(fields[i]));
    std::vector<double> row{fields[i]};
    for (const auto& l : levels) row.push_back(l.energy_hz);
    for (const auto& l : levels) row.push_back(l.singlet_character);
    return row;
  });
  return t;
}

ordered_json pipeline(const config::RunConfig& cfg) {
  const double c0 = require_c0(cfg);
  const auto model = cfg.polarizer();
  const spectral::CorrelationTime tc(cfg.pipeline_tau_c);

  const double ratio = buildup::nv_to_nuclear_ratio(model.geometry);
  const double w_h = c0 * buildup::unit_rate(model, model.proton, tc);
  const double w_c = c0 * buildup::unit_rate(model, model.carbon, tc);
  const auto row = buildup::polarization_at(cfg.pipeline_tau_c, model, c0);

  const buildup::PolarizationPair p{row.p_c, row.p_h};
  const auto high = pair::high_field_populations(p);
  const auto low = pair::adiabatic_map(high, cfg.convention);
  const double p_s = pair::singlet_order_from_populations(low);

  pair::PropagationOptions opts;
  opts.start_field_factor = cfg.start_field_factor;
  const auto ramp = pair::propagate_ramp(high, cfg.ramp, cfg.pair_spec(), opts);

  ordered_json out;
  out["header"] = report_header(cfg, "pipeline");
  out["tau_c_s"] = cfg.pipeline_tau_c;
  out["c0_rate_per_s"] = c0;
  out["nv_ratio"] = ratio;
  out["geometric_nv_ratio"] = buildup::geometric_nv_ratio(model.geometry);
  out["w_eff_H_per_s"] = w_h;
  out["w_eff_C_per_s"] = w_c;
  out["p_H"] = row.p_h;
  out["p_C"] = row.p_c;
  out["linear_model_clamped"] = row.clamped;
  out["p_S"] = p_s;
  out["p_S_closed_form"] = pair::singlet_order_closed_form(p);
  out["p_S_over_p_H"] = row.p_h != 0.0 ? ordered_json(p_s / row.p_h) : ordered_json(nullptr);
  out["populations_high_field"] = {{"basis", "product"},
                                   {"uu", high.n[0]}, {"ud", high.n[1]},
                                   {"du", high.n[2]}, {"dd", high.n[3]}};
  out["populations_low_field"] = {{"basis", "singlet_triplet"},
                                  {"S0", low.n[0]}, {"T0", low.n[1]},
                                  {"T+1", low.n[2]}, {"T-1", low.n[3]}};
  out["ramp"] = {{"shape", std::string(pair::to_string(cfg.ramp.shape))},
                 {"t2_s", cfg.ramp.t2},
                 {"diabatic_leakage", ramp.diabatic_leakage},
                 {"landau_zener", ramp.landau_zener},
                 {"p_S_after_ramp", pair::singlet_order_from_populations(ramp.final_populations)},
                 {"start_field_t", ramp.start_field},
                 {"start_adiabaticity", ramp.start_adiabaticity},
                 {"steps", ramp.steps},
                 {"norm_error", ramp.norm_error}};
  return out;
}

ordered_json adiabatic_audit(const config::RunConfig& cfg, unsigned threads) {
  const auto spec = cfg.pair_spec();
  const auto uniform = pair::high_field_populations({0.0, 0.0});
  pair::PropagationOptions opts;
  opts.start_field_factor = cfg.start_field_factor;

  const auto& t2s = cfg.sweeps.t2;
  const auto rows = parallel_map(t2s.size(), threads, [&](std::size_t i) {
    auto protocol = cfg.ramp;
    ordered_json row;
    row["t2_s"] = t2s[i];
    if (t2s[i] == 0.0) {
      row["method"] = "sudden";
      row["diabatic_leakage"] = pair::sudden_leakage(protocol, spec);
      row["landau_zener"] = 1.0;
      return row;
    }
    protocol.t2 = t2s[i];
    const auto r = pair::propagate_ramp(uniform, protocol, spec, opts);
    row["method"] = "magnus4";
    row["diabatic_leakage"] = r.diabatic_leakage;
    row["landau_zener"] = r.landau_zener;
    row["start_adiabaticity"] = r.start_adiabaticity;
    row["steps"] = r.steps;
    row["norm_error"] = r.norm_error;
    return row;
  });

  ordered_json out;
  out["header"] = report_header(cfg, "adiabatic-audit");
  out["shape"] = std::string(pair::to_string(cfg.ramp.shape));
  out["b_high_t"] = cfg.ramp.b_high;
  out["b_low_t"] = cfg.ramp.b_low;
  out["scenarios"] = rows;

  // Leakage decreasing in t2 over the scenarios, taken in t2 order.
  std::vector<std::pair<double, double>> order;
  for (const auto& r : rows) order.emplace_back(r["t2_s"].get<double>(), r["diabatic_leakage"].get<double>());
  std::sort(order.begin(), order.end());
  bool monotone = true;
  for (std::size_t i = 1; i < order.size(); ++i) monotone &= order[i].second <= order[i - 1].second;
  out["leakage_decreasing_in_t2"] = monotone;
  return out;
}

CalibrationOutcome calibrate(const config::RunConfig& cfg) {
  config::RunConfig out = cfg;
  out.geometry.nv_yield_per_nd =
      buildup::nv_yield_for_ratio(cfg.calibration.target_nv_ratio, cfg.geometry);
  const auto model = out.polarizer();
  const spectral::CorrelationTime tc(cfg.calibration.tau_c);
  const double c0 = buildup::calibrate_c0(cfg.calibration.target_p_h, tc, model);
  out.calibration.c0_rate = c0;
  out.provenance["geometry.nv_yield_per_nd"] = "calibrated";
  out.provenance["calibration.c0_rate_per_s"] = "calibrated";

  const auto check = buildup::polarization_at(cfg.calibration.tau_c, model, c0);
  ordered_json report;
  report["header"] = report_header(out, "calibrate");
  report["tau_c_s"] = cfg.calibration.tau_c;
  report["target_p_h"] = cfg.calibration.target_p_h;
  report["target_nv_ratio"] = cfg.calibration.target_nv_ratio;
  report["geometric_nv_ratio"] = buildup::geometric_nv_ratio(out.geometry);
  report["nv_yield_per_nd"] = out.geometry.nv_yield_per_nd;
  report["nv_ratio"] = buildup::nv_to_nuclear_ratio(out.geometry);
  report["c0_rate_per_s"] = c0;
  report["p_H"] = check.p_h;
  report["p_C"] = check.p_c;
  return {report, out};
}

}  // namespace hyperpol::runner

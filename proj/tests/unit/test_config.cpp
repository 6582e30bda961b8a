#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "hyperpol/config.hpp"
#include "hyperpol/errors.hpp"

using namespace hyperpol;
using namespace hyperpol::config;
using nlohmann::json;

namespace {

std::string error_key(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.key_path();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("empty input yields defaults") {
  const auto a = parse_config_text("");
  const auto b = parse_config_text("  \n\t ");
  const auto c = parse_config_text("{}");
  const auto d = RunConfig::defaults();
  CHECK(to_json(a) == to_json(d));
  CHECK(to_json(b) == to_json(d));
  CHECK(to_json(c) == to_json(d));
  CHECK(config_hash(a) == config_hash(d));
  CHECK(a.mode == transfer::DenominatorMode::Corrected);
  CHECK(a.convention == pair::SingletAssignment::UpDownToSinglet);
  CHECK_FALSE(a.calibration.c0_rate.has_value());
}

TEST_CASE("empty file yields defaults") {
  const auto path = std::filesystem::temp_directory_path() / "hyperpol_empty_config.json";
  { std::ofstream(path) << ""; }
  CHECK(config_hash(load_config(path)) == config_hash(RunConfig::defaults()));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path), ConfigError);
}

TEST_CASE("errors name the offending key") {
  CHECK(error_key(R"({"sample": {"g": -1}})") == "sample.g");
  CHECK(error_key(R"({"foo": 1})") == "foo");
  CHECK(error_key(R"({"sample": {"gg": 1}})") == "sample.gg");
  CHECK(error_key(R"({"nv": {"pe0": 2}})") == "nv.pe0");
  CHECK(error_key(R"({"sample": {"g": "big"}})") == "sample.g");
  CHECK(error_key(R"({"modes": {"denominator": "sideways"}})") == "modes.denominator");
  CHECK(error_key(R"({"modes": {"convention": "eq7"}})") == "modes.convention");
  CHECK(error_key(R"({"ramp": {"shape": "cubic"}})") == "ramp.shape");
  CHECK(error_key(R"({"drive": {"rabi_hz": 0}})") == "drive.rabi_hz");
  CHECK(error_key(R"({"geometry": {"nd_volume_fraction": 0.9}})") == "geometry.nd_volume_fraction");
  CHECK(error_key("{not json") != "<no error>");
  CHECK(error_key("[1, 2]") != "<no error>");
}

TEST_CASE("values are read in cyclic units and converted") {
  const auto cfg = parse_config_text(R"({
    "sample": {"g": 200, "field_t": 0.5},
    "drive": {"rabi_hz": 1e6, "detuning_hz": 12e6},
    "modes": {"denominator": "as_written", "convention": "eq6_as_printed"},
    "calibration": {"c0_rate_per_s": 1234.5}
  })");
  CHECK(cfg.sample.g_hz == 200.0);
  CHECK(cfg.pair_spec().g_hz == 200.0);
  CHECK(cfg.pair_spec().field_tesla == 0.5);
  CHECK(cfg.drive.rabi() == doctest::Approx(kTwoPi * 1e6));
  CHECK(cfg.drive.detuning() == doctest::Approx(kTwoPi * 12e6));
  CHECK(cfg.mode == transfer::DenominatorMode::AsWritten);
  CHECK(cfg.convention == pair::SingletAssignment::DownUpToSinglet);
  REQUIRE(cfg.calibration.c0_rate.has_value());
  CHECK(*cfg.calibration.c0_rate == 1234.5);
  CHECK(cfg.provenance.at("sample.g") == "config");
  CHECK(cfg.provenance.at("sample.mixture_ratio") == "default");
}

TEST_CASE("canonical JSON round-trips") {
  const auto cfg = parse_config_text(R"({
    "sample": {"g": 215.5},
    "nv": {"window": {"type": "band", "theta_deg": [85, 95]}},
    "ramp": {"t2_s": 0.03, "shape": "exponential"},
    "sweeps": {"t2_s": [0.001, 0.01]},
    "calibration": {"c0_rate_per_s": 5e4}
  })");
  const json once = to_json(cfg);
  const auto again = parse_config(once);
  CHECK(to_json(again) == once);
  CHECK(config_hash(again) == config_hash(cfg));
  CHECK(std::holds_alternative<nv::ThetaBand>(again.window));
  CHECK(again.ramp.shape == pair::RampShape::Exponential);
}

TEST_CASE("hash is stable, value-sensitive and ignores the output directory") {
  const auto a = RunConfig::defaults();
  const std::string h = config_hash(a);
  CHECK(h.size() == 16);
  CHECK(h == config_hash(RunConfig::defaults()));
  auto b = a;
  b.output_dir = "/somewhere/else";
  CHECK(config_hash(b) == h);
  auto c = a;
  c.sample.g_hz = 221.0;
  CHECK(config_hash(c) != h);
  auto d = a;
  d.mode = transfer::DenominatorMode::AsWritten;
  CHECK(config_hash(d) != h);
}

TEST_CASE("grids") {
  const Grid lin{0.0, 1.0, 5, false};
  const auto v = lin.values();
  REQUIRE(v.size() == 5);
  CHECK(v[2] == doctest::Approx(0.5));
  CHECK(v.front() == 0.0);
  CHECK(v.back() == 1.0);
  const Grid lg{1e-9, 1e-6, 4, true};
  const auto w = lg.values();
  REQUIRE(w.size() == 4);
  CHECK(w[1] == doctest::Approx(1e-8).epsilon(1e-12));
  CHECK(w.back() == 1e-6);
  CHECK(error_key(R"({"sweeps": {"tau_c_s": {"min": -1, "max": 1, "points": 3}}})") ==
        "sweeps.tau_c_s.min");
}

#include <doctest.h>

#include "fiberdeco/config.hpp"
#include "fiberdeco/experiments.hpp"

using namespace fiberdeco;

TEST_CASE("key-value parsing with comments and whitespace") {
  KeyValueConfig cfg = KeyValueConfig::parse(
      "# comment\n"
      "length_km = 23   # trailing comment\n"
      "widths_nm = 1, 10, 60\n"
      "\n"
      "seed = 42\n"
      "shape = gaussian\n");
  CHECK(cfg.get_double("length_km", 0.0) == 23.0);
  CHECK(cfg.get_uint("seed", 0) == 42);
  CHECK(cfg.get_string("shape", "") == "gaussian");
  const auto widths = cfg.get_double_list("widths_nm", {});
  REQUIRE(widths.size() == 3);
  CHECK(widths[1] == 10.0);
  CHECK_NOTHROW(cfg.finish());
}

TEST_CASE("unknown keys are rejected by name") {
  KeyValueConfig cfg = KeyValueConfig::parse("length_km = 23\nbogus_key = 1\n");
  cfg.get_double("length_km", 0.0);
  try {
    cfg.finish();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
  }
}

TEST_CASE("malformed values and lines raise config errors") {
  CHECK_THROWS_AS(KeyValueConfig::parse("just a line\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse("a = 1\na = 2\n"), ConfigError);
  KeyValueConfig cfg = KeyValueConfig::parse("x = notanumber\ny = 1.5z\n");
  CHECK_THROWS_AS(cfg.get_double("x", 0.0), ConfigError);
  CHECK_THROWS_AS(cfg.get_double("y", 0.0), ConfigError);
}

TEST_CASE("defaults are printable and parse back cleanly") {
  for (const std::string& name : experiment_names()) {
    const std::string text = default_config_text(name);
    const KeyValueConfig cfg = KeyValueConfig::parse(text);
    for (const ConfigKeySpec& k : config_keys(name)) CHECK(cfg.has(k.key));
  }
}

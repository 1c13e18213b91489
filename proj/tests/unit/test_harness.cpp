#include "ridgeboot/errors.hpp"
#include "ridgeboot/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace ridgeboot;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.setting = "setting1";
  c.n = 24;
  c.p = 8;
  c.eta = 0.5;
  c.N1 = 2;
  c.N2 = 25;
  c.B = 60;
  c.seed = 3;
  return c;
}

std::string drop_line(const std::string& text, const std::string& key) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::string line = text.substr(pos, end - pos);
    if (line.rfind(key + " ", 0) != 0) out += line + "\n";
    pos = end == std::string::npos ? text.size() : end + 1;
  }
  return out;
}

}  // namespace

TEST_CASE("presets") {
  const ExperimentConfig s2 = preset("setting2", Scale::full);
  CHECK(s2.n == 100);
  CHECK(s2.p == 95);
  CHECK(s2.eta == 0.5);
  CHECK(s2.N1 == 100);
  CHECK(s2.N2 == 1000);
  CHECK(s2.B == 1000);
  CHECK(s2.sigma == 0.1);
  CHECK(s2.level == 0.9);
  const ExperimentConfig s3 = preset("setting3", Scale::desk);
  CHECK(s3.p == 45);
  CHECK(s3.eta == 1.0);
  CHECK(s3.N1 == 20);
  CHECK(s3.N2 == 500);
  CHECK(s3.B == 500);
  CHECK(preset("setting4", Scale::desk).p == 95);
  CHECK_THROWS_AS(preset("setting5", Scale::desk), ConfigError);
  CHECK_THROWS_AS(parse_scale("huge"), ConfigError);
}

TEST_CASE("config text round-trips") {
  for (const char* name : {"setting1", "setting2", "setting3", "setting4"}) {
    const std::string text = format_config(preset(name, Scale::full));
    CHECK(format_config(parse_config(text)) == text);
  }
  ExperimentConfig custom = tiny_config();
  custom.noise = CustomAtoms{{-1.0, 0.5, 2.25}};
  custom.cv_per_design = true;
  custom.threads = 3;
  const std::string text = format_config(custom);
  CHECK(format_config(parse_config(text)) == text);
}

TEST_CASE("config errors name the offending key") {
  const std::string text = format_config(tiny_config());
  try {
    parse_config(drop_line(text, "sigma"));
    FAIL("missing key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("sigma") != std::string::npos);
  }
  try {
    parse_config(text + "sigmaa = 0.1\n");
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("sigmaa") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(text + "sigma = 0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(drop_line(text, "level") + "level = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(drop_line(text, "N1") + "N1 = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(drop_line(text, "p") + "p = 24\n"), ConfigError);
  CHECK_NOTHROW(parse_config(drop_line(drop_line(text, "threads"), "cv_per_design")));
  CHECK_THROWS_AS(read_config("/nonexistent/dir/cfg.txt"), IoError);
}

TEST_CASE("setting key is FNV-1a") {
  CHECK(setting_key("") == 0xcbf29ce484222325ULL);
  CHECK(setting_key("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(setting_key("setting1") != setting_key("setting2"));
}

TEST_CASE("design draws are seed-addressed") {
  const ExperimentConfig c = tiny_config();
  const DesignDraw a = draw_design(c, 1);
  const DesignDraw b = draw_design(c, 1);
  CHECK(a.X == b.X);
  CHECK(a.target_row == leverage_scores(a.X).argmax);
  CHECK(draw_design(c, 0).X != a.X);
  CHECK(draw_response(c, a, 1, 4) == draw_response(c, b, 1, 4));
  CHECK(draw_response(c, a, 1, 4) != draw_response(c, a, 1, 5));
}

TEST_CASE("simulation output shape and accounting") {
  const ExperimentConfig c = tiny_config();
  const Table1Result r = run_table1(c);
  REQUIRE(r.methods.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    const MethodResult& m = r.methods[k];
    CHECK(m.method == kTable1Methods[k]);
    CHECK(m.instances + r.skips == c.N1 * c.N2);
    const double count = m.coverage * static_cast<double>(m.instances);
    CHECK(std::abs(count - std::round(count)) < 1e-9);
    CHECK(m.covered == static_cast<std::size_t>(std::llround(count)));
    CHECK(m.width >= 0.0);
  }
  CHECK(r.skips == 0);

  const std::string csv = format_results({r}, c);
  CHECK(csv.find("setting,method,coverage,width,instances,skips,seed\n") != std::string::npos);
  std::size_t rows = 0;
  for (std::size_t pos = csv.find("\nsetting1,"); pos != std::string::npos;
       pos = csv.find("\nsetting1,", pos + 1)) {
    ++rows;
  }
  CHECK(rows == 4);
  CHECK(csv.find("setting1,oracle,") != std::string::npos);
  CHECK(csv.find("setting1,ols_rb,") != std::string::npos);
}

TEST_CASE("simulation output does not depend on the thread count") {
  ExperimentConfig c = tiny_config();
  c.N1 = 4;
  c.N2 = 10;
  c.threads = 1;
  const std::string serial = format_results({run_table1(c)}, c);
  c.threads = 8;
  const std::string parallel = format_results({run_table1(c)}, c);
  c.threads = 1;
  CHECK(serial == format_results({run_table1(c)}, c));
  CHECK(serial == parallel);
}

TEST_CASE("oracle coverage is near the level with many responses") {
  ExperimentConfig c = tiny_config();
  c.N1 = 2;
  c.N2 = 500;
  c.B = 20;
  c.cv_per_design = true;
  const Table1Result r = run_table1(c);
  CHECK(std::abs(r.methods[0].coverage - c.level) <= 0.02);
}

TEST_CASE("shipped setting configs match the presets") {
  for (const char* name : {"setting1", "setting2", "setting3", "setting4"}) {
    const std::string dir = RIDGEBOOT_CONFIG_DIR;
    CHECK(format_config(read_config(dir + "/" + name + ".cfg")) ==
          format_config(preset(name, Scale::full)));
    CHECK(format_config(read_config(dir + "/" + name + "_desk.cfg")) ==
          format_config(preset(name, Scale::desk)));
  }
}

TEST_CASE("setting 1 config yields the four-row results table") {
  ExperimentConfig c = read_config(std::string(RIDGEBOOT_CONFIG_DIR) + "/setting1.cfg");
  c.N1 = 1;
  c.N2 = 5;
  c.B = 20;
  const std::string csv = format_results({run_table1(c)}, c);
  const std::string body = csv.substr(csv.find("setting,method"));
  std::size_t lines = 0;
  for (char ch : body) lines += ch == '\n';
  CHECK(lines == 5);
  std::size_t pos = 0;
  for (CiMethod m : kTable1Methods) {
    const std::size_t at = body.find("\nsetting1," + std::string(to_string(m)) + ",", pos);
    CHECK(at != std::string::npos);
    pos = at + 1;
  }
}

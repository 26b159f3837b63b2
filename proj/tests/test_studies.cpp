#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nlifem/config.hpp"
#include "nlifem/report.hpp"
#include "nlifem/studies.hpp"

using namespace nlifem;
using Catch::Approx;

TEST_CASE("fixed-horizon refinement study", "[studies]") {
  StudyConfig cfg;
  cfg.example = "ex1";
  cfg.kind = StudyKind::fixed_delta;
  cfg.k = 1;
  cfg.levels = {2, 3, 4};
  cfg.delta = {0.25, 0.5};
  StudyReport rep = run_study(cfg);

  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.xaxis == "h");
  for (size_t r = 0; r < rep.rows.size(); ++r) {
    const StudyRow& row = rep.rows[r];
    CHECK(row.level == cfg.levels[r]);
    CHECK(row.h == Approx(std::ldexp(1.0, -row.level)).margin(0.0));
    REQUIRE(row.deltas.size() == 2);
    CHECK(row.deltas[0] == 0.25);
    CHECK(row.err_energy > 0.0);
    CHECK(row.err_l2 > 0.0);
    CHECK(row.err_max > 0.0);
    if (r == 0) {
      CHECK(std::isnan(row.rate_energy));
    } else {
      // rates are recomputable from the stored errors
      CHECK(row.rate_l2 ==
            Approx(std::log2(rep.rows[r - 1].err_l2 / row.err_l2)).margin(1e-12));
      CHECK(row.rate_energy ==
            Approx(std::log2(rep.rows[r - 1].err_energy / row.err_energy))
                .margin(1e-12));
      CHECK(row.err_l2 < rep.rows[r - 1].err_l2);
    }
  }
  CHECK(rep.notes.empty());

  SECTION("per-field l2 components reassemble the total") {
    for (const auto& row : rep.rows) {
      double sum = 0.0;
      for (double s : row.record.field_l2_sq) sum += s;
      CHECK(sum == Approx(row.err_l2 * row.err_l2).epsilon(1e-12));
    }
  }

  SECTION("identical configs produce identical bytes") {
    StudyReport again = run_study(cfg);
    CHECK(csv_string(rep) == csv_string(again));
    CHECK(svg_string(rep) == svg_string(again));
  }
}

TEST_CASE("coupled-horizon study ties delta to h", "[studies]") {
  StudyConfig cfg;
  cfg.example = "ex1";
  cfg.kind = StudyKind::coupled;
  cfg.k = 1;
  cfg.levels = {2, 3, 4};
  cfg.multiples = {2, 4};
  StudyReport rep = run_study(cfg);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) {
    CHECK(row.deltas[0] == Approx(2.0 * row.h).margin(0.0));
    CHECK(row.deltas[1] == Approx(4.0 * row.h).margin(0.0));
    CHECK(row.err_energy > 0.0);
  }
  CHECK(rep.rows[2].err_l2 < rep.rows[0].err_l2);
}

TEST_CASE("local limit study drives delta to zero", "[studies]") {
  StudyConfig cfg;
  cfg.kind = StudyKind::local_limit;
  cfg.halvings = 1;
  cfg.delta1 = 0.125;
  StudyReport rep = run_study(cfg);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.cfg.k == 3);  // defaulted high enough to expose the O(delta^2) gap
  CHECK(rep.xaxis == "delta");
  CHECK(rep.rows[1].deltas[0] == Approx(0.0625).margin(0.0));
  CHECK(rep.rows[1].err_max < rep.rows[0].err_max);

  StudyConfig plain = cfg;
  plain.corrected_bc = false;
  StudyReport rp = run_study(plain);
  bool noted = false;
  for (const auto& n : rp.notes)
    if (n.find("collar data") != std::string::npos) noted = true;
  CHECK(noted);
  // plain restriction data loses the quadratic collar accuracy
  CHECK(rp.rows[1].err_max > rep.rows[1].err_max);

  SECTION("degree must resolve the limit") {
    StudyConfig low = cfg;
    low.k = 1;
    CHECK_THROWS_AS(run_study(low), config_error);
  }
}

TEST_CASE("flux consistency sweep", "[studies]") {
  StudyConfig cfg;
  cfg.kind = StudyKind::flux_consistency;
  cfg.halvings = 2;
  StudyReport rep = run_study(cfg);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.xaxis == "delta");
  for (const auto& row : rep.rows) {
    CHECK(std::isnan(row.h));
    CHECK(row.err_max > 0.0);
  }
  CHECK(rep.rows[2].err_max < rep.rows[0].err_max);
  CHECK(rep.observed_order == Approx(2.0).margin(0.8));
}

TEST_CASE("maximum principle sampling", "[studies]") {
  StudyConfig cfg;
  cfg.kind = StudyKind::max_principle;
  cfg.seeds = 4;
  StudyReport rep = run_study(cfg);
  REQUIRE(rep.rows.size() == 4);
  for (const auto& row : rep.rows) {
    CHECK(row.err_max <= 1e-9);   // interior excess over the boundary max
    CHECK(row.err_energy > 0.0);  // stability ratio is recorded
  }
  CHECK(rep.pass);
}

TEST_CASE("csv serialization", "[studies][report]") {
  CHECK(csv_header(2) ==
        "level,h,delta1,delta2,err_energy,rate_energy,err_l2,rate_l2,err_max,rate_max");
  CHECK(csv_header(3) ==
        "level,h,delta1,delta2,delta3,err_energy,rate_energy,err_l2,rate_l2,err_max,"
        "rate_max");

  StudyConfig cfg;
  cfg.example = "ex1";
  cfg.kind = StudyKind::fixed_delta;
  cfg.k = 1;
  cfg.levels = {2, 3};
  cfg.delta = {0.25, 0.5};
  StudyReport rep = run_study(cfg);
  std::string csv = csv_string(rep);

  std::istringstream in(csv);
  CsvTable tab = parse_csv(in);
  REQUIRE(tab.header.size() == 10);
  CHECK(tab.header[0] == "level");
  CHECK(tab.header[2] == "delta1");
  CHECK(tab.header[3] == "delta2");
  CHECK(tab.header[9] == "rate_max");
  REQUIRE(tab.rows.size() == 2);
  REQUIRE(tab.rows[0].size() == 10);
  CHECK(tab.rows[0][0] == 2.0);
  CHECK(tab.rows[0][1] == Approx(0.25).margin(0.0));  // %.5e of 2^-2 is exact
  CHECK(std::isnan(tab.rows[0][5]));                  // first rate cell empty
  CHECK(!std::isnan(tab.rows[1][5]));

  // printed values round-trip at full printed precision
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5e", rep.rows[1].err_l2);
  CHECK(tab.rows[1][6] == Approx(std::strtod(buf, nullptr)).margin(0.0));

  SECTION("file round trip with a manifest") {
    std::string path = "study_roundtrip.csv";
    RunManifest man = write_report(rep, path, "study_roundtrip.svg");
    CsvTable disk = parse_csv_file(path);
    CHECK(disk.header == tab.header);
    REQUIRE(disk.rows.size() == 2);
    CHECK(disk.rows[1][6] == tab.rows[1][6]);
    CHECK(man.config_hash == config_hash(rep.cfg));
    CHECK(man.to_json().dump().find("\"tool\"") != std::string::npos);

    std::ifstream svg("study_roundtrip.svg");
    REQUIRE(svg);
    std::stringstream ss;
    ss << svg.rdbuf();
    std::string body = ss.str();
    size_t plines = 0, pos = 0;
    while ((pos = body.find("<polyline", pos)) != std::string::npos) {
      ++plines;
      pos += 9;
    }
    // one polyline per norm series plus the two order guides
    CHECK(plines == 5);
    CHECK(body.find("<line") != std::string::npos);
    std::remove(path.c_str());
    std::remove("study_roundtrip.svg");
    std::remove((path + ".manifest.json").c_str());
  }
}

TEST_CASE("config hashing is canonical", "[studies][report]") {
  StudyConfig a;
  a.example = "ex1";
  a.k = 2;
  a.levels = {2, 3};
  a.delta = {0.25, 0.5};
  StudyConfig b = a;
  CHECK(config_hash(a) == config_hash(b));
  b.k = 3;
  CHECK(config_hash(a) != config_hash(b));
  b = a;
  b.delta = {0.25, 0.25};
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("json config parsing", "[studies][config]") {
  auto js = nlohmann::json::parse(R"({
    "example": "ex1", "kind": "fixed_delta", "k": 1,
    "levels": [2,3,4,5], "delta": [0.25, 0.5]
  })");
  StudyConfig cfg = parse_config_json(js);
  CHECK(cfg.example == "ex1");
  CHECK(cfg.kind == StudyKind::fixed_delta);
  CHECK(cfg.k == 1);
  CHECK(cfg.levels == std::vector<int>{2, 3, 4, 5});
  CHECK(cfg.delta == std::vector<double>{0.25, 0.5});

  SECTION("unknown keys are rejected by name") {
    auto bad = js;
    bad["horizon"] = 0.1;
    try {
      parse_config_json(bad);
      FAIL("expected rejection");
    } catch (const config_error& e) {
      CHECK(std::string(e.what()).find("horizon") != std::string::npos);
    }
  }

  SECTION("structural validation") {
    auto bad = js;
    bad["delta"] = {0.3, 0.5};  // 0.3 not commensurate with 2^-5
    CHECK_THROWS_AS(parse_config_json(bad), config_error);
    bad = js;
    bad["levels"] = {3, 2};
    CHECK_THROWS_AS(parse_config_json(bad), config_error);
    bad = js;
    bad["delta"] = {0.25};
    CHECK_THROWS_AS(parse_config_json(bad), config_error);
    bad = js;
    bad["k"] = 9;
    CHECK_THROWS_AS(parse_config_json(bad), config_error);
    bad = js;
    bad["custom"] = {{"a", 0.0}};
    CHECK_THROWS_AS(parse_config_json(bad), config_error);
  }

  SECTION("overrides") {
    auto root = js;
    apply_override(root, "--k=3");
    apply_override(root, "output.csv=out.csv");
    StudyConfig c = parse_config_json(root);
    CHECK(c.k == 3);
    CHECK(c.csv_path == "out.csv");
  }

  SECTION("custom example block") {
    auto cs = nlohmann::json::parse(R"({
      "example": "custom", "kind": "fixed_delta", "k": 1, "levels": [2,3],
      "delta": [0.25, 0.25],
      "custom": {
        "a": 0.0, "b": 1.0, "interfaces": [0.52],
        "kernels": ["constant", "constant"],
        "exact": [
          [{"lo": -1e9, "hi": 1e9, "f": "x"}],
          [{"lo": -1e9, "hi": 1e9, "f": "x"}]
        ]
      }
    })");
    StudyConfig c = parse_config_json(cs);
    CHECK(c.example == "custom");
    Example ex = resolve_example(c);
    CHECK(ex.n_fields() == 2);
    CHECK(ex.exact[0].eval(0.3) == Approx(0.3).margin(1e-12));
    CHECK(!c.custom_sig.empty());

    StudyReport rep = run_study(c);
    REQUIRE(rep.rows.size() == 2);
    // u = x solves the custom problem exactly
    CHECK(rep.rows[0].err_max < 1e-8);
  }
}

TEST_CASE("resolution strings", "[studies][report]") {
  CHECK(parse_resolution("2^-5") == Approx(0.03125).margin(0.0));
  CHECK(parse_resolution("0.125") == Approx(0.125).margin(0.0));
  CHECK_THROWS_AS(parse_resolution("fine"), config_error);
}

#include <doctest.h>

#include <nlohmann/json.hpp>

#include "tmsat/error.hpp"
#include "tmsat/report.hpp"

using namespace tmsat;

namespace {

std::vector<ResultRow> sample_rows() {
  ResultRow a;
  a.table = "detection";
  a.h0 = 3000;
  a.r_a = 4;
  a.encoding = "tm";
  a.d = 3;
  a.eta1 = 0.1;
  a.compensation = "c-gdd";
  a.subspace = {0, 2, 4};
  a.p_e = 1.0 / 3.0;
  a.t_avg = 0.7123456789012345;

  ResultRow b = a;
  b.table = "qkd";
  b.encoding = "oam";
  b.compensation = "u-gdd";
  b.subspace = {-1, 0, 1};
  b.q = 0.05;
  b.k1 = 0.4968;
  b.k = 1e-300;
  b.c_mismatch = 0.99;
  b.seed = 7;
  b.ensemble_size = 50;
  b.saturated = true;

  ResultRow c = a;
  c.table = "qkd";
  c.d = 6;
  c.p_e.reset();
  c.t_avg.reset();
  c.subspace.clear();
  c.status = "error: unsupported-dimension, \"6\"";
  return {b, c, a};
}

}  // namespace

TEST_CASE("CSV round trip keeps every digit") {
  auto rows = sample_rows();
  sort_rows(rows);
  const auto path = std::filesystem::temp_directory_path() / "tmsat_test_report.csv";
  write_report(rows, ReportFormat::Csv, path);
  const auto back = read_csv(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].table == rows[i].table);
    CHECK(back[i].encoding == rows[i].encoding);
    CHECK(back[i].subspace == rows[i].subspace);
    CHECK(back[i].p_e == rows[i].p_e);
    CHECK(back[i].t_avg == rows[i].t_avg);
    CHECK(back[i].k == rows[i].k);
    CHECK(back[i].seed == rows[i].seed);
    CHECK(back[i].saturated == rows[i].saturated);
    CHECK(back[i].status == rows[i].status);
  }
  CHECK(csv_text(back) == csv_text(rows));
}

TEST_CASE("sorting is deterministic") {
  auto rows = sample_rows();
  sort_rows(rows);
  CHECK(rows[0].table == "detection");
  auto shuffled = sample_rows();
  std::swap(shuffled[0], shuffled[2]);
  sort_rows(shuffled);
  CHECK(csv_text(shuffled) == csv_text(rows));
}

TEST_CASE("JSON output") {
  auto rows = sample_rows();
  sort_rows(rows);
  const auto j = nlohmann::json::parse(json_text(rows));
  CHECK(j["schema_version"] == kResultsSchemaVersion);
  REQUIRE(j["rows"].size() == 3);
  bool saw_null = false;
  for (const auto& r : j["rows"]) {
    if (r["d"] == 6) {
      CHECK(r["p_e"].is_null());
      saw_null = true;
    }
  }
  CHECK(saw_null);
}

TEST_CASE("plot data") {
  const auto text = plot_data_text(sample_rows());
  CHECK(text.rfind("figure,panel_h0,panel_r_a,series_d,encoding,compensation,x_eta1,metric,y\n", 0) == 0);
  CHECK(text.find("error-probability") != std::string::npos);
  CHECK(text.find("key-rate") != std::string::npos);
}

TEST_CASE("format names and empty tables") {
  CHECK(parse_report_format("csv") == ReportFormat::Csv);
  CHECK(parse_report_format("json") == ReportFormat::Json);
  CHECK(parse_report_format("plot-data") == ReportFormat::PlotData);
  CHECK_THROWS_AS(parse_report_format("xml"), Error);
  const auto path = std::filesystem::temp_directory_path() / "tmsat_test_empty.csv";
  CHECK_THROWS_AS(write_report({}, ReportFormat::Csv, path), Error);
  CHECK_NOTHROW(write_report({}, ReportFormat::Csv, path, true));
}

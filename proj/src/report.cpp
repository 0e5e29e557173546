#include "tmsat/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tmsat/error.hpp"

namespace tmsat {

namespace {

const char* kColumns[] = {"table", "h0", "r_a", "encoding", "d", "eta1", "compensation", "subspace", "p_e", "q",
                          "t_avg", "c_mismatch", "k1", "k", "saturated", "seed", "ensemble_size", "status"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string join(const std::vector<int>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? std::string(1, sep) : "") + std::to_string(values[i]);
  return out;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  if (name == "plot-data" || name == "plot") return ReportFormat::PlotData;
  throw Error(ErrorKind::InvalidParameter, "unknown report format '" + name + "'");
}

std::string csv_text(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < std::size(kColumns); ++i) out << (i ? "," : "") << kColumns[i];
  out << "\n";
  for (const auto& r : rows) {
    out << r.table << ',' << num(r.h0) << ',' << num(r.r_a) << ',' << r.encoding << ',' << r.d << ','
        << num(r.eta1) << ',' << r.compensation << ',' << join(r.subspace, ';') << ',' << num(r.p_e) << ','
        << num(r.q) << ',' << num(r.t_avg) << ',' << num(r.c_mismatch) << ',' << num(r.k1) << ',' << num(r.k)
        << ',' << (r.saturated ? "true" : "false") << ',' << (r.seed ? std::to_string(*r.seed) : "") << ','
        << r.ensemble_size << ',' << quote(r.status) << "\n";
  }
  return out.str();
}

std::string json_text(const std::vector<ResultRow>& rows) {
  nlohmann::json doc;
  doc["schema_version"] = kResultsSchemaVersion;
  doc["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["table"] = r.table;
    j["h0"] = r.h0;
    j["r_a"] = r.r_a;
    j["encoding"] = r.encoding;
    j["d"] = r.d;
    j["eta1"] = r.eta1;
    j["compensation"] = r.compensation;
    j["subspace"] = r.subspace;
    j["p_e"] = opt(r.p_e);
    j["q"] = opt(r.q);
    j["t_avg"] = opt(r.t_avg);
    j["c_mismatch"] = opt(r.c_mismatch);
    j["k1"] = opt(r.k1);
    j["k"] = opt(r.k);
    j["saturated"] = r.saturated;
    j["seed"] = r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr);
    j["ensemble_size"] = r.ensemble_size;
    j["status"] = r.status;
    doc["rows"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::string plot_data_text(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "figure,panel_h0,panel_r_a,series_d,encoding,compensation,x_eta1,metric,y\n";
  for (const auto& r : rows) {
    const bool detection = r.table == "detection";
    const auto& y = detection ? r.p_e : r.k;
    if (!y) continue;
    out << (detection ? "error-probability" : "key-rate") << ',' << num(r.h0) << ',' << num(r.r_a) << ',' << r.d
        << ',' << r.encoding << ',' << r.compensation << ',' << num(r.eta1) << ',' << (detection ? "p_e" : "k")
        << ',' << num(*y) << "\n";
  }
  return out.str();
}

void write_report(const std::vector<ResultRow>& rows, ReportFormat format, const std::filesystem::path& path,
                  bool allow_empty) {
  if (rows.empty() && !allow_empty) throw Error(ErrorKind::InvalidParameter, "refusing to write an empty table");
  std::string text;
  switch (format) {
    case ReportFormat::Csv: text = csv_text(rows); break;
    case ReportFormat::Json: text = json_text(rows); break;
    case ReportFormat::PlotData: text = plot_data_text(rows); break;
  }
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw Error(ErrorKind::Io, path.string() + ": write failed");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::optional<double> opt_num(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::strtod(s.c_str(), nullptr);
}

}  // namespace

std::vector<ResultRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, path.string() + ": cannot open");
  std::string line;
  std::getline(in, line);
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != std::size(kColumns)) throw Error(ErrorKind::Io, path.string() + ": malformed row");
    ResultRow r;
    r.table = c[0];
    r.h0 = std::strtod(c[1].c_str(), nullptr);
    r.r_a = std::strtod(c[2].c_str(), nullptr);
    r.encoding = c[3];
    r.d = std::atoi(c[4].c_str());
    r.eta1 = std::strtod(c[5].c_str(), nullptr);
    r.compensation = c[6];
    std::stringstream ss(c[7]);
    std::string item;
    while (std::getline(ss, item, ';')) r.subspace.push_back(std::atoi(item.c_str()));
    r.p_e = opt_num(c[8]);
    r.q = opt_num(c[9]);
    r.t_avg = opt_num(c[10]);
    r.c_mismatch = opt_num(c[11]);
    r.k1 = opt_num(c[12]);
    r.k = opt_num(c[13]);
    r.saturated = c[14] == "true";
    if (!c[15].empty()) r.seed = std::strtoull(c[15].c_str(), nullptr, 10);
    r.ensemble_size = std::strtoull(c[16].c_str(), nullptr, 10);
    r.status = c[17];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace tmsat

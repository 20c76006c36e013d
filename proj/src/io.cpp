#include "qgca/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qgca/error.hpp"

namespace qgca {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string where(std::string_view source, std::size_t line, std::optional<std::size_t> column = std::nullopt) {
  std::string out = std::string(source) + ":" + std::to_string(line);
  if (column) out += ", column " + std::to_string(*column);
  return out;
}

}  // namespace

std::vector<TimeSeries> ChannelTable::to_series(bool center) const {
  std::vector<TimeSeries> out;
  out.reserve(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    TimeSeries s(names[c], columns[c]);
    out.push_back(center ? s.centered() : std::move(s));
  }
  return out;
}

ChannelTable parse_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return parse_csv(in, path.string());
}

ChannelTable parse_csv(std::istream& in, std::string_view source) {
  ChannelTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      constexpr std::string_view key = "sample_rate:";
      const auto body = trim(text.substr(1));
      if (body.starts_with(key)) {
        const auto value = trim(body.substr(key.size()));
        double rate = 0.0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), rate);
        if (ec == std::errc() && ptr == value.data() + value.size()) table.sample_rate = rate;
      }
      continue;
    }

    const auto cells = split_cells(text);
    if (!have_header) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].empty()) {
          throw Error(ErrorCode::ParseError, "empty channel name at " + where(source, line_no, c + 1));
        }
        if (std::find(table.names.begin(), table.names.end(), cells[c]) != table.names.end()) {
          throw Error(ErrorCode::ParseError,
                      "duplicate channel name '" + std::string(cells[c]) + "' at " + where(source, line_no, c + 1));
        }
        table.names.emplace_back(cells[c]);
      }
      table.columns.resize(table.names.size());
      have_header = true;
      continue;
    }

    if (cells.size() != table.names.size()) {
      throw Error(ErrorCode::RaggedRows, "expected " + std::to_string(table.names.size()) + " cells, found " +
                                             std::to_string(cells.size()) + " at " + where(source, line_no));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double value = 0.0;
      auto cell = cells[c];
      if (cell.size() > 1 && cell.front() == '+') cell.remove_prefix(1);
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw Error(ErrorCode::NonNumericCell,
                    "'" + std::string(cell) + "' is not a number at " + where(source, line_no, c + 1));
      }
      if (!std::isfinite(value)) {
        throw Error(ErrorCode::NonFinite, "non-finite value at " + where(source, line_no, c + 1));
      }
      table.columns[c].push_back(value);
    }
  }
  if (!have_header) throw Error(ErrorCode::ParseError, std::string(source) + " has no header row");
  return table;
}

void write_csv(const ChannelTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  if (table.sample_rate) out << "# sample_rate: " << format_number(*table.sample_rate) << '\n';
  for (std::size_t c = 0; c < table.names.size(); ++c) out << (c ? "," : "") << table.names[c];
  out << '\n';
  for (std::size_t t = 0; t < table.samples(); ++t) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << format_number(table.columns[c][t]);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::Json;
  if (text == "csv") return ReportFormat::Csv;
  throw Error(ErrorCode::InvalidParams, "unknown report format '" + std::string(text) + "'");
}

nlohmann::json config_json(const GcaConfig& config) {
  const auto& cc = config.criterion_config;
  return {{"criterion", to_string(config.criterion)},
          {"sigma", cc.sigma},
          {"epsilon", cc.epsilon},
          {"iters", cc.max_iters},
          {"tol", cc.tol},
          {"ridge", cc.ridge},
          {"p_max", config.p_max},
          {"order_rule", to_string(config.order_rule)},
          {"fixed_order", config.fixed_order},
          {"bic_variant", to_string(config.bic_variant)},
          {"common_order", config.common_order}};
}

nlohmann::json report_json(const ChannelAnalysis& analysis, const GcaConfig& config,
                           const nlohmann::json& extra_config) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json doc;
  doc["criterion"] = to_string(config.criterion);
  doc["config"] = config_json(config);
  for (const auto& [key, value] : extra_config.items()) doc["config"][key] = value;
  doc["channels"] = analysis.names;
  doc["pairs"] = nlohmann::json::array();
  for (const auto& p : analysis.pairs) {
    nlohmann::json entry{{"from", analysis.names[p.from]},
                         {"to", analysis.names[p.to]},
                         {"f", finite_or_null(p.f)},
                         {"f_clamped", finite_or_null(p.f_clamped)},
                         {"order", p.full_order},
                         {"restricted_order", p.restricted_order},
                         {"warnings", p.warnings}};
    if (p.error) entry["error"] = *p.error;
    doc["pairs"].push_back(std::move(entry));
  }
  doc["matrix"] = nlohmann::json::array();
  for (const auto& row : analysis.matrix) {
    nlohmann::json r = nlohmann::json::array();
    for (double v : row) r.push_back(finite_or_null(v));
    doc["matrix"].push_back(std::move(r));
  }
  return doc;
}

std::string report_csv(const ChannelAnalysis& analysis, const GcaConfig& config) {
  std::ostringstream out;
  out << "from,to,f,p,criterion\n";
  for (const auto& p : analysis.pairs) {
    out << analysis.names[p.from] << ',' << analysis.names[p.to] << ',' << format_number(p.f) << ',' << p.full_order
        << ',' << to_string(config.criterion) << '\n';
  }
  return out.str();
}

void emit_report(const ChannelAnalysis& analysis, const GcaConfig& config, ReportFormat format,
                 const std::filesystem::path& path, const nlohmann::json& extra_config) {
  if (analysis.pairs.empty()) throw Error(ErrorCode::InvalidParams, "no causality pairs to report");
  const std::string body = format == ReportFormat::Json ? report_json(analysis, config, extra_config).dump(2) + "\n"
                                                        : report_csv(analysis, config);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out << body;
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

}  // namespace qgca

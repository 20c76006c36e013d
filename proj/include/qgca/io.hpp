#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "qgca/gca.hpp"
#include "qgca/timeseries.hpp"

namespace qgca {

/// Equal-length numeric columns read from a CSV file.
struct ChannelTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::optional<double> sample_rate;

  std::size_t samples() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
  std::vector<TimeSeries> to_series(bool center = false) const;
};

/// CSV layout: a header row of channel names, then one numeric row per
/// sample. Lines starting with '#' are comments; a comment of the form
/// "# sample_rate: <Hz>" is kept as metadata.
ChannelTable parse_csv(const std::filesystem::path& path);
ChannelTable parse_csv(std::istream& in, std::string_view source = "<stream>");

void write_csv(const ChannelTable& table, const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `value`; "nan"/"inf" for non-finite.
std::string format_number(double value);

enum class ReportFormat { Json, Csv };

ReportFormat parse_report_format(std::string_view text);

/// Report document: criterion, resolved configuration, one entry per directed
/// pair and the from/to index matrix (null for undefined entries).
nlohmann::json report_json(const ChannelAnalysis& analysis, const GcaConfig& config,
                           const nlohmann::json& extra_config = nlohmann::json::object());

/// One row per directed pair: from,to,f,p,criterion.
std::string report_csv(const ChannelAnalysis& analysis, const GcaConfig& config);

nlohmann::json config_json(const GcaConfig& config);

/// Writes the report; throws InvalidParams (nothing written) when there are no
/// pairs and IoError when the file cannot be written.
void emit_report(const ChannelAnalysis& analysis, const GcaConfig& config, ReportFormat format,
                 const std::filesystem::path& path,
                 const nlohmann::json& extra_config = nlohmann::json::object());

}  // namespace qgca

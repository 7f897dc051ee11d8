#pragma once

#include <set>
#include <string>

#include "pmhd/sweep.hpp"

namespace pmhd {

enum class ReportFormat { csv, json, markdown };

/// Write the report into `dir` in the requested formats. Output is
/// byte-stable for identical inputs: fixed field ordering and shortest
/// round-trip float formatting throughout.
///   csv:      errors.csv, slopes.csv, bounds.csv, density.csv, inversion.csv
///   json:     report.json
///   markdown: summary.md
void emit_report(const SweepReport& report, const std::set<ReportFormat>& formats,
                 const std::string& dir);

/// JSON form of the report (what report.json holds).
std::string report_to_json(const SweepReport& report);

/// Markdown summary rendered from a report.json payload; used both when
/// emitting and by the `report <dir>` subcommand.
std::string summary_from_json(const std::string& report_json);

/// Overall pass flag of a serialized report (drives the CLI exit code).
bool report_pass_from_json(const std::string& report_json);

}  // namespace pmhd

#pragma once

// Event-log ingestion. The log is newline-delimited JSON, one record per
// line, with a `type` discriminator of "report", "sample" or "profile"
// (schema in docs/formats.md). Malformed lines are skipped and collected
// as diagnostics; valid lines are preserved in input order.

#include <iosfwd>
#include <string>
#include <vector>

#include "sxp/types.hpp"

namespace sxp {

struct IngestDiagnostic {
    std::size_t line_no = 0;  // 1-based
    std::string message;
};

struct IngestResult {
    std::vector<ValenceReport> reports;
    std::vector<SensorSample> samples;
    std::vector<EntityProfile> profiles;
    std::vector<IngestDiagnostic> diagnostics;
    std::size_t lines_read = 0;  // non-empty lines seen
    // raw `provenance` records (reconstructed-output headers), in order
    std::vector<std::string> provenance_lines;
};

// Throws std::runtime_error if the stream itself is unreadable.
IngestResult ingest_events(std::istream& in);
IngestResult ingest_events_file(const std::string& path);

std::string report_to_json_line(const ValenceReport& r);
std::string sample_to_json_line(const SensorSample& s);
std::string profile_to_json_line(const EntityProfile& p);

// Collapses rapid repeated reports: within any run of same-entity Button
// reports whose consecutive gaps are strictly below `window_ms`, only the
// final report survives. DetectedText reports pass through untouched.
// Input must be time-sorted per entity; throws std::invalid_argument
// otherwise.
std::vector<ValenceReport> debounce_reports(const std::vector<ValenceReport>& reports,
                                            std::int64_t window_ms = 2000);

}  // namespace sxp

#pragma once

// Plain-CSV interchange: failure event logs, run manifests and dense curves.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rtg/curves.hpp"

namespace rtg::io {

/// One manifest row: a subject and the shape of its sessions.
struct ManifestEntry {
    std::string subject;
    std::int64_t sessions = 0;
    std::int64_t draws_per_session = 0;
};

/// 6 significant digits in mantissa-exponent form; "NaN", "Inf", "-Inf".
std::string format_sci(double v);

/// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);
std::string quote_csv(std::string_view field);

/// Writes `content` to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

std::string event_log_csv(const std::vector<FailureEvent>& events);
/// Throws MalformedLog on bad rows and IoError when unreadable.
std::vector<FailureEvent> parse_event_log(std::string_view text);
std::vector<FailureEvent> read_event_log(const std::filesystem::path& path);

std::string manifest_csv(const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> parse_manifest(std::string_view text);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

std::string dense_curve_csv(const std::vector<double>& values);
AggregateCurve parse_dense_curve(std::string_view text);
AggregateCurve read_dense_curve(const std::filesystem::path& path);

/// Groups events by session id (0..sessions-1) and builds one curve per
/// session. Throws MalformedLog for ids outside that range.
Dataset dataset_from_events(const ManifestEntry& entry, const std::vector<FailureEvent>& events);

/// File names used inside a run directory.
inline constexpr std::string_view kManifestFile = "manifest.csv";
std::string events_file(std::string_view subject);
std::string curve_file(std::string_view subject);

}  // namespace rtg::io

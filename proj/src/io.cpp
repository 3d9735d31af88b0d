#include "rtg/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "rtg/errors.hpp"

namespace rtg::io {

namespace {

template <class F>
void for_each_line(std::string_view text, F&& f) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (!line.empty() && line.front() != '#') f(line, line_no);
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
}

std::int64_t parse_int(const std::string& s, std::size_t line_no) {
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        throw MalformedLog("line " + std::to_string(line_no) + ": bad integer '" + s + "'");
    return v;
}

double parse_real(const std::string& s, std::size_t line_no) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw MalformedLog("line " + std::to_string(line_no) + ": bad number '" + s + "'");
    return v;
}

void expect_header(std::string_view line, std::string_view header, std::size_t line_no) {
    if (line != header)
        throw MalformedLog("line " + std::to_string(line_no) + ": expected header '" +
                           std::string(header) + "'");
}

}  // namespace

std::string format_sci(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.push_back(std::move(field));
    return out;
}

std::string quote_csv(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename into " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string event_log_csv(const std::vector<FailureEvent>& events) {
    std::string out = "session_id,test_index,signature,counted\n";
    for (const auto& e : events) {
        out.append(std::to_string(e.session_id)).push_back(',');
        out.append(std::to_string(e.test_index)).push_back(',');
        out.append(quote_csv(e.signature)).push_back(',');
        out.append(e.counted ? "1\n" : "0\n");
    }
    return out;
}

std::vector<FailureEvent> parse_event_log(std::string_view text) {
    std::vector<FailureEvent> out;
    bool header = true;
    for_each_line(text, [&](std::string_view line, std::size_t n) {
        if (header) {
            expect_header(line, "session_id,test_index,signature,counted", n);
            header = false;
            return;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 4) throw MalformedLog("line " + std::to_string(n) + ": expected 4 fields");
        FailureEvent e{parse_int(f[0], n), parse_int(f[1], n), f[2], false};
        if (e.signature.empty()) throw MalformedLog("line " + std::to_string(n) + ": empty signature");
        if (f[3] == "1" || f[3] == "true") e.counted = true;
        else if (f[3] != "0" && f[3] != "false")
            throw MalformedLog("line " + std::to_string(n) + ": bad counted flag");
        out.push_back(std::move(e));
    });
    if (header) throw MalformedLog("event log has no header");
    return out;
}

std::vector<FailureEvent> read_event_log(const std::filesystem::path& path) {
    return parse_event_log(read_file(path));
}

std::string manifest_csv(const std::vector<ManifestEntry>& entries) {
    std::string out = "subject,sessions,draws_per_session\n";
    for (const auto& e : entries) {
        out.append(quote_csv(e.subject)).push_back(',');
        out.append(std::to_string(e.sessions)).push_back(',');
        out.append(std::to_string(e.draws_per_session)).push_back('\n');
    }
    return out;
}

std::vector<ManifestEntry> parse_manifest(std::string_view text) {
    std::vector<ManifestEntry> out;
    bool header = true;
    for_each_line(text, [&](std::string_view line, std::size_t n) {
        if (header) {
            expect_header(line, "subject,sessions,draws_per_session", n);
            header = false;
            return;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 3) throw MalformedLog("line " + std::to_string(n) + ": expected 3 fields");
        ManifestEntry e{f[0], parse_int(f[1], n), parse_int(f[2], n)};
        if (e.subject.empty() || e.sessions < 1 || e.draws_per_session < 1)
            throw MalformedLog("line " + std::to_string(n) + ": invalid manifest entry");
        out.push_back(std::move(e));
    });
    if (header) throw MalformedLog("manifest has no header");
    return out;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    return parse_manifest(read_file(path));
}

std::string dense_curve_csv(const std::vector<double>& values) {
    std::string out = "k,value\n";
    out.reserve(values.size() * 20);
    for (std::size_t k = 0; k < values.size(); ++k) {
        out.append(std::to_string(k)).push_back(',');
        out.append(format_sci(values[k])).push_back('\n');
    }
    return out;
}

AggregateCurve parse_dense_curve(std::string_view text) {
    AggregateCurve c;
    bool header = true;
    for_each_line(text, [&](std::string_view line, std::size_t n) {
        if (header) {
            expect_header(line, "k,value", n);
            header = false;
            return;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 2) throw MalformedLog("line " + std::to_string(n) + ": expected 2 fields");
        const auto k = parse_int(f[0], n);
        if (k != static_cast<std::int64_t>(c.values.size()))
            throw MalformedLog("line " + std::to_string(n) + ": indices must run 0, 1, 2, ...");
        c.values.push_back(parse_real(f[1], n));
    });
    if (c.values.empty()) throw MalformedLog("dense curve has no rows");
    return c;
}

AggregateCurve read_dense_curve(const std::filesystem::path& path) {
    return parse_dense_curve(read_file(path));
}

Dataset dataset_from_events(const ManifestEntry& entry, const std::vector<FailureEvent>& events) {
    std::map<std::int64_t, std::vector<FailureEvent>> by_session;
    for (const auto& e : events) {
        if (e.session_id < 0 || e.session_id >= entry.sessions)
            throw MalformedLog("session id " + std::to_string(e.session_id) + " outside manifest range");
        by_session[e.session_id].push_back(e);
    }
    Dataset d;
    d.subject = entry.subject;
    for (std::int64_t s = 0; s < entry.sessions; ++s) {
        const auto it = by_session.find(s);
        if (it == by_session.end()) d.curves.push_back(build_curve({}, entry.draws_per_session));
        else d.curves.push_back(build_curve(it->second, entry.draws_per_session));
    }
    return d;
}

std::string events_file(std::string_view subject) { return std::string(subject) + ".events.csv"; }
std::string curve_file(std::string_view subject) { return std::string(subject) + ".curve.csv"; }

}  // namespace rtg::io

#include "sxp/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sxp {

namespace {

using nlohmann::json;

std::string require_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        throw std::runtime_error(std::string("missing string field `") + key + "`");
    return it->get<std::string>();
}

double require_number(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number())
        throw std::runtime_error(std::string("missing numeric field `") + key + "`");
    return it->get<double>();
}

ValenceReport parse_report(const json& j) {
    ValenceReport r;
    r.entity_id = require_string(j, "entity");
    r.at = parse_rfc3339_or_throw(require_string(j, "at"));
    r.tz = require_string(j, "tz");
    const auto cls = valence_from_string(require_string(j, "class"));
    if (!cls) throw std::runtime_error("bad `class` value");
    r.valence = *cls;
    const auto origin = origin_from_string(require_string(j, "origin"));
    if (!origin) throw std::runtime_error("bad `origin` value");
    r.origin = *origin;
    return r;
}

SensorSample parse_sample(const json& j) {
    SensorSample s;
    s.entity_id = require_string(j, "entity");
    s.at = parse_rfc3339_or_throw(require_string(j, "at"));
    const std::string kind = require_string(j, "kind");
    if (kind == "location") {
        s.kind = SampleKind::Location;
        s.lat = require_number(j, "lat");
        s.lon = require_number(j, "lon");
        s.accuracy_m = j.value("accuracy_m", 0.0);
        if (!std::isfinite(s.lat) || s.lat < -90.0 || s.lat > 90.0)
            throw std::runtime_error("lat out of range");
        if (!std::isfinite(s.lon) || s.lon <= -180.0 || s.lon > 180.0)
            throw std::runtime_error("lon out of range");
        if (!std::isfinite(s.accuracy_m) || s.accuracy_m < 0.0)
            throw std::runtime_error("accuracy_m out of range");
    } else if (kind == "activity") {
        s.kind = SampleKind::Activity;
        if (j.contains("lat") || j.contains("lon"))
            throw std::runtime_error("activity sample must not carry coordinates");
    } else {
        throw std::runtime_error("bad `kind` value");
    }
    s.synthetic = j.value("synthetic", false);
    return s;
}

EntityProfile parse_profile(const json& j) {
    EntityProfile p;
    p.entity_id = require_string(j, "entity");
    if (j.contains("age_years") && !j["age_years"].is_null()) {
        if (!j["age_years"].is_number_integer() || j["age_years"].get<int>() < 0)
            throw std::runtime_error("bad `age_years` value");
        p.age_years = j["age_years"].get<int>();
    }
    if (j.contains("gender") && !j["gender"].is_null()) {
        const auto g = gender_from_string(j["gender"].get<std::string>());
        if (!g) throw std::runtime_error("bad `gender` value");
        p.gender = *g;
    }
    return p;
}

}  // namespace

IngestResult ingest_events(std::istream& in) {
    if (!in) throw std::runtime_error("unreadable event stream");
    IngestResult out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++out.lines_read;
        try {
            const json j = json::parse(line);
            const std::string type = require_string(j, "type");
            if (type == "report") {
                out.reports.push_back(parse_report(j));
            } else if (type == "sample") {
                out.samples.push_back(parse_sample(j));
            } else if (type == "profile") {
                out.profiles.push_back(parse_profile(j));
            } else if (type == "provenance") {
                out.provenance_lines.push_back(line);
            } else {
                throw std::runtime_error("unknown record type `" + type + "`");
            }
        } catch (const std::exception& e) {
            out.diagnostics.push_back({line_no, e.what()});
        }
    }
    if (in.bad()) throw std::runtime_error("I/O error while reading event stream");
    return out;
}

IngestResult ingest_events_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open event log: " + path);
    return ingest_events(in);
}

std::string report_to_json_line(const ValenceReport& r) {
    nlohmann::ordered_json j;
    j["type"] = "report";
    j["entity"] = r.entity_id;
    j["at"] = format_rfc3339(r.at);
    j["tz"] = r.tz;
    j["class"] = to_string(r.valence);
    j["origin"] = to_string(r.origin);
    return j.dump();
}

std::string sample_to_json_line(const SensorSample& s) {
    nlohmann::ordered_json j;
    j["type"] = "sample";
    j["entity"] = s.entity_id;
    j["at"] = format_rfc3339(s.at);
    j["kind"] = s.kind == SampleKind::Location ? "location" : "activity";
    if (s.kind == SampleKind::Location) {
        j["lat"] = s.lat;
        j["lon"] = s.lon;
        j["accuracy_m"] = s.accuracy_m;
    }
    if (s.synthetic) j["synthetic"] = true;
    return j.dump();
}

std::string profile_to_json_line(const EntityProfile& p) {
    nlohmann::ordered_json j;
    j["type"] = "profile";
    j["entity"] = p.entity_id;
    if (p.age_years) j["age_years"] = *p.age_years;
    if (p.gender) j["gender"] = to_string(*p.gender);
    return j.dump();
}

std::vector<ValenceReport> debounce_reports(const std::vector<ValenceReport>& reports,
                                            std::int64_t window_ms) {
    if (window_ms <= 0) throw std::invalid_argument("debounce window must be positive");
    std::map<std::string, Instant> last_at;
    for (const auto& r : reports) {
        auto it = last_at.find(r.entity_id);
        if (it != last_at.end() && r.at < it->second)
            throw std::invalid_argument("reports not time-sorted per entity");
        last_at[r.entity_id] = r.at;
    }

    // Per entity: keep only the final report of each sub-window burst.
    std::vector<ValenceReport> out;
    out.reserve(reports.size());
    std::map<std::string, std::size_t> pending;  // entity -> index in `out`
    for (const auto& r : reports) {
        if (r.origin != ReportOrigin::Button) {
            out.push_back(r);
            continue;
        }
        auto it = pending.find(r.entity_id);
        if (it != pending.end() && r.at - out[it->second].at < window_ms) {
            out[it->second] = r;  // last hit wins
        } else {
            pending[r.entity_id] = out.size();
            out.push_back(r);
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ValenceReport& a, const ValenceReport& b) { return a.at < b.at; });
    return out;
}

}  // namespace sxp

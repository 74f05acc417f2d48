#pragma once

#include "heatframe/io.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <string>
#include <vector>

namespace heatframe {

using Json = nlohmann::json;

struct Section {
    std::string name;
    bool pass = false;
    Json records = Json::array();
    double duration_ms = 0.0;

    void add(Json record) { records.push_back(std::move(record)); }
};

struct Report {
    Json meta = Json::object();
    std::vector<Section> sections;

    Section* find(const std::string& name) {
        for (auto& s : sections)
            if (s.name == name) return &s;
        return nullptr;
    }
    bool all_pass() const {
        for (const auto& s : sections)
            if (!s.pass) return false;
        return !sections.empty();
    }

    Json to_json() const {
        Json out;
        out["meta"] = meta;
        out["sections"] = Json::array();
        for (const auto& s : sections) {
            Json js;
            js["name"] = s.name;
            js["pass"] = s.pass;
            js["duration_ms"] = s.duration_ms;
            js["records"] = s.records;
            out["sections"].push_back(std::move(js));
        }
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << to_json().dump(2) << '\n';
    }

    static Report from_json(const Json& j) {
        Report rep;
        rep.meta = j.value("meta", Json::object());
        for (const auto& js : j.at("sections")) {
            Section s;
            s.name = js.at("name").get<std::string>();
            s.pass = js.at("pass").get<bool>();
            s.duration_ms = js.value("duration_ms", 0.0);
            s.records = js.value("records", Json::array());
            rep.sections.push_back(std::move(s));
        }
        return rep;
    }
};

namespace detail {

inline std::string csv_cell(const Json& v) {
    if (v.is_number_float()) return fmt_f64(v.get<double>());
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

} // namespace detail

/// Deterministic CSV for a tabular section: sorted union of record keys as
/// the header, one row per record, LF endings, float64 at 17 digits.
inline void emit_csv(const Report& report, const std::string& section_name,
                     const std::string& path) {
    const Section* sec = nullptr;
    for (const auto& s : report.sections)
        if (s.name == section_name) sec = &s;
    if (!sec) throw std::invalid_argument("emit_csv: unknown section " + section_name);

    std::vector<std::string> columns;
    for (const auto& rec : sec->records)
        for (auto it = rec.begin(); it != rec.end(); ++it)
            if (std::find(columns.begin(), columns.end(), it.key()) == columns.end())
                columns.push_back(it.key());
    std::sort(columns.begin(), columns.end());

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << '\n';
    for (const auto& rec : sec->records) {
        for (size_t c = 0; c < columns.size(); ++c) {
            if (c) out << ',';
            if (rec.contains(columns[c])) out << detail::csv_cell(rec.at(columns[c]));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

class SectionTimer {
public:
    explicit SectionTimer(Section& s) : section_(s), start_(std::chrono::steady_clock::now()) {}
    ~SectionTimer() {
        section_.duration_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
                .count();
    }

private:
    Section& section_;
    std::chrono::steady_clock::time_point start_;
};

} // namespace heatframe

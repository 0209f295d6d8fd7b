#include "bita/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

#include "bita/errors.hpp"

namespace bita::report {

namespace {

bool needs_quoting(const std::string& v) {
    if (v.empty()) return true;
    return v.find_first_of(" \t\"=\\") != std::string::npos;
}

std::string quote(const std::string& v) {
    if (!needs_quoting(v)) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Record::Record(std::string kind) { fields_.emplace_back("record", std::move(kind)); }

Record& Record::field(const std::string& key, const std::string& value) {
    fields_.emplace_back(key, value);
    return *this;
}
Record& Record::field(const std::string& key, const char* value) {
    return field(key, std::string(value));
}
Record& Record::field(const std::string& key, double value) {
    return field(key, format_double(value));
}
Record& Record::field(const std::string& key, std::size_t value) {
    return field(key, std::to_string(value));
}
Record& Record::field(const std::string& key, int value) {
    return field(key, std::to_string(value));
}
Record& Record::field(const std::string& key, bool value) {
    return field(key, std::string(value ? "true" : "false"));
}

std::string Record::line() const {
    std::string out;
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (i) out += ' ';
        out += fields_[i].first;
        out += '=';
        out += quote(fields_[i].second);
    }
    return out;
}

Record header(const std::string& kind) {
    Record r("header");
    r.field("kind", kind)
        .field("schema_version", kSchemaVersion)
        .field("tool_version", kToolVersion);
    return r;
}

void write_records(const std::string& path, const std::vector<Record>& records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open report for writing: " + path);
    for (const Record& r : records) out << r.line() << '\n';
}

std::vector<std::vector<std::pair<std::string, std::string>>> read_records(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report: " + path);
    std::vector<std::vector<std::pair<std::string, std::string>>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::pair<std::string, std::string>> rec;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && line[i] == ' ') ++i;
            if (i >= line.size()) break;
            const std::size_t eq = line.find('=', i);
            if (eq == std::string::npos) throw IoError("malformed record in " + path);
            std::string key = line.substr(i, eq - i);
            std::string value;
            i = eq + 1;
            if (i < line.size() && line[i] == '"') {
                ++i;
                while (i < line.size() && line[i] != '"') {
                    if (line[i] == '\\' && i + 1 < line.size()) ++i;
                    value += line[i++];
                }
                ++i;  // closing quote
            } else {
                const std::size_t sp = line.find(' ', i);
                value = line.substr(i, sp == std::string::npos ? sp : sp - i);
                i = sp == std::string::npos ? line.size() : sp;
            }
            rec.emplace_back(std::move(key), std::move(value));
        }
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace bita::report

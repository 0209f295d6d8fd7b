#pragma once

#include <string>
#include <utility>
#include <vector>

namespace bita::report {

constexpr int kSchemaVersion = 1;
constexpr const char* kToolVersion = "0.1.0";

/// One structured record: ordered field=value pairs, one record per line.
/// Values containing spaces, quotes, or '=' are double-quoted with
/// backslash escapes.
class Record {
public:
    explicit Record(std::string kind);
    Record& field(const std::string& key, const std::string& value);
    Record& field(const std::string& key, const char* value);
    Record& field(const std::string& key, double value);
    Record& field(const std::string& key, std::size_t value);
    Record& field(const std::string& key, int value);
    Record& field(const std::string& key, bool value);

    std::string line() const;
    const std::vector<std::pair<std::string, std::string>>& fields() const {
        return fields_;
    }

private:
    std::vector<std::pair<std::string, std::string>> fields_;
};

/// First record of every report file.
Record header(const std::string& kind);

void write_records(const std::string& path, const std::vector<Record>& records);

/// Parses a record file back into key/value lists (tests, tooling).
std::vector<std::vector<std::pair<std::string, std::string>>> read_records(
    const std::string& path);

}  // namespace bita::report

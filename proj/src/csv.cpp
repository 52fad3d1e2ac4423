#include "tcva/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>

#include "tcva/error.hpp"

namespace tcva {

std::string format_double(double value) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) fail(Errc::io, "cannot format double");
    return std::string(buf, end);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string escaped = "\"";
    for (char c : field) {
        if (c == '"') escaped += "\"\"";
        else escaped.push_back(c);
    }
    escaped.push_back('"');
    return escaped;
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

void write_score_csv(const std::string& path, const std::vector<ScoreRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(Errc::io, "cannot write score table '" + path + "'");
    out << kScoreCsvHeader << '\n';
    for (const auto& row : rows) {
        out << csv_escape(row.sample_id) << ',' << format_double(row.temperature) << ','
            << csv_escape(row.scheme) << ',' << csv_escape(row.variant) << ','
            << format_double(row.raw_score) << ',' << format_double(row.penalty_factor) << ','
            << format_double(row.final_score) << '\n';
    }
}

namespace {

double parse_double_field(const std::string& text, const std::string& path, std::size_t line_no) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        fail(Errc::schema,
             path + ":" + std::to_string(line_no) + ": '" + text + "' is not a number");
    return value;
}

} // namespace

std::vector<ScoreRow> read_score_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open score table '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) fail(Errc::empty_input, "score table '" + path + "' is empty");
    const auto header = csv_split(line);
    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
    if (!column.count("sample_id") || !column.count("final_score"))
        fail(Errc::schema, "score table '" + path + "' needs sample_id and final_score columns");

    auto field = [&](const std::vector<std::string>& fields, const char* name,
                     const std::string& fallback) -> std::string {
        auto it = column.find(name);
        if (it == column.end() || it->second >= fields.size()) return fallback;
        return fields[it->second];
    };

    std::vector<ScoreRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = csv_split(line);
        ScoreRow row;
        row.sample_id = field(fields, "sample_id", "");
        if (row.sample_id.empty())
            fail(Errc::schema, path + ":" + std::to_string(line_no) + ": empty sample_id");
        row.temperature = parse_double_field(field(fields, "temperature", "0"), path, line_no);
        row.scheme = field(fields, "scheme", "Default");
        row.variant = field(fields, "variant", "method");
        row.raw_score = parse_double_field(field(fields, "raw_score", "0"), path, line_no);
        row.penalty_factor =
            parse_double_field(field(fields, "penalty_factor", "1"), path, line_no);
        row.final_score = parse_double_field(field(fields, "final_score", "0"), path, line_no);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(Errc::empty_input, "score table '" + path + "' holds no rows");
    return rows;
}

} // namespace tcva

#pragma once

#include <string>
#include <vector>

namespace tcva {

// Shortest round-trip decimal representation (std::to_chars), so score files
// are stable across runs and reparse to the identical double.
std::string format_double(double value);

// One row of a score table.
struct ScoreRow {
    std::string sample_id;
    double temperature = 0.0;
    std::string scheme;
    std::string variant;
    double raw_score = 0.0;
    double penalty_factor = 1.0;
    double final_score = 0.0;
};

inline constexpr const char* kScoreCsvHeader =
    "sample_id,temperature,scheme,variant,raw_score,penalty_factor,final_score";

void write_score_csv(const std::string& path, const std::vector<ScoreRow>& rows);

// Reads a score table. Requires at least sample_id and final_score columns;
// the other columns default when absent so plain (sample_id, final_score)
// baseline files load too.
std::vector<ScoreRow> read_score_csv(const std::string& path);

// Low-level helpers shared by the writers above.
std::string csv_escape(const std::string& field);
std::vector<std::string> csv_split(const std::string& line);

} // namespace tcva

#pragma once

#include <string>
#include <vector>

#include "tcva/judge.hpp"

namespace tcva {

// Reads a JSON Lines dataset: one sample per line with fields id, question,
// answer (required), contexts (array of strings, default empty), human_score
// (optional) and likert_range (two-number array, optional). A declared
// likert_range [lo, hi] normalizes human_score to (v - lo) / (hi - lo).
// Errors name the offending line; duplicate ids are rejected.
std::vector<EvaluationSample> load_dataset(const std::string& path);

// Writes samples in the same layout (human scores already normalized, so no
// likert_range is emitted).
void save_dataset(const std::string& path, const std::vector<EvaluationSample>& samples);

// Converters from public benchmark layouts into the dataset layout above.
// Input formats are documented in the README.

// SummEval (mteb/summeval JSONL export): each line holds one source article
// with parallel arrays of machine summaries and 1-5 expert ratings.
// `dimension` picks the rating array, e.g. "consistency" or "relevance".
std::size_t convert_summeval(const std::string& input_path, const std::string& output_path,
                             const std::string& dimension);

// USR (shikib.com layout): a JSON array of contexts, each carrying fact text
// and responses annotated on 1-3 scales. `dimension` picks the annotation,
// e.g. "Maintains Context".
std::size_t convert_usr(const std::string& input_path, const std::string& output_path,
                        const std::string& dimension);

} // namespace tcva

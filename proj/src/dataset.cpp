#include "tcva/dataset.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "tcva/error.hpp"

namespace tcva {

using nlohmann::json;

namespace {

[[noreturn]] void fail_line(const std::string& path, std::size_t line_no,
                            const std::string& message) {
    fail(Errc::schema, path + ":" + std::to_string(line_no) + ": " + message);
}

std::string require_string(const json& doc, const char* field, const std::string& path,
                           std::size_t line_no) {
    if (!doc.contains(field))
        fail_line(path, line_no, std::string("missing required field \"") + field + "\"");
    if (!doc.at(field).is_string())
        fail_line(path, line_no, std::string("field \"") + field + "\" must be a string");
    return doc.at(field).get<std::string>();
}

} // namespace

std::vector<EvaluationSample> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open dataset '" + path + "'");

    std::vector<EvaluationSample> samples;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        json doc = json::parse(line, nullptr, false);
        if (doc.is_discarded() || !doc.is_object())
            fail_line(path, line_no, "line is not a JSON object");

        EvaluationSample sample;
        sample.id = require_string(doc, "id", path, line_no);
        sample.question = require_string(doc, "question", path, line_no);
        sample.answer = require_string(doc, "answer", path, line_no);
        if (sample.id.empty()) fail_line(path, line_no, "\"id\" must be nonempty");
        if (sample.answer.empty()) fail_line(path, line_no, "\"answer\" must be nonempty");
        if (!seen_ids.insert(sample.id).second)
            fail_line(path, line_no, "duplicate sample id '" + sample.id + "'");

        if (doc.contains("contexts")) {
            if (!doc.at("contexts").is_array())
                fail_line(path, line_no, "\"contexts\" must be an array of strings");
            for (const auto& ctx : doc.at("contexts")) {
                if (!ctx.is_string())
                    fail_line(path, line_no, "\"contexts\" must be an array of strings");
                sample.contexts.push_back(ctx.get<std::string>());
            }
        }

        if (doc.contains("human_score") && !doc.at("human_score").is_null()) {
            if (!doc.at("human_score").is_number())
                fail_line(path, line_no, "\"human_score\" must be a number");
            double score = doc.at("human_score").get<double>();
            if (doc.contains("likert_range")) {
                const auto& range = doc.at("likert_range");
                if (!range.is_array() || range.size() != 2 || !range[0].is_number() ||
                    !range[1].is_number())
                    fail_line(path, line_no, "\"likert_range\" must be a two-number array");
                const double lo = range[0].get<double>();
                const double hi = range[1].get<double>();
                if (!(hi > lo)) fail_line(path, line_no, "likert_range requires hi > lo");
                if (score < lo || score > hi)
                    fail_line(path, line_no, "human_score outside declared likert_range");
                score = (score - lo) / (hi - lo);
            }
            if (!(score >= 0.0 && score <= 1.0))
                fail_line(path, line_no,
                          "human_score must lie in [0,1] (declare likert_range to normalize)");
            sample.human_score = score;
        }

        samples.push_back(std::move(sample));
    }
    if (samples.empty()) fail(Errc::empty_input, "dataset '" + path + "' holds no samples");
    return samples;
}

void save_dataset(const std::string& path, const std::vector<EvaluationSample>& samples) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(Errc::io, "cannot write dataset '" + path + "'");
    for (const auto& sample : samples) {
        json doc{{"id", sample.id}, {"question", sample.question}, {"answer", sample.answer},
                 {"contexts", sample.contexts}};
        if (sample.human_score) doc["human_score"] = *sample.human_score;
        out << doc.dump() << '\n';
    }
}

std::size_t convert_summeval(const std::string& input_path, const std::string& output_path,
                             const std::string& dimension) {
    std::ifstream in(input_path);
    if (!in) fail(Errc::io, "cannot open '" + input_path + "'");

    std::vector<EvaluationSample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json doc = json::parse(line, nullptr, false);
        if (doc.is_discarded() || !doc.is_object())
            fail(Errc::schema, input_path + ":" + std::to_string(line_no) + ": not a JSON object");
        if (!doc.contains("text") || !doc.contains("machine_summaries"))
            fail(Errc::schema, input_path + ":" + std::to_string(line_no) +
                                   ": expected summeval fields \"text\" and \"machine_summaries\"");
        if (!doc.contains(dimension))
            fail(Errc::schema, input_path + ":" + std::to_string(line_no) +
                                   ": no rating array \"" + dimension + "\"");
        const auto source = doc.at("text").get<std::string>();
        const auto& summaries = doc.at("machine_summaries");
        const auto& ratings = doc.at(dimension);
        if (!summaries.is_array() || !ratings.is_array() || summaries.size() != ratings.size())
            fail(Errc::schema, input_path + ":" + std::to_string(line_no) +
                                   ": \"machine_summaries\" and \"" + dimension +
                                   "\" must be arrays of equal length");
        for (std::size_t i = 0; i < summaries.size(); ++i) {
            EvaluationSample sample;
            sample.id = "doc" + std::to_string(line_no) + "_sys" + std::to_string(i);
            sample.question = "Summarize the article.";
            sample.answer = summaries[i].get<std::string>();
            sample.contexts.push_back(source);
            const double rating = ratings[i].get<double>();
            if (rating < 1.0 || rating > 5.0)
                fail(Errc::schema, input_path + ":" + std::to_string(line_no) +
                                       ": rating outside the 1-5 Likert scale");
            sample.human_score = (rating - 1.0) / 4.0;
            if (!sample.answer.empty()) samples.push_back(std::move(sample));
        }
    }
    if (samples.empty()) fail(Errc::empty_input, "'" + input_path + "' yielded no samples");
    save_dataset(output_path, samples);
    return samples.size();
}

std::size_t convert_usr(const std::string& input_path, const std::string& output_path,
                        const std::string& dimension) {
    std::ifstream in(input_path);
    if (!in) fail(Errc::io, "cannot open '" + input_path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail(Errc::schema, input_path + ": " + e.what());
    }
    if (!doc.is_array()) fail(Errc::schema, input_path + ": expected a top-level JSON array");

    std::vector<EvaluationSample> samples;
    std::size_t item_no = 0;
    for (const auto& item : doc) {
        ++item_no;
        if (!item.contains("context") || !item.contains("responses"))
            fail(Errc::schema, input_path + ": item " + std::to_string(item_no) +
                                   ": expected usr fields \"context\" and \"responses\"");
        const auto context = item.at("context").get<std::string>();
        const std::string fact = item.contains("fact") ? item.at("fact").get<std::string>() : "";
        std::size_t response_no = 0;
        for (const auto& response : item.at("responses")) {
            ++response_no;
            if (!response.contains("response") || !response.contains(dimension)) continue;
            EvaluationSample sample;
            sample.id = "ctx" + std::to_string(item_no) + "_resp" + std::to_string(response_no);
            sample.question = context;
            sample.answer = response.at("response").get<std::string>();
            if (!fact.empty()) sample.contexts.push_back(fact);
            const auto& ratings = response.at(dimension);
            if (!ratings.is_array() || ratings.empty())
                fail(Errc::schema, input_path + ": item " + std::to_string(item_no) +
                                       ": \"" + dimension + "\" must be a nonempty array");
            double sum = 0.0;
            for (const auto& r : ratings) sum += r.get<double>();
            const double mean = sum / static_cast<double>(ratings.size());
            if (mean < 1.0 || mean > 3.0)
                fail(Errc::schema, input_path + ": item " + std::to_string(item_no) +
                                       ": rating outside the 1-3 scale");
            sample.human_score = (mean - 1.0) / 2.0;
            if (!sample.answer.empty()) samples.push_back(std::move(sample));
        }
    }
    if (samples.empty()) fail(Errc::empty_input, "'" + input_path + "' yielded no samples");
    save_dataset(output_path, samples);
    return samples.size();
}

} // namespace tcva

#pragma once

// JSON codecs for stage outputs. Stage intermediates round-trip through these,
// so a resumed run sees exactly the values an end-to-end run holds in memory.

#include <string>
#include <vector>

#include "json.hpp"

#include "itemaudit/analysis.hpp"
#include "itemaudit/classify.hpp"
#include "itemaudit/cluster.hpp"
#include "itemaudit/ner.hpp"
#include "itemaudit/preprocess.hpp"
#include "itemaudit/topics.hpp"

namespace itemaudit {

using json = nlohmann::json;

inline json clean_stem_to_json(const CleanStem& s) {
    return {{"id", s.item_id}, {"tokens", s.tokens}, {"degenerate", s.degenerate}};
}

inline CleanStem clean_stem_from_json(const json& j) {
    CleanStem s;
    s.item_id = j.at("id").get<std::string>();
    s.tokens = j.at("tokens").get<std::vector<std::string>>();
    s.degenerate = j.at("degenerate").get<bool>();
    return s;
}

inline json k_selection_to_json(const KSelection& ks) {
    json sse = json::array();
    for (auto& [k, v] : ks.sse_curve) sse.push_back({{"k", k}, {"sse", v}});
    json sil = json::array();
    for (auto& [k, v] : ks.silhouette_scores) sil.push_back({{"k", k}, {"score", v}});
    return {{"sse_curve", sse}, {"silhouette", sil}, {"chosen_k", ks.chosen_k}};
}

inline KSelection k_selection_from_json(const json& j) {
    KSelection ks;
    for (auto& e : j.at("sse_curve")) ks.sse_curve.emplace_back(e.at("k").get<std::size_t>(), e.at("sse").get<double>());
    for (auto& e : j.at("silhouette"))
        ks.silhouette_scores.emplace_back(e.at("k").get<std::size_t>(), e.at("score").get<double>());
    ks.chosen_k = j.at("chosen_k").get<std::size_t>();
    return ks;
}

inline json baseline_to_json(const Baseline& b) {
    json per = json::object();
    for (auto& [c, v] : b.per_category) per[c] = v;
    return {{"per_category", per}, {"average", b.average}, {"max", b.max()}};
}

inline Baseline baseline_from_json(const json& j) {
    Baseline b;
    for (auto& [c, v] : j.at("per_category").items()) b.per_category.emplace_back(c, v.get<double>());
    b.average = j.at("average").get<double>();
    return b;
}

inline json task_result_to_json(const PredictionTaskResult& r) {
    return {{"cluster", r.cluster},
            {"attribute", to_string(r.attribute)},
            {"source", to_string(r.source)},
            {"model", to_string(r.model)},
            {"accuracy", r.accuracy},
            {"baseline", baseline_to_json(r.baseline)},
            {"correct_item_ids", r.correct_item_ids},
            {"test_item_ids", r.test_item_ids},
            {"n_train", r.n_train},
            {"n_test", r.test_item_ids.size()},
            {"split_seed", r.split_seed},
            {"repeat_accuracies", r.repeat_accuracies},
            {"warnings", r.warnings}};
}

inline PredictionTaskResult task_result_from_json(const json& j) {
    PredictionTaskResult r;
    r.cluster = j.at("cluster").get<std::size_t>();
    auto attr = parse_attribute(j.at("attribute").get<std::string>());
    auto src = parse_feature_source(j.at("source").get<std::string>());
    auto model = parse_model_kind(j.at("model").get<std::string>());
    if (!attr || !src || !model) throw AuditError("malformed prediction task record");
    r.attribute = *attr;
    r.source = *src;
    r.model = *model;
    r.accuracy = j.at("accuracy").get<double>();
    r.baseline = baseline_from_json(j.at("baseline"));
    r.correct_item_ids = j.at("correct_item_ids").get<std::vector<std::string>>();
    r.test_item_ids = j.at("test_item_ids").get<std::vector<std::string>>();
    r.n_train = j.at("n_train").get<std::size_t>();
    r.split_seed = j.at("split_seed").get<std::uint64_t>();
    r.repeat_accuracies = j.at("repeat_accuracies").get<std::vector<double>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
}

inline json skipped_to_json(const SkippedTask& s) {
    return {{"cluster", s.cluster}, {"attribute", to_string(s.attribute)}, {"reason", s.reason}};
}

inline SkippedTask skipped_from_json(const json& j) {
    SkippedTask s;
    s.cluster = j.at("cluster").get<std::size_t>();
    auto attr = parse_attribute(j.at("attribute").get<std::string>());
    if (!attr) throw AuditError("malformed skipped task record");
    s.attribute = *attr;
    s.reason = j.at("reason").get<std::string>();
    return s;
}

inline json frequency_table_to_json(const EntityFrequencyTable& t) {
    json entries = json::array();
    for (auto& e : t.entries) entries.push_back({{"surface", e.surface}, {"type", e.type}, {"count", e.count}});
    return {{"label", t.label}, {"entries", entries}};
}

inline EntityFrequencyTable frequency_table_from_json(const json& j) {
    EntityFrequencyTable t;
    t.label = j.at("label").get<std::string>();
    for (auto& e : j.at("entries"))
        t.entries.push_back({e.at("surface").get<std::string>(), e.at("type").get<std::string>(),
                             e.at("count").get<std::size_t>()});
    return t;
}

inline json category_distribution_to_json(const CategoryDistribution& d) {
    json observed = json::object();
    for (auto& [c, n] : d.observed) observed[c] = n;
    return {{"label", d.label},
            {"field", to_string(d.field)},
            {"observed", observed},
            {"statistic", d.statistic},
            {"df", d.df},
            {"p_value", d.p_value},
            {"threshold", d.threshold},
            {"verdict", to_string(d.verdict)},
            {"low_expected_count", d.low_expected_count},
            {"note", d.note}};
}

} // namespace itemaudit

#pragma once

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "itemaudit/serialize.hpp"

namespace itemaudit {

inline constexpr const char* kReportSchemaVersion = "1.0";
inline constexpr const char* kAccuracyInterpretation =
    "lower accuracy is better: accuracy near the prevalence baseline means stem language carries little "
    "signal about the attribute; accuracy above baseline + flag_margin is marked 'pattern detected'";

/// Correctly predicted items of one task restricted to one attribute value.
struct Subset {
    std::size_t cluster = 0;
    Attribute attribute = Attribute::Gender;
    std::string value;
    std::vector<std::string> ids;

    std::string label() const {
        return "cluster " + std::to_string(cluster) + " / " + to_string(attribute) + "=" + value;
    }
    std::string slug() const {
        std::string v;
        for (char c : value) v += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
        return "cluster" + std::to_string(cluster) + "_" + to_string(attribute) + "_" + v;
    }
};

/// Split the correct set of each selected (source, model) task by true attribute value.
inline std::vector<Subset> correct_subsets(const std::vector<PredictionTaskResult>& tasks, const Corpus& corpus,
                                           FeatureSource source, ModelKind model) {
    std::unordered_map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < corpus.size(); ++i) row_of[corpus[i].id] = i;
    std::vector<Subset> out;
    for (const auto& t : tasks) {
        if (t.source != source || t.model != model) continue;
        std::map<int, std::vector<std::string>> by_value;
        for (const auto& id : t.correct_item_ids) {
            auto it = row_of.find(id);
            if (it == row_of.end()) throw AuditError("correct item id '" + id + "' not in corpus");
            by_value[attribute_code(corpus[it->second], t.attribute)].push_back(id);
        }
        for (auto& [code, ids] : by_value) out.push_back({t.cluster, t.attribute, attribute_value_name(t.attribute, code), ids});
    }
    return out;
}

struct TopicSubsetResult {
    Subset subset;
    std::vector<std::vector<std::pair<std::string, double>>> topics; // per topic: ranked terms
    std::string note;                                                // non-empty when skipped
};

inline json topic_subset_to_json(const TopicSubsetResult& r) {
    json topics = json::array();
    for (const auto& terms : r.topics) {
        json t = json::array();
        for (auto& [term, p] : terms) t.push_back({{"term", term}, {"probability", p}});
        topics.push_back(t);
    }
    return {{"cluster", r.subset.cluster},   {"attribute", to_string(r.subset.attribute)},
            {"value", r.subset.value},       {"n_docs", r.subset.ids.size()},
            {"topics", topics},              {"note", r.note}};
}

struct EntitySubsetResult {
    Subset subset;
    EntityFrequencyTable table;
};

inline json entity_subset_to_json(const EntitySubsetResult& r) {
    json j = frequency_table_to_json(r.table);
    j["cluster"] = r.subset.cluster;
    j["attribute"] = to_string(r.subset.attribute);
    j["value"] = r.subset.value;
    j["n_docs"] = r.subset.ids.size();
    return j;
}

struct DistributionResult {
    std::size_t cluster = 0;
    Attribute attribute = Attribute::Gender;
    CategoryDistribution distribution;
};

struct ReportInputs {
    json config = json::object();
    std::uint64_t seed = 0;
    std::string provenance;
    std::size_t n_items = 0;
    std::size_t n_degenerate = 0;
    std::string cluster_source = "tfidf";
    KSelection selection;
    std::map<std::string, std::size_t> assignment; // item id -> cluster
    std::vector<PredictionTaskResult> tasks;
    std::vector<SkippedTask> skipped;
    FeatureSource correct_source = FeatureSource::Tfidf;
    ModelKind correct_model = ModelKind::LogReg;
    double flag_margin = 0.10;
    std::string topics_status = "completed";
    std::vector<TopicSubsetResult> topics;
    std::string entities_status = "completed";
    std::vector<EntitySubsetResult> entities;
    std::string distribution_status = "completed";
    double chi2_threshold = 0.05;
    std::vector<DistributionResult> distributions;
    std::vector<std::string> warnings;
    std::string generated_at;
};

inline bool pattern_detected(const PredictionTaskResult& t, double margin) {
    return t.accuracy - t.baseline.max() > margin;
}

/// Assemble and cross-check the audit report. Dangling item ids or accuracy
/// cells without a baseline abort with a diagnostic.
inline json build_report(const ReportInputs& in) {
    // cross references
    for (const auto& t : in.tasks) {
        if (t.baseline.per_category.empty())
            throw AuditError("report: task cluster " + std::to_string(t.cluster) + "/" + to_string(t.attribute) +
                             " has an accuracy without a baseline row");
        const std::set<std::string> test(t.test_item_ids.begin(), t.test_item_ids.end());
        for (const auto& id : t.correct_item_ids) {
            auto it = in.assignment.find(id);
            if (it == in.assignment.end()) throw AuditError("report: item id '" + id + "' is absent from clustering");
            if (it->second != t.cluster)
                throw AuditError("report: item id '" + id + "' belongs to cluster " + std::to_string(it->second) +
                                 ", not " + std::to_string(t.cluster));
            if (!test.contains(id)) throw AuditError("report: item id '" + id + "' is not in its task's test set");
        }
    }
    for (const auto& s : in.topics)
        for (const auto& id : s.subset.ids)
            if (!in.assignment.contains(id)) throw AuditError("report: item id '" + id + "' is absent from clustering");
    for (const auto& s : in.entities)
        for (const auto& id : s.subset.ids)
            if (!in.assignment.contains(id)) throw AuditError("report: item id '" + id + "' is absent from clustering");

    json r;
    r["schema_version"] = kReportSchemaVersion;
    r["generated_at"] = in.generated_at;
    r["tool"] = "itemaudit";
    r["seed"] = in.seed;
    r["config"] = in.config;
    r["corpus"] = {{"provenance", in.provenance}, {"n_items", in.n_items}, {"n_degenerate_stems", in.n_degenerate}};

    std::vector<std::size_t> sizes(in.selection.chosen_k, 0);
    json assignment = json::object();
    for (auto& [id, c] : in.assignment) {
        assignment[id] = c;
        if (c < sizes.size()) ++sizes[c];
    }
    json clustering = k_selection_to_json(in.selection);
    clustering["feature_source"] = in.cluster_source;
    clustering["cluster_sizes"] = sizes;
    clustering["assignment"] = assignment;
    clustering["method"] = {{"init", "k-means++"},
                            {"distance", "euclidean"},
                            {"k_selection", "argmax silhouette, ties to smaller k; SSE curve reported only"}};
    r["clustering"] = clustering;

    json tasks = json::array();
    std::set<std::pair<std::size_t, std::string>> task_keys, flagged_keys;
    for (const auto& t : in.tasks) {
        json j = task_result_to_json(t);
        const double margin = t.accuracy - t.baseline.max();
        const bool flag = pattern_detected(t, in.flag_margin);
        j["margin_over_baseline"] = margin;
        j["pattern_detected"] = flag;
        j["reading"] = flag ? "pattern detected" : "within margin of baseline";
        task_keys.insert({t.cluster, to_string(t.attribute)});
        if (flag) flagged_keys.insert({t.cluster, to_string(t.attribute)});
        tasks.push_back(j);
    }
    json skipped = json::array();
    for (const auto& s : in.skipped) skipped.push_back(skipped_to_json(s));
    r["prediction"] = {{"interpretation", kAccuracyInterpretation},
                       {"flag_margin", in.flag_margin},
                       {"correct_set", {{"source", to_string(in.correct_source)}, {"model", to_string(in.correct_model)}}},
                       {"n_tasks", task_keys.size()},
                       {"cells", tasks},
                       {"skipped", skipped},
                       {"flagged_tasks", flagged_keys.size()},
                       {"flagged_cells", std::count_if(tasks.begin(), tasks.end(), [](const json& t) {
                            return t["pattern_detected"].get<bool>();
                        })}};

    json topic_subsets = json::array();
    for (const auto& s : in.topics) topic_subsets.push_back(topic_subset_to_json(s));
    r["topics"] = {{"status", in.topics_status}, {"subsets", topic_subsets}};

    json tables = json::array();
    for (const auto& s : in.entities) tables.push_back(entity_subset_to_json(s));
    r["entities"] = {{"status", in.entities_status}, {"tables", tables}};

    json dists = json::array();
    for (const auto& d : in.distributions) {
        json j = category_distribution_to_json(d.distribution);
        j["cluster"] = d.cluster;
        j["attribute"] = to_string(d.attribute);
        dists.push_back(j);
    }
    r["metadata_distribution"] = {
        {"status", in.distribution_status},
        {"threshold", in.chi2_threshold},
        {"reference", "categories present in the parent cluster"},
        {"multiple_comparisons",
         in.distributions.size() > 10 ? "more than 10 tests run without correction; expect false 'skewed' verdicts"
                                      : "none"},
        {"results", dists}};
    r["warnings"] = in.warnings;
    return r;
}

namespace detail {

[[noreturn]] inline void schema_fail(const std::string& path, const std::string& what) {
    throw AuditError("report schema violation at " + path + ": " + what);
}

inline const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) schema_fail(path, "expected an object");
    if (!j.contains(key)) schema_fail(path, "missing key '" + key + "'");
    return j.at(key);
}

inline void require_type(const json& j, json::value_t type, const std::string& path) {
    const bool ok = (type == json::value_t::number_float && j.is_number()) ||
                    (type == json::value_t::number_unsigned && j.is_number_unsigned()) ||
                    (type == json::value_t::number_integer && j.is_number_integer()) || j.type() == type;
    if (!ok) schema_fail(path, std::string("expected ") + json(type).type_name() + ", found " + j.type_name());
}

inline double require_number(const json& j, const std::string& key, const std::string& path, double lo, double hi) {
    const auto& v = require(j, key, path);
    if (!v.is_number()) schema_fail(path + "." + key, "expected a number");
    const double d = v.get<double>();
    if (!(d >= lo && d <= hi)) schema_fail(path + "." + key, "value out of range");
    return d;
}

} // namespace detail

/// Structural and cross-reference validation of a machine-readable report.
inline void validate_report(const json& r) {
    using detail::require;
    using detail::require_number;
    using detail::require_type;
    using vt = json::value_t;
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (!r.is_object()) detail::schema_fail("$", "report is not an object");
    const auto& ver = require(r, "schema_version", "$");
    if (!ver.is_string() || ver.get<std::string>() != kReportSchemaVersion)
        detail::schema_fail("$.schema_version", "unsupported version");
    require_type(require(r, "generated_at", "$"), vt::string, "$.generated_at");
    require_type(require(r, "seed", "$"), vt::number_unsigned, "$.seed");
    require_type(require(r, "config", "$"), vt::object, "$.config");
    const auto& corpus = require(r, "corpus", "$");
    require_type(require(corpus, "n_items", "$.corpus"), vt::number_unsigned, "$.corpus.n_items");
    require_type(require(corpus, "provenance", "$.corpus"), vt::string, "$.corpus.provenance");

    const auto& cl = require(r, "clustering", "$");
    require_type(require(cl, "chosen_k", "$.clustering"), vt::number_unsigned, "$.clustering.chosen_k");
    const auto chosen_k = cl.at("chosen_k").get<std::size_t>();
    require_type(require(cl, "sse_curve", "$.clustering"), vt::array, "$.clustering.sse_curve");
    for (const auto& e : cl.at("sse_curve")) require_number(e, "sse", "$.clustering.sse_curve[]", 0.0, inf);
    require_type(require(cl, "silhouette", "$.clustering"), vt::array, "$.clustering.silhouette");
    for (const auto& e : cl.at("silhouette")) require_number(e, "score", "$.clustering.silhouette[]", -1.0, 1.0);
    const auto& assignment = require(cl, "assignment", "$.clustering");
    require_type(assignment, vt::object, "$.clustering.assignment");
    for (auto& [id, c] : assignment.items())
        if (!c.is_number_unsigned() || c.get<std::size_t>() >= chosen_k)
            detail::schema_fail("$.clustering.assignment." + id, "cluster index out of range");

    const auto& pred = require(r, "prediction", "$");
    require_number(pred, "flag_margin", "$.prediction", -1.0, 1.0);
    require_type(require(pred, "cells", "$.prediction"), vt::array, "$.prediction.cells");
    std::set<std::pair<std::size_t, std::string>> flagged;
    for (std::size_t i = 0; i < pred.at("cells").size(); ++i) {
        const auto& t = pred.at("cells")[i];
        const std::string p = "$.prediction.cells[" + std::to_string(i) + "]";
        require_type(require(t, "cluster", p), vt::number_unsigned, p + ".cluster");
        const auto cluster = t.at("cluster").get<std::size_t>();
        if (cluster >= chosen_k) detail::schema_fail(p + ".cluster", "cluster index out of range");
        const auto& attr = require(t, "attribute", p);
        if (!attr.is_string() || !parse_attribute(attr.get<std::string>())) detail::schema_fail(p + ".attribute", "unknown attribute");
        const auto& src = require(t, "source", p);
        if (!src.is_string() || !parse_feature_source(src.get<std::string>())) detail::schema_fail(p + ".source", "unknown source");
        const auto& model = require(t, "model", p);
        if (!model.is_string() || !parse_model_kind(model.get<std::string>())) detail::schema_fail(p + ".model", "unknown model");
        const double acc = require_number(t, "accuracy", p, 0.0, 1.0);
        const auto& b = require(t, "baseline", p);
        const auto& per = require(b, "per_category", p + ".baseline");
        if (!per.is_object() || per.empty()) detail::schema_fail(p + ".baseline.per_category", "missing baseline rows");
        double sum = 0.0;
        for (auto& [c, v] : per.items()) {
            if (!v.is_number()) detail::schema_fail(p + ".baseline.per_category." + c, "expected a number");
            sum += v.get<double>();
        }
        if (std::abs(sum - 1.0) > 1e-9) detail::schema_fail(p + ".baseline.per_category", "baselines do not sum to 1");
        require_number(b, "average", p + ".baseline", 0.0, 1.0);
        require_type(require(t, "correct_item_ids", p), vt::array, p + ".correct_item_ids");
        require_type(require(t, "test_item_ids", p), vt::array, p + ".test_item_ids");
        const auto& correct = t.at("correct_item_ids");
        const auto& test = t.at("test_item_ids");
        if (test.empty()) detail::schema_fail(p + ".test_item_ids", "empty test set");
        std::set<std::string> test_ids;
        for (const auto& id : test) test_ids.insert(id.get<std::string>());
        for (const auto& id : correct) {
            const auto s = id.get<std::string>();
            if (!test_ids.contains(s)) detail::schema_fail(p + ".correct_item_ids", "'" + s + "' not in test set");
            if (!assignment.contains(s) || assignment.at(s).get<std::size_t>() != cluster)
                detail::schema_fail(p + ".correct_item_ids", "'" + s + "' not assigned to cluster " + std::to_string(cluster));
        }
        if (std::abs(acc - static_cast<double>(correct.size()) / static_cast<double>(test.size())) > 1e-12)
            detail::schema_fail(p + ".accuracy", "does not equal |correct| / |test|");
        require_type(require(t, "pattern_detected", p), vt::boolean, p + ".pattern_detected");
        if (t.at("pattern_detected").get<bool>()) flagged.insert({cluster, attr.get<std::string>()});
    }
    require_type(require(pred, "flagged_tasks", "$.prediction"), vt::number_unsigned, "$.prediction.flagged_tasks");
    if (pred.at("flagged_tasks").get<std::size_t>() != flagged.size())
        detail::schema_fail("$.prediction.flagged_tasks", "does not match the flagged task count");

    for (const char* section : {"topics", "entities", "metadata_distribution"}) {
        const auto& s = require(r, section, "$");
        require_type(require(s, "status", std::string("$.") + section), vt::string, std::string("$.") + section + ".status");
    }
    require_type(require(r.at("topics"), "subsets", "$.topics"), vt::array, "$.topics.subsets");
    require_type(require(r.at("entities"), "tables", "$.entities"), vt::array, "$.entities.tables");
    for (const auto& t : r.at("entities").at("tables"))
        for (const auto& e : require(t, "entries", "$.entities.tables[]")) {
            const auto& n = require(e, "count", "$.entities.tables[].entries[]");
            if (!n.is_number_unsigned() || n.get<std::size_t>() < 1)
                detail::schema_fail("$.entities.tables[].entries[].count", "count must be >= 1");
        }
    for (const auto& d : require(r.at("metadata_distribution"), "results", "$.metadata_distribution"))
        require_number(d, "p_value", "$.metadata_distribution.results[]", 0.0, 1.0);
    require_type(require(r, "warnings", "$"), vt::array, "$.warnings");
}

namespace detail {

inline std::string fmt(double v, int digits = 3) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

inline std::string md_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += "\\|";
        else out += c;
    }
    return out;
}

} // namespace detail

/// Human-readable rendering with stable section and row order.
inline std::string render_markdown(const json& r) {
    using detail::fmt;
    std::ostringstream md;
    md << "# Item bank language audit\n\n";
    md << "- Corpus: `" << r["corpus"]["provenance"].get<std::string>() << "` (" << r["corpus"]["n_items"].get<std::size_t>()
       << " items, " << r["corpus"]["n_degenerate_stems"].get<std::size_t>() << " empty after cleaning)\n";
    md << "- Seed: " << r["seed"].get<std::uint64_t>() << "\n";
    md << "- Schema version: " << r["schema_version"].get<std::string>() << "\n";
    md << "- Flagged tasks: " << r["prediction"]["flagged_tasks"].get<std::size_t>() << "\n\n";

    const auto& cl = r["clustering"];
    md << "## Cluster selection\n\n";
    md << "Features: " << cl["feature_source"].get<std::string>() << ". Chosen k = " << cl["chosen_k"].get<std::size_t>()
       << " (highest silhouette).\n\n";
    std::map<std::size_t, std::pair<std::string, std::string>> rows;
    for (const auto& e : cl["sse_curve"]) rows[e["k"].get<std::size_t>()].first = fmt(e["sse"].get<double>(), 4);
    for (const auto& e : cl["silhouette"]) rows[e["k"].get<std::size_t>()].second = fmt(e["score"].get<double>(), 4);
    md << "| k | SSE | Silhouette |\n|---|---|---|\n";
    for (auto& [k, v] : rows) md << "| " << k << " | " << v.first << " | " << (v.second.empty() ? "-" : v.second) << " |\n";
    md << "\nCluster sizes:";
    const auto& sizes = cl["cluster_sizes"];
    for (std::size_t i = 0; i < sizes.size(); ++i) md << (i ? ", " : " ") << i << ": " << sizes[i].get<std::size_t>();
    md << "\n\n";

    const auto& pred = r["prediction"];
    md << "## Prediction accuracy vs. baseline\n\n";
    md << "Reading: " << pred["interpretation"].get<std::string>() << " (flag margin "
       << fmt(pred["flag_margin"].get<double>(), 2) << ").\n\n";
    for (auto attr : {Attribute::Gender, Attribute::AgeGroup}) {
        const std::string name = to_string(attr);
        std::set<std::string> columns;
        std::map<std::size_t, std::map<std::string, json>> by_cluster;
        for (const auto& t : pred["cells"]) {
            if (t["attribute"].get<std::string>() != name) continue;
            const std::string col = t["model"].get<std::string>() + "/" + t["source"].get<std::string>();
            columns.insert(col);
            by_cluster[t["cluster"].get<std::size_t>()][col] = t;
        }
        md << "### " << (attr == Attribute::Gender ? "Gender" : "Age group") << "\n\n";
        if (by_cluster.empty()) {
            md << "No tasks.\n\n";
            continue;
        }
        md << "| Cluster | " << (attr == Attribute::Gender ? "Baseline (F) | Baseline (M)" : "Baseline average | Baseline max");
        for (const auto& c : columns) md << " | " << c;
        md << " |\n|---|---|---";
        for (std::size_t i = 0; i < columns.size(); ++i) md << "|---";
        md << "|\n";
        for (auto& [cluster, cells] : by_cluster) {
            const auto& b = cells.begin()->second["baseline"];
            md << "| " << cluster << " | ";
            if (attr == Attribute::Gender)
                md << fmt(b["per_category"].value("F", 0.0), 2) << " | " << fmt(b["per_category"].value("M", 0.0), 2);
            else
                md << fmt(b["average"].get<double>(), 2) << " | " << fmt(b["max"].get<double>(), 2);
            for (const auto& c : columns) {
                auto it = cells.find(c);
                if (it == cells.end()) {
                    md << " | -";
                    continue;
                }
                md << " | " << fmt(it->second["accuracy"].get<double>(), 2);
                if (it->second["pattern_detected"].get<bool>()) md << " **(pattern detected)**";
            }
            md << " |\n";
        }
        md << "\n";
    }
    if (!pred["skipped"].empty()) {
        md << "Skipped tasks:\n\n";
        for (const auto& s : pred["skipped"])
            md << "- cluster " << s["cluster"].get<std::size_t>() << " / " << s["attribute"].get<std::string>() << ": "
               << s["reason"].get<std::string>() << "\n";
        md << "\n";
    }

    md << "## Topics in correctly predicted items\n\n";
    const auto& topics = r["topics"];
    if (topics["status"].get<std::string>() != "completed") {
        md << "Status: " << topics["status"].get<std::string>() << "\n\n";
    } else if (topics["subsets"].empty()) {
        md << "No subsets.\n\n";
    } else {
        for (const auto& s : topics["subsets"]) {
            md << "### Cluster " << s["cluster"].get<std::size_t>() << ", " << s["attribute"].get<std::string>() << " = "
               << s["value"].get<std::string>() << " (" << s["n_docs"].get<std::size_t>() << " items)\n\n";
            if (!s["note"].get<std::string>().empty()) {
                md << s["note"].get<std::string>() << "\n\n";
                continue;
            }
            for (std::size_t t = 0; t < s["topics"].size(); ++t) {
                md << "- Topic " << t + 1 << ":";
                for (const auto& term : s["topics"][t])
                    md << " " << term["term"].get<std::string>() << " (" << fmt(term["probability"].get<double>(), 3) << ")";
                md << "\n";
            }
            md << "\n";
        }
    }

    md << "## Biomedical entities in correctly predicted items\n\n";
    const auto& ents = r["entities"];
    if (ents["status"].get<std::string>() != "completed") {
        md << "Status: " << ents["status"].get<std::string>() << "\n\n";
    } else if (ents["tables"].empty()) {
        md << "No subsets; no mentions.\n\n";
    } else {
        for (const auto& t : ents["tables"]) {
            md << "### " << t["label"].get<std::string>() << "\n\n";
            if (t["entries"].empty()) {
                md << "No mentions.\n\n";
                continue;
            }
            md << "| Entity | Type | Count |\n|---|---|---|\n";
            for (const auto& e : t["entries"])
                md << "| " << detail::md_escape(e["surface"].get<std::string>()) << " | " << e["type"].get<std::string>()
                   << " | " << e["count"].get<std::size_t>() << " |\n";
            md << "\n";
        }
    }

    md << "## Question and topic category distribution\n\n";
    const auto& dist = r["metadata_distribution"];
    if (dist["status"].get<std::string>() != "completed") {
        md << "Status: " << dist["status"].get<std::string>() << "\n\n";
    } else {
        md << "Chi-square goodness of fit against a uniform distribution over the parent cluster's categories, threshold "
           << fmt(dist["threshold"].get<double>(), 2) << ". Multiple comparisons: "
           << dist["multiple_comparisons"].get<std::string>() << ".\n\n";
        md << "| Cluster | Task | Field | Statistic | df | p | Verdict |\n|---|---|---|---|---|---|---|\n";
        for (const auto& d : dist["results"]) {
            md << "| " << d["cluster"].get<std::size_t>() << " | " << d["attribute"].get<std::string>() << " | "
               << d["field"].get<std::string>() << " | " << fmt(d["statistic"].get<double>(), 3) << " | "
               << d["df"].get<std::size_t>() << " | " << fmt(d["p_value"].get<double>(), 4) << " | "
               << d["verdict"].get<std::string>() << (d["low_expected_count"].get<bool>() ? " (low counts)" : "")
               << " |\n";
        }
        md << "\n";
    }

    md << "## Warnings\n\n";
    if (r["warnings"].empty()) md << "None.\n";
    for (const auto& w : r["warnings"]) md << "- " << w.get<std::string>() << "\n";
    return md.str();
}

} // namespace itemaudit

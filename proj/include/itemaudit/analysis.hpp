#pragma once

#include <map>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "itemaudit/common.hpp"
#include "itemaudit/corpus.hpp"

namespace itemaudit {

enum class MetadataField { Competency, TopicCategory };

inline std::string to_string(MetadataField f) { return f == MetadataField::Competency ? "competency" : "topic_category"; }

inline const std::string& metadata_value(const Item& item, MetadataField f) {
    return f == MetadataField::Competency ? item.competency : item.topic_category;
}

/// Upper tail P(X >= statistic) of a chi-square distribution with `df` degrees of freedom.
inline double chi_square_survival(double statistic, double df) {
    if (!(df > 0.0)) throw AuditError("chi-square: degrees of freedom must be positive");
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(df / 2.0, statistic / 2.0);
}

/// Pearson statistic against equal expected counts.
inline double chi_square_uniform_statistic(const std::vector<std::size_t>& observed) {
    if (observed.empty()) throw AuditError("chi-square: no categories");
    double total = 0.0;
    for (auto o : observed) total += static_cast<double>(o);
    const double expected = total / static_cast<double>(observed.size());
    if (expected == 0.0) throw AuditError("chi-square: no observations");
    double stat = 0.0;
    for (auto o : observed) {
        const double d = static_cast<double>(o) - expected;
        stat += d * d / expected;
    }
    return stat;
}

enum class Verdict { Uniform, Skewed, Undefined };

inline std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Uniform: return "uniform";
    case Verdict::Skewed: return "skewed";
    default: return "undefined";
    }
}

struct CategoryDistribution {
    std::string label;
    MetadataField field = MetadataField::Competency;
    std::vector<std::pair<std::string, std::size_t>> observed; // sorted by category
    double statistic = 0.0;
    std::size_t df = 0;
    double p_value = 1.0;
    double threshold = 0.05;
    Verdict verdict = Verdict::Undefined;
    bool low_expected_count = false; // some expected count below 5
    std::string note;
};

/// Goodness of fit of a category histogram against the uniform distribution
/// over `reference_categories` (the categories of the parent cluster).
inline CategoryDistribution category_distribution(const std::vector<std::string>& subset_values,
                                                  const std::vector<std::string>& reference_categories,
                                                  MetadataField field, double threshold = 0.05,
                                                  std::string label = {}) {
    if (subset_values.empty()) throw AuditError("metadata distribution: empty subset");
    CategoryDistribution out;
    out.label = std::move(label);
    out.field = field;
    out.threshold = threshold;
    std::map<std::string, std::size_t> counts;
    for (const auto& c : reference_categories) counts[c] = 0;
    for (const auto& v : subset_values) {
        auto it = counts.find(v);
        if (it == counts.end()) throw AuditError("metadata distribution: category '" + v + "' not in reference set");
        ++it->second;
    }
    out.observed.assign(counts.begin(), counts.end());
    if (counts.size() < 2) {
        out.verdict = Verdict::Undefined;
        out.note = "single-category parent cluster; test undefined";
        return out;
    }
    std::vector<std::size_t> obs;
    for (auto& [c, n] : counts) obs.push_back(n);
    out.statistic = chi_square_uniform_statistic(obs);
    out.df = obs.size() - 1;
    out.p_value = chi_square_survival(out.statistic, static_cast<double>(out.df));
    out.verdict = out.p_value > threshold ? Verdict::Uniform : Verdict::Skewed;
    out.low_expected_count = static_cast<double>(subset_values.size()) / static_cast<double>(obs.size()) < 5.0;
    if (out.low_expected_count) out.note = "expected counts below 5; chi-square approximation is unreliable";
    return out;
}

/// Category distribution of `field` over the correctly predicted `subset`
/// relative to the categories present in `parent` (the cluster).
inline CategoryDistribution metadata_distribution(const std::vector<const Item*>& subset,
                                                  const std::vector<const Item*>& parent, MetadataField field,
                                                  double threshold = 0.05, std::string label = {}) {
    std::set<std::string> ref;
    for (const auto* it : parent) ref.insert(metadata_value(*it, field));
    std::vector<std::string> values;
    for (const auto* it : subset) values.push_back(metadata_value(*it, field));
    return category_distribution(values, {ref.begin(), ref.end()}, field, threshold, std::move(label));
}

} // namespace itemaudit

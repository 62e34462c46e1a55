#pragma once

#include <cmath>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "itemaudit/common.hpp"

namespace itemaudit {

enum class FeatureSource { Tfidf, External };

inline std::string to_string(FeatureSource s) { return s == FeatureSource::Tfidf ? "tfidf" : "external"; }

inline std::optional<FeatureSource> parse_feature_source(std::string_view s) {
    if (s == "tfidf") return FeatureSource::Tfidf;
    if (s == "external") return FeatureSource::External;
    return std::nullopt;
}

/// Terms sorted lexicographically; index i is the i-th term.
struct Vocabulary {
    std::vector<std::string> terms;
    std::vector<std::size_t> document_frequency;
    std::size_t n_docs = 0;
    std::unordered_map<std::string, std::size_t> index;

    std::size_t size() const noexcept { return terms.size(); }

    std::optional<std::size_t> find(const std::string& term) const {
        auto it = index.find(term);
        if (it == index.end()) return std::nullopt;
        return it->second;
    }

    // Smoothed inverse document frequency: ln((1 + n) / (1 + df)) + 1.
    double idf(std::size_t i) const {
        return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(document_frequency[i]))) +
               1.0;
    }
};

using TokenDocs = std::vector<std::vector<std::string>>;

inline Vocabulary build_vocabulary(const TokenDocs& docs, std::size_t min_df) {
    if (docs.empty()) throw AuditError("cannot build a vocabulary from zero documents");
    std::map<std::string, std::size_t> df;
    for (const auto& doc : docs) {
        std::vector<std::string> uniq(doc.begin(), doc.end());
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (auto& t : uniq) ++df[t];
    }
    Vocabulary v;
    v.n_docs = docs.size();
    for (auto& [term, count] : df) {
        if (count < min_df) continue;
        v.index[term] = v.terms.size();
        v.terms.push_back(term);
        v.document_frequency.push_back(count);
    }
    if (v.terms.empty())
        throw AuditError("vocabulary is empty after applying min_df=" + std::to_string(min_df));
    return v;
}

struct DocVector {
    std::string item_id;
    std::vector<double> values;
    FeatureSource source = FeatureSource::Tfidf;
    bool zero = false; // no in-vocabulary tokens

    bool operator==(const DocVector&) const = default;
};

/// Raw term counts over the vocabulary; out-of-vocabulary tokens are ignored.
inline std::vector<double> count_vector(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    std::vector<double> counts(vocab.size(), 0.0);
    for (const auto& t : tokens)
        if (auto i = vocab.find(t)) counts[*i] += 1.0;
    return counts;
}

/// tf * idf, then L2-normalized. A document without in-vocabulary tokens
/// yields the zero vector with `zero` set.
inline DocVector tfidf_vector(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                              std::string item_id = {}) {
    DocVector out;
    out.item_id = std::move(item_id);
    out.source = FeatureSource::Tfidf;
    out.values = count_vector(tokens, vocab);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        if (out.values[i] != 0.0) out.values[i] *= vocab.idf(i);
    const double norm = std::sqrt(detail::squared_norm(out.values));
    if (norm == 0.0) {
        out.zero = true;
        return out;
    }
    for (double& x : out.values) x /= norm;
    return out;
}

inline Matrix stack_vectors(const std::vector<DocVector>& vectors) {
    if (vectors.empty()) return {};
    Matrix m(vectors.size(), vectors.front().values.size());
    for (std::size_t r = 0; r < vectors.size(); ++r) {
        if (vectors[r].values.size() != m.cols()) throw AuditError("document vectors differ in dimension");
        std::copy(vectors[r].values.begin(), vectors[r].values.end(), m.row(r).begin());
    }
    return m;
}

/// Parse an embedding file (one {"id": ..., "vector": [...]} object per line)
/// and align it to `expected_ids`.
inline std::vector<DocVector> parse_embeddings(const std::string& text, const std::vector<std::string>& expected_ids) {
    std::unordered_map<std::string, std::vector<double>> by_id;
    std::optional<std::size_t> dim;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const std::string where = "embeddings line " + std::to_string(lineno);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw AuditError(where + ": malformed record (" + e.what() + ")");
        }
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("vector") ||
            !j["vector"].is_array())
            throw AuditError(where + ": expected {\"id\": string, \"vector\": array}");
        const auto id = j["id"].get<std::string>();
        std::vector<double> v;
        for (const auto& x : j["vector"]) {
            if (!x.is_number()) throw AuditError(where + ": non-numeric value in vector for '" + id + "'");
            const double d = x.get<double>();
            if (!std::isfinite(d)) throw AuditError(where + ": non-finite value in vector for '" + id + "'");
            v.push_back(d);
        }
        if (v.empty()) throw AuditError(where + ": empty vector for '" + id + "'");
        if (!dim) dim = v.size();
        if (v.size() != *dim)
            throw AuditError(where + ": ragged dimension for '" + id + "' (" + std::to_string(v.size()) +
                             " vs " + std::to_string(*dim) + ")");
        if (!by_id.emplace(id, std::move(v)).second) throw AuditError(where + ": duplicate id '" + id + "'");
    }
    std::vector<DocVector> out;
    out.reserve(expected_ids.size());
    for (const auto& id : expected_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw AuditError("embeddings: missing vector for id '" + id + "'");
        DocVector dv;
        dv.item_id = id;
        dv.values = it->second;
        dv.source = FeatureSource::External;
        dv.zero = detail::squared_norm(dv.values) == 0.0;
        out.push_back(std::move(dv));
    }
    return out;
}

inline std::vector<DocVector> load_embeddings(const std::string& path, const std::vector<std::string>& expected_ids) {
    return parse_embeddings(detail::read_file(path), expected_ids);
}

} // namespace itemaudit

#pragma once

#include <map>
#include <string>
#include <vector>

#include "itemaudit/common.hpp"
#include "itemaudit/corpus.hpp"
#include "itemaudit/preprocess.hpp"

namespace itemaudit {

/// Dictionary of normalized surface phrases (space-joined tokens) to entity type.
class Gazetteer {
public:
    Gazetteer() = default;

    // Surfaces are lowercased and normalized token by token before storage.
    // A surface re-added with the same type is ignored; a different type is an error.
    void add(std::string_view surface, std::string_view type, const LemmaMap& lemmas = {}) {
        std::vector<std::string> toks;
        for (auto& t : detail::split_whitespace(detail::to_lower_ascii(surface)))
            toks.push_back(normalize_token(t, lemmas));
        if (toks.empty()) throw AuditError("gazetteer: empty surface");
        const std::string key = detail::join(toks, " ");
        const std::string ty = detail::trim(type);
        if (ty.empty()) throw AuditError("gazetteer: empty type for surface '" + key + "'");
        auto [it, inserted] = entries_.emplace(key, ty);
        if (!inserted && it->second != ty)
            throw AuditError("gazetteer: conflicting types for surface '" + key + "' (" + it->second + " vs " + ty +
                             ")");
        if (inserted) max_len_ = std::max(max_len_, toks.size());
    }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t max_phrase_length() const noexcept { return max_len_; }

    const std::string* type_of(const std::string& surface) const {
        auto it = entries_.find(surface);
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::vector<std::string> entity_types() const {
        std::set<std::string> types;
        for (auto& [s, t] : entries_) types.insert(t);
        return {types.begin(), types.end()};
    }

    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, std::string> entries_;
    std::size_t max_len_ = 0;
};

/// Rows "surface,type"; '#' comment lines and a "surface,type" header are skipped.
inline Gazetteer parse_gazetteer(const std::string& text, const LemmaMap& lemmas = {}) {
    Gazetteer g;
    for (auto& [line, cells] : detail::parse_csv(text)) {
        if (!cells.empty() && detail::trim(cells[0]).starts_with("#")) continue;
        if (cells.size() != 2)
            throw AuditError("gazetteer line " + std::to_string(line) + ": expected 2 fields (surface,type)");
        if (detail::to_lower_ascii(detail::trim(cells[0])) == "surface" &&
            detail::to_lower_ascii(detail::trim(cells[1])) == "type")
            continue;
        g.add(cells[0], cells[1], lemmas);
    }
    return g;
}

inline Gazetteer load_gazetteer(const std::string& path, const LemmaMap& lemmas = {}) {
    return parse_gazetteer(detail::read_file(path), lemmas);
}

struct Mention {
    std::string surface;
    std::string type;
    std::size_t begin = 0; // token span [begin, end)
    std::size_t end = 0;

    bool operator==(const Mention&) const = default;
};

/// Greedy leftmost-longest matching; mentions never overlap.
inline std::vector<Mention> tag_entities(const std::vector<std::string>& tokens, const Gazetteer& gazetteer) {
    std::vector<Mention> out;
    std::size_t i = 0;
    while (i < tokens.size()) {
        bool matched = false;
        const std::size_t longest = std::min(gazetteer.max_phrase_length(), tokens.size() - i);
        for (std::size_t len = longest; len >= 1; --len) {
            std::string phrase = tokens[i];
            for (std::size_t j = 1; j < len; ++j) phrase += " " + tokens[i + j];
            if (const auto* type = gazetteer.type_of(phrase)) {
                out.push_back({phrase, *type, i, i + len});
                i += len;
                matched = true;
                break;
            }
        }
        if (!matched) ++i;
    }
    return out;
}

struct EntityFrequency {
    std::string surface;
    std::string type;
    std::size_t count = 0;

    bool operator==(const EntityFrequency&) const = default;
};

struct EntityFrequencyTable {
    std::string label;
    std::vector<EntityFrequency> entries; // count descending, then surface, then type

    std::size_t count_of(const std::string& surface) const {
        std::size_t n = 0;
        for (const auto& e : entries)
            if (e.surface == surface) n += e.count;
        return n;
    }
};

inline EntityFrequencyTable entity_frequencies(const std::vector<std::vector<std::string>>& subset,
                                               const Gazetteer& gazetteer, std::string label = {}) {
    std::map<std::pair<std::string, std::string>, std::size_t> counts;
    for (const auto& tokens : subset)
        for (auto& m : tag_entities(tokens, gazetteer)) ++counts[{m.surface, m.type}];
    EntityFrequencyTable table;
    table.label = std::move(label);
    for (auto& [key, n] : counts) table.entries.push_back({key.first, key.second, n});
    std::stable_sort(table.entries.begin(), table.entries.end(),
                     [](const EntityFrequency& a, const EntityFrequency& b) { return a.count > b.count; });
    return table;
}

/// Flat tab-separated export (surface, type, count) for external renderers.
inline std::string frequency_table_tsv(const EntityFrequencyTable& table) {
    std::string out = "surface\ttype\tcount\n";
    for (const auto& e : table.entries) out += e.surface + "\t" + e.type + "\t" + std::to_string(e.count) + "\n";
    return out;
}

} // namespace itemaudit

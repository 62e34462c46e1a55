#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "itemaudit/common.hpp"

namespace itemaudit {

using TokenSet = std::unordered_set<std::string>;
using LemmaMap = std::unordered_map<std::string, std::string>;

/// Word lists that drive stem cleaning. Negation exceptions always survive
/// stopword removal.
struct StoplistSet {
    TokenSet stopwords;
    TokenSet negation_exceptions;
    TokenSet units;
    TokenSet demographic_terms;
    TokenSet domain_highfreq;
    LemmaMap lemmas; // irregular form -> lemma, consulted before suffix rules

    bool is_stopword(const std::string& t) const {
        return stopwords.contains(t) && !negation_exceptions.contains(t);
    }

    // True when `t` must not appear in a cleaned stem.
    bool is_removed(const std::string& t) const {
        return is_stopword(t) || units.contains(t) || demographic_terms.contains(t) || domain_highfreq.contains(t);
    }
};

struct StoplistPaths {
    std::string stopwords;
    std::string negation_exceptions;
    std::string units;
    std::string demographic_terms;
    std::string domain_highfreq;
    std::string lemmas;
};

namespace detail {

inline std::string strip_comment(const std::string& line) {
    const auto hash = line.find('#');
    return trim(hash == std::string::npos ? line : line.substr(0, hash));
}

} // namespace detail

/// One token per line, '#' starts a comment; tokens are lowercased and deduplicated.
inline TokenSet load_token_list(const std::string& path) {
    TokenSet out;
    for (const auto& line : detail::read_lines(path)) {
        auto tok = detail::to_lower_ascii(detail::strip_comment(line));
        if (!tok.empty()) out.insert(std::move(tok));
    }
    return out;
}

/// "form lemma" pairs separated by whitespace, one pair per line.
inline LemmaMap load_lemma_map(const std::string& path) {
    LemmaMap out;
    std::size_t lineno = 0;
    for (const auto& line : detail::read_lines(path)) {
        ++lineno;
        const auto parts = detail::split_whitespace(detail::strip_comment(line));
        if (parts.empty()) continue;
        if (parts.size() != 2)
            throw AuditError(path + ":" + std::to_string(lineno) + ": expected 'form lemma'");
        out[detail::to_lower_ascii(parts[0])] = detail::to_lower_ascii(parts[1]);
    }
    return out;
}

/// Empty paths produce empty lists.
inline StoplistSet load_stoplists(const StoplistPaths& paths) {
    StoplistSet s;
    auto load = [](const std::string& p) { return p.empty() ? TokenSet{} : load_token_list(p); };
    s.stopwords = load(paths.stopwords);
    s.negation_exceptions = load(paths.negation_exceptions);
    s.units = load(paths.units);
    s.demographic_terms = load(paths.demographic_terms);
    s.domain_highfreq = load(paths.domain_highfreq);
    if (!paths.lemmas.empty()) s.lemmas = load_lemma_map(paths.lemmas);
    return s;
}

namespace detail {

inline bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

inline bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// One pass of the suffix rules.
inline std::string normalize_once(const std::string& t, const LemmaMap& lemmas) {
    if (auto it = lemmas.find(t); it != lemmas.end()) return it->second;
    if (t.size() <= 3) return t;

    // plurals and third person singular
    if (ends_with(t, "sses")) return t.substr(0, t.size() - 2);
    if (ends_with(t, "ies") && t.size() > 4) return t.substr(0, t.size() - 3) + "y";
    if (ends_with(t, "ss") || ends_with(t, "us") || ends_with(t, "is")) return t;
    if (ends_with(t, "xes") || ends_with(t, "zes") || ends_with(t, "ches") || ends_with(t, "shes"))
        return t.substr(0, t.size() - 2);
    if (t.back() == 's') return t.substr(0, t.size() - 1);

    // past tense
    if (ends_with(t, "ied") && t.size() > 4) return t.substr(0, t.size() - 3) + "y";
    if (ends_with(t, "ed") && t.size() >= 5 && t[t.size() - 3] != 'e') {
        std::string s = t.substr(0, t.size() - 2);
        if (std::none_of(s.begin(), s.end(), is_vowel)) return t;
        if (ends_with(s, "at") || ends_with(s, "bl") || ends_with(s, "iz")) return s + "e";
        const char last = s.back();
        if (s.size() >= 2 && s[s.size() - 2] == last && !is_vowel(last) && last != 'l' && last != 's' &&
            last != 'z')
            s.pop_back();
        return s;
    }
    return t;
}

} // namespace detail

/// Lemma table first, then suffix rules, repeated until nothing changes, so
/// normalize_token(normalize_token(t)) == normalize_token(t).
inline std::string normalize_token(std::string_view token, const LemmaMap& lemmas = {}) {
    std::string cur(token);
    for (int guard = 0; guard < 8; ++guard) {
        std::string next = detail::normalize_once(cur, lemmas);
        if (next == cur || next.empty()) break;
        cur = std::move(next);
    }
    return cur;
}

struct CleanStem {
    std::string item_id;
    std::vector<std::string> tokens;
    bool degenerate = false; // every token was removed

    bool operator==(const CleanStem&) const = default;
};

namespace detail {

// Characters that survive punctuation stripping because the numeric rule needs them.
inline bool is_numeric_glue(char c) { return c == '.' || c == '/' || c == '%'; }

inline constexpr std::string_view kDegree = "\xC2\xB0";

// Lowercase, then replace every character except [a-z0-9], '.', '/', '%' and
// the degree sign with a space.
inline std::string strip_symbols(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || is_numeric_glue(c)) {
            out += c;
        } else if (text.substr(i, 2) == kDegree) {
            out += kDegree;
            ++i;
        } else {
            out += ' ';
        }
    }
    return out;
}

// Remove '.', '/', '%' and degree signs, returning the pieces between them.
inline std::vector<std::string> split_glue(const std::string& token) {
    std::vector<std::string> parts;
    std::string cur;
    for (std::size_t i = 0; i < token.size(); ++i) {
        if (is_numeric_glue(token[i]) || std::string_view(token).substr(i, 2) == kDegree) {
            if (token[i] == kDegree[0]) ++i;
            if (!cur.empty()) parts.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += token[i];
        }
    }
    if (!cur.empty()) parts.push_back(std::move(cur));
    return parts;
}

} // namespace detail

/// A token is numeric if it contains a digit once '.', '/', '%' and '°' are removed.
inline bool is_numeric_token(std::string_view token) {
    return std::any_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
}

/// Clean a raw stem: lowercase, strip symbols, tokenize, drop numeric and unit
/// tokens, stopwords (keeping negations), demographic and high-frequency terms,
/// then normalize. Tokens whose normal form lands in a removal list are dropped too.
inline CleanStem clean_stem(std::string_view text, const StoplistSet& lists, std::string item_id = {}) {
    CleanStem out;
    out.item_id = std::move(item_id);
    for (const auto& raw : detail::split_whitespace(detail::strip_symbols(text))) {
        if (is_numeric_token(raw)) continue;
        if (lists.units.contains(raw)) continue;
        for (auto& piece : detail::split_glue(raw)) {
            if (lists.is_removed(piece)) continue;
            std::string norm = normalize_token(piece, lists.lemmas);
            if (norm != piece && lists.is_removed(norm)) continue;
            out.tokens.push_back(std::move(norm));
        }
    }
    out.degenerate = out.tokens.empty();
    return out;
}

} // namespace itemaudit

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "itemaudit/common.hpp"

namespace itemaudit {

enum class Gender { Female, Male };

inline constexpr std::array<Gender, 2> kAllGenders = {Gender::Female, Gender::Male};

inline std::string to_string(Gender g) { return g == Gender::Female ? "F" : "M"; }

inline std::optional<Gender> parse_gender(std::string_view s) {
    const std::string v = detail::to_lower_ascii(detail::trim(s));
    if (v == "f" || v == "female") return Gender::Female;
    if (v == "m" || v == "male") return Gender::Male;
    return std::nullopt;
}

// Seven patient age bins; both named endpoints inclusive, top bin open-ended.
enum class AgeGroup { Age0to5, Age6to17, Age18to34, Age35to49, Age50to64, Age65to84, Age85Plus };

inline constexpr std::size_t kNumAgeGroups = 7;

inline constexpr std::array<AgeGroup, kNumAgeGroups> kAllAgeGroups = {
    AgeGroup::Age0to5,   AgeGroup::Age6to17,  AgeGroup::Age18to34, AgeGroup::Age35to49,
    AgeGroup::Age50to64, AgeGroup::Age65to84, AgeGroup::Age85Plus};

// Lower bound of each bin, in bin order.
inline constexpr std::array<int, kNumAgeGroups> kAgeGroupLower = {0, 6, 18, 35, 50, 65, 85};

inline std::string to_string(AgeGroup g) {
    static const std::array<const char*, kNumAgeGroups> names = {
        "0-5", "6-17", "18-34", "35-49", "50-64", "65-84", "85+"};
    return names[static_cast<std::size_t>(g)];
}

inline std::optional<AgeGroup> parse_age_group(std::string_view s) {
    for (auto g : kAllAgeGroups)
        if (to_string(g) == s) return g;
    return std::nullopt;
}

inline AgeGroup assign_age_group(long long age_years) {
    if (age_years < 0) throw AuditError("negative age " + std::to_string(age_years));
    for (std::size_t i = kNumAgeGroups; i-- > 0;)
        if (age_years >= kAgeGroupLower[i]) return kAllAgeGroups[i];
    return AgeGroup::Age0to5; // unreachable
}

struct Item {
    std::string id;
    std::string stem;
    Gender gender = Gender::Female;
    int age_years = 0;
    AgeGroup age_group = AgeGroup::Age0to5;
    std::string competency;
    std::string topic_category;

    bool operator==(const Item&) const = default;
};

/// An ordered, validated set of items. Immutable once constructed.
class Corpus {
public:
    Corpus(std::vector<Item> items, std::string provenance)
        : items_(std::move(items)), provenance_(std::move(provenance)) {
        if (items_.empty()) throw AuditError("corpus is empty");
        std::unordered_set<std::string> seen;
        for (std::size_t i = 0; i < items_.size(); ++i) {
            const Item& it = items_[i];
            if (it.id.empty()) throw AuditError("item " + std::to_string(i + 1) + " has an empty id");
            if (!seen.insert(it.id).second) throw AuditError("duplicate item id '" + it.id + "'");
            if (detail::trim(it.stem).empty()) throw AuditError("item '" + it.id + "' has an empty stem");
            if (it.age_group != assign_age_group(it.age_years))
                throw AuditError("item '" + it.id + "' age_group does not contain age_years");
        }
    }

    const std::vector<Item>& items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    const Item& operator[](std::size_t i) const { return items_[i]; }
    const std::string& provenance() const noexcept { return provenance_; }

    std::optional<std::size_t> index_of(const std::string& id) const {
        for (std::size_t i = 0; i < items_.size(); ++i)
            if (items_[i].id == id) return i;
        return std::nullopt;
    }

private:
    std::vector<Item> items_;
    std::string provenance_;
};

enum class CorpusFormat { Delimited, RecordPerLine };

inline std::optional<CorpusFormat> parse_corpus_format(std::string_view s) {
    const auto v = detail::to_lower_ascii(s);
    if (v == "delimited" || v == "csv") return CorpusFormat::Delimited;
    if (v == "record-per-line" || v == "jsonl" || v == "records") return CorpusFormat::RecordPerLine;
    return std::nullopt;
}

namespace detail {

struct RawRecord {
    std::size_t line = 0; // 1-based line where the record starts
    std::map<std::string, std::string> fields;
    std::optional<long long> age_number; // set when the source carried a typed integer
};

// Comma-separated records with RFC-4180 style quoting (quoted fields may span lines).
inline std::vector<std::pair<std::size_t, std::vector<std::string>>> parse_csv(std::string_view text) {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    std::size_t row_line = 1;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        const bool blank = row.size() == 1 && trim(row[0]).empty();
        if (!blank) rows.emplace_back(row_line, std::move(row));
        row.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            end_row();
            ++line;
            row_line = line;
        } else if (c == '\r') {
            // tolerate CRLF
        } else {
            field += c;
            field_started = true;
        }
    }
    if (in_quotes) throw AuditError("unterminated quoted field starting on line " + std::to_string(row_line));
    if (field_started || !row.empty() || !field.empty()) end_row();
    return rows;
}

inline std::vector<RawRecord> read_delimited(const std::string& text) {
    auto rows = parse_csv(text);
    if (rows.empty()) throw AuditError("delimited corpus has no header row");
    std::vector<std::string> header;
    for (auto& h : rows.front().second) header.push_back(to_lower_ascii(trim(h)));
    std::vector<RawRecord> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        auto& [line, cells] = rows[r];
        if (cells.size() != header.size())
            throw AuditError("line " + std::to_string(line) + ": expected " + std::to_string(header.size()) +
                             " fields, found " + std::to_string(cells.size()));
        RawRecord rec;
        rec.line = line;
        for (std::size_t c = 0; c < header.size(); ++c) rec.fields[header[c]] = cells[c];
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::vector<RawRecord> read_record_per_line(const std::string& text) {
    std::vector<RawRecord> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw AuditError("line " + std::to_string(lineno) + ": malformed record (" + e.what() + ")");
        }
        if (!j.is_object()) throw AuditError("line " + std::to_string(lineno) + ": record is not an object");
        RawRecord rec;
        rec.line = lineno;
        for (auto& [key, value] : j.items()) {
            if (value.is_string()) {
                rec.fields[key] = value.get<std::string>();
            } else if (value.is_number_integer()) {
                rec.fields[key] = std::to_string(value.get<long long>());
                if (key == "age") rec.age_number = value.get<long long>();
            } else if (value.is_null()) {
                continue;
            } else {
                rec.fields[key] = value.dump();
            }
        }
        out.push_back(std::move(rec));
    }
    return out;
}

inline Item item_from_record(const RawRecord& rec) {
    const std::string where = "line " + std::to_string(rec.line);
    auto field = [&](const char* name) -> const std::string& {
        auto it = rec.fields.find(name);
        if (it == rec.fields.end()) throw AuditError(where + ": missing field '" + std::string(name) + "'");
        return it->second;
    };
    Item item;
    item.id = trim(field("id"));
    if (item.id.empty()) throw AuditError(where + ": missing id");
    item.stem = field("stem");
    if (trim(item.stem).empty()) throw AuditError(where + ": empty stem for item '" + item.id + "'");
    const std::string& g = field("gender");
    auto gender = parse_gender(g);
    if (!gender) throw AuditError(where + ": unknown gender value '" + g + "'");
    item.gender = *gender;

    const std::string age_text = trim(field("age"));
    long long age = 0;
    if (rec.age_number) {
        age = *rec.age_number;
    } else {
        std::size_t used = 0;
        try {
            age = std::stoll(age_text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (age_text.empty() || used != age_text.size())
            throw AuditError(where + ": age '" + age_text + "' is not an integer");
    }
    if (age < 0) throw AuditError(where + ": negative age " + std::to_string(age));
    if (age > 150) throw AuditError(where + ": implausible age " + std::to_string(age));
    item.age_years = static_cast<int>(age);
    item.age_group = assign_age_group(age);
    item.competency = trim(field("competency"));
    // "topic" is the external key; "topic_category" accepted as an alias.
    auto t = rec.fields.find("topic");
    if (t == rec.fields.end()) t = rec.fields.find("topic_category");
    if (t == rec.fields.end()) throw AuditError(where + ": missing field 'topic'");
    item.topic_category = trim(t->second);
    return item;
}

} // namespace detail

/// Parse corpus text. Every malformed row is reported with its line number.
inline Corpus parse_corpus(const std::string& text, CorpusFormat format, std::string provenance) {
    const auto records = format == CorpusFormat::Delimited ? detail::read_delimited(text)
                                                           : detail::read_record_per_line(text);
    std::vector<Item> items;
    std::map<std::string, std::size_t> first_line;
    for (const auto& rec : records) {
        Item item = detail::item_from_record(rec);
        auto [it, inserted] = first_line.emplace(item.id, rec.line);
        if (!inserted)
            throw AuditError("line " + std::to_string(rec.line) + ": duplicate id '" + item.id +
                             "' (first seen on line " + std::to_string(it->second) + ")");
        items.push_back(std::move(item));
    }
    if (items.empty()) throw AuditError("corpus contains no records");
    return Corpus(std::move(items), std::move(provenance));
}

inline Corpus load_corpus(const std::string& path, CorpusFormat format) {
    return parse_corpus(detail::read_file(path), format, path);
}

inline nlohmann::json item_to_json(const Item& item) {
    return {{"id", item.id},
            {"stem", item.stem},
            {"gender", to_string(item.gender)},
            {"age", item.age_years},
            {"competency", item.competency},
            {"topic", item.topic_category}};
}

/// Record-per-line serialization; load_corpus(RecordPerLine) reads it back unchanged.
inline std::string serialize_corpus(const Corpus& corpus) {
    std::string out;
    for (const auto& item : corpus.items()) {
        out += item_to_json(item).dump();
        out += '\n';
    }
    return out;
}

namespace detail {
inline std::string csv_cell(const std::string& v) {
    if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}
} // namespace detail

/// Comma-delimited serialization with a header row.
inline std::string serialize_corpus_delimited(const Corpus& corpus) {
    std::string out = "id,stem,gender,age,competency,topic\n";
    for (const auto& it : corpus.items()) {
        out += detail::csv_cell(it.id) + "," + detail::csv_cell(it.stem) + "," + to_string(it.gender) + "," +
               std::to_string(it.age_years) + "," + detail::csv_cell(it.competency) + "," +
               detail::csv_cell(it.topic_category) + "\n";
    }
    return out;
}

inline void save_corpus(const Corpus& corpus, const std::string& path, CorpusFormat format = CorpusFormat::RecordPerLine) {
    detail::write_file(path, format == CorpusFormat::Delimited ? serialize_corpus_delimited(corpus)
                                                               : serialize_corpus(corpus));
}

// ---------------------------------------------------------------------------
// Synthetic corpora with planted structure, used as test fixtures and demos.

/// A term inserted into an exact fraction of one (community, gender) group.
struct PlantedTerm {
    std::string term;
    std::size_t community = 0;
    Gender gender = Gender::Female;
    double rate = 0.0;
};

struct SyntheticSpec {
    std::size_t n_items = 500;
    std::size_t n_communities = 5;
    double marker_strength = 0.0;
    std::size_t vocab_size = 500; // total community vocabulary, split evenly
    std::uint64_t seed = 1;
    std::size_t words_per_stem = 20;
    std::size_t marker_community = 0;
    Gender marker_gender = Gender::Female;
    std::size_t n_marker_tokens = 3;
    std::vector<PlantedTerm> planted_terms;
};

// Tokens reserved for demographic markers. Their letters (q, x, z, w, y, j)
// never occur in community words, so the two sets cannot overlap.
inline const std::vector<std::string>& marker_token_pool() {
    static const std::vector<std::string> pool = {"zorquil", "xanthiv", "quezzol", "wyxaril",
                                                  "jaxomir", "yzzitar", "quixabel", "zywonek"};
    return pool;
}

// Word number `index` of the community alphabet: three consonant-vowel syllables.
inline std::string community_word(std::size_t index) {
    static constexpr std::string_view consonants = "bdfgklmnprtv";
    static constexpr std::string_view vowels = "aeiou";
    constexpr std::size_t syllables = 12 * 5;
    constexpr std::size_t space = syllables * syllables * syllables;
    if (index >= space) throw AuditError("community word index out of range");
    std::size_t code = (index * 7919 + 13) % space;
    std::string w;
    for (int s = 0; s < 3; ++s) {
        const std::size_t syl = code % syllables;
        code /= syllables;
        w += consonants[syl / 5];
        w += vowels[syl % 5];
    }
    return w;
}

inline std::string synthetic_spec_fingerprint(const SyntheticSpec& s) {
    std::ostringstream os;
    os << s.n_items << '|' << s.n_communities << '|' << s.marker_strength << '|' << s.vocab_size << '|' << s.seed
       << '|' << s.words_per_stem << '|' << s.marker_community << '|' << to_string(s.marker_gender) << '|'
       << s.n_marker_tokens;
    for (const auto& p : s.planted_terms)
        os << '|' << p.term << ',' << p.community << ',' << to_string(p.gender) << ',' << p.rate;
    // FNV-1a
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : os.str()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream hex;
    hex << std::hex << h;
    return hex.str();
}

/// Community index of every synthetic item, recovered from its id ("syn-<community>-<n>").
inline std::size_t synthetic_community_of(const std::string& id) {
    const auto a = id.find('-');
    const auto b = id.find('-', a + 1);
    if (a == std::string::npos || b == std::string::npos) throw AuditError("not a synthetic id: " + id);
    return static_cast<std::size_t>(std::stoul(id.substr(a + 1, b - a - 1)));
}

inline Corpus generate_synthetic_corpus(const SyntheticSpec& spec) {
    if (spec.n_communities < 1) throw AuditError("n_communities must be >= 1");
    if (spec.n_items < spec.n_communities) throw AuditError("n_items must be >= n_communities");
    if (!(spec.marker_strength >= 0.0 && spec.marker_strength <= 1.0))
        throw AuditError("marker_strength must be in [0, 1]");
    if (spec.vocab_size / spec.n_communities < 5)
        throw AuditError("vocab_size " + std::to_string(spec.vocab_size) + " too small for " +
                         std::to_string(spec.n_communities) + " communities (need >= 5 words each)");
    if (spec.marker_community >= spec.n_communities) throw AuditError("marker_community out of range");
    if (spec.n_marker_tokens < 1 || spec.n_marker_tokens > marker_token_pool().size())
        throw AuditError("n_marker_tokens out of range");
    if (spec.words_per_stem < 1) throw AuditError("words_per_stem must be >= 1");
    for (const auto& p : spec.planted_terms) {
        if (p.community >= spec.n_communities) throw AuditError("planted term community out of range");
        if (!(p.rate >= 0.0 && p.rate <= 1.0)) throw AuditError("planted term rate must be in [0, 1]");
    }

    static const std::array<const char*, 3> competencies = {
        "Medical Knowledge: Applying Foundational Science Concepts", "Patient Care: Diagnosis",
        "Patient Care: Management"};
    static const std::array<const char*, 4> topics = {"Cardiovascular System", "Reproductive & Endocrine Systems",
                                                      "Respiratory System", "Nervous System"};

    Rng rng(spec.seed);
    const std::size_t per_community = spec.vocab_size / spec.n_communities;

    struct Draft {
        std::size_t community;
        std::size_t serial;
        Gender gender;
        int age;
        std::vector<std::string> words;
        std::string competency;
        std::string topic;
    };
    std::vector<Draft> drafts(spec.n_items);
    std::vector<std::vector<std::size_t>> members(spec.n_communities);
    for (std::size_t i = 0; i < spec.n_items; ++i) {
        Draft& d = drafts[i];
        d.community = i % spec.n_communities;
        d.serial = members[d.community].size();
        members[d.community].push_back(i);
    }
    // Exactly balanced genders within each community.
    for (auto& group : members) {
        std::vector<Gender> genders;
        for (std::size_t j = 0; j < group.size(); ++j)
            genders.push_back(j % 2 == 0 ? Gender::Female : Gender::Male);
        rng.shuffle(genders);
        for (std::size_t j = 0; j < group.size(); ++j) drafts[group[j]].gender = genders[j];
    }
    for (auto& d : drafts) {
        const std::size_t bin = rng.index(kNumAgeGroups);
        const int lo = kAgeGroupLower[bin];
        const int hi = bin + 1 < kNumAgeGroups ? kAgeGroupLower[bin + 1] - 1 : 99;
        d.age = lo + static_cast<int>(rng.index(static_cast<std::size_t>(hi - lo + 1)));
        for (std::size_t w = 0; w < spec.words_per_stem; ++w)
            d.words.push_back(community_word(d.community * per_community + rng.index(per_community)));
        d.competency = competencies[rng.index(competencies.size())];
        d.topic = topics[rng.index(topics.size())];
    }

    // Insert `term` into exactly ceil(rate * |group|) randomly chosen members of the group.
    auto plant = [&](std::size_t community, Gender gender, double rate, auto&& choose_term) {
        std::vector<std::size_t> group;
        for (std::size_t idx : members[community])
            if (drafts[idx].gender == gender) group.push_back(idx);
        rng.shuffle(group);
        const auto count = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(group.size()) - 1e-9));
        for (std::size_t j = 0; j < count && j < group.size(); ++j) {
            auto& words = drafts[group[j]].words;
            words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.index(words.size() + 1)), choose_term());
        }
    };
    if (spec.marker_strength > 0.0) {
        const auto& pool = marker_token_pool();
        plant(spec.marker_community, spec.marker_gender, spec.marker_strength,
              [&] { return pool[rng.index(spec.n_marker_tokens)]; });
    }
    for (const auto& p : spec.planted_terms) plant(p.community, p.gender, p.rate, [&] { return p.term; });

    std::vector<Item> items;
    items.reserve(drafts.size());
    for (const auto& d : drafts) {
        const bool child = d.age < 18;
        const char* noun = d.gender == Gender::Female ? (child ? "girl" : "woman") : (child ? "boy" : "man");
        std::string stem;
        if (d.age == 0)
            stem = "A " + std::to_string(1 + d.serial % 11) + "-month-old " + noun;
        else
            stem = "A " + std::to_string(d.age) + "-year-old " + noun;
        stem += " with " + detail::join(d.words, " ") + ". Which of the following is the most likely diagnosis?";
        Item item;
        item.id = "syn-" + std::to_string(d.community) + "-" + std::to_string(d.serial);
        item.stem = std::move(stem);
        item.gender = d.gender;
        item.age_years = d.age;
        item.age_group = assign_age_group(d.age);
        item.competency = d.competency;
        item.topic_category = d.topic;
        items.push_back(std::move(item));
    }
    return Corpus(std::move(items), "synthetic:" + synthetic_spec_fingerprint(spec));
}

} // namespace itemaudit

#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "itemaudit/report.hpp"

#ifndef ITEMAUDIT_DATA_DIR
#define ITEMAUDIT_DATA_DIR "data"
#endif

namespace itemaudit {

namespace fs = std::filesystem;

struct ConfigKey {
    const char* name;
    const char* default_value;
    const char* help;
};

// Every recognised key with its default. "@data/" expands to the shipped data directory.
inline const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"corpus", "", "input corpus file"},
        {"corpus_format", "auto", "csv | jsonl | auto (by extension)"},
        {"stopwords", "@data/stopwords.txt", "stopword list"},
        {"negations", "@data/negations.txt", "stopwords that are kept (negation cues)"},
        {"units", "@data/units.txt", "unit tokens"},
        {"demographic", "@data/demographic.txt", "gender and age words"},
        {"highfreq", "@data/highfreq.txt", "domain high-frequency terms"},
        {"lemmas", "@data/lemmas.tsv", "irregular form to lemma table"},
        {"min_df", "2", "minimum document frequency of a vocabulary term"},
        {"features", "tfidf", "feature sources for prediction: tfidf, external (comma separated)"},
        {"cluster_features", "tfidf", "feature source used for clustering"},
        {"embeddings", "", "JSON-lines file of {id, vector} records for the external source"},
        {"k_min", "2", "smallest k scanned"},
        {"k_max", "7", "largest k scanned"},
        {"restarts", "5", "k-means restarts per k"},
        {"max_iter", "300", "k-means iteration cap"},
        {"tol", "1e-9", "k-means relative SSE tolerance"},
        {"lr", "0.1", "logistic regression learning rate"},
        {"epochs", "200", "logistic regression epochs"},
        {"batch_size", "32", "logistic regression mini-batch size"},
        {"l2", "0.001", "logistic regression L2 penalty"},
        {"mnb_alpha", "1", "naive Bayes additive smoothing"},
        {"models", "logreg,mnb", "classifiers to run"},
        {"train_ratio", "0.8", "training fraction of each cluster"},
        {"split_repeats", "1", "number of train/test splits per task"},
        {"correct_source", "tfidf", "feature source whose correct predictions feed topics/ner/analysis"},
        {"correct_model", "logreg", "model whose correct predictions feed topics/ner/analysis"},
        {"topics", "true", "run the topic stage"},
        {"lda_topics", "2", "number of LDA topics"},
        {"lda_alpha", "0", "document-topic prior; <= 0 means 50 / lda_topics"},
        {"lda_beta", "0.01", "topic-word prior"},
        {"lda_iterations", "1000", "Gibbs sweeps"},
        {"top_n", "10", "terms listed per topic"},
        {"ner", "true", "run the entity stage"},
        {"gazetteer", "@data/gazetteer.csv", "surface,type entity dictionary"},
        {"analysis", "true", "run the metadata distribution checks"},
        {"chi2_threshold", "0.05", "p-value threshold of the uniformity test"},
        {"flag_margin", "0.10", "accuracy over max baseline that marks a pattern"},
        {"out_dir", "itemaudit-out", "directory for intermediates and reports"},
        {"seed", "1", "global seed"},
        {"quiet", "false", "suppress progress messages"},
    };
    return keys;
}

// Keys that do not influence results and are left out of the report snapshot.
inline bool is_presentation_key(const std::string& k) { return k == "out_dir" || k == "quiet"; }

class PipelineConfig {
public:
    PipelineConfig() {
        for (const auto& k : config_keys()) values_[k.name] = k.default_value;
    }

    static bool known(const std::string& key) {
        for (const auto& k : config_keys())
            if (key == k.name) return true;
        return false;
    }

    void set(const std::string& key, const std::string& value) {
        if (!known(key)) throw AuditError("config: unknown key '" + key + "'");
        values_[key] = value;
    }

    const std::string& raw(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw AuditError("config: unknown key '" + key + "'");
        return it->second;
    }

    std::string path(const std::string& key) const {
        const auto& v = raw(key);
        if (v.rfind("@data/", 0) == 0) return std::string(ITEMAUDIT_DATA_DIR) + "/" + v.substr(6);
        return v;
    }

    std::string str(const std::string& key) const { return raw(key); }

    double number(const std::string& key) const {
        const auto& v = raw(key);
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw AuditError("config: '" + key + "' expects a number, got '" + v + "'");
        }
    }

    std::uint64_t unsigned_integer(const std::string& key) const {
        const auto& v = raw(key);
        try {
            if (v.empty() || v[0] == '-') throw std::invalid_argument(v);
            std::size_t pos = 0;
            const auto n = std::stoull(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return n;
        } catch (const std::exception&) {
            throw AuditError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
        }
    }

    bool flag(const std::string& key) const {
        const auto v = detail::to_lower_ascii(raw(key));
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw AuditError("config: '" + key + "' expects true/false, got '" + raw(key) + "'");
    }

    std::vector<std::string> list(const std::string& key) const {
        std::vector<std::string> out;
        std::string cur;
        for (char c : raw(key) + ",") {
            if (c == ',') {
                auto t = detail::trim(cur);
                if (!t.empty()) out.push_back(detail::to_lower_ascii(t));
                cur.clear();
            } else {
                cur += c;
            }
        }
        return out;
    }

    fs::path out_dir() const { return fs::path(raw("out_dir")); }
    std::uint64_t seed() const { return unsigned_integer("seed"); }
    bool quiet() const { return flag("quiet"); }

    const std::map<std::string, std::string>& values() const { return values_; }

    json snapshot() const {
        json j = json::object();
        for (auto& [k, v] : values_)
            if (!is_presentation_key(k)) j[k] = v;
        return j;
    }

private:
    std::map<std::string, std::string> values_;
};

/// Parse `key = value` lines; '#' starts a comment.
inline void apply_config_text(PipelineConfig& cfg, const std::string& text, const std::string& origin) {
    std::size_t line_no = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto t = detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw AuditError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
        const auto key = detail::trim(t.substr(0, eq));
        if (!PipelineConfig::known(key))
            throw AuditError(origin + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        cfg.set(key, detail::trim(t.substr(eq + 1)));
    }
}

inline PipelineConfig load_config(const std::string& path) {
    PipelineConfig cfg;
    if (!fs::exists(path)) throw AuditError("config file not found: " + path);
    apply_config_text(cfg, detail::read_file(path), path);
    // Relative corpus/embedding paths resolve against the config file's directory.
    const auto base = fs::path(path).parent_path();
    for (const char* key : {"corpus", "embeddings", "stopwords", "negations", "units", "demographic", "highfreq",
                            "lemmas", "gazetteer"}) {
        const auto& v = cfg.raw(key);
        if (!v.empty() && v.rfind("@data/", 0) != 0 && fs::path(v).is_relative() && !base.empty())
            cfg.set(key, (base / v).lexically_normal().string());
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Stage plumbing

namespace artifact {
inline constexpr const char* kCorpus = "corpus.jsonl";
inline constexpr const char* kPreprocess = "preprocess.json";
inline constexpr const char* kClean = "clean.jsonl";
inline constexpr const char* kClusters = "clusters.json";
inline constexpr const char* kKSelection = "kselection.tsv";
inline constexpr const char* kPredictions = "predictions.json";
inline constexpr const char* kTopics = "topics.json";
inline constexpr const char* kEntities = "entities.json";
inline constexpr const char* kEntityDir = "entities";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kReportMd = "report.md";
} // namespace artifact

namespace detail {

inline void log(const PipelineConfig& cfg, const std::string& msg) {
    if (!cfg.quiet()) std::cerr << "[itemaudit] " << msg << "\n";
}

inline fs::path require_artifact(const PipelineConfig& cfg, const char* name, const char* producer) {
    const auto p = cfg.out_dir() / name;
    if (!fs::exists(p))
        throw AuditError("missing artifact " + p.string() + " (run '" + std::string(producer) + "' first)");
    return p;
}

inline json read_json(const fs::path& p) {
    try {
        return json::parse(read_file(p.string()));
    } catch (const json::exception& e) {
        throw AuditError("malformed artifact " + p.string() + ": " + e.what());
    }
}

inline void write_json(const fs::path& p, const json& j) { write_file(p.string(), j.dump(2) + "\n"); }

inline void require_file(const PipelineConfig& cfg, const std::string& key) {
    const auto p = cfg.path(key);
    if (p.empty()) throw AuditError("config: '" + key + "' is not set");
    if (!fs::exists(p)) throw AuditError(key + " file not found: " + p);
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

template <class F>
auto run_stage(const char* stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

inline FeatureSource feature_source_of(const PipelineConfig&, const std::string& key, const std::string& v) {
    auto s = parse_feature_source(v);
    if (!s) throw AuditError("config: '" + key + "' has unknown feature source '" + v + "'");
    return *s;
}

} // namespace detail

inline CorpusFormat resolve_corpus_format(const PipelineConfig& cfg) {
    const auto f = detail::to_lower_ascii(cfg.raw("corpus_format"));
    if (f == "auto") {
        const auto ext = detail::to_lower_ascii(fs::path(cfg.path("corpus")).extension().string());
        return ext == ".jsonl" || ext == ".json" || ext == ".ndjson" ? CorpusFormat::RecordPerLine
                                                                     : CorpusFormat::Delimited;
    }
    auto parsed = parse_corpus_format(f);
    if (!parsed) throw AuditError("config: unknown corpus_format '" + cfg.raw("corpus_format") + "'");
    return *parsed;
}

inline StoplistSet load_configured_stoplists(const PipelineConfig& cfg) {
    StoplistPaths p;
    p.stopwords = cfg.path("stopwords");
    p.negation_exceptions = cfg.path("negations");
    p.units = cfg.path("units");
    p.demographic_terms = cfg.path("demographic");
    p.domain_highfreq = cfg.path("highfreq");
    p.lemmas = cfg.path("lemmas");
    for (const auto& path : {p.stopwords, p.negation_exceptions, p.units, p.demographic_terms, p.domain_highfreq, p.lemmas})
        if (!path.empty() && !fs::exists(path)) throw AuditError("stoplist file not found: " + path);
    return load_stoplists(p);
}

/// Check everything that can be checked before any stage runs.
inline void validate_config(const PipelineConfig& cfg) {
    detail::require_file(cfg, "corpus");
    resolve_corpus_format(cfg);
    for (const char* k : {"min_df", "k_min", "k_max", "restarts", "max_iter", "epochs", "batch_size", "split_repeats",
                          "lda_topics", "lda_iterations", "top_n", "seed"})
        cfg.unsigned_integer(k);
    for (const char* k : {"tol", "lr", "l2", "mnb_alpha", "train_ratio", "lda_alpha", "lda_beta", "chi2_threshold",
                          "flag_margin"})
        cfg.number(k);
    for (const char* k : {"topics", "ner", "analysis", "quiet"}) cfg.flag(k);
    if (cfg.unsigned_integer("k_min") < 2 || cfg.unsigned_integer("k_max") < cfg.unsigned_integer("k_min"))
        throw AuditError("config: need 2 <= k_min <= k_max");
    const double ratio = cfg.number("train_ratio");
    if (!(ratio > 0.0 && ratio < 1.0)) throw AuditError("config: train_ratio must lie in (0, 1)");
    bool need_external = false;
    for (const auto& s : cfg.list("features"))
        need_external |= detail::feature_source_of(cfg, "features", s) == FeatureSource::External;
    need_external |= detail::feature_source_of(cfg, "cluster_features", cfg.raw("cluster_features")) ==
                     FeatureSource::External;
    if (need_external) detail::require_file(cfg, "embeddings");
    for (const auto& m : cfg.list("models"))
        if (!parse_model_kind(m)) throw AuditError("config: unknown model '" + m + "'");
    if (cfg.list("models").empty()) throw AuditError("config: no models selected");
    detail::feature_source_of(cfg, "correct_source", cfg.raw("correct_source"));
    if (!parse_model_kind(cfg.raw("correct_model")))
        throw AuditError("config: unknown correct_model '" + cfg.raw("correct_model") + "'");
    if (cfg.flag("ner")) detail::require_file(cfg, "gazetteer");
}

// -- preprocess --------------------------------------------------------------

inline void stage_preprocess(const PipelineConfig& cfg) {
    detail::run_stage("preprocess", [&] {
        detail::require_file(cfg, "corpus");
        const auto corpus = load_corpus(cfg.path("corpus"), resolve_corpus_format(cfg));
        const auto lists = load_configured_stoplists(cfg);
        fs::create_directories(cfg.out_dir());
        save_corpus(corpus, (cfg.out_dir() / artifact::kCorpus).string());
        std::string clean;
        std::size_t degenerate = 0;
        for (const auto& item : corpus.items()) {
            const auto cs = clean_stem(item.stem, lists, item.id);
            if (cs.degenerate) ++degenerate;
            clean += clean_stem_to_json(cs).dump() + "\n";
        }
        detail::write_file((cfg.out_dir() / artifact::kClean).string(), clean);
        detail::write_json(cfg.out_dir() / artifact::kPreprocess,
                           {{"provenance", corpus.provenance()}, {"n_items", corpus.size()}, {"n_degenerate", degenerate}});
        detail::log(cfg, "preprocess: " + std::to_string(corpus.size()) + " items, " + std::to_string(degenerate) +
                             " empty after cleaning");
    });
}

struct PreprocessedCorpus {
    Corpus corpus;
    std::vector<CleanStem> stems;
    std::string provenance;
    std::size_t n_degenerate = 0;
};

inline PreprocessedCorpus load_preprocessed(const PipelineConfig& cfg) {
    const auto meta = detail::read_json(detail::require_artifact(cfg, artifact::kPreprocess, "preprocess"));
    const auto cpath = detail::require_artifact(cfg, artifact::kCorpus, "preprocess");
    const auto spath = detail::require_artifact(cfg, artifact::kClean, "preprocess");
    auto corpus = parse_corpus(detail::read_file(cpath.string()), CorpusFormat::RecordPerLine,
                               meta.at("provenance").get<std::string>());
    std::vector<CleanStem> stems;
    for (const auto& line : detail::read_lines(spath.string())) {
        if (detail::trim(line).empty()) continue;
        stems.push_back(clean_stem_from_json(json::parse(line)));
    }
    if (stems.size() != corpus.size()) throw AuditError("clean stems are not aligned with the corpus");
    for (std::size_t i = 0; i < stems.size(); ++i)
        if (stems[i].item_id != corpus[i].id)
            throw AuditError("clean stem for '" + stems[i].item_id + "' is out of order");
    return {std::move(corpus), std::move(stems), meta.at("provenance").get<std::string>(),
            meta.at("n_degenerate").get<std::size_t>()};
}

// -- cluster -----------------------------------------------------------------

inline Matrix feature_matrix(const PipelineConfig& cfg, const PreprocessedCorpus& pc, FeatureSource source) {
    if (source == FeatureSource::External) {
        std::vector<std::string> ids;
        for (const auto& it : pc.corpus.items()) ids.push_back(it.id);
        detail::require_file(cfg, "embeddings");
        return stack_vectors(load_embeddings(cfg.path("embeddings"), ids));
    }
    TokenDocs docs;
    for (const auto& s : pc.stems) docs.push_back(s.tokens);
    const auto vocab = build_vocabulary(docs, cfg.unsigned_integer("min_df"));
    std::vector<DocVector> rows;
    for (const auto& s : pc.stems) rows.push_back(tfidf_vector(s.tokens, vocab, s.item_id));
    return stack_vectors(rows);
}

inline void stage_cluster(const PipelineConfig& cfg) {
    detail::run_stage("cluster", [&] {
        const auto pc = load_preprocessed(cfg);
        const auto source = detail::feature_source_of(cfg, "cluster_features", cfg.raw("cluster_features"));
        const Matrix x = feature_matrix(cfg, pc, source);
        const auto k_min = cfg.unsigned_integer("k_min"), k_max = cfg.unsigned_integer("k_max");
        if (k_max + 1 > pc.corpus.size())
            throw AuditError("k range [" + std::to_string(k_min) + ", " + std::to_string(k_max) +
                             "] exceeds n-1 for n=" + std::to_string(pc.corpus.size()));
        const auto res = select_k(x, k_min, k_max, derive_seed(cfg.seed(), {0xC1u}), cfg.unsigned_integer("restarts"),
                                  cfg.unsigned_integer("max_iter"), cfg.number("tol"));
        json assignment = json::array();
        for (std::size_t i = 0; i < pc.corpus.size(); ++i) assignment.push_back({pc.corpus[i].id, res.chosen.labels[i]});
        json j = k_selection_to_json(res.selection);
        j["feature_source"] = to_string(source);
        j["assignment"] = assignment;
        j["cluster_sizes"] = res.chosen.cluster_sizes();
        detail::write_json(cfg.out_dir() / artifact::kClusters, j);
        std::map<std::size_t, std::pair<double, double>> rows;
        for (auto& [k, v] : res.selection.sse_curve) rows[k].first = v;
        std::string tsv = "k\tsse\tsilhouette\n";
        for (auto& [k, v] : rows) {
            std::string sil = "NA";
            for (auto& [k2, s] : res.selection.silhouette_scores)
                if (k2 == k) sil = json(s).dump();
            tsv += std::to_string(k) + "\t" + json(v.first).dump() + "\t" + sil + "\n";
        }
        detail::write_file((cfg.out_dir() / artifact::kKSelection).string(), tsv);
        detail::log(cfg, "cluster: chose k=" + std::to_string(res.selection.chosen_k));
    });
}

struct ClusterArtifact {
    KSelection selection;
    std::string feature_source;
    std::vector<std::size_t> cluster_of; // aligned with corpus
};

inline ClusterArtifact load_clusters(const PipelineConfig& cfg, const Corpus& corpus) {
    const auto j = detail::read_json(detail::require_artifact(cfg, artifact::kClusters, "cluster"));
    ClusterArtifact out;
    out.selection = k_selection_from_json(j);
    out.feature_source = j.at("feature_source").get<std::string>();
    const auto& a = j.at("assignment");
    if (a.size() != corpus.size()) throw AuditError("cluster assignment is not aligned with the corpus");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].at(0).get<std::string>() != corpus[i].id)
            throw AuditError("cluster assignment for '" + a[i].at(0).get<std::string>() + "' is out of order");
        const auto c = a[i].at(1).get<std::size_t>();
        if (c >= out.selection.chosen_k) throw AuditError("cluster index out of range");
        out.cluster_of.push_back(c);
    }
    return out;
}

// -- predict -----------------------------------------------------------------

inline PredictionConfig prediction_config(const PipelineConfig& cfg) {
    PredictionConfig p;
    p.sources.clear();
    for (const auto& s : cfg.list("features")) {
        const auto src = detail::feature_source_of(cfg, "features", s);
        if (std::find(p.sources.begin(), p.sources.end(), src) == p.sources.end()) p.sources.push_back(src);
    }
    if (p.sources.empty()) throw AuditError("config: no feature sources selected");
    p.models.clear();
    for (const auto& m : cfg.list("models")) {
        const auto mk = parse_model_kind(m);
        if (!mk) throw AuditError("config: unknown model '" + m + "'");
        if (std::find(p.models.begin(), p.models.end(), *mk) == p.models.end()) p.models.push_back(*mk);
    }
    p.logreg.learning_rate = cfg.number("lr");
    p.logreg.epochs = cfg.unsigned_integer("epochs");
    p.logreg.batch_size = cfg.unsigned_integer("batch_size");
    p.logreg.l2 = cfg.number("l2");
    p.mnb_alpha = cfg.number("mnb_alpha");
    p.min_df = cfg.unsigned_integer("min_df");
    p.train_ratio = cfg.number("train_ratio");
    p.split_repeats = cfg.unsigned_integer("split_repeats");
    p.seed = derive_seed(cfg.seed(), {0x9Du});
    return p;
}

inline void stage_predict(const PipelineConfig& cfg) {
    detail::run_stage("predict", [&] {
        const auto pc = load_preprocessed(cfg);
        const auto cl = load_clusters(cfg, pc.corpus);
        const auto pcfg = prediction_config(cfg);
        std::optional<Matrix> external;
        if (std::find(pcfg.sources.begin(), pcfg.sources.end(), FeatureSource::External) != pcfg.sources.end())
            external = feature_matrix(cfg, pc, FeatureSource::External);
        const auto outcome = run_prediction_tasks(pc.corpus, pc.stems, cl.cluster_of, cl.selection.chosen_k,
                                                  external ? &*external : nullptr, pcfg);
        json results = json::array(), skipped = json::array();
        for (const auto& r : outcome.results) results.push_back(task_result_to_json(r));
        for (const auto& s : outcome.skipped) skipped.push_back(skipped_to_json(s));
        detail::write_json(cfg.out_dir() / artifact::kPredictions, {{"results", results}, {"skipped", skipped}});
        detail::log(cfg, "predict: " + std::to_string(outcome.results.size()) + " cells, " +
                             std::to_string(outcome.skipped.size()) + " skipped");
    });
}

inline PredictionOutcome load_predictions(const PipelineConfig& cfg) {
    const auto j = detail::read_json(detail::require_artifact(cfg, artifact::kPredictions, "predict"));
    PredictionOutcome out;
    for (const auto& r : j.at("results")) out.results.push_back(task_result_from_json(r));
    for (const auto& s : j.at("skipped")) out.skipped.push_back(skipped_from_json(s));
    return out;
}

inline std::vector<Subset> configured_subsets(const PipelineConfig& cfg, const PreprocessedCorpus& pc,
                                              const PredictionOutcome& pred) {
    const auto src = detail::feature_source_of(cfg, "correct_source", cfg.raw("correct_source"));
    const auto model = parse_model_kind(cfg.raw("correct_model"));
    if (!model) throw AuditError("config: unknown correct_model '" + cfg.raw("correct_model") + "'");
    return correct_subsets(pred.results, pc.corpus, src, *model);
}

inline TokenDocs subset_docs(const PreprocessedCorpus& pc, const Subset& s) {
    std::unordered_map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < pc.corpus.size(); ++i) row_of[pc.corpus[i].id] = i;
    TokenDocs docs;
    for (const auto& id : s.ids) docs.push_back(pc.stems.at(row_of.at(id)).tokens);
    return docs;
}

inline std::uint64_t subset_seed(std::uint64_t seed, const Subset& s, std::uint64_t salt) {
    std::uint64_t h = 0xcbf29ce484222325ULL; // value name hash keeps the seed independent of subset order
    for (char c : s.value) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
    return derive_seed(seed, {salt, s.cluster, static_cast<std::uint64_t>(s.attribute), h});
}

// -- topics ------------------------------------------------------------------

inline void stage_topics(const PipelineConfig& cfg) {
    detail::run_stage("topics", [&] {
        json out;
        if (!cfg.flag("topics")) {
            out = {{"status", "skipped (disabled)"}, {"subsets", json::array()}};
        } else {
            const auto pc = load_preprocessed(cfg);
            const auto pred = load_predictions(cfg);
            LdaParams params;
            params.n_topics = cfg.unsigned_integer("lda_topics");
            params.alpha = cfg.number("lda_alpha");
            params.beta = cfg.number("lda_beta");
            params.iterations = cfg.unsigned_integer("lda_iterations");
            const auto top_n = cfg.unsigned_integer("top_n");
            json subsets = json::array();
            for (const auto& s : configured_subsets(cfg, pc, pred)) {
                TopicSubsetResult r{s, {}, {}};
                try {
                    const auto model = lda_fit(subset_docs(pc, s), params, subset_seed(cfg.seed(), s, 0x7091Cu));
                    for (std::size_t t = 0; t < model.n_topics; ++t) r.topics.push_back(top_terms(model, t, top_n));
                } catch (const AuditError& e) {
                    r.note = std::string("skipped: ") + e.what();
                }
                subsets.push_back(topic_subset_to_json(r));
            }
            out = {{"status", "completed"}, {"subsets", subsets}};
            detail::log(cfg, "topics: " + std::to_string(subsets.size()) + " subsets");
        }
        fs::create_directories(cfg.out_dir());
        detail::write_json(cfg.out_dir() / artifact::kTopics, out);
    });
}

// -- ner ---------------------------------------------------------------------

inline void stage_ner(const PipelineConfig& cfg) {
    detail::run_stage("ner", [&] {
        json out;
        if (!cfg.flag("ner")) {
            out = {{"status", "skipped (disabled)"}, {"tables", json::array()}};
        } else {
            detail::require_file(cfg, "gazetteer");
            const auto pc = load_preprocessed(cfg);
            const auto pred = load_predictions(cfg);
            const auto lists = load_configured_stoplists(cfg);
            const auto gaz = load_gazetteer(cfg.path("gazetteer"), lists.lemmas);
            const auto dir = cfg.out_dir() / artifact::kEntityDir;
            fs::create_directories(dir);
            json tables = json::array();
            for (const auto& s : configured_subsets(cfg, pc, pred)) {
                EntitySubsetResult r{s, entity_frequencies(subset_docs(pc, s), gaz, s.label())};
                detail::write_file((dir / (s.slug() + ".tsv")).string(), frequency_table_tsv(r.table));
                tables.push_back(entity_subset_to_json(r));
            }
            out = {{"status", "completed"}, {"tables", tables}};
            detail::log(cfg, "ner: " + std::to_string(tables.size()) + " tables");
        }
        fs::create_directories(cfg.out_dir());
        detail::write_json(cfg.out_dir() / artifact::kEntities, out);
    });
}

// -- analysis + report -------------------------------------------------------

inline std::vector<DistributionResult> run_distribution_checks(const PipelineConfig& cfg, const PreprocessedCorpus& pc,
                                                               const ClusterArtifact& cl,
                                                               const std::vector<Subset>& subsets) {
    std::unordered_map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < pc.corpus.size(); ++i) row_of[pc.corpus[i].id] = i;
    std::vector<DistributionResult> out;
    const double threshold = cfg.number("chi2_threshold");
    for (const auto& s : subsets) {
        std::vector<const Item*> parent, members;
        for (std::size_t i = 0; i < pc.corpus.size(); ++i)
            if (cl.cluster_of[i] == s.cluster) parent.push_back(&pc.corpus[i]);
        for (const auto& id : s.ids) members.push_back(&pc.corpus[row_of.at(id)]);
        for (auto field : {MetadataField::Competency, MetadataField::TopicCategory})
            out.push_back({s.cluster, s.attribute, metadata_distribution(members, parent, field, threshold, s.label())});
    }
    return out;
}

struct ReportOutcome {
    json report;
    std::size_t flagged_tasks = 0;
};

inline ReportOutcome stage_report(const PipelineConfig& cfg) {
    return detail::run_stage("report", [&] {
        const auto pc = load_preprocessed(cfg);
        const auto cl = load_clusters(cfg, pc.corpus);
        const auto pred = load_predictions(cfg);
        const auto topics = detail::read_json(detail::require_artifact(cfg, artifact::kTopics, "topics"));
        const auto ents = detail::read_json(detail::require_artifact(cfg, artifact::kEntities, "ner"));

        ReportInputs in;
        in.config = cfg.snapshot();
        in.seed = cfg.seed();
        in.provenance = pc.provenance;
        in.n_items = pc.corpus.size();
        in.n_degenerate = pc.n_degenerate;
        in.cluster_source = cl.feature_source;
        in.selection = cl.selection;
        for (std::size_t i = 0; i < pc.corpus.size(); ++i) in.assignment[pc.corpus[i].id] = cl.cluster_of[i];
        in.tasks = pred.results;
        in.skipped = pred.skipped;
        in.correct_source = detail::feature_source_of(cfg, "correct_source", cfg.raw("correct_source"));
        in.correct_model = *parse_model_kind(cfg.raw("correct_model"));
        in.flag_margin = cfg.number("flag_margin");
        in.chi2_threshold = cfg.number("chi2_threshold");
        in.generated_at = detail::utc_timestamp();

        const auto subsets = configured_subsets(cfg, pc, pred);
        if (cfg.flag("analysis")) {
            in.distributions = run_distribution_checks(cfg, pc, cl, subsets);
        } else {
            in.distribution_status = "skipped (disabled)";
        }
        if (pc.n_degenerate > 0)
            in.warnings.push_back(std::to_string(pc.n_degenerate) + " stems are empty after cleaning");
        for (const auto& t : pred.results)
            for (const auto& w : t.warnings)
                in.warnings.push_back("cluster " + std::to_string(t.cluster) + " / " + to_string(t.attribute) + " / " +
                                      to_string(t.model) + "/" + to_string(t.source) + ": " + w);
        for (const auto& s : pred.skipped)
            in.warnings.push_back("cluster " + std::to_string(s.cluster) + " / " + to_string(s.attribute) +
                                  ": skipped, " + s.reason);

        json report = build_report(in);
        // Topic and entity sections come from their own stage artifacts.
        report["topics"] = topics;
        report["entities"] = ents;
        for (const auto& s : topics.at("subsets"))
            if (!s.at("note").get<std::string>().empty())
                report["warnings"].push_back("topics for cluster " + std::to_string(s.at("cluster").get<std::size_t>()) +
                                             " / " + s.at("attribute").get<std::string>() + "=" +
                                             s.at("value").get<std::string>() + ": " + s.at("note").get<std::string>());
        validate_report(report);
        detail::write_json(cfg.out_dir() / artifact::kReport, report);
        detail::write_file((cfg.out_dir() / artifact::kReportMd).string(), render_markdown(report));
        const auto flagged = report["prediction"]["flagged_tasks"].get<std::size_t>();
        detail::log(cfg, "report: " + std::to_string(flagged) + " flagged tasks, written to " +
                             (cfg.out_dir() / artifact::kReport).string());
        return ReportOutcome{report, flagged};
    });
}

/// End-to-end run. Returns the process exit code (0 clean, 2 patterns flagged);
/// errors propagate as StageError.
inline int run_audit(const PipelineConfig& cfg) {
    detail::run_stage("config", [&] { validate_config(cfg); });
    stage_preprocess(cfg);
    stage_cluster(cfg);
    stage_predict(cfg);
    stage_topics(cfg);
    stage_ner(cfg);
    const auto r = stage_report(cfg);
    return r.flagged_tasks > 0 ? 2 : 0;
}

/// Strip the timestamp so two reports can be compared byte for byte.
inline std::string report_fingerprint(json report) {
    report.erase("generated_at");
    return report.dump();
}

} // namespace itemaudit

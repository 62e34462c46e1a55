#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "itemaudit/common.hpp"
#include "itemaudit/corpus.hpp"
#include "itemaudit/preprocess.hpp"
#include "itemaudit/vectorize.hpp"

namespace itemaudit {

// ---------------------------------------------------------------------------
// Prevalence baseline

/// Item counts per category of one cluster.
struct ClusterDemographics {
    std::vector<std::string> categories;
    std::vector<std::size_t> counts;
};

struct Baseline {
    std::vector<std::pair<std::string, double>> per_category;
    double average = 0.0;

    double max() const {
        double m = 0.0;
        for (const auto& [c, v] : per_category) m = std::max(m, v);
        return m;
    }
};

/// value_i = N_i / sum_j N_j; the average is taken over the listed categories.
inline Baseline baseline_accuracy(const ClusterDemographics& d) {
    if (d.categories.size() != d.counts.size()) throw AuditError("baseline: categories and counts differ in length");
    std::size_t total = 0;
    for (auto c : d.counts) total += c;
    if (total == 0) throw AuditError("baseline: empty cluster");
    Baseline b;
    for (std::size_t i = 0; i < d.counts.size(); ++i)
        b.per_category.emplace_back(d.categories[i], static_cast<double>(d.counts[i]) / static_cast<double>(total));
    // The shares sum to one, so their mean is exactly 1/m. Summing floats would drift.
    b.average = 1.0 / static_cast<double>(d.counts.size());
    return b;
}

// ---------------------------------------------------------------------------
// Train/test split

struct TrainTestSplit {
    std::vector<std::string> train;
    std::vector<std::string> test;
};

/// Non-stratified shuffle; |train| = round(ratio * n).
inline TrainTestSplit split_train_test(const std::vector<std::string>& ids, double ratio, std::uint64_t seed) {
    if (ids.size() < 5)
        throw AuditError("cluster too small to split (" + std::to_string(ids.size()) + " items, need >= 5)");
    if (!(ratio > 0.0 && ratio < 1.0)) throw AuditError("split ratio must be in (0, 1)");
    std::vector<std::string> shuffled = ids;
    Rng rng(seed);
    rng.shuffle(shuffled);
    const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(ids.size())));
    TrainTestSplit s;
    s.train.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_train), shuffled.end());
    return s;
}

// ---------------------------------------------------------------------------
// Multinomial logistic regression

struct LogRegParams {
    double l2 = 1e-3;
    std::size_t epochs = 200;
    double learning_rate = 0.1;
    std::size_t batch_size = 32;
};

struct LogRegModel {
    std::vector<int> classes; // external label of each row of `weights`
    Matrix weights;           // classes x features
    std::vector<double> bias;
    double l2 = 0.0;
    std::vector<double> loss_trace; // full objective after every epoch

    std::size_t n_features() const { return weights.cols(); }

    std::vector<double> scores(std::span<const double> x) const {
        std::vector<double> s(bias);
        for (std::size_t c = 0; c < classes.size(); ++c) {
            const auto w = weights.row(c);
            double acc = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * x[i];
            s[c] += acc;
        }
        return s;
    }
};

struct LogRegGradient {
    double loss = 0.0;
    Matrix d_weights;
    std::vector<double> d_bias;
};

namespace detail {

inline void softmax_inplace(std::vector<double>& s) {
    const double m = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (double& v : s) {
        v = std::exp(v - m);
        z += v;
    }
    for (double& v : s) v /= z;
}

inline std::vector<std::size_t> class_indices(const std::vector<int>& labels, const std::vector<int>& classes) {
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (int l : labels) {
        auto it = std::lower_bound(classes.begin(), classes.end(), l);
        if (it == classes.end() || *it != l) throw AuditError("label not among model classes");
        out.push_back(static_cast<std::size_t>(it - classes.begin()));
    }
    return out;
}

} // namespace detail

/// Mean cross-entropy over `rows` plus (l2 / 2) * ||W||^2, and its gradient.
/// The bias is not penalized.
inline LogRegGradient logreg_objective(const LogRegModel& model, const Matrix& x,
                                       const std::vector<std::size_t>& targets,
                                       const std::vector<std::size_t>& rows) {
    const std::size_t n_classes = model.classes.size();
    LogRegGradient g;
    g.d_weights = Matrix(n_classes, x.cols());
    g.d_bias.assign(n_classes, 0.0);
    const double inv = 1.0 / static_cast<double>(rows.size());
    for (auto r : rows) {
        const auto xr = x.row(r);
        auto p = model.scores(xr);
        detail::softmax_inplace(p);
        g.loss -= std::log(std::max(p[targets[r]], 1e-300)) * inv;
        for (std::size_t c = 0; c < n_classes; ++c) {
            const double e = (p[c] - (c == targets[r] ? 1.0 : 0.0)) * inv;
            if (e == 0.0) continue;
            g.d_bias[c] += e;
            auto gw = g.d_weights.row(c);
            for (std::size_t i = 0; i < xr.size(); ++i) gw[i] += e * xr[i];
        }
    }
    double wsq = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        const auto w = model.weights.row(c);
        auto gw = g.d_weights.row(c);
        for (std::size_t i = 0; i < w.size(); ++i) {
            wsq += w[i] * w[i];
            gw[i] += model.l2 * w[i];
        }
    }
    g.loss += 0.5 * model.l2 * wsq;
    return g;
}

inline LogRegGradient logreg_objective(const LogRegModel& model, const Matrix& x, const std::vector<int>& labels) {
    std::vector<std::size_t> rows(x.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return logreg_objective(model, x, detail::class_indices(labels, model.classes), rows);
}

/// Softmax regression trained by mini-batch gradient descent from zero weights.
inline LogRegModel train_logreg(const Matrix& x, const std::vector<int>& labels, const LogRegParams& params,
                                std::uint64_t seed) {
    if (x.rows() != labels.size()) throw AuditError("train_logreg: feature rows and labels differ in count");
    if (params.batch_size == 0) throw AuditError("train_logreg: batch_size must be > 0");
    LogRegModel m;
    m.classes = labels;
    std::sort(m.classes.begin(), m.classes.end());
    m.classes.erase(std::unique(m.classes.begin(), m.classes.end()), m.classes.end());
    if (m.classes.size() < 2) throw AuditError("train_logreg: training data has a single class");
    m.weights = Matrix(m.classes.size(), x.cols());
    m.bias.assign(m.classes.size(), 0.0);
    m.l2 = params.l2;

    const auto targets = detail::class_indices(labels, m.classes);
    std::vector<std::size_t> order(x.rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<std::size_t> all = order;
    Rng rng(seed);
    // An epoch that raises the full objective is rolled back and the step halved,
    // so the recorded trace never goes up.
    double step = params.learning_rate;
    double previous = logreg_objective(m, x, targets, all).loss;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        const Matrix saved_weights = m.weights;
        const std::vector<double> saved_bias = m.bias;
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += params.batch_size) {
            const std::size_t end = std::min(order.size(), start + params.batch_size);
            std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(end));
            const auto g = logreg_objective(m, x, targets, batch);
            for (std::size_t c = 0; c < m.classes.size(); ++c) {
                m.bias[c] -= step * g.d_bias[c];
                auto w = m.weights.row(c);
                const auto gw = g.d_weights.row(c);
                for (std::size_t i = 0; i < w.size(); ++i) w[i] -= step * gw[i];
            }
        }
        const double loss = logreg_objective(m, x, targets, all).loss;
        if (loss > previous) {
            m.weights = saved_weights;
            m.bias = saved_bias;
            step *= 0.5;
        } else {
            previous = loss;
        }
        m.loss_trace.push_back(previous);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Multinomial naive Bayes

struct MNBModel {
    std::vector<int> classes;
    std::vector<double> log_prior;
    Matrix log_likelihood; // classes x terms
    double alpha = 1.0;
    std::vector<std::string> warnings;

    std::size_t n_features() const { return log_likelihood.cols(); }

    std::vector<double> scores(std::span<const double> x) const {
        std::vector<double> s(log_prior);
        for (std::size_t c = 0; c < classes.size(); ++c) {
            const auto ll = log_likelihood.row(c);
            for (std::size_t i = 0; i < x.size(); ++i)
                if (x[i] != 0.0) s[c] += x[i] * ll[i];
        }
        return s;
    }
};

/// Closed form: P(t|c) = (count(t,c) + alpha) / (count(c) + alpha * |V|).
/// Classes listed in `declared_classes` without training documents are
/// dropped with a warning.
inline MNBModel train_mnb(const Matrix& counts, const std::vector<int>& labels, double alpha = 1.0,
                          const std::vector<int>& declared_classes = {}) {
    if (counts.rows() != labels.size()) throw AuditError("train_mnb: count rows and labels differ in count");
    if (!(alpha >= 0.0)) throw AuditError("train_mnb: alpha must be >= 0");
    for (double v : counts.flat())
        if (v < 0.0) throw AuditError("train_mnb: negative count");

    MNBModel m;
    m.alpha = alpha;
    std::set<int> present(labels.begin(), labels.end());
    for (int c : declared_classes)
        if (!present.contains(c))
            m.warnings.push_back("class " + std::to_string(c) + " has no training documents; excluded");
    m.classes.assign(present.begin(), present.end());
    if (m.classes.empty()) throw AuditError("train_mnb: no training documents");

    const auto targets = detail::class_indices(labels, m.classes);
    const std::size_t n_terms = counts.cols();
    Matrix term_counts(m.classes.size(), n_terms);
    std::vector<double> docs(m.classes.size(), 0.0);
    for (std::size_t r = 0; r < counts.rows(); ++r) {
        docs[targets[r]] += 1.0;
        auto tc = term_counts.row(targets[r]);
        const auto x = counts.row(r);
        for (std::size_t i = 0; i < n_terms; ++i) tc[i] += x[i];
    }
    m.log_likelihood = Matrix(m.classes.size(), n_terms);
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        m.log_prior.push_back(std::log(docs[c] / static_cast<double>(counts.rows())));
        const auto tc = term_counts.row(c);
        double total = 0.0;
        for (double v : tc) total += v;
        const double denom = total + alpha * static_cast<double>(n_terms);
        auto ll = m.log_likelihood.row(c);
        for (std::size_t i = 0; i < n_terms; ++i) ll[i] = std::log((tc[i] + alpha) / denom);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Prediction

struct Prediction {
    std::vector<int> labels;
    Matrix scores; // rows x classes, model-specific scale
};

/// Argmax of class scores; ties go to the lowest class index.
template <class Model>
Prediction predict(const Model& model, const Matrix& x) {
    if (x.cols() != model.n_features())
        throw AuditError("predict: feature dimension " + std::to_string(x.cols()) + " does not match model (" +
                         std::to_string(model.n_features()) + ")");
    Prediction p;
    p.scores = Matrix(x.rows(), model.classes.size());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto s = model.scores(x.row(r));
        std::size_t arg = 0;
        for (std::size_t c = 1; c < s.size(); ++c)
            if (s[c] > s[arg]) arg = c;
        std::copy(s.begin(), s.end(), p.scores.row(r).begin());
        p.labels.push_back(model.classes[arg]);
    }
    return p;
}

/// Class posterior (softmax of the scores) for one input.
template <class Model>
std::vector<double> predict_proba(const Model& model, std::span<const double> x) {
    auto s = model.scores(x);
    detail::softmax_inplace(s);
    return s;
}

// ---------------------------------------------------------------------------
// Per-cluster prediction tasks

enum class Attribute { Gender, AgeGroup };
enum class ModelKind { LogReg, MNB };

inline std::string to_string(Attribute a) { return a == Attribute::Gender ? "gender" : "age_group"; }
inline std::string to_string(ModelKind m) { return m == ModelKind::LogReg ? "logreg" : "mnb"; }

inline std::optional<Attribute> parse_attribute(std::string_view s) {
    if (s == "gender") return Attribute::Gender;
    if (s == "age_group") return Attribute::AgeGroup;
    return std::nullopt;
}
inline std::optional<ModelKind> parse_model_kind(std::string_view s) {
    if (s == "logreg") return ModelKind::LogReg;
    if (s == "mnb") return ModelKind::MNB;
    return std::nullopt;
}

inline int attribute_code(const Item& item, Attribute a) {
    return a == Attribute::Gender ? static_cast<int>(item.gender) : static_cast<int>(item.age_group);
}

inline std::string attribute_value_name(Attribute a, int code) {
    return a == Attribute::Gender ? to_string(static_cast<Gender>(code)) : to_string(static_cast<AgeGroup>(code));
}

struct PredictionTaskResult {
    std::size_t cluster = 0;
    Attribute attribute = Attribute::Gender;
    FeatureSource source = FeatureSource::Tfidf;
    ModelKind model = ModelKind::LogReg;
    double accuracy = 0.0;
    Baseline baseline;
    std::vector<std::string> correct_item_ids;
    std::vector<std::string> test_item_ids;
    std::size_t n_train = 0;
    std::uint64_t split_seed = 0;
    std::vector<double> repeat_accuracies; // accuracy of each split, first equals `accuracy`
    std::vector<std::string> warnings;
};

struct SkippedTask {
    std::size_t cluster = 0;
    Attribute attribute = Attribute::Gender;
    std::string reason;
};

struct PredictionConfig {
    std::vector<FeatureSource> sources = {FeatureSource::Tfidf};
    std::vector<ModelKind> models = {ModelKind::LogReg, ModelKind::MNB};
    LogRegParams logreg;
    double mnb_alpha = 1.0;
    std::size_t min_df = 2;
    double train_ratio = 0.8;
    std::size_t split_repeats = 1;
    std::uint64_t seed = 1;
};

struct PredictionOutcome {
    std::vector<PredictionTaskResult> results;
    std::vector<SkippedTask> skipped;
};

namespace detail {

struct TaskFeatures {
    Matrix train;
    Matrix test;
};

inline TaskFeatures tfidf_features(const std::vector<std::size_t>& train_rows, const std::vector<std::size_t>& test_rows,
                                   const std::vector<CleanStem>& stems, std::size_t min_df, bool counts) {
    TokenDocs train_docs;
    for (auto r : train_rows) train_docs.push_back(stems[r].tokens);
    Vocabulary vocab;
    try {
        vocab = build_vocabulary(train_docs, min_df);
    } catch (const AuditError&) {
        vocab = build_vocabulary(train_docs, 1);
    }
    auto encode = [&](const std::vector<std::size_t>& rows) {
        Matrix m(rows.size(), vocab.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto v = counts ? count_vector(stems[rows[i]].tokens, vocab)
                                  : tfidf_vector(stems[rows[i]].tokens, vocab).values;
            std::copy(v.begin(), v.end(), m.row(i).begin());
        }
        return m;
    };
    return {encode(train_rows), encode(test_rows)};
}

inline Matrix gather_rows(const Matrix& x, const std::vector<std::size_t>& rows) {
    Matrix m(rows.size(), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) std::copy(x.row(rows[i]).begin(), x.row(rows[i]).end(), m.row(i).begin());
    return m;
}

} // namespace detail

/// Train and evaluate every (cluster x attribute x source x model) task.
/// `stems` and `cluster_of` are aligned with the corpus; `external` (when
/// non-null) holds one embedding row per corpus item. MNB runs on token
/// counts of the TF-IDF vocabulary, so it is paired with the tfidf source only.
inline PredictionOutcome run_prediction_tasks(const Corpus& corpus, const std::vector<CleanStem>& stems,
                                              const std::vector<std::size_t>& cluster_of, std::size_t k,
                                              const Matrix* external, const PredictionConfig& cfg) {
    if (stems.size() != corpus.size() || cluster_of.size() != corpus.size())
        throw AuditError("run_prediction_tasks: inputs are not aligned with the corpus");
    for (auto src : cfg.sources)
        if (src == FeatureSource::External && (external == nullptr || external->rows() != corpus.size()))
            throw AuditError("run_prediction_tasks: external features requested but not available");
    if (cfg.split_repeats < 1) throw AuditError("split_repeats must be >= 1");

    std::unordered_map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < corpus.size(); ++i) row_of[corpus[i].id] = i;

    PredictionOutcome out;
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<std::string> member_ids;
        for (std::size_t i = 0; i < corpus.size(); ++i)
            if (cluster_of[i] == c) member_ids.push_back(corpus[i].id);

        for (Attribute attr : {Attribute::Gender, Attribute::AgeGroup}) {
            if (member_ids.size() < 5) {
                out.skipped.push_back({c, attr, "cluster too small (" + std::to_string(member_ids.size()) + " items)"});
                continue;
            }
            // Cluster-level prevalence baseline.
            ClusterDemographics demo;
            std::map<int, std::size_t> counts;
            for (const auto& id : member_ids) ++counts[attribute_code(corpus[row_of[id]], attr)];
            if (attr == Attribute::Gender) {
                for (auto g : kAllGenders) {
                    demo.categories.push_back(to_string(g));
                    demo.counts.push_back(counts[static_cast<int>(g)]);
                }
            } else {
                for (auto& [code, n] : counts) {
                    demo.categories.push_back(attribute_value_name(attr, code));
                    demo.counts.push_back(n);
                }
            }
            const Baseline baseline = baseline_accuracy(demo);

            struct Cell {
                FeatureSource source;
                ModelKind model;
                std::vector<double> accuracies;
                PredictionTaskResult first;
            };
            std::vector<Cell> cells;
            for (auto src : cfg.sources)
                for (auto mk : cfg.models)
                    if (!(mk == ModelKind::MNB && src == FeatureSource::External)) cells.push_back({src, mk, {}, {}});

            std::optional<std::string> skip_reason;
            for (std::size_t rep = 0; rep < cfg.split_repeats && !skip_reason; ++rep) {
                const std::uint64_t split_seed = derive_seed(cfg.seed, {0x5917, c, rep});
                const auto split = split_train_test(member_ids, cfg.train_ratio, split_seed);
                std::vector<std::size_t> train_rows, test_rows;
                std::vector<int> y_train, y_test;
                for (const auto& id : split.train) {
                    train_rows.push_back(row_of[id]);
                    y_train.push_back(attribute_code(corpus[row_of[id]], attr));
                }
                for (const auto& id : split.test) {
                    test_rows.push_back(row_of[id]);
                    y_test.push_back(attribute_code(corpus[row_of[id]], attr));
                }
                const std::set<int> train_classes(y_train.begin(), y_train.end());
                if (train_classes.size() < 2) {
                    skip_reason = "single-class training data";
                    break;
                }
                std::vector<std::string> split_warnings;
                for (auto& [code, n] : counts) {
                    if (std::find(y_test.begin(), y_test.end(), code) == y_test.end())
                        split_warnings.push_back("test set has no '" + attribute_value_name(attr, code) + "' items");
                    if (!train_classes.contains(code))
                        split_warnings.push_back("class '" + attribute_value_name(attr, code) +
                                                 "' absent from training data");
                }

                std::optional<detail::TaskFeatures> tfidf, counts_feat, ext;
                for (auto& cell : cells) {
                    const detail::TaskFeatures* feats = nullptr;
                    if (cell.source == FeatureSource::External) {
                        if (!ext) ext = detail::TaskFeatures{detail::gather_rows(*external, train_rows),
                                                             detail::gather_rows(*external, test_rows)};
                        feats = &*ext;
                    } else if (cell.model == ModelKind::MNB) {
                        if (!counts_feat) counts_feat = detail::tfidf_features(train_rows, test_rows, stems, cfg.min_df, true);
                        feats = &*counts_feat;
                    } else {
                        if (!tfidf) tfidf = detail::tfidf_features(train_rows, test_rows, stems, cfg.min_df, false);
                        feats = &*tfidf;
                    }
                    Prediction pred;
                    if (cell.model == ModelKind::LogReg) {
                        const auto model = train_logreg(feats->train, y_train, cfg.logreg,
                                                        derive_seed(split_seed, {0x106, static_cast<std::uint64_t>(attr)}));
                        pred = predict(model, feats->test);
                    } else {
                        pred = predict(train_mnb(feats->train, y_train, cfg.mnb_alpha), feats->test);
                    }
                    std::vector<std::string> correct;
                    for (std::size_t i = 0; i < y_test.size(); ++i)
                        if (pred.labels[i] == y_test[i]) correct.push_back(split.test[i]);
                    const double acc = static_cast<double>(correct.size()) / static_cast<double>(y_test.size());
                    cell.accuracies.push_back(acc);
                    if (rep == 0) {
                        auto& r = cell.first;
                        r.cluster = c;
                        r.attribute = attr;
                        r.source = cell.source;
                        r.model = cell.model;
                        r.accuracy = acc;
                        r.baseline = baseline;
                        r.correct_item_ids = std::move(correct);
                        r.test_item_ids = split.test;
                        r.n_train = split.train.size();
                        r.split_seed = split_seed;
                        r.warnings = split_warnings;
                    }
                }
            }
            if (skip_reason) {
                out.skipped.push_back({c, attr, *skip_reason});
                continue;
            }
            for (auto& cell : cells) {
                cell.first.repeat_accuracies = cell.accuracies;
                out.results.push_back(std::move(cell.first));
            }
        }
    }
    return out;
}

} // namespace itemaudit

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "itemaudit/common.hpp"
#include "itemaudit/vectorize.hpp"

namespace itemaudit {

struct LdaParams {
    std::size_t n_topics = 2;
    double alpha = -1.0; // <= 0 selects 50 / n_topics
    double beta = 0.01;
    std::size_t iterations = 1000;

    double effective_alpha() const { return alpha > 0.0 ? alpha : 50.0 / static_cast<double>(n_topics); }
};

struct TopicModel {
    std::size_t n_topics = 0;
    std::vector<std::string> terms; // column labels of phi
    Matrix phi;                     // topics x terms
    Matrix theta;                   // docs x topics
    double alpha = 0.0;
    double beta = 0.0;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
};

/// Sampler count tables, exposed to the per-sweep observer.
struct GibbsCounts {
    std::vector<std::vector<std::size_t>> doc_topic;  // D x T
    std::vector<std::vector<std::size_t>> topic_term; // T x V
    std::vector<std::size_t> topic_total;             // T
    std::size_t n_tokens = 0;
};

using SweepObserver = std::function<void(std::size_t sweep, const GibbsCounts&)>;

/// Collapsed Gibbs sampling for LDA. phi and theta are the Dirichlet-smoothed
/// estimates from the final sweep's counts.
inline TopicModel lda_fit(const TokenDocs& docs, const LdaParams& params, std::uint64_t seed,
                          const SweepObserver& observer = {}) {
    const std::size_t T = params.n_topics;
    if (docs.empty()) throw AuditError("lda: empty document subset");
    if (T < 1) throw AuditError("lda: n_topics must be >= 1");
    if (docs.size() < T)
        throw AuditError("lda: " + std::to_string(docs.size()) + " documents for " + std::to_string(T) + " topics");
    if (!(params.beta > 0.0)) throw AuditError("lda: beta must be > 0");

    std::size_t n_tokens = 0;
    for (const auto& d : docs) n_tokens += d.size();
    if (n_tokens == 0) throw AuditError("lda: vocabulary collapse (no tokens in subset)");
    const Vocabulary vocab = build_vocabulary(docs, 1);
    const std::size_t V = vocab.size();
    const double alpha = params.effective_alpha();
    const double beta = params.beta;
    const double v_beta = static_cast<double>(V) * beta;

    std::vector<std::vector<std::size_t>> words(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d)
        for (const auto& t : docs[d]) words[d].push_back(*vocab.find(t));

    Rng rng(seed);
    GibbsCounts counts;
    counts.doc_topic.assign(docs.size(), std::vector<std::size_t>(T, 0));
    counts.topic_term.assign(T, std::vector<std::size_t>(V, 0));
    counts.topic_total.assign(T, 0);
    counts.n_tokens = n_tokens;
    std::vector<std::vector<std::size_t>> z(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (auto w : words[d]) {
            const std::size_t k = rng.index(T);
            z[d].push_back(k);
            ++counts.doc_topic[d][k];
            ++counts.topic_term[k][w];
            ++counts.topic_total[k];
        }
    }

    std::vector<double> p(T);
    for (std::size_t sweep = 0; sweep < params.iterations; ++sweep) {
        for (std::size_t d = 0; d < docs.size(); ++d) {
            for (std::size_t i = 0; i < words[d].size(); ++i) {
                const std::size_t w = words[d][i];
                std::size_t k = z[d][i];
                --counts.doc_topic[d][k];
                --counts.topic_term[k][w];
                --counts.topic_total[k];
                for (std::size_t t = 0; t < T; ++t)
                    p[t] = (static_cast<double>(counts.doc_topic[d][t]) + alpha) *
                           (static_cast<double>(counts.topic_term[t][w]) + beta) /
                           (static_cast<double>(counts.topic_total[t]) + v_beta);
                k = rng.categorical(p);
                z[d][i] = k;
                ++counts.doc_topic[d][k];
                ++counts.topic_term[k][w];
                ++counts.topic_total[k];
            }
        }
        if (observer) observer(sweep, counts);
    }

    TopicModel m;
    m.n_topics = T;
    m.terms = vocab.terms;
    m.alpha = alpha;
    m.beta = beta;
    m.iterations = params.iterations;
    m.seed = seed;
    m.phi = Matrix(T, V);
    for (std::size_t t = 0; t < T; ++t) {
        const double denom = static_cast<double>(counts.topic_total[t]) + v_beta;
        for (std::size_t w = 0; w < V; ++w) m.phi(t, w) = (static_cast<double>(counts.topic_term[t][w]) + beta) / denom;
    }
    m.theta = Matrix(docs.size(), T);
    for (std::size_t d = 0; d < docs.size(); ++d) {
        const double denom = static_cast<double>(words[d].size()) + static_cast<double>(T) * alpha;
        for (std::size_t t = 0; t < T; ++t)
            m.theta(d, t) = (static_cast<double>(counts.doc_topic[d][t]) + alpha) / denom;
    }
    return m;
}

/// Terms of one topic by descending probability; ties in lexicographic order.
inline std::vector<std::pair<std::string, double>> top_terms(const TopicModel& model, std::size_t topic,
                                                             std::size_t n = 10) {
    if (topic >= model.n_topics)
        throw AuditError("top_terms: topic " + std::to_string(topic) + " out of range (T=" +
                         std::to_string(model.n_topics) + ")");
    std::vector<std::size_t> order(model.terms.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (model.phi(topic, a) != model.phi(topic, b)) return model.phi(topic, a) > model.phi(topic, b);
        return model.terms[a] < model.terms[b];
    });
    order.resize(std::min(n, order.size()));
    std::vector<std::pair<std::string, double>> out;
    for (auto i : order) out.emplace_back(model.terms[i], model.phi(topic, i));
    return out;
}

} // namespace itemaudit

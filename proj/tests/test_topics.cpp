#include <gtest/gtest.h>

#include "itemaudit/topics.hpp"
#include "lda_fixture.hpp"

using namespace itemaudit;

TEST(Lda, PlantedGroupsSeparate) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto p = testsupport::planted_topics(seed);
        LdaParams params;
        const auto m = lda_fit(p.docs, params, seed);
        const auto purity = testsupport::top_term_purity(m, p);
        for (double v : purity) EXPECT_GE(v, 0.9) << "seed " << seed;
        // The two topics must not lock onto the same group.
        const auto t0 = top_terms(m, 0, 1)[0].first, t1 = top_terms(m, 1, 1)[0].first;
        EXPECT_NE(p.group_a.contains(t0), p.group_a.contains(t1)) << "seed " << seed;
    }
}

TEST(Lda, DistributionsSumToOneAndTokensAreConserved) {
    const auto p = testsupport::planted_topics(9, 10, 15);
    LdaParams params;
    params.n_topics = 3;
    params.iterations = 50;
    std::size_t sweeps = 0;
    const auto m = lda_fit(p.docs, params, 4, [&](std::size_t, const GibbsCounts& c) {
        ++sweeps;
        std::size_t dt = 0, tt = 0, tot = 0;
        for (const auto& row : c.doc_topic)
            for (auto v : row) dt += v;
        for (const auto& row : c.topic_term)
            for (auto v : row) tt += v;
        for (auto v : c.topic_total) tot += v;
        EXPECT_EQ(dt, c.n_tokens);
        EXPECT_EQ(tt, c.n_tokens);
        EXPECT_EQ(tot, c.n_tokens);
        for (std::size_t d = 0; d < c.doc_topic.size(); ++d) {
            std::size_t len = 0;
            for (auto v : c.doc_topic[d]) len += v;
            EXPECT_EQ(len, p.docs[d].size());
        }
    });
    EXPECT_EQ(sweeps, 50u);
    for (std::size_t t = 0; t < m.n_topics; ++t) {
        double s = 0.0;
        for (std::size_t w = 0; w < m.terms.size(); ++w) s += m.phi(t, w);
        EXPECT_NEAR(s, 1.0, 1e-9);
    }
    for (std::size_t d = 0; d < p.docs.size(); ++d) {
        double s = 0.0;
        for (std::size_t t = 0; t < m.n_topics; ++t) s += m.theta(d, t);
        EXPECT_NEAR(s, 1.0, 1e-9);
    }
    EXPECT_DOUBLE_EQ(m.alpha, 50.0 / 3.0);
}

TEST(Lda, DeterministicGivenSeed) {
    const auto p = testsupport::planted_topics(2, 10, 10);
    LdaParams params;
    params.iterations = 30;
    const auto a = lda_fit(p.docs, params, 77), b = lda_fit(p.docs, params, 77);
    EXPECT_EQ(a.phi, b.phi);
    EXPECT_EQ(a.theta, b.theta);
}

TEST(Lda, SingleTopicPhiIsSmoothedFrequency) {
    const TokenDocs docs = {{"a", "a", "b"}, {"b", "c"}};
    LdaParams params;
    params.n_topics = 1;
    params.iterations = 5;
    const auto m = lda_fit(docs, params, 1);
    // phi = (n_w + beta) / (N + V beta)
    const double denom = 5.0 + 3.0 * 0.01;
    EXPECT_NEAR(m.phi(0, 0), (2.0 + 0.01) / denom, 1e-12);
    EXPECT_NEAR(m.phi(0, 1), (2.0 + 0.01) / denom, 1e-12);
    EXPECT_NEAR(m.phi(0, 2), (1.0 + 0.01) / denom, 1e-12);
    for (std::size_t d = 0; d < 2; ++d) EXPECT_NEAR(m.theta(d, 0), 1.0, 1e-12);
}

TEST(Lda, Errors) {
    LdaParams params;
    EXPECT_THROW(lda_fit({}, params, 1), AuditError);
    EXPECT_THROW(lda_fit({{"a"}}, params, 1), AuditError); // fewer docs than topics
    EXPECT_THROW(lda_fit({{}, {}}, params, 1), AuditError);  // no tokens
    params.beta = 0.0;
    EXPECT_THROW(lda_fit({{"a"}, {"b"}}, params, 1), AuditError);
}

TEST(TopTerms, OrderingAndClamping) {
    TopicModel m;
    m.n_topics = 1;
    m.terms = {"b", "a", "c"};
    m.phi = Matrix::from_rows({{0.25, 0.25, 0.5}});
    const auto top = top_terms(m, 0, 10);
    ASSERT_EQ(top.size(), 3u);
    EXPECT_EQ(top[0].first, "c");
    EXPECT_EQ(top[1].first, "a");
    EXPECT_EQ(top[2].first, "b");
    EXPECT_EQ(top_terms(m, 0, 2).size(), 2u);
    EXPECT_THROW(top_terms(m, 1), AuditError);
}

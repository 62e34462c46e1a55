#include <gtest/gtest.h>

#include <cmath>

#include "itemaudit/vectorize.hpp"

using namespace itemaudit;

namespace {
TokenDocs two_docs() { return {{"a", "b"}, {"b", "c"}}; }
} // namespace

TEST(Vocabulary, CountsAndThreshold) {
    const auto v = build_vocabulary(two_docs(), 1);
    EXPECT_EQ(v.terms, (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(v.document_frequency[*v.find("b")], 2u);
    EXPECT_EQ(v.n_docs, 2u);
    const auto v2 = build_vocabulary(two_docs(), 2);
    EXPECT_EQ(v2.terms, (std::vector<std::string>{"b"}));
    EXPECT_THROW(build_vocabulary({}, 1), AuditError);
    EXPECT_THROW(build_vocabulary(two_docs(), 3), AuditError);
}

TEST(Tfidf, TwoDocumentHandComputation) {
    const auto v = build_vocabulary(two_docs(), 1);
    // Independent computation of the smoothed weights.
    const double idf_a = std::log(3.0 / 2.0) + 1.0, idf_b = std::log(3.0 / 3.0) + 1.0;
    const double norm = std::sqrt(idf_a * idf_a + idf_b * idf_b);
    const auto d = tfidf_vector({"a", "b"}, v, "d1");
    ASSERT_EQ(d.values.size(), 3u);
    EXPECT_NEAR(d.values[0], idf_a / norm, 1e-12);
    EXPECT_NEAR(d.values[1], idf_b / norm, 1e-12);
    EXPECT_EQ(d.values[2], 0.0);
    EXPECT_NEAR(d.values[0], 0.815, 5e-4);
    EXPECT_NEAR(d.values[1], 0.580, 5e-4);
    EXPECT_FALSE(d.zero);
}

TEST(Tfidf, TermFrequencyIsLinearBeforeNormalization) {
    TokenDocs docs = {{"x", "y"}, {"y", "z"}, {"x", "z"}};
    const auto v = build_vocabulary(docs, 1);
    const auto once = tfidf_vector({"x", "y"}, v);
    const auto thrice = tfidf_vector({"x", "x", "x", "y"}, v);
    const auto ix = *v.find("x"), iy = *v.find("y");
    EXPECT_NEAR(thrice.values[ix] / thrice.values[iy], 3.0 * once.values[ix] / once.values[iy], 1e-12);
}

TEST(Tfidf, OutOfVocabularyOnlyIsZero) {
    const auto v = build_vocabulary(two_docs(), 1);
    const auto d = tfidf_vector({"q", "r"}, v);
    EXPECT_TRUE(d.zero);
    for (double x : d.values) EXPECT_EQ(x, 0.0);
}

TEST(TfidfProperty, UnitNormOrZeroAndIdfMonotone) {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        TokenDocs docs(2 + rng.index(20));
        for (auto& d : docs) {
            const std::size_t len = rng.index(8);
            for (std::size_t i = 0; i < len; ++i) d.push_back(std::string(1, static_cast<char>('a' + rng.index(12))));
        }
        docs[0].push_back("a");
        const auto v = build_vocabulary(docs, 1);
        for (std::size_t i = 0; i < v.size(); ++i) {
            EXPECT_GE(v.document_frequency[i], 1u);
            EXPECT_EQ(v.index.at(v.terms[i]), i);
            for (std::size_t j = 0; j < v.size(); ++j)
                if (v.document_frequency[i] <= v.document_frequency[j]) EXPECT_GE(v.idf(i), v.idf(j));
        }
        for (const auto& d : docs) {
            const auto x = tfidf_vector(d, v);
            double n = 0.0;
            for (double e : x.values) {
                EXPECT_GE(e, 0.0);
                EXPECT_TRUE(std::isfinite(e));
                n += e * e;
            }
            if (x.zero) EXPECT_EQ(n, 0.0);
            else EXPECT_NEAR(std::sqrt(n), 1.0, 1e-9);
        }
    }
}

TEST(Embeddings, HappyPathAlignsToExpectedOrder) {
    const std::string text = "{\"id\":\"a2\",\"vector\":[1,2,3,4]}\n{\"id\":\"a1\",\"vector\":[0.5,0,0,1]}\n";
    const auto vs = parse_embeddings(text, {"a1", "a2"});
    ASSERT_EQ(vs.size(), 2u);
    EXPECT_EQ(vs[0].item_id, "a1");
    EXPECT_EQ(vs[0].values.size(), 4u);
    EXPECT_EQ(vs[1].values[3], 4.0);
    EXPECT_EQ(vs[1].source, FeatureSource::External);
}

TEST(Embeddings, Errors) {
    auto msg = [](const std::string& text, std::vector<std::string> ids) {
        try {
            parse_embeddings(text, ids);
        } catch (const AuditError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(msg("{\"id\":\"a1\",\"vector\":[1,2]}\n", {"a1", "a2"}).find("'a2'"), std::string::npos);
    EXPECT_NE(msg("{\"id\":\"a1\",\"vector\":[1,2]}\n{\"id\":\"a2\",\"vector\":[1]}\n", {"a1", "a2"}).find("ragged"),
              std::string::npos);
    EXPECT_FALSE(msg("{\"id\":\"a1\",\"vector\":[1e999]}\n", {"a1"}).empty());
    EXPECT_NE(msg("{\"id\":\"a1\",\"vector\":[\"x\"]}\n", {"a1"}).find("non-numeric"), std::string::npos);
    EXPECT_NE(msg("{\"id\":\"a1\",\"vector\":[1]}\n{\"id\":\"a1\",\"vector\":[2]}\n", {"a1"}).find("duplicate"),
              std::string::npos);
    EXPECT_NE(msg("not json\n", {"a1"}).find("line 1"), std::string::npos);
}

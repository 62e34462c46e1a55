#include <gtest/gtest.h>

#include "itemaudit/analysis.hpp"
#include "oracles.hpp"

using namespace itemaudit;

TEST(ChiSquare, UniformCountsGiveZeroStatistic) {
    const auto d = category_distribution({"a", "b", "c", "a", "b", "c"}, {"a", "b", "c"}, MetadataField::Competency);
    EXPECT_EQ(d.statistic, 0.0);
    EXPECT_EQ(d.p_value, 1.0);
    EXPECT_EQ(d.verdict, Verdict::Uniform);
    EXPECT_EQ(d.df, 2u);
}

TEST(ChiSquare, SkewedCounts) {
    std::vector<std::string> v(30, "a");
    const auto d = category_distribution(v, {"a", "b", "c"}, MetadataField::TopicCategory);
    EXPECT_DOUBLE_EQ(d.statistic, 60.0);
    EXPECT_LT(d.p_value, 0.001);
    EXPECT_EQ(d.verdict, Verdict::Skewed);
    EXPECT_FALSE(d.low_expected_count);
}

TEST(ChiSquare, SurvivalMatchesIntegrationOracle) {
    for (int df = 1; df <= 10; ++df)
        for (double x : {0.05, 0.5, 1.0, 2.5, 4.0, 7.5, 12.0, 20.0, 35.0})
            EXPECT_NEAR(chi_square_survival(x, df), oracle::chi_square_sf(x, df), 1e-6) << "df=" << df << " x=" << x;
}

TEST(ChiSquare, LowCountsAndSingleCategory) {
    const auto low = category_distribution({"a", "b", "b"}, {"a", "b"}, MetadataField::Competency);
    EXPECT_TRUE(low.low_expected_count);
    EXPECT_FALSE(low.note.empty());
    const auto one = category_distribution({"a", "a"}, {"a"}, MetadataField::Competency);
    EXPECT_EQ(one.verdict, Verdict::Undefined);
    EXPECT_THROW(category_distribution({}, {"a"}, MetadataField::Competency), AuditError);
    EXPECT_THROW(category_distribution({"z"}, {"a", "b"}, MetadataField::Competency), AuditError);
}

TEST(ChiSquare, ReferenceIsParentCategories) {
    Item a{.id = "1", .stem = "s", .competency = "x", .topic_category = "t1"};
    Item b{.id = "2", .stem = "s", .competency = "y", .topic_category = "t1"};
    Item c{.id = "3", .stem = "s", .competency = "z", .topic_category = "t2"};
    const auto d = metadata_distribution({&a, &a}, {&a, &b, &c}, MetadataField::Competency, 0.05, "lbl");
    ASSERT_EQ(d.observed.size(), 3u);
    EXPECT_EQ(d.observed[1], (std::pair<std::string, std::size_t>{"y", 0}));
    EXPECT_EQ(d.label, "lbl");
    const auto t = metadata_distribution({&a, &c}, {&a, &b, &c}, MetadataField::TopicCategory);
    EXPECT_EQ(t.df, 1u);
    EXPECT_EQ(t.statistic, 0.0);
}

TEST(ChiSquareProperty, PValueInUnitIntervalAndThresholdRespected) {
    Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::string> cats = {"a", "b", "c", "d"};
        std::vector<std::string> v;
        for (std::size_t i = 0; i < 1 + rng.index(60); ++i) v.push_back(cats[rng.index(4)]);
        const double thr = rng.uniform();
        const auto d = category_distribution(v, cats, MetadataField::Competency, thr);
        EXPECT_GE(d.p_value, 0.0);
        EXPECT_LE(d.p_value, 1.0);
        EXPECT_EQ(d.verdict, d.p_value > thr ? Verdict::Uniform : Verdict::Skewed);
    }
}

#include <gtest/gtest.h>

#include "itemaudit/ner.hpp"
#include "itemaudit/serialize.hpp"
#include "test_support.hpp"

using namespace itemaudit;

namespace {
std::vector<std::string> toks(const std::string& s) { return detail::split_whitespace(s); }
} // namespace

TEST(Gazetteer, LeftmostLongestMatch) {
    Gazetteer g;
    g.add("aortic valve", "MULTI_TISSUE_STRUCTURE");
    g.add("valve", "MULTI_TISSUE_STRUCTURE");
    g.add("blood", "ORGANISM_SUBSTANCE");
    g.add("blood culture", "ORGANISM_SUBSTANCE");
    const auto m = tag_entities(toks("bicuspid aortic valve blood culture grow blood"), g);
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(m[0], (Mention{"aortic valve", "MULTI_TISSUE_STRUCTURE", 1, 3}));
    EXPECT_EQ(m[1].surface, "blood culture");
    EXPECT_EQ(m[2].surface, "blood");
    EXPECT_EQ(m[2].begin, 6u);
}

TEST(Gazetteer, SurfacesAreNormalizedLikeStems) {
    const auto g = load_gazetteer(testsupport::data_path("gazetteer.csv"), testsupport::default_lists().lemmas);
    EXPECT_NE(g.type_of("viridan streptococci"), nullptr);
    EXPECT_EQ(g.type_of("viridans streptococci"), nullptr);
    const auto stem = clean_stem(testsupport::kSampleStem, testsupport::default_lists());
    const auto t = entity_frequencies({stem.tokens}, g);
    EXPECT_EQ(t.count_of("penicillin"), 3u);
    EXPECT_EQ(t.count_of("aortic valve"), 1u);
    EXPECT_EQ(t.count_of("valve"), 0u);
    EXPECT_EQ(t.count_of("viridan streptococci"), 1u);
    EXPECT_EQ(t.count_of("lisinopril"), 1u);
}

TEST(Gazetteer, ParseErrorsAndConflicts) {
    EXPECT_THROW(parse_gazetteer("surface,type\nwine\n"), AuditError);
    try {
        parse_gazetteer("wine,SIMPLE_CHEMICAL\nwines,ORGAN\n");
        FAIL();
    } catch (const AuditError& e) {
        EXPECT_NE(std::string(e.what()).find("'wine'"), std::string::npos);
    }
    const auto g = parse_gazetteer("# c\nsurface,type\nWine,SIMPLE_CHEMICAL\nwine,SIMPLE_CHEMICAL\n");
    EXPECT_EQ(g.size(), 1u);
    EXPECT_EQ(g.entity_types(), std::vector<std::string>{"SIMPLE_CHEMICAL"});
    EXPECT_THROW(load_gazetteer("/nonexistent/gaz.csv"), AuditError);
}

TEST(EntityFrequencies, OrderingAndEmptySubset) {
    Gazetteer g;
    g.add("wine", "SIMPLE_CHEMICAL");
    g.add("alcohol", "SIMPLE_CHEMICAL");
    g.add("oral", "ORGANISM_SUBDIVISION");
    const auto t = entity_frequencies({toks("wine oral wine"), toks("alcohol oral x"), toks("y")}, g, "F");
    ASSERT_EQ(t.entries.size(), 3u);
    EXPECT_EQ(t.entries[0].surface, "oral"); // 2, tie with wine broken lexicographically
    EXPECT_EQ(t.entries[1].surface, "wine");
    EXPECT_EQ(t.entries[2], (EntityFrequency{"alcohol", "SIMPLE_CHEMICAL", 1}));
    EXPECT_EQ(t.label, "F");
    EXPECT_EQ(frequency_table_tsv(t), "surface\ttype\tcount\noral\tORGANISM_SUBDIVISION\t2\nwine\tSIMPLE_CHEMICAL\t2\n"
                                      "alcohol\tSIMPLE_CHEMICAL\t1\n");
    const auto back = frequency_table_from_json(frequency_table_to_json(t));
    EXPECT_EQ(back.entries, t.entries);
    EXPECT_TRUE(entity_frequencies({}, g).entries.empty());
    EXPECT_TRUE(entity_frequencies({toks("nothing here")}, g).entries.empty());
}

TEST(EntityFrequencies, CountsAreAtLeastOne) {
    Gazetteer g;
    g.add("a b", "T");
    g.add("b", "U");
    Rng rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::vector<std::string>> docs(1 + rng.index(5));
        for (auto& d : docs)
            for (std::size_t i = 0; i < rng.index(10); ++i) d.push_back(rng.index(2) ? "a" : "b");
        for (const auto& e : entity_frequencies(docs, g).entries) EXPECT_GE(e.count, 1u);
    }
}

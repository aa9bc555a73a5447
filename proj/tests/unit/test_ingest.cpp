#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "properties.hpp"
#include "trustrec/ingest.hpp"

namespace trustrec {

// Lets tests corrupt a table's indexes directly.
struct RatingsTableTestAccess {
    static void drop_from_item_index(RatingsTable& t, ItemId i) { t.by_item_[i.index()].clear(); }
};

namespace {

namespace fs = std::filesystem;

class IngestTest : public ::testing::Test {
protected:
    void SetUp() override {
        std::string tmpl = (fs::temp_directory_path() / "trustrec_ingest_XXXXXX").string();
        ASSERT_NE(mkdtemp(tmpl.data()), nullptr);
        dir_ = tmpl;
    }
    void TearDown() override { fs::remove_all(dir_); }

    DatasetSpec write(const std::string& trust, const std::string& ratings, DatasetSpec spec = {}) {
        std::ofstream(dir_ / "trust.txt") << trust;
        std::ofstream(dir_ / "ratings.txt") << ratings;
        spec.trust_path = dir_ / "trust.txt";
        spec.ratings_path = dir_ / "ratings.txt";
        if (spec.name.empty()) spec.name = "t";
        return spec;
    }

    fs::path dir_;
};

TEST_F(IngestTest, SmallExample) {
    const auto [ds, report] = load_dataset(write("A B\nB A\n", "A X 5\n"));
    EXPECT_EQ(report.users, 2u);
    EXPECT_EQ(report.items, 1u);
    EXPECT_EQ(report.edges, 2u);
    EXPECT_EQ(report.ratings, 1u);
    EXPECT_EQ(ds.user_names, (std::vector<std::string>{"A", "B"}));
    EXPECT_TRUE(validate(ds).empty());
}

TEST_F(IngestTest, SelfLoopIsSkippedAndCounted) {
    const auto [ds, report] = load_dataset(write("A A\nA B\n", "A X 5\n"));
    EXPECT_EQ(report.edges, 1u);
    EXPECT_EQ(report.skipped(SkipReason::SelfLoop), 1u);
}

TEST_F(IngestTest, DuplicateRatingKeepsLast) {
    const auto [ds, report] = load_dataset(write("A B\n", "A X 5\nA X 3\n"));
    EXPECT_EQ(report.ratings, 1u);
    EXPECT_EQ(report.skipped(SkipReason::DuplicateRating), 1u);
    EXPECT_EQ(ds.ratings.rating(UserId{0}, ItemId{0}), 3.0);
}

TEST_F(IngestTest, CountsEverySkipReason) {
    const auto [ds, report] =
        load_dataset(write("A B\nA B\nC\nD D\n# note\n\n", "A X 5\nB Y 7\nB Y\nC Z 2\nC Z 1\n"));
    EXPECT_EQ(report.skipped(SkipReason::DuplicateEdge), 1u);
    EXPECT_EQ(report.skipped(SkipReason::Malformed), 2u);
    EXPECT_EQ(report.skipped(SkipReason::SelfLoop), 1u);
    EXPECT_EQ(report.skipped(SkipReason::OffScale), 1u);
    EXPECT_EQ(report.skipped(SkipReason::DuplicateRating), 1u);
    EXPECT_EQ(report.trust.lines, 4u);
    EXPECT_EQ(report.rating.lines, 5u);
}

TEST_F(IngestTest, RatingOnlyUsersBecomeIsolatedNodes) {
    const auto [ds, report] = load_dataset(write("A B\n", "C X 4\n"));
    EXPECT_EQ(ds.user_count(), 3u);
    EXPECT_TRUE(ds.graph.neighbors_undirected(UserId{2}).empty());
}

TEST_F(IngestTest, StrictModeAbortsOnMalformedLine) {
    DatasetSpec strict;
    strict.strict = true;
    EXPECT_THROW(load_dataset(write("A B\nC\n", "A X 5\n", strict)), IngestError);
}

TEST_F(IngestTest, DistinctErrors) {
    DatasetSpec spec;
    spec.trust_path = dir_ / "missing.txt";
    spec.ratings_path = dir_ / "missing.txt";
    try {
        load_dataset(spec);
        FAIL();
    } catch (const IngestError& e) {
        EXPECT_EQ(e.kind(), IngestError::Kind::Unreadable);
        EXPECT_NE(std::string(e.what()).find("missing.txt"), std::string::npos);
    }
    try {
        load_dataset(write("", "A X 9\n"));
        FAIL();
    } catch (const IngestError& e) {
        EXPECT_EQ(e.kind(), IngestError::Kind::Empty);
    }
}

TEST_F(IngestTest, FilmTrustPreset) {
    const auto [ds, report] = load_dataset(write("1 2\n", "1 7 3.5\n2 7 0.5\n1 8 4.5\n", preset("filmtrust")));
    EXPECT_EQ(ds.ratings.scale(), RatingScale(0.5, 4.0, 0.5));
    EXPECT_EQ(report.ratings, 2u);
    EXPECT_EQ(report.skipped(SkipReason::OffScale), 1u);
}

TEST_F(IngestTest, CiaoDvdPreset) {
    const auto spec = write("1,2,1\n2,3,1\n", "1,10,5,3,4,2011-01-01\n3,11,1,2,5,2011-01-02\n", preset("ciaodvd"));
    const auto [ds, report] = load_dataset(spec);
    EXPECT_EQ(report.edges, 2u);
    EXPECT_EQ(report.ratings, 2u);
    EXPECT_EQ(ds.ratings.rating(UserId{0}, ItemId{0}), 4.0);
    EXPECT_EQ(ds.ratings.rating(UserId{2}, ItemId{1}), 5.0);
}

TEST_F(IngestTest, HeaderLinesAreSkipped) {
    DatasetSpec spec;
    spec.header_lines = 1;
    const auto [ds, report] = load_dataset(write("from to\nA B\n", "user item rating\nA X 2\n", spec));
    EXPECT_EQ(report.edges, 1u);
    EXPECT_EQ(report.ratings, 1u);
    EXPECT_EQ(report.skipped(SkipReason::Malformed), 0u);
}

TEST_F(IngestTest, ReportJsonKeys) {
    const auto [ds, report] = load_dataset(write("A B\n", "A X 5\n"));
    const auto j = report.to_json();
    for (const char* key : {"users", "items", "edges", "ratings", "skipped"}) EXPECT_TRUE(j.contains(key)) << key;
    for (const char* reason : {"malformed", "off_scale", "self_loop", "duplicate_edge", "duplicate_rating"})
        EXPECT_TRUE(j["skipped"].contains(reason)) << reason;
}

TEST_F(IngestTest, ValidateFlagsCorruptedIndex) {
    auto [ds, report] = load_dataset(write("A B\n", "A X 5\nB X 4\n"));
    EXPECT_TRUE(validate(ds).empty());
    RatingsTableTestAccess::drop_from_item_index(ds.ratings, ItemId{0});
    const auto problems = validate(ds);
    ASSERT_FALSE(problems.empty());
    EXPECT_NE(problems.front().find("(0, 0)"), std::string::npos) << problems.front();
}

TEST(Validate, EmptyDatasetIsValid) {
    Dataset empty{"empty", TrustGraph(0, {}), RatingsTable(RatingScale(1, 5, 1), 0, 0), {}, {}, 0};
    EXPECT_TRUE(validate(empty).empty());
}

TEST_F(IngestTest, DumpRoundTripKeepsIds) {
    const auto first = load_dataset(write("C A\nA B\nD C\n", "B X 1\nE Y 2\nA X 3\nE X 4\n"));
    dump_dataset(first.dataset, dir_ / "dump");
    std::ifstream in(dir_ / "dump" / "dataset.json");
    const auto again = load_dataset(spec_from_json(nlohmann::json::parse(in), dir_ / "dump"));
    EXPECT_EQ(again.dataset, first.dataset);
}

TEST(DatasetSpec, RejectsCollidingColumns) {
    DatasetSpec s;
    s.item_col = 0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    EXPECT_THROW(preset("netflix"), std::invalid_argument);
}

TEST(IngestProperties, ReportArithmetic) { EXPECT_EQ(testkit::prop_report_arithmetic(21, 60), testkit::Failures{}); }
TEST(IngestProperties, DumpRoundTrip) { EXPECT_EQ(testkit::prop_dump_round_trip(22, 40), testkit::Failures{}); }

}  // namespace
}  // namespace trustrec

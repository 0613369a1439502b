#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <sstream>

#include "conflictforge/corpus.hpp"

using namespace conflictforge;
using corpus::CorpusStore;
using corpus::IngestOptions;
using corpus::Interaction;

namespace {

std::string comment_line(const std::string& id, const std::string& thread,
                         const std::string& parent, const std::string& author, long long t,
                         const std::string& body = "hello world") {
    std::ostringstream os;
    os << R"({"id":")" << id << R"(","thread_id":")" << thread << '"';
    if (parent.empty()) os << R"(,"parent_id":null)";
    else os << R"(,"parent_id":")" << parent << '"';
    os << R"(,"author":")" << author << R"(","created_utc":)" << t << R"(,"body":")" << body
       << R"("})" << "\n";
    return os.str();
}

std::string article_line(const std::string& id, const std::string& source, long long t) {
    std::ostringstream os;
    os << R"({"id":")" << id << R"(","url":"http://x/)" << id << R"(","source":")" << source
       << R"(","title":"t","text":"body text here","posted_utc":)" << t << "}\n";
    return os.str();
}

std::string thread_line(const std::string& id, const std::string& article, long long t) {
    std::ostringstream os;
    os << R"({"id":")" << id << R"(","article_id":")" << article << R"(","created_utc":)" << t
       << "}\n";
    return os.str();
}

CorpusStore make_store(const std::string& comments, const std::string& articles,
                       const std::string& threads, std::size_t min_comments = 1) {
    std::istringstream cs(comments), as(articles), ts(threads);
    return corpus::ingest(cs, as, ts, IngestOptions{min_comments});
}

}  // namespace

TEST_CASE("ingest stores valid comments") {
    std::string comments = comment_line("c1", "t1", "", "u1", 100) +
                           comment_line("c2", "t1", "c1", "u2", 110) +
                           comment_line("c3", "t1", "c2", "u3", 120);
    auto store = make_store(comments, article_line("a1", "src", 50), thread_line("t1", "a1", 60));
    CHECK(store.stats().comments == 3);
    CHECK(store.stats().skipped_lines == 0);
    CHECK(store.comment("c2")->author == "u2");
}

TEST_CASE("ingest skips malformed lines and counts them") {
    std::string missing_author =
        R"({"id":"c1","thread_id":"t1","parent_id":null,"created_utc":100,"body":"x"})" "\n";
    auto store = make_store(missing_author, article_line("a1", "src", 50),
                            thread_line("t1", "a1", 60));
    CHECK(store.stats().comments == 0);
    CHECK(store.stats().skipped_lines == 1);
}

TEST_CASE("ingest dedups by id keeping the first occurrence") {
    std::string comments = comment_line("c1", "t1", "", "first", 100) +
                           comment_line("c1", "t1", "", "second", 200);
    auto store = make_store(comments, article_line("a1", "src", 50), thread_line("t1", "a1", 60));
    CHECK(store.stats().comments == 1);
    CHECK(store.stats().duplicate_ids == 1);
    CHECK(store.comment("c1")->author == "first");
}

TEST_CASE("threads below the comment floor are dropped") {
    std::string comments;
    for (int i = 0; i < 10; ++i)
        comments += comment_line("big" + std::to_string(i), "t1", "", "u" + std::to_string(i), 100 + i);
    comments += comment_line("small1", "t2", "", "u1", 100);
    std::string articles = article_line("a1", "src", 50) + article_line("a2", "src", 51);
    std::string threads = thread_line("t1", "a1", 60) + thread_line("t2", "a2", 61);
    std::istringstream cs(comments), as(articles), ts(threads);
    auto store = corpus::ingest(cs, as, ts, IngestOptions{10});
    CHECK(store.stats().threads == 1);
    CHECK(store.stats().dropped_threads == 1);
    CHECK(store.stats().dropped_comments == 1);
    CHECK(store.thread("t2") == nullptr);
}

TEST_CASE("thread referencing a missing article is kept but flagged") {
    auto store = make_store(comment_line("c1", "t1", "", "u1", 100), "",
                            thread_line("t1", "nope", 60));
    REQUIRE(store.thread("t1") != nullptr);
    CHECK_FALSE(store.thread("t1")->article_linked);
    CHECK(store.stats().unlinked_threads == 1);
}

TEST_CASE("reply pairs walk the tree and keep distinct authors") {
    // chain u1 -> u2 -> u1
    std::string comments = comment_line("c1", "t1", "", "u1", 100) +
                           comment_line("c2", "t1", "c1", "u2", 110) +
                           comment_line("c3", "t1", "c2", "u1", 120);
    auto store = make_store(comments, article_line("a1", "src", 50), thread_line("t1", "a1", 60));
    auto rp = corpus::reply_pairs(store, *store.thread("t1"));
    REQUIRE(rp.interactions.size() == 2);
    CHECK(rp.interactions[0].user_a == "u1");
    CHECK(rp.interactions[0].user_b == "u2");
    CHECK(rp.interactions[0].depth == 0);
    CHECK(rp.interactions[1].user_a == "u2");
    CHECK(rp.interactions[1].user_b == "u1");
    CHECK(rp.interactions[1].depth == 1);
}

TEST_CASE("self-replies produce no interaction") {
    std::string comments = comment_line("c1", "t1", "", "u1", 100) +
                           comment_line("c2", "t1", "c1", "u1", 110);
    auto store = make_store(comments, article_line("a1", "src", 50), thread_line("t1", "a1", 60));
    CHECK(corpus::reply_pairs(store, *store.thread("t1")).interactions.empty());
}

TEST_CASE("star thread yields one interaction per reply, all at depth 0") {
    std::string comments = comment_line("root", "t1", "", "u1", 100);
    for (int i = 2; i <= 4; ++i)
        comments += comment_line("r" + std::to_string(i), "t1", "root", "u" + std::to_string(i),
                                 100 + i);
    auto store = make_store(comments, article_line("a1", "src", 50), thread_line("t1", "a1", 60));
    auto rp = corpus::reply_pairs(store, *store.thread("t1"));

    // brute-force oracle: walk every comment, emit an edge when the parent
    // resolves and authors differ
    std::size_t expected = 0;
    for (const auto& c : store.comments()) {
        if (!c.parent_id) continue;
        const auto* parent = store.comment(*c.parent_id);
        if (parent && parent->author != c.author) ++expected;
    }
    REQUIRE(rp.interactions.size() == expected);
    REQUIRE(expected == 3);
    for (const auto& i : rp.interactions) {
        CHECK(i.depth == 0);
        CHECK(i.user_a == "u1");
    }
}

TEST_CASE("orphan comments become top-level with a warning") {
    std::string comments = comment_line("c1", "t1", "", "u1", 100) +
                           comment_line("c2", "t1", "ghost", "u2", 110) +
                           comment_line("c3", "t1", "c2", "u3", 120);
    auto store = make_store(comments, article_line("a1", "src", 50), thread_line("t1", "a1", 60));
    auto rp = corpus::reply_pairs(store, *store.thread("t1"));
    CHECK(rp.orphan_comments == 1);
    REQUIRE(rp.interactions.size() == 1);  // only c3 -> c2
    CHECK(rp.interactions[0].depth == 0);  // orphan c2 is treated as a root
}

TEST_CASE("interaction count never exceeds non-root comments") {
    std::string comments = comment_line("c1", "t1", "", "u1", 100) +
                           comment_line("c2", "t1", "c1", "u2", 105) +
                           comment_line("c3", "t1", "c1", "u1", 106) +
                           comment_line("c4", "t1", "c3", "u1", 107) +
                           comment_line("c5", "t1", "c2", "u3", 108);
    auto store = make_store(comments, article_line("a1", "src", 50), thread_line("t1", "a1", 60));
    auto rp = corpus::reply_pairs(store, *store.thread("t1"));
    std::size_t non_root = 0;
    for (const auto& c : store.comments())
        if (c.parent_id) ++non_root;
    CHECK(rp.interactions.size() <= non_root);
}

TEST_CASE("re-ingesting the same input yields an identical store") {
    std::string comments;
    for (int i = 0; i < 12; ++i)
        comments += comment_line("c" + std::to_string(i), "t1",
                                 i == 0 ? "" : "c" + std::to_string(i / 2),
                                 "u" + std::to_string(i % 4), 100 + i);
    std::string articles = article_line("a1", "src", 50);
    std::string threads = thread_line("t1", "a1", 60);
    auto s1 = make_store(comments, articles, threads);
    auto s2 = make_store(comments, articles, threads);
    REQUIRE(s1.comments().size() == s2.comments().size());
    auto i1 = corpus::all_interactions(s1);
    auto i2 = corpus::all_interactions(s2);
    REQUIRE(i1.size() == i2.size());
    for (std::size_t k = 0; k < i1.size(); ++k) {
        CHECK(i1[k].comment_a_id == i2[k].comment_a_id);
        CHECK(i1[k].comment_b_id == i2[k].comment_b_id);
        CHECK(i1[k].depth == i2[k].depth);
    }
    // every interaction resolves to stored comments of the same thread
    for (const auto& i : i1) {
        const auto* a = s1.comment(i.comment_a_id);
        const auto* b = s1.comment(i.comment_b_id);
        REQUIRE(a != nullptr);
        REQUIRE(b != nullptr);
        CHECK(a->thread_id == b->thread_id);
    }
}

#pragma once
// Discussion corpus: line-delimited ingestion of comments, articles and
// threads, plus reply-pair derivation.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "conflictforge/common.hpp"

namespace conflictforge::corpus {

struct Comment {
    std::string id;
    std::string thread_id;
    std::optional<std::string> parent_id;  // absent => top-level
    std::string author;
    std::int64_t created_utc = 0;
    std::string body;
};

struct Article {
    std::string id;
    std::string url;
    std::string source;
    std::string title;
    std::string text;
    std::int64_t posted_utc = 0;  // time of appearance on the forum
};

struct Thread {
    std::string id;
    std::string article_id;
    std::int64_t created_utc = 0;
    std::vector<std::string> comment_ids;  // ordered by (created_utc, id)
    bool article_linked = false;
};

// A direct reply between two distinct users. depth is the tree depth of the
// parent comment (top-level parents at depth 0).
struct Interaction {
    std::string user_a;  // author of the parent comment
    std::string user_b;  // author of the reply
    std::string comment_a_id;
    std::string comment_b_id;
    std::int64_t time_utc = 0;  // reply's created_utc
    int depth = 0;
};

struct IngestStats {
    std::size_t comments = 0;
    std::size_t articles = 0;
    std::size_t threads = 0;
    std::size_t skipped_lines = 0;
    std::size_t duplicate_ids = 0;
    std::size_t dropped_threads = 0;   // below the comment-count floor
    std::size_t dropped_comments = 0;  // comments of dropped threads
    std::size_t unlinked_threads = 0;  // thread kept, article missing
    std::size_t comments_without_thread = 0;
};

struct IngestOptions {
    std::size_t min_thread_comments = 10;
};

class CorpusStore {
public:
    const Comment* comment(const std::string& id) const {
        auto it = comment_index_.find(id);
        return it == comment_index_.end() ? nullptr : &comments_[it->second];
    }
    const Article* article(const std::string& id) const {
        auto it = article_index_.find(id);
        return it == article_index_.end() ? nullptr : &articles_[it->second];
    }
    const Thread* thread(const std::string& id) const {
        auto it = thread_index_.find(id);
        return it == thread_index_.end() ? nullptr : &threads_[it->second];
    }

    const std::vector<Comment>& comments() const { return comments_; }
    const std::vector<Article>& articles() const { return articles_; }
    const std::vector<Thread>& threads() const { return threads_; }
    const IngestStats& stats() const { return stats_; }

private:
    std::vector<Comment> comments_;
    std::vector<Article> articles_;
    std::vector<Thread> threads_;
    std::unordered_map<std::string, std::size_t> comment_index_;
    std::unordered_map<std::string, std::size_t> article_index_;
    std::unordered_map<std::string, std::size_t> thread_index_;
    IngestStats stats_;

    friend CorpusStore ingest(std::istream&, std::istream&, std::istream&, const IngestOptions&);
};

namespace detail {

inline std::optional<std::string> json_string(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
}

inline std::optional<std::int64_t> json_int(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer()) return std::nullopt;
    return it->get<std::int64_t>();
}

}  // namespace detail

// Builds the indexed store. Malformed lines are counted and skipped; records
// are deduplicated by id keeping the first occurrence. Threads with fewer
// than min_thread_comments comments are dropped along with their comments.
inline CorpusStore ingest(std::istream& comments_stream, std::istream& articles_stream,
                          std::istream& threads_stream, const IngestOptions& options = {}) {
    if (!comments_stream || !articles_stream || !threads_stream)
        throw UserError("unreadable corpus stream");

    CorpusStore store;
    IngestStats& st = store.stats_;
    std::string line;

    while (std::getline(articles_stream, line)) {
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) { ++st.skipped_lines; continue; }
        Article a;
        auto id = detail::json_string(j, "id");
        auto url = detail::json_string(j, "url");
        auto source = detail::json_string(j, "source");
        auto title = detail::json_string(j, "title");
        auto text = detail::json_string(j, "text");
        auto posted = detail::json_int(j, "posted_utc");
        if (!id || !url || !source || source->empty() || !title || !text || !posted || *posted <= 0) {
            ++st.skipped_lines;
            continue;
        }
        if (store.article_index_.count(*id)) { ++st.duplicate_ids; continue; }
        a.id = *id; a.url = *url; a.source = *source; a.title = *title;
        a.text = *text; a.posted_utc = *posted;
        store.article_index_[a.id] = store.articles_.size();
        store.articles_.push_back(std::move(a));
    }

    while (std::getline(threads_stream, line)) {
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) { ++st.skipped_lines; continue; }
        auto id = detail::json_string(j, "id");
        auto article_id = detail::json_string(j, "article_id");
        auto created = detail::json_int(j, "created_utc");
        if (!id || !article_id || !created) { ++st.skipped_lines; continue; }
        if (store.thread_index_.count(*id)) { ++st.duplicate_ids; continue; }
        Thread t;
        t.id = *id; t.article_id = *article_id; t.created_utc = *created;
        t.article_linked = store.article_index_.count(t.article_id) > 0;
        if (!t.article_linked) ++st.unlinked_threads;
        store.thread_index_[t.id] = store.threads_.size();
        store.threads_.push_back(std::move(t));
    }

    while (std::getline(comments_stream, line)) {
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) { ++st.skipped_lines; continue; }
        auto id = detail::json_string(j, "id");
        auto thread_id = detail::json_string(j, "thread_id");
        auto author = detail::json_string(j, "author");
        auto created = detail::json_int(j, "created_utc");
        auto body = detail::json_string(j, "body");
        if (!id || !thread_id || !author || !created || !body) { ++st.skipped_lines; continue; }
        if (store.comment_index_.count(*id)) { ++st.duplicate_ids; continue; }
        Comment c;
        c.id = *id; c.thread_id = *thread_id; c.author = *author;
        c.created_utc = *created; c.body = *body;
        if (auto it = j.find("parent_id"); it != j.end() && it->is_string())
            c.parent_id = it->get<std::string>();
        if (!store.thread_index_.count(c.thread_id)) {
            ++st.comments_without_thread;
            continue;
        }
        store.comment_index_[c.id] = store.comments_.size();
        store.comments_.push_back(std::move(c));
    }

    // attach comments to threads
    for (const auto& c : store.comments_) {
        store.threads_[store.thread_index_.at(c.thread_id)].comment_ids.push_back(c.id);
    }
    // drop small threads, then rebuild indexes
    std::vector<Thread> kept_threads;
    std::unordered_set<std::string> dropped;
    for (auto& t : store.threads_) {
        if (t.comment_ids.size() < options.min_thread_comments) {
            ++st.dropped_threads;
            st.dropped_comments += t.comment_ids.size();
            dropped.insert(t.id);
            if (!t.article_linked) --st.unlinked_threads;
        } else {
            kept_threads.push_back(std::move(t));
        }
    }
    store.threads_ = std::move(kept_threads);
    if (!dropped.empty()) {
        std::vector<Comment> kept_comments;
        kept_comments.reserve(store.comments_.size());
        for (auto& c : store.comments_)
            if (!dropped.count(c.thread_id)) kept_comments.push_back(std::move(c));
        store.comments_ = std::move(kept_comments);
    }
    store.comment_index_.clear();
    for (std::size_t i = 0; i < store.comments_.size(); ++i)
        store.comment_index_[store.comments_[i].id] = i;
    store.thread_index_.clear();
    for (std::size_t i = 0; i < store.threads_.size(); ++i)
        store.thread_index_[store.threads_[i].id] = i;

    // deterministic comment order inside each thread
    for (auto& t : store.threads_) {
        std::sort(t.comment_ids.begin(), t.comment_ids.end(),
                  [&](const std::string& a, const std::string& b) {
                      const Comment* ca = store.comment(a);
                      const Comment* cb = store.comment(b);
                      if (ca->created_utc != cb->created_utc)
                          return ca->created_utc < cb->created_utc;
                      return a < b;
                  });
    }

    st.comments = store.comments_.size();
    st.articles = store.articles_.size();
    st.threads = store.threads_.size();
    return store;
}

struct ReplyPairs {
    std::vector<Interaction> interactions;
    std::size_t orphan_comments = 0;  // parent_id unresolved, treated as top-level
};

// One Interaction per (parent comment, reply) edge with distinct authors.
// Output is ordered by reply created_utc, then reply id.
inline ReplyPairs reply_pairs(const CorpusStore& store, const Thread& thread) {
    ReplyPairs out;
    std::unordered_map<std::string, int> depth;  // comment id -> depth
    // comment_ids are time-ordered, so a parent is normally processed first;
    // unresolved parents demote the comment to top-level.
    for (const auto& cid : thread.comment_ids) {
        const Comment* c = store.comment(cid);
        const Comment* parent = nullptr;
        if (c->parent_id && *c->parent_id != thread.id) {
            parent = store.comment(*c->parent_id);
            if (parent && parent->thread_id != thread.id) parent = nullptr;
            if (!parent) ++out.orphan_comments;
        }
        if (!parent) {
            depth[cid] = 0;
            continue;
        }
        auto pd = depth.find(parent->id);
        depth[cid] = (pd == depth.end() ? 0 : pd->second) + 1;
        if (parent->author == c->author) continue;  // self-reply
        Interaction inter;
        inter.user_a = parent->author;
        inter.user_b = c->author;
        inter.comment_a_id = parent->id;
        inter.comment_b_id = c->id;
        inter.time_utc = c->created_utc;
        inter.depth = depth[parent->id];
        out.interactions.push_back(std::move(inter));
    }
    std::sort(out.interactions.begin(), out.interactions.end(),
              [](const Interaction& a, const Interaction& b) {
                  if (a.time_utc != b.time_utc) return a.time_utc < b.time_utc;
                  return a.comment_b_id < b.comment_b_id;
              });
    return out;
}

// All interactions of the corpus, threads visited in id order.
inline std::vector<Interaction> all_interactions(const CorpusStore& store,
                                                 std::size_t* orphan_count = nullptr) {
    std::vector<const Thread*> threads;
    for (const auto& t : store.threads()) threads.push_back(&t);
    std::sort(threads.begin(), threads.end(),
              [](const Thread* a, const Thread* b) { return a->id < b->id; });
    std::vector<Interaction> all;
    std::size_t orphans = 0;
    for (const Thread* t : threads) {
        ReplyPairs rp = reply_pairs(store, *t);
        orphans += rp.orphan_comments;
        for (auto& i : rp.interactions) all.push_back(std::move(i));
    }
    if (orphan_count) *orphan_count = orphans;
    return all;
}

}  // namespace conflictforge::corpus

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "hsed/ingest.hpp"

using namespace hsed::ingest;

namespace {

MessageRecord rec(std::string id, std::string user, std::string text = "",
                  std::vector<std::string> mentions = {},
                  std::optional<std::string> retweet = {}, std::int64_t ts = 0,
                  std::optional<int> label = {}) {
  MessageRecord r;
  r.message_id = std::move(id);
  r.user_id = std::move(user);
  r.text = std::move(text);
  r.mentioned_users = std::move(mentions);
  r.retweeted_user = std::move(retweet);
  r.timestamp = ts;
  r.event_label = label;
  return r;
}

// Brute-force pairwise associated-user-set intersection.
std::set<std::pair<int, int>> oracle_edges(const std::vector<MessageRecord>& records) {
  std::vector<std::set<std::string>> users(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    users[i].insert(records[i].user_id);
    users[i].insert(records[i].mentioned_users.begin(), records[i].mentioned_users.end());
    if (records[i].retweeted_user) users[i].insert(*records[i].retweeted_user);
  }
  std::set<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < records.size(); ++i)
    for (std::size_t j = i + 1; j < records.size(); ++j)
      for (const auto& u : users[i])
        if (users[j].count(u)) edges.insert({int(i), int(j)});
  return edges;
}

}  // namespace

TEST_CASE("iso8601 parsing") {
  CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0);
  CHECK(parse_iso8601("1970-01-02T00:00:00+00:00") == 86400);
  CHECK(parse_iso8601("1970-01-01T01:00:00+01:00") == 0);
  CHECK(parse_iso8601("1970-01-01T00:00:00-0130") == 5400);
  CHECK(parse_iso8601("2022-03-10T14:30:00Z") ==
        parse_iso8601("2022-03-10T14:30:00+00:00"));
  CHECK(parse_iso8601("2022-03-10T14:30:00.25Z") == parse_iso8601("2022-03-10T14:30:00Z"));
  CHECK_THROWS_AS(parse_iso8601("not a timestamp"), std::invalid_argument);
  CHECK_THROWS_AS(parse_iso8601("2022-13-01T00:00:00Z"), std::invalid_argument);
}

TEST_CASE("parse messages") {
  std::istringstream empty("");
  CHECK(parse_messages(empty).empty());

  std::istringstream one(
      R"({"message_id":"m1","text":"Hello @bob","user_id":"alice","timestamp":"2022-03-10T14:30:00Z","mentioned_users":["bob"],"retweeted_user":"carol","location":"NYC","event_label":3})"
      "\n");
  const auto records = parse_messages(one);
  REQUIRE(records.size() == 1);
  CHECK(records[0].message_id == "m1");
  CHECK(records[0].user_id == "alice");
  CHECK(records[0].mentioned_users == std::vector<std::string>{"bob"});
  CHECK(records[0].retweeted_user == "carol");
  CHECK(records[0].location == "NYC");
  CHECK(records[0].event_label == 3);

  std::istringstream missing(
      "{\"message_id\":\"a\",\"text\":\"x\",\"user_id\":\"u\",\"timestamp\":\"1970-01-01T00:00:00Z\"}\n"
      "{\"message_id\":\"b\",\"user_id\":\"u\",\"timestamp\":\"1970-01-01T00:00:00Z\"}\n");
  CHECK_THROWS_WITH_AS(parse_messages(missing), doctest::Contains("line 2"), std::runtime_error);

  std::istringstream dup(
      "{\"message_id\":\"a\",\"text\":\"x\",\"user_id\":\"u\",\"timestamp\":\"1970-01-01T00:00:00Z\"}\n"
      "{\"message_id\":\"a\",\"text\":\"y\",\"user_id\":\"v\",\"timestamp\":\"1970-01-01T00:00:00Z\"}\n");
  CHECK_THROWS_WITH_AS(parse_messages(dup), doctest::Contains("duplicate"), std::runtime_error);
}

TEST_CASE("time encoding") {
  CHECK(time_encode(0, 0, 10 * 86400) == std::pair<double, double>{0.0, 0.0});
  CHECK(time_encode(10 * 86400 + 43200, 0, 10 * 86400 + 43200) ==
        std::pair<double, double>{1.0, 0.5});
  const auto [df, sf] = time_encode(3 * 86400 + 6 * 3600, 0, 10 * 86400);
  CHECK(df == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(sf == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(time_encode(500, 500, 500).first == 0.0);
  CHECK_THROWS_AS(time_encode(-1, 0, 86400), std::invalid_argument);
}

TEST_CASE("tokenization and fallback embeddings") {
  CHECK(tokenize("Hello, World! 42") == std::vector<std::string>{"hello", "world", "42"});
  CHECK(tokenize("...") == std::vector<std::string>{});

  const auto a = hash_fallback_embedding("token", 8);
  CHECK(a == hash_fallback_embedding("token", 8));
  CHECK(a != hash_fallback_embedding("other", 8));
  double norm = 0.0;
  for (double v : a) norm += v * v;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("message embedding") {
  TokenEmbeddingTable table(2);
  table.insert("alpha", {1.0, 2.0});
  table.insert("beta", {3.0, 6.0});
  CHECK_THROWS_AS(table.insert("bad", {1.0}), std::invalid_argument);

  auto single = embed_message(rec("m", "u", "Alpha!"), table, 0, 86400);
  CHECK(single[0] == 1.0);
  CHECK(single[1] == 2.0);
  auto both = embed_message(rec("m", "u", "alpha beta"), table, 0, 86400);
  CHECK(both[0] == doctest::Approx(2.0));
  CHECK(both[1] == doctest::Approx(4.0));
  auto none = embed_message(rec("m", "u", ""), table, 0, 86400);
  CHECK(none[0] == 0.0);
  CHECK(none[1] == 0.0);
  CHECK(none.size() == 4);  // dimension + 2
}

TEST_CASE("graph construction matches the pairwise-intersection oracle") {
  // 10 handcrafted messages exercising mentions, retweets and disjoint sets.
  std::vector<MessageRecord> records{
      rec("m0", "alice", "storm hits", {"bob"}, {}, 100, 0),
      rec("m1", "bob", "big storm", {}, {}, 200, 0),
      rec("m2", "carol", "re: storm", {}, std::string("alice"), 300, 0),
      rec("m3", "dave", "quiet day", {}, {}, 400, 1),
      rec("m4", "erin", "mentions", {"dave", "frank"}, {}, 500, 1),
      rec("m5", "frank", "hello", {}, {}, 600, 1),
      rec("m6", "grace", "isolated", {}, {}, 700, 2),
      rec("m7", "heidi", "rt chain", {}, std::string("ivan"), 800, 2),
      rec("m8", "ivan", "origin", {}, {}, 900, 2),
      rec("m9", "judy", "rt too", {}, std::string("ivan"), 1000, 2),
  };
  TokenEmbeddingTable table(3);
  const auto g = build_message_graph(records, table);
  CHECK(g.num_nodes == 10);
  CHECK(g.feature_dim == 5);  // table dimension + 2
  std::set<std::pair<int, int>> got(g.edges.begin(), g.edges.end());
  CHECK(got == oracle_edges(records));
  CHECK(g.labels == std::vector<int>{0, 0, 0, 1, 1, 1, 2, 2, 2, 2});
  CHECK(std::is_sorted(g.edges.begin(), g.edges.end()));
  for (const auto& [a, b] : g.edges) CHECK(a < b);

  // Three messages retweeting one user form a triangle.
  std::vector<MessageRecord> tri{rec("a", "u1", "", {}, std::string("u")),
                                 rec("b", "u2", "", {}, std::string("u")),
                                 rec("c", "u3", "", {}, std::string("u"))};
  CHECK(build_message_graph(tri, table).edges.size() == 3);

  // Mixed labeled/unlabeled input is ambiguous.
  records[3].event_label.reset();
  CHECK_THROWS_AS(build_message_graph(records, table), std::invalid_argument);
}

TEST_CASE("graph build is deterministic and label-densifying") {
  std::vector<MessageRecord> records{rec("a", "u", "x", {}, {}, 0, 17),
                                     rec("b", "v", "y", {}, {}, 10, 4),
                                     rec("c", "u", "z", {}, {}, 20, 17)};
  TokenEmbeddingTable table(2);
  const auto g1 = build_message_graph(records, table);
  const auto g2 = build_message_graph(records, table);
  CHECK(g1.features == g2.features);
  CHECK(g1.edges == g2.edges);
  CHECK(g1.labels == std::vector<int>{1, 0, 1});  // dense ids ordered by raw value
}

TEST_CASE("dataset split") {
  const auto s = split_dataset(10, 0.7, 0.2, 0.1, 1234);
  CHECK(s.train.size() == 7);
  CHECK(s.test.size() == 2);
  CHECK(s.val.size() == 1);
  std::set<int> all;
  all.insert(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  all.insert(s.val.begin(), s.val.end());
  CHECK(all.size() == 10);
  const auto again = split_dataset(10, 0.7, 0.2, 0.1, 1234);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);
  CHECK(again.val == s.val);
  CHECK(split_dataset(10, 0.7, 0.2, 0.1, 99).train != s.train);
  CHECK_THROWS_AS(split_dataset(0, 0.7, 0.2, 0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(split_dataset(10, 0.5, 0.2, 0.1, 0), std::invalid_argument);
}

TEST_CASE("graph file roundtrip") {
  MessageGraph g;
  g.num_nodes = 3;
  g.feature_dim = 2;
  g.features = {0.1, 1.0 / 3.0, -2.5, 1e-17, 3.0, 4.0};
  g.edges = {{0, 1}, {1, 2}};
  g.labels = {0, 1, 1};
  g.node_ids = {"a", "b", "c"};

  const auto back = graph_from_json(graph_to_json(g));
  CHECK(back.features == g.features);  // lossless double roundtrip
  CHECK(back.edges == g.edges);
  CHECK(back.labels == g.labels);
  CHECK(back.node_ids == g.node_ids);

  const std::string path = "test_graph_roundtrip.json";
  save_graph(g, path);
  const auto loaded = load_graph(path);
  CHECK(loaded.features == g.features);
  CHECK(graph_to_json(loaded) == graph_to_json(g));
  std::remove(path.c_str());

  g.labels.clear();
  CHECK_FALSE(graph_from_json(graph_to_json(g)).labeled());
}

TEST_CASE("embedding table file parsing") {
  const std::string path = "test_table.tsv";
  {
    std::ofstream out(path);
    out << "dimension 2\nalpha\t1.0\t2.0\nbeta\t-0.5\t0.25\n";
  }
  const auto t = TokenEmbeddingTable::load(path);
  CHECK(t.dimension() == 2);
  CHECK(t.size() == 2);
  REQUIRE(t.find("alpha") != nullptr);
  CHECK(*t.find("alpha") == std::vector<double>{1.0, 2.0});
  CHECK(t.find("gamma") == nullptr);
  std::remove(path.c_str());

  {
    std::ofstream out(path);
    out << "no header\n";
  }
  CHECK_THROWS_AS(TokenEmbeddingTable::load(path), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("atomic writes leave no partial files") {
  const std::string path = "test_atomic.txt";
  write_file_atomic(path, "payload");
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "payload");
  std::ifstream tmp(path + ".tmp");
  CHECK_FALSE(tmp.good());
  std::remove(path.c_str());
}

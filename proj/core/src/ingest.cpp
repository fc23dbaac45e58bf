#include "hsed/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

namespace hsed::ingest {

using nlohmann::json;

namespace {

// Howard Hinnant's days-from-civil.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = unsigned(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + std::int64_t(doe) - 719468;
}

[[noreturn]] void bad_ts(const std::string& s) {
  throw std::invalid_argument("unparseable ISO-8601 timestamp: " + s);
}

}  // namespace

std::int64_t parse_iso8601(const std::string& s) {
  int y, mo, d, h, mi;
  double sec;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%lf%n", &y, &mo, &d, &h, &mi, &sec, &consumed) != 6)
    bad_ts(s);
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 ||
      sec < 0.0 || sec >= 61.0)
    bad_ts(s);
  std::int64_t offset = 0;
  std::string rest = s.substr(consumed);
  if (rest.empty() || rest == "Z") {
    // UTC
  } else if (rest[0] == '+' || rest[0] == '-') {
    int oh = 0, om = 0;
    if (std::sscanf(rest.c_str() + 1, "%2d:%2d", &oh, &om) == 2 ||
        std::sscanf(rest.c_str() + 1, "%2d%2d", &oh, &om) == 2 ||
        std::sscanf(rest.c_str() + 1, "%2d", &oh) == 1) {
      offset = (std::int64_t(oh) * 60 + om) * 60;
      if (rest[0] == '-') offset = -offset;
    } else {
      bad_ts(s);
    }
  } else {
    bad_ts(s);
  }
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 +
         std::int64_t(std::llround(sec)) - offset;
}

std::vector<MessageRecord> parse_messages(std::istream& in) {
  std::vector<MessageRecord> out;
  std::unordered_set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": malformed record: " + e.what());
    }
    MessageRecord rec;
    try {
      rec.message_id = j.at("message_id").get<std::string>();
      rec.text = j.at("text").get<std::string>();
      rec.user_id = j.at("user_id").get<std::string>();
      rec.timestamp = parse_iso8601(j.at("timestamp").get<std::string>());
      if (j.contains("mentioned_users"))
        rec.mentioned_users = j["mentioned_users"].get<std::vector<std::string>>();
      if (j.contains("retweeted_user") && !j["retweeted_user"].is_null())
        rec.retweeted_user = j["retweeted_user"].get<std::string>();
      if (j.contains("location") && !j["location"].is_null())
        rec.location = j["location"].get<std::string>();
      if (j.contains("event_label") && !j["event_label"].is_null()) {
        int lbl = j["event_label"].get<int>();
        if (lbl < 0) throw std::runtime_error("event_label must be nonnegative");
        rec.event_label = lbl;
      }
    } catch (const json::exception& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!seen.insert(rec.message_id).second)
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": duplicate message_id: " + rec.message_id);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<MessageRecord> load_messages(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  try {
    return parse_messages(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

TokenEmbeddingTable TokenEmbeddingTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding table: " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error(path + ": empty embedding table");
  int dim = 0;
  if (std::sscanf(header.c_str(), "dimension %d", &dim) != 1 || dim <= 0)
    throw std::runtime_error(path + ": bad header, expected 'dimension <d>'");
  TokenEmbeddingTable t(dim);
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string token;
    if (!std::getline(ls, token, '\t'))
      throw std::runtime_error(path + ": line " + std::to_string(lineno) + ": missing token");
    std::vector<double> vec;
    vec.reserve(dim);
    double v;
    while (ls >> v) vec.push_back(v);
    if (int(vec.size()) != dim)
      throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                               ": expected " + std::to_string(dim) + " values");
    t.insert(token, std::move(vec));
  }
  return t;
}

void TokenEmbeddingTable::insert(const std::string& token, std::vector<double> vec) {
  if (int(vec.size()) != dim_)
    throw std::invalid_argument("embedding dimension mismatch for token: " + token);
  table_[token] = std::move(vec);
}

const std::vector<double>* TokenEmbeddingTable::find(const std::string& token) const {
  auto it = table_.find(token);
  return it == table_.end() ? nullptr : &it->second;
}

int MessageGraph::num_classes() const {
  int c = 0;
  for (int l : labels) c = std::max(c, l + 1);
  return c;
}

std::pair<double, double> time_encode(std::int64_t ts, std::int64_t dataset_min,
                                      std::int64_t dataset_max) {
  if (ts < dataset_min || ts > dataset_max)
    throw std::invalid_argument("time_encode: timestamp outside dataset range");
  auto day_of = [](std::int64_t t) {
    // floor division, days since epoch
    return t >= 0 ? t / 86400 : (t - 86399) / 86400;
  };
  const std::int64_t d0 = day_of(dataset_min), d1 = day_of(dataset_max), d = day_of(ts);
  const double day_frac = d1 == d0 ? 0.0 : double(d - d0) / double(d1 - d0);
  const double sec_of_day = double(ts - d * 86400) / 86400.0;
  return {day_frac, sec_of_day};
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char ch : text) {
    if (std::isalnum(ch)) {
      cur.push_back(char(std::tolower(ch)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<double> hash_fallback_embedding(const std::string& token, int dim) {
  // FNV-1a seeds a per-token generator; seed-free and reproducible.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : token) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::mt19937_64 rng(h);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(dim);
  double norm = 0.0;
  for (double& x : v) {
    x = gauss(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (double& x : v) x /= norm;
  return v;
}

std::vector<double> embed_message(const MessageRecord& rec, const TokenEmbeddingTable& table,
                                  std::int64_t min_ts, std::int64_t max_ts) {
  const int d = table.dimension();
  std::vector<double> feat(std::size_t(d) + 2, 0.0);
  const auto tokens = tokenize(rec.text);
  if (!tokens.empty()) {
    for (const auto& tok : tokens) {
      const std::vector<double>* vec = table.find(tok);
      std::vector<double> fb;
      if (!vec) {
        fb = hash_fallback_embedding(tok, d);
        vec = &fb;
      }
      for (int i = 0; i < d; ++i) feat[i] += (*vec)[i];
    }
    for (int i = 0; i < d; ++i) feat[i] /= double(tokens.size());
  }
  const auto [day_frac, sec_frac] = time_encode(rec.timestamp, min_ts, max_ts);
  feat[d] = day_frac;
  feat[d + 1] = sec_frac;
  return feat;
}

MessageGraph build_message_graph(const std::vector<MessageRecord>& records,
                                 const TokenEmbeddingTable& table) {
  if (records.empty()) throw std::invalid_argument("build_message_graph: no records");
  const std::size_t labeled =
      std::size_t(std::count_if(records.begin(), records.end(),
                                [](const MessageRecord& r) { return r.event_label.has_value(); }));
  if (labeled != 0 && labeled != records.size())
    throw std::invalid_argument("build_message_graph: mixed labeled/unlabeled records");

  std::int64_t min_ts = records[0].timestamp, max_ts = records[0].timestamp;
  for (const auto& r : records) {
    min_ts = std::min(min_ts, r.timestamp);
    max_ts = std::max(max_ts, r.timestamp);
  }

  MessageGraph g;
  g.num_nodes = int(records.size());
  g.feature_dim = table.dimension() + 2;
  g.features.reserve(std::size_t(g.num_nodes) * g.feature_dim);
  for (const auto& r : records) {
    const auto feat = embed_message(r, table, min_ts, max_ts);
    g.features.insert(g.features.end(), feat.begin(), feat.end());
    g.node_ids.push_back(r.message_id);
  }

  // Edge iff two messages share an associated user.
  std::unordered_map<std::string, std::vector<int>> user_to_nodes;
  for (int i = 0; i < g.num_nodes; ++i) {
    std::set<std::string> users;
    users.insert(records[i].user_id);
    users.insert(records[i].mentioned_users.begin(), records[i].mentioned_users.end());
    if (records[i].retweeted_user) users.insert(*records[i].retweeted_user);
    for (const auto& u : users) user_to_nodes[u].push_back(i);
  }
  std::set<std::pair<int, int>> edges;
  for (const auto& [user, nodes] : user_to_nodes)
    for (std::size_t a = 0; a < nodes.size(); ++a)
      for (std::size_t b = a + 1; b < nodes.size(); ++b)
        edges.insert({nodes[a], nodes[b]});
  g.edges.assign(edges.begin(), edges.end());

  if (labeled) {
    // Class ids remapped to dense 0..C-1 in order of first appearance by value.
    std::set<int> raw;
    for (const auto& r : records) raw.insert(*r.event_label);
    std::unordered_map<int, int> remap;
    for (int v : raw) remap.emplace(v, int(remap.size()));
    for (const auto& r : records) g.labels.push_back(remap.at(*r.event_label));
  }
  return g;
}

Split split_dataset(int n, double train, double test, double val, std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("split_dataset: n must be positive");
  if (std::abs(train + test + val - 1.0) > 1e-9)
    throw std::invalid_argument("split_dataset: fractions must sum to 1");
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const int n_train = int(std::floor(n * train));
  const int n_test = int(std::floor(n * test));
  Split s;
  s.train.assign(idx.begin(), idx.begin() + n_train);
  s.test.assign(idx.begin() + n_train, idx.begin() + n_train + n_test);
  s.val.assign(idx.begin() + n_train + n_test, idx.end());
  return s;
}

std::string graph_to_json(const MessageGraph& g) {
  json j;
  j["num_nodes"] = g.num_nodes;
  j["feature_dim"] = g.feature_dim;
  j["features"] = g.features;
  json edges = json::array();
  for (const auto& [a, b] : g.edges) edges.push_back({a, b});
  j["edges"] = std::move(edges);
  j["labels"] = g.labels.empty() ? json(nullptr) : json(g.labels);
  j["node_ids"] = g.node_ids;
  return j.dump();
}

MessageGraph graph_from_json(const std::string& text) {
  json j = json::parse(text);
  MessageGraph g;
  g.num_nodes = j.at("num_nodes").get<int>();
  g.feature_dim = j.at("feature_dim").get<int>();
  g.features = j.at("features").get<std::vector<double>>();
  if (g.features.size() != std::size_t(g.num_nodes) * g.feature_dim)
    throw std::runtime_error("graph file: feature matrix size mismatch");
  for (const auto& e : j.at("edges")) {
    const int a = e.at(0).get<int>(), b = e.at(1).get<int>();
    if (a < 0 || b < 0 || a >= g.num_nodes || b >= g.num_nodes || a >= b)
      throw std::runtime_error("graph file: invalid edge");
    g.edges.emplace_back(a, b);
  }
  if (!j.at("labels").is_null()) g.labels = j["labels"].get<std::vector<int>>();
  g.node_ids = j.at("node_ids").get<std::vector<std::string>>();
  return g;
}

void save_graph(const MessageGraph& g, const std::string& path) {
  write_file_atomic(path, graph_to_json(g));
}

MessageGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return graph_from_json(buf.str());
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + tmp);
    out << contents;
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed: " + path);
}

}  // namespace hsed::ingest

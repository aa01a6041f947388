// SPDX-License-Identifier: Apache-2.0
#include "hetnas/errors.hpp"
#include "hetnas/graph/graph.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace hetnas::graph {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Whitespace tokenizer over a whole file that tracks line numbers.
class Scanner {
 public:
  Scanner(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  bool next_token(std::string_view& tok) {
    skip_space();
    if (pos_ >= text_.size()) return false;
    const auto start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    tok = text_.substr(start, pos_ - start);
    return true;
  }

  template <typename T>
  T parse(std::string_view what) {
    std::string_view tok;
    if (!next_token(tok)) {
      throw DataError(file_ + ": unexpected end of file while reading " + std::string(what));
    }
    T value{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw DataError(file_ + ":" + std::to_string(line_) + ": cannot parse '" + std::string(tok) +
                      "' as " + std::string(what));
    }
    return value;
  }

  std::size_t line() const { return line_; }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ','; }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (is_space(c)) {
        if (c == '\n') ++line_;
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::vector<Graph::Edge> read_edges(const fs::path& path) {
  const std::string text = read_file(path);
  std::vector<Graph::Edge> edges;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    Scanner sc(line, path.string() + ":" + std::to_string(line_no));
    std::string_view probe;
    Scanner peek(line, "");
    if (!peek.next_token(probe)) continue;
    const auto u = sc.parse<std::int64_t>("source node");
    const auto v = sc.parse<std::int64_t>("target node");
    if (u < 0 || v < 0 || u > INT32_MAX || v > INT32_MAX) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": node index out of range");
    }
    if (sc.next_token(probe)) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected exactly two node ids per line");
    }
    edges.push_back({static_cast<std::int32_t>(u), static_cast<std::int32_t>(v)});
  }
  return edges;
}

Matrix read_features(const fs::path& path) {
  const std::string text = read_file(path);
  Scanner sc(text, path.string());
  const auto n = sc.parse<std::int64_t>("node count");
  const auto f = sc.parse<std::int64_t>("feature count");
  if (n < 0 || f < 0) {
    throw DataError(path.string() + ": negative header dimensions");
  }
  Matrix x(n, f);
  for (std::int64_t r = 0; r < n; ++r) {
    for (std::int64_t c = 0; c < f; ++c) x(r, c) = sc.parse<double>("feature value");
  }
  std::string_view extra;
  if (sc.next_token(extra)) {
    throw DataError(path.string() + ": more values than the header's " + std::to_string(n) + "x" +
                    std::to_string(f));
  }
  return x;
}

std::vector<int> read_labels(const fs::path& path) {
  const std::string text = read_file(path);
  Scanner sc(text, path.string());
  std::vector<int> labels;
  std::string_view tok;
  Scanner peek(text, "");
  while (peek.next_token(tok)) labels.push_back(sc.parse<int>("class label"));
  return labels;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << contents;
  if (!out) throw DataError("failed writing " + path.string());
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

Graph load_dataset(const fs::path& dir, const LoadOptions& options) {
  for (const char* required : {"edges.txt", "features.txt", "labels.txt"}) {
    if (!fs::exists(dir / required)) {
      throw DataError("dataset bundle " + dir.string() + " is missing " + required);
    }
  }
  bool directed = false;
  std::string name = dir.filename().string();
  if (name.empty()) name = dir.parent_path().filename().string();
  if (fs::exists(dir / "meta.json")) {
    nlohmann::json meta;
    try {
      meta = nlohmann::json::parse(read_file(dir / "meta.json"));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("meta.json: " + std::string(e.what()));
    }
    directed = meta.value("directed", false);
    name = meta.value("name", name);
  }
  if (options.force_symmetric) directed = false;

  auto edges = read_edges(dir / "edges.txt");
  Matrix features = read_features(dir / "features.txt");
  auto labels = read_labels(dir / "labels.txt");
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DataError("feature row count " + std::to_string(features.rows()) +
                    " differs from label count " + std::to_string(labels.size()));
  }
  const std::size_t n = labels.size();
  Graph g = Graph::build(name, n, edges, std::move(features), std::move(labels), directed);
  if (options.row_normalize_features) g = g.row_normalized();
  return g;
}

void save_dataset(const Graph& g, const fs::path& dir) {
  fs::create_directories(dir);
  std::string edges;
  const auto& adj = g.adjacency();
  for (std::size_t u = 0; u < g.num_nodes(); ++u) {
    for (auto k = adj.offsets()[u]; k < adj.offsets()[u + 1]; ++k) {
      const auto v = adj.indices()[k];
      if (g.directed() || static_cast<std::int64_t>(u) < v) {
        edges += std::to_string(u) + " " + std::to_string(v) + "\n";
      }
    }
  }
  write_file(dir / "edges.txt", edges);

  std::string feats = std::to_string(g.num_nodes()) + " " + std::to_string(g.num_features()) + "\n";
  const Matrix& x = g.features();
  for (diff::Index r = 0; r < x.rows(); ++r) {
    for (diff::Index c = 0; c < x.cols(); ++c) {
      if (c > 0) feats += ' ';
      append_double(feats, x(r, c));
    }
    feats += '\n';
  }
  write_file(dir / "features.txt", feats);

  std::string labels;
  for (int y : g.labels()) labels += std::to_string(y) + "\n";
  write_file(dir / "labels.txt", labels);

  nlohmann::json meta = {{"name", g.name()}, {"directed", g.directed()}};
  write_file(dir / "meta.json", meta.dump(2) + "\n");
}

}  // namespace hetnas::graph

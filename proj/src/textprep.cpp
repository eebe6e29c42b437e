#include "fstglm/textprep.hpp"

#include "fstglm/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace fstglm {
namespace {

double entropy_bits(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

void Corpus::validate() const {
  std::set<std::string> ids;
  const std::set<std::string> cats(categories.begin(), categories.end());
  for (const auto& d : documents) {
    if (!ids.insert(d.id).second) fail(Errc::parse, "duplicate document id '" + d.id + "'");
    for (const auto& l : d.labels)
      if (!cats.count(l)) fail(Errc::parse, "document '" + d.id + "' has unknown label '" + l + "'");
  }
}

std::string unescape_field(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i] != '\\' || i + 1 == field.size()) {
      out.push_back(field[i]);
      continue;
    }
    const char c = field[++i];
    switch (c) {
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case '\\': out.push_back('\\'); break;
      default:
        out.push_back('\\');
        out.push_back(c);
    }
  }
  return out;
}

std::string escape_field(std::string_view field) {
  std::string out;
  for (char c : field) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\\': out += "\\\\"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  std::set<std::string> cats;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      fail(Errc::parse, "corpus line " + std::to_string(line_no) + ": expected 3 tab-separated fields, found " +
                            std::to_string(fields.size()));
    }
    Document doc;
    doc.id = unescape_field(fields[0]);
    if (doc.id.empty()) fail(Errc::parse, "corpus line " + std::to_string(line_no) + ": empty document id");
    if (!fields[1].empty()) {
      for (auto& l : split(fields[1], ',')) {
        if (l.empty()) fail(Errc::parse, "corpus line " + std::to_string(line_no) + ": empty label");
        cats.insert(l);
        doc.labels.push_back(std::move(l));
      }
    }
    doc.text = unescape_field(fields[2]);
    corpus.documents.push_back(std::move(doc));
  }
  corpus.categories.assign(cats.begin(), cats.end());
  corpus.validate();
  return corpus;
}

Corpus read_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open corpus '" + path + "'");
  try {
    return parse_corpus(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& d : corpus.documents) {
    out << escape_field(d.id) << '\t';
    for (std::size_t k = 0; k < d.labels.size(); ++k) out << (k ? "," : "") << d.labels[k];
    out << '\t' << escape_field(d.text) << '\n';
  }
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      cur.push_back(static_cast<char>(c | 0x20));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

Stoplist::Stoplist(std::vector<std::string> entries) : entries_(std::move(entries)) {
  words_.insert(entries_.begin(), entries_.end());
}

Stoplist Stoplist::parse(std::istream& in) {
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::transform(line.begin(), line.end(), line.begin(), [](unsigned char c) { return std::tolower(c); });
    entries.push_back(line);
  }
  return Stoplist(std::move(entries));
}

Stoplist Stoplist::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open stoplist '" + path + "'");
  return parse(in);
}

std::vector<std::string> apply_stoplist(const std::vector<std::string>& tokens, const Stoplist& stoplist) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens)
    if (!stoplist.contains(t)) out.push_back(t);
  return out;
}

double information_gain(const Contingency& c, long n_docs) {
  if (n_docs <= 0) fail(Errc::invalid_argument, "information gain needs at least one document");
  if (c.present_pos < 0 || c.present_neg < 0 || c.absent_pos < 0 || c.absent_neg < 0 || c.total() != n_docs)
    fail(Errc::invalid_argument, "contingency cells must be non-negative and sum to n_docs");
  const double n = static_cast<double>(n_docs);
  const double present = static_cast<double>(c.present_pos + c.present_neg);
  const double absent = n - present;
  const double pos = static_cast<double>(c.present_pos + c.absent_pos);

  double ig = entropy_bits(pos / n);
  if (present > 0.0) ig -= (present / n) * entropy_bits(static_cast<double>(c.present_pos) / present);
  if (absent > 0.0) ig -= (absent / n) * entropy_bits(static_cast<double>(c.absent_pos) / absent);
  // Rounding can leave a tiny negative value for independent cells.
  return std::clamp(ig, 0.0, 1.0);
}

Vocabulary select_top_k(const std::map<std::string, double>& scores, std::size_t k) {
  if (k < 1) fail(Errc::invalid_argument, "top-k needs k >= 1");
  std::vector<std::pair<std::string, double>> items(scores.begin(), scores.end());
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary v;
  v.truncated = items.size() < k;
  const std::size_t take = std::min(k, items.size());
  for (std::size_t i = 0; i < take; ++i) {
    v.words.push_back(items[i].first);
    v.scores.push_back(items[i].second);
  }
  return v;
}

Eigen::VectorXd featurize(const std::vector<std::string>& doc_tokens, const Vocabulary& vocab) {
  if (vocab.words.empty()) fail(Errc::invalid_argument, "vocabulary is empty");
  const std::set<std::string> present(doc_tokens.begin(), doc_tokens.end());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocab.size()));
  for (std::size_t j = 0; j < vocab.size(); ++j)
    if (present.count(vocab.words[j])) x[static_cast<Eigen::Index>(j)] = 1.0;
  return x;
}

WordSet document_words(const std::string& text, const Stoplist& stoplist) {
  const auto toks = apply_stoplist(tokenize(text), stoplist);
  return WordSet(toks.begin(), toks.end());
}

std::map<std::string, double> score_words(const std::vector<WordSet>& docs, const std::vector<bool>& positive) {
  if (docs.size() != positive.size()) fail(Errc::invalid_argument, "document and label counts differ");
  const long n = static_cast<long>(docs.size());
  const long n_pos = std::count(positive.begin(), positive.end(), true);

  std::map<std::string, std::pair<long, long>> seen;  // word -> (present_pos, present_neg)
  for (std::size_t i = 0; i < docs.size(); ++i)
    for (const auto& w : docs[i]) (positive[i] ? seen[w].first : seen[w].second) += 1;

  std::map<std::string, double> scores;
  for (const auto& [word, pn] : seen) {
    Contingency c;
    c.present_pos = pn.first;
    c.present_neg = pn.second;
    c.absent_pos = n_pos - pn.first;
    c.absent_neg = (n - n_pos) - pn.second;
    scores.emplace(word, information_gain(c, n));
  }
  return scores;
}

Eigen::MatrixXd feature_matrix(const std::vector<WordSet>& docs, const Vocabulary& vocab) {
  if (vocab.words.empty()) fail(Errc::invalid_argument, "vocabulary is empty");
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(docs.size()),
                                            static_cast<Eigen::Index>(vocab.size()));
  for (std::size_t i = 0; i < docs.size(); ++i)
    for (std::size_t j = 0; j < vocab.size(); ++j)
      if (docs[i].count(vocab.words[j])) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  return X;
}

}  // namespace fstglm

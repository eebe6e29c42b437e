#pragma once

// Corpus ingestion and the bag-of-words feature pipeline: tokenisation,
// stoplist filtering, information-gain ranking and binary featurisation.

#include <Eigen/Dense>

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace fstglm {

struct Document {
  std::string id;
  std::string text;
  std::vector<std::string> labels;
};

struct Corpus {
  std::vector<Document> documents;
  std::vector<std::string> categories;  // sorted, unique

  void validate() const;
};

// Corpus format: one document per line,
//   <doc_id> TAB <label,label,...> TAB <text>
// The label field may be empty. In doc_id and text the escapes \t, \n and \\
// stand for a tab, a newline and a backslash. Blank lines and lines starting
// with '#' are skipped.
Corpus parse_corpus(std::istream& in);
Corpus read_corpus(const std::string& path);
void write_corpus(const Corpus& corpus, std::ostream& out);
std::string unescape_field(std::string_view field);
std::string escape_field(std::string_view field);

/// Lower-cased maximal runs of ASCII letters, in order.
std::vector<std::string> tokenize(std::string_view text);

/// Stop words, one per line. size() counts lines read (duplicates included).
class Stoplist {
 public:
  Stoplist() = default;
  explicit Stoplist(std::vector<std::string> entries);
  static Stoplist load(const std::string& path);
  static Stoplist parse(std::istream& in);

  bool contains(const std::string& word) const { return words_.count(word) != 0; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t distinct() const noexcept { return words_.size(); }

 private:
  std::vector<std::string> entries_;
  std::unordered_set<std::string> words_;
};

std::vector<std::string> apply_stoplist(const std::vector<std::string>& tokens, const Stoplist& stoplist);

/// Presence/absence by class for one word over a document set.
struct Contingency {
  long present_pos = 0;
  long present_neg = 0;
  long absent_pos = 0;
  long absent_neg = 0;

  long total() const noexcept { return present_pos + present_neg + absent_pos + absent_neg; }
};

/// IG(w; c) = H(c) - P(w) H(c | w) - P(not w) H(c | not w), in bits.
double information_gain(const Contingency& counts, long n_docs);

struct Vocabulary {
  std::vector<std::string> words;
  std::vector<double> scores;
  bool truncated = false;  // fewer candidates than requested

  std::size_t size() const noexcept { return words.size(); }
};

/// Highest scores first; equal scores ordered lexicographically by word.
Vocabulary select_top_k(const std::map<std::string, double>& scores, std::size_t k = 100);

/// Binary presence vector in vocabulary order.
Eigen::VectorXd featurize(const std::vector<std::string>& doc_tokens, const Vocabulary& vocab);

/// Distinct stoplist-filtered tokens of one document.
using WordSet = std::set<std::string>;
WordSet document_words(const std::string& text, const Stoplist& stoplist);

/// Information gain of every word occurring in `docs` for the binary labels.
std::map<std::string, double> score_words(const std::vector<WordSet>& docs, const std::vector<bool>& positive);

/// One row per document of binary presence features.
Eigen::MatrixXd feature_matrix(const std::vector<WordSet>& docs, const Vocabulary& vocab);

}  // namespace fstglm

#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfnet {

/// Thrown when a request would enumerate more words than a configured cap.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultWordCap = std::size_t{1} << 20;

/// Multi-index (i1, ..., ik) over channels 1..m. Ordered length-lexicographically.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {}
  Word(std::initializer_list<int> letters) : letters_(letters) {}

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  int operator[](std::size_t i) const { return letters_[i]; }
  int back() const { return letters_.back(); }
  std::span<const int> letters() const { return letters_; }

  Word append(int channel) const;
  /// Drops the last letter.
  Word prefix() const;
  Word reversed() const;

  /// Throws std::invalid_argument unless every letter lies in 1..m.
  void check_channels(int m) const;

  std::string to_string() const;

  friend bool operator==(const Word&, const Word&) = default;
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);

 private:
  std::vector<int> letters_;
};

/// m^k, saturating at SIZE_MAX.
std::size_t word_count(int m, int k);
/// Number of words with length <= K, saturating.
std::size_t words_up_to_count(int m, int K);
void check_word_budget(std::size_t count, std::size_t cap, const std::string& what);

/// All words of length k, lexicographic.
std::vector<Word> words_of_length(int m, int k);
/// All words of length <= K, length-lexicographic.
std::vector<Word> words_up_to(int m, int K);
/// Position of w in words_up_to(m, |w|).
std::size_t length_lex_index(const Word& w, int m);

}  // namespace cfnet

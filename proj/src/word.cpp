#include "cfnet/word.hpp"

#include <algorithm>
#include <limits>

namespace cfnet {

Word Word::append(int channel) const {
  Word w = *this;
  w.letters_.push_back(channel);
  return w;
}

Word Word::prefix() const {
  if (letters_.empty()) throw std::logic_error("Word::prefix of the empty word");
  return Word(std::vector<int>(letters_.begin(), letters_.end() - 1));
}

Word Word::reversed() const { return Word(std::vector<int>(letters_.rbegin(), letters_.rend())); }

void Word::check_channels(int m) const {
  for (int c : letters_) {
    if (c < 1 || c > m) {
      throw std::invalid_argument("word " + to_string() + " uses channel outside 1.." + std::to_string(m));
    }
  }
}

std::string Word::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(letters_[i]);
  }
  return s + ")";
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.letters_.begin(), a.letters_.end(), b.letters_.begin(),
                                                b.letters_.end());
}

std::size_t word_count(int m, int k) {
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  std::size_t total = 1;
  for (int i = 0; i < k; ++i) {
    if (total > kMax / static_cast<std::size_t>(m)) return kMax;
    total *= static_cast<std::size_t>(m);
  }
  return total;
}

std::size_t words_up_to_count(int m, int K) {
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  std::size_t total = 0;
  for (int k = 0; k <= K; ++k) {
    const std::size_t c = word_count(m, k);
    if (c == kMax || total > kMax - c) return kMax;
    total += c;
  }
  return total;
}

void check_word_budget(std::size_t count, std::size_t cap, const std::string& what) {
  if (count > cap) {
    throw ResourceLimitError(what + " needs " +
                             (count == std::numeric_limits<std::size_t>::max() ? std::string("too many")
                                                                               : std::to_string(count)) +
                             " words, above the cap of " + std::to_string(cap) +
                             "; use a closed-form bound or lower the order");
  }
}

std::vector<Word> words_of_length(int m, int k) {
  if (m < 1 || k < 0) throw std::invalid_argument("words_of_length: need m >= 1, k >= 0");
  std::vector<Word> out;
  out.reserve(word_count(m, k));
  std::vector<int> cur(static_cast<std::size_t>(k), 1);
  for (;;) {
    out.emplace_back(cur);
    int pos = k - 1;
    while (pos >= 0 && cur[pos] == m) {
      cur[pos] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++cur[pos];
  }
  return out;
}

std::vector<Word> words_up_to(int m, int K) {
  std::vector<Word> out;
  for (int k = 0; k <= K; ++k) {
    auto level = words_of_length(m, k);
    out.insert(out.end(), std::make_move_iterator(level.begin()), std::make_move_iterator(level.end()));
  }
  return out;
}

std::size_t length_lex_index(const Word& w, int m) {
  const int k = static_cast<int>(w.size());
  std::size_t offset = words_up_to_count(m, k - 1);
  if (k == 0) offset = 0;
  std::size_t rank = 0;
  for (int c : w.letters()) rank = rank * static_cast<std::size_t>(m) + static_cast<std::size_t>(c - 1);
  return offset + rank;
}

}  // namespace cfnet

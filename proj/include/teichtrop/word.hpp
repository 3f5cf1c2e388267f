#pragma once

// Words in the standard presentation of a closed surface group
//   < a1, b1, ..., ag, bg | [a1,b1] ... [ag,bg] >
// and the finite word families used as trace coordinates.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "teichtrop/error.hpp"

namespace teichtrop {

struct Letter {
  int generator = 0;  // 0-based: a1 = 0, b1 = 1, a2 = 2, b2 = 3, ...
  bool inverted = false;

  Letter inverse() const { return {generator, !inverted}; }

  /// Position in the enumeration order a1, A1, b1, B1, a2, ...
  int order() const { return 2 * generator + (inverted ? 1 : 0); }

  friend bool operator==(const Letter&, const Letter&) = default;
  friend auto operator<=>(const Letter& x, const Letter& y) { return x.order() <=> y.order(); }
};

inline bool cancels(const Letter& x, const Letter& y) {
  return x.generator == y.generator && x.inverted != y.inverted;
}

class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  static Word generator(int index, bool inverted = false) { return Word({Letter{index, inverted}}); }

  /// Parses the ASCII form "a1B1a2" (uppercase = inverse). "" and "1" are the identity.
  static Word parse(std::string_view text) {
    std::vector<Letter> letters;
    if (text == "1") return Word{};
    std::size_t i = 0;
    while (i < text.size()) {
      char c = text[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (lower != 'a' && lower != 'b')
        throw Error(ErrorCode::ParseError, "bad letter '" + std::string(1, c) + "' in word '" + std::string(text) + "'");
      std::size_t j = i + 1;
      int index = 0;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
        index = index * 10 + (text[j] - '0');
        ++j;
      }
      if (j == i + 1 || index < 1)
        throw Error(ErrorCode::ParseError, "missing generator index in word '" + std::string(text) + "'");
      letters.push_back({2 * (index - 1) + (lower == 'b' ? 1 : 0), c != lower});
      i = j;
    }
    return Word(std::move(letters));
  }

  std::string to_string() const {
    std::string out;
    for (const Letter& l : letters_) {
      char c = (l.generator % 2 == 0) ? 'a' : 'b';
      if (l.inverted) c = static_cast<char>(std::toupper(c));
      out += c;
      out += std::to_string(l.generator / 2 + 1);
    }
    return out;
  }

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  const Letter& operator[](std::size_t i) const { return letters_[i]; }

  Word inverse() const {
    std::vector<Letter> out;
    out.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) out.push_back(it->inverse());
    return Word(std::move(out));
  }

  /// Concatenation without reduction.
  friend Word operator*(const Word& x, const Word& y) {
    std::vector<Letter> out = x.letters_;
    out.insert(out.end(), y.letters_.begin(), y.letters_.end());
    return Word(std::move(out));
  }

  Word power(int k) const {
    Word base = k >= 0 ? *this : inverse();
    std::vector<Letter> out;
    for (int i = 0; i < std::abs(k); ++i) out.insert(out.end(), base.letters_.begin(), base.letters_.end());
    return Word(std::move(out));
  }

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word& x, const Word& y) {
    return std::lexicographical_compare_three_way(x.letters_.begin(), x.letters_.end(), y.letters_.begin(),
                                                  y.letters_.end());
  }

 private:
  std::vector<Letter> letters_;
};

/// Free reduction: removes adjacent letter/inverse pairs until none remain.
inline Word reduce(const Word& word) {
  std::vector<Letter> stack;
  stack.reserve(word.size());
  for (const Letter& l : word.letters()) {
    if (!stack.empty() && cancels(stack.back(), l))
      stack.pop_back();
    else
      stack.push_back(l);
  }
  return Word(std::move(stack));
}

inline bool is_reduced(const Word& word) {
  for (std::size_t i = 1; i < word.size(); ++i)
    if (cancels(word[i - 1], word[i])) return false;
  return true;
}

/// Free reduction followed by removal of cancelling first/last letter pairs.
/// The result is conjugate to the input.
inline Word cyclic_reduce(const Word& word) {
  Word w = reduce(word);
  std::size_t lo = 0, hi = w.size();
  while (hi - lo >= 2 && cancels(w[lo], w[hi - 1])) {
    ++lo;
    --hi;
  }
  return Word(std::vector<Letter>(w.letters().begin() + static_cast<std::ptrdiff_t>(lo),
                                  w.letters().begin() + static_cast<std::ptrdiff_t>(hi)));
}

inline bool is_cyclically_reduced(const Word& word) {
  return is_reduced(word) && (word.size() < 2 || !cancels(word[0], word[word.size() - 1]));
}

/// Writes a cyclic word as root^power with the shortest possible root.
inline std::pair<Word, int> primitive_root(const Word& word) {
  const std::size_t n = word.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = word[i] == word[i - p];
    if (periodic)
      return {Word(std::vector<Letter>(word.letters().begin(), word.letters().begin() + static_cast<std::ptrdiff_t>(p))),
              static_cast<int>(n / p)};
  }
  return {word, 1};
}

/// Applies the substitution generator i -> images[i] and freely reduces.
inline Word substitute(const Word& word, const std::vector<Word>& images) {
  std::vector<Letter> out;
  for (const Letter& l : word.letters()) {
    const Word& img = images.at(static_cast<std::size_t>(l.generator));
    if (l.inverted) {
      for (auto it = img.letters().rbegin(); it != img.letters().rend(); ++it) out.push_back(it->inverse());
    } else {
      out.insert(out.end(), img.letters().begin(), img.letters().end());
    }
  }
  return reduce(Word(std::move(out)));
}

/// Rotation- and inversion-invariant key of a letter sequence (minimum over the orbit).
inline std::vector<int> cyclic_class_key(const Word& word) {
  std::vector<int> best;
  auto consider = [&best](const Word& w) {
    const std::size_t n = w.size();
    std::vector<int> codes(n);
    for (std::size_t i = 0; i < n; ++i) codes[i] = w[i].order();
    for (std::size_t r = 0; r < n; ++r) {
      std::vector<int> rot(n);
      for (std::size_t i = 0; i < n; ++i) rot[i] = codes[(i + r) % n];
      if (best.empty() || rot < best) best = std::move(rot);
    }
  };
  consider(word);
  consider(word.inverse());
  return best;
}

class SurfaceGroup {
 public:
  explicit SurfaceGroup(int genus) : genus_(genus) {
    if (genus < 2) throw Error(ErrorCode::UnsupportedGenus, "surface group needs genus >= 2");
  }

  int genus() const { return genus_; }
  int generator_count() const { return 2 * genus_; }
  /// Complex dimension of the SL(2,C) character variety, -3 chi(S).
  int dim_complex() const { return 6 * genus_ - 6; }

  std::string generator_name(int index) const { return Word::generator(index).to_string(); }

  /// [a1,b1] ... [ag,bg] with [x,y] = x y x^-1 y^-1.
  Word relator() const {
    std::vector<Letter> out;
    for (int k = 0; k < genus_; ++k) {
      out.push_back({2 * k, false});
      out.push_back({2 * k + 1, false});
      out.push_back({2 * k, true});
      out.push_back({2 * k + 1, true});
    }
    return Word(std::move(out));
  }

  friend bool operator==(const SurfaceGroup&, const SurfaceGroup&) = default;

 private:
  int genus_;
};

struct EmbeddingSetOptions {
  bool include_inverse_letters = true;
  /// Identify words related by inversion or cyclic permutation (equal traces).
  bool dedup = true;
};

/// All nonempty freely reduced words of length <= n. With dedup, one representative
/// (the first in enumeration order) is kept per inversion/rotation orbit.
/// n <= 0 selects the default 2g.
inline std::vector<Word> embedding_set(const SurfaceGroup& group, int n = 0, EmbeddingSetOptions options = {}) {
  if (n <= 0) n = group.generator_count();
  std::vector<Letter> alphabet;
  for (int g = 0; g < group.generator_count(); ++g) {
    alphabet.push_back({g, false});
    if (options.include_inverse_letters) alphabet.push_back({g, true});
  }

  std::vector<Word> out;
  std::set<std::vector<int>> seen;
  std::vector<Word> frontier{Word{}};
  for (int len = 1; len <= n; ++len) {
    std::vector<Word> next;
    for (const Word& prefix : frontier) {
      for (const Letter& l : alphabet) {
        if (!prefix.empty() && cancels(prefix[prefix.size() - 1], l)) continue;
        Word w = prefix * Word({l});
        next.push_back(w);
        if (!options.dedup || seen.insert(cyclic_class_key(w)).second) out.push_back(std::move(w));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

inline std::string to_text(const std::vector<Word>& words) {
  std::string out;
  for (const Word& w : words) out += w.to_string() + "\n";
  return out;
}

}  // namespace teichtrop

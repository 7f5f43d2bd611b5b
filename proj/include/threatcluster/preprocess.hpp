#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "threatcluster/corpus.hpp"
#include "threatcluster/stemmer.hpp"
#include "threatcluster/stopwords.hpp"

namespace tc {

using TokenList = std::vector<std::string>;

namespace detail {

// Decodes one UTF-8 scalar starting at text[i]; advances i. Invalid
// sequences decode as U+FFFD and consume one byte.
inline char32_t next_codepoint(std::string_view text, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  std::size_t len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3
                                     : (b0 >> 3) == 0x1E ? 4 : 0;
  if (len == 0 || i + len > text.size()) {
    ++i;
    return 0xFFFD;
  }
  char32_t cp = len == 1 ? b0 : b0 & (0x7F >> len);
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(text[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// ASCII letters and digits are word characters. Non-ASCII code points are
// word characters unless they fall in a punctuation, symbol, space or
// private-use block.
inline bool is_word_char(char32_t cp) {
  if (cp < 0x80)
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= '0' && cp <= '9');
  if (cp <= 0xBF || cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp >= 0xE000 && cp <= 0xF8FF) return false;
  if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
  if (cp == 0xFEFF || cp == 0xFFFD) return false;
  if ((cp >= 0xFF00 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) ||
      (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65))
    return false;
  if (cp >= 0x1F000) return false;
  return true;
}

// ASCII and Latin-1 uppercase only.
inline char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  return cp;
}

}  // namespace detail

/// Lowercases and splits on every non-word character. "CVE-2023-4966"
/// becomes [cve, 2023, 4966].
inline TokenList tokenize(std::string_view text) {
  TokenList tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = detail::next_codepoint(text, i);
    if (detail::is_word_char(cp)) {
      detail::append_utf8(current, detail::to_lower(cp));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

inline TokenList remove_stopwords(const TokenList& tokens,
                                  const StopList& stoplist) {
  TokenList kept;
  kept.reserve(tokens.size());
  for (const auto& t : tokens)
    if (!stoplist.count(t)) kept.push_back(t);
  return kept;
}

inline TokenList stem(const TokenList& tokens) {
  static const EnglishStemmer stemmer;
  TokenList out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(stemmer(t));
  return out;
}

/// tokenize -> remove_stopwords -> stem.
inline TokenList preprocess(std::string_view text, const StopList& stoplist) {
  return stem(remove_stopwords(tokenize(text), stoplist));
}

inline TokenList preprocess(const Document& doc, const StopList& stoplist) {
  return preprocess(doc.text, stoplist);
}

/// All contiguous k-grams for k = 1..n_max, space-joined, ordered by k and
/// then by position.
inline std::vector<std::string> ngrams(const TokenList& tokens, int n_max) {
  if (n_max < 1 || n_max > 3)
    throw std::invalid_argument("ngram order must be 1, 2 or 3");
  std::vector<std::string> terms;
  for (int k = 1; k <= n_max; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    if (tokens.size() < kk) break;
    for (std::size_t i = 0; i + kk <= tokens.size(); ++i) {
      std::string term = tokens[i];
      for (std::size_t j = 1; j < kk; ++j) {
        term.push_back(' ');
        term += tokens[i + j];
      }
      terms.push_back(std::move(term));
    }
  }
  return terms;
}

}  // namespace tc

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>

namespace tc {

/// English Snowball (Porter2) stemmer.
///
/// Operates on lowercase byte strings. Non-ASCII bytes are treated as
/// consonants, which never splits a multi-byte sequence because every
/// suffix rule is ASCII. Region boundaries R1/R2 are computed once on the
/// word and stay fixed while suffixes are rewritten.
class EnglishStemmer {
 public:
  std::string operator()(std::string_view input) const {
    std::string word(input);
    if (auto special = exception1(word)) return std::string(*special);
    if (word.size() < 3) return word;
    if (word.front() == '\'') word.erase(0, 1);
    if (word.empty()) return word;

    State s{std::move(word)};
    prelude(s);
    mark_regions(s);
    step_1a(s);
    if (!is_exception2(s.w)) {
      step_1b(s);
      step_1c(s);
      step_2(s);
      step_3(s);
      step_4(s);
      step_5(s);
    }
    for (char& c : s.w)
      if (c == 'Y') c = 'y';
    return std::move(s.w);
  }

 private:
  struct State {
    std::string w;
    std::size_t p1 = 0;
    std::size_t p2 = 0;
  };

  static bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' ||
           c == 'y';
  }

  static bool ends_with(const std::string& w, std::string_view suffix) {
    return w.size() >= suffix.size() &&
           std::string_view(w).substr(w.size() - suffix.size()) == suffix;
  }

  static const std::string_view* exception1(const std::string& w) {
    static constexpr std::array<std::pair<std::string_view, std::string_view>,
                                18>
        table{{{"skis", "ski"},     {"skies", "sky"},   {"dying", "die"},
               {"lying", "lie"},    {"tying", "tie"},   {"idly", "idl"},
               {"gently", "gentl"}, {"ugly", "ugli"},   {"early", "earli"},
               {"only", "onli"},    {"singly", "singl"}, {"sky", "sky"},
               {"news", "news"},    {"howe", "howe"},   {"atlas", "atlas"},
               {"cosmos", "cosmos"}, {"bias", "bias"},  {"andes", "andes"}}};
    for (const auto& entry : table)
      if (entry.first == w) return &entry.second;
    return nullptr;
  }

  static bool is_exception2(const std::string& w) {
    static constexpr std::array<std::string_view, 8> words{
        "inning", "outing", "canning", "herring",
        "earring", "proceed", "exceed", "succeed"};
    for (auto e : words)
      if (e == w) return true;
    return false;
  }

  static void prelude(State& s) {
    auto& w = s.w;
    if (w[0] == 'y') w[0] = 'Y';
    for (std::size_t i = 1; i < w.size(); ++i)
      if (w[i] == 'y' && is_vowel(w[i - 1])) w[i] = 'Y';
  }

  // Index just past the first non-vowel that follows a vowel, at or after
  // `from`; w.size() when there is none.
  static std::size_t region_after(const std::string& w, std::size_t from) {
    for (std::size_t i = from; i + 1 < w.size(); ++i)
      if (is_vowel(w[i]) && !is_vowel(w[i + 1])) return i + 2;
    return w.size();
  }

  static void mark_regions(State& s) {
    const auto& w = s.w;
    if (w.rfind("gener", 0) == 0 || w.rfind("arsen", 0) == 0)
      s.p1 = 5;
    else if (w.rfind("commun", 0) == 0)
      s.p1 = 6;
    else
      s.p1 = region_after(w, 0);
    s.p2 = s.p1 >= w.size() ? w.size() : region_after(w, s.p1);
  }

  // Short syllable ending at position `end` (exclusive).
  static bool short_syllable_before(const std::string& w, std::size_t end) {
    if (end >= 3) {
      const char c = w[end - 1];
      if (!is_vowel(c) && c != 'w' && c != 'x' && c != 'Y' &&
          is_vowel(w[end - 2]) && !is_vowel(w[end - 3]))
        return true;
    }
    return end == 2 && is_vowel(w[0]) && !is_vowel(w[1]);
  }

  static bool has_vowel(const std::string& w, std::size_t end) {
    for (std::size_t i = 0; i < end; ++i)
      if (is_vowel(w[i])) return true;
    return false;
  }

  static void replace_suffix(std::string& w, std::size_t len,
                             std::string_view with) {
    w.replace(w.size() - len, len, with);
  }

  static void step_1a(State& s) {
    auto& w = s.w;
    for (std::string_view apos : {"'s'", "'s", "'"}) {
      if (ends_with(w, apos)) {
        w.erase(w.size() - apos.size());
        break;
      }
    }
    if (ends_with(w, "sses")) {
      replace_suffix(w, 4, "ss");
    } else if (ends_with(w, "ied") || ends_with(w, "ies")) {
      replace_suffix(w, 3, w.size() > 4 ? "i" : "ie");
    } else if (ends_with(w, "us") || ends_with(w, "ss")) {
      // unchanged
    } else if (ends_with(w, "s")) {
      if (w.size() >= 2 && has_vowel(w, w.size() - 2)) w.pop_back();
    }
  }

  static void step_1b(State& s) {
    auto& w = s.w;
    static constexpr std::array<std::string_view, 6> suffixes{
        "eedly", "ingly", "edly", "eed", "ing", "ed"};
    for (auto suffix : suffixes) {
      if (!ends_with(w, suffix)) continue;
      const std::size_t start = w.size() - suffix.size();
      if (suffix == "eed" || suffix == "eedly") {
        if (start >= s.p1) replace_suffix(w, suffix.size(), "ee");
        return;
      }
      if (!has_vowel(w, start)) return;
      w.erase(start);
      if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
        w.push_back('e');
      } else if (w.size() >= 2 && w.back() == w[w.size() - 2] &&
                 std::string_view("bdfgmnprt").find(w.back()) !=
                     std::string_view::npos) {
        w.pop_back();
      } else if (s.p1 == w.size() && short_syllable_before(w, w.size())) {
        w.push_back('e');
      }
      return;
    }
  }

  static void step_1c(State& s) {
    auto& w = s.w;
    if (w.size() >= 3 && (w.back() == 'y' || w.back() == 'Y') &&
        !is_vowel(w[w.size() - 2]))
      w.back() = 'i';
  }

  struct Rule {
    std::string_view suffix;
    std::string_view replacement;
  };

  static void step_2(State& s) {
    // Longest suffix first; the matched suffix decides, shorter ones are
    // never retried.
    static constexpr std::array<Rule, 24> rules{{
        {"ization", "ize"}, {"ational", "ate"}, {"fulness", "ful"},
        {"ousness", "ous"}, {"iveness", "ive"}, {"tional", "tion"},
        {"biliti", "ble"},  {"lessli", "less"}, {"entli", "ent"},
        {"ation", "ate"},   {"alism", "al"},    {"aliti", "al"},
        {"ousli", "ous"},   {"iviti", "ive"},   {"fulli", "ful"},
        {"enci", "ence"},   {"anci", "ance"},   {"abli", "able"},
        {"izer", "ize"},    {"ator", "ate"},    {"alli", "al"},
        {"bli", "ble"},     {"ogi", "og"},      {"li", ""},
    }};
    auto& w = s.w;
    for (const auto& rule : rules) {
      if (!ends_with(w, rule.suffix)) continue;
      const std::size_t start = w.size() - rule.suffix.size();
      if (start < s.p1) return;
      if (rule.suffix == "ogi") {
        if (start == 0 || w[start - 1] != 'l') return;
      } else if (rule.suffix == "li") {
        if (start == 0 ||
            std::string_view("cdeghkmnrt").find(w[start - 1]) ==
                std::string_view::npos)
          return;
      }
      replace_suffix(w, rule.suffix.size(), rule.replacement);
      return;
    }
  }

  static void step_3(State& s) {
    static constexpr std::array<Rule, 9> rules{{
        {"ational", "ate"}, {"tional", "tion"}, {"alize", "al"},
        {"icate", "ic"},    {"iciti", "ic"},    {"ative", ""},
        {"ical", "ic"},     {"ness", ""},       {"ful", ""},
    }};
    auto& w = s.w;
    for (const auto& rule : rules) {
      if (!ends_with(w, rule.suffix)) continue;
      const std::size_t start = w.size() - rule.suffix.size();
      if (start < s.p1) return;
      if (rule.suffix == "ative" && start < s.p2) return;
      replace_suffix(w, rule.suffix.size(), rule.replacement);
      return;
    }
  }

  static void step_4(State& s) {
    static constexpr std::array<std::string_view, 18> suffixes{
        "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent",
        "ism",   "ate",  "iti",  "ous",  "ive",  "ize",  "ion", "al",
        "er",    "ic"};
    auto& w = s.w;
    for (auto suffix : suffixes) {
      if (!ends_with(w, suffix)) continue;
      const std::size_t start = w.size() - suffix.size();
      if (start < s.p2) return;
      if (suffix == "ion" &&
          (start == 0 || (w[start - 1] != 's' && w[start - 1] != 't')))
        return;
      w.erase(start);
      return;
    }
  }

  static void step_5(State& s) {
    auto& w = s.w;
    if (w.empty()) return;
    const std::size_t start = w.size() - 1;
    if (w.back() == 'e') {
      if (start >= s.p2 ||
          (start >= s.p1 && !short_syllable_before(w, start)))
        w.pop_back();
    } else if (w.back() == 'l') {
      if (start >= s.p2 && start > 0 && w[start - 1] == 'l') w.pop_back();
    }
  }
};

/// Stems a single lowercase token.
inline std::string stem_word(std::string_view token) {
  static const EnglishStemmer stemmer;
  return stemmer(token);
}

}  // namespace tc

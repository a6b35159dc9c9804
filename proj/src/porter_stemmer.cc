// Copyright 2026 The trmeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trmeval/porter_stemmer.h"

#include <array>
#include <utility>

namespace trmeval {
namespace {

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
};

// Working state follows the usual presentation of the algorithm: `word_`
// holds the buffer, `end_` is one past the last live character, and `stem_`
// marks where the most recently matched suffix starts.
class Stemmer {
 public:
  explicit Stemmer(std::string_view word) : word_(word), end_(word.size()) {}

  std::string Run() {
    if (end_ <= 2) return word_;
    Step1a();
    Step1b();
    Step1c();
    Step2();
    Step3();
    Step4();
    Step5();
    word_.resize(end_);
    return std::move(word_);
  }

 private:
  bool IsConsonant(std::size_t i) const {
    switch (word_[i]) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return false;
      case 'y':
        return i == 0 || !IsConsonant(i - 1);
      default:
        return true;
    }
  }

  // Number of vowel-consonant sequences in word_[0, stem_).
  int Measure() const {
    int m = 0;
    std::size_t i = 0;
    while (i < stem_ && IsConsonant(i)) ++i;
    while (i < stem_) {
      while (i < stem_ && !IsConsonant(i)) ++i;
      if (i >= stem_) break;
      while (i < stem_ && IsConsonant(i)) ++i;
      ++m;
    }
    return m;
  }

  bool StemHasVowel() const {
    for (std::size_t i = 0; i < stem_; ++i) {
      if (!IsConsonant(i)) return true;
    }
    return false;
  }

  bool DoubleConsonantAt(std::size_t last) const {
    return last >= 1 && word_[last] == word_[last - 1] && IsConsonant(last);
  }

  // consonant-vowel-consonant ending at `last`, final consonant not w/x/y.
  bool CvcAt(std::size_t last) const {
    if (last < 2 || !IsConsonant(last) || IsConsonant(last - 1) ||
        !IsConsonant(last - 2)) {
      return false;
    }
    const char c = word_[last];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool EndsWith(std::string_view suffix) {
    if (suffix.size() > end_) return false;
    if (std::string_view(word_).substr(end_ - suffix.size(), suffix.size()) !=
        suffix) {
      return false;
    }
    stem_ = end_ - suffix.size();
    return true;
  }

  void ReplaceSuffix(std::string_view replacement) {
    word_.replace(stem_, end_ - stem_, replacement);
    end_ = stem_ + replacement.size();
    word_.resize(end_);
  }

  // Longest matching suffix wins; its replacement applies only when the
  // remaining stem measure exceeds `min_measure`.
  template <std::size_t N>
  void ApplyRules(const std::array<Rule, N>& rules, int min_measure) {
    const Rule* best = nullptr;
    for (const auto& rule : rules) {
      if ((best == nullptr || rule.suffix.size() > best->suffix.size()) &&
          rule.suffix.size() <= end_ &&
          std::string_view(word_).substr(end_ - rule.suffix.size()) ==
              rule.suffix) {
        best = &rule;
      }
    }
    if (best == nullptr) return;
    stem_ = end_ - best->suffix.size();
    if (Measure() > min_measure) ReplaceSuffix(best->replacement);
  }

  void Step1a() {
    if (EndsWith("sses")) {
      ReplaceSuffix("ss");
    } else if (EndsWith("ies")) {
      ReplaceSuffix("i");
    } else if (EndsWith("ss")) {
      // unchanged
    } else if (EndsWith("s")) {
      ReplaceSuffix("");
    }
  }

  void Step1b() {
    if (EndsWith("eed")) {
      if (Measure() > 0) ReplaceSuffix("ee");
      return;
    }
    bool removed = false;
    if (EndsWith("ed") && StemHasVowel()) {
      ReplaceSuffix("");
      removed = true;
    } else if (EndsWith("ing") && StemHasVowel()) {
      ReplaceSuffix("");
      removed = true;
    }
    if (!removed) return;

    if (EndsWith("at")) {
      ReplaceSuffix("ate");
    } else if (EndsWith("bl")) {
      ReplaceSuffix("ble");
    } else if (EndsWith("iz")) {
      ReplaceSuffix("ize");
    } else if (DoubleConsonantAt(end_ - 1)) {
      const char c = word_[end_ - 1];
      if (c != 'l' && c != 's' && c != 'z') {
        --end_;
        word_.resize(end_);
      }
    } else {
      stem_ = end_;
      if (Measure() == 1 && CvcAt(end_ - 1)) {
        word_ += 'e';
        ++end_;
      }
    }
  }

  void Step1c() {
    if (EndsWith("y") && StemHasVowel()) ReplaceSuffix("i");
  }

  void Step2() {
    static constexpr std::array<Rule, 20> kRules = {{
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
        {"anci", "ance"},   {"izer", "ize"},    {"abli", "able"},
        {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
        {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
        {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
        {"iviti", "ive"},   {"biliti", "ble"},
    }};
    ApplyRules(kRules, 0);
  }

  void Step3() {
    static constexpr std::array<Rule, 7> kRules = {{
        {"icate", "ic"},
        {"ative", ""},
        {"alize", "al"},
        {"iciti", "ic"},
        {"ical", "ic"},
        {"ful", ""},
        {"ness", ""},
    }};
    ApplyRules(kRules, 0);
  }

  void Step4() {
    static constexpr std::array<std::string_view, 19> kSuffixes = {
        "al",  "ance", "ence", "er",  "ic",  "able", "ible",
        "ant", "ement", "ment", "ent", "ion", "ou",  "ism",
        "ate", "iti",  "ous",  "ive", "ize",
    };
    std::string_view best;
    for (auto suffix : kSuffixes) {
      if (suffix.size() > best.size() && suffix.size() <= end_ &&
          std::string_view(word_).substr(end_ - suffix.size()) == suffix) {
        best = suffix;
      }
    }
    if (best.empty()) return;
    stem_ = end_ - best.size();
    if (best == "ion") {
      if (stem_ == 0) return;
      const char before = word_[stem_ - 1];
      if (before != 's' && before != 't') return;
    }
    if (Measure() > 1) ReplaceSuffix("");
  }

  void Step5() {
    // 5a
    if (EndsWith("e")) {
      const int m = Measure();
      if (m > 1 || (m == 1 && !(stem_ > 0 && CvcAt(stem_ - 1)))) {
        ReplaceSuffix("");
      }
    }
    // 5b
    stem_ = end_;
    if (end_ >= 2 && word_[end_ - 1] == 'l' && DoubleConsonantAt(end_ - 1) &&
        Measure() > 1) {
      --end_;
      word_.resize(end_);
    }
  }

  std::string word_;
  std::size_t end_;
  std::size_t stem_ = 0;
};

}  // namespace

std::string PorterStem(std::string_view word) { return Stemmer(word).Run(); }

}  // namespace trmeval

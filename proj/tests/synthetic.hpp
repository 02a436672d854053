#pragma once

#include <random>
#include <string>

#include "charpipe/corpus.hpp"

namespace charpipe::testing {

// Words whose tags each form one contiguous run: distinct tags per morpheme,
// covert morphemes interleaved, and occasionally a tag repeated on the next
// overt morpheme when no covert morpheme touches either of the two.
inline MorphWord contiguous_word(std::mt19937_64& gen) {
  MorphWord w;
  const int n = 1 + static_cast<int>(gen() % 5);
  int tag_id = 0;
  bool have_overt = false;
  std::string last_overt_tag;
  bool covert_after_last = false;
  bool last_was_repeat = false;
  for (int k = 0; k < n; ++k) {
    Morpheme m;
    m.index = k + 1;
    const bool covert = have_overt && !last_was_repeat && gen() % 4 == 0;
    if (covert) {
      m.form = "Q";  // never matches: surfaces use lowercase letters only
      m.upos = "T" + std::to_string(tag_id++);
      covert_after_last = true;
    } else {
      const int len = 1 + static_cast<int>(gen() % 4);
      for (int c = 0; c < len; ++c) m.form += static_cast<char>('a' + gen() % 26);
      const bool repeat = have_overt && !covert_after_last && gen() % 5 == 0;
      m.upos = repeat ? last_overt_tag : "T" + std::to_string(tag_id++);
      last_overt_tag = m.upos;
      last_was_repeat = repeat;
      covert_after_last = false;
      have_overt = true;
      w.surface += m.form;
    }
    w.morphemes.push_back(std::move(m));
  }
  return w;
}

}  // namespace charpipe::testing

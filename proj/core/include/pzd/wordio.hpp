#pragma once

#include <string>

#include "pzd/symbolic.hpp"

namespace pzd {

// ASCII word literals (bit-exact grammar):
//   word   := 'e' | letter (' ' letter)*
//   letter := ('s+'|'s-') INT
//           | ('[+'|'[-') ' ' word ' ' '|' ' ' word ' ' ']'
// where '[+ base | child ]' denotes the parabolic letter over (base, child)
// and the empty word is spelled 'e'.
std::string format_word(const Word& w);
Word parse_word(const SymbolicContext& ctx, const std::string& text);

std::string format_letter(const Letter& a);

}  // namespace pzd

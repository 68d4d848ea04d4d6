#include "pzd/wordio.hpp"

#include <sstream>
#include <vector>

namespace pzd {

namespace {

void format_letter_into(const Letter& a, std::string& out);

void format_word_into(const Word& w, std::string& out) {
  if (w.empty()) {
    out += 'e';
    return;
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    format_letter_into(w.at(i), out);
  }
}

void format_letter_into(const Letter& a, std::string& out) {
  if (a.simple()) {
    out += 's';
    out += a.sign() > 0 ? '+' : '-';
    out += std::to_string(a.index());
    return;
  }
  out += '[';
  out += a.sign() > 0 ? '+' : '-';
  out += ' ';
  format_word_into(a.base(), out);
  out += " | ";
  format_word_into(a.child(), out);
  out += " ]";
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

struct Parser {
  const SymbolicContext& ctx;
  const std::vector<std::string>& tokens;
  std::size_t pos = 0;

  bool done() const { return pos >= tokens.size(); }
  const std::string& peek() const {
    if (done()) throw ParseError("word literal: unexpected end of input");
    return tokens[pos];
  }
  std::string take() {
    std::string t = peek();
    ++pos;
    return t;
  }

  // Parses letters until a terminator token ('|' or ']') or end of input.
  Word parse_word_until_terminator() {
    std::vector<Letter> letters;
    if (!done() && peek() == "e") {
      take();
      return Word();
    }
    while (!done() && peek() != "|" && peek() != "]") letters.push_back(parse_letter());
    if (letters.empty()) throw ParseError("word literal: empty word must be spelled 'e'");
    return Word(std::move(letters));
  }

  Letter parse_letter() {
    std::string t = take();
    if (t.size() >= 3 && t[0] == 's' && (t[1] == '+' || t[1] == '-')) {
      int sign = t[1] == '+' ? 1 : -1;
      int index = 0;
      try {
        std::size_t used = 0;
        index = std::stoi(t.substr(2), &used);
        if (used != t.size() - 2) throw ParseError("word literal: bad letter '" + t + "'");
      } catch (const std::exception&) {
        throw ParseError("word literal: bad letter '" + t + "'");
      }
      try {
        return ctx.simple(sign, index);
      } catch (const OutOfRangeError& e) {
        throw ParseError(std::string("word literal: ") + e.what());
      }
    }
    if (t == "[+" || t == "[-") {
      int sign = t[1] == '+' ? 1 : -1;
      Word base = parse_word_until_terminator();
      if (done() || take() != "|") throw ParseError("word literal: expected '|' in parabolic letter");
      Word child = parse_word_until_terminator();
      if (done() || take() != "]") throw ParseError("word literal: expected ']' in parabolic letter");
      try {
        return ctx.parabolic(sign, base, child);
      } catch (const OutOfRangeError& e) {
        throw ParseError(std::string("word literal: ") + e.what());
      }
    }
    throw ParseError("word literal: unexpected token '" + t + "'");
  }
};

}  // namespace

std::string format_word(const Word& w) {
  std::string out;
  format_word_into(w, out);
  return out;
}

std::string format_letter(const Letter& a) {
  std::string out;
  format_letter_into(a, out);
  return out;
}

Word parse_word(const SymbolicContext& ctx, const std::string& text) {
  std::vector<std::string> tokens = tokenize(text);
  if (tokens.empty()) throw ParseError("word literal: empty input (spell the empty word 'e')");
  Parser p{ctx, tokens};
  Word w = p.parse_word_until_terminator();
  if (!p.done()) throw ParseError("word literal: trailing tokens after word");
  return w;
}

}  // namespace pzd

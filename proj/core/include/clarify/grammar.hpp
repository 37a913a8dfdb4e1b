#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "clarify/scene.hpp"

namespace clarify {

struct Production {
  std::string lhs;
  std::vector<std::string> rhs;
};

/// Context-free grammar of the caption language.
///
/// Symbols that appear on some left-hand side are nonterminals; everything
/// else is a terminal word. The text form is one production per line,
/// "LHS -> RHS*", with '#' comments. A trailing '?' on a right-hand symbol
/// marks it optional and expands into both alternatives on load. The start
/// symbol is the left-hand side of the first production.
class Grammar {
 public:
  static Grammar from_text(std::string_view text);

  // CAP -> NP; NP -> DET ADJP? N PARTP?; ADJP -> CLR; PARTP -> VBG NP; plus
  // lexical rules for every vocabulary word (nouns in both numbers).
  static Grammar for_vocabulary(const Vocabulary& vocab);

  // Production table in load order, optional symbols already expanded.
  std::string to_text() const;

  const std::string& start() const { return symbols_[static_cast<std::size_t>(start_)]; }
  const std::vector<Production>& productions() const { return productions_; }
  bool is_nonterminal(std::string_view symbol) const;

 private:
  friend class Parser;

  struct CompiledProduction {
    int lhs;
    std::vector<int> rhs;
  };

  int intern(const std::string& symbol);
  int lookup(std::string_view symbol) const;
  void compile();

  std::vector<Production> productions_;
  std::vector<std::string> symbols_;
  std::vector<bool> nonterminal_;
  std::vector<CompiledProduction> compiled_;
  std::vector<std::vector<int>> by_lhs_;
  int start_ = 0;
};

/// Constituency tree. Leaves carry a token as label and no children.
struct ParseTree {
  std::string label;
  std::vector<ParseTree> children;
  std::size_t begin = 0;  // token span [begin, end)
  std::size_t end = 0;
  // Set on NP copies that had their participle modifier removed.
  bool synthetic = false;

  bool is_leaf() const noexcept { return children.empty(); }
  std::vector<std::string> leaves() const;
  // Bracketed form: (CAP (NP (DET a) (N square)))
  std::string to_string() const;

  // First direct child with the given label, or nullptr.
  const ParseTree* child(std::string_view label) const;
};

std::vector<std::string> tokenize(std::string_view text);
std::string join_tokens(const std::vector<std::string>& tokens);

/// Exact chart parser (Earley recognizer plus derivation counting).
class Parser {
 public:
  explicit Parser(Grammar grammar) : grammar_(std::move(grammar)) {}

  const Grammar& grammar() const { return grammar_; }

  /// Returns the unique derivation of `tokens` from `symbol` (the grammar's
  /// start symbol when empty).
  ///
  /// Throws ParseError carrying the index of the first token that cannot
  /// extend any derivation, or tokens.size() when the input ends early.
  /// Ambiguous input also raises ParseError (index 0).
  ParseTree parse(const std::vector<std::string>& tokens, std::string_view symbol = {}) const;

 private:
  Grammar grammar_;
};

/// NP nodes of the tree in pre-order, followed by a modifier-free copy
/// (marked synthetic) of each NP that carries a participle phrase.
std::vector<ParseTree> np_subtrees(const ParseTree& tree);

}  // namespace clarify

#include "clarify/grammar.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include "clarify/errors.hpp"

namespace clarify {

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

Grammar Grammar::from_text(std::string_view text) {
  Grammar g;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto words = split_ws(line);
    if (words.empty()) continue;
    if (words.size() < 3 || words[1] != "->")
      throw FormatError("grammar line " + std::to_string(line_no) + ": expected 'LHS -> RHS*'");
    const std::string lhs = words[0];
    // Expand optional symbols into every combination of presence.
    std::vector<std::vector<std::string>> alternatives{{}};
    for (std::size_t i = 2; i < words.size(); ++i) {
      std::string sym = words[i];
      const bool optional = sym.size() > 1 && sym.back() == '?';
      if (optional) sym.pop_back();
      std::vector<std::vector<std::string>> next;
      for (auto& alt : alternatives) {
        if (optional) next.push_back(alt);
        alt.push_back(sym);
        next.push_back(std::move(alt));
      }
      alternatives = std::move(next);
    }
    for (auto& alt : alternatives) {
      if (alt.empty())
        throw FormatError("grammar line " + std::to_string(line_no) + ": empty productions are not supported");
      g.productions_.push_back({lhs, std::move(alt)});
    }
  }
  if (g.productions_.empty()) throw FormatError("grammar has no productions");
  g.compile();
  return g;
}

Grammar Grammar::for_vocabulary(const Vocabulary& vocab) {
  std::ostringstream out;
  out << "CAP -> NP\n"
      << "NP -> DET ADJP? N PARTP?\n"
      << "ADJP -> CLR\n"
      << "PARTP -> VBG NP\n";
  for (const char* det : {"a", "an", "some"}) out << "DET -> " << det << '\n';
  for (const auto& c : vocab.colors) out << "CLR -> " << c << '\n';
  auto noun = [&](const std::string& n) {
    out << "N -> " << n << '\n';
    out << "N -> " << vocab.plural(n) << '\n';
  };
  for (const auto& s : vocab.shapes) noun(s);
  if (!vocab.generic_noun.empty()) noun(vocab.generic_noun);
  for (const auto& v : vocab.verbs) out << "VBG -> " << v << '\n';
  return from_text(out.str());
}

std::string Grammar::to_text() const {
  std::string out;
  for (const auto& p : productions_) {
    out += p.lhs + " ->";
    for (const auto& s : p.rhs) out += " " + s;
    out += '\n';
  }
  return out;
}

bool Grammar::is_nonterminal(std::string_view symbol) const {
  const int id = lookup(symbol);
  return id >= 0 && nonterminal_[static_cast<std::size_t>(id)];
}

int Grammar::intern(const std::string& symbol) {
  if (int id = lookup(symbol); id >= 0) return id;
  symbols_.push_back(symbol);
  nonterminal_.push_back(false);
  return static_cast<int>(symbols_.size() - 1);
}

int Grammar::lookup(std::string_view symbol) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i] == symbol) return static_cast<int>(i);
  return -1;
}

void Grammar::compile() {
  for (const auto& p : productions_) nonterminal_[static_cast<std::size_t>(intern(p.lhs))] = true;
  for (const auto& p : productions_) {
    CompiledProduction c{lookup(p.lhs), {}};
    for (const auto& s : p.rhs) c.rhs.push_back(intern(s));
    compiled_.push_back(std::move(c));
  }
  start_ = lookup(productions_.front().lhs);
  by_lhs_.assign(symbols_.size(), {});
  for (std::size_t i = 0; i < compiled_.size(); ++i)
    by_lhs_[static_cast<std::size_t>(compiled_[i].lhs)].push_back(static_cast<int>(i));

  // Unit-production cycles (A -> B -> A) would make derivation counts infinite.
  std::vector<int> state(symbols_.size(), 0);
  std::function<void(int)> visit = [&](int sym) {
    state[static_cast<std::size_t>(sym)] = 1;
    for (int p : by_lhs_[static_cast<std::size_t>(sym)]) {
      const auto& rhs = compiled_[static_cast<std::size_t>(p)].rhs;
      if (rhs.size() != 1 || !nonterminal_[static_cast<std::size_t>(rhs[0])]) continue;
      const int next = rhs[0];
      if (state[static_cast<std::size_t>(next)] == 1)
        throw FormatError("grammar has a unit-production cycle through " + symbols_[static_cast<std::size_t>(next)]);
      if (state[static_cast<std::size_t>(next)] == 0) visit(next);
    }
    state[static_cast<std::size_t>(sym)] = 2;
  };
  for (std::size_t s = 0; s < symbols_.size(); ++s)
    if (nonterminal_[s] && state[s] == 0) visit(static_cast<int>(s));
}

std::vector<std::string> ParseTree::leaves() const {
  std::vector<std::string> out;
  std::function<void(const ParseTree&)> walk = [&](const ParseTree& t) {
    if (t.is_leaf()) {
      out.push_back(t.label);
      return;
    }
    for (const auto& c : t.children) walk(c);
  };
  walk(*this);
  return out;
}

std::string ParseTree::to_string() const {
  if (is_leaf()) return label;
  std::string out = "(" + label;
  for (const auto& c : children) out += " " + c.to_string();
  return out + ")";
}

const ParseTree* ParseTree::child(std::string_view name) const {
  for (const auto& c : children)
    if (c.label == name) return &c;
  return nullptr;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalpha(u) || c == '/' || c == '-' || c == '\'')
      cleaned += static_cast<char>(std::tolower(u));
    else
      cleaned += ' ';
  }
  return split_ws(cleaned);
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

namespace {

struct Item {
  int prod;
  int dot;
  int origin;
};

std::uint64_t item_key(const Item& it) {
  return (static_cast<std::uint64_t>(it.prod) << 40) | (static_cast<std::uint64_t>(it.dot) << 32) |
         static_cast<std::uint64_t>(it.origin);
}

}  // namespace

ParseTree Parser::parse(const std::vector<std::string>& tokens, std::string_view symbol) const {
  const auto& g = grammar_;
  const int start = symbol.empty() ? g.start_ : g.lookup(symbol);
  if (start < 0 || !g.nonterminal_[static_cast<std::size_t>(start)])
    throw PreconditionError("unknown start symbol: " + std::string(symbol));
  const std::size_t n = tokens.size();
  if (n == 0) throw ParseError("empty input", 0);

  std::vector<int> token_ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    token_ids[i] = g.lookup(tokens[i]);
    if (token_ids[i] >= 0 && g.nonterminal_[static_cast<std::size_t>(token_ids[i])]) token_ids[i] = -1;
  }

  std::vector<std::vector<Item>> chart(n + 1);
  std::vector<std::unordered_set<std::uint64_t>> seen(n + 1);
  auto add = [&](std::size_t j, Item it) {
    if (seen[j].insert(item_key(it)).second) chart[j].push_back(it);
  };
  for (int p : g.by_lhs_[static_cast<std::size_t>(start)]) add(0, {p, 0, 0});

  for (std::size_t j = 0; j <= n; ++j) {
    for (std::size_t idx = 0; idx < chart[j].size(); ++idx) {
      const Item it = chart[j][idx];
      const auto& prod = g.compiled_[static_cast<std::size_t>(it.prod)];
      if (static_cast<std::size_t>(it.dot) == prod.rhs.size()) {
        // Completion. Re-read the size each pass: add() may grow chart[j].
        const auto origin = static_cast<std::size_t>(it.origin);
        for (std::size_t k = 0; k < chart[origin].size(); ++k) {
          const Item parent = chart[origin][k];
          const auto& pp = g.compiled_[static_cast<std::size_t>(parent.prod)];
          if (static_cast<std::size_t>(parent.dot) < pp.rhs.size() &&
              pp.rhs[static_cast<std::size_t>(parent.dot)] == prod.lhs)
            add(j, {parent.prod, parent.dot + 1, parent.origin});
        }
        continue;
      }
      const int next = prod.rhs[static_cast<std::size_t>(it.dot)];
      if (g.nonterminal_[static_cast<std::size_t>(next)]) {
        for (int p : g.by_lhs_[static_cast<std::size_t>(next)]) add(j, {p, 0, static_cast<int>(j)});
      } else if (j < n && token_ids[j] == next) {
        add(j + 1, {it.prod, it.dot + 1, it.origin});
      }
    }
    if (j < n && chart[j + 1].empty())
      throw ParseError("no derivation accepts token '" + tokens[j] + "' at index " + std::to_string(j), j);
  }

  // Completed spans (symbol, begin, end) seen by the recognizer.
  std::unordered_set<std::uint64_t> spans;
  auto span_key = [](int sym, std::size_t i, std::size_t j) {
    return (static_cast<std::uint64_t>(sym) << 40) | (static_cast<std::uint64_t>(i) << 20) |
           static_cast<std::uint64_t>(j);
  };
  for (std::size_t j = 0; j <= n; ++j)
    for (const auto& it : chart[j]) {
      const auto& prod = g.compiled_[static_cast<std::size_t>(it.prod)];
      if (static_cast<std::size_t>(it.dot) == prod.rhs.size())
        spans.insert(span_key(prod.lhs, static_cast<std::size_t>(it.origin), j));
    }
  if (!spans.count(span_key(start, 0, n)))
    throw ParseError("input ends before a complete " + g.symbols_[static_cast<std::size_t>(start)], n);

  // Derivation counts, capped at 2; anything above 1 is ambiguous.
  std::map<std::tuple<int, std::size_t, std::size_t>, int> memo;
  std::function<int(int, std::size_t, std::size_t)> count_sym;
  std::function<int(const std::vector<int>&, std::size_t, std::size_t, std::size_t)> count_seq;
  count_sym = [&](int sym, std::size_t i, std::size_t j) -> int {
    if (!g.nonterminal_[static_cast<std::size_t>(sym)]) return (j == i + 1 && token_ids[i] == sym) ? 1 : 0;
    if (!spans.count(span_key(sym, i, j))) return 0;
    auto key = std::make_tuple(sym, i, j);
    if (auto f = memo.find(key); f != memo.end()) return f->second;
    int total = 0;
    for (int p : g.by_lhs_[static_cast<std::size_t>(sym)])
      total = std::min(2, total + count_seq(g.compiled_[static_cast<std::size_t>(p)].rhs, 0, i, j));
    memo[key] = total;
    return total;
  };
  count_seq = [&](const std::vector<int>& rhs, std::size_t k, std::size_t i, std::size_t j) -> int {
    if (k == rhs.size()) return i == j ? 1 : 0;
    const std::size_t remaining = rhs.size() - k - 1;
    int total = 0;
    for (std::size_t m = i + 1; m + remaining <= j; ++m) {
      const int c = count_sym(rhs[k], i, m);
      if (c == 0) continue;
      total = std::min(2, total + c * count_seq(rhs, k + 1, m, j));
    }
    return total;
  };

  const int derivations = count_sym(start, 0, n);
  if (derivations > 1) throw ParseError("ambiguous input", 0);

  std::function<ParseTree(int, std::size_t, std::size_t)> build = [&](int sym, std::size_t i,
                                                                       std::size_t j) -> ParseTree {
    ParseTree node;
    node.label = g.symbols_[static_cast<std::size_t>(sym)];
    node.begin = i;
    node.end = j;
    if (!g.nonterminal_[static_cast<std::size_t>(sym)]) return node;
    for (int p : g.by_lhs_[static_cast<std::size_t>(sym)]) {
      const auto& rhs = g.compiled_[static_cast<std::size_t>(p)].rhs;
      if (count_seq(rhs, 0, i, j) == 0) continue;
      std::size_t pos = i;
      for (std::size_t k = 0; k < rhs.size(); ++k) {
        const std::size_t remaining = rhs.size() - k - 1;
        for (std::size_t m = pos + 1; m + remaining <= j; ++m) {
          if (count_sym(rhs[k], pos, m) && count_seq(rhs, k + 1, m, j)) {
            node.children.push_back(build(rhs[k], pos, m));
            pos = m;
            break;
          }
        }
      }
      break;
    }
    return node;
  };
  return build(start, 0, n);
}

std::vector<ParseTree> np_subtrees(const ParseTree& tree) {
  std::vector<ParseTree> out;
  std::vector<ParseTree> stripped;
  std::function<void(const ParseTree&)> walk = [&](const ParseTree& t) {
    if (t.label == "NP") {
      out.push_back(t);
      if (t.child("PARTP")) {
        ParseTree copy;
        copy.label = t.label;
        copy.begin = t.begin;
        copy.synthetic = true;
        for (const auto& c : t.children)
          if (c.label != "PARTP") copy.children.push_back(c);
        copy.end = copy.children.empty() ? t.begin : copy.children.back().end;
        stripped.push_back(std::move(copy));
      }
    }
    for (const auto& c : t.children) walk(c);
  };
  walk(tree);
  out.insert(out.end(), std::make_move_iterator(stripped.begin()), std::make_move_iterator(stripped.end()));
  return out;
}

}  // namespace clarify

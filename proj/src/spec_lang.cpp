#include "overwatch/spec_lang.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "overwatch/error.hpp"

namespace overwatch::spec {

using automata::Alphabet;
using automata::Dfa;
using automata::kEpsilon;
using automata::Nfa;

namespace {

constexpr std::pair<NodeKind, std::string_view> kKindNames[] = {
    {NodeKind::Atom, "atom"},       {NodeKind::Epsilon, "epsilon"},
    {NodeKind::True, "true"},       {NodeKind::Not, "not"},
    {NodeKind::And, "and"},         {NodeKind::Or, "or"},
    {NodeKind::Next, "next"},       {NodeKind::Until, "until"},
    {NodeKind::Eventually, "eventually"}, {NodeKind::Always, "always"},
    {NodeKind::Concat, "concat"},   {NodeKind::Union, "union"},
    {NodeKind::Star, "star"},
};

bool all_kinds(const SpecAst& ast, std::initializer_list<NodeKind> allowed) {
  if (std::find(allowed.begin(), allowed.end(), ast.kind) == allowed.end()) return false;
  return std::all_of(ast.children.begin(), ast.children.end(),
                     [&](const SpecAst& c) { return all_kinds(c, allowed); });
}

void collect_atoms(const SpecAst& ast, std::set<std::string>& out) {
  if (ast.kind == NodeKind::Atom) out.insert(ast.atom);
  for (const auto& c : ast.children) collect_atoms(c, out);
}

SpecAst fold_right(std::vector<SpecAst> items, NodeKind kind) {
  SpecAst acc = std::move(items.back());
  for (std::size_t i = items.size() - 1; i-- > 0;)
    acc = SpecAst::make(kind, {std::move(items[i]), std::move(acc)});
  return acc;
}

// ---------------------------------------------------------------- lexing

struct Token {
  enum class Type { Ident, Symbol, End } type;
  std::string text;
  std::size_t offset;
};

std::vector<Token> lex(std::string_view text, std::string_view symbols) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto ident_start = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto ident_char = [&](char c) { return ident_start(c) || (c >= '0' && c <= '9'); };
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
    } else if (ident_start(c)) {
      std::size_t start = i;
      while (i < text.size() && ident_char(text[i])) ++i;
      out.push_back({Token::Type::Ident, std::string(text.substr(start, i - start)), start});
    } else if (symbols.find(c) != std::string_view::npos) {
      out.push_back({Token::Type::Symbol, std::string(1, c), i});
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
  }
  out.push_back({Token::Type::End, "", text.size()});
  if (out.size() == 1) throw ParseError("empty specification", 0);
  return out;
}

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek() const { return tokens_[pos_]; }
  Token take() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }
  bool peek_symbol(char c) const { return peek().type == Token::Type::Symbol && peek().text[0] == c; }
  bool peek_ident(std::string_view word) const { return peek().type == Token::Type::Ident && peek().text == word; }

  void expect_symbol(char c) {
    if (!peek_symbol(c)) throw ParseError(std::string("expected '") + c + "'" + found(), peek().offset);
    take();
  }
  void expect_end() {
    if (peek().type != Token::Type::End) throw ParseError("unexpected trailing input" + found(), peek().offset);
  }
  std::string found() const {
    return peek().type == Token::Type::End ? ", found end of input" : ", found '" + peek().text + "'";
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- RE parser

class ReParser {
 public:
  explicit ReParser(std::string_view text) : ts_(lex(text, "+.*()")) {}

  SpecAst parse() {
    SpecAst ast = parse_union();
    ts_.expect_end();
    return ast;
  }

 private:
  SpecAst parse_union() {
    std::vector<SpecAst> terms{parse_concat()};
    while (ts_.peek_symbol('+')) {
      ts_.take();
      terms.push_back(parse_concat());
    }
    return fold_right(std::move(terms), NodeKind::Union);
  }

  bool starts_factor() const { return ts_.peek().type == Token::Type::Ident || ts_.peek_symbol('('); }

  SpecAst parse_concat() {
    std::vector<SpecAst> items{parse_star()};
    for (;;) {
      if (ts_.peek_symbol('.')) {
        ts_.take();
        items.push_back(parse_star());
      } else if (starts_factor()) {
        items.push_back(parse_star());
      } else {
        break;
      }
    }
    return fold_right(std::move(items), NodeKind::Concat);
  }

  SpecAst parse_star() {
    SpecAst p = parse_primary();
    while (ts_.peek_symbol('*')) {
      ts_.take();
      p = SpecAst::make(NodeKind::Star, {std::move(p)});
    }
    return p;
  }

  SpecAst parse_primary() {
    const Token& t = ts_.peek();
    if (t.type == Token::Type::Ident) {
      Token tok = ts_.take();
      if (tok.text == "eps") return SpecAst::make(NodeKind::Epsilon);
      return SpecAst::make_atom(tok.text);
    }
    if (ts_.peek_symbol('(')) {
      ts_.take();
      SpecAst inner = parse_union();
      ts_.expect_symbol(')');
      return inner;
    }
    throw ParseError("expected atom, 'eps' or '('" + ts_.found(), t.offset);
  }

  TokenStream ts_;
};

// ---------------------------------------------------------------- LTL parser

bool is_ltl_keyword(std::string_view w) { return w == "X" || w == "U" || w == "F" || w == "G" || w == "true"; }

class LtlParser {
 public:
  explicit LtlParser(std::string_view text) : ts_(lex(text, "!&|()")) {}

  SpecAst parse() {
    SpecAst ast = parse_or();
    ts_.expect_end();
    return ast;
  }

 private:
  SpecAst parse_or() {
    std::vector<SpecAst> terms{parse_and()};
    while (ts_.peek_symbol('|')) {
      ts_.take();
      terms.push_back(parse_and());
    }
    return fold_right(std::move(terms), NodeKind::Or);
  }

  SpecAst parse_and() {
    std::vector<SpecAst> terms{parse_until()};
    while (ts_.peek_symbol('&')) {
      ts_.take();
      terms.push_back(parse_until());
    }
    return fold_right(std::move(terms), NodeKind::And);
  }

  SpecAst parse_until() {
    SpecAst lhs = parse_unary();
    if (ts_.peek_ident("U")) {
      ts_.take();
      SpecAst rhs = parse_until();
      return SpecAst::make(NodeKind::Until, {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  SpecAst parse_unary() {
    const Token t = ts_.peek();
    if (ts_.peek_symbol('!')) {
      ts_.take();
      SpecAst operand = parse_unary();
      if (operand.kind != NodeKind::Atom)
        throw ParseError("operator '!' applied to a non-atom; only negated atoms are co-safe", t.offset);
      return SpecAst::make(NodeKind::Not, {std::move(operand)});
    }
    if (ts_.peek_ident("X")) {
      ts_.take();
      return SpecAst::make(NodeKind::Next, {parse_unary()});
    }
    if (ts_.peek_ident("F")) {
      ts_.take();
      if (ts_.peek_ident("G")) {
        const std::size_t g_offset = ts_.take().offset;
        SpecAst operand = parse_unary();
        if (operand.kind != NodeKind::Atom)
          throw ParseError("operator 'G' is not co-safe; only 'F G <atom>' is accepted", g_offset);
        return SpecAst::make(NodeKind::Eventually, {std::move(operand)});
      }
      return SpecAst::make(NodeKind::Eventually, {parse_unary()});
    }
    if (ts_.peek_ident("G"))
      throw ParseError("operator 'G' is not co-safe; only 'F G <atom>' is accepted", t.offset);
    if (ts_.peek_ident("true")) {
      ts_.take();
      return SpecAst::make(NodeKind::True);
    }
    if (t.type == Token::Type::Ident) {
      if (is_ltl_keyword(t.text)) throw ParseError("misplaced operator '" + t.text + "'", t.offset);
      ts_.take();
      return SpecAst::make_atom(t.text);
    }
    if (ts_.peek_symbol('(')) {
      ts_.take();
      SpecAst inner = parse_or();
      ts_.expect_symbol(')');
      return inner;
    }
    throw ParseError("expected formula" + ts_.found(), t.offset);
  }

  TokenStream ts_;
};

// ---------------------------------------------------------------- printing

int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::Union:
    case NodeKind::Or:
      return 1;
    case NodeKind::Concat:
    case NodeKind::And:
      return 2;
    case NodeKind::Until:
    case NodeKind::Star:
      return 3;
    case NodeKind::Not:
    case NodeKind::Next:
    case NodeKind::Eventually:
    case NodeKind::Always:
      return 4;
    default:
      return 5;
  }
}

void print(const SpecAst& ast, std::string& out);

void print_child(const SpecAst& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print(child, out);
  if (parens) out += ')';
}

void print(const SpecAst& ast, std::string& out) {
  const int p = precedence(ast.kind);
  switch (ast.kind) {
    case NodeKind::Atom:
      out += ast.atom;
      return;
    case NodeKind::Epsilon:
      out += "eps";
      return;
    case NodeKind::True:
      out += "true";
      return;
    case NodeKind::Union:
    case NodeKind::Or:
    case NodeKind::Concat:
    case NodeKind::And:
    case NodeKind::Until: {
      const char* sep = ast.kind == NodeKind::Union   ? " + "
                        : ast.kind == NodeKind::Or    ? " | "
                        : ast.kind == NodeKind::And   ? " & "
                        : ast.kind == NodeKind::Until ? " U "
                                                      : " ";
      print_child(ast.children[0], precedence(ast.children[0].kind) <= p, out);
      out += sep;
      print_child(ast.children[1], precedence(ast.children[1].kind) < p, out);
      return;
    }
    case NodeKind::Star:
      print_child(ast.children[0], precedence(ast.children[0].kind) < p, out);
      out += '*';
      return;
    case NodeKind::Not:
      out += '!';
      print_child(ast.children[0], precedence(ast.children[0].kind) < p, out);
      return;
    case NodeKind::Next:
    case NodeKind::Eventually:
    case NodeKind::Always:
      out += ast.kind == NodeKind::Next ? "X " : ast.kind == NodeKind::Eventually ? "F " : "G ";
      print_child(ast.children[0], precedence(ast.children[0].kind) < p, out);
      return;
  }
}

// ---------------------------------------------------------------- Thompson

struct Fragment {
  int start;
  int end;
};

Fragment build_thompson(const SpecAst& ast, const Alphabet& alphabet, Nfa& nfa) {
  switch (ast.kind) {
    case NodeKind::Epsilon: {
      Fragment f{nfa.add_state(), nfa.add_state()};
      nfa.add_edge(f.start, kEpsilon, f.end);
      return f;
    }
    case NodeKind::Atom: {
      auto it = std::lower_bound(alphabet.begin(), alphabet.end(), ast.atom);
      Fragment f{nfa.add_state(), nfa.add_state()};
      nfa.add_edge(f.start, static_cast<int>(it - alphabet.begin()), f.end);
      return f;
    }
    case NodeKind::Concat: {
      Fragment a = build_thompson(ast.children[0], alphabet, nfa);
      Fragment b = build_thompson(ast.children[1], alphabet, nfa);
      nfa.add_edge(a.end, kEpsilon, b.start);
      return {a.start, b.end};
    }
    case NodeKind::Union: {
      Fragment f{nfa.add_state(), nfa.add_state()};
      for (const auto& c : ast.children) {
        Fragment g = build_thompson(c, alphabet, nfa);
        nfa.add_edge(f.start, kEpsilon, g.start);
        nfa.add_edge(g.end, kEpsilon, f.end);
      }
      return f;
    }
    case NodeKind::Star: {
      Fragment f{nfa.add_state(), nfa.add_state()};
      Fragment g = build_thompson(ast.children[0], alphabet, nfa);
      nfa.add_edge(f.start, kEpsilon, g.start);
      nfa.add_edge(f.start, kEpsilon, f.end);
      nfa.add_edge(g.end, kEpsilon, g.start);
      nfa.add_edge(g.end, kEpsilon, f.end);
      return f;
    }
    default:
      throw ValidationError("node '" + std::string(kind_name(ast.kind)) + "' is not a regular-expression operator");
  }
}

// ---------------------------------------------------------------- LTL progression

// A clause is a conjunction of obligations for the remaining suffix; a
// state is a disjunction of clauses. The empty clause means "satisfied".
using Clause = std::vector<int>;
using Dnf = std::vector<Clause>;

class Progression {
 public:
  Progression(const Alphabet& alphabet) : alphabet_(alphabet) {}

  int intern(const SpecAst& f) {
    std::string key = to_string(f);
    auto [it, inserted] = ids_.emplace(key, static_cast<int>(formulas_.size()));
    if (inserted) formulas_.push_back(f);
    return it->second;
  }

  static Dnf normalize(Dnf dnf) {
    for (auto& c : dnf) {
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
    }
    std::sort(dnf.begin(), dnf.end(), [](const Clause& a, const Clause& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    dnf.erase(std::unique(dnf.begin(), dnf.end()), dnf.end());
    Dnf kept;
    for (auto& c : dnf) {
      bool absorbed = std::any_of(kept.begin(), kept.end(), [&](const Clause& k) {
        return std::includes(c.begin(), c.end(), k.begin(), k.end());
      });
      if (!absorbed) kept.push_back(std::move(c));
    }
    std::sort(kept.begin(), kept.end());
    return kept;
  }

  static Dnf conjoin(const Dnf& a, const Dnf& b) {
    Dnf out;
    for (const auto& x : a)
      for (const auto& y : b) {
        Clause c = x;
        c.insert(c.end(), y.begin(), y.end());
        out.push_back(std::move(c));
      }
    return normalize(std::move(out));
  }

  static Dnf disjoin(Dnf a, const Dnf& b) {
    a.insert(a.end(), b.begin(), b.end());
    return normalize(std::move(a));
  }

  // Obligations to discharge from the next position on, after reading `letter`.
  Dnf step(int obligation, int letter) {
    const SpecAst f = formulas_[static_cast<std::size_t>(obligation)];
    const Dnf kTrue{Clause{}};
    const Dnf kFalse{};
    switch (f.kind) {
      case NodeKind::True:
        return kTrue;
      case NodeKind::Atom:
        return alphabet_[static_cast<std::size_t>(letter)] == f.atom ? kTrue : kFalse;
      case NodeKind::Not:
        return alphabet_[static_cast<std::size_t>(letter)] != f.children[0].atom ? kTrue : kFalse;
      case NodeKind::And:
        return conjoin(step(intern(f.children[0]), letter), step(intern(f.children[1]), letter));
      case NodeKind::Or:
        return disjoin(step(intern(f.children[0]), letter), step(intern(f.children[1]), letter));
      case NodeKind::Next:
        return obligation_dnf(f.children[0]);
      case NodeKind::Eventually:
        return disjoin(step(intern(f.children[0]), letter), Dnf{Clause{obligation}});
      case NodeKind::Until: {
        Dnf hold = conjoin(step(intern(f.children[0]), letter), Dnf{Clause{obligation}});
        return disjoin(step(intern(f.children[1]), letter), hold);
      }
      default:
        throw ValidationError("node '" + std::string(kind_name(f.kind)) + "' is not a co-safe LTL operator");
    }
  }

  Dnf obligation_dnf(const SpecAst& f) {
    if (f.kind == NodeKind::True) return Dnf{Clause{}};
    return Dnf{Clause{intern(f)}};
  }

  Dnf successor(const Dnf& state, int letter) {
    Dnf out;
    for (const auto& clause : state) {
      Dnf acc{Clause{}};
      for (int o : clause) {
        acc = conjoin(acc, step(o, letter));
        if (acc.empty()) break;
      }
      out = disjoin(std::move(out), acc);
    }
    return out;
  }

 private:
  const Alphabet& alphabet_;
  std::map<std::string, int> ids_;
  std::vector<SpecAst> formulas_;
};

Dfa compile_ltl(const SpecAst& ast, const Alphabet& alphabet) {
  Progression prog(alphabet);
  const int k = static_cast<int>(alphabet.size());
  std::map<Dnf, int> ids;
  std::vector<Dnf> states;
  auto intern = [&](Dnf d) {
    auto [it, inserted] = ids.emplace(d, static_cast<int>(states.size()));
    if (inserted) states.push_back(std::move(d));
    return it->second;
  };
  auto accepting = [](const Dnf& d) { return !d.empty() && d.front().empty(); };

  intern(prog.obligation_dnf(ast));
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < states.size(); ++i) {
    std::vector<int> row(static_cast<std::size_t>(k), automata::kNoState);
    // Accepting states are terminal: only minimal good prefixes are kept.
    if (!accepting(states[i])) {
      for (int a = 0; a < k; ++a) {
        Dnf next = prog.successor(states[i], a);
        if (!next.empty()) row[static_cast<std::size_t>(a)] = intern(std::move(next));
      }
    }
    rows.push_back(std::move(row));
  }
  Dfa out(alphabet, static_cast<int>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    out.set_accepting(static_cast<int>(i), accepting(states[i]));
    for (int a = 0; a < k; ++a)
      if (rows[i][static_cast<std::size_t>(a)] != automata::kNoState)
        out.set_transition(static_cast<int>(i), a, rows[i][static_cast<std::size_t>(a)]);
  }
  return automata::minimize(out);
}

}  // namespace

std::string_view kind_name(NodeKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "?";
}

SpecAst SpecAst::make_atom(std::string name) {
  SpecAst a;
  a.kind = NodeKind::Atom;
  a.atom = std::move(name);
  return a;
}

SpecAst SpecAst::make(NodeKind kind, std::vector<SpecAst> children) {
  SpecAst a;
  a.kind = kind;
  a.children = std::move(children);
  return a;
}

bool is_re(const SpecAst& ast) {
  return all_kinds(ast, {NodeKind::Atom, NodeKind::Epsilon, NodeKind::Concat, NodeKind::Union, NodeKind::Star});
}

bool is_ltl(const SpecAst& ast) {
  if (!all_kinds(ast, {NodeKind::True, NodeKind::Atom, NodeKind::Not, NodeKind::And, NodeKind::Or, NodeKind::Next,
                       NodeKind::Until, NodeKind::Eventually}))
    return false;
  if (ast.kind == NodeKind::Not && (ast.children.size() != 1 || ast.children[0].kind != NodeKind::Atom)) return false;
  return std::all_of(ast.children.begin(), ast.children.end(), [](const SpecAst& c) { return is_ltl(c); });
}

std::vector<std::string> atoms(const SpecAst& ast) {
  std::set<std::string> s;
  collect_atoms(ast, s);
  return {s.begin(), s.end()};
}

SpecAst parse_re(std::string_view text) { return ReParser(text).parse(); }

SpecAst parse_ltl(std::string_view text) { return LtlParser(text).parse(); }

std::string to_string(const SpecAst& ast) {
  std::string out;
  print(ast, out);
  return out;
}

nlohmann::json to_json(const SpecAst& ast) {
  nlohmann::json j{{"kind", kind_name(ast.kind)}};
  if (ast.kind == NodeKind::Atom) j["name"] = ast.atom;
  if (!ast.children.empty()) {
    j["children"] = nlohmann::json::array();
    for (const auto& c : ast.children) j["children"].push_back(to_json(c));
  }
  return j;
}

SpecAst ast_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    for (const auto& [k, name] : kKindNames) {
      if (name != kind) continue;
      if (k == NodeKind::Atom) {
        std::string atom = j.at("name").get<std::string>();
        if (!automata::is_identifier(atom)) throw ValidationError("invalid atom name '" + atom + "'");
        return SpecAst::make_atom(std::move(atom));
      }
      std::vector<SpecAst> children;
      if (j.contains("children"))
        for (const auto& c : j.at("children")) children.push_back(ast_from_json(c));
      return SpecAst::make(k, std::move(children));
    }
    throw ValidationError("unknown node kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed AST JSON: ") + e.what());
  }
}

automata::Nfa thompson(const SpecAst& re, const Alphabet& alphabet) {
  Nfa nfa;
  nfa.alphabet = alphabet;
  Fragment f = build_thompson(re, alphabet, nfa);
  nfa.initial = {f.start};
  nfa.accepting = {f.end};
  return nfa;
}

Dfa compile(const SpecAst& ast, const Alphabet& alphabet) {
  for (const auto& a : atoms(ast)) {
    if (!std::binary_search(alphabet.begin(), alphabet.end(), a))
      throw ValidationError("atom '" + a + "' is not in the alphabet");
  }
  if (is_re(ast)) return automata::minimize(automata::determinize(thompson(ast, alphabet)));
  if (is_ltl(ast)) return compile_ltl(ast, alphabet);
  throw ValidationError("specification mixes regular-expression and LTL operators");
}

}  // namespace overwatch::spec

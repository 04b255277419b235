#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "overwatch/automata.hpp"

namespace overwatch::spec {

enum class NodeKind {
  Atom,
  Epsilon,
  True,
  Not,
  And,
  Or,
  Next,
  Until,
  Eventually,
  Always,
  Concat,
  Union,
  Star,
};

std::string_view kind_name(NodeKind kind);

/// Parsed task specification: either a regular expression (atom, epsilon,
/// concat, union, star) or a co-safe LTL formula (true, atom, not-atom, and,
/// or, next, until, eventually).
struct SpecAst {
  NodeKind kind = NodeKind::Epsilon;
  std::string atom;
  std::vector<SpecAst> children;

  static SpecAst make_atom(std::string name);
  static SpecAst make(NodeKind kind, std::vector<SpecAst> children = {});

  bool operator==(const SpecAst&) const = default;
};

bool is_re(const SpecAst& ast);
bool is_ltl(const SpecAst& ast);

/// Sorted distinct atom names.
std::vector<std::string> atoms(const SpecAst& ast);

/// Grammar: identifiers, `eps`, juxtaposition or `.` for concatenation, `+`
/// for union, postfix `*`, parentheses. Star binds tightest, then
/// concatenation, then union. Binary operators nest to the right.
SpecAst parse_re(std::string_view text);

/// Grammar: `true`, identifiers, `!`, `&`, `|`, `X`, `U`, `F`, `G`,
/// parentheses; unary > U > & > |, U right-associative. Only the co-safe
/// fragment is accepted: `!` must sit directly above an atom and `G` is only
/// allowed as `F G atom`, which is read as `F atom`.
SpecAst parse_ltl(std::string_view text);

/// Surface syntax that re-parses to a structurally equal tree.
std::string to_string(const SpecAst& ast);

nlohmann::json to_json(const SpecAst& ast);
SpecAst ast_from_json(const nlohmann::json& j);

/// Thompson construction for RE trees.
automata::Nfa thompson(const SpecAst& re, const automata::Alphabet& alphabet);

/// Minimal trim DFA for the spec. RE trees go through Thompson, subset
/// construction and minimization. LTL trees are expanded by formula
/// progression; the automaton accepts the minimal good prefixes, i.e. a
/// word is accepted when it satisfies the formula and no proper prefix does.
automata::Dfa compile(const SpecAst& ast, const automata::Alphabet& alphabet);

}  // namespace overwatch::spec

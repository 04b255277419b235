#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace overwatch::automata {

/// Sorted, duplicate-free list of proposition letters. A letter is referred
/// to by its index in this list.
using Alphabet = std::vector<std::string>;

/// A word is a sequence of letter names.
using Word = std::vector<std::string>;

inline constexpr int kNoState = -1;
inline constexpr int kEpsilon = -1;

/// Builds a canonical alphabet (sorted, deduplicated). Throws ValidationError
/// if a name is not an identifier.
Alphabet make_alphabet(std::vector<std::string> letters);
Alphabet alphabet_union(const Alphabet& a, const Alphabet& b);
bool is_identifier(std::string_view name);

/// Nondeterministic automaton with epsilon moves; only used as an
/// intermediate for construction algorithms.
struct Nfa {
  struct Edge {
    int src;
    int letter;  // index into alphabet, or kEpsilon
    int dst;
  };

  int num_states = 0;
  Alphabet alphabet;
  std::vector<Edge> edges;
  std::vector<int> initial;
  std::vector<int> accepting;

  int add_state() { return num_states++; }
  void add_edge(int src, int letter, int dst) { edges.push_back({src, letter, dst}); }
  void validate() const;
};

/// Deterministic automaton G = (X, E, f, x0, XF) with a partial transition
/// function. States are 0..num_states()-1.
class Dfa {
 public:
  Dfa() : Dfa(Alphabet{}, 1) {}
  Dfa(Alphabet alphabet, int num_states);

  int num_states() const noexcept { return static_cast<int>(accepting_.size()); }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  int num_letters() const noexcept { return static_cast<int>(alphabet_.size()); }

  int initial() const noexcept { return initial_; }
  void set_initial(int state);

  bool is_accepting(int state) const { return accepting_.at(state); }
  void set_accepting(int state, bool accepting = true);
  std::vector<int> accepting_states() const;

  /// Target of f(state, letter), or kNoState when undefined.
  int next(int state, int letter) const { return delta_[index(state, letter)]; }
  void set_transition(int src, int letter, int dst);
  int num_transitions() const;

  /// Index of `name` in the alphabet, or -1.
  int letter_index(std::string_view name) const;

  int add_state();

  /// True when no accepting state is reachable from the initial state.
  bool empty_language() const;

  /// Checks every structural invariant; throws ValidationError.
  void validate() const;

  bool operator==(const Dfa&) const = default;

 private:
  std::size_t index(int state, int letter) const {
    return static_cast<std::size_t>(state) * alphabet_.size() + static_cast<std::size_t>(letter);
  }

  Alphabet alphabet_;
  std::vector<int> delta_;
  std::vector<bool> accepting_;
  int initial_ = 0;
};

/// Subset construction. Output states are the nonempty reachable subsets,
/// numbered in breadth-first discovery order.
Dfa determinize(const Nfa& nfa);

/// Restricts to states reachable from x0 and co-reachable to XF. An empty
/// language yields the one-state rejecting automaton.
Dfa trim(const Dfa& dfa);

/// Hopcroft partition refinement followed by canonical breadth-first
/// numbering, so language-equal inputs give identical automata.
Dfa minimize(const Dfa& dfa);

Nfa to_nfa(const Dfa& dfa);

/// Same automaton over a larger alphabet; new letters have no transitions.
Dfa extend_alphabet(const Dfa& dfa, const Alphabet& alphabet);

bool accepts(const Dfa& dfa, const Word& word);
bool accepts_indices(const Dfa& dfa, std::span<const int> word);

/// L(a) == L(b); differing alphabets are padded to their union.
bool language_equal(const Dfa& a, const Dfa& b);

enum class CombineKind { Concat, Union, Star, Intersect };

/// Regular-language combinators. Concat/Union/Intersect take two operands,
/// Star one. Intersect requires equal alphabets.
Dfa combine(CombineKind kind, std::span<const Dfa> operands);

/// Synchronous product: a letter moves every part that owns it and leaves
/// the others in place; accepting when every part accepts.
Dfa parallel_compose(std::span<const Dfa> parts);

/// Natural projection onto `block`: letters outside the block are erased.
Dfa project(const Dfa& dfa, const Alphabet& block);

/// JSON schema: {states, alphabet, transitions: [[src, letter, dst]],
/// initial, accepting}. State names are decimal indices.
nlohmann::json to_json(const Dfa& dfa);
Dfa dfa_from_json(const nlohmann::json& j);

std::string to_dot(const Dfa& dfa, std::string_view name = "G");

}  // namespace overwatch::automata

#pragma once

#include <span>
#include <vector>

#include "overwatch/automata.hpp"

namespace overwatch::decomp {

/// Parallel subtask automata G_1..G_N whose shuffle reconstructs the global
/// task automaton. `partition[i]` is the alphabet of `parts[i]`.
struct Decomposition {
  std::vector<automata::Dfa> parts;
  std::vector<automata::Alphabet> partition;
  bool verified = false;

  std::size_t size() const noexcept { return parts.size(); }
};

/// Iterated bisection over disjoint alphabet blocks. Bipartitions are tried
/// in lexicographic order of their smaller block; the first one whose
/// projections recompose to `g` is kept and both halves are split further.
/// Parts are ordered by their smallest letter.
Decomposition decompose(const automata::Dfa& g);

/// True iff the parallel composition of `parts` is language-equal to `g`.
/// Throws ValidationError when two parts share a letter.
bool check_decomposition(const automata::Dfa& g, std::span<const automata::Dfa> parts);

/// Candidate first blocks E_a in the order decompose tries them.
std::vector<automata::Alphabet> bipartition_order(const automata::Alphabet& alphabet);

}  // namespace overwatch::decomp

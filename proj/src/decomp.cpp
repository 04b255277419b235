#include "overwatch/decomp.hpp"

#include <algorithm>

#include "overwatch/error.hpp"

namespace overwatch::decomp {

using automata::Alphabet;
using automata::Dfa;

std::vector<Alphabet> bipartition_order(const Alphabet& alphabet) {
  const std::size_t n = alphabet.size();
  std::vector<Alphabet> blocks;
  if (n < 2 || n > 20) return blocks;
  for (unsigned long mask = 1; mask + 1 < (1UL << n); ++mask) {
    Alphabet a, b;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1UL ? a : b).push_back(alphabet[i]);
    if (a.size() > b.size()) continue;
    if (a.size() == b.size() && !(a < b)) continue;
    blocks.push_back(std::move(a));
  }
  std::sort(blocks.begin(), blocks.end());
  return blocks;
}

namespace {

Alphabet complement(const Alphabet& sigma, const Alphabet& block) {
  Alphabet out;
  std::set_difference(sigma.begin(), sigma.end(), block.begin(), block.end(), std::back_inserter(out));
  return out;
}

void split(const Dfa& h, std::vector<Dfa>& out) {
  for (const auto& block_a : bipartition_order(h.alphabet())) {
    Alphabet block_b = complement(h.alphabet(), block_a);
    Dfa pa = automata::project(h, block_a);
    Dfa pb = automata::project(h, block_b);
    if (automata::language_equal(automata::parallel_compose(std::vector{pa, pb}), h)) {
      split(pa, out);
      split(pb, out);
      return;
    }
  }
  out.push_back(h);
}

}  // namespace

Decomposition decompose(const Dfa& g) {
  Dfa global = automata::minimize(g);
  std::vector<Dfa> parts;
  if (global.empty_language())
    parts.push_back(global);
  else
    split(global, parts);
  std::stable_sort(parts.begin(), parts.end(), [](const Dfa& a, const Dfa& b) {
    if (a.alphabet().empty() || b.alphabet().empty()) return b.alphabet().empty() && !a.alphabet().empty();
    return a.alphabet().front() < b.alphabet().front();
  });

  Decomposition d;
  d.parts = std::move(parts);
  for (const auto& p : d.parts) d.partition.push_back(p.alphabet());
  d.verified = check_decomposition(global, d.parts);
  return d;
}

bool check_decomposition(const Dfa& g, std::span<const Dfa> parts) {
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      Alphabet shared;
      std::set_intersection(parts[i].alphabet().begin(), parts[i].alphabet().end(), parts[j].alphabet().begin(),
                            parts[j].alphabet().end(), std::back_inserter(shared));
      if (!shared.empty())
        throw ValidationError("decomposition parts " + std::to_string(i) + " and " + std::to_string(j) +
                              " share letter '" + shared.front() + "'");
    }
  }
  return automata::language_equal(automata::parallel_compose(parts), g);
}

}  // namespace overwatch::decomp

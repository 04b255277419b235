#include "overwatch/automata.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>

#include "overwatch/error.hpp"

namespace overwatch::automata {

bool is_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!alpha(name.front())) return false;
  return std::all_of(name.begin() + 1, name.end(),
                     [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); });
}

Alphabet make_alphabet(std::vector<std::string> letters) {
  for (const auto& l : letters) {
    if (!is_identifier(l)) throw ValidationError("invalid letter name '" + l + "'");
  }
  std::sort(letters.begin(), letters.end());
  letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
  return letters;
}

Alphabet alphabet_union(const Alphabet& a, const Alphabet& b) {
  Alphabet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void Nfa::validate() const {
  auto in_range = [&](int s) { return s >= 0 && s < num_states; };
  for (const auto& e : edges) {
    if (!in_range(e.src) || !in_range(e.dst)) throw ValidationError("NFA edge endpoint out of range");
    if (e.letter != kEpsilon && (e.letter < 0 || e.letter >= static_cast<int>(alphabet.size())))
      throw ValidationError("NFA edge letter out of range");
  }
  for (int s : initial)
    if (!in_range(s)) throw ValidationError("NFA initial state out of range");
  for (int s : accepting)
    if (!in_range(s)) throw ValidationError("NFA accepting state out of range");
}

Dfa::Dfa(Alphabet alphabet, int num_states)
    : alphabet_(std::move(alphabet)),
      delta_(static_cast<std::size_t>(num_states) * alphabet_.size(), kNoState),
      accepting_(static_cast<std::size_t>(num_states), false) {
  if (num_states < 1) throw ValidationError("a DFA needs at least one state");
  if (!std::is_sorted(alphabet_.begin(), alphabet_.end()) ||
      std::adjacent_find(alphabet_.begin(), alphabet_.end()) != alphabet_.end())
    throw ValidationError("DFA alphabet must be sorted and duplicate-free");
}

void Dfa::set_initial(int state) {
  if (state < 0 || state >= num_states()) throw ValidationError("initial state out of range");
  initial_ = state;
}

void Dfa::set_accepting(int state, bool accepting) {
  if (state < 0 || state >= num_states()) throw ValidationError("accepting state out of range");
  accepting_[static_cast<std::size_t>(state)] = accepting;
}

std::vector<int> Dfa::accepting_states() const {
  std::vector<int> out;
  for (int s = 0; s < num_states(); ++s)
    if (accepting_[static_cast<std::size_t>(s)]) out.push_back(s);
  return out;
}

void Dfa::set_transition(int src, int letter, int dst) {
  if (src < 0 || src >= num_states() || dst < kNoState || dst >= num_states())
    throw ValidationError("transition endpoint out of range");
  if (letter < 0 || letter >= num_letters()) throw ValidationError("transition letter out of range");
  delta_[index(src, letter)] = dst;
}

int Dfa::num_transitions() const {
  return static_cast<int>(std::count_if(delta_.begin(), delta_.end(), [](int t) { return t != kNoState; }));
}

int Dfa::letter_index(std::string_view name) const {
  auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), name);
  if (it == alphabet_.end() || *it != name) return -1;
  return static_cast<int>(it - alphabet_.begin());
}

int Dfa::add_state() {
  delta_.resize(delta_.size() + alphabet_.size(), kNoState);
  accepting_.push_back(false);
  return num_states() - 1;
}

bool Dfa::empty_language() const {
  std::vector<bool> seen(static_cast<std::size_t>(num_states()), false);
  std::deque<int> queue{initial_};
  seen[static_cast<std::size_t>(initial_)] = true;
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    if (is_accepting(s)) return false;
    for (int a = 0; a < num_letters(); ++a) {
      int t = next(s, a);
      if (t != kNoState && !seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = true;
        queue.push_back(t);
      }
    }
  }
  return true;
}

void Dfa::validate() const {
  for (const auto& l : alphabet_)
    if (!is_identifier(l)) throw ValidationError("invalid letter name '" + l + "'");
  if (initial_ < 0 || initial_ >= num_states()) throw ValidationError("initial state out of range");
  for (int t : delta_)
    if (t < kNoState || t >= num_states()) throw ValidationError("transition target out of range");
}

namespace {

std::vector<int> epsilon_closure(const Nfa& nfa, const std::vector<std::vector<int>>& eps,
                                 std::vector<int> set) {
  std::vector<bool> in(static_cast<std::size_t>(nfa.num_states), false);
  for (int s : set) in[static_cast<std::size_t>(s)] = true;
  std::vector<int> stack = set;
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (int t : eps[static_cast<std::size_t>(s)]) {
      if (!in[static_cast<std::size_t>(t)]) {
        in[static_cast<std::size_t>(t)] = true;
        set.push_back(t);
        stack.push_back(t);
      }
    }
  }
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

// Total transition table with an explicit sink at index `n`.
struct Completed {
  int n = 0;  // states including sink
  int k = 0;
  std::vector<int> delta;
  std::vector<bool> accepting;
  int initial = 0;
  int at(int s, int a) const { return delta[static_cast<std::size_t>(s * k + a)]; }
};

Completed complete(const Dfa& d) {
  Completed c;
  c.k = d.num_letters();
  c.n = d.num_states() + 1;
  const int sink = d.num_states();
  c.delta.assign(static_cast<std::size_t>(c.n * c.k), sink);
  c.accepting.assign(static_cast<std::size_t>(c.n), false);
  for (int s = 0; s < d.num_states(); ++s) {
    c.accepting[static_cast<std::size_t>(s)] = d.is_accepting(s);
    for (int a = 0; a < c.k; ++a) {
      int t = d.next(s, a);
      if (t != kNoState) c.delta[static_cast<std::size_t>(s * c.k + a)] = t;
    }
  }
  c.initial = d.initial();
  return c;
}

// Hopcroft's algorithm. Returns the block index of every state.
std::vector<int> hopcroft(const Completed& c) {
  const int n = c.n;
  const int k = c.k;
  std::vector<std::vector<std::vector<int>>> inverse(static_cast<std::size_t>(k),
                                                     std::vector<std::vector<int>>(static_cast<std::size_t>(n)));
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < k; ++a) inverse[static_cast<std::size_t>(a)][static_cast<std::size_t>(c.at(s, a))].push_back(s);

  std::vector<std::vector<int>> blocks;
  std::vector<int> block_of(static_cast<std::size_t>(n), 0);
  {
    std::vector<int> acc, rej;
    for (int s = 0; s < n; ++s) (c.accepting[static_cast<std::size_t>(s)] ? acc : rej).push_back(s);
    if (!acc.empty()) blocks.push_back(acc);
    if (!rej.empty()) blocks.push_back(rej);
    for (std::size_t b = 0; b < blocks.size(); ++b)
      for (int s : blocks[b]) block_of[static_cast<std::size_t>(s)] = static_cast<int>(b);
  }
  if (blocks.size() < 2 || k == 0) return block_of;

  std::vector<std::vector<bool>> waiting_flag;
  std::deque<std::pair<int, int>> waiting;
  auto push = [&](int b, int a) {
    if (static_cast<std::size_t>(b) >= waiting_flag.size())
      waiting_flag.resize(static_cast<std::size_t>(b) + 1, std::vector<bool>(static_cast<std::size_t>(k), false));
    if (!waiting_flag[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)]) {
      waiting_flag[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = true;
      waiting.emplace_back(b, a);
    }
  };
  int smaller = blocks[0].size() <= blocks[1].size() ? 0 : 1;
  for (int a = 0; a < k; ++a) push(smaller, a);

  std::vector<int> touched_count;
  std::vector<int> marked;
  while (!waiting.empty()) {
    auto [splitter, letter] = waiting.front();
    waiting.pop_front();
    waiting_flag[static_cast<std::size_t>(splitter)][static_cast<std::size_t>(letter)] = false;

    std::vector<int> preds;
    for (int t : blocks[static_cast<std::size_t>(splitter)])
      for (int s : inverse[static_cast<std::size_t>(letter)][static_cast<std::size_t>(t)]) preds.push_back(s);
    if (preds.empty()) continue;

    touched_count.assign(blocks.size(), 0);
    std::vector<bool> in_preds(static_cast<std::size_t>(n), false);
    std::vector<int> touched_blocks;
    for (int s : preds) {
      if (in_preds[static_cast<std::size_t>(s)]) continue;
      in_preds[static_cast<std::size_t>(s)] = true;
      int b = block_of[static_cast<std::size_t>(s)];
      if (touched_count[static_cast<std::size_t>(b)]++ == 0) touched_blocks.push_back(b);
    }
    std::sort(touched_blocks.begin(), touched_blocks.end());
    for (int b : touched_blocks) {
      auto& block = blocks[static_cast<std::size_t>(b)];
      if (touched_count[static_cast<std::size_t>(b)] == static_cast<int>(block.size())) continue;
      std::vector<int> inside, outside;
      for (int s : block) (in_preds[static_cast<std::size_t>(s)] ? inside : outside).push_back(s);
      const int fresh = static_cast<int>(blocks.size());
      block = std::move(outside);
      for (int s : inside) block_of[static_cast<std::size_t>(s)] = fresh;
      const bool inside_smaller = inside.size() <= blocks[static_cast<std::size_t>(b)].size();
      blocks.push_back(std::move(inside));
      for (int a = 0; a < k; ++a) {
        bool b_waiting = static_cast<std::size_t>(b) < waiting_flag.size() &&
                         waiting_flag[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
        if (b_waiting)
          push(fresh, a);
        else
          push(inside_smaller ? fresh : b, a);
      }
    }
  }
  return block_of;
}

}  // namespace

Dfa determinize(const Nfa& nfa) {
  nfa.validate();
  const int k = static_cast<int>(nfa.alphabet.size());
  std::vector<std::vector<int>> eps(static_cast<std::size_t>(nfa.num_states));
  std::vector<std::vector<std::vector<int>>> moves(static_cast<std::size_t>(nfa.num_states),
                                                   std::vector<std::vector<int>>(static_cast<std::size_t>(k)));
  for (const auto& e : nfa.edges) {
    if (e.letter == kEpsilon)
      eps[static_cast<std::size_t>(e.src)].push_back(e.dst);
    else
      moves[static_cast<std::size_t>(e.src)][static_cast<std::size_t>(e.letter)].push_back(e.dst);
  }
  std::vector<bool> nfa_accepting(static_cast<std::size_t>(nfa.num_states), false);
  for (int s : nfa.accepting) nfa_accepting[static_cast<std::size_t>(s)] = true;

  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> subsets;
  std::vector<std::vector<int>> targets;  // per subset, per letter
  auto intern = [&](std::vector<int> subset) {
    auto [it, inserted] = ids.emplace(subset, static_cast<int>(subsets.size()));
    if (inserted) subsets.push_back(std::move(subset));
    return it->second;
  };

  auto start = epsilon_closure(nfa, eps, nfa.initial);
  if (start.empty()) {
    // No initial state: empty language over the given alphabet.
    return Dfa(nfa.alphabet, 1);
  }
  intern(start);
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    std::vector<int> row(static_cast<std::size_t>(k), kNoState);
    for (int a = 0; a < k; ++a) {
      std::vector<int> step;
      for (int s : subsets[i])
        for (int t : moves[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]) step.push_back(t);
      if (step.empty()) continue;
      row[static_cast<std::size_t>(a)] = intern(epsilon_closure(nfa, eps, std::move(step)));
    }
    targets.push_back(std::move(row));
  }

  Dfa out(nfa.alphabet, static_cast<int>(subsets.size()));
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    for (int a = 0; a < k; ++a) {
      int t = targets[i][static_cast<std::size_t>(a)];
      if (t != kNoState) out.set_transition(static_cast<int>(i), a, t);
    }
    bool acc = std::any_of(subsets[i].begin(), subsets[i].end(),
                           [&](int s) { return nfa_accepting[static_cast<std::size_t>(s)]; });
    out.set_accepting(static_cast<int>(i), acc);
  }
  out.set_initial(0);
  return out;
}

Dfa trim(const Dfa& dfa) {
  const int n = dfa.num_states();
  const int k = dfa.num_letters();
  std::vector<bool> reach(static_cast<std::size_t>(n), false);
  std::deque<int> queue{dfa.initial()};
  reach[static_cast<std::size_t>(dfa.initial())] = true;
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (int a = 0; a < k; ++a) {
      int t = dfa.next(s, a);
      if (t != kNoState && !reach[static_cast<std::size_t>(t)]) {
        reach[static_cast<std::size_t>(t)] = true;
        queue.push_back(t);
      }
    }
  }
  std::vector<std::vector<int>> rev(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < k; ++a)
      if (int t = dfa.next(s, a); t != kNoState) rev[static_cast<std::size_t>(t)].push_back(s);
  std::vector<bool> coreach(static_cast<std::size_t>(n), false);
  for (int s = 0; s < n; ++s) {
    if (dfa.is_accepting(s)) {
      coreach[static_cast<std::size_t>(s)] = true;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (int p : rev[static_cast<std::size_t>(s)]) {
      if (!coreach[static_cast<std::size_t>(p)]) {
        coreach[static_cast<std::size_t>(p)] = true;
        queue.push_back(p);
      }
    }
  }
  if (!coreach[static_cast<std::size_t>(dfa.initial())]) return Dfa(dfa.alphabet(), 1);

  std::vector<int> remap(static_cast<std::size_t>(n), kNoState);
  int kept = 0;
  for (int s = 0; s < n; ++s)
    if (reach[static_cast<std::size_t>(s)] && coreach[static_cast<std::size_t>(s)]) remap[static_cast<std::size_t>(s)] = kept++;
  Dfa out(dfa.alphabet(), kept);
  for (int s = 0; s < n; ++s) {
    int ns = remap[static_cast<std::size_t>(s)];
    if (ns == kNoState) continue;
    out.set_accepting(ns, dfa.is_accepting(s));
    for (int a = 0; a < k; ++a) {
      int t = dfa.next(s, a);
      if (t != kNoState && remap[static_cast<std::size_t>(t)] != kNoState) out.set_transition(ns, a, remap[static_cast<std::size_t>(t)]);
    }
  }
  out.set_initial(remap[static_cast<std::size_t>(dfa.initial())]);
  return out;
}

Dfa minimize(const Dfa& dfa) {
  dfa.validate();
  Dfa trimmed = trim(dfa);
  if (trimmed.empty_language()) return Dfa(dfa.alphabet(), 1);

  Completed c = complete(trimmed);
  std::vector<int> block_of = hopcroft(c);
  const int sink_block = block_of[static_cast<std::size_t>(c.n - 1)];

  // Canonical breadth-first numbering of blocks, skipping the sink block.
  std::map<int, int> order;
  std::vector<int> representative;
  std::deque<int> queue;
  auto visit = [&](int state) {
    int b = block_of[static_cast<std::size_t>(state)];
    auto [it, inserted] = order.emplace(b, static_cast<int>(representative.size()));
    if (inserted) {
      representative.push_back(state);
      queue.push_back(state);
    }
    return it->second;
  };
  visit(c.initial);
  std::vector<std::vector<int>> rows;
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    std::vector<int> row(static_cast<std::size_t>(c.k), kNoState);
    for (int a = 0; a < c.k; ++a) {
      int t = c.at(s, a);
      if (block_of[static_cast<std::size_t>(t)] == sink_block) continue;
      row[static_cast<std::size_t>(a)] = visit(t);
    }
    rows.push_back(std::move(row));
  }
  Dfa out(dfa.alphabet(), static_cast<int>(representative.size()));
  for (std::size_t i = 0; i < representative.size(); ++i) {
    out.set_accepting(static_cast<int>(i), c.accepting[static_cast<std::size_t>(representative[i])]);
    for (int a = 0; a < c.k; ++a)
      if (rows[i][static_cast<std::size_t>(a)] != kNoState) out.set_transition(static_cast<int>(i), a, rows[i][static_cast<std::size_t>(a)]);
  }
  out.set_initial(0);
  return out;
}

Nfa to_nfa(const Dfa& dfa) {
  Nfa n;
  n.num_states = dfa.num_states();
  n.alphabet = dfa.alphabet();
  for (int s = 0; s < dfa.num_states(); ++s)
    for (int a = 0; a < dfa.num_letters(); ++a)
      if (int t = dfa.next(s, a); t != kNoState) n.add_edge(s, a, t);
  n.initial = {dfa.initial()};
  n.accepting = dfa.accepting_states();
  return n;
}

Dfa extend_alphabet(const Dfa& dfa, const Alphabet& alphabet) {
  Dfa out(alphabet, dfa.num_states());
  for (int a = 0; a < dfa.num_letters(); ++a) {
    int na = out.letter_index(dfa.alphabet()[static_cast<std::size_t>(a)]);
    if (na < 0) throw ValidationError("extend_alphabet: target alphabet misses letter '" + dfa.alphabet()[static_cast<std::size_t>(a)] + "'");
    for (int s = 0; s < dfa.num_states(); ++s)
      if (int t = dfa.next(s, a); t != kNoState) out.set_transition(s, na, t);
  }
  for (int s = 0; s < dfa.num_states(); ++s) out.set_accepting(s, dfa.is_accepting(s));
  out.set_initial(dfa.initial());
  return out;
}

bool accepts_indices(const Dfa& dfa, std::span<const int> word) {
  int s = dfa.initial();
  for (int a : word) {
    if (a < 0 || a >= dfa.num_letters()) throw ValidationError("letter index out of range");
    s = dfa.next(s, a);
    if (s == kNoState) return false;
  }
  return dfa.is_accepting(s);
}

bool accepts(const Dfa& dfa, const Word& word) {
  std::vector<int> idx;
  idx.reserve(word.size());
  for (const auto& l : word) {
    int a = dfa.letter_index(l);
    if (a < 0) throw ValidationError("unknown letter '" + l + "'");
    idx.push_back(a);
  }
  return accepts_indices(dfa, idx);
}

bool language_equal(const Dfa& a, const Dfa& b) {
  Alphabet sigma = alphabet_union(a.alphabet(), b.alphabet());
  Dfa pa = extend_alphabet(a, sigma);
  Dfa pb = extend_alphabet(b, sigma);
  const int k = static_cast<int>(sigma.size());
  auto acc = [](const Dfa& d, int s) { return s != kNoState && d.is_accepting(s); };
  std::map<std::pair<int, int>, bool> seen;
  std::deque<std::pair<int, int>> queue{{pa.initial(), pb.initial()}};
  seen[{pa.initial(), pb.initial()}] = true;
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    if (acc(pa, x) != acc(pb, y)) return false;
    for (int l = 0; l < k; ++l) {
      int nx = x == kNoState ? kNoState : pa.next(x, l);
      int ny = y == kNoState ? kNoState : pb.next(y, l);
      if (nx == kNoState && ny == kNoState) continue;
      if (seen.emplace(std::pair{nx, ny}, true).second) queue.emplace_back(nx, ny);
    }
  }
  return true;
}

namespace {

// Appends `src` (re-indexed over `sigma`) to `dst`, returning the state offset.
int append_nfa(Nfa& dst, const Dfa& src) {
  const int offset = dst.num_states;
  dst.num_states += src.num_states();
  for (int s = 0; s < src.num_states(); ++s) {
    for (int a = 0; a < src.num_letters(); ++a) {
      int t = src.next(s, a);
      if (t == kNoState) continue;
      auto it = std::lower_bound(dst.alphabet.begin(), dst.alphabet.end(), src.alphabet()[static_cast<std::size_t>(a)]);
      dst.add_edge(offset + s, static_cast<int>(it - dst.alphabet.begin()), offset + t);
    }
  }
  return offset;
}

Dfa intersect(const Dfa& a, const Dfa& b) {
  if (a.alphabet() != b.alphabet()) throw ValidationError("intersect requires equal alphabets");
  const int k = a.num_letters();
  std::map<std::pair<int, int>, int> ids;
  std::vector<std::pair<int, int>> pairs;
  auto intern = [&](int x, int y) {
    auto [it, inserted] = ids.emplace(std::pair{x, y}, static_cast<int>(pairs.size()));
    if (inserted) pairs.emplace_back(x, y);
    return it->second;
  };
  intern(a.initial(), b.initial());
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::vector<int> row(static_cast<std::size_t>(k), kNoState);
    auto [x, y] = pairs[i];
    for (int l = 0; l < k; ++l) {
      int nx = a.next(x, l), ny = b.next(y, l);
      if (nx != kNoState && ny != kNoState) row[static_cast<std::size_t>(l)] = intern(nx, ny);
    }
    rows.push_back(std::move(row));
  }
  Dfa out(a.alphabet(), static_cast<int>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out.set_accepting(static_cast<int>(i), a.is_accepting(pairs[i].first) && b.is_accepting(pairs[i].second));
    for (int l = 0; l < k; ++l)
      if (rows[i][static_cast<std::size_t>(l)] != kNoState) out.set_transition(static_cast<int>(i), l, rows[i][static_cast<std::size_t>(l)]);
  }
  return minimize(out);
}

}  // namespace

Dfa combine(CombineKind kind, std::span<const Dfa> operands) {
  const std::size_t arity = kind == CombineKind::Star ? 1 : 2;
  if (operands.size() != arity)
    throw ValidationError("combine: expected " + std::to_string(arity) + " operand(s), got " +
                          std::to_string(operands.size()));
  if (kind == CombineKind::Intersect) return intersect(operands[0], operands[1]);

  Nfa nfa;
  for (const auto& d : operands) nfa.alphabet = alphabet_union(nfa.alphabet, d.alphabet());

  switch (kind) {
    case CombineKind::Union: {
      for (const auto& d : operands) {
        int off = append_nfa(nfa, d);
        nfa.initial.push_back(off + d.initial());
        for (int s : d.accepting_states()) nfa.accepting.push_back(off + s);
      }
      break;
    }
    case CombineKind::Concat: {
      const Dfa& a = operands[0];
      const Dfa& b = operands[1];
      int oa = append_nfa(nfa, a);
      int ob = append_nfa(nfa, b);
      nfa.initial.push_back(oa + a.initial());
      for (int s : a.accepting_states()) nfa.add_edge(oa + s, kEpsilon, ob + b.initial());
      for (int s : b.accepting_states()) nfa.accepting.push_back(ob + s);
      break;
    }
    case CombineKind::Star: {
      const Dfa& a = operands[0];
      int hub = nfa.add_state();
      int oa = append_nfa(nfa, a);
      nfa.initial.push_back(hub);
      nfa.accepting.push_back(hub);
      nfa.add_edge(hub, kEpsilon, oa + a.initial());
      for (int s : a.accepting_states()) nfa.add_edge(oa + s, kEpsilon, hub);
      break;
    }
    case CombineKind::Intersect:
      break;
  }
  return minimize(determinize(nfa));
}

Dfa parallel_compose(std::span<const Dfa> parts) {
  if (parts.empty()) {
    Dfa unit(Alphabet{}, 1);
    unit.set_accepting(0);
    return unit;
  }
  Alphabet sigma;
  for (const auto& p : parts) sigma = alphabet_union(sigma, p.alphabet());
  const int k = static_cast<int>(sigma.size());
  // owner_letter[i][l]: letter index of sigma[l] in part i, or -1.
  std::vector<std::vector<int>> owner_letter;
  for (const auto& p : parts) {
    std::vector<int> row(static_cast<std::size_t>(k));
    for (int l = 0; l < k; ++l) row[static_cast<std::size_t>(l)] = p.letter_index(sigma[static_cast<std::size_t>(l)]);
    owner_letter.push_back(std::move(row));
  }

  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> tuples;
  auto intern = [&](std::vector<int> t) {
    auto [it, inserted] = ids.emplace(t, static_cast<int>(tuples.size()));
    if (inserted) tuples.push_back(std::move(t));
    return it->second;
  };
  std::vector<int> start;
  for (const auto& p : parts) start.push_back(p.initial());
  intern(start);

  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    std::vector<int> row(static_cast<std::size_t>(k), kNoState);
    for (int l = 0; l < k; ++l) {
      std::vector<int> next = tuples[i];
      bool blocked = false;
      for (std::size_t p = 0; p < parts.size() && !blocked; ++p) {
        int pl = owner_letter[p][static_cast<std::size_t>(l)];
        if (pl < 0) continue;
        int t = parts[p].next(next[p], pl);
        if (t == kNoState)
          blocked = true;
        else
          next[p] = t;
      }
      if (!blocked) row[static_cast<std::size_t>(l)] = intern(std::move(next));
    }
    rows.push_back(std::move(row));
  }
  Dfa out(sigma, static_cast<int>(tuples.size()));
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    bool acc = true;
    for (std::size_t p = 0; p < parts.size(); ++p) acc = acc && parts[p].is_accepting(tuples[i][p]);
    out.set_accepting(static_cast<int>(i), acc);
    for (int l = 0; l < k; ++l)
      if (rows[i][static_cast<std::size_t>(l)] != kNoState) out.set_transition(static_cast<int>(i), l, rows[i][static_cast<std::size_t>(l)]);
  }
  return minimize(out);
}

Dfa project(const Dfa& dfa, const Alphabet& block) {
  Nfa nfa;
  nfa.alphabet = block;
  nfa.num_states = dfa.num_states();
  for (int s = 0; s < dfa.num_states(); ++s) {
    for (int a = 0; a < dfa.num_letters(); ++a) {
      int t = dfa.next(s, a);
      if (t == kNoState) continue;
      auto it = std::lower_bound(block.begin(), block.end(), dfa.alphabet()[static_cast<std::size_t>(a)]);
      bool kept = it != block.end() && *it == dfa.alphabet()[static_cast<std::size_t>(a)];
      nfa.add_edge(s, kept ? static_cast<int>(it - block.begin()) : kEpsilon, t);
    }
  }
  nfa.initial = {dfa.initial()};
  nfa.accepting = dfa.accepting_states();
  return minimize(determinize(nfa));
}

nlohmann::json to_json(const Dfa& dfa) {
  nlohmann::json states = nlohmann::json::array();
  for (int s = 0; s < dfa.num_states(); ++s) states.push_back(std::to_string(s));
  nlohmann::json transitions = nlohmann::json::array();
  for (int s = 0; s < dfa.num_states(); ++s)
    for (int a = 0; a < dfa.num_letters(); ++a)
      if (int t = dfa.next(s, a); t != kNoState)
        transitions.push_back({std::to_string(s), dfa.alphabet()[static_cast<std::size_t>(a)], std::to_string(t)});
  nlohmann::json accepting = nlohmann::json::array();
  for (int s : dfa.accepting_states()) accepting.push_back(std::to_string(s));
  return {{"states", states},
          {"alphabet", dfa.alphabet()},
          {"transitions", transitions},
          {"initial", std::to_string(dfa.initial())},
          {"accepting", accepting}};
}

Dfa dfa_from_json(const nlohmann::json& j) {
  try {
    auto name_of = [](const nlohmann::json& v) {
      return v.is_string() ? v.get<std::string>() : std::to_string(v.get<long long>());
    };
    std::map<std::string, int> ids;
    for (const auto& s : j.at("states")) {
      auto [it, inserted] = ids.emplace(name_of(s), static_cast<int>(ids.size()));
      if (!inserted) throw ValidationError("duplicate state name '" + it->first + "'");
    }
    if (ids.empty()) throw ValidationError("automaton has no states");
    auto state = [&](const nlohmann::json& v) {
      auto it = ids.find(name_of(v));
      if (it == ids.end()) throw ValidationError("unknown state '" + name_of(v) + "'");
      return it->second;
    };
    std::vector<std::string> letters = j.at("alphabet").get<std::vector<std::string>>();
    Alphabet sigma = make_alphabet(letters);
    if (sigma.size() != letters.size()) throw ValidationError("duplicate letters in alphabet");
    Dfa d(sigma, static_cast<int>(ids.size()));
    for (const auto& t : j.at("transitions")) {
      if (!t.is_array() || t.size() != 3) throw ValidationError("transition must be [src, letter, dst]");
      int a = d.letter_index(t[1].get<std::string>());
      if (a < 0) throw ValidationError("transition letter '" + t[1].get<std::string>() + "' not in alphabet");
      int src = state(t[0]);
      if (d.next(src, a) != kNoState && d.next(src, a) != state(t[2]))
        throw ValidationError("nondeterministic transition on '" + t[1].get<std::string>() + "'");
      d.set_transition(src, a, state(t[2]));
    }
    d.set_initial(state(j.at("initial")));
    for (const auto& s : j.at("accepting")) d.set_accepting(state(s));
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed automaton JSON: ") + e.what());
  }
}

std::string to_dot(const Dfa& dfa, std::string_view name) {
  std::ostringstream os;
  os << "digraph " << name << " {\n  rankdir=LR;\n  node [shape=circle];\n";
  os << "  __start [shape=point];\n";
  for (int s = 0; s < dfa.num_states(); ++s)
    os << "  " << s << (dfa.is_accepting(s) ? " [shape=doublecircle];\n" : ";\n");
  os << "  __start -> " << dfa.initial() << ";\n";
  for (int s = 0; s < dfa.num_states(); ++s) {
    // Parallel edges are merged into one comma-separated label.
    std::map<int, std::string> labels;
    for (int a = 0; a < dfa.num_letters(); ++a) {
      int t = dfa.next(s, a);
      if (t == kNoState) continue;
      auto& l = labels[t];
      if (!l.empty()) l += ",";
      l += dfa.alphabet()[static_cast<std::size_t>(a)];
    }
    for (const auto& [t, l] : labels) os << "  " << s << " -> " << t << " [label=\"" << l << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace overwatch::automata

// Independent reference implementations used only by the test suites.
#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "overwatch/automata.hpp"
#include "overwatch/decomp.hpp"
#include "overwatch/spec_lang.hpp"
#include "overwatch/trust.hpp"

namespace oracle {

using overwatch::automata::Alphabet;
using overwatch::automata::Dfa;
using overwatch::automata::Nfa;
using overwatch::spec::NodeKind;
using overwatch::spec::SpecAst;

/// All words over {0..k-1} with length <= max_len, shortest first.
inline std::vector<std::vector<int>> all_words(int k, int max_len) {
  std::vector<std::vector<int>> out{{}};
  std::size_t begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (int a = 0; a < k; ++a) {
        auto w = out[i];
        w.push_back(a);
        out.push_back(std::move(w));
      }
    begin = end;
  }
  return out;
}

inline std::vector<std::string> spell(const Alphabet& sigma, const std::vector<int>& w) {
  std::vector<std::string> out;
  for (int a : w) out.push_back(sigma[static_cast<std::size_t>(a)]);
  return out;
}

/// Direct recursive membership test for RE trees.
class ReMatcher {
 public:
  ReMatcher(const SpecAst& re, std::vector<std::string> word) : re_(re), word_(std::move(word)) {}

  bool matches() { return match(re_, 0, word_.size()); }

 private:
  bool match(const SpecAst& n, std::size_t i, std::size_t j) {
    auto key = std::tuple{&n, i, j};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool r = false;
    switch (n.kind) {
      case NodeKind::Epsilon:
        r = i == j;
        break;
      case NodeKind::Atom:
        r = j == i + 1 && word_[i] == n.atom;
        break;
      case NodeKind::Union:
        r = match(n.children[0], i, j) || match(n.children[1], i, j);
        break;
      case NodeKind::Concat:
        for (std::size_t m = i; m <= j && !r; ++m) r = match(n.children[0], i, m) && match(n.children[1], m, j);
        break;
      case NodeKind::Star:
        if (i == j) {
          r = true;
        } else {
          for (std::size_t m = i + 1; m <= j && !r; ++m) r = match(n.children[0], i, m) && match(n, m, j);
        }
        break;
      default:
        throw std::logic_error("not an RE node");
    }
    memo_[key] = r;
    return r;
  }

  const SpecAst& re_;
  std::vector<std::string> word_;
  std::map<std::tuple<const SpecAst*, std::size_t, std::size_t>, bool> memo_;
};

inline bool re_matches(const SpecAst& re, const std::vector<std::string>& word) {
  return ReMatcher(re, word).matches();
}

/// Finite-word LTL semantics evaluated at position `pos`.
inline bool ltl_holds(const SpecAst& f, const std::vector<std::string>& w, std::size_t pos) {
  switch (f.kind) {
    case NodeKind::True:
      return true;
    case NodeKind::Atom:
      return pos < w.size() && w[pos] == f.atom;
    case NodeKind::Not:
      return pos < w.size() && w[pos] != f.children[0].atom;
    case NodeKind::And:
      return ltl_holds(f.children[0], w, pos) && ltl_holds(f.children[1], w, pos);
    case NodeKind::Or:
      return ltl_holds(f.children[0], w, pos) || ltl_holds(f.children[1], w, pos);
    case NodeKind::Next:
      return pos + 1 < w.size() && ltl_holds(f.children[0], w, pos + 1);
    case NodeKind::Eventually:
      for (std::size_t i = pos; i < w.size(); ++i)
        if (ltl_holds(f.children[0], w, i)) return true;
      return false;
    case NodeKind::Until:
      for (std::size_t i = pos; i < w.size(); ++i) {
        if (ltl_holds(f.children[1], w, i)) return true;
        if (!ltl_holds(f.children[0], w, i)) return false;
      }
      return false;
    default:
      throw std::logic_error("not an LTL node");
  }
}

/// Word satisfies `f` and no proper prefix does.
inline bool ltl_minimal_good_prefix(const SpecAst& f, const std::vector<std::string>& w) {
  if (!ltl_holds(f, w, 0)) return false;
  for (std::size_t len = 0; len < w.size(); ++len) {
    std::vector<std::string> prefix(w.begin(), w.begin() + static_cast<long>(len));
    if (ltl_holds(f, prefix, 0)) return false;
  }
  return true;
}

/// Breadth-first NFA simulation.
inline bool nfa_accepts(const Nfa& n, const std::vector<int>& word) {
  auto closure = [&](std::set<int> s) {
    std::deque<int> q(s.begin(), s.end());
    while (!q.empty()) {
      int x = q.front();
      q.pop_front();
      for (const auto& e : n.edges)
        if (e.src == x && e.letter == overwatch::automata::kEpsilon && s.insert(e.dst).second) q.push_back(e.dst);
    }
    return s;
  };
  std::set<int> cur = closure({n.initial.begin(), n.initial.end()});
  for (int a : word) {
    std::set<int> nxt;
    for (const auto& e : n.edges)
      if (cur.count(e.src) && e.letter == a) nxt.insert(e.dst);
    cur = closure(nxt);
  }
  return std::any_of(n.accepting.begin(), n.accepting.end(), [&](int s) { return cur.count(s) > 0; });
}

/// Direct run of a DFA, independent of automata::accepts.
inline bool dfa_run(const Dfa& d, const std::vector<int>& word) {
  int s = d.initial();
  for (int a : word) {
    s = d.next(s, a);
    if (s < 0) return false;
  }
  return d.is_accepting(s);
}

inline SpecAst random_re(std::mt19937_64& rng, int depth, const Alphabet& sigma) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 5);
  int choice = pick(rng);
  if (choice == 0 || depth <= 0) {
    std::uniform_int_distribution<int> leaf(0, static_cast<int>(sigma.size()));
    int l = leaf(rng);
    if (l == static_cast<int>(sigma.size())) return SpecAst::make(NodeKind::Epsilon);
    return SpecAst::make_atom(sigma[static_cast<std::size_t>(l)]);
  }
  if (choice == 1) return SpecAst::make_atom(sigma[std::uniform_int_distribution<std::size_t>(0, sigma.size() - 1)(rng)]);
  if (choice == 2) return SpecAst::make(NodeKind::Star, {random_re(rng, depth - 1, sigma)});
  NodeKind k = choice == 3 ? NodeKind::Union : NodeKind::Concat;
  return SpecAst::make(k, {random_re(rng, depth - 1, sigma), random_re(rng, depth - 1, sigma)});
}

inline Nfa random_nfa(std::mt19937_64& rng, int max_states, const Alphabet& sigma) {
  Nfa n;
  n.alphabet = sigma;
  n.num_states = std::uniform_int_distribution<int>(1, max_states)(rng);
  std::uniform_int_distribution<int> st(0, n.num_states - 1);
  std::uniform_int_distribution<int> let(-1, static_cast<int>(sigma.size()) - 1);
  int edges = std::uniform_int_distribution<int>(0, 2 * n.num_states + 2)(rng);
  for (int i = 0; i < edges; ++i) n.add_edge(st(rng), let(rng), st(rng));
  n.initial = {st(rng)};
  if (std::bernoulli_distribution(0.3)(rng)) n.initial.push_back(st(rng));
  for (int s = 0; s < n.num_states; ++s)
    if (std::bernoulli_distribution(0.35)(rng)) n.accepting.push_back(s);
  return n;
}

inline Dfa random_dfa(std::mt19937_64& rng, int max_states, const Alphabet& sigma, double density = 0.6) {
  int n = std::uniform_int_distribution<int>(1, max_states)(rng);
  Dfa d(sigma, n);
  std::uniform_int_distribution<int> st(0, n - 1);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < static_cast<int>(sigma.size()); ++a)
      if (std::bernoulli_distribution(density)(rng)) d.set_transition(s, a, st(rng));
    d.set_accepting(s, std::bernoulli_distribution(0.4)(rng));
  }
  return d;
}

/// Structural isomorphism of two trim DFAs, built by walking both from the
/// initial states in lockstep.
inline bool isomorphic(const Dfa& a, const Dfa& b) {
  if (a.alphabet() != b.alphabet() || a.num_states() != b.num_states()) return false;
  std::vector<int> map(static_cast<std::size_t>(a.num_states()), -1), inv(map.size(), -1);
  std::deque<int> q{a.initial()};
  map[static_cast<std::size_t>(a.initial())] = b.initial();
  inv[static_cast<std::size_t>(b.initial())] = a.initial();
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    int y = map[static_cast<std::size_t>(x)];
    if (a.is_accepting(x) != b.is_accepting(y)) return false;
    for (int l = 0; l < a.num_letters(); ++l) {
      int tx = a.next(x, l), ty = b.next(y, l);
      if ((tx < 0) != (ty < 0)) return false;
      if (tx < 0) continue;
      if (map[static_cast<std::size_t>(tx)] < 0 && inv[static_cast<std::size_t>(ty)] < 0) {
        map[static_cast<std::size_t>(tx)] = ty;
        inv[static_cast<std::size_t>(ty)] = tx;
        q.push_back(tx);
      } else if (map[static_cast<std::size_t>(tx)] != ty) {
        return false;
      }
    }
  }
  return true;
}

/// Fig. 2 automaton as listed in the text: states {0, 2, 5}, x0 = 0, XF = {5}.
inline Dfa example1_listed() {
  // Stored with indices 0 -> 0, 2 -> 1, 5 -> 2.
  Dfa d({"p1", "p2", "p3"}, 3);
  d.set_transition(0, 0, 1);
  d.set_transition(1, 0, 1);
  d.set_transition(1, 1, 2);
  d.set_transition(1, 2, 2);
  d.set_accepting(2);
  d.set_initial(0);
  return d;
}

/// Random minimal DFA over `sigma` with at most `max_states` states whose
/// language is nonempty and which does not itself split into parallel parts.
/// Used to build shuffle products with a known decomposition.
inline Dfa random_indecomposable_part(std::mt19937_64& rng, int max_states, const Alphabet& pool) {
  for (;;) {
    std::size_t k = std::uniform_int_distribution<std::size_t>(1, pool.size())(rng);
    Alphabet sigma(pool.begin(), pool.begin() + static_cast<long>(k));
    Dfa d = overwatch::automata::minimize(random_dfa(rng, max_states, sigma, 0.7));
    if (d.empty_language() || d.num_states() > max_states) continue;
    if (overwatch::decomp::decompose(d).size() != 1) continue;
    return d;
  }
}


// Random trust parameters with a PSD covariance built as A A^T.
inline overwatch::trust::TrustParams random_trust_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> w(-0.2, 1.0), a(-0.2, 0.2), xi(0.0, 0.02);
  overwatch::trust::TrustParams p;
  double A[3][3];
  for (auto& row : A)
    for (double& v : row) v = a(rng);
  for (int i = 0; i < 3; ++i) {
    p.beta_mean[static_cast<std::size_t>(i)] = w(rng);
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += A[i][k] * A[j][k];
      p.beta_cov[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
    }
  }
  p.residual_var = xi(rng);
  return p;
}

inline overwatch::terrain::CellStats random_cell(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0), v(0.0, 0.01);
  return {u(rng), v(rng), u(rng), v(rng), false};
}

inline overwatch::trust::TrustBelief random_belief(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 1.5), v(0.0, 0.05);
  return {u(rng), v(rng)};
}

}  // namespace oracle

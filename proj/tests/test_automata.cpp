#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "overwatch/automata.hpp"
#include "overwatch/error.hpp"
#include "overwatch/spec_lang.hpp"

using namespace overwatch;
using namespace overwatch::automata;

namespace {

Dfa re(const std::string& text, const Alphabet& sigma) { return spec::compile(spec::parse_re(text), sigma); }

Dfa re(const std::string& text) {
  auto ast = spec::parse_re(text);
  return spec::compile(ast, make_alphabet(spec::atoms(ast)));
}

std::set<std::vector<std::string>> language_upto(const Dfa& d, int max_len) {
  std::set<std::vector<std::string>> out;
  for (const auto& w : oracle::all_words(d.num_letters(), max_len))
    if (oracle::dfa_run(d, w)) out.insert(oracle::spell(d.alphabet(), w));
  return out;
}

}  // namespace

TEST_CASE("determinize: parallel edges collapse") {
  Nfa n;
  n.alphabet = {"a"};
  n.num_states = 3;
  n.add_edge(0, 0, 1);
  n.add_edge(0, 0, 2);
  n.initial = {0};
  n.accepting = {1, 2};
  Dfa d = determinize(n);
  CHECK(d.num_states() == 2);
  CHECK(accepts(d, {"a"}));
  CHECK_FALSE(accepts(d, {}));
  CHECK_FALSE(accepts(d, {"a", "a"}));
}

TEST_CASE("determinize: Thompson NFA of Example 1 matches the listed automaton") {
  auto ast = spec::parse_re("p1 p1* (p2 + p3)");
  Dfa d = determinize(spec::thompson(ast, {"p1", "p2", "p3"}));
  CHECK(language_equal(d, oracle::example1_listed()));
}

TEST_CASE("determinize agrees with NFA simulation on random NFAs") {
  std::mt19937_64 rng(7);
  const Alphabet sigma{"a", "b"};
  const auto words = oracle::all_words(2, 5);
  for (int trial = 0; trial < 100; ++trial) {
    Nfa n = oracle::random_nfa(rng, 6, sigma);
    Dfa d = determinize(n);
    Dfa m = minimize(d);
    for (const auto& w : words) {
      bool expected = oracle::nfa_accepts(n, w);
      REQUIRE(accepts_indices(d, w) == expected);
      REQUIRE(accepts_indices(m, w) == expected);
    }
  }
}

TEST_CASE("minimize: Example 1 automaton is already minimal") {
  Dfa m = minimize(oracle::example1_listed());
  CHECK(m.num_states() == 3);
  CHECK(oracle::isomorphic(m, oracle::example1_listed()));
}

TEST_CASE("minimize: bisimilar accepting sinks merge") {
  Dfa d({"a", "b"}, 3);
  d.set_transition(0, 0, 1);
  d.set_transition(0, 1, 2);
  d.set_accepting(1);
  d.set_accepting(2);
  Dfa m = minimize(d);
  CHECK(m.num_states() == d.num_states() - 1);
  CHECK(language_equal(m, d));
}

TEST_CASE("minimize: empty language gives the one-state rejecting automaton") {
  Dfa d({"a"}, 2);
  d.set_transition(0, 0, 1);
  Dfa m = minimize(d);
  CHECK(m.num_states() == 1);
  CHECK(m.accepting_states().empty());
  CHECK(m.num_transitions() == 0);
}

TEST_CASE("minimize is idempotent and language preserving on random DFAs") {
  std::mt19937_64 rng(11);
  const Alphabet sigma{"a", "b", "c"};
  const auto words = oracle::all_words(3, 6);
  for (int trial = 0; trial < 150; ++trial) {
    Dfa d = oracle::random_dfa(rng, 7, sigma);
    Dfa m = minimize(d);
    Dfa mm = minimize(m);
    REQUIRE(to_json(m).dump() == to_json(mm).dump());
    REQUIRE(language_equal(d, m));
    for (const auto& w : words) REQUIRE(oracle::dfa_run(d, w) == accepts_indices(m, w));
  }
}

TEST_CASE("minimize gives identical output for language-equal inputs") {
  Dfa a = re("a (b a)*");
  Dfa b = re("(a b)* a");
  CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("combine: concatenation after a union of requirements") {
  const Alphabet sigma{"f2", "f3", "f4", "f6"};
  Dfa req1 = re("f3 (f4 + f2)", sigma);
  Dfa req2 = re("f4 f3", sigma);
  Dfa either = combine(CombineKind::Union, std::vector{req1, req2});
  Dfa global = combine(CombineKind::Concat, std::vector{either, re("f6", sigma)});
  CHECK(accepts(global, {"f3", "f4", "f6"}));
  CHECK(accepts(global, {"f4", "f3", "f6"}));
  CHECK(accepts(global, {"f3", "f2", "f6"}));
  CHECK_FALSE(accepts(global, {"f6"}));
  CHECK_FALSE(accepts(global, {"f3", "f4"}));
}

TEST_CASE("combine: star of the empty language is {eps}") {
  Dfa empty({"a"}, 1);
  Dfa s = combine(CombineKind::Star, std::vector{empty});
  CHECK(accepts(s, {}));
  CHECK_FALSE(accepts(s, {"a"}));
  CHECK(language_equal(s, re("eps", {"a"})));
}

TEST_CASE("combine: intersection of a*b and ab*") {
  const Alphabet sigma{"a", "b"};
  Dfa x = re("a* b", sigma);
  Dfa y = re("a b*", sigma);
  Dfa both = combine(CombineKind::Intersect, std::vector{x, y});
  for (const auto& w : oracle::all_words(2, 3)) {
    bool expected = oracle::dfa_run(x, w) && oracle::dfa_run(y, w);
    CHECK(accepts_indices(both, w) == expected);
  }
  CHECK(language_upto(both, 6) == std::set<std::vector<std::string>>{{"a", "b"}});
}

TEST_CASE("combine: arity and alphabet errors") {
  Dfa a = re("a");
  CHECK_THROWS_AS(combine(CombineKind::Star, std::vector{a, a}), ValidationError);
  CHECK_THROWS_AS(combine(CombineKind::Concat, std::vector{a}), ValidationError);
  CHECK_THROWS_AS(combine(CombineKind::Intersect, std::vector{a, re("b")}), ValidationError);
}

TEST_CASE("combine: union over different alphabets uses their union") {
  Dfa u = combine(CombineKind::Union, std::vector{re("a"), re("b")});
  CHECK(u.alphabet() == Alphabet{"a", "b"});
  CHECK(accepts(u, {"a"}));
  CHECK(accepts(u, {"b"}));
}

TEST_CASE("accepts on the Example 1 automaton") {
  Dfa g = oracle::example1_listed();
  CHECK(accepts(g, {"p1", "p1", "p2"}));
  CHECK_FALSE(accepts(g, {}));
  CHECK_FALSE(accepts(g, {"p2"}));
  CHECK_THROWS_AS(accepts(g, {"p9"}), ValidationError);
}

TEST_CASE("language_equal") {
  Dfa x = re("p1 p1* (p2 + p3)");
  Dfa y = spec::compile(spec::parse_ltl("p1 & X(p1 U (p2 | p3))"), {"p1", "p2", "p3"});
  CHECK(language_equal(x, y));
  CHECK(language_equal(x, minimize(x)));

  Dfa a = re("a (b a)*");
  Dfa b = re("(a b)* a");
  CHECK(language_equal(a, b));
  CHECK(language_upto(a, 6) == language_upto(b, 6));
  CHECK_FALSE(language_equal(a, re("a b a")));
  // Alphabets are padded before comparing.
  CHECK(language_equal(re("a", {"a"}), re("a", {"a", "z"})));
}

TEST_CASE("parallel_compose: shuffle of two letters") {
  Dfa s = parallel_compose(std::vector{re("a"), re("b")});
  CHECK(language_upto(s, 4) == std::set<std::vector<std::string>>{{"a", "b"}, {"b", "a"}});
}

TEST_CASE("parallel_compose: shared letters synchronize") {
  Dfa s = parallel_compose(std::vector{re("a"), re("a")});
  CHECK(language_upto(s, 3) == std::set<std::vector<std::string>>{{"a"}});
}

TEST_CASE("parallel_compose: projection and size properties on random parts") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    Dfa p = minimize(oracle::random_dfa(rng, 4, {"a", "b"}));
    Dfa q = minimize(oracle::random_dfa(rng, 4, {"c"}));
    if (p.empty_language() || q.empty_language()) continue;
    Dfa s = parallel_compose(std::vector{p, q});
    CHECK(s.num_states() <= p.num_states() * q.num_states());
    CHECK(language_equal(project(s, p.alphabet()), p));
    CHECK(language_equal(project(s, q.alphabet()), q));
  }
}

TEST_CASE("project erases letters outside the block") {
  Dfa d = re("a b c");
  Dfa pa = project(d, {"a", "c"});
  CHECK(language_equal(pa, re("a c")));
  Dfa pb = project(d, {"b"});
  CHECK(language_equal(pb, re("b")));
}

TEST_CASE("json round trip and validation") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    Dfa d = minimize(oracle::random_dfa(rng, 5, {"a", "b"}));
    CHECK(dfa_from_json(to_json(d)) == d);
  }
  auto j = to_json(oracle::example1_listed());
  j["transitions"].push_back({"0", "p1", "2"});
  CHECK_THROWS_AS(dfa_from_json(j), ValidationError);
  auto k = to_json(oracle::example1_listed());
  k["transitions"].push_back({"0", "q", "1"});
  CHECK_THROWS_AS(dfa_from_json(k), ValidationError);
}

TEST_CASE("dot export lists states and labelled edges") {
  std::string dot = to_dot(oracle::example1_listed());
  CHECK(dot.find("2 [shape=doublecircle]") != std::string::npos);
  CHECK(dot.find("1 -> 2 [label=\"p2,p3\"]") != std::string::npos);
}

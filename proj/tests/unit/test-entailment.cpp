#include <random>

#include <catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "generators.hpp"
#include "olog/entailment.hpp"
#include "olog/instance.hpp"
#include "oracles.hpp"

namespace {

  using namespace olog;

  Bound at(std::size_t n) {
    return Bound{n};
  }

  FactSet reflexive(FactSet const& fs) {
    FactSet out;
    for (auto const& f : fs) {
      if (f.is_reflexive()) {
        out.insert(f);
      }
    }
    return out;
  }

}  // namespace

TEST_CASE("enumerate_equations on small graphs", "[entailment]") {
  CHECK(enumerate_equations(Graph{}, at(3)).empty());

  Graph one;
  one.add_type("X");
  auto const eqs = enumerate_equations(one, at(3));
  CHECK(eqs == FactSet{Fact{Path::identity("X"), Path::identity("X")}});

  auto const fam = fx::olog("family/family.olog");
  auto const fam_eqs = enumerate_equations(fam.graph, at(2));
  CHECK(fam_eqs.contains(Fact{Path{"person", {"parents", "w"}}, Path{"person", {"mother"}}}));
  for (auto const& p : oracle::all_paths(fam.graph, 2)) {
    CHECK(fam_eqs.contains(Fact{p, p}));
  }
}

TEST_CASE("enumerate_equations matches brute-force pairing", "[entailment][oracle]") {
  gen::Rng rng(11);
  for (int round = 0; round < 30; ++round) {
    auto const g = gen::graph(rng, 3, 4);
    FactSet    expected;
    auto const paths = oracle::all_paths(g, 3);
    for (auto const& p : paths) {
      for (auto const& q : paths) {
        if (p.source == q.source && oracle::end_of(g, p) == oracle::end_of(g, q)) {
          expected.insert(Fact{p, q});
        }
      }
    }
    CHECK(enumerate_equations(g, at(3)) == expected);
  }
}

TEST_CASE("the family fact is a single non-trivial class", "[entailment]") {
  auto const s = fx::olog("family/family.olog");
  auto const c = saturate(s, at(2));
  Path const pw{"person", {"parents", "w"}};
  Path const m{"person", {"mother"}};
  CHECK(c.equivalent(pw, m));
  CHECK(c.representative(pw) == m);
  CHECK(entails(s, Fact{pw, m}, at(2)).entailed());
  CHECK(entails(s, Fact{m, pw}, at(2)).entailed());

  auto const cons = consequence(s, at(2));
  CHECK(cons.size() == reflexive(cons).size() + 2);
}

TEST_CASE("any fact f = f is entailed", "[entailment]") {
  auto const s = fx::olog("employee/employee.olog");
  for (auto const& p : oracle::all_paths(s.graph, 2)) {
    auto const r = entails(Specification{"bare", s.graph, {}, {}}, Fact{p, p}, at(2));
    CHECK(r.entailed());
  }
}

TEST_CASE("employee facts compose", "[entailment]") {
  auto const s = fx::olog("employee/employee.olog");
  auto const g = s.graph;
  CHECK(entails(s, fx::fact(g, "manager;manager;works_in = works_in"), at(3)).entailed());
  CHECK(entails(s, fx::fact(g, "secretary;manager;works_in = id(department)"), at(3)).entailed());
  CHECK(entails(s, fx::fact(g, "secretary;works_in;secretary = secretary"), at(3)).entailed());
  CHECK_FALSE(entails(s, fx::fact(g, "manager = id(employee)"), at(3)).entailed());
  CHECK_FALSE(entails(s, fx::fact(g, "first_name = last_name"), at(3)).entailed());
}

TEST_CASE("factorial: declared facts hold, unrelated ones are not derived", "[entailment]") {
  auto const s = fx::olog("factorial/factorial.olog");
  auto const g = s.graph;
  CHECK(entails(s, fx::fact(g, "i1;f = s;m"), at(3)).entailed());
  auto const r = entails(s, fx::fact(g, "d;f = s;m"), at(3));
  CHECK(r.verdict == Verdict::not_derivable_within_bound);
  CHECK(r.lhs_representative != r.rhs_representative);
  CHECK(to_string(r.verdict) == "not-derivable-within-bound");
}

TEST_CASE("facts with different sources are ill-typed", "[entailment]") {
  auto const s = fx::olog("factorial/factorial.olog");
  Fact const f{Path{"E", {"i0", "f"}}, Path{"A", {"i1", "f"}}};
  try {
    (void) entails(s, f, at(3));
    FAIL("expected ill-typed");
  } catch (Error const& e) {
    CHECK(e.kind() == ErrorKind::ill_typed);
  }
}

TEST_CASE("facts longer than the bound are rejected", "[entailment]") {
  auto const s = fx::olog("employee/employee.olog");
  try {
    (void) saturate(s, at(1));
    FAIL("expected bound-too-small");
  } catch (Error const& e) {
    CHECK(e.kind() == ErrorKind::bound_too_small);
    CHECK(std::string(e.what()).find("secretary;works_in = id(department)") != std::string::npos);
  }
  auto const e = fx::olog("employee/employee.olog");
  CHECK_THROWS_AS(entails(e, fx::fact(e.graph, "manager;manager;manager;works_in = works_in"), at(3)),
                  Error);
}

TEST_CASE("without facts the congruence is discrete", "[entailment]") {
  auto const g = fx::olog("employee/employee.olog").graph;
  Specification const bare{"bare", g, {}, {}};
  auto const c = saturate(bare, at(3));
  for (auto const& cls : c.classes()) {
    CHECK(cls.size() == 1);
  }
  CHECK(c.generators().empty());
  auto const cons = consequence(bare, at(3));
  CHECK(cons == reflexive(cons));
}

TEST_CASE("representatives are shortest, then smallest", "[entailment]") {
  auto const s = fx::olog("employee/employee.olog");
  auto const c = saturate(s, at(3));
  CHECK(c.representative(Path{"employee", {"manager", "manager", "works_in"}})
        == Path{"employee", {"works_in"}});
  CHECK(c.representative(Path{"department", {"secretary", "works_in"}})
        == Path::identity("department"));
  for (auto const& f : c.generators()) {
    CHECK(c.representative(f.lhs) == f.rhs);
    CHECK(f.lhs != f.rhs);
  }
}

TEST_CASE("consequence matches the naive rule oracle on random specs", "[entailment][oracle]") {
  gen::Rng rng(101);
  for (int round = 0; round < 60; ++round) {
    auto const    g = gen::graph(rng, 3, 4);
    Specification s{"r", g, gen::facts(rng, g, 1 + gen::pick(rng, 3), 2), {}};
    for (std::size_t L = 2; L <= 3; ++L) {
      INFO("round " << round << " bound " << L);
      CHECK(consequence(s, at(L)) == oracle::naive_consequence(g, s.facts, L));
    }
  }
}

TEST_CASE("consequence is sound for the fixture data", "[entailment][soundness]") {
  struct Case {
    std::string olog;
    std::string data;
    std::size_t bound;
  };
  for (auto const& c : std::vector<Case>{{"family/family.olog", "family/data", 3},
                                         {"employee/employee.olog", "employee/data", 3},
                                         {"factorial/factorial.olog", "factorial/data", 3},
                                         {"factorial/factorial.olog", "factorial/triangle", 3}}) {
    INFO(c.olog << " " << c.data);
    auto const s = fx::olog(c.olog);
    auto const d = fx::data(s, c.data);
    REQUIRE(satisfies_spec(d, s).satisfied());
    for (auto const& f : consequence(s, at(c.bound))) {
      CHECK(satisfies_fact(d, f).satisfied);
    }
  }
}

TEST_CASE("consequence is monotone in the bound and in the facts", "[entailment][property]") {
  gen::Rng rng(5);
  for (int round = 0; round < 40; ++round) {
    auto const    g = gen::graph(rng, 3, 4);
    Specification s{"r", g, gen::facts(rng, g, 2, 2), {}};
    auto const small = consequence(s, at(2));
    auto const big   = consequence(s, at(3));
    for (auto const& f : small) {
      CHECK(big.contains(f));
    }
    if (auto extra = gen::fact(rng, g, 2)) {
      Specification more = s;
      more.facts.insert(*extra);
      auto const bigger = consequence(more, at(2));
      for (auto const& f : small) {
        CHECK(bigger.contains(f));
      }
    }
  }
}

TEST_CASE("spec_leq orders specifications by entailment", "[entailment]") {
  auto const both = fx::olog("employee/employee.olog");
  auto manager_only = both;
  manager_only.facts.erase(fx::fact(both.graph, "secretary;works_in = id(department)"));
  Specification const empty{"empty", both.graph, {}, {}};

  CHECK(spec_leq(both, both, at(3)));
  CHECK(spec_leq(both, manager_only, at(3)));
  CHECK_FALSE(spec_leq(manager_only, both, at(3)));
  CHECK(spec_leq(both, empty, at(3)));
  CHECK(spec_leq(manager_only, empty, at(3)));

  auto const fam = fx::olog("family/family.olog");
  try {
    (void) spec_leq(both, fam, at(3));
    FAIL("expected differing-graphs");
  } catch (Error const& e) {
    CHECK(e.kind() == ErrorKind::differing_graphs);
  }
}

TEST_CASE("union of fact sets is below both parts", "[entailment][property]") {
  gen::Rng rng(23);
  for (int round = 0; round < 30; ++round) {
    auto const    g = gen::graph(rng, 3, 4);
    Specification a{"a", g, gen::facts(rng, g, 2, 2), {}};
    Specification b{"b", g, gen::facts(rng, g, 2, 2), {}};
    Specification u{"u", g, a.facts, {}};
    u.facts.insert(b.facts.begin(), b.facts.end());
    CHECK(spec_leq(u, a, at(3)));
    CHECK(spec_leq(u, b, at(3)));
    auto const cu = consequence(u, at(3));
    for (auto const& f : consequence(a, at(3))) {
      CHECK(cu.contains(f));
    }
  }
}

TEST_CASE("the intent of data is closed under consequence", "[entailment][instance]") {
  auto const s = fx::olog("family/family.olog");
  auto const d = fx::data(s, "family/data");
  auto const i = intent(d, s.graph, at(2));
  Specification const as_spec{"intent", s.graph, i, {}};
  CHECK(consequence(as_spec, at(2)) == i);
}

TEST_CASE("oversized universes are refused", "[entailment]") {
  Graph g;
  g.add_type("X");
  for (int i = 0; i < 8; ++i) {
    g.add_aspect("a" + std::to_string(i), "X", "X");
  }
  Bound b{12};
  b.max_universe = 1000;
  CHECK_THROWS_AS(saturate(Specification{"big", g, {}, {}}, b), Error);
}

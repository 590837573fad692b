#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fermicurve/singledger.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

using namespace fermicurve;

namespace {

SingSet make(std::vector<int> neg_asc, std::vector<int> exc) {
  SingSet s;
  // Stored with the smallest magnitude first (strictly decreasing values).
  std::sort(neg_asc.begin(), neg_asc.end(), std::greater<int>());
  s.negatives = neg_asc;
  s.excluded = exc;
  return s;
}

using Flat = std::pair<std::vector<int>, std::vector<int>>;
Flat flat(const SingSet& s) {
  std::vector<int> n(s.negatives.rbegin(), s.negatives.rend());
  return {n, s.excluded};
}

}  // namespace

TEST_CASE("contribution multiplier of explicit sets") {
  CHECK(wsing_of_set(make({-1}, {0})) == 1);
  CHECK(wsing_of_set(make({-2, -1}, {0, 2})) == 5);
  CHECK(wsing_of_set(SingSet{}) == 0);
}

TEST_CASE("malformed sets are rejected") {
  SingSet bad1;
  bad1.negatives = {-1};
  CHECK_THROWS_AS(wsing_of_set(bad1), std::invalid_argument);  // unbalanced
  SingSet bad2;
  bad2.negatives = {-1, -1};
  bad2.excluded = {0, 1};
  CHECK_THROWS_AS(wsing_of_set(bad2), std::invalid_argument);  // repeated member
  SingSet bad3;
  bad3.negatives = {1};
  bad3.excluded = {0};
  CHECK_THROWS_AS(wsing_of_set(bad3), std::invalid_argument);  // sign violation
  SingSet bad4;
  bad4.negatives = {-2, -1};  // wrong stored order (must lead with -1)
  bad4.excluded = {0, 1};
  CHECK_THROWS_AS(wsing_of_set(bad4), std::invalid_argument);
}

TEST_CASE("enumeration reproduces the ledger table up to 20pi") {
  auto sets = enumerate_sets(5);
  std::vector<Flat> got;
  for (const auto& s : sets) got.push_back(flat(s));
  const std::vector<Flat> expect = {
      {{-1}, {0}},
      {{-1}, {1}},
      {{-2}, {0}},
      {{-1}, {2}},
      {{-2}, {1}},
      {{-3}, {0}},
      {{-1}, {3}},
      {{-2}, {2}},
      {{-3}, {1}},
      {{-4}, {0}},
      {{-2, -1}, {0, 1}},
      {{-1}, {4}},
      {{-2}, {3}},
      {{-3}, {2}},
      {{-4}, {1}},
      {{-5}, {0}},
      {{-2, -1}, {0, 2}},
      {{-3, -1}, {0, 1}},
  };
  REQUIRE(got.size() == expect.size());
  CHECK(got == expect);
}

TEST_CASE("enumeration limit 1 gives the single minimal set") {
  auto sets = enumerate_sets(1);
  REQUIRE(sets.size() == 1);
  CHECK(flat(sets[0]) == Flat{{-1}, {0}});
}

TEST_CASE("windowed brute force agrees with the enumeration") {
  // Independent enumeration: all balanced subset pairs drawn from the window
  // [-6,-1] x [0,6] with multiplier <= 5.
  std::set<Flat> brute;
  for (int nmask = 0; nmask < (1 << 6); ++nmask)
    for (int emask = 0; emask < (1 << 7); ++emask) {
      std::vector<int> neg, exc;
      for (int b = 0; b < 6; ++b)
        if (nmask & (1 << b)) neg.push_back(-(b + 1));
      for (int b = 0; b < 7; ++b)
        if (emask & (1 << b)) exc.push_back(b);
      if (neg.empty() || neg.size() != exc.size()) continue;
      int mu = 0;
      for (int v : exc) mu += v;
      for (int v : neg) mu -= v;
      if (mu >= 1 && mu <= 5) {
        std::sort(neg.begin(), neg.end());
        brute.insert({neg, exc});
      }
    }
  std::set<Flat> enumd;
  for (const auto& s : enumerate_sets(5)) enumd.insert(flat(s));
  CHECK(brute == enumd);
}

TEST_CASE("group counts follow the quadratic bound") {
  const int maxmu = 9;
  auto sets = enumerate_sets(maxmu);
  std::map<std::pair<int, int>, std::set<int>> sums;  // (mu, m) -> distinct negative sums
  for (const auto& s : sets) {
    int sneg = 0;
    for (int v : s.negatives) sneg += v;
    const int mu = wsing_of_set(s);
    CHECK(4 * s.m() * s.m() <= 4 * mu);  // 4 m^2 pi <= W_sing
    sums[{mu, s.m()}].insert(sneg);
  }
  for (int mu = 1; mu <= maxmu; ++mu)
    for (int m = 1; m * m <= mu; ++m) {
      REQUIRE(sums.count({mu, m}) == 1);
      CHECK(static_cast<int>(sums[{mu, m}].size()) == mu - m * m + 1);
    }
}

TEST_CASE("blow-up polynomials of the minimal sets") {
  SUBCASE("single pole of order one") {
    auto B = blowup_polynomials(make({-1}, {0}));
    CHECK(B.d == 1);
    CHECK(B.vanishing == std::vector<int>{0});
    CHECK(B.p == std::vector<long long>{1, 0});  // p(z) = (z+1) - 1 = z
    CHECK(B.q == std::vector<long long>{1, -1});
  }
  SUBCASE("single pole of order two") {
    auto B = blowup_polynomials(make({-2}, {0}));
    CHECK(B.d == 2);
    CHECK(B.vanishing == std::vector<int>{-1, 0});
    CHECK(B.p == std::vector<long long>{1, 1, 0});  // z(z+1)
    CHECK(B.q == std::vector<long long>{1, -2, 2});
  }
  SUBCASE("empty set is rejected") {
    CHECK_THROWS_AS(blowup_polynomials(SingSet{}), std::invalid_argument);
  }
}

TEST_CASE("ledger-wide polynomial integrality and structure") {
  for (const auto& s : enumerate_sets(5)) {
    auto B = blowup_polynomials(s);
    const int mu = wsing_of_set(s);
    REQUIRE(static_cast<int>(B.p.size()) == B.d + 1);
    REQUIRE(static_cast<int>(B.q.size()) == B.d + 1);
    CHECK(B.p.front() == 1);  // monic
    CHECK(B.q.front() == 1);  // lowest Laurent coefficient
    // First correction coefficient equals minus the contribution multiplier.
    CHECK(B.q[1] == -mu);
    // p vanishes on every listed root (exact integer evaluation).
    for (int v : B.vanishing) {
      long long acc = 0;
      for (long long c : B.p) acc = acc * v + c;
      CHECK(acc == 0);
    }
  }
}

TEST_CASE("table renderings") {
  auto text = sing_table_text(5);
  CHECK(text.find("4pi") != std::string::npos);
  CHECK(text.find("20pi") != std::string::npos);
  CHECK(text.find("-2,-1,0,2") != std::string::npos);
  CHECK(text.find("-3,-1,0,1") != std::string::npos);
  CHECK(text.find("m=2") != std::string::npos);

  auto csv = sing_table_csv(5);
  CHECK(csv.find("wsing_over_4pi,m,negatives,excluded") == 0);
  CHECK(csv.find("5,2,-2 -1,0 2") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 19);  // header + 18 sets
}

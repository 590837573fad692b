#pragma once
// Combinatorial ledger of admissible integer singularity sets, their
// contributions to the first integral in units of 4*pi, the enumeration
// table, and the blow-up polynomials attached to each set.

#include "fermicurve/common.hpp"

#include <string>
#include <vector>

namespace fermicurve {

// An admissible set N of integers, stored by its finite deviation from the
// non-negative integers: the negative members of N (strictly decreasing, so
// the smallest magnitude leads) and the non-negative integers missing from N
// (strictly increasing).  Both lists carry the same length m.
struct SingSet {
  std::vector<int> negatives;
  std::vector<int> excluded;

  int m() const { return static_cast<int>(negatives.size()); }
  // Throws std::invalid_argument when the shape invariants fail.
  void validate() const;
};

// Contribution of the set to the first integral in units of 4*pi:
// sum(excluded) - sum(negatives), a non-negative integer (0 iff both empty).
int wsing_of_set(const SingSet& s);

// All admissible sets with contribution multiplier in [1, max_multiplier],
// ordered by multiplier, then by the number m of negative members, then with
// the smallest-magnitude leading negative first.  For a fixed m the possible
// negative sums range over exactly (multiplier - m^2 + 1) values.
std::vector<SingSet> enumerate_sets(int max_multiplier);

// The degree-d blow-up polynomial pair of a nonempty set (d = -min negative):
//   p(z) = (z+1)...(z+d) + a_1 (z+2)...(z+d) + ... + a_d
// is the unique monic polynomial vanishing on the d integers >= -d outside N;
// q collects (1, a_1, ..., a_d), the Laurent-tail polynomial with lowest
// coefficient one.  All coefficients are exact integers.
struct BlowupPolys {
  int d = 0;
  std::vector<long long> p;  // power-basis coefficients, z^d first (leading 1)
  std::vector<long long> q;  // (1, a_1, ..., a_d)
  std::vector<int> vanishing;  // the d roots of p, ascending
};
BlowupPolys blowup_polynomials(const SingSet& s);

// Aligned text table of all sets with multiplier <= max: one row per
// contribution, columns grouped by m, each cell listing negatives then
// excluded in ascending order.
std::string sing_table_text(int max_multiplier);

// CSV form: header "wsing_over_4pi,m,negatives,excluded" with
// space-separated ascending entries inside the two list fields.
std::string sing_table_csv(int max_multiplier);

}  // namespace fermicurve

#include "fermicurve/singledger.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fermicurve {

void SingSet::validate() const {
  if (negatives.size() != excluded.size())
    throw std::invalid_argument("negative members and excluded non-negatives must balance");
  for (size_t i = 0; i < negatives.size(); ++i) {
    if (negatives[i] >= 0) throw std::invalid_argument("negative member list holds a non-negative");
    if (i > 0 && negatives[i] >= negatives[i - 1])
      throw std::invalid_argument("negative members must strictly decrease");
  }
  for (size_t i = 0; i < excluded.size(); ++i) {
    if (excluded[i] < 0) throw std::invalid_argument("excluded list holds a negative");
    if (i > 0 && excluded[i] <= excluded[i - 1])
      throw std::invalid_argument("excluded members must strictly increase");
  }
}

int wsing_of_set(const SingSet& s) {
  s.validate();
  const int sp = std::accumulate(s.excluded.begin(), s.excluded.end(), 0);
  const int sm = std::accumulate(s.negatives.begin(), s.negatives.end(), 0);
  return sp - sm;
}

namespace {

// All strictly increasing m-tuples from {lo, lo+1, ...} with the given sum,
// ordered with the smallest leading element first.
void pick_increasing(int m, int lo, int sum, std::vector<int>& cur,
                     std::vector<std::vector<int>>& out) {
  if (m == 0) {
    if (sum == 0) out.push_back(cur);
    return;
  }
  // Remaining m elements are distinct and >= first, so first <= sum/m - (m-1)/2.
  for (int first = lo; m * first + m * (m - 1) / 2 <= sum; ++first) {
    cur.push_back(first);
    pick_increasing(m - 1, first + 1, sum - first, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<SingSet> enumerate_sets(int max_multiplier) {
  if (max_multiplier < 1) throw std::invalid_argument("multiplier bound must be at least 1");
  std::vector<SingSet> out;
  for (int mu = 1; mu <= max_multiplier; ++mu) {
    for (int m = 1; m * m <= mu; ++m) {
      // sum(negatives) ranges over [-mu + m(m-1)/2, -m(m+1)/2]; walk it from
      // the least-negative end so the {-1,...} sets lead their row.
      for (int sneg = -m * (m + 1) / 2; sneg >= -mu + m * (m - 1) / 2; --sneg) {
        const int spos = mu + sneg;
        std::vector<std::vector<int>> negs, poss;
        std::vector<int> cur;
        pick_increasing(m, 1, -sneg, cur, negs);  // magnitudes of the negatives
        pick_increasing(m, 0, spos, cur, poss);
        for (const auto& nm : negs)
          for (const auto& ex : poss) {
            SingSet s;
            for (int v : nm) s.negatives.push_back(-v);
            s.excluded = ex;
            s.validate();
            out.push_back(std::move(s));
          }
      }
    }
  }
  return out;
}

BlowupPolys blowup_polynomials(const SingSet& s) {
  s.validate();
  if (s.negatives.empty()) throw std::invalid_argument("blow-up needs a nonempty set");
  BlowupPolys B;
  B.d = -*std::min_element(s.negatives.begin(), s.negatives.end());

  // Vanishing set: the integers in [-d, oo) outside N, i.e. the negatives of
  // [-d, -1] not in the set plus the excluded non-negatives; exactly d many.
  for (int n = -B.d; n < 0; ++n)
    if (std::find(s.negatives.begin(), s.negatives.end(), n) == s.negatives.end())
      B.vanishing.push_back(n);
  for (int e : s.excluded) B.vanishing.push_back(e);
  if (static_cast<int>(B.vanishing.size()) != B.d)
    throw std::invalid_argument("set is inconsistent: vanishing count differs from degree");

  // p(z) = prod (z - v) over the vanishing set, exact integer coefficients,
  // stored leading-first.
  std::vector<long long> p{1};
  for (int v : B.vanishing) {
    std::vector<long long> next(p.size() + 1, 0);
    for (size_t i = 0; i < p.size(); ++i) {
      next[i] += p[i];
      next[i + 1] -= static_cast<long long>(v) * p[i];
    }
    p = std::move(next);
  }
  B.p = p;

  // Peel p against the telescoping basis (z+j)...(z+d), j = 1..d, then 1:
  // each basis element is monic of one lower degree, so the expansion
  // coefficients (1, a_1, ..., a_d) fall out degree by degree and stay
  // integer throughout.
  std::vector<long long> r = p;  // remainder, leading-first, degree d
  B.q.push_back(1);
  for (int j = 1; j <= B.d; ++j) {
    std::vector<long long> basis{1};  // (z+j)(z+j+1)...(z+d), monic
    for (int i = j; i <= B.d; ++i) {
      std::vector<long long> next(basis.size() + 1, 0);
      for (size_t t = 0; t < basis.size(); ++t) {
        next[t] += basis[t];
        next[t + 1] += static_cast<long long>(i) * basis[t];
      }
      basis = std::move(next);
    }
    // Subtract the previous coefficient times its basis element, then read
    // the next coefficient off the new leading term.
    const long long coeff = B.q.back();
    const size_t off = r.size() - basis.size();
    for (size_t t = 0; t < basis.size(); ++t) r[off + t] -= coeff * basis[t];
    if (r[off] != 0)
      throw std::invalid_argument("set is inconsistent: telescoping expansion failed");
    B.q.push_back(r[off + 1]);  // leading term of the degree-(d-j) remainder
  }
  return B;
}

namespace {

std::string set_cell(const SingSet& s) {
  std::ostringstream os;
  std::vector<int> asc(s.negatives.rbegin(), s.negatives.rend());
  bool first = true;
  for (int v : asc) {
    if (!first) os << ",";
    os << v;
    first = false;
  }
  for (int v : s.excluded) {
    if (!first) os << ",";
    os << v;
    first = false;
  }
  return os.str();
}

}  // namespace

std::string sing_table_text(int max_multiplier) {
  auto sets = enumerate_sets(max_multiplier);
  // Collect cells by (multiplier, m).
  int maxm = 1;
  for (const auto& s : sets) maxm = std::max(maxm, s.m());
  std::vector<std::vector<std::vector<std::string>>> cells(
      max_multiplier + 1, std::vector<std::vector<std::string>>(maxm + 1));
  for (const auto& s : sets) cells[wsing_of_set(s)][s.m()].push_back(set_cell(s));

  std::vector<size_t> width(maxm + 1, 0);
  for (int mu = 1; mu <= max_multiplier; ++mu)
    for (int m = 1; m <= maxm; ++m) {
      size_t w = 0;
      for (const auto& c : cells[mu][m]) w += c.size() + 2;
      width[m] = std::max(width[m], w);
    }

  std::ostringstream os;
  {
    std::string head = "W_sing";
    while (head.size() < 8) head += ' ';
    os << head;
  }
  for (int m = 1; m <= maxm; ++m) {
    std::string h = "m=" + std::to_string(m);
    while (h.size() < width[m]) h += ' ';
    os << "| " << h;
  }
  os << "\n";
  for (int mu = 1; mu <= max_multiplier; ++mu) {
    std::string label = std::to_string(4 * mu) + "pi";
    while (label.size() < 8) label += ' ';
    os << label;
    for (int m = 1; m <= maxm; ++m) {
      std::string row;
      for (const auto& c : cells[mu][m]) row += c + "  ";
      while (row.size() < width[m]) row += ' ';
      os << "| " << row;
    }
    os << "\n";
  }
  return os.str();
}

std::string sing_table_csv(int max_multiplier) {
  auto sets = enumerate_sets(max_multiplier);
  std::ostringstream os;
  os << "wsing_over_4pi,m,negatives,excluded\n";
  for (const auto& s : sets) {
    os << wsing_of_set(s) << "," << s.m() << ",";
    std::vector<int> asc(s.negatives.rbegin(), s.negatives.rend());
    for (size_t i = 0; i < asc.size(); ++i) os << (i ? " " : "") << asc[i];
    os << ",";
    for (size_t i = 0; i < s.excluded.size(); ++i) os << (i ? " " : "") << s.excluded[i];
    os << "\n";
  }
  return os.str();
}

}  // namespace fermicurve

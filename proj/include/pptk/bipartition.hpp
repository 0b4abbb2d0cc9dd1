#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pptk/errors.hpp"

namespace pptk {

// A cut S_A : S_B of parties {0..n-1}. Canonical form keeps party 0 on side A.
class Bipartition {
 public:
  Bipartition(std::size_t n_parties, std::set<std::size_t> side_a) : n_(n_parties) {
    if (n_parties < 2) throw PreconditionError("Bipartition: need at least two parties");
    for (auto p : side_a)
      if (p >= n_parties) throw PreconditionError("Bipartition: party index out of range");
    if (side_a.empty() || side_a.size() == n_parties)
      throw PreconditionError("Bipartition: trivial cut (one side empty)");
    std::set<std::size_t> side_b;
    for (std::size_t p = 0; p < n_parties; ++p)
      if (!side_a.count(p)) side_b.insert(p);
    if (!side_a.count(0)) std::swap(side_a, side_b);
    a_.assign(side_a.begin(), side_a.end());
    b_.assign(side_b.begin(), side_b.end());
  }

  // The only cut of a bipartite system.
  static Bipartition bipartite() { return Bipartition(2, {0}); }

  std::size_t party_count() const { return n_; }
  const std::vector<std::size_t>& side_a() const { return a_; }
  const std::vector<std::size_t>& side_b() const { return b_; }
  bool on_side_a(std::size_t party) const { return std::binary_search(a_.begin(), a_.end(), party); }

  // "0|1,2"
  std::string label() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < a_.size(); ++i) os << (i ? "," : "") << a_[i];
    os << '|';
    for (std::size_t i = 0; i < b_.size(); ++i) os << (i ? "," : "") << b_[i];
    return os.str();
  }

  bool operator==(const Bipartition&) const = default;

  // Parses "a|b" where each side is a comma-separated party list; side B may be omitted.
  static Bipartition parse(const std::string& text, std::size_t n_parties) {
    const auto bar = text.find('|');
    const std::string left = text.substr(0, bar);
    std::set<std::size_t> side_a;
    std::stringstream ss(left);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      std::size_t pos = 0;
      unsigned long v = 0;
      try {
        v = std::stoul(tok, &pos);
      } catch (const std::exception&) {
        throw ParseError("cut: bad party index '" + tok + "'");
      }
      if (pos != tok.size()) throw ParseError("cut: bad party index '" + tok + "'");
      side_a.insert(v);
    }
    Bipartition cut(n_parties, side_a);
    if (bar != std::string::npos) {
      std::set<std::size_t> side_b;
      std::stringstream sb(text.substr(bar + 1));
      while (std::getline(sb, tok, ',')) {
        if (tok.empty()) continue;
        try {
          side_b.insert(std::stoul(tok));
        } catch (const std::exception&) {
          throw ParseError("cut: bad party index '" + tok + "'");
        }
      }
      std::set<std::size_t> expect(cut.side_b().begin(), cut.side_b().end());
      std::set<std::size_t> expect_a(cut.side_a().begin(), cut.side_a().end());
      if (side_b != expect && side_b != expect_a)
        throw ParseError("cut: sides of '" + text + "' are not complementary");
    }
    return cut;
  }

 private:
  std::size_t n_;
  std::vector<std::size_t> a_, b_;
};

// All 2^(n-1) - 1 canonical bipartitions, ordered by the bitmask of parties 1..n-1 on side A.
inline std::vector<Bipartition> enumerate_cuts(std::size_t n) {
  if (n < 2) throw PreconditionError("enumerate_cuts: need n >= 2");
  if (n > 20) throw PreconditionError("enumerate_cuts: party count too large");
  std::vector<Bipartition> cuts;
  const std::size_t others = n - 1;
  const std::size_t full = (std::size_t{1} << others) - 1;
  for (std::size_t mask = 0; mask < full; ++mask) {
    std::set<std::size_t> a{0};
    for (std::size_t k = 0; k < others; ++k)
      if (mask & (std::size_t{1} << k)) a.insert(k + 1);
    cuts.emplace_back(n, a);
  }
  return cuts;
}

}  // namespace pptk

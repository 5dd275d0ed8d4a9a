// Relative simplicial homology with exact rational arithmetic: quotient chain
// complexes of closed pairs, Betti numbers, and Poincare polynomials. Works on
// bare simplices over arbitrary integer vertex ids so it serves both
// subcomplex pairs and triangulations built on cell indices.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "complex.hpp"

namespace conleyflow {

using Rational = boost::multiprecision::cpp_rational;

// Betti numbers as coefficients; trailing zeros are trimmed so equal
// polynomials compare equal
class PoincarePolynomial {
 public:
  PoincarePolynomial() = default;
  explicit PoincarePolynomial(std::vector<long> coeffs) : c_(std::move(coeffs)) {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
    for (long v : c_)
      if (v < 0) throw std::invalid_argument("negative coefficient");
  }

  const std::vector<long>& coefficients() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  long coefficient(std::size_t k) const { return k < c_.size() ? c_[k] : 0; }

  long alternating_sum() const {
    long s = 0;
    for (std::size_t k = 0; k < c_.size(); ++k) s += (k % 2 ? -c_[k] : c_[k]);
    return s;
  }

  // "0", "1 + t", "t^2", "2 + 3t^2"
  std::string str() const {
    if (c_.empty()) return "0";
    std::string out;
    for (std::size_t k = 0; k < c_.size(); ++k) {
      if (c_[k] == 0) continue;
      if (!out.empty()) out += " + ";
      if (k == 0) {
        out += std::to_string(c_[k]);
        continue;
      }
      if (c_[k] != 1) out += std::to_string(c_[k]);
      out += 't';
      if (k >= 2) out += '^' + std::to_string(k);
    }
    return out;
  }

  friend bool operator==(const PoincarePolynomial& a, const PoincarePolynomial& b) = default;
  friend auto operator<=>(const PoincarePolynomial& a, const PoincarePolynomial& b) = default;

 private:
  std::vector<long> c_;
};

// rank by Gaussian elimination over the rationals
inline long matrix_rank(std::vector<std::vector<Rational>> M) {
  if (M.empty() || M[0].empty()) return 0;
  const std::size_t rows = M.size(), cols = M[0].size();
  long rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t pivot = row;
    while (pivot < rows && M[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(M[pivot], M[row]);
    for (std::size_t r = row + 1; r < rows; ++r) {
      if (M[r][col] == 0) continue;
      const Rational factor = M[r][col] / M[row][col];
      for (std::size_t c = col; c < cols; ++c) M[r][c] -= factor * M[row][c];
    }
    ++row;
    ++rank;
  }
  return rank;
}

// chain complex of the pair (A, B): per-dimension bases listing the simplices
// of A outside B, and boundary matrices with faces inside B dropped
struct QuotientChainComplex {
  std::vector<std::vector<Simplex>> basis;
  // boundary[k] maps dimension-k chains to dimension-(k-1) chains;
  // boundary[0] is empty
  std::vector<std::vector<std::vector<Rational>>> boundary;
};

// preconditions: every nonempty face of an A member lies in A, B is a subset
// of A, and B is itself closed
inline QuotientChainComplex build_quotient_chain_complex(const std::set<Simplex>& A,
                                                         const std::set<Simplex>& B) {
  for (const auto& s : A) {
    if (!is_canonical_simplex(s)) throw std::domain_error("malformed simplex in pair");
    for (const auto& f : proper_faces(s))
      if (!A.count(f)) throw std::domain_error("pair numerator is not closed");
  }
  for (const auto& s : B) {
    if (!A.count(s)) throw std::domain_error("pair denominator is not contained in numerator");
    for (const auto& f : proper_faces(s))
      if (!B.count(f)) throw std::domain_error("pair denominator is not closed");
  }

  int top = -1;
  for (const auto& s : A) top = std::max(top, dim(s));

  QuotientChainComplex cc;
  cc.basis.assign(static_cast<std::size_t>(top + 1), {});
  std::map<Simplex, std::size_t> pos;
  for (const auto& s : A)  // std::set order is (lexicographic); stable enough, recorded per dim
    if (!B.count(s)) {
      auto& base = cc.basis[static_cast<std::size_t>(dim(s))];
      pos[s] = base.size();
      base.push_back(s);
    }

  cc.boundary.assign(static_cast<std::size_t>(top + 1), {});
  for (std::size_t k = 1; k < cc.basis.size(); ++k) {
    const auto& cols = cc.basis[k];
    const auto& rows = cc.basis[k - 1];
    if (cols.empty() || rows.empty()) continue;
    cc.boundary[k].assign(rows.size(), std::vector<Rational>(cols.size(), 0));
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const Simplex& s = cols[j];
      for (std::size_t i = 0; i < s.size(); ++i) {
        Simplex f = s;
        f.erase(f.begin() + static_cast<std::ptrdiff_t>(i));
        auto it = pos.find(f);
        if (it == pos.end()) continue;  // face lies in B: quotiented away
        cc.boundary[k][it->second][j] = (i % 2 ? Rational(-1) : Rational(1));
      }
    }
  }
  return cc;
}

inline std::vector<long> betti_numbers(const QuotientChainComplex& cc) {
  const std::size_t dims = cc.basis.size();
  std::vector<long> rank_d(dims + 1, 0);
  for (std::size_t k = 1; k < dims; ++k)
    if (!cc.boundary[k].empty()) rank_d[k] = matrix_rank(cc.boundary[k]);
  std::vector<long> beta(dims, 0);
  for (std::size_t k = 0; k < dims; ++k)
    beta[k] = static_cast<long>(cc.basis[k].size()) - rank_d[k] - rank_d[k + 1];
  while (!beta.empty() && beta.back() == 0) beta.pop_back();
  return beta;
}

inline std::vector<long> relative_betti(const std::set<Simplex>& A, const std::set<Simplex>& B) {
  return betti_numbers(build_quotient_chain_complex(A, B));
}

inline std::vector<long> absolute_betti(const std::set<Simplex>& A) { return relative_betti(A, {}); }

inline PoincarePolynomial poincare_polynomial(const std::set<Simplex>& A, const std::set<Simplex>& B) {
  return PoincarePolynomial(relative_betti(A, B));
}

}  // namespace conleyflow

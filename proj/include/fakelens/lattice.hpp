#pragma once

// Integer lattices in Z^c kept in Hermite normal form. Vectors are
// coefficient lists of polynomials (entry j multiplies x^j), and row j of
// the form is the unique basis vector whose highest non-zero entry sits at j.

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fakelens/int_polynomial.hpp"

namespace fakelens {

class EchelonLattice {
 public:
  explicit EchelonLattice(unsigned rank) : rank_(rank), rows_(rank) {}

  static EchelonLattice from_polynomials(unsigned rank, const std::vector<IntPolynomial>& gens) {
    EchelonLattice lat(rank);
    for (const auto& g : gens) lat.insert(g);
    return lat;
  }

  unsigned rank() const { return rank_; }

  std::vector<mpz_class> to_vector(const IntPolynomial& p) const {
    if (p.degree() >= static_cast<int>(rank_)) throw std::invalid_argument("polynomial degree exceeds lattice rank");
    std::vector<mpz_class> v(rank_);
    for (unsigned j = 0; j < rank_; ++j) v[j] = p.coefficient(j);
    return v;
  }

  void insert(const IntPolynomial& p) { insert(to_vector(p)); }

  void insert(std::vector<mpz_class> v) {
    if (v.size() != rank_) throw std::invalid_argument("vector length differs from lattice rank");
    for (unsigned j = rank_; j-- > 0;) {
      if (v[j] == 0) continue;
      auto& row = rows_[j];
      if (!row) {
        if (v[j] < 0)
          for (auto& c : v) c = -c;
        row = std::move(v);
        reduce_below(j);
        return;
      }
      mpz_class& pivot = (*row)[j];
      if (mpz_divisible_p(v[j].get_mpz_t(), pivot.get_mpz_t())) {
        const mpz_class q = v[j] / pivot;
        for (unsigned i = 0; i <= j; ++i) v[i] -= q * (*row)[i];
        continue;
      }
      // Replace the row by the gcd combination and keep going with the remainder.
      mpz_class g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), pivot.get_mpz_t(), v[j].get_mpz_t());
      const mpz_class pa = pivot / g, pv = v[j] / g;
      std::vector<mpz_class> combined(rank_), rest(rank_);
      for (unsigned i = 0; i <= j; ++i) {
        combined[i] = s * (*row)[i] + t * v[i];
        rest[i] = pa * v[i] - pv * (*row)[i];
      }
      row = std::move(combined);
      reduce_below(j);
      v = std::move(rest);
    }
    // v reduced to zero: already in the lattice.
  }

  bool is_full_rank() const {
    for (const auto& r : rows_)
      if (!r) return false;
    return true;
  }

  /// Index [Z^c : L]; requires full rank.
  mpz_class index() const {
    if (!is_full_rank()) throw std::logic_error("index of a lattice that is not of full rank");
    mpz_class prod = 1;
    for (unsigned j = 0; j < rank_; ++j) prod *= (*rows_[j])[j];
    return prod;
  }

  std::optional<std::vector<mpz_class>> coordinates(std::vector<mpz_class> v) const {
    std::vector<mpz_class> coords(rank_);
    for (unsigned j = rank_; j-- > 0;) {
      if (v[j] == 0) continue;
      if (!rows_[j]) return std::nullopt;
      const auto& row = *rows_[j];
      if (!mpz_divisible_p(v[j].get_mpz_t(), row[j].get_mpz_t())) return std::nullopt;
      coords[j] = v[j] / row[j];
      for (unsigned i = 0; i <= j; ++i) v[i] -= coords[j] * row[i];
    }
    return coords;
  }

  bool contains(const std::vector<mpz_class>& v) const { return coordinates(v).has_value(); }
  bool contains(const IntPolynomial& p) const { return contains(to_vector(p)); }

  bool contains(const EchelonLattice& other) const {
    if (other.rank_ != rank_) return false;
    for (const auto& r : other.rows_)
      if (r && !contains(*r)) return false;
    return true;
  }

  friend bool operator==(const EchelonLattice& a, const EchelonLattice& b) {
    return a.rows_ == b.rows_ && a.rank_ == b.rank_;
  }

  /// Rows as polynomials, row j of degree j (zero polynomial for an empty row).
  std::vector<IntPolynomial> basis() const {
    std::vector<IntPolynomial> out;
    for (const auto& r : rows_) out.push_back(r ? IntPolynomial(*r) : IntPolynomial());
    return out;
  }

  std::vector<mpz_class> pivots() const {
    std::vector<mpz_class> out;
    for (unsigned j = 0; j < rank_; ++j) out.push_back(rows_[j] ? (*rows_[j])[j] : mpz_class(0));
    return out;
  }

 private:
  // Reduces entry j of every higher row into [0, pivot_j), then entries of
  // row j itself against lower pivots, keeping the form canonical.
  void reduce_below(unsigned j) {
    auto reduce_entry = [this](std::vector<mpz_class>& target, unsigned col) {
      if (!rows_[col]) return;
      const auto& row = *rows_[col];
      mpz_class q;
      mpz_fdiv_q(q.get_mpz_t(), target[col].get_mpz_t(), row[col].get_mpz_t());
      if (q == 0) return;
      for (unsigned i = 0; i <= col; ++i) target[i] -= q * row[i];
    };
    for (unsigned col = j; col-- > 0;) reduce_entry(*rows_[j], col);
    for (unsigned hi = j + 1; hi < rank_; ++hi) {
      if (!rows_[hi]) continue;
      for (unsigned col = j + 1; col-- > 0;) reduce_entry(*rows_[hi], col);
    }
  }

  unsigned rank_;
  std::vector<std::optional<std::vector<mpz_class>>> rows_;
};

}  // namespace fakelens

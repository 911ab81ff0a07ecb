#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace georelay {

using Symbol = std::uint32_t;

// Arithmetic over GF(2^8) (polynomial 0x11B) or a prime field GF(p).
class FiniteField {
 public:
  static FiniteField gf256();
  static FiniteField prime(std::uint32_t p);
  /// 256 or a prime below 2^31; anything else throws.
  static FiniteField with_order(std::uint32_t q);

  std::uint32_t order() const { return q_; }
  bool is_binary() const { return binary_; }

  Symbol add(Symbol a, Symbol b) const;
  Symbol sub(Symbol a, Symbol b) const;
  Symbol mul(Symbol a, Symbol b) const;
  Symbol inv(Symbol a) const;
  Symbol div(Symbol a, Symbol b) const { return mul(a, inv(b)); }

  bool operator==(const FiniteField& other) const { return q_ == other.q_; }

 private:
  FiniteField() = default;

  std::uint32_t q_ = 0;
  bool binary_ = false;
  std::vector<std::uint8_t> exp_;
  std::vector<std::uint8_t> log_;
};

/// Dense row-major matrix of field symbols.
class FieldMatrix {
 public:
  FieldMatrix() = default;
  FieldMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Symbol& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Symbol at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const Symbol> data() const { return data_; }
  std::span<Symbol> data() { return data_; }

  bool operator==(const FieldMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Symbol> data_;
};

/// Rank by Gaussian elimination (the argument is copied).
std::size_t rank(const FiniteField& field, FieldMatrix m);

/// Solves A x = b for x when A (rows >= cols) has full column rank.
/// Throws std::domain_error when the column rank is deficient.
std::vector<Symbol> solve_full_column_rank(const FiniteField& field, FieldMatrix a,
                                           std::vector<Symbol> b);

}  // namespace georelay

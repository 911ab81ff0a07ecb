#include "georelay/galois.hpp"

#include <stdexcept>
#include <utility>

namespace georelay {
namespace {

bool is_prime(std::uint32_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  base %= m;
  while (e > 0) {
    if (e & 1U) r = r * base % m;
    base = base * base % m;
    e >>= 1U;
  }
  return r;
}

}  // namespace

FiniteField FiniteField::gf256() {
  FiniteField f;
  f.q_ = 256;
  f.binary_ = true;
  f.exp_.assign(512, 0);
  f.log_.assign(256, 0);
  // 3 generates the multiplicative group mod 0x11B.
  unsigned x = 1;
  for (unsigned i = 0; i < 255; ++i) {
    f.exp_[i] = static_cast<std::uint8_t>(x);
    f.log_[x] = static_cast<std::uint8_t>(i);
    unsigned x2 = x << 1U;
    if (x2 & 0x100U) x2 ^= 0x11BU;
    x ^= x2;
  }
  for (unsigned i = 255; i < 512; ++i) f.exp_[i] = f.exp_[i - 255];
  return f;
}

FiniteField FiniteField::prime(std::uint32_t p) {
  if (!is_prime(p) || p >= (1U << 31)) {
    throw std::invalid_argument("prime field order must be a prime below 2^31");
  }
  FiniteField f;
  f.q_ = p;
  return f;
}

FiniteField FiniteField::with_order(std::uint32_t q) {
  if (q == 256) return gf256();
  return prime(q);
}

Symbol FiniteField::add(Symbol a, Symbol b) const {
  if (binary_) return a ^ b;
  return static_cast<Symbol>((static_cast<std::uint64_t>(a) + b) % q_);
}

Symbol FiniteField::sub(Symbol a, Symbol b) const {
  if (binary_) return a ^ b;
  return static_cast<Symbol>((static_cast<std::uint64_t>(a) + q_ - b) % q_);
}

Symbol FiniteField::mul(Symbol a, Symbol b) const {
  if (binary_) {
    if (a == 0 || b == 0) return 0;
    return exp_[static_cast<std::size_t>(log_[a]) + log_[b]];
  }
  return static_cast<Symbol>(static_cast<std::uint64_t>(a) * b % q_);
}

Symbol FiniteField::inv(Symbol a) const {
  if (a == 0) throw std::domain_error("inverse of zero");
  if (binary_) return exp_[255 - log_[a]];
  return static_cast<Symbol>(pow_mod(a, q_ - 2, q_));
}

std::size_t rank(const FiniteField& field, FieldMatrix m) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t pivot = r;
    while (pivot < m.rows() && m.at(pivot, c) == 0) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != r) {
      for (std::size_t j = c; j < m.cols(); ++j) std::swap(m.at(pivot, j), m.at(r, j));
    }
    const Symbol inv = field.inv(m.at(r, c));
    for (std::size_t i = r + 1; i < m.rows(); ++i) {
      const Symbol factor = field.mul(m.at(i, c), inv);
      if (factor == 0) continue;
      for (std::size_t j = c; j < m.cols(); ++j) {
        m.at(i, j) = field.sub(m.at(i, j), field.mul(factor, m.at(r, j)));
      }
    }
    ++r;
  }
  return r;
}

std::vector<Symbol> solve_full_column_rank(const FiniteField& field, FieldMatrix a,
                                           std::vector<Symbol> b) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  if (b.size() != rows) throw std::invalid_argument("right-hand side length mismatch");
  if (rows < cols) throw std::domain_error("underdetermined system");

  for (std::size_t c = 0; c < cols; ++c) {
    std::size_t pivot = c;
    while (pivot < rows && a.at(pivot, c) == 0) ++pivot;
    if (pivot == rows) throw std::domain_error("system matrix is rank deficient");
    if (pivot != c) {
      for (std::size_t j = 0; j < cols; ++j) std::swap(a.at(pivot, j), a.at(c, j));
      std::swap(b[pivot], b[c]);
    }
    const Symbol inv = field.inv(a.at(c, c));
    for (std::size_t j = c; j < cols; ++j) a.at(c, j) = field.mul(a.at(c, j), inv);
    b[c] = field.mul(b[c], inv);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == c) continue;
      const Symbol factor = a.at(i, c);
      if (factor == 0) continue;
      for (std::size_t j = c; j < cols; ++j) {
        a.at(i, j) = field.sub(a.at(i, j), field.mul(factor, a.at(c, j)));
      }
      b[i] = field.sub(b[i], field.mul(factor, b[c]));
    }
  }
  // Surplus rows must be consistent; a mismatch means the data is not a codeword.
  for (std::size_t i = cols; i < rows; ++i) {
    if (b[i] != 0) throw std::domain_error("inconsistent overdetermined system");
  }
  b.resize(cols);
  return b;
}

}  // namespace georelay

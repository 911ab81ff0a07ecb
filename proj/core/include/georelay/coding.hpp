#pragma once

#include <boost/rational.hpp>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "georelay/galois.hpp"

namespace georelay {

struct RegenParams {
  int n_files = 0;         // M
  int n_nodes = 0;         // N
  int reconstruct_k = 0;   // K
  int repair_d = 0;        // D
  int per_node_files = 0;  // alpha
  int per_helper_files = 0;  // beta
  double file_bits = 0.0;  // u

  /// (30, 5, 3, 4, 10, 5) with 20 MB files.
  static RegenParams standard();
};

struct ParamReport {
  bool ok = true;
  std::string violation;
  /// sum_{i<K} min(alpha, (D - i) beta)
  long long storage_sum = 0;
};

ParamReport validate_params(const RegenParams& p);

// Compare against Rational(x), never a bare integer: the mixed operator== of
// older Boost releases recurses forever under C++20 rewritten comparisons.
using Rational = boost::rational<std::int64_t>;

struct OperatingPoint {
  Rational alpha;
  Rational beta;
  Rational gamma;
};

enum class RegenPoint { kMsr, kMbr };

OperatingPoint msr_point(std::int64_t m, std::int64_t k, std::int64_t d);
OperatingPoint mbr_point(std::int64_t m, std::int64_t k, std::int64_t d);

/// Builds integer RegenParams at an operating point; throws if alpha or beta is fractional.
RegenParams instantiate_point(RegenPoint point, int m, int n, int k, int d, double file_bits);

struct RepairRequirement {
  int helpers = 0;
  int per_helper = 0;
  int total = 0;
};

RepairRequirement repair_requirement(RegenPoint point, const RegenParams& p);

struct EncodeOptions {
  std::uint32_t min_field_order = 256;
  int max_attempts = 64;
  /// Download patterns (prefix selectors) that must also reach rank M.
  std::vector<std::vector<int>> required_patterns;
};

// Source symbols, per-node encoding matrices H^(n) (M x alpha) and payloads
// m^(n) = H^(n)^T s.
struct CodedStore {
  FiniteField field = FiniteField::gf256();
  RegenParams params;
  std::uint64_t seed = 0;
  std::vector<Symbol> source;
  std::vector<FieldMatrix> encoders;
  std::vector<std::vector<Symbol>> payloads;
  int attempts = 0;
};

CodedStore encode(const RegenParams& p, const FiniteField& field, std::uint64_t seed,
                  const EncodeOptions& options = {});
/// Same as encode() with a caller-supplied source vector.
CodedStore encode_source(const RegenParams& p, const FiniteField& field, std::uint64_t seed,
                         std::vector<Symbol> source, const EncodeOptions& options = {});

/// Column indices chosen from each node (the A^(n) selectors).
using Selectors = std::vector<std::vector<int>>;

Selectors prefix_selectors(const std::vector<int>& mu);

/// Rank of [H^(n) A^(n)] over all nodes.
std::size_t stacked_rank(const CodedStore& store, const Selectors& selectors);

bool check_mu_reconstructable(const CodedStore& store, const std::vector<int>& mu);
bool check_mu_reconstructable(const CodedStore& store, const Selectors& selectors);

struct NodeDownload {
  std::vector<int> columns;
  std::vector<Symbol> symbols;
};

/// Downloads the selected coded files from each node's payload.
std::vector<NodeDownload> download(const CodedStore& store, const Selectors& selectors);

/// Recovers the source from downloads. Throws std::domain_error when rank < M.
std::vector<Symbol> reconstruct(const CodedStore& store, const std::vector<NodeDownload>& downloads);

/// Little-endian binary: "GRCS", version, q, M, N, K, D, alpha, beta, u, seed,
/// attempts, then encoders, source and payloads as u32 symbols.
void dump(const CodedStore& store, std::ostream& out);
CodedStore load(std::istream& in);

}  // namespace georelay

#include "georelay/coding.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace georelay {

RegenParams RegenParams::standard() {
  return RegenParams{30, 5, 3, 4, 10, 5, 20e6 * 8.0};
}

ParamReport validate_params(const RegenParams& p) {
  ParamReport report;
  auto fail = [&](std::string msg) {
    if (report.ok) {
      report.ok = false;
      report.violation = std::move(msg);
    }
  };
  if (p.n_files < 1 || p.n_nodes < 1 || p.reconstruct_k < 1 || p.repair_d < 1 ||
      p.per_node_files < 1 || p.per_helper_files < 1) {
    fail("counts must be at least 1");
  }
  if (!(p.file_bits > 0.0)) fail("file size must be positive");
  if (!(p.reconstruct_k <= p.repair_d && p.repair_d <= p.n_nodes - 1)) {
    fail("K <= D <= N-1 does not hold");
  }
  long long sum = 0;
  for (int i = 0; i < p.reconstruct_k; ++i) {
    sum += std::min<long long>(p.per_node_files,
                               static_cast<long long>(p.repair_d - i) * p.per_helper_files);
  }
  report.storage_sum = sum;
  if (p.n_files > sum) {
    std::ostringstream msg;
    msg << "M <= sum_{i<K} min(alpha, (D-i)beta) does not hold: M=" << p.n_files
        << " > " << sum;
    fail(msg.str());
  }
  return report;
}

OperatingPoint msr_point(std::int64_t m, std::int64_t k, std::int64_t d) {
  if (k < 1 || d < k || m < 1) throw std::invalid_argument("MSR point needs 1 <= K <= D, M >= 1");
  const Rational alpha(m, k);
  const Rational gamma(m * d, (d - k + 1) * k);
  return {alpha, gamma / d, gamma};
}

OperatingPoint mbr_point(std::int64_t m, std::int64_t k, std::int64_t d) {
  if (k < 1 || d < k || m < 1) throw std::invalid_argument("MBR point needs 1 <= K <= D, M >= 1");
  const Rational gamma(2 * m * d, 2 * k * d - k * k + k);
  return {gamma, gamma / d, gamma};
}

RegenParams instantiate_point(RegenPoint point, int m, int n, int k, int d, double file_bits) {
  const OperatingPoint op = point == RegenPoint::kMsr ? msr_point(m, k, d) : mbr_point(m, k, d);
  if (op.alpha.denominator() != 1 || op.beta.denominator() != 1) {
    throw std::invalid_argument("operating point has fractional alpha or beta");
  }
  return RegenParams{m, n, k, d, static_cast<int>(op.alpha.numerator()),
                     static_cast<int>(op.beta.numerator()), file_bits};
}

RepairRequirement repair_requirement(RegenPoint point, const RegenParams& p) {
  if (p.per_helper_files < 1 || p.per_node_files % p.per_helper_files != 0) {
    throw std::invalid_argument("alpha/beta is not an integer; params are not at the point");
  }
  const int ratio = p.per_node_files / p.per_helper_files;
  const int helpers = point == RegenPoint::kMsr ? ratio + p.reconstruct_k - 1 : ratio;
  return {helpers, p.per_helper_files, helpers * p.per_helper_files};
}

Selectors prefix_selectors(const std::vector<int>& mu) {
  Selectors s(mu.size());
  for (std::size_t n = 0; n < mu.size(); ++n) {
    for (int j = 0; j < mu[n]; ++j) s[n].push_back(j);
  }
  return s;
}

std::size_t stacked_rank(const CodedStore& store, const Selectors& selectors) {
  const auto& p = store.params;
  if (selectors.size() != static_cast<std::size_t>(p.n_nodes)) {
    throw std::invalid_argument("selector count does not match node count");
  }
  std::size_t total = 0;
  for (const auto& s : selectors) total += s.size();
  // Rows are the selected columns of each H^(n); rank is transpose-invariant.
  FieldMatrix stacked(total, static_cast<std::size_t>(p.n_files));
  std::size_t row = 0;
  for (std::size_t n = 0; n < selectors.size(); ++n) {
    for (int col : selectors[n]) {
      if (col < 0 || col >= p.per_node_files) throw std::out_of_range("selector column out of range");
      for (int i = 0; i < p.n_files; ++i) {
        stacked.at(row, static_cast<std::size_t>(i)) = store.encoders[n].at(static_cast<std::size_t>(i), static_cast<std::size_t>(col));
      }
      ++row;
    }
  }
  return rank(store.field, std::move(stacked));
}

bool check_mu_reconstructable(const CodedStore& store, const Selectors& selectors) {
  std::size_t total = 0;
  for (const auto& s : selectors) total += s.size();
  if (total < static_cast<std::size_t>(store.params.n_files)) return false;
  return stacked_rank(store, selectors) == static_cast<std::size_t>(store.params.n_files);
}

bool check_mu_reconstructable(const CodedStore& store, const std::vector<int>& mu) {
  if (mu.size() != static_cast<std::size_t>(store.params.n_nodes)) {
    throw std::invalid_argument("mu length does not match node count");
  }
  for (int m : mu) {
    if (m < 0 || m > store.params.per_node_files) throw std::invalid_argument("mu entry outside [0, alpha]");
  }
  return check_mu_reconstructable(store, prefix_selectors(mu));
}

namespace {

bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

bool all_k_subsets_full_rank(const CodedStore& store) {
  const auto& p = store.params;
  std::vector<int> idx(static_cast<std::size_t>(p.reconstruct_k));
  for (int i = 0; i < p.reconstruct_k; ++i) idx[static_cast<std::size_t>(i)] = i;
  do {
    std::vector<int> mu(static_cast<std::size_t>(p.n_nodes), 0);
    for (int i : idx) mu[static_cast<std::size_t>(i)] = p.per_node_files;
    if (!check_mu_reconstructable(store, prefix_selectors(mu))) return false;
  } while (next_combination(idx, p.n_nodes));
  return true;
}

Symbol draw(std::mt19937_64& rng, std::uint32_t q) { return static_cast<Symbol>(rng() % q); }

}  // namespace

CodedStore encode_source(const RegenParams& p, const FiniteField& field, std::uint64_t seed,
                         std::vector<Symbol> source, const EncodeOptions& options) {
  const ParamReport report = validate_params(p);
  if (p.n_files < 1 || p.n_nodes < 1 || p.per_node_files < 1 || p.reconstruct_k < 1 ||
      p.reconstruct_k > p.n_nodes) {
    throw std::invalid_argument("invalid code parameters: " + report.violation);
  }
  if (static_cast<long long>(p.per_node_files) * p.n_nodes < p.n_files) {
    throw std::invalid_argument("alpha * N < M");
  }
  if (field.order() < options.min_field_order) {
    throw std::invalid_argument("field order below the configured minimum");
  }
  if (source.size() != static_cast<std::size_t>(p.n_files)) {
    throw std::invalid_argument("source length must equal M");
  }
  for (Symbol s : source) {
    if (s >= field.order()) throw std::invalid_argument("source symbol outside the field");
  }
  for (const auto& mu : options.required_patterns) {
    if (mu.size() != static_cast<std::size_t>(p.n_nodes)) {
      throw std::invalid_argument("required pattern length does not match node count");
    }
  }

  CodedStore store;
  store.field = field;
  store.params = p;
  store.seed = seed;
  store.source = std::move(source);
  std::mt19937_64 rng(seed);
  const auto rows = static_cast<std::size_t>(p.n_files);
  const auto cols = static_cast<std::size_t>(p.per_node_files);

  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    store.encoders.assign(static_cast<std::size_t>(p.n_nodes), FieldMatrix(rows, cols));
    for (auto& h : store.encoders) {
      for (Symbol& x : h.data()) x = draw(rng, field.order());
    }
    bool ok = all_k_subsets_full_rank(store);
    for (std::size_t i = 0; ok && i < options.required_patterns.size(); ++i) {
      ok = check_mu_reconstructable(store, options.required_patterns[i]);
    }
    if (!ok) continue;
    store.attempts = attempt;
    store.payloads.assign(static_cast<std::size_t>(p.n_nodes), std::vector<Symbol>(cols, 0));
    for (std::size_t n = 0; n < store.encoders.size(); ++n) {
      for (std::size_t j = 0; j < cols; ++j) {
        Symbol acc = 0;
        for (std::size_t i = 0; i < rows; ++i) {
          acc = field.add(acc, field.mul(store.encoders[n].at(i, j), store.source[i]));
        }
        store.payloads[n][j] = acc;
      }
    }
    return store;
  }
  throw std::runtime_error("encode: retry budget exhausted without a reconstructing code");
}

CodedStore encode(const RegenParams& p, const FiniteField& field, std::uint64_t seed,
                  const EncodeOptions& options) {
  // The source is drawn from a stream independent of the matrix stream.
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<Symbol> source(static_cast<std::size_t>(std::max(p.n_files, 0)));
  for (Symbol& s : source) s = draw(rng, field.order());
  return encode_source(p, field, seed, std::move(source), options);
}

std::vector<NodeDownload> download(const CodedStore& store, const Selectors& selectors) {
  if (selectors.size() != store.payloads.size()) {
    throw std::invalid_argument("selector count does not match node count");
  }
  std::vector<NodeDownload> out(selectors.size());
  for (std::size_t n = 0; n < selectors.size(); ++n) {
    out[n].columns = selectors[n];
    for (int c : selectors[n]) out[n].symbols.push_back(store.payloads[n].at(static_cast<std::size_t>(c)));
  }
  return out;
}

std::vector<Symbol> reconstruct(const CodedStore& store, const std::vector<NodeDownload>& downloads) {
  const auto& p = store.params;
  if (downloads.size() != static_cast<std::size_t>(p.n_nodes)) {
    throw std::invalid_argument("download count does not match node count");
  }
  Selectors selectors;
  std::size_t total = 0;
  for (const auto& d : downloads) {
    if (d.columns.size() != d.symbols.size()) throw std::invalid_argument("download shape mismatch");
    selectors.push_back(d.columns);
    total += d.columns.size();
  }
  if (total < static_cast<std::size_t>(p.n_files)) {
    throw std::domain_error("fewer downloaded symbols than source files");
  }
  FieldMatrix a(total, static_cast<std::size_t>(p.n_files));
  std::vector<Symbol> b;
  b.reserve(total);
  std::size_t row = 0;
  for (std::size_t n = 0; n < downloads.size(); ++n) {
    for (std::size_t j = 0; j < downloads[n].columns.size(); ++j) {
      const int col = downloads[n].columns[j];
      if (col < 0 || col >= p.per_node_files) throw std::out_of_range("download column out of range");
      for (int i = 0; i < p.n_files; ++i) {
        a.at(row, static_cast<std::size_t>(i)) = store.encoders[n].at(static_cast<std::size_t>(i), static_cast<std::size_t>(col));
      }
      b.push_back(downloads[n].symbols[j]);
      ++row;
    }
  }
  return solve_full_column_rank(store.field, std::move(a), std::move(b));
}

namespace {

constexpr std::array<char, 4> kMagic{'G', 'R', 'C', 'S'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFFU);
  out.write(b.data(), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v & 0xFFFFFFFFULL));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (!in) throw std::runtime_error("truncated coded-store stream");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& in) {
  const std::uint64_t lo = get_u32(in);
  const std::uint64_t hi = get_u32(in);
  return lo | (hi << 32);
}

}  // namespace

void dump(const CodedStore& store, std::ostream& out) {
  const auto& p = store.params;
  out.write(kMagic.data(), 4);
  put_u32(out, kVersion);
  put_u32(out, store.field.order());
  put_u32(out, static_cast<std::uint32_t>(p.n_files));
  put_u32(out, static_cast<std::uint32_t>(p.n_nodes));
  put_u32(out, static_cast<std::uint32_t>(p.reconstruct_k));
  put_u32(out, static_cast<std::uint32_t>(p.repair_d));
  put_u32(out, static_cast<std::uint32_t>(p.per_node_files));
  put_u32(out, static_cast<std::uint32_t>(p.per_helper_files));
  put_u64(out, std::bit_cast<std::uint64_t>(p.file_bits));
  put_u64(out, store.seed);
  put_u32(out, static_cast<std::uint32_t>(store.attempts));
  for (const auto& h : store.encoders) {
    for (Symbol x : h.data()) put_u32(out, x);
  }
  for (Symbol s : store.source) put_u32(out, s);
  for (const auto& m : store.payloads) {
    for (Symbol x : m) put_u32(out, x);
  }
}

CodedStore load(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (!in || magic != kMagic) throw std::runtime_error("not a coded-store stream");
  if (get_u32(in) != kVersion) throw std::runtime_error("unsupported coded-store version");
  CodedStore store;
  store.field = FiniteField::with_order(get_u32(in));
  auto& p = store.params;
  p.n_files = static_cast<int>(get_u32(in));
  p.n_nodes = static_cast<int>(get_u32(in));
  p.reconstruct_k = static_cast<int>(get_u32(in));
  p.repair_d = static_cast<int>(get_u32(in));
  p.per_node_files = static_cast<int>(get_u32(in));
  p.per_helper_files = static_cast<int>(get_u32(in));
  p.file_bits = std::bit_cast<double>(get_u64(in));
  store.seed = get_u64(in);
  store.attempts = static_cast<int>(get_u32(in));
  if (p.n_files < 1 || p.n_nodes < 1 || p.per_node_files < 1 || p.n_files > (1 << 20) ||
      p.n_nodes > (1 << 16) || p.per_node_files > (1 << 20)) {
    throw std::runtime_error("corrupt coded-store header");
  }
  const auto rows = static_cast<std::size_t>(p.n_files);
  const auto cols = static_cast<std::size_t>(p.per_node_files);
  store.encoders.assign(static_cast<std::size_t>(p.n_nodes), FieldMatrix(rows, cols));
  for (auto& h : store.encoders) {
    for (Symbol& x : h.data()) x = get_u32(in);
  }
  store.source.resize(rows);
  for (Symbol& s : store.source) s = get_u32(in);
  store.payloads.assign(static_cast<std::size_t>(p.n_nodes), std::vector<Symbol>(cols));
  for (auto& m : store.payloads) {
    for (Symbol& x : m) x = get_u32(in);
  }
  return store;
}

}  // namespace georelay

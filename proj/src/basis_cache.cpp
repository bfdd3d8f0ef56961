#include "btv/basis_cache.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "btv/io.hpp"

namespace btv {

namespace {

class ByteWriter {
public:
  void raw(const char* p, std::size_t n) { buf_.append(p, n); }
  void u64(std::uint64_t x) {
    for (int b = 0; b < 8; ++b) buf_.push_back(static_cast<char>((x >> (8 * b)) & 0xff));
  }
  void f64(double x) { u64(std::bit_cast<std::uint64_t>(x)); }
  const std::string& bytes() const { return buf_; }

private:
  std::string buf_;
};

class ByteReader {
public:
  explicit ByteReader(std::string data) : data_(std::move(data)) {}
  void raw(char* out, std::size_t n) {
    need(n);
    std::memcpy(out, data_.data() + pos_, n);
    pos_ += n;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t x = 0;
    for (int b = 0; b < 8; ++b) x |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + b])) << (8 * b);
    pos_ += 8;
    return x;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  bool at_end() const { return pos_ == data_.size(); }

private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw std::runtime_error("basis file is truncated");
  }
  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_basis(const std::filesystem::path& path, const EigenBasis& basis, double gamma,
                std::uint64_t graph_hash) {
  ByteWriter w;
  w.raw(kBasisMagic, sizeof kBasisMagic);
  w.u64(basis.n_nodes());
  w.u64(basis.n_eig());
  w.f64(gamma);
  w.u64(graph_hash);
  w.f64(basis.lambda_1);
  w.f64(basis.m_inf_bound);
  w.f64(basis.next_eigenvalue);
  for (Eigen::Index i = 0; i < basis.eigenvalues.size(); ++i) w.f64(basis.eigenvalues(i));
  for (Eigen::Index i = 0; i < basis.eigenvalues.size(); ++i) {
    w.f64(i < basis.residuals.size() ? basis.residuals(i) : 0.0);
  }
  for (Eigen::Index c = 0; c < basis.eigenvectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < basis.eigenvectors.rows(); ++r) w.f64(basis.eigenvectors(r, c));
  }
  write_file_atomically(path, w.bytes());
}

EigenBasis load_basis(const std::filesystem::path& path, std::optional<double> expect_gamma,
                      std::optional<std::uint64_t> expect_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  ByteReader r(ss.str());

  char magic[8];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kBasisMagic, sizeof magic) != 0) {
    throw std::runtime_error(path.string() + " is not an eigenbasis file");
  }
  const std::uint64_t n = r.u64();
  const std::uint64_t n_eig = r.u64();
  const double gamma = r.f64();
  const std::uint64_t hash = r.u64();
  if (expect_gamma && *expect_gamma != gamma) throw std::runtime_error(path.string() + ": gamma mismatch");
  if (expect_hash && *expect_hash != hash) throw std::runtime_error(path.string() + ": graph hash mismatch");
  if (n_eig > n || n > (std::uint64_t{1} << 40)) throw std::runtime_error(path.string() + ": bad header");

  EigenBasis basis;
  basis.lambda_1 = r.f64();
  basis.m_inf_bound = r.f64();
  basis.next_eigenvalue = r.f64();
  basis.eigenvalues.resize(static_cast<Eigen::Index>(n_eig));
  basis.residuals.resize(static_cast<Eigen::Index>(n_eig));
  basis.eigenvectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_eig));
  for (Eigen::Index i = 0; i < basis.eigenvalues.size(); ++i) basis.eigenvalues(i) = r.f64();
  for (Eigen::Index i = 0; i < basis.residuals.size(); ++i) basis.residuals(i) = r.f64();
  for (Eigen::Index c = 0; c < basis.eigenvectors.cols(); ++c) {
    for (Eigen::Index row = 0; row < basis.eigenvectors.rows(); ++row) basis.eigenvectors(row, c) = r.f64();
  }
  if (!r.at_end()) throw std::runtime_error(path.string() + ": trailing bytes");
  return basis;
}

EigenBasis truncate_basis(const EigenBasis& basis, std::size_t n_eig) {
  if (n_eig > basis.n_eig()) throw std::invalid_argument("cannot truncate a basis to more vectors");
  if (n_eig == basis.n_eig()) return basis;
  const auto k = static_cast<Eigen::Index>(n_eig);
  EigenBasis out;
  out.eigenvalues = basis.eigenvalues.head(k);
  out.eigenvectors = basis.eigenvectors.leftCols(k);
  out.residuals = basis.residuals.head(k);
  out.lambda_1 = basis.lambda_1;
  out.m_inf_bound = basis.m_inf_bound;
  out.next_eigenvalue = basis.eigenvalues(k);
  return out;
}

BasisCache::BasisCache(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::filesystem::create_directories(*directory_);
}

std::filesystem::path BasisCache::file_for(const Key& key) const {
  std::ostringstream name;
  name << std::hex << std::get<0>(key) << '_' << std::bit_cast<std::uint64_t>(std::get<1>(key)) << '_'
       << std::dec << std::get<2>(key) << ".eig";
  return *directory_ / name.str();
}

const EigenBasis& BasisCache::get(const SparseGraph& graph, double gamma, std::size_t n_eig,
                                  const EigensolverOptions& options) {
  const std::uint64_t hash = graph.content_hash();
  const Key key{hash, gamma, n_eig};
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;

  for (const auto& [k, basis] : entries_) {
    if (std::get<0>(k) == hash && std::get<1>(k) == gamma && std::get<2>(k) > n_eig) {
      return entries_.emplace(key, truncate_basis(basis, n_eig)).first->second;
    }
  }
  if (directory_) {
    const auto file = file_for(key);
    if (std::filesystem::exists(file)) {
      return entries_.emplace(key, load_basis(file, gamma, hash)).first->second;
    }
  }
  ++computations_;
  EigenBasis basis = smallest_eigenpairs(OperatorM(graph, gamma), n_eig, options);
  if (directory_) save_basis(file_for(key), basis, gamma, hash);
  return entries_.emplace(key, std::move(basis)).first->second;
}

}  // namespace btv

#include "rl/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace rl {

namespace {

constexpr char kMagic[8] = {'R', 'L', 'C', 'K', 'P', 'T', '0', '\0'};
constexpr std::uint32_t kVersion = 1;

void put_u32le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

void put_f64le(std::string& out, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  void expect_magic() {
    if (data_.size() < 16 || std::memcmp(data_.data(), kMagic, 8) != 0) {
      throw std::runtime_error("checkpoint: bad magic");
    }
    pos_ = 8;
    const std::uint32_t version = u32();
    if (version != kVersion) {
      throw std::runtime_error("checkpoint: unsupported version " +
                               std::to_string(version));
    }
    u32();  // reserved
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(
               static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= static_cast<std::uint64_t>(
                  static_cast<unsigned char>(data_[pos_ + i]))
              << (8 * i);
    }
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }

  // Reads a f64 that must hold an exact small non-negative integer.
  std::int64_t count(const char* what) {
    const double x = f64();
    const auto n = static_cast<std::int64_t>(x);
    if (!(x >= 0.0) || static_cast<double>(n) != x || n > (1 << 28)) {
      throw std::runtime_error(std::string("checkpoint: invalid ") + what);
    }
    return n;
  }

  bool exhausted() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) {
    if (pos_ + n > data_.size()) {
      throw std::runtime_error("checkpoint: truncated file");
    }
  }

  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  if (ckpt.q.has_value() == ckpt.net.has_value()) {
    throw std::invalid_argument(
        "checkpoint must hold exactly one of table / network");
  }
  std::string out;
  out.append(kMagic, 8);
  put_u32le(out, kVersion);
  put_u32le(out, 0);
  put_f64le(out, static_cast<double>(static_cast<int>(ckpt.experiment)));
  put_f64le(out, static_cast<double>(static_cast<int>(ckpt.algorithm)));
  if (ckpt.q.has_value()) {
    const QTable& q = *ckpt.q;
    put_f64le(out, static_cast<double>(q.rows()));
    put_f64le(out, static_cast<double>(q.cols()));
    for (Eigen::Index r = 0; r < q.rows(); ++r) {
      for (Eigen::Index c = 0; c < q.cols(); ++c) put_f64le(out, q(r, c));
    }
  } else {
    const Network& net = *ckpt.net;
    put_f64le(out, static_cast<double>(net.layers.size() + 1));
    put_f64le(out, static_cast<double>(net.input_size()));
    for (const DenseLayer& l : net.layers) {
      put_f64le(out, static_cast<double>(l.weight.cols()));
    }
    for (const DenseLayer& l : net.layers) {
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
          put_f64le(out, l.weight(r, c));
        }
      }
      for (Eigen::Index c = 0; c < l.bias.size(); ++c) {
        put_f64le(out, l.bias(c));
      }
    }
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write checkpoint: " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string data((std::istreambuf_iterator<char>(file)),
                   std::istreambuf_iterator<char>());
  Reader in(std::move(data));
  in.expect_magic();

  Checkpoint ckpt;
  const std::int64_t exp_tag = in.count("experiment tag");
  const std::int64_t algo_tag = in.count("algorithm tag");
  if (exp_tag > 2) throw std::runtime_error("checkpoint: bad experiment tag");
  if (algo_tag > 3) throw std::runtime_error("checkpoint: bad algorithm tag");
  ckpt.experiment = static_cast<Experiment>(exp_tag);
  ckpt.algorithm = static_cast<Algorithm>(algo_tag);

  if (ckpt.algorithm == Algorithm::Tabular) {
    const std::int64_t rows = in.count("state count");
    const std::int64_t cols = in.count("action count");
    QTable q(rows, cols);
    for (std::int64_t r = 0; r < rows; ++r) {
      for (std::int64_t c = 0; c < cols; ++c) q(r, c) = in.f64();
    }
    ckpt.q = std::move(q);
  } else {
    const std::int64_t size_count = in.count("layer size count");
    if (size_count < 2) throw std::runtime_error("checkpoint: bad layer list");
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(size_count));
    for (auto& s : sizes) {
      s = in.count("layer size");
      if (s < 1) throw std::runtime_error("checkpoint: bad layer size");
    }
    Network net;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
      DenseLayer l;
      l.weight.resize(sizes[i], sizes[i + 1]);
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
          l.weight(r, c) = in.f64();
        }
      }
      l.bias.resize(sizes[i + 1]);
      for (Eigen::Index c = 0; c < l.bias.size(); ++c) l.bias(c) = in.f64();
      net.layers.push_back(std::move(l));
    }
    ckpt.net = std::move(net);
  }
  if (!in.exhausted()) {
    throw std::runtime_error("checkpoint: trailing bytes");
  }
  return ckpt;
}

Checkpoint load_checkpoint_for(const std::string& path, Experiment expected) {
  Checkpoint ckpt = load_checkpoint(path);
  if (ckpt.experiment != expected) {
    throw std::runtime_error("checkpoint experiment tag '" +
                             to_string(ckpt.experiment) +
                             "' does not match requested '" +
                             to_string(expected) + "'");
  }
  return ckpt;
}

}  // namespace rl

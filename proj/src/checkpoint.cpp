#include "pricelab/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "pricelab/errors.hpp"

namespace pricelab {
namespace {

constexpr std::array<char, 8> kMagic = {'P', 'R', 'L', 'B', 'C', 'K', 'P', 'T'};

template <typename T>
void put(std::vector<unsigned char>& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.insert(out.end(), bytes.begin(), bytes.end());
}

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& data) : data_(data) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > data_.size()) {
      throw CheckpointError(CheckpointError::Kind::kTruncated, "checkpoint file is truncated");
    }
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), data_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(bytes.begin(), bytes.end());
    }
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
  }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  const std::vector<unsigned char>& data_;
  std::size_t pos_ = 0;
};

}  // namespace

Checkpoint Checkpoint::from_agent(const DqnAgent& agent, std::uint64_t digest) {
  Checkpoint ck;
  ck.dims = agent.online().dims();
  ck.parameters = agent.online().flatten();
  ck.config_digest = digest;
  ck.training_steps = static_cast<std::uint64_t>(agent.learn_steps());
  return ck;
}

QNetwork Checkpoint::to_network() const {
  QNetwork net(dims);
  net.unflatten(parameters);
  return net;
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  std::vector<unsigned char> out(kMagic.begin(), kMagic.end());
  put<std::uint32_t>(out, ck.version);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ck.dims.size()));
  for (int d : ck.dims) put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  put<std::uint64_t>(out, ck.config_digest);
  put<std::uint64_t>(out, ck.training_steps);
  put<std::uint64_t>(out, ck.parameters.size());
  for (double p : ck.parameters) put<double>(out, p);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw CheckpointError(CheckpointError::Kind::kIo, "cannot write " + path.string());
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw CheckpointError(CheckpointError::Kind::kIo, "write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<std::vector<int>>& expected_dims) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw CheckpointError(CheckpointError::Kind::kIo, "cannot open " + path.string());
  const std::vector<unsigned char> data((std::istreambuf_iterator<char>(file)),
                                        std::istreambuf_iterator<char>());
  if (data.size() < kMagic.size()) {
    throw CheckpointError(CheckpointError::Kind::kTruncated, "checkpoint file is truncated");
  }
  if (!std::equal(kMagic.begin(), kMagic.end(), data.begin())) {
    throw CheckpointError(CheckpointError::Kind::kBadMagic, "not a checkpoint file");
  }
  std::vector<unsigned char> body(data.begin() + kMagic.size(), data.end());
  Reader in(body);
  Checkpoint ck;
  ck.version = in.get<std::uint32_t>();
  if (ck.version != kCheckpointVersion) {
    throw CheckpointError(CheckpointError::Kind::kVersionMismatch,
                          "checkpoint version " + std::to_string(ck.version) + ", expected " +
                              std::to_string(kCheckpointVersion));
  }
  const auto n_dims = in.get<std::uint32_t>();
  if (static_cast<std::size_t>(n_dims) * 4 > in.remaining()) {
    throw CheckpointError(CheckpointError::Kind::kTruncated, "checkpoint file is truncated");
  }
  for (std::uint32_t i = 0; i < n_dims; ++i) ck.dims.push_back(static_cast<int>(in.get<std::uint32_t>()));
  ck.config_digest = in.get<std::uint64_t>();
  ck.training_steps = in.get<std::uint64_t>();
  const auto count = in.get<std::uint64_t>();
  std::uint64_t expected_count = 0;
  for (std::size_t l = 0; l + 1 < ck.dims.size(); ++l) {
    expected_count += static_cast<std::uint64_t>(ck.dims[l]) * ck.dims[l + 1] + ck.dims[l + 1];
  }
  if (count != expected_count) {
    throw CheckpointError(CheckpointError::Kind::kDimensionMismatch,
                          "parameter count does not match layer widths");
  }
  if (count * 8 > in.remaining()) {
    throw CheckpointError(CheckpointError::Kind::kTruncated, "checkpoint file is truncated");
  }
  ck.parameters.resize(count);
  for (auto& p : ck.parameters) p = in.get<double>();
  if (expected_dims && *expected_dims != ck.dims) {
    throw CheckpointError(CheckpointError::Kind::kDimensionMismatch,
                          "checkpoint layer widths differ from the expected network");
  }
  return ck;
}

}  // namespace pricelab

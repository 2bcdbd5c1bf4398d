#pragma once

// Portable agent weights. File layout, all integers and floats little-endian:
//
//   8 bytes   magic "PRLBCKPT"
//   u32       format version (kCheckpointVersion)
//   u32       number of layer widths L+1, then L+1 x u32 widths (input first)
//   u64       config digest
//   u64       training (learn) steps
//   u64       parameter count P
//   P x f64   parameters: for each layer, weights row-major (output neuron
//             major), then that layer's biases

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "pricelab/dqn_agent.hpp"

namespace pricelab {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  std::vector<int> dims;
  std::vector<double> parameters;
  std::uint64_t config_digest = 0;
  std::uint64_t training_steps = 0;

  static Checkpoint from_agent(const DqnAgent& agent, std::uint64_t config_digest);
  QNetwork to_network() const;

  bool operator==(const Checkpoint&) const = default;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);

/// Throws CheckpointError: kIo, kBadMagic, kVersionMismatch, kTruncated, or
/// kDimensionMismatch when `expected_dims` is given and differs.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<std::vector<int>>& expected_dims = std::nullopt);

}  // namespace pricelab

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nest/nn.hpp"

namespace nest::checkpoint {

// on-disk layout: "NESTCKPT" | version u32 | tensor count u32, then per
// tensor: name length u32 | name bytes | rank u32 | dims u32... | f32 data.
// All integers and floats little-endian.
inline constexpr char kMagic[8] = {'N', 'E', 'S', 'T', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kVersion = 1;

struct TensorRecord {
    std::string name;
    std::vector<int> shape;
    std::vector<float> data;
};

std::vector<unsigned char> serialize(const nn::ParamSet<float>& params);
std::vector<TensorRecord> parse(const unsigned char* bytes, std::size_t len);

void save(const std::string& path, const nn::ParamSet<float>& params);  // IoError
std::vector<TensorRecord> load(const std::string& path);  // IoError / CheckpointError

// copy tensors into params by name; every parameter must be present with the
// right shape; extra tensors in the records are allowed (e.g. restoring just
// the policy from a full training checkpoint)
void restore(nn::ParamSet<float>& params, const std::vector<TensorRecord>& records);

std::uint64_t file_checksum(const std::string& path);  // FNV-1a over raw bytes

}  // namespace nest::checkpoint

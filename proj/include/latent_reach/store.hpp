#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "latent_reach/core.hpp"
#include "latent_reach/valuenet.hpp"

namespace latent_reach::store {

inline constexpr const char* kDatasetSchema = "latent-reach/trajectories/v1";
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Malformed file contents. The message names the offending line when known.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Dataset files are JSON lines: a header object, then one trajectory per line.
// Floats are written as 32-bit values in shortest round-trip form.

void write_dataset(std::ostream& out, const TrajectoryDataset& ds);
void write_dataset(const std::filesystem::path& path, const TrajectoryDataset& ds);

TrajectoryDataset read_dataset(std::istream& in);
TrajectoryDataset read_dataset(const std::filesystem::path& path);

struct Checkpoint {
  ValueNetwork net;
  OptimizerState<float> optimizer;
};

std::vector<std::uint8_t> encode_checkpoint(const ValueNetwork& net, const OptimizerState<float>& opt);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes,
                             std::optional<std::size_t> expected_input_dim = std::nullopt);

void save_checkpoint(const std::filesystem::path& path, const ValueNetwork& net, const OptimizerState<float>& opt);
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<std::size_t> expected_input_dim = std::nullopt);

/// FNV-1a, 64-bit.
std::uint64_t checksum64(const std::uint8_t* data, std::size_t size);

}  // namespace latent_reach::store

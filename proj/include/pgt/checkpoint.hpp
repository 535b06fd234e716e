#pragma once

#include <filesystem>

#include "pgt/flops.hpp"
#include "pgt/model.hpp"
#include "pgt/text.hpp"

namespace pgt {

/// Everything needed to score with a trained model: architecture, graph
/// settings, the vocabulary the token ids refer to, and the weights.
struct Checkpoint {
    ModelConfig config;
    Arch arch = Arch::pgt;
    std::size_t k = 7;  // feedback documents per candidate (0 for bert)
    Vocabulary vocab;
    PgtWeights<float> weights;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Layout: magic "PGTCKPT\0", u32 version, config header, arch, k,
/// vocabulary, then (name, shape, float data) per named tensor.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

/// Rejects other versions, unknown or missing tensor names and shape
/// mismatches against the stored config.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pgt

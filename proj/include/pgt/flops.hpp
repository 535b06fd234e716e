#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "pgt/model.hpp"

namespace pgt {

enum class Arch : std::uint8_t { pgt, bert_prf, bert };

std::string_view arch_name(Arch arch);
/// Accepts "pgt", "bert_prf" and "bert".
Arch parse_arch(std::string_view name);

/// Multiply+add counts of one forward pass; a [m x k] by [k x n] product
/// costs 2 m k n. Embedding lookups, bias adds, softmax, layer norm and
/// activations are not counted.
struct FlopReport {
    std::uint64_t intra_projections = 0;   // Q, K, V, O: 8 n d^2 per sequence per layer
    std::uint64_t attention_products = 0;  // scores + context: 4 n^2 d per sequence per layer
    std::uint64_t ffn = 0;                 // 4 n d ffn per sequence per layer
    std::uint64_t inter_attention = 0;     // hub Q, K, V 6 S d^2, products 4 S^2 d, combine 4 S d^2
    std::uint64_t scoring_head = 0;        // pgt: 6 S d + 4 S; bert: 4 d
    std::uint64_t total = 0;

    bool operator==(const FlopReport&) const = default;
};

/// Closed-form counts. For pgt, seq_lens holds the real length of every
/// node and config.inter_layers selects the hub layers; bert and bert_prf
/// take exactly one length and never use the hub.
FlopReport count_flops(const ModelConfig& config, Arch arch, std::span<const std::size_t> seq_lens);

/// key=value lines, one per field.
std::string format_flop_report(const FlopReport& report, std::string_view prefix = "");

/// Ratio of whole-query costs when the two systems rerank different depths:
/// (a * depth_a) / (b * depth_b), kept as 128-bit exact integers.
struct ScaledFlopRatio {
    unsigned __int128 numerator = 0;
    unsigned __int128 denominator = 1;
    double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};

ScaledFlopRatio depth_scaled_ratio(std::uint64_t a, std::uint64_t depth_a, std::uint64_t b, std::uint64_t depth_b);

}  // namespace pgt

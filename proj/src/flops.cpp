#include "pgt/flops.hpp"

#include <sstream>
#include <stdexcept>

namespace pgt {

std::string_view arch_name(Arch arch) {
    switch (arch) {
        case Arch::pgt: return "pgt";
        case Arch::bert_prf: return "bert_prf";
        case Arch::bert: return "bert";
    }
    return "?";
}

Arch parse_arch(std::string_view name) {
    for (auto a : {Arch::pgt, Arch::bert_prf, Arch::bert}) {
        if (arch_name(a) == name) return a;
    }
    throw std::invalid_argument("unknown arch '" + std::string(name) + "' (pgt, bert_prf, bert)");
}

FlopReport count_flops(const ModelConfig& config, Arch arch, std::span<const std::size_t> seq_lens) {
    if (seq_lens.empty()) throw std::invalid_argument("count_flops: no sequence lengths");
    if (arch != Arch::pgt && seq_lens.size() != 1) {
        throw std::invalid_argument("count_flops: " + std::string(arch_name(arch)) + " takes one sequence length");
    }
    const std::uint64_t d = config.hidden, f = config.ffn, layers = config.num_layers;
    FlopReport r;
    for (auto len : seq_lens) {
        const std::uint64_t n = len;
        r.intra_projections += layers * 8 * n * d * d;
        r.attention_products += layers * 4 * n * n * d;
        r.ffn += layers * 4 * n * d * f;
    }
    if (arch == Arch::pgt) {
        const std::uint64_t s = seq_lens.size();
        std::uint64_t hub_layers = 0;
        for (auto l : config.inter_layers) hub_layers += l < config.num_layers ? 1 : 0;
        r.inter_attention = hub_layers * (6 * s * d * d + 4 * s * s * d + 4 * s * d * d);
        r.scoring_head = 2 * s * d + 4 * s * d + 4 * s;
    } else {
        r.scoring_head = 4 * d;
    }
    r.total = r.intra_projections + r.attention_products + r.ffn + r.inter_attention + r.scoring_head;
    return r;
}

std::string format_flop_report(const FlopReport& report, std::string_view prefix) {
    std::ostringstream out;
    const std::string p(prefix);
    out << p << "intra_projections=" << report.intra_projections << '\n'
        << p << "attention_products=" << report.attention_products << '\n'
        << p << "ffn=" << report.ffn << '\n'
        << p << "inter_attention=" << report.inter_attention << '\n'
        << p << "scoring_head=" << report.scoring_head << '\n'
        << p << "total=" << report.total << '\n';
    return out.str();
}

ScaledFlopRatio depth_scaled_ratio(std::uint64_t a, std::uint64_t depth_a, std::uint64_t b, std::uint64_t depth_b) {
    if (b == 0 || depth_b == 0) throw std::invalid_argument("depth_scaled_ratio: zero denominator");
    return {static_cast<unsigned __int128>(a) * depth_a, static_cast<unsigned __int128>(b) * depth_b};
}

}  // namespace pgt

#include "pgt/checkpoint.hpp"

#include <fstream>
#include <map>

#include "binary_io.hpp"

namespace pgt {
namespace {

const std::string kMagic("PGTCKPT\0", 8);

void write_config(std::ostream& out, const ModelConfig& c) {
    for (std::uint64_t v : {c.num_layers, c.hidden, c.heads, c.ffn, c.vocab_size, c.max_node_len, c.max_seq_len}) {
        binary::write(out, v);
    }
    std::vector<std::uint64_t> inter(c.inter_layers.begin(), c.inter_layers.end());
    binary::write_vector(out, inter);
    binary::write(out, static_cast<std::uint8_t>(c.variant));
    binary::write(out, c.dropout);
    binary::write(out, c.seed);
}

ModelConfig read_config(std::istream& in) {
    ModelConfig c;
    for (std::size_t* field : {&c.num_layers, &c.hidden, &c.heads, &c.ffn, &c.vocab_size, &c.max_node_len,
                               &c.max_seq_len}) {
        *field = binary::read<std::uint64_t>(in);
    }
    auto inter = binary::read_vector<std::uint64_t>(in);
    c.inter_layers.assign(inter.begin(), inter.end());
    auto variant = binary::read<std::uint8_t>(in);
    if (variant >= std::size(kAllVariants)) throw std::runtime_error("checkpoint: bad variant id");
    c.variant = static_cast<GraphVariant>(variant);
    c.dropout = binary::read<double>(in);
    c.seed = binary::read<std::uint64_t>(in);
    c.validate();
    return c;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
    binary::write(out, kCheckpointVersion);
    write_config(out, checkpoint.config);
    binary::write(out, static_cast<std::uint8_t>(checkpoint.arch));
    binary::write<std::uint64_t>(out, checkpoint.k);
    binary::write<std::uint64_t>(out, checkpoint.vocab.size());
    for (std::size_t i = Vocabulary::kReserved; i < checkpoint.vocab.size(); ++i) {
        binary::write_string(out, checkpoint.vocab.tokens()[i]);
    }
    auto named = checkpoint.weights.named();
    binary::write<std::uint64_t>(out, named.size());
    for (const auto& [name, t] : named) {
        binary::write_string(out, name);
        std::vector<std::uint64_t> shape(t.shape().begin(), t.shape().end());
        binary::write_vector(out, shape);
        std::vector<float> data(t.data().begin(), t.data().end());
        binary::write_vector(out, data);
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    binary::expect_magic(in, kMagic, "checkpoint");
    auto version = binary::read<std::uint32_t>(in);
    if (version != kCheckpointVersion) {
        throw std::runtime_error("checkpoint version " + std::to_string(version) + " unsupported (expected " +
                                 std::to_string(kCheckpointVersion) + ")");
    }
    Checkpoint ck;
    ck.config = read_config(in);
    auto arch = binary::read<std::uint8_t>(in);
    if (arch > static_cast<std::uint8_t>(Arch::bert)) throw std::runtime_error("checkpoint: bad arch id");
    ck.arch = static_cast<Arch>(arch);
    ck.k = binary::read<std::uint64_t>(in);
    auto vocab_size = binary::read<std::uint64_t>(in);
    for (std::size_t i = Vocabulary::kReserved; i < vocab_size; ++i) ck.vocab.add(binary::read_string(in));
    if (ck.vocab.size() != vocab_size) throw std::runtime_error("checkpoint: duplicate vocabulary entries");

    // Allocate the expected structure, then fill it by name.
    ck.weights = init_weights<float>(ck.config);
    std::map<std::string, Tensor<float>> slots;
    for (auto& [name, t] : ck.weights.named()) slots.emplace(name, t);
    auto count = binary::read<std::uint64_t>(in);
    if (count != slots.size()) {
        throw std::runtime_error("checkpoint: " + std::to_string(count) + " tensors, config implies " +
                                 std::to_string(slots.size()));
    }
    for (std::uint64_t i = 0; i < count; ++i) {
        auto name = binary::read_string(in);
        auto it = slots.find(name);
        if (it == slots.end()) throw std::runtime_error("checkpoint: unexpected tensor '" + name + "'");
        auto shape = binary::read_vector<std::uint64_t>(in);
        auto data = binary::read_vector<float>(in);
        Shape expected = it->second.shape();
        if (Shape(shape.begin(), shape.end()) != expected || data.size() != it->second.numel()) {
            throw std::runtime_error("checkpoint: tensor '" + name + "' has shape " +
                                     shape_str(Shape(shape.begin(), shape.end())) + ", expected " +
                                     shape_str(expected));
        }
        std::copy(data.begin(), data.end(), it->second.mutable_data().begin());
        slots.erase(it);  // a repeated name now reads as unexpected
    }
    return ck;
}

}  // namespace pgt

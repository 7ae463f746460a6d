#include "sgmix/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <string>

#include "sgmix/error.hpp"

namespace sgmix {

namespace {

constexpr char kMagic[8] = {'S', 'G', 'M', 'I', 'X', 'C', 'K', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const GcnModel<float>& model,
                     std::uint64_t seed) {
  std::string bytes;
  bytes.append(kMagic, sizeof(kMagic));
  put_u32(bytes, static_cast<std::uint32_t>(model.w0.rows));
  put_u32(bytes, static_cast<std::uint32_t>(model.w0.cols));
  put_u32(bytes, static_cast<std::uint32_t>(model.w1.cols));
  put_u32(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(model.dropout_p)));
  put_u64(bytes, seed);
  for (float v : model.w0.data) put_u32(bytes, std::bit_cast<std::uint32_t>(v));
  for (float v : model.w1.data) put_u32(bytes, std::bit_cast<std::uint32_t>(v));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open checkpoint for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("checkpoint write failed: " + path.string());
}

GcnModel<float> load_checkpoint(const std::filesystem::path& path, std::uint64_t* seed_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing or unreadable checkpoint: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  constexpr std::size_t kHeader = 8 + 4 * 4 + 8;
  if (bytes.size() < kHeader || bytes.compare(0, 8, kMagic, 8) != 0)
    throw DataError("not a checkpoint file: " + path.string());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());

  const std::uint32_t num_features = get_u32(p + 8);
  const std::uint32_t hidden = get_u32(p + 12);
  const std::uint32_t num_classes = get_u32(p + 16);
  const float dropout = std::bit_cast<float>(get_u32(p + 20));
  const std::uint64_t seed = get_u64(p + 24);

  const std::size_t w0_count = static_cast<std::size_t>(num_features) * hidden;
  const std::size_t w1_count = static_cast<std::size_t>(hidden) * num_classes;
  if (bytes.size() != kHeader + (w0_count + w1_count) * 4)
    throw DataError("checkpoint payload size mismatch: " + path.string());

  GcnModel<float> model;
  model.hidden = hidden;
  model.dropout_p = dropout;
  model.w0 = DenseMatrix<float>(num_features, hidden);
  model.w1 = DenseMatrix<float>(hidden, num_classes);
  const unsigned char* w = p + kHeader;
  for (std::size_t k = 0; k < w0_count; ++k)
    model.w0.data[k] = std::bit_cast<float>(get_u32(w + k * 4));
  w += w0_count * 4;
  for (std::size_t k = 0; k < w1_count; ++k)
    model.w1.data[k] = std::bit_cast<float>(get_u32(w + k * 4));
  if (seed_out != nullptr) *seed_out = seed;
  return model;
}

}  // namespace sgmix

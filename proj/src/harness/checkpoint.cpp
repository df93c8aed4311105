#include "imrl/harness/checkpoint.hpp"

#include "imrl/core/error.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace imrl::harness {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Archive& archive) {
  nlohmann::json header;
  header["meta"] = archive.meta();
  header["arrays"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const Archive::Entry& e : archive.entries()) {
    header["arrays"].push_back({{"name", e.name}, {"rows", e.rows}, {"cols", e.cols}, {"offset", offset}});
    offset += e.data.size();
  }
  const std::string meta = header.dump();

  std::vector<std::uint8_t> out;
  out.reserve(16 + meta.size() + offset * sizeof(double) + 4);
  out.insert(out.end(), std::begin(kCheckpointMagic), std::end(kCheckpointMagic));
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(meta.size()));
  out.insert(out.end(), meta.begin(), meta.end());
  for (const Archive::Entry& e : archive.entries()) {
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(e.data.data());
    out.insert(out.end(), bytes, bytes + e.data.size() * sizeof(double));
  }
  put_u32(out, crc32_of(out.data(), out.size()));
  return out;
}

Archive decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 20) throw CheckpointError("checkpoint: file too short");
  if (std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0) throw CheckpointError("checkpoint: bad magic");
  const std::uint32_t version = get_u32(bytes.data() + 8);
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint: version " + std::to_string(version) + ", expected " +
                          std::to_string(kCheckpointVersion));
  }
  const std::size_t body = bytes.size() - 4;
  if (crc32_of(bytes.data(), body) != get_u32(bytes.data() + body)) {
    throw CheckpointError("checkpoint: CRC mismatch (corrupt or truncated file)");
  }
  const std::uint32_t meta_len = get_u32(bytes.data() + 12);
  if (16 + static_cast<std::size_t>(meta_len) > body) throw CheckpointError("checkpoint: truncated metadata");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + 16, bytes.begin() + 16 + meta_len);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint: unreadable metadata: ") + e.what());
  }
  const std::uint8_t* payload = bytes.data() + 16 + meta_len;
  const std::size_t payload_doubles = (body - 16 - meta_len) / sizeof(double);
  if ((body - 16 - meta_len) % sizeof(double) != 0) throw CheckpointError("checkpoint: ragged payload");

  Archive ar;
  ar.meta() = header.at("meta");
  for (const auto& a : header.at("arrays")) {
    Archive::Entry e;
    e.name = a.at("name").get<std::string>();
    e.rows = a.at("rows").get<std::int64_t>();
    e.cols = a.at("cols").get<std::int64_t>();
    const auto offset = a.at("offset").get<std::uint64_t>();
    if (e.rows < 0 || e.cols < 0) throw CheckpointError("checkpoint: negative array shape");
    const auto count = static_cast<std::uint64_t>(e.rows * e.cols);
    if (offset + count > payload_doubles) throw CheckpointError("checkpoint: array '" + e.name + "' out of bounds");
    e.data.resize(count);
    std::memcpy(e.data.data(), payload + offset * sizeof(double), count * sizeof(double));
    ar.add_entry(std::move(e));
  }
  return ar;
}

void write_checkpoint(const std::filesystem::path& path, const Archive& archive) {
  const std::vector<std::uint8_t> bytes = encode_checkpoint(archive);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("checkpoint: cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("checkpoint: write failed for " + path.string());
}

Archive read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace imrl::harness

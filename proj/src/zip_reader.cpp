#include "dtnsim/zip_reader.hpp"

#include <zlib.h>

#include <cstdint>
#include <fstream>
#include <iterator>
#include <vector>

#include "dtnsim/error.hpp"

namespace dtnsim {
namespace {

constexpr std::uint32_t kEndOfCentralDir = 0x06054b50;
constexpr std::uint32_t kCentralHeader = 0x02014b50;
constexpr std::uint32_t kLocalHeader = 0x04034b50;

class Reader {
 public:
  Reader(const std::string& name, const std::vector<unsigned char>& bytes) : name_(name), bytes_(bytes) {}

  std::uint16_t u16(std::size_t at) const {
    need(at, 2);
    return static_cast<std::uint16_t>(bytes_[at] | (bytes_[at + 1] << 8));
  }
  std::uint32_t u32(std::size_t at) const {
    need(at, 4);
    return static_cast<std::uint32_t>(bytes_[at]) | (static_cast<std::uint32_t>(bytes_[at + 1]) << 8) |
           (static_cast<std::uint32_t>(bytes_[at + 2]) << 16) | (static_cast<std::uint32_t>(bytes_[at + 3]) << 24);
  }
  void need(std::size_t at, std::size_t n) const {
    if (at + n > bytes_.size() || at + n < at) throw FeedError(name_, 0, "truncated zip archive");
  }
  std::size_t size() const { return bytes_.size(); }
  const unsigned char* data(std::size_t at) const { return bytes_.data() + at; }

 private:
  const std::string& name_;
  const std::vector<unsigned char>& bytes_;
};

std::string inflate_raw(const std::string& archive, const unsigned char* src, std::size_t src_len,
                        std::size_t expected) {
  if (expected == 0) return {};
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw FeedError(archive, 0, "zlib initialisation failed");
  zs.next_in = const_cast<Bytef*>(src);
  zs.avail_in = static_cast<uInt>(src_len);
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != expected) throw FeedError(archive, 0, "corrupt deflate stream");
  return out;
}

}  // namespace

std::map<std::string, std::string> read_zip_archive(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FeedError(name, 0, "cannot open archive");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(name, bytes);
  if (bytes.size() < 22) throw FeedError(name, 0, "not a zip archive");

  // The end record sits within the last 64 KiB + 22 bytes (comment field).
  std::size_t eocd = std::string::npos;
  const std::size_t lowest = bytes.size() > 65557 ? bytes.size() - 65557 : 0;
  for (std::size_t at = bytes.size() - 22 + 1; at-- > lowest;) {
    if (r.u32(at) == kEndOfCentralDir) {
      eocd = at;
      break;
    }
  }
  if (eocd == std::string::npos) throw FeedError(name, 0, "not a zip archive (no central directory)");

  const std::uint16_t entries = r.u16(eocd + 10);
  std::size_t at = r.u32(eocd + 16);
  if (entries == 0xFFFF || at == 0xFFFFFFFF) throw FeedError(name, 0, "zip64 archives are not supported");

  std::map<std::string, std::string> files;
  for (std::uint16_t e = 0; e < entries; ++e) {
    if (r.u32(at) != kCentralHeader) throw FeedError(name, 0, "corrupt central directory");
    const std::uint16_t flags = r.u16(at + 8);
    const std::uint16_t method = r.u16(at + 10);
    const std::uint32_t compressed = r.u32(at + 20);
    const std::uint32_t uncompressed = r.u32(at + 24);
    const std::uint16_t name_len = r.u16(at + 28);
    const std::uint16_t extra_len = r.u16(at + 30);
    const std::uint16_t comment_len = r.u16(at + 32);
    const std::uint32_t local = r.u32(at + 42);
    r.need(at + 46, name_len);
    std::string entry(reinterpret_cast<const char*>(r.data(at + 46)), name_len);
    at += 46u + name_len + extra_len + comment_len;

    if (entry.empty() || entry.back() == '/') continue;
    if (flags & 0x1) throw FeedError(name, 0, "encrypted entry " + entry);
    if (r.u32(local) != kLocalHeader) throw FeedError(name, 0, "corrupt local header for " + entry);
    const std::size_t data_at = local + 30u + r.u16(local + 26) + r.u16(local + 28);
    r.need(data_at, compressed);

    std::string content;
    if (method == 0) {
      content.assign(reinterpret_cast<const char*>(r.data(data_at)), compressed);
    } else if (method == 8) {
      content = inflate_raw(name, r.data(data_at), compressed, uncompressed);
    } else {
      throw FeedError(name, 0, "unsupported compression method " + std::to_string(method) + " for " + entry);
    }
    auto slash = entry.find_last_of('/');
    files[slash == std::string::npos ? entry : entry.substr(slash + 1)] = std::move(content);
  }
  return files;
}

}  // namespace dtnsim

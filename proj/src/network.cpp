// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#include "yoho/network.hpp"

#include <cstring>
#include <fstream>

namespace yoho::net {

namespace {

constexpr char kMagic[4] = {'Y', 'O', 'H', 'O'};
constexpr std::uint32_t kVersion = 1;

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

class Reader {
public:
  Reader(const unsigned char* data, std::size_t len) : data_(data), len_(len) {}

  const unsigned char* take(std::size_t n) {
    require(pos_ + n <= len_, "truncated", "weight file payload incomplete");
    const unsigned char* p = data_ + pos_;
    pos_ += n;
    return p;
  }

  std::uint16_t u16() {
    const unsigned char* p = take(2);
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
  }

  std::uint32_t u32() {
    const unsigned char* p = take(4);
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
  }

  std::size_t pos() const { return pos_; }

private:
  const unsigned char* data_;
  std::size_t len_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t crc32(const unsigned char* data, std::size_t len) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = 0xffffffffu;
  for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xffu] ^ (crc >> 8);
  return crc ^ 0xffffffffu;
}

void save_weights(YohoModel<float>& model, const std::filesystem::path& path) {
  auto refs = model.tensors();

  std::vector<unsigned char> buf;
  buf.insert(buf.end(), kMagic, kMagic + 4);
  put_u32(buf, kVersion);
  put_u32(buf, static_cast<std::uint32_t>(refs.size()));

  for (const auto& r : refs) {
    require(r.name.size() <= 0xffff, "internal", "tensor name too long");
    put_u16(buf, static_cast<std::uint16_t>(r.name.size()));
    buf.insert(buf.end(), r.name.begin(), r.name.end());
    buf.push_back(static_cast<unsigned char>(r.dims.size()));
    for (int d : r.dims) put_u32(buf, static_cast<std::uint32_t>(d));
    for (float v : *r.value) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      put_u32(buf, bits);
    }
  }
  put_u32(buf, crc32(buf.data(), buf.size()));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), "unwritable-path", "cannot open for writing: " + path.string());
  f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  f.flush();
  require(f.good(), "unwritable-path", "write failed: " + path.string());
}

YohoModel<float> load_weights(const std::filesystem::path& path, double dropout_rate) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "missing-file", "cannot open " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());

  require(buf.size() >= 12 + 4, "truncated", "weight file too small: " + path.string());
  require(std::memcmp(buf.data(), kMagic, 4) == 0, "bad-magic",
          "not a weight file: " + path.string());

  const std::size_t body_len = buf.size() - 4;
  Reader crc_reader(buf.data() + body_len, 4);
  const std::uint32_t stored_crc = crc_reader.u32();
  require(crc32(buf.data(), body_len) == stored_crc, "bad-crc",
          "checksum mismatch: " + path.string());

  Reader r(buf.data(), body_len);
  r.take(4);  // magic
  const std::uint32_t version = r.u32();
  require(version == kVersion, "version-mismatch",
          "weight file version " + std::to_string(version));
  const std::uint32_t count = r.u32();

  struct Entry {
    std::string name;
    std::vector<int> dims;
    std::vector<float> values;
  };
  std::vector<Entry> entries(count);
  for (auto& e : entries) {
    const std::uint16_t name_len = r.u16();
    const unsigned char* np = r.take(name_len);
    e.name.assign(reinterpret_cast<const char*>(np), name_len);
    const std::uint8_t rank = *r.take(1);
    std::size_t total = 1;
    e.dims.resize(rank);
    for (int i = 0; i < rank; ++i) {
      e.dims[i] = static_cast<int>(r.u32());
      total *= static_cast<std::size_t>(e.dims[i]);
    }
    e.values.resize(total);
    const unsigned char* vp = r.take(total * 4);
    for (std::size_t i = 0; i < total; ++i) {
      std::uint32_t bits = static_cast<std::uint32_t>(vp[i * 4]) |
                           (static_cast<std::uint32_t>(vp[i * 4 + 1]) << 8) |
                           (static_cast<std::uint32_t>(vp[i * 4 + 2]) << 16) |
                           (static_cast<std::uint32_t>(vp[i * 4 + 3]) << 24);
      std::memcpy(&e.values[i], &bits, 4);
    }
  }

  // recover the channel divisor from the first conv's output channels
  int divisor = 0;
  for (const auto& e : entries) {
    if (e.name.ends_with(".conv2d.kernel") && e.dims.size() == 4 && e.dims[2] == 1) {
      require(e.dims[3] >= 1 && 32 % e.dims[3] == 0, "shape-mismatch",
              "first conv width " + std::to_string(e.dims[3]) + " does not divide 32");
      divisor = 32 / e.dims[3];
      break;
    }
  }
  require(divisor != 0, "shape-mismatch", "no initial conv kernel found: " + path.string());

  YohoModel<float> model =
      build_yoho<float>(0, BuildOptions{divisor, dropout_rate});
  auto refs = model.tensors();
  require(refs.size() == entries.size(), "shape-mismatch",
          "weight file has " + std::to_string(entries.size()) + " tensors, model expects " +
              std::to_string(refs.size()));
  for (std::size_t i = 0; i < refs.size(); ++i) {
    require(refs[i].name == entries[i].name, "shape-mismatch",
            "tensor " + std::to_string(i) + " is '" + entries[i].name + "', expected '" +
                refs[i].name + "'");
    require(refs[i].dims == entries[i].dims, "shape-mismatch",
            "tensor '" + entries[i].name + "' has unexpected dimensions");
    *refs[i].value = entries[i].values;
  }
  return model;
}

}  // namespace yoho::net

// Copyright 2026 The shuffledp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shuffledp/wire.h"

#include <array>
#include <cstring>
#include <string>

#include "shuffledp/errors.h"

namespace shuffledp {
namespace {

constexpr std::array<std::uint8_t, 4> kBagMagic = {'S', 'D', 'P', 'B'};
constexpr std::uint8_t kBagVersion = 1;
constexpr std::size_t kHeaderSize = 4 + 1 + 1 + 2 + 5 * 8;

enum class BagKind : std::uint8_t { kFE0 = 0, kFE1 = 1, kHHD = 2 };

std::vector<std::uint8_t> Header(BagKind kind, std::uint64_t n, std::uint64_t B,
                                 std::uint64_t b, std::uint64_t q,
                                 std::uint64_t count) {
  std::vector<std::uint8_t> out(kBagMagic.begin(), kBagMagic.end());
  out.push_back(kBagVersion);
  out.push_back(static_cast<std::uint8_t>(kind));
  out.push_back(0);
  out.push_back(0);
  for (std::uint64_t field : {n, B, b, q, count}) AppendU64(out, field);
  return out;
}

struct ParsedHeader {
  std::uint64_t count = 0;
  std::span<const std::uint8_t> body;
};

ParsedHeader ParseHeader(std::span<const std::uint8_t> bytes, BagKind kind,
                         std::uint64_t n, std::uint64_t B, std::uint64_t b,
                         std::uint64_t q) {
  if (bytes.size() < kHeaderSize ||
      std::memcmp(bytes.data(), kBagMagic.data(), kBagMagic.size()) != 0) {
    throw InvalidInputError("not a message bag (bad magic or truncated header)");
  }
  if (bytes[4] != kBagVersion) {
    throw InvalidInputError("unsupported bag version " + std::to_string(bytes[4]));
  }
  if (bytes[5] != static_cast<std::uint8_t>(kind)) {
    throw InvalidInputError("bag variant does not match the parameters");
  }
  const std::uint64_t header[4] = {ReadU64(bytes, 8), ReadU64(bytes, 16),
                                   ReadU64(bytes, 24), ReadU64(bytes, 32)};
  if (header[0] != n || header[1] != B || header[2] != b || header[3] != q) {
    throw InvalidInputError("bag header (n, B, b, q) does not match the parameters");
  }
  return ParsedHeader{ReadU64(bytes, 40), bytes.subspan(kHeaderSize)};
}

std::vector<std::uint8_t> Concat(std::vector<std::uint8_t> head,
                                 std::vector<std::uint8_t> body) {
  head.insert(head.end(), body.begin(), body.end());
  return head;
}

std::uint64_t ReadField(BitReader& in, int bits) {
  if (in.remaining_bits() < static_cast<std::size_t>(bits)) {
    throw InvalidInputError("bag body truncated");
  }
  return in.Read(bits);
}

void RequireRange(bool ok, const char* what) {
  if (!ok) throw InvalidInputError(std::string("decoded field out of range: ") + what);
}

FE0Message ReadFE0(BitReader& in, const FEParams& params) {
  const std::uint64_t value = ReadField(in, BitWidth(params.domain_size)) + 1;
  RequireRange(value <= params.domain_size, "FE0 value");
  return FE0Message{value};
}

FE1Message ReadFE1(BitReader& in, const FEParams& params) {
  FE1Message m;
  m.u = ReadField(in, BitWidth(params.prime - 1)) + 1;
  m.v = ReadField(in, BitWidth(params.prime));
  m.w = ReadField(in, BitWidth(params.num_bins));
  RequireRange(m.u < params.prime, "FE1 u");
  RequireRange(m.v < params.prime, "FE1 v");
  RequireRange(m.w < params.num_bins, "FE1 w");
  return m;
}

void CheckEmptyTail(const BitReader& in) {
  if (in.remaining_bits() != 0) {
    throw InvalidInputError("trailing bytes after the last message");
  }
}

}  // namespace

int BitWidth(std::uint64_t count) {
  int bits = 0;
  while (bits < 64 && (std::uint64_t{1} << bits) < count) ++bits;
  return bits;
}

void BitWriter::Write(std::uint64_t value, int bits) {
  for (int i = 0; i < bits; ++i) {
    if (bit_size_ % 8 == 0) bytes_.push_back(0);
    if ((value >> i) & 1) {
      bytes_.back() |= static_cast<std::uint8_t>(1u << (bit_size_ % 8));
    }
    ++bit_size_;
  }
}

void BitWriter::Align() { bit_size_ = bytes_.size() * 8; }

std::vector<std::uint8_t> BitWriter::Finish() {
  Align();
  return std::move(bytes_);
}

std::uint64_t BitReader::Read(int bits) {
  if (static_cast<std::size_t>(bits) > remaining_bits()) {
    throw InvalidInputError("bit stream truncated");
  }
  std::uint64_t value = 0;
  for (int i = 0; i < bits; ++i) {
    const std::uint8_t byte = bytes_[bit_pos_ / 8];
    value |= static_cast<std::uint64_t>((byte >> (bit_pos_ % 8)) & 1) << i;
    ++bit_pos_;
  }
  return value;
}

void BitReader::Align() { bit_pos_ = (bit_pos_ + 7) / 8 * 8; }

int FE0MessageBits(const FEParams& params) {
  return BitWidth(params.domain_size);
}

int FE1MessageBits(const FEParams& params) {
  return BitWidth(params.prime - 1) + BitWidth(params.prime) +
         BitWidth(params.num_bins);
}

int HHDMessageBits(const HHDParams& params, int level) {
  const FEParams& fe = params.layer(level).fe;
  return BitWidth(static_cast<std::uint64_t>(params.levels)) + 1 +
         (fe.variant == Variant::kFE0 ? FE0MessageBits(fe) : FE1MessageBits(fe));
}

void WriteFE0Message(BitWriter& out, const FE0Message& m, const FEParams& params) {
  out.Write(m.value - 1, BitWidth(params.domain_size));
  out.Align();
}

void WriteFE1Message(BitWriter& out, const FE1Message& m, const FEParams& params) {
  out.Write(m.u - 1, BitWidth(params.prime - 1));
  out.Write(m.v, BitWidth(params.prime));
  out.Write(m.w, BitWidth(params.num_bins));
  out.Align();
}

void WriteHHDMessage(BitWriter& out, const HHDMessage& m, const HHDParams& params) {
  const FEParams& fe = params.layer(static_cast<int>(m.layer)).fe;
  out.Write(m.layer - 1, BitWidth(static_cast<std::uint64_t>(params.levels)));
  out.Write(m.encoding == Variant::kFE1 ? 1 : 0, 1);
  if (m.encoding == Variant::kFE0) {
    out.Write(m.r - 1, BitWidth(fe.domain_size));
  } else {
    out.Write(m.u - 1, BitWidth(fe.prime - 1));
    out.Write(m.v, BitWidth(fe.prime));
    out.Write(m.r, BitWidth(fe.num_bins));
  }
  out.Align();
}

std::vector<std::uint8_t> EncodeBag(const FE0Bag& bag, const FEParams& params) {
  BitWriter body;
  for (const FE0Message& m : bag) WriteFE0Message(body, m, params);
  return Concat(Header(BagKind::kFE0, params.num_users, params.domain_size,
                       params.num_bins, 0, bag.size()),
                body.Finish());
}

std::vector<std::uint8_t> EncodeBag(const FE1Bag& bag, const FEParams& params) {
  BitWriter body;
  for (const FE1Message& m : bag) WriteFE1Message(body, m, params);
  return Concat(Header(BagKind::kFE1, params.num_users, params.domain_size,
                       params.num_bins, params.prime, bag.size()),
                body.Finish());
}

std::vector<std::uint8_t> EncodeBag(const HHDBag& bag, const HHDParams& params) {
  BitWriter body;
  for (const HHDMessage& m : bag) WriteHHDMessage(body, m, params);
  return Concat(Header(BagKind::kHHD, params.num_users, params.domain_size,
                       params.num_bins, 0, bag.size()),
                body.Finish());
}

FE0Bag DecodeFE0Bag(std::span<const std::uint8_t> bytes, const FEParams& params) {
  const ParsedHeader header = ParseHeader(bytes, BagKind::kFE0, params.num_users,
                                          params.domain_size, params.num_bins, 0);
  BitReader in(header.body);
  std::vector<FE0Message> messages;
  for (std::uint64_t i = 0; i < header.count; ++i) {
    messages.push_back(ReadFE0(in, params));
    in.Align();
  }
  CheckEmptyTail(in);
  return FE0Bag(std::move(messages));
}

FE1Bag DecodeFE1Bag(std::span<const std::uint8_t> bytes, const FEParams& params) {
  const ParsedHeader header =
      ParseHeader(bytes, BagKind::kFE1, params.num_users, params.domain_size,
                  params.num_bins, params.prime);
  BitReader in(header.body);
  std::vector<FE1Message> messages;
  for (std::uint64_t i = 0; i < header.count; ++i) {
    messages.push_back(ReadFE1(in, params));
    in.Align();
  }
  CheckEmptyTail(in);
  return FE1Bag(std::move(messages));
}

HHDBag DecodeHHDBag(std::span<const std::uint8_t> bytes, const HHDParams& params) {
  const ParsedHeader header = ParseHeader(bytes, BagKind::kHHD, params.num_users,
                                          params.domain_size, params.num_bins, 0);
  BitReader in(header.body);
  std::vector<HHDMessage> messages;
  for (std::uint64_t i = 0; i < header.count; ++i) {
    HHDMessage m;
    m.layer = static_cast<std::uint32_t>(
        ReadField(in, BitWidth(static_cast<std::uint64_t>(params.levels))) + 1);
    RequireRange(m.layer <= static_cast<std::uint32_t>(params.levels), "HHD layer");
    m.encoding = ReadField(in, 1) == 1 ? Variant::kFE1 : Variant::kFE0;
    const FEParams& fe = params.layer(static_cast<int>(m.layer)).fe;
    RequireRange(m.encoding == fe.variant, "HHD discriminant");
    if (m.encoding == Variant::kFE0) {
      m.r = ReadFE0(in, fe).value;
    } else {
      const FE1Message inner = ReadFE1(in, fe);
      m.u = inner.u;
      m.v = inner.v;
      m.r = inner.w;
    }
    in.Align();
    messages.push_back(m);
  }
  CheckEmptyTail(in);
  return HHDBag(std::move(messages));
}

void AppendU64(std::vector<std::uint8_t>& out, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

std::uint64_t ReadU64(std::span<const std::uint8_t> bytes, std::size_t offset) {
  if (offset + 8 > bytes.size()) throw InvalidInputError("truncated integer field");
  std::uint64_t value = 0;
  for (int i = 0; i < 8; ++i) {
    value |= static_cast<std::uint64_t>(bytes[offset + i]) << (8 * i);
  }
  return value;
}

}  // namespace shuffledp

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

#ifndef SHUFFLEDP_WIRE_H_
#define SHUFFLEDP_WIRE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "shuffledp/fe.h"
#include "shuffledp/hhd.h"
#include "shuffledp/params.h"

namespace shuffledp {

// Bit-packed encodings. Fields are written least-significant bit first into
// a little-endian bit stream; every message is padded to a whole byte.
//
//   FE0 message:  value - 1 in ceil(log2 B) bits
//   FE1 message:  u - 1 in ceil(log2 (q-1)) bits, v in ceil(log2 q) bits,
//                 w in ceil(log2 b) bits
//   HHD message:  layer - 1 in ceil(log2 L) bits, 1 discriminant bit
//                 (0 = FE0, 1 = FE1), then the layer's FE message fields
//
// A bag is a 48-byte header followed by the packed messages in delivery
// order:
//   "SDPB" | version u8 | variant u8 (0 FE0, 1 FE1, 2 HHD) | 2 reserved bytes
//   | n u64 | B u64 | b u64 | q u64 (0 for FE0 and HHD) | count u64
// with all integers little-endian.

// ceil(log2 count); zero for count <= 1.
int BitWidth(std::uint64_t count);

class BitWriter {
 public:
  void Write(std::uint64_t value, int bits);
  // Pads to the next byte boundary.
  void Align();
  std::vector<std::uint8_t> Finish();
  std::size_t bit_size() const { return bit_size_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bit_size_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::uint64_t Read(int bits);
  void Align();
  std::size_t remaining_bits() const {
    return bytes_.size() * 8 - bit_pos_;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t bit_pos_ = 0;
};

// Bits of one message before byte padding.
int FE0MessageBits(const FEParams& params);
int FE1MessageBits(const FEParams& params);
int HHDMessageBits(const HHDParams& params, int level);

void WriteFE0Message(BitWriter& out, const FE0Message& m, const FEParams& params);
void WriteFE1Message(BitWriter& out, const FE1Message& m, const FEParams& params);
void WriteHHDMessage(BitWriter& out, const HHDMessage& m, const HHDParams& params);

std::vector<std::uint8_t> EncodeBag(const FE0Bag& bag, const FEParams& params);
std::vector<std::uint8_t> EncodeBag(const FE1Bag& bag, const FEParams& params);
std::vector<std::uint8_t> EncodeBag(const HHDBag& bag, const HHDParams& params);

// Decoders check the header against `params` and every field range; any
// mismatch raises InvalidInputError.
FE0Bag DecodeFE0Bag(std::span<const std::uint8_t> bytes, const FEParams& params);
FE1Bag DecodeFE1Bag(std::span<const std::uint8_t> bytes, const FEParams& params);
HHDBag DecodeHHDBag(std::span<const std::uint8_t> bytes, const HHDParams& params);

// Little-endian integer helpers shared with the dataset file format.
void AppendU64(std::vector<std::uint8_t>& out, std::uint64_t value);
std::uint64_t ReadU64(std::span<const std::uint8_t> bytes, std::size_t offset);

}  // namespace shuffledp

#endif  // SHUFFLEDP_WIRE_H_

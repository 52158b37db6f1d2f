/*
 * Copyright 2026 The precoder-sim Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracle.hpp"
#include "precoder/fronthaul.hpp"

namespace precoder {
namespace {

Errc parse_code(std::span<const std::uint8_t> bytes, const FrameContext& ctx = {}) {
  try {
    decode_packet(bytes, ctx);
  } catch (const ParseError& e) {
    return e.code();
  }
  ADD_FAILURE() << "frame decoded";
  return Errc::io;
}

CPlanePacket random_cplane(std::mt19937_64& rng) {
  CPlanePacket c;
  c.slot_id = static_cast<std::uint16_t>(rng());
  c.start_symbol = static_cast<std::uint8_t>(rng() % kSymbolsPerSlot);
  c.num_symbol = static_cast<std::uint8_t>(1 + rng() % (kSymbolsPerSlot - c.start_symbol));
  c.start_prb = static_cast<std::uint16_t>(rng() % kTotalPrb);
  c.num_prb = static_cast<std::uint16_t>(1 + rng() % (kTotalPrb - c.start_prb));
  c.beam_id = static_cast<std::uint16_t>(rng());
  c.bundle_prb = static_cast<std::uint8_t>(rng());
  c.re_mask = static_cast<std::uint16_t>(1 + rng() % 0x0FFF);
  return c;
}

UPlanePacket random_uplane(std::mt19937_64& rng, int width) {
  UPlanePacket u;
  u.slot_id = static_cast<std::uint16_t>(rng());
  u.symbol = static_cast<std::uint8_t>(rng() % kSymbolsPerSlot);
  u.start_prb = static_cast<std::uint16_t>(rng() % kTotalPrb);
  u.num_prb = static_cast<std::uint16_t>(1 + rng() % std::min(4, kTotalPrb - u.start_prb));
  u.width = static_cast<std::uint16_t>(width);
  u.samples = oracle::random_vector(rng, u.num_re() * static_cast<std::size_t>(width));
  return u;
}

BeamCoefficientPacket random_coef(std::mt19937_64& rng, int n_t) {
  BeamCoefficientPacket k;
  k.slot_id = static_cast<std::uint16_t>(rng());
  k.beam_id = static_cast<std::uint16_t>(rng());
  k.layer_index = static_cast<std::uint8_t>(rng() % kNumLayers);
  k.coefficients = oracle::random_vector(rng, static_cast<std::size_t>(n_t));
  return k;
}

TEST(Encode, MinimalCPlaneLayout) {
  CPlanePacket c;
  c.slot_id = 0;
  c.start_symbol = 0;
  c.num_symbol = 1;
  c.start_prb = 0;
  c.num_prb = 1;
  c.beam_id = 0;
  c.bundle_prb = 0;
  c.re_mask = 1;
  const auto bytes = encode_packet(c);
  const std::vector<std::uint8_t> expected{0x5A, 0xA5, 0x00, 0x01, 0x00, 0x00,  // header
                                           0x00, 0x01, 0x00, 0x00, 0x01, 0x00,  // symbols, start_prb, num_prb
                                           0x00, 0x00, 0x00, 0x01, 0x00, 0x00};  // beam, bundle, mask, pad
  EXPECT_EQ(bytes.size(), kCPlaneFrameBytes);
  EXPECT_EQ(bytes, expected);
}

TEST(Encode, UPlaneOnePrbSize) {
  UPlanePacket u;
  u.num_prb = 1;
  u.samples.assign(12 * kNumLayers, FixedComplex{0x1234, -2});
  const auto bytes = encode_packet(u);
  EXPECT_EQ(bytes.size(), kUPlaneHeaderBytes + 12 * kNumLayers * 4);
  EXPECT_EQ(bytes[2], 1);
  // First sample: re = 0x1234, im = 0xFFFE little-endian.
  EXPECT_EQ(bytes[12], 0x34);
  EXPECT_EQ(bytes[13], 0x12);
  EXPECT_EQ(bytes[14], 0xFE);
  EXPECT_EQ(bytes[15], 0xFF);
}

TEST(Encode, CoefficientSize) {
  BeamCoefficientPacket k;
  k.coefficients.assign(32, FixedComplex{});
  EXPECT_EQ(encode_packet(k).size(), kCoefHeaderBytes + 32 * 4);
}

TEST(Encode, RejectsInvariantViolations) {
  CPlanePacket c;
  c.start_symbol = 10;
  c.num_symbol = 5;
  EXPECT_THROW(encode_packet(c), Error);
  c = {};
  c.start_prb = 270;
  c.num_prb = 4;
  EXPECT_THROW(encode_packet(c), Error);
  c = {};
  c.re_mask = 0;
  EXPECT_THROW(encode_packet(c), Error);
  c.re_mask = 0x1000;
  EXPECT_THROW(encode_packet(c), Error);

  UPlanePacket u;
  u.samples.resize(5);
  EXPECT_THROW(encode_packet(u), Error);

  BeamCoefficientPacket k;
  k.coefficients.resize(15);
  EXPECT_THROW(encode_packet(k), Error);
  k.coefficients.resize(16);
  k.layer_index = 8;
  EXPECT_THROW(encode_packet(k), Error);
}

TEST(Decode, ErrorsAreDistinct) {
  EXPECT_EQ(parse_code({}), Errc::truncated_frame);

  auto bytes = encode_packet(CPlanePacket{});
  auto bad = bytes;
  bad[0] ^= 0xFF;
  EXPECT_EQ(parse_code(bad), Errc::bad_magic);

  bad = bytes;
  bad[3] = 2;
  EXPECT_EQ(parse_code(bad), Errc::bad_version);

  bad = bytes;
  bad[2] = 7;
  EXPECT_EQ(parse_code(bad), Errc::unknown_kind);

  bad = bytes;
  bad.pop_back();
  EXPECT_EQ(parse_code(bad), Errc::truncated_frame);

  bad = bytes;
  bad[6] = 14;  // start_symbol
  EXPECT_EQ(parse_code(bad), Errc::invalid_packet);

  BeamCoefficientPacket k;
  k.coefficients.resize(16);
  const auto coef = encode_packet(k);
  EXPECT_EQ(parse_code(coef, {32, 8}), Errc::truncated_frame);
}

TEST(Decode, StreamReportsOffsetOfBadFrame) {
  std::vector<std::uint8_t> bytes;
  encode_packet(CPlanePacket{}, bytes);
  encode_packet(CPlanePacket{}, bytes);
  bytes[kCPlaneFrameBytes + 1] = 0;
  try {
    decode_stream(bytes, {});
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), Errc::bad_magic);
    EXPECT_EQ(e.offset(), kCPlaneFrameBytes);
  }
}

TEST(Codec, RoundTripRandomPackets) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 10'000; ++i) {
    const int n_t = 16 << (rng() % 3);
    const bool uplink = rng() % 2;
    const FrameContext ctx{n_t, uplink ? n_t : kNumLayers};
    Packet p;
    switch (rng() % 3) {
      case 0: p = random_cplane(rng); break;
      case 1: p = random_uplane(rng, ctx.u_plane_width); break;
      default: p = random_coef(rng, n_t); break;
    }
    const auto bytes = encode_packet(p);
    const auto decoded = decode_packet(bytes, ctx);
    ASSERT_EQ(decoded.size, bytes.size());
    ASSERT_EQ(decoded.packet, p);
    ASSERT_EQ(encode_packet(decoded.packet), bytes);
  }
}

PipelineEvent ev(Packet p, std::uint64_t seq) { return {std::move(p), seq}; }

CPlanePacket cplane(std::uint16_t slot, std::uint16_t beam) {
  CPlanePacket c;
  c.slot_id = slot;
  c.beam_id = beam;
  return c;
}

BeamCoefficientPacket coef(std::uint16_t slot, std::uint16_t beam) {
  BeamCoefficientPacket k;
  k.slot_id = slot;
  k.beam_id = beam;
  k.coefficients.resize(16);
  return k;
}

TEST(Arbiter, SplitsByKind) {
  const std::vector<PipelineEvent> in{ev(cplane(0, 7), 1), ev(coef(0, 7), 2), ev(UPlanePacket{}, 3)};
  const auto out = arbitrate(in);
  ASSERT_EQ(out.control.size(), 1u);
  ASSERT_EQ(out.coefficient.size(), 1u);
  ASSERT_EQ(out.data.size(), 1u);
  EXPECT_EQ(out.control[0], in[0]);
  EXPECT_EQ(out.coefficient[0], in[1]);
  EXPECT_EQ(out.data[0], in[2]);
}

TEST(Arbiter, OrphanCoefficient) {
  const std::vector<PipelineEvent> in{ev(coef(0, 9), 1)};
  try {
    arbitrate(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::orphan_coefficient);
  }
  // A reference in another slot does not count.
  const std::vector<PipelineEvent> other{ev(cplane(1, 9), 1), ev(coef(2, 9), 2)};
  EXPECT_THROW(arbitrate(other), Error);
}

TEST(Arbiter, RejectsNonIncreasingSequence) {
  const std::vector<PipelineEvent> in{ev(cplane(0, 1), 5), ev(cplane(0, 2), 5)};
  try {
    arbitrate(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::non_monotone_sequence);
  }
}

TEST(Arbiter, StablePartitionOfRandomStreams) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PipelineEvent> in;
    std::vector<std::uint16_t> beams;
    std::uint64_t seq = rng() % 10;
    for (int i = 0; i < 100; ++i) {
      seq += 1 + rng() % 3;
      const auto pick = rng() % 3;
      if (pick == 0 || beams.empty()) {
        beams.push_back(static_cast<std::uint16_t>(rng() % 50));
        in.push_back(ev(cplane(0, beams.back()), seq));
      } else if (pick == 1) {
        in.push_back(ev(coef(0, beams[rng() % beams.size()]), seq));
      } else {
        in.push_back(ev(UPlanePacket{}, seq));
      }
    }
    const auto out = arbitrate(in);
    for (const auto* s : {&out.control, &out.data, &out.coefficient}) {
      ASSERT_TRUE(std::is_sorted(s->begin(), s->end(),
                                 [](const auto& a, const auto& b) { return a.sequence_no < b.sequence_no; }));
    }
    std::vector<PipelineEvent> merged;
    for (const auto* s : {&out.control, &out.data, &out.coefficient}) merged.insert(merged.end(), s->begin(), s->end());
    std::sort(merged.begin(), merged.end(), [](const auto& a, const auto& b) { return a.sequence_no < b.sequence_no; });
    ASSERT_EQ(merged, in);
    for (const auto& e : out.control) ASSERT_EQ(e.kind(), PacketKind::Control);
    for (const auto& e : out.data) ASSERT_EQ(e.kind(), PacketKind::Data);
    for (const auto& e : out.coefficient) ASSERT_EQ(e.kind(), PacketKind::Coefficient);
  }
}

}  // namespace
}  // namespace precoder

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
#pragma once

// Simplified fronthaul framing for the precoder input: control-plane
// scheduling packets, user-plane IQ payload, and per-layer beam coefficient
// columns, plus the input arbiter that splits one arrival-ordered stream into
// the control, data and coefficient pipelines.
//
// Frame layout, all fields little-endian:
//   magic 0xA55A (2) | kind (1) | version = 1 (1) | slot_id (2) | body
//   C-plane body: start_symbol (1) num_symbol (1) start_prb (2) num_prb (2)
//                 beam_id (2) bundle_prb (1) re_mask (2) pad (1)
//   U-plane body: symbol (1) pad (1) start_prb (2) num_prb (2)
//                 then num_prb * 12 * width samples, re (2) || im (2)
//   Coef body:    beam_id (2) layer_index (1) pad (1) then n_t samples

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "precoder/error.hpp"
#include "precoder/fixed_complex.hpp"

namespace precoder {

inline constexpr int kSymbolsPerSlot = 14;
inline constexpr int kTotalPrb = 273;
inline constexpr int kRePerPrb = 12;
inline constexpr int kNumLayers = 8;

inline constexpr std::uint16_t kFrameMagic = 0xA55A;
inline constexpr std::uint8_t kFrameVersion = 1;
inline constexpr std::size_t kFrameHeaderBytes = 6;
inline constexpr std::size_t kCPlaneFrameBytes = kFrameHeaderBytes + 12;
inline constexpr std::size_t kUPlaneHeaderBytes = kFrameHeaderBytes + 6;
inline constexpr std::size_t kCoefHeaderBytes = kFrameHeaderBytes + 4;
inline constexpr std::size_t kSampleBytes = 4;

enum class PacketKind : std::uint8_t { Control = 0, Data = 1, Coefficient = 2 };

struct CPlanePacket {
  std::uint16_t slot_id = 0;
  std::uint8_t start_symbol = 0;
  std::uint8_t num_symbol = 1;
  std::uint16_t start_prb = 0;
  std::uint16_t num_prb = 1;
  std::uint16_t beam_id = 0;
  std::uint8_t bundle_prb = 0;  // 0: one matrix for the whole allocation
  std::uint16_t re_mask = 0x0FFF;

  bool re_active(int re) const noexcept { return (re_mask >> re) & 1u; }

  friend bool operator==(const CPlanePacket&, const CPlanePacket&) = default;
};

// One symbol's worth of IQ payload over a PRB range. samples is RE-major: the
// vector for RE i occupies [i * width, (i + 1) * width). width is the number
// of layers on the downlink and the number of antennas on the uplink.
struct UPlanePacket {
  std::uint16_t slot_id = 0;
  std::uint8_t symbol = 0;
  std::uint16_t start_prb = 0;
  std::uint16_t num_prb = 1;
  std::uint16_t width = kNumLayers;
  std::vector<FixedComplex> samples;

  std::size_t num_re() const noexcept { return std::size_t{num_prb} * kRePerPrb; }

  std::span<const FixedComplex> re_vector(std::size_t re) const {
    return std::span<const FixedComplex>(samples).subspan(re * width, width);
  }

  friend bool operator==(const UPlanePacket&, const UPlanePacket&) = default;
};

// One column (layer) of a precoding matrix, n_t coefficients long.
struct BeamCoefficientPacket {
  std::uint16_t slot_id = 0;
  std::uint16_t beam_id = 0;
  std::uint8_t layer_index = 0;
  std::vector<FixedComplex> coefficients;

  friend bool operator==(const BeamCoefficientPacket&, const BeamCoefficientPacket&) = default;
};

using Packet = std::variant<CPlanePacket, UPlanePacket, BeamCoefficientPacket>;

inline PacketKind kind_of(const Packet& p) noexcept { return static_cast<PacketKind>(p.index()); }

inline std::uint16_t slot_of(const Packet& p) noexcept {
  return std::visit([](const auto& v) { return v.slot_id; }, p);
}

constexpr bool is_supported_antenna_count(int n_t) noexcept {
  return n_t == 16 || n_t == 32 || n_t == 64;
}

// ---------------------------------------------------------------------------
// Invariant checks

inline void validate(const CPlanePacket& c) {
  auto fail = [](const std::string& what) { throw Error(Errc::invalid_packet, "C-plane " + what); };
  if (c.start_symbol >= kSymbolsPerSlot) fail("start_symbol out of range");
  if (c.num_symbol < 1 || c.start_symbol + c.num_symbol > kSymbolsPerSlot) fail("symbol range exceeds slot");
  if (c.start_prb >= kTotalPrb) fail("start_prb out of range");
  if (c.num_prb < 1 || c.start_prb + c.num_prb > kTotalPrb) fail("PRB range exceeds grid");
  if (c.re_mask == 0 || c.re_mask > 0x0FFF) fail("re_mask must be a non-zero 12-bit mask");
}

inline void validate(const UPlanePacket& u) {
  auto fail = [](const std::string& what) { throw Error(Errc::invalid_packet, "U-plane " + what); };
  if (u.symbol >= kSymbolsPerSlot) fail("symbol out of range");
  if (u.start_prb >= kTotalPrb) fail("start_prb out of range");
  if (u.num_prb < 1 || u.start_prb + u.num_prb > kTotalPrb) fail("PRB range exceeds grid");
  if (u.width != kNumLayers && !is_supported_antenna_count(u.width)) fail("unsupported vector width");
  if (u.samples.size() != u.num_re() * u.width) fail("sample count does not match num_prb * 12 * width");
}

inline void validate(const BeamCoefficientPacket& p) {
  if (p.layer_index >= kNumLayers) throw Error(Errc::invalid_packet, "Coef layer_index out of range");
  if (!is_supported_antenna_count(static_cast<int>(p.coefficients.size()))) {
    throw Error(Errc::invalid_packet, "Coef column length is not a supported antenna count");
  }
}

inline void validate(const Packet& p) {
  std::visit([](const auto& v) { validate(v); }, p);
}

// ---------------------------------------------------------------------------
// Encoding

namespace detail {

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void sample(FixedComplex s) {
    u16(static_cast<std::uint16_t>(s.re));
    u16(static_cast<std::uint16_t>(s.im));
  }

 private:
  std::vector<std::uint8_t>& out_;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> in, std::size_t pos) : in_(in), pos_(pos) {}
  std::uint8_t u8() { return in_[pos_++]; }
  std::uint16_t u16() {
    const auto lo = in_[pos_];
    const auto hi = in_[pos_ + 1];
    pos_ += 2;
    return static_cast<std::uint16_t>(lo | (hi << 8));
  }
  FixedComplex sample() {
    const auto re = static_cast<std::int16_t>(u16());
    const auto im = static_cast<std::int16_t>(u16());
    return {re, im};
  }
  std::size_t pos() const noexcept { return pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_;
};

inline void write_header(ByteWriter& w, PacketKind kind, std::uint16_t slot_id) {
  w.u16(kFrameMagic);
  w.u8(static_cast<std::uint8_t>(kind));
  w.u8(kFrameVersion);
  w.u16(slot_id);
}

}  // namespace detail

inline void encode_packet(const Packet& packet, std::vector<std::uint8_t>& out) {
  validate(packet);
  detail::ByteWriter w(out);
  detail::write_header(w, kind_of(packet), slot_of(packet));
  if (const auto* c = std::get_if<CPlanePacket>(&packet)) {
    w.u8(c->start_symbol);
    w.u8(c->num_symbol);
    w.u16(c->start_prb);
    w.u16(c->num_prb);
    w.u16(c->beam_id);
    w.u8(c->bundle_prb);
    w.u16(c->re_mask);
    w.u8(0);
  } else if (const auto* u = std::get_if<UPlanePacket>(&packet)) {
    w.u8(u->symbol);
    w.u8(0);
    w.u16(u->start_prb);
    w.u16(u->num_prb);
    for (const auto s : u->samples) w.sample(s);
  } else {
    const auto& k = std::get<BeamCoefficientPacket>(packet);
    w.u16(k.beam_id);
    w.u8(k.layer_index);
    w.u8(0);
    for (const auto s : k.coefficients) w.sample(s);
  }
}

inline std::vector<std::uint8_t> encode_packet(const Packet& packet) {
  std::vector<std::uint8_t> out;
  encode_packet(packet, out);
  return out;
}

// ---------------------------------------------------------------------------
// Decoding

// Frame lengths for U-plane and Coef frames are implied by the active system
// configuration rather than carried on the wire.
struct FrameContext {
  int n_t = 16;
  int u_plane_width = kNumLayers;
};

struct DecodedFrame {
  Packet packet;
  std::size_t size = 0;
};

// Decode the frame starting at byte `offset` of `bytes`.
inline DecodedFrame decode_packet(std::span<const std::uint8_t> bytes, const FrameContext& ctx,
                                  std::size_t offset = 0) {
  const std::size_t avail = offset <= bytes.size() ? bytes.size() - offset : 0;
  auto need = [&](std::size_t n, const char* what) {
    if (avail < n) throw ParseError(Errc::truncated_frame, offset, what);
  };
  need(2, "frame shorter than magic");
  detail::ByteReader r(bytes, offset);
  if (r.u16() != kFrameMagic) throw ParseError(Errc::bad_magic, offset, "frame magic is not 0xA55A");
  need(kFrameHeaderBytes, "frame shorter than header");
  const std::uint8_t kind = r.u8();
  const std::uint8_t version = r.u8();
  const std::uint16_t slot_id = r.u16();
  if (version != kFrameVersion) throw ParseError(Errc::bad_version, offset, "unsupported frame version");

  auto checked = [&](Packet p) {
    try {
      validate(p);
    } catch (const Error& e) {
      throw ParseError(Errc::invalid_packet, offset, e.what());
    }
    return DecodedFrame{std::move(p), r.pos() - offset};
  };

  switch (kind) {
    case static_cast<std::uint8_t>(PacketKind::Control): {
      need(kCPlaneFrameBytes, "C-plane frame truncated");
      CPlanePacket c;
      c.slot_id = slot_id;
      c.start_symbol = r.u8();
      c.num_symbol = r.u8();
      c.start_prb = r.u16();
      c.num_prb = r.u16();
      c.beam_id = r.u16();
      c.bundle_prb = r.u8();
      c.re_mask = r.u16();
      r.u8();
      return checked(c);
    }
    case static_cast<std::uint8_t>(PacketKind::Data): {
      need(kUPlaneHeaderBytes, "U-plane header truncated");
      UPlanePacket u;
      u.slot_id = slot_id;
      u.symbol = r.u8();
      r.u8();
      u.start_prb = r.u16();
      u.num_prb = r.u16();
      u.width = static_cast<std::uint16_t>(ctx.u_plane_width);
      const std::size_t count = u.num_re() * u.width;
      need(kUPlaneHeaderBytes + count * kSampleBytes, "U-plane payload truncated");
      u.samples.reserve(count);
      for (std::size_t i = 0; i < count; ++i) u.samples.push_back(r.sample());
      return checked(std::move(u));
    }
    case static_cast<std::uint8_t>(PacketKind::Coefficient): {
      const auto n_t = static_cast<std::size_t>(ctx.n_t);
      need(kCoefHeaderBytes + n_t * kSampleBytes, "Coef frame truncated");
      BeamCoefficientPacket k;
      k.slot_id = slot_id;
      k.beam_id = r.u16();
      k.layer_index = r.u8();
      r.u8();
      k.coefficients.reserve(n_t);
      for (std::size_t i = 0; i < n_t; ++i) k.coefficients.push_back(r.sample());
      return checked(std::move(k));
    }
    default:
      throw ParseError(Errc::unknown_kind, offset, "unknown frame kind " + std::to_string(kind));
  }
}

// Decode a buffer of back-to-back frames.
inline std::vector<Packet> decode_stream(std::span<const std::uint8_t> bytes, const FrameContext& ctx) {
  std::vector<Packet> packets;
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    auto frame = decode_packet(bytes, ctx, offset);
    offset += frame.size;
    packets.push_back(std::move(frame.packet));
  }
  return packets;
}

// ---------------------------------------------------------------------------
// Input arbiter

struct PipelineEvent {
  Packet payload;
  std::uint64_t sequence_no = 0;

  PacketKind kind() const noexcept { return kind_of(payload); }

  friend bool operator==(const PipelineEvent&, const PipelineEvent&) = default;
};

struct ArbitratedStreams {
  std::vector<PipelineEvent> control;
  std::vector<PipelineEvent> data;
  std::vector<PipelineEvent> coefficient;
};

// Splits arrival-ordered events into per-kind pipelines. A coefficient packet
// is only accepted once a control packet in the same slot has referenced its
// beam. Single owner; not thread-safe.
class Arbiter {
 public:
  void push(PipelineEvent event) {
    const std::uint64_t seq = event.sequence_no;
    if (seen_any_ && seq <= last_sequence_) {
      throw Error(Errc::non_monotone_sequence,
                  "sequence number " + std::to_string(seq) + " does not increase");
    }
    switch (event.kind()) {
      case PacketKind::Control: {
        const auto& c = std::get<CPlanePacket>(event.payload);
        referenced_[c.slot_id].insert(c.beam_id);
        out_.control.push_back(std::move(event));
        break;
      }
      case PacketKind::Coefficient: {
        const auto& k = std::get<BeamCoefficientPacket>(event.payload);
        const auto slot = referenced_.find(k.slot_id);
        if (slot == referenced_.end() || !slot->second.contains(k.beam_id)) {
          throw Error(Errc::orphan_coefficient,
                      "coefficient packet seq " + std::to_string(seq) + " for beam " +
                          std::to_string(k.beam_id) + " in slot " + std::to_string(k.slot_id) +
                          " precedes any control reference");
        }
        out_.coefficient.push_back(std::move(event));
        break;
      }
      case PacketKind::Data:
        out_.data.push_back(std::move(event));
        break;
    }
    seen_any_ = true;
    last_sequence_ = seq;
  }

  const ArbitratedStreams& streams() const noexcept { return out_; }
  ArbitratedStreams take() { return std::exchange(out_, {}); }

 private:
  ArbitratedStreams out_;
  std::map<std::uint16_t, std::set<std::uint16_t>> referenced_;
  std::uint64_t last_sequence_ = 0;
  bool seen_any_ = false;
};

inline ArbitratedStreams arbitrate(std::span<const PipelineEvent> events) {
  Arbiter arbiter;
  for (const auto& e : events) arbiter.push(e);
  return arbiter.take();
}

}  // namespace precoder

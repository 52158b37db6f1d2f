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
#include <set>

#include "oracle.hpp"
#include "precoder/rx_converter.hpp"

namespace precoder {
namespace {

std::vector<FixedComplex> tx_stream_of(const PrecodingMatrix& h) {
  PrecoderCoefficientMemory pcm(h.rows());
  for (int c = 0; c < 8; ++c) {
    std::vector<FixedComplex> col;
    for (int r = 0; r < h.rows(); ++r) col.push_back(h.at(r, c));
    pcm.write_column(0, c, col);
  }
  return tx_sequence(pcm.read(0));
}

// Distinct tag per element: re = row, im = column.
PrecodingMatrix tagged(int n_t) {
  PrecodingMatrix h(n_t, 8);
  for (int r = 0; r < n_t; ++r)
    for (int c = 0; c < 8; ++c) h.at(r, c) = {static_cast<std::int16_t>(r), static_cast<std::int16_t>(c)};
  return h;
}

TEST(Reorder, FirstBlockIsHColumnsZeroAndOne) {
  const auto h = tagged(16);
  const auto stream = tx_to_rx_reorder(h);
  ASSERT_EQ(stream.size(), 128u);
  // H^T rows 0-1, columns 0-7, interleaved per column.
  for (int k = 0; k < 8; ++k) {
    EXPECT_EQ(stream[static_cast<std::size_t>(2 * k)], (FixedComplex{static_cast<std::int16_t>(k), 0}));
    EXPECT_EQ(stream[static_cast<std::size_t>(2 * k + 1)], (FixedComplex{static_cast<std::int16_t>(k), 1}));
  }
  // Second block: same row pair, H rows 8-15.
  EXPECT_EQ(stream[16], (FixedComplex{8, 0}));
  // Third block: next row pair.
  EXPECT_EQ(stream[32], (FixedComplex{0, 2}));
}

TEST(Reorder, RoundTripRecoversH) {
  std::mt19937_64 rng(2);
  for (int n_t : {16, 32, 64}) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto h = oracle::random_matrix(rng, n_t, 8);
      const auto blocks = rx_blocks(tx_to_rx_reorder(h), n_t);
      const int chunks = n_t / 8;
      PrecodingMatrix back(n_t, 8);
      for (int pair = 0; pair < 4; ++pair)
        for (int chunk = 0; chunk < chunks; ++chunk)
          for (int k = 0; k < 8; ++k)
            for (int half = 0; half < 2; ++half) {
              back.at(8 * chunk + k, 2 * pair + half) =
                  blocks[static_cast<std::size_t>(pair * chunks + chunk)][static_cast<std::size_t>(half)][static_cast<std::size_t>(k)];
            }
      ASSERT_EQ(back, h);
    }
  }
}

TEST(Reorder, ConservesElementsWithAFixedPermutation) {
  for (int n_t : {16, 32, 64}) {
    const auto stream = tx_to_rx_reorder(tagged(n_t));
    std::set<std::pair<int, int>> seen;
    for (const auto& v : stream) seen.insert({v.re, v.im});
    EXPECT_EQ(seen.size(), static_cast<std::size_t>(n_t) * 8);
    EXPECT_EQ(stream.size(), static_cast<std::size_t>(n_t) * 8);

    // The same positions move for any other matrix.
    std::mt19937_64 rng(static_cast<std::uint64_t>(n_t));
    const auto h = oracle::random_matrix(rng, n_t, 8);
    const auto rx = tx_to_rx_reorder(h);
    for (std::size_t i = 0; i < stream.size(); ++i) ASSERT_EQ(rx[i], h.at(stream[i].re, stream[i].im));
  }
}

TEST(RxPrecode, MatchesTransposedOracle) {
  std::mt19937_64 rng(40);
  for (int n_t : {16, 32, 64}) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto h = oracle::random_matrix(rng, n_t, 8, trial % 2 ? 32768 : 2048);
      const auto x = oracle::random_vector(rng, static_cast<std::size_t>(n_t), trial % 2 ? 32768 : 2048);
      const auto out = rx_precode(rx_blocks(tx_to_rx_reorder(h), n_t), x);
      ASSERT_EQ(out.y, oracle::matvec_quantized(h.transposed(), x)) << "n_t=" << n_t;
    }
  }
}

TEST(Converter, SingleMatrixTransitions) {
  TxToRxConverter conv(16);
  EXPECT_EQ(conv.write_state(), WriteFsm::ReadInput);
  EXPECT_EQ(conv.read_state(), ReadFsm::WaitForInReadComplete);
  std::mt19937_64 rng(3);
  const auto h = oracle::random_matrix(rng, 16, 8);
  const auto tx = tx_stream_of(h);
  for (const auto v : tx) EXPECT_FALSE(conv.step(TxElementIn{v}).stalled);
  EXPECT_EQ(conv.read_state(), ReadFsm::WaitForInReadComplete);
  conv.step(InputDone{});
  EXPECT_EQ(conv.write_state(), WriteFsm::HoldOutput);
  EXPECT_EQ(conv.read_state(), ReadFsm::WriteOutput);
  const auto out = conv.step(CopyTaken{}).output;
  EXPECT_EQ(conv.write_state(), WriteFsm::ReadInput);
  EXPECT_EQ(conv.staged(), 0u);
  EXPECT_EQ(out, tx_to_rx_reorder(h));
  conv.step(OutputDrained{});
  EXPECT_EQ(conv.read_state(), ReadFsm::WaitForInReadComplete);
}

TEST(Converter, SecondMatrixStallsUntilCopyTaken) {
  std::mt19937_64 rng(4);
  const auto h1 = oracle::random_matrix(rng, 32, 8);
  const auto h2 = oracle::random_matrix(rng, 32, 8);
  const auto tx1 = tx_stream_of(h1);
  const auto tx2 = tx_stream_of(h2);
  TxToRxConverter conv(32);
  for (const auto v : tx1) conv.step(TxElementIn{v});
  conv.step(InputDone{});

  // The first element of the second matrix is refused, not dropped.
  EXPECT_TRUE(conv.step(TxElementIn{tx2[0]}).stalled);
  EXPECT_EQ(conv.staged(), tx1.size());
  EXPECT_EQ(conv.step(CopyTaken{}).output, tx_to_rx_reorder(h1));

  // Producer retries. The reader is still draining the first copy.
  for (const auto v : tx2) ASSERT_FALSE(conv.step(TxElementIn{v}).stalled);
  conv.step(InputDone{});
  EXPECT_EQ(conv.read_state(), ReadFsm::WriteOutput);
  EXPECT_THROW(conv.step(CopyTaken{}), Error);
  conv.step(OutputDrained{});
  EXPECT_EQ(conv.read_state(), ReadFsm::WriteOutput);  // held matrix observed again
  EXPECT_EQ(conv.step(CopyTaken{}).output, tx_to_rx_reorder(h2));
  conv.step(OutputDrained{});
  EXPECT_EQ(conv.read_state(), ReadFsm::WaitForInReadComplete);
}

TEST(Converter, ProtocolErrors) {
  TxToRxConverter conv(16);
  EXPECT_THROW(conv.step(InputDone{}), Error);  // incomplete
  EXPECT_THROW(conv.step(CopyTaken{}), Error);
  EXPECT_THROW(conv.step(OutputDrained{}), Error);
  EXPECT_THROW(TxToRxConverter(12), Error);
}

TEST(Converter, NoJointDeadlockIsReachable) {
  // Explore every joint state reachable by legal events from reset (element
  // count abstracted to empty / partial / full). A state where the writer
  // holds and the reader still waits would be mutual waiting.
  struct Key {
    WriteFsm w;
    ReadFsm r;
    bool held;
    std::size_t staged;
    auto operator<=>(const Key&) const = default;
  };
  const std::size_t full = 16 * 8;
  std::set<Key> seen;
  std::vector<TxToRxConverter> frontier{TxToRxConverter(16)};
  std::set<std::pair<WriteFsm, ReadFsm>> joint;
  auto key = [](const TxToRxConverter& c) {
    return Key{c.write_state(), c.read_state(), c.copy_held(), c.staged()};
  };
  seen.insert(key(frontier[0]));
  while (!frontier.empty()) {
    auto conv = frontier.back();
    frontier.pop_back();
    joint.insert({conv.write_state(), conv.read_state()});
    ASSERT_FALSE(conv.write_state() == WriteFsm::HoldOutput && conv.read_state() == ReadFsm::WaitForInReadComplete);
    bool progressed = false;
    const std::vector<ConverterEvent> events{TxElementIn{{1, 1}}, InputDone{}, CopyTaken{}, OutputDrained{}};
    for (const auto& ev : events) {
      auto next = conv;
      try {
        if (next.step(ev).stalled) continue;
      } catch (const Error&) {
        continue;
      }
      progressed = true;
      // Skip the intermediate element counts to keep the space small.
      if (std::holds_alternative<TxElementIn>(ev)) {
        while (next.staged() < full) next.step(TxElementIn{{1, 1}});
      }
      if (seen.insert(key(next)).second) frontier.push_back(next);
    }
    ASSERT_TRUE(progressed);
  }
  EXPECT_EQ(joint.size(), 3u);  // (Hold, Wait) is transient only
}

TEST(Converter, ConvertMatrixHelper) {
  std::mt19937_64 rng(9);
  for (int n_t : {16, 32, 64}) {
    TxToRxConverter conv(n_t);
    for (int trial = 0; trial < 20; ++trial) {
      const auto h = oracle::random_matrix(rng, n_t, 8);
      ASSERT_EQ(convert_matrix(conv, tx_stream_of(h)), tx_to_rx_reorder(h));
    }
  }
}

}  // namespace
}  // namespace precoder

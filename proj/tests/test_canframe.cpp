#include <gtest/gtest.h>

#include <vector>

#include "pufcan/canframe.hpp"

using namespace pufcan;

namespace {

CanFrame raw_frame(std::uint16_t id, std::uint8_t dlc, std::uint8_t len) {
  CanFrame f;
  f.id = id;
  f.dlc = dlc;
  f.data_len = len;
  return f;
}

}  // namespace

TEST(ValidateFrame, MinimalIdFullPayload) {
  const std::vector<std::uint8_t> bytes(8, 0xAB);
  EXPECT_EQ(validate_frame(CanFrame::make(0, bytes)), std::nullopt);
}

TEST(ValidateFrame, IdOutOfRange) {
  EXPECT_EQ(validate_frame(raw_frame(2048, 0, 0)), Errc::IdOutOfRange);
  EXPECT_EQ(validate_frame(raw_frame(2047, 0, 0)), std::nullopt);
}

TEST(ValidateFrame, DataLengthMismatch) {
  EXPECT_EQ(validate_frame(raw_frame(5, 3, 5)), Errc::DataLengthMismatch);
}

TEST(ValidateFrame, DlcOutOfRange) {
  EXPECT_EQ(validate_frame(raw_frame(5, 9, 9)), Errc::DlcOutOfRange);
  const std::vector<std::uint8_t> nine(9, 0);
  try {
    CanFrame::make(1, nine);
    FAIL() << "expected DlcOutOfRange";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DlcOutOfRange);
  }
}

TEST(ValidateFrame, RequireValidWrapsInInvalidFrame) {
  try {
    require_valid(raw_frame(4000, 0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidFrame);
    EXPECT_NE(std::string(e.what()).find("IdOutOfRange"), std::string::npos);
  }
}

TEST(WireTime, PublishedConstants) {
  EXPECT_EQ(frame_wire_time(FrameKind::Standard, BusSpeed::High), Micros{112});
  EXPECT_EQ(frame_wire_time(FrameKind::Extended, BusSpeed::High), Micros{131});
  EXPECT_EQ(frame_wire_time(FrameKind::Standard, BusSpeed::Low), Micros{896});
  EXPECT_EQ(frame_wire_time(FrameKind::Extended, BusSpeed::Low), Micros{1048});
}

TEST(WireTime, Bitrates) {
  EXPECT_EQ(bitrate(BusSpeed::High), 1'000'000u);
  EXPECT_EQ(bitrate(BusSpeed::Low), 125'000u);
}

TEST(WireTime, LinearInEffectiveBits) {
  for (auto s : {BusSpeed::High, BusSpeed::Low}) {
    const auto std_t = frame_wire_time(FrameKind::Standard, s).count();
    const auto ext_t = frame_wire_time(FrameKind::Extended, s).count();
    EXPECT_EQ(ext_t * 112, std_t * 131);
  }
  for (auto k : {FrameKind::Standard, FrameKind::Extended}) {
    EXPECT_EQ(frame_wire_time(k, BusSpeed::Low), 8 * frame_wire_time(k, BusSpeed::High));
  }
}

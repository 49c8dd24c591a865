#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "n2c/errors.hpp"

namespace n2c::can {

struct CodecError : Error {
    enum class Code {
        kMalformedLine,
        kBadId,
        kBadPayload,
        kBitRangeOutOfPayload,
        kValueOutOfRange,
        kEmptyLog,
        kEmptyStream,
        kNoWheelSpeeds,
        kNonUniformRate,
        kStreamTooShort,
        kMissingSignal,
        kBadSpec,
    };
    CodecError(Code c, const std::string& msg) : Error(msg), code(c) {}
    Code code;
};

// One classical CAN frame. dlc <= 8; bytes beyond dlc are kept zero.
struct CanFrame {
    double timestamp = 0.0;
    std::string interface;
    std::uint32_t arbitration_id = 0;
    bool extended = false;
    std::uint8_t dlc = 0;
    std::array<std::uint8_t, 8> payload{};
};

enum class ByteOrder { kLittleEndian, kBigEndian };

// Bit-field recipe for one physical signal.
//
// Bit numbering is lsb0 ("Intel" numbering): bit k of payload byte b is
// global bit 8*b + k.
//   - little_endian: the raw value occupies global bits
//     [start_bit, start_bit + bit_length), least significant bit first.
//   - big_endian ("Motorola forward"): start_bit names the MSB of the raw
//     value; the walk proceeds toward bit 0 of the byte, then to bit 7 of
//     the next byte, each step yielding the next lower-significance bit.
struct SignalSpec {
    std::string name;
    int start_bit = 0;    // 0..63
    int bit_length = 1;   // 1..64
    ByteOrder byte_order = ByteOrder::kLittleEndian;
    bool is_signed = false;
    double scale = 1.0;   // physical units per raw count, never 0
    double offset = 0.0;
    std::string unit;
    double min = 0.0;
    double max = 0.0;

    void validate() const;
};

// A signal spec bound to the arbitration id that carries it (the on-disk
// spec-file entry).
struct SignalDef {
    std::uint32_t arbitration_id = 0;
    SignalSpec spec;
};

// One time-stamped behavioral-cloning tuple.
struct DriveRecord {
    double t = 0.0;
    double speed = 0.0;      // m/s, mean of available wheel speeds
    double steering = 0.0;   // rad, positive = left
    double throttle = 0.0;   // [0,1]
    double brake = 0.0;      // [0,1]
    double torque = 0.0;     // [-1,1]
    std::vector<double> wheel_speeds;  // up to 4 entries, m/s

    // Clamp fields into their physical ranges (glitchy logs stay usable).
    void clamp_ranges();
};

enum class StimulusLabel { kThrottle, kBrake, kSteerLeft, kSteerRight, kAccelerate, kDecelerate };

// Time span during which the operator excited one control channel; the
// sniffing heuristic scores candidate signals against these.
struct StimulusWindow {
    StimulusLabel label = StimulusLabel::kThrottle;
    double t_start = 0.0;
    double t_end = 0.0;
};

StimulusLabel stimulus_label_from_string(std::string_view s);
std::string to_string(StimulusLabel label);

// --- candump text format ---------------------------------------------------
// One frame per line: `(<sec>.<usec>) <iface> <HEXID>#<HEXBYTES>`
// HEXID is exactly 3 hex digits (standard id, < 0x800) or exactly 8
// (extended id, < 0x20000000). HEXBYTES is 0..16 hex digits, even count.
CanFrame parse_candump_line(std::string_view line);
std::string format_candump_line(const CanFrame& frame);

std::vector<CanFrame> parse_candump_log(const std::filesystem::path& path);

// --- signal extraction -----------------------------------------------------
double extract_signal(const CanFrame& frame, const SignalSpec& spec);

// Writes round((value - offset) / scale) into the spec's bit field; all
// other payload bits are preserved.
CanFrame encode_signal(double value, const SignalSpec& spec, const CanFrame& frame);

// --- arbitration-id discovery ----------------------------------------------
struct DiscoveryResult {
    std::uint32_t arbitration_id = 0;
    SignalSpec spec;
    double score = 0.0;
};

// Scores every (id, candidate spec) pair by how strongly the decoded series
// varies inside stimulus windows versus outside, plus a +1 bonus when the
// decoded series agrees with the window label:
//   throttle, brake, accelerate : mean in-window slope > 0
//   decelerate                  : mean in-window slope < 0
//   steer_left / steer_right    : mean in-window value > 0 / < 0
// Windows whose label matches the candidate's name are used when present,
// otherwise all windows. Results sort by descending score, ties by
// ascending id, then spec name. A series with zero variance everywhere
// scores exactly 0.
std::vector<DiscoveryResult> discover_arbitration_ids(
    const std::vector<CanFrame>& log,
    const std::vector<StimulusWindow>& windows,
    const std::vector<SignalSpec>& candidate_specs);

// --- record streams ----------------------------------------------------------
// Zero-order-hold resampling onto a uniform grid from the first to the last
// timestamp; output count = floor((t_last - t_first) * rate_hz) + 1.
std::vector<DriveRecord> resample_records(const std::vector<DriveRecord>& records, double rate_hz);

// Arithmetic mean of the present wheel speeds, written into record.speed.
double average_wheel_speed(DriveRecord& record);

// Decode a full log into a uniform-rate DriveRecord stream. The defs must
// cover steering/throttle/brake/torque plus either `speed` or at least one
// `wheel_speed_*`; the grid spans the interval where every signal has data.
std::vector<DriveRecord> decode_drive_records(const std::vector<CanFrame>& log,
                                              const std::vector<SignalDef>& defs,
                                              double rate_hz);

// Re-encode records into frames (one frame per arbitration id per record),
// the inverse of decode_drive_records for simulator-produced logs.
std::vector<CanFrame> encode_drive_records(const std::vector<DriveRecord>& records,
                                           const std::vector<SignalDef>& defs,
                                           const std::string& interface);

// --- files -------------------------------------------------------------------
std::vector<SignalDef> load_signal_defs(const std::filesystem::path& path);
std::vector<StimulusWindow> load_stimulus_windows(const std::filesystem::path& path);

std::string drive_records_to_csv(const std::vector<DriveRecord>& records);
std::vector<DriveRecord> drive_records_from_csv(const std::string& content);

}  // namespace n2c::can

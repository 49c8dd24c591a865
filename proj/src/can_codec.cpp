#include "n2c/can_codec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "n2c/io.hpp"
#include "json.hpp"

namespace n2c::can {

namespace {

[[noreturn]] void fail(CodecError::Code code, const std::string& msg) {
    throw CodecError(code, msg);
}

bool is_hex(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return c - 'A' + 10;
}

// Global (byte, bit) positions of a field in MSB-first significance order
// under the lsb0 numbering documented in the header.
std::vector<std::pair<int, int>> field_positions(const SignalSpec& spec) {
    std::vector<std::pair<int, int>> pos;
    pos.reserve(static_cast<std::size_t>(spec.bit_length));
    if (spec.byte_order == ByteOrder::kLittleEndian) {
        for (int k = spec.bit_length - 1; k >= 0; --k) {
            const int g = spec.start_bit + k;
            pos.emplace_back(g / 8, g % 8);
        }
    } else {
        int byte = spec.start_bit / 8;
        int bit = spec.start_bit % 8;
        for (int k = 0; k < spec.bit_length; ++k) {
            pos.emplace_back(byte, bit);
            if (--bit < 0) {
                bit = 7;
                ++byte;
            }
        }
    }
    return pos;
}

int last_byte_touched(const SignalSpec& spec) {
    if (spec.byte_order == ByteOrder::kLittleEndian)
        return (spec.start_bit + spec.bit_length - 1) / 8;
    const int msb0 = (spec.start_bit / 8) * 8 + (7 - spec.start_bit % 8);
    return (msb0 + spec.bit_length - 1) / 8;
}

void check_fits_payload(const CanFrame& frame, const SignalSpec& spec) {
    if (last_byte_touched(spec) >= static_cast<int>(frame.dlc))
        fail(CodecError::Code::kBitRangeOutOfPayload,
             "BitRangeOutOfPayload: signal '" + spec.name + "' exceeds dlc=" +
                 std::to_string(frame.dlc));
}

struct Series {
    std::vector<double> t;
    std::vector<double> v;
};

double variance(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(xs.size());
}

// Least-squares slope; 0 when degenerate.
double slope(const std::vector<double>& t, const std::vector<double>& v) {
    const std::size_t n = t.size();
    if (n < 2) return 0.0;
    double mt = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mt += t[i];
        mv += v[i];
    }
    mt /= static_cast<double>(n);
    mv /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (t[i] - mt) * (v[i] - mv);
        den += (t[i] - mt) * (t[i] - mt);
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace

void SignalSpec::validate() const {
    auto bad = [&](const std::string& why) {
        fail(CodecError::Code::kBadSpec, "bad signal spec '" + name + "': " + why);
    };
    if (start_bit < 0 || start_bit > 63) bad("start_bit outside 0..63");
    if (bit_length < 1 || bit_length > 64) bad("bit_length outside 1..64");
    if (byte_order == ByteOrder::kLittleEndian) {
        if (start_bit + bit_length > 64) bad("field exceeds 64 bits");
    } else {
        const int msb0 = (start_bit / 8) * 8 + (7 - start_bit % 8);
        if (msb0 + bit_length > 64) bad("field exceeds 64 bits");
    }
    if (scale == 0.0 || !std::isfinite(scale)) bad("scale must be finite and nonzero");
    if (!std::isfinite(offset)) bad("offset must be finite");
    if (!(min <= max)) bad("min must be <= max");
}

void DriveRecord::clamp_ranges() {
    speed = std::max(0.0, speed);
    throttle = std::clamp(throttle, 0.0, 1.0);
    brake = std::clamp(brake, 0.0, 1.0);
    torque = std::clamp(torque, -1.0, 1.0);
}

StimulusLabel stimulus_label_from_string(std::string_view s) {
    if (s == "throttle") return StimulusLabel::kThrottle;
    if (s == "brake") return StimulusLabel::kBrake;
    if (s == "steer_left") return StimulusLabel::kSteerLeft;
    if (s == "steer_right") return StimulusLabel::kSteerRight;
    if (s == "accelerate") return StimulusLabel::kAccelerate;
    if (s == "decelerate") return StimulusLabel::kDecelerate;
    throw Error("unknown stimulus label: " + std::string(s));
}

std::string to_string(StimulusLabel label) {
    switch (label) {
        case StimulusLabel::kThrottle: return "throttle";
        case StimulusLabel::kBrake: return "brake";
        case StimulusLabel::kSteerLeft: return "steer_left";
        case StimulusLabel::kSteerRight: return "steer_right";
        case StimulusLabel::kAccelerate: return "accelerate";
        case StimulusLabel::kDecelerate: return "decelerate";
    }
    return "?";
}

CanFrame parse_candump_line(std::string_view line) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r' || line.back() == ' ' ||
                             line.back() == '\t'))
        line.remove_suffix(1);

    std::size_t i = 0;
    const std::size_t n = line.size();
    auto malformed = [&](const std::string& why) {
        fail(CodecError::Code::kMalformedLine, "MalformedLine: " + why);
    };

    auto expect = [&](char c, const char* what) {
        if (i >= n || line[i] != c) malformed(std::string("expected ") + what);
        ++i;
    };

    expect('(', "'('");
    std::size_t sec_start = i;
    while (i < n && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i == sec_start || i - sec_start > 12) malformed("bad seconds field");
    std::uint64_t sec = 0;
    for (std::size_t k = sec_start; k < i; ++k) sec = sec * 10 + static_cast<std::uint64_t>(line[k] - '0');
    expect('.', "'.'");
    std::size_t frac_start = i;
    while (i < n && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t frac_digits = i - frac_start;
    if (frac_digits < 1 || frac_digits > 6) malformed("fractional seconds must be 1..6 digits");
    std::uint64_t usec = 0;
    for (std::size_t k = frac_start; k < i; ++k) usec = usec * 10 + static_cast<std::uint64_t>(line[k] - '0');
    for (std::size_t k = frac_digits; k < 6; ++k) usec *= 10;
    expect(')', "')'");
    if (i >= n || line[i] != ' ') malformed("expected space after timestamp");
    while (i < n && line[i] == ' ') ++i;

    std::size_t iface_start = i;
    while (i < n && line[i] != ' ') ++i;
    if (i == iface_start) malformed("missing interface");
    std::string iface(line.substr(iface_start, i - iface_start));
    while (i < n && line[i] == ' ') ++i;

    std::size_t id_start = i;
    while (i < n && is_hex(line[i])) ++i;
    const std::size_t id_digits = i - id_start;
    if (id_digits != 3 && id_digits != 8) malformed("id must be 3 or 8 hex digits");
    std::uint32_t id = 0;
    for (std::size_t k = id_start; k < i; ++k) id = (id << 4) | static_cast<std::uint32_t>(hex_val(line[k]));
    const bool extended = id_digits == 8;
    if (!extended && id >= (1u << 11)) fail(CodecError::Code::kBadId, "BadId: standard id >= 2^11");
    if (extended && id >= (1u << 29)) fail(CodecError::Code::kBadId, "BadId: extended id >= 2^29");

    expect('#', "'#'");
    std::size_t data_start = i;
    while (i < n && is_hex(line[i])) ++i;
    if (i != n) malformed("trailing garbage");
    const std::size_t data_digits = i - data_start;
    if (data_digits > 16) fail(CodecError::Code::kBadPayload, "BadPayload: more than 8 bytes");
    if (data_digits % 2 != 0) fail(CodecError::Code::kBadPayload, "BadPayload: odd hex digit count");

    CanFrame frame;
    frame.timestamp = static_cast<double>(sec) + static_cast<double>(usec) * 1e-6;
    frame.interface = std::move(iface);
    frame.arbitration_id = id;
    frame.extended = extended;
    frame.dlc = static_cast<std::uint8_t>(data_digits / 2);
    for (std::size_t b = 0; b < frame.dlc; ++b) {
        frame.payload[b] = static_cast<std::uint8_t>((hex_val(line[data_start + 2 * b]) << 4) |
                                                     hex_val(line[data_start + 2 * b + 1]));
    }
    return frame;
}

std::string format_candump_line(const CanFrame& frame) {
    std::uint64_t sec = static_cast<std::uint64_t>(frame.timestamp);
    std::uint64_t usec =
        static_cast<std::uint64_t>(std::llround((frame.timestamp - static_cast<double>(sec)) * 1e6));
    if (usec >= 1000000) {
        sec += usec / 1000000;
        usec %= 1000000;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), frame.extended ? "(%llu.%06llu) %s %08X#" : "(%llu.%06llu) %s %03X#",
                  static_cast<unsigned long long>(sec), static_cast<unsigned long long>(usec),
                  frame.interface.c_str(), frame.arbitration_id);
    std::string out(buf);
    for (int b = 0; b < frame.dlc; ++b) {
        std::snprintf(buf, sizeof(buf), "%02X", frame.payload[b]);
        out += buf;
    }
    return out;
}

std::vector<CanFrame> parse_candump_log(const std::filesystem::path& path) {
    std::vector<CanFrame> frames;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        try {
            frames.push_back(parse_candump_line(lines[i]));
        } catch (const CodecError& e) {
            throw CodecError(e.code, path.filename().string() + ":" + std::to_string(i + 1) + ": " +
                                         e.what());
        }
    }
    return frames;
}

double extract_signal(const CanFrame& frame, const SignalSpec& spec) {
    spec.validate();
    check_fits_payload(frame, spec);

    std::uint64_t raw = 0;
    for (const auto& [byte, bit] : field_positions(spec))
        raw = (raw << 1) | ((frame.payload[static_cast<std::size_t>(byte)] >> bit) & 1u);

    double value;
    if (spec.is_signed) {
        std::int64_t sraw;
        if (spec.bit_length < 64 && (raw >> (spec.bit_length - 1)) & 1u) {
            sraw = static_cast<std::int64_t>(raw | (~0ULL << spec.bit_length));
        } else {
            sraw = static_cast<std::int64_t>(raw);
        }
        value = static_cast<double>(sraw) * spec.scale + spec.offset;
    } else {
        value = static_cast<double>(raw) * spec.scale + spec.offset;
    }
    return std::clamp(value, spec.min, spec.max);
}

CanFrame encode_signal(double value, const SignalSpec& spec, const CanFrame& frame) {
    spec.validate();
    check_fits_payload(frame, spec);
    if (!(value >= spec.min && value <= spec.max))
        fail(CodecError::Code::kValueOutOfRange,
             "ValueOutOfRange: " + fmt_double(value) + " outside [" + fmt_double(spec.min) + "," +
                 fmt_double(spec.max) + "] for '" + spec.name + "'");

    const long double ratio = (static_cast<long double>(value) - spec.offset) / spec.scale;
    const long double raw_ld = roundl(ratio);
    long double lo, hi;
    if (spec.is_signed) {
        lo = -powl(2.0L, spec.bit_length - 1);
        hi = powl(2.0L, spec.bit_length - 1) - 1.0L;
    } else {
        lo = 0.0L;
        hi = powl(2.0L, spec.bit_length) - 1.0L;
    }
    if (raw_ld < lo || raw_ld > hi)
        fail(CodecError::Code::kValueOutOfRange,
             "ValueOutOfRange: raw count for '" + spec.name + "' does not fit in " +
                 std::to_string(spec.bit_length) + " bits");
    std::uint64_t raw = raw_ld < 0
                            ? static_cast<std::uint64_t>(static_cast<std::int64_t>(raw_ld))
                            : static_cast<std::uint64_t>(raw_ld);
    if (spec.bit_length < 64) raw &= (1ULL << spec.bit_length) - 1ULL;

    CanFrame out = frame;
    const auto positions = field_positions(spec);
    for (std::size_t k = 0; k < positions.size(); ++k) {
        const auto [byte, bit] = positions[k];
        const std::uint64_t b = (raw >> (spec.bit_length - 1 - static_cast<int>(k))) & 1ULL;
        auto& target = out.payload[static_cast<std::size_t>(byte)];
        target = static_cast<std::uint8_t>((target & ~(1u << bit)) | (static_cast<unsigned>(b) << bit));
    }
    return out;
}

std::vector<DiscoveryResult> discover_arbitration_ids(
    const std::vector<CanFrame>& log,
    const std::vector<StimulusWindow>& windows,
    const std::vector<SignalSpec>& candidate_specs) {
    if (log.empty()) fail(CodecError::Code::kEmptyLog, "EmptyLog: no frames");
    if (windows.empty()) throw Error("discover_arbitration_ids: no stimulus windows given");
    for (const auto& w : windows)
        if (!(w.t_start < w.t_end)) throw Error("stimulus window with t_start >= t_end");

    std::map<std::uint32_t, std::vector<const CanFrame*>> by_id;
    for (const auto& f : log) by_id[f.arbitration_id].push_back(&f);

    constexpr double kEps = 1e-9;
    std::vector<DiscoveryResult> results;

    for (const auto& [id, frames] : by_id) {
        for (const auto& spec : candidate_specs) {
            Series series;
            for (const CanFrame* f : frames) {
                if (last_byte_touched(spec) >= static_cast<int>(f->dlc)) continue;
                series.t.push_back(f->timestamp);
                series.v.push_back(extract_signal(*f, spec));
            }
            if (series.t.empty()) continue;  // NoFramesForId: skip, not fail

            std::vector<const StimulusWindow*> selected;
            for (const auto& w : windows)
                if (to_string(w.label) == spec.name) selected.push_back(&w);
            if (selected.empty())
                for (const auto& w : windows) selected.push_back(&w);

            std::vector<double> in_vals, out_vals;
            for (std::size_t i = 0; i < series.t.size(); ++i) {
                bool inside = false;
                for (const auto* w : selected)
                    if (series.t[i] >= w->t_start && series.t[i] <= w->t_end) {
                        inside = true;
                        break;
                    }
                (inside ? in_vals : out_vals).push_back(series.v[i]);
            }

            const double var_in = variance(in_vals);
            const double var_out = variance(out_vals);

            int agree = 0, disagree = 0;
            for (const auto* w : selected) {
                std::vector<double> wt, wv;
                for (std::size_t i = 0; i < series.t.size(); ++i)
                    if (series.t[i] >= w->t_start && series.t[i] <= w->t_end) {
                        wt.push_back(series.t[i]);
                        wv.push_back(series.v[i]);
                    }
                if (wv.empty()) continue;
                double stat = 0.0;
                bool want_positive = true;
                switch (w->label) {
                    case StimulusLabel::kThrottle:
                    case StimulusLabel::kBrake:
                    case StimulusLabel::kAccelerate:
                        stat = slope(wt, wv);
                        break;
                    case StimulusLabel::kDecelerate:
                        stat = slope(wt, wv);
                        want_positive = false;
                        break;
                    case StimulusLabel::kSteerLeft:
                    case StimulusLabel::kSteerRight: {
                        double mean = 0.0;
                        for (double x : wv) mean += x;
                        stat = mean / static_cast<double>(wv.size());
                        want_positive = w->label == StimulusLabel::kSteerLeft;
                        break;
                    }
                }
                if (stat == 0.0) continue;
                const bool positive = stat > 0.0;
                if (positive == want_positive)
                    ++agree;
                else
                    ++disagree;
            }

            double score;
            if (var_in == 0.0 && var_out == 0.0) {
                score = 0.0;  // dead channel: zero variance everywhere
            } else {
                const double ratio = var_in / std::max(var_out, kEps);
                score = std::log(ratio + kEps) + (agree > disagree ? 1.0 : 0.0);
            }
            results.push_back({id, spec, score});
        }
    }

    std::stable_sort(results.begin(), results.end(), [](const DiscoveryResult& a, const DiscoveryResult& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.arbitration_id != b.arbitration_id) return a.arbitration_id < b.arbitration_id;
        return a.spec.name < b.spec.name;
    });
    return results;
}

std::vector<DriveRecord> resample_records(const std::vector<DriveRecord>& records, double rate_hz) {
    if (records.empty()) fail(CodecError::Code::kEmptyStream, "EmptyStream: no records to resample");
    if (!(rate_hz > 0.0)) throw Error("resample_records: rate_hz must be > 0");
    for (std::size_t i = 1; i < records.size(); ++i)
        if (!(records[i].t > records[i - 1].t))
            throw Error("resample_records: input not strictly increasing in t");

    const double t0 = records.front().t;
    const double t1 = records.back().t;
    const auto count = static_cast<std::size_t>(std::floor((t1 - t0) * rate_hz + 1e-9)) + 1;

    std::vector<DriveRecord> out;
    out.reserve(count);
    std::size_t j = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const double tk = t0 + static_cast<double>(k) / rate_hz;
        while (j + 1 < records.size() && records[j + 1].t <= tk + 1e-9) ++j;
        DriveRecord rec = records[j];
        rec.t = tk;
        out.push_back(std::move(rec));
    }
    return out;
}

double average_wheel_speed(DriveRecord& record) {
    if (record.wheel_speeds.empty())
        fail(CodecError::Code::kNoWheelSpeeds, "NoWheelSpeeds: record has no wheel speeds");
    double sum = 0.0;
    for (double w : record.wheel_speeds) sum += w;
    record.speed = sum / static_cast<double>(record.wheel_speeds.size());
    return record.speed;
}

namespace {

double record_field(const DriveRecord& rec, const std::string& name) {
    if (name == "speed") return rec.speed;
    if (name == "steering") return rec.steering;
    if (name == "throttle") return rec.throttle;
    if (name == "brake") return rec.brake;
    if (name == "torque") return rec.torque;
    if (name.rfind("wheel_speed", 0) == 0) return rec.speed;
    throw Error("unknown signal name for encoding: " + name);
}

bool is_wheel_speed(const std::string& name) { return name.rfind("wheel_speed", 0) == 0; }

}  // namespace

std::vector<DriveRecord> decode_drive_records(const std::vector<CanFrame>& log,
                                              const std::vector<SignalDef>& defs,
                                              double rate_hz) {
    if (log.empty()) fail(CodecError::Code::kEmptyLog, "EmptyLog: no frames");
    if (!(rate_hz > 0.0)) throw Error("decode_drive_records: rate_hz must be > 0");

    bool have_speed = false, have_wheels = false;
    for (const char* req : {"steering", "throttle", "brake", "torque"}) {
        bool found = false;
        for (const auto& d : defs) found = found || d.spec.name == req;
        if (!found)
            fail(CodecError::Code::kMissingSignal, std::string("MissingSignal: spec file lacks '") + req + "'");
    }
    for (const auto& d : defs) {
        if (d.spec.name == "speed") have_speed = true;
        if (is_wheel_speed(d.spec.name)) have_wheels = true;
    }
    if (!have_speed && !have_wheels)
        fail(CodecError::Code::kMissingSignal, "MissingSignal: need 'speed' or 'wheel_speed_*'");

    struct NamedSeries {
        std::string name;
        Series s;
    };
    std::vector<NamedSeries> series;
    for (const auto& d : defs) {
        d.spec.validate();
        NamedSeries ns;
        ns.name = d.spec.name;
        for (const auto& f : log) {
            if (f.arbitration_id != d.arbitration_id) continue;
            if (last_byte_touched(d.spec) >= static_cast<int>(f.dlc)) continue;
            ns.s.t.push_back(f.timestamp);
            ns.s.v.push_back(extract_signal(f, d.spec));
        }
        if (ns.s.t.empty())
            fail(CodecError::Code::kMissingSignal, "MissingSignal: no decodable frames for '" + d.spec.name + "'");
        series.push_back(std::move(ns));
    }

    double t0 = series.front().s.t.front();
    double t1 = series.front().s.t.back();
    for (const auto& ns : series) {
        t0 = std::max(t0, ns.s.t.front());
        t1 = std::min(t1, ns.s.t.back());
    }
    if (!(t1 >= t0))
        fail(CodecError::Code::kEmptyStream, "EmptyStream: signal time spans do not overlap");

    const auto count = static_cast<std::size_t>(std::floor((t1 - t0) * rate_hz + 1e-9)) + 1;
    std::vector<std::size_t> cursor(series.size(), 0);
    std::vector<DriveRecord> out;
    out.reserve(count);

    for (std::size_t k = 0; k < count; ++k) {
        const double tk = t0 + static_cast<double>(k) / rate_hz;
        DriveRecord rec;
        rec.t = tk;
        for (std::size_t si = 0; si < series.size(); ++si) {
            const auto& s = series[si].s;
            auto& c = cursor[si];
            while (c + 1 < s.t.size() && s.t[c + 1] <= tk + 1e-9) ++c;
            const double v = s.v[c];
            const std::string& name = series[si].name;
            if (name == "speed")
                rec.speed = v;
            else if (name == "steering")
                rec.steering = v;
            else if (name == "throttle")
                rec.throttle = v;
            else if (name == "brake")
                rec.brake = v;
            else if (name == "torque")
                rec.torque = v;
            else if (is_wheel_speed(name))
                rec.wheel_speeds.push_back(v);
        }
        if (!rec.wheel_speeds.empty()) average_wheel_speed(rec);
        rec.clamp_ranges();
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<CanFrame> encode_drive_records(const std::vector<DriveRecord>& records,
                                           const std::vector<SignalDef>& defs,
                                           const std::string& interface) {
    std::map<std::uint32_t, std::vector<const SignalDef*>> by_id;
    int needed_dlc_max = 0;
    for (const auto& d : defs) {
        d.spec.validate();
        by_id[d.arbitration_id].push_back(&d);
        needed_dlc_max = std::max(needed_dlc_max, last_byte_touched(d.spec) + 1);
    }
    (void)needed_dlc_max;

    std::vector<CanFrame> out;
    for (const auto& rec : records) {
        for (const auto& [id, group] : by_id) {
            CanFrame frame;
            frame.timestamp = rec.t;
            frame.interface = interface;
            frame.arbitration_id = id;
            frame.extended = id >= (1u << 11);
            int dlc = 0;
            for (const auto* d : group) dlc = std::max(dlc, last_byte_touched(d->spec) + 1);
            frame.dlc = static_cast<std::uint8_t>(dlc);
            std::size_t wheel_index = 0;
            for (const auto* d : group) {
                double v;
                if (is_wheel_speed(d->spec.name)) {
                    v = wheel_index < rec.wheel_speeds.size() ? rec.wheel_speeds[wheel_index]
                                                              : rec.speed;
                    ++wheel_index;
                } else {
                    v = record_field(rec, d->spec.name);
                }
                v = std::clamp(v, d->spec.min, d->spec.max);
                frame = encode_signal(v, d->spec, frame);
            }
            out.push_back(std::move(frame));
        }
    }
    return out;
}

namespace {

std::uint32_t parse_arbitration_id(const nlohmann::json& j) {
    if (j.is_number_unsigned() || j.is_number_integer()) return j.get<std::uint32_t>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        return static_cast<std::uint32_t>(std::stoul(s, nullptr, 0));
    }
    throw Error("arbitration_id must be a number or string");
}

}  // namespace

std::vector<SignalDef> load_signal_defs(const std::filesystem::path& path) {
    nlohmann::json j = nlohmann::json::parse(read_file(path));
    if (!j.is_array()) throw Error("signal spec file must be a JSON array: " + path.string());
    std::vector<SignalDef> defs;
    for (const auto& item : j) {
        SignalDef d;
        d.arbitration_id = parse_arbitration_id(item.at("arbitration_id"));
        d.spec.name = item.at("name").get<std::string>();
        d.spec.start_bit = item.at("start_bit").get<int>();
        d.spec.bit_length = item.at("bit_length").get<int>();
        const std::string order = item.at("byte_order").get<std::string>();
        if (order == "little_endian")
            d.spec.byte_order = ByteOrder::kLittleEndian;
        else if (order == "big_endian")
            d.spec.byte_order = ByteOrder::kBigEndian;
        else
            throw Error("byte_order must be little_endian or big_endian");
        d.spec.is_signed = item.at("signed").get<bool>();
        d.spec.scale = item.at("scale").get<double>();
        d.spec.offset = item.at("offset").get<double>();
        d.spec.unit = item.value("unit", std::string{});
        d.spec.min = item.at("min").get<double>();
        d.spec.max = item.at("max").get<double>();
        d.spec.validate();
        defs.push_back(std::move(d));
    }
    return defs;
}

std::vector<StimulusWindow> load_stimulus_windows(const std::filesystem::path& path) {
    nlohmann::json j = nlohmann::json::parse(read_file(path));
    if (!j.is_array()) throw Error("stimulus window file must be a JSON array: " + path.string());
    std::vector<StimulusWindow> windows;
    for (const auto& item : j) {
        StimulusWindow w;
        w.label = stimulus_label_from_string(item.at("label").get<std::string>());
        w.t_start = item.at("t_start").get<double>();
        w.t_end = item.at("t_end").get<double>();
        if (!(w.t_start < w.t_end)) throw Error("stimulus window needs t_start < t_end");
        windows.push_back(w);
    }
    return windows;
}

std::string drive_records_to_csv(const std::vector<DriveRecord>& records) {
    std::string out = "t,speed,steering,throttle,brake,torque\n";
    for (const auto& r : records) {
        out += fmt_double(r.t);
        out += ',';
        out += fmt_double(r.speed);
        out += ',';
        out += fmt_double(r.steering);
        out += ',';
        out += fmt_double(r.throttle);
        out += ',';
        out += fmt_double(r.brake);
        out += ',';
        out += fmt_double(r.torque);
        out += '\n';
    }
    return out;
}

std::vector<DriveRecord> drive_records_from_csv(const std::string& content) {
    std::vector<DriveRecord> records;
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "t,speed,steering,throttle,brake,torque")
                throw Error("DriveRecord CSV: unexpected header: " + line);
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 6)
            throw Error("DriveRecord CSV line " + std::to_string(line_no) + ": expected 6 fields");
        DriveRecord r;
        double* slots[6] = {&r.t, &r.speed, &r.steering, &r.throttle, &r.brake, &r.torque};
        for (int i = 0; i < 6; ++i) {
            const auto v = parse_double(fields[static_cast<std::size_t>(i)]);
            if (!v)
                throw Error("DriveRecord CSV line " + std::to_string(line_no) + ": bad number '" +
                            std::string(fields[static_cast<std::size_t>(i)]) + "'");
            *slots[i] = *v;
        }
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace n2c::can

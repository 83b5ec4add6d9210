#pragma once

// File output: CSV traces, JSON summaries and SVG frames. Numbers are written
// in shortest round-trip decimal form so identical runs give identical bytes.

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "swarmform/error.hpp"
#include "swarmform/harness/sweeps.hpp"
#include "swarmform/physics_sim.hpp"

namespace swarmform::harness {

inline constexpr std::string_view kTraceHeader = "tick,sim_time,mode,agent_id,x,y,vx,vy";

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw Error(ErrorKind::InvalidArgument, "bad number '" + std::string(s) + "'");
    return v;
}

inline long parse_long(std::string_view s) {
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw Error(ErrorKind::InvalidArgument, "bad integer '" + std::string(s) + "'");
    return v;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create directory for '" + path.string() + "': " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "': " + std::strerror(errno));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path.string() + "': " + std::strerror(errno));
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "': " + std::strerror(errno));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string format_trace_csv(const std::vector<TraceRecord>& records) {
    std::string out(kTraceHeader);
    out += '\n';
    for (const auto& r : records) {
        out += std::to_string(r.tick);
        out += ',';
        out += format_double(r.sim_time);
        out += ',';
        out += r.mode;
        out += ',';
        out += std::to_string(r.agent_id);
        for (double v : {r.x, r.y, r.vx, r.vy}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

inline std::vector<TraceRecord> parse_trace_csv(std::string_view text) {
    std::vector<TraceRecord> out;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (header) {
            if (line != kTraceHeader) throw Error(ErrorKind::InvalidArgument, "unexpected trace header");
            header = false;
            continue;
        }
        std::vector<std::string_view> f;
        std::size_t s = 0;
        while (true) {
            const std::size_t c = line.find(',', s);
            f.push_back(line.substr(s, c == std::string_view::npos ? std::string_view::npos : c - s));
            if (c == std::string_view::npos) break;
            s = c + 1;
        }
        if (f.size() != 8) throw Error(ErrorKind::InvalidArgument, "trace row needs 8 fields");
        out.push_back({parse_long(f[0]), parse_double(f[1]), std::string(f[2]), static_cast<int>(parse_long(f[3])),
                       parse_double(f[4]), parse_double(f[5]), parse_double(f[6]), parse_double(f[7])});
    }
    if (header) throw Error(ErrorKind::InvalidArgument, "empty trace");
    return out;
}

inline void emit_trace(const std::vector<TraceRecord>& records, const std::filesystem::path& path) {
    write_text_file(path, format_trace_csv(records));
}

inline nlohmann::json to_json(const SweepSummary& s) {
    return {{"method", s.method},
            {"n", s.n},
            {"transform_time", s.transform_time},
            {"collisions", s.collisions},
            {"max_displacement", s.max_displacement},
            {"mean_displacement", s.mean_displacement}};
}

inline void emit_summary(const std::vector<SweepSummary>& summaries, const std::filesystem::path& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : summaries) arr.push_back(to_json(s));
    write_text_file(path, arr.dump(2) + "\n");
}

inline void emit_json(const nlohmann::json& doc, const std::filesystem::path& path) {
    write_text_file(path, doc.dump(2) + "\n");
}

/// One SVG per sampled tick (every `every` ticks plus the last one). Agents
/// are circles of agent_radius, obstacles line segments. Returns the files.
inline std::vector<std::filesystem::path> emit_svg_frames(const std::vector<TraceRecord>& records,
                                                          const std::vector<Obstacle>& obstacles, double agent_radius,
                                                          const std::filesystem::path& dir, long every = 1) {
    if (every < 1) throw Error(ErrorKind::InvalidArgument, "frame interval must be >= 1");
    std::map<long, std::vector<const TraceRecord*>> by_tick;
    double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
    double hi_x = -lo_x, hi_y = -lo_x;
    auto grow = [&](double x, double y) {
        lo_x = std::min(lo_x, x);
        hi_x = std::max(hi_x, x);
        lo_y = std::min(lo_y, y);
        hi_y = std::max(hi_y, y);
    };
    for (const auto& r : records) {
        by_tick[r.tick].push_back(&r);
        grow(r.x, r.y);
    }
    for (const auto& o : obstacles) {
        grow(o.a.x, o.a.y);
        grow(o.b.x, o.b.y);
    }
    std::vector<std::filesystem::path> written;
    if (by_tick.empty()) return written;

    const double pad = 1.0 + agent_radius;
    lo_x -= pad;
    lo_y -= pad;
    hi_x += pad;
    hi_y += pad;
    const std::string view = format_double(lo_x) + " " + format_double(-hi_y) + " " + format_double(hi_x - lo_x) + " " +
                             format_double(hi_y - lo_y);
    const long last = by_tick.rbegin()->first;
    for (const auto& [tick, rows] : by_tick) {
        if (tick % every != 0 && tick != last) continue;
        std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + view + "\" width=\"800\">\n";
        svg += "<g transform=\"scale(1,-1)\">\n";
        for (const auto& o : obstacles)
            svg += "<line x1=\"" + format_double(o.a.x) + "\" y1=\"" + format_double(o.a.y) + "\" x2=\"" +
                   format_double(o.b.x) + "\" y2=\"" + format_double(o.b.y) +
                   "\" stroke=\"black\" stroke-width=\"0.05\"/>\n";
        for (const auto* r : rows)
            svg += "<circle cx=\"" + format_double(r->x) + "\" cy=\"" + format_double(r->y) + "\" r=\"" +
                   format_double(agent_radius) + "\" fill=\"steelblue\"/>\n";
        svg += "</g>\n";
        svg += "<text x=\"" + format_double(lo_x + 0.2) + "\" y=\"" + format_double(-hi_y + 0.6) +
               "\" font-size=\"0.5\">tick " + std::to_string(tick) + " " + rows.front()->mode + "</text>\n";
        svg += "</svg>\n";
        char name[32];
        std::snprintf(name, sizeof name, "frame_%06ld.svg", tick);
        const auto path = dir / name;
        write_text_file(path, svg);
        written.push_back(path);
    }
    return written;
}

} // namespace swarmform::harness

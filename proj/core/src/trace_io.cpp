#include "lapse/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "lapse/errors.hpp"

namespace lapse {

namespace detail {

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

Mat3 parse_matrix(const Json& values, const char* context) {
  if (!values.is_array() || values.size() != 9) {
    throw ParseError(std::string(context) + ": H must hold 9 numbers");
  }
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const Json& v = values[r * 3 + c];
      if (!v.is_number()) {
        throw ParseError(std::string(context) + ": H entries must be numbers");
      }
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

Json matrix_json(const Mat3& m) {
  Json out = Json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out.push_back(m(r, c));
  }
  return out;
}

Json vec_json(const Vec2& v) {
  return Json::array({v.x(), v.y()});
}

}  // namespace detail

using detail::Json;
using detail::require;

namespace {

DirectionSource parse_source(const std::string& s) {
  if (s == "epi") return DirectionSource::kEpipole;
  if (s == "foe") return DirectionSource::kFoe;
  if (s == "none") return DirectionSource::kMissing;
  throw ParseError("link: unknown direction source \"" + s + "\"");
}

const char* source_name(DirectionSource s) {
  switch (s) {
    case DirectionSource::kEpipole:
      return "epi";
    case DirectionSource::kFoe:
      return "foe";
    case DirectionSource::kMissing:
      break;
  }
  return "none";
}

MotionTrace trace_from_json(const Json& doc) {
  if (!doc.is_object()) throw ParseError("trace: top level must be an object");
  const auto video_id = require<std::string>(doc, "video_id", "trace");
  const auto fps = require<double>(doc, "fps", "trace");
  const Json& frames = doc.at("frames");
  const Json& links = doc.contains("links") ? doc.at("links") : Json::array();
  if (!frames.is_array() || !links.is_array()) {
    throw ParseError("trace: frames and links must be arrays");
  }

  int max_skip = 1;
  for (const Json& l : links) {
    const int i = require<int>(l, "i", "link");
    const int j = require<int>(l, "j", "link");
    max_skip = std::max(max_skip, j - i);
  }

  TraceBuilder builder(video_id, fps, max_skip);
  for (const Json& f : frames) {
    builder.add_frame({require<int>(f, "i", "frame"),
                       require<double>(f, "t_ms", "frame"),
                       require<int>(f, "w", "frame"),
                       require<int>(f, "h", "frame")});
  }
  for (const Json& l : links) {
    MotionLink link;
    link.src = l.at("i").get<int>();
    link.dst = l.at("j").get<int>();
    link.source = parse_source(require<std::string>(l, "src", "link"));
    link.flow_sum = require<double>(l, "flow", "link");
    if (link.source != DirectionSource::kMissing) {
      link.direction = Vec2(require<double>(l, "dx", "link"),
                            require<double>(l, "dy", "link"));
    } else {
      const auto dx = l.find("dx");
      const auto dy = l.find("dy");
      if (dx != l.end() && dx->is_number() && dy != l.end() &&
          dy->is_number()) {
        link.direction = Vec2(dx->get<double>(), dy->get<double>());
      }
    }
    builder.add_link(link);
  }
  if (auto it = doc.find("hists"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("trace: hists must be an array");
    for (const Json& h : *it) {
      if (!h.is_array() || h.size() % 3 != 0 || h.empty()) {
        throw ParseError("trace: each histogram must hold 3*B numbers");
      }
      ColorHistogram hist;
      hist.bins_per_channel = static_cast<int>(h.size() / 3);
      hist.bins = h.get<std::vector<double>>();
      builder.add_histogram(std::move(hist));
    }
  }
  if (auto it = doc.find("homs"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("trace: homs must be an array");
    for (const Json& h : *it) {
      HomographyLink link;
      link.src = require<int>(h, "i", "hom");
      link.dst = require<int>(h, "j", "hom");
      link.h = detail::parse_matrix(h.at("H"), "hom");
      link.tracked = require<bool>(h, "tracked", "hom");
      builder.add_homography(link);
    }
  }
  if (auto it = doc.find("avg_flow"); it != doc.end() && it->is_number()) {
    builder.expect_avg_flow(it->get<double>());
  }
  return std::move(builder).build();
}

}  // namespace

MotionTrace parse_trace(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("trace: ") + e.what());
  }
  try {
    return trace_from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("trace: ") + e.what());
  }
}

MotionTrace load_trace(const std::filesystem::path& path) {
  const Json doc = detail::read_json_file(path);
  try {
    return trace_from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_trace(const MotionTrace& trace) {
  Json doc;
  doc["video_id"] = trace.video_id();
  doc["fps"] = trace.fps();
  doc["avg_flow"] = trace.avg_flow();
  Json frames = Json::array();
  for (const FrameMeta& f : trace.frames()) {
    frames.push_back(
        {{"i", f.index}, {"t_ms", f.timestamp_ms},
         {"w", f.width}, {"h", f.height}});
  }
  doc["frames"] = std::move(frames);

  Json links = Json::array();
  for (const MotionLink& l : trace.links()) {
    Json o = {{"i", l.src}, {"j", l.dst}, {"src", source_name(l.source)},
              {"flow", l.flow_sum}};
    if (l.source != DirectionSource::kMissing) {
      o["dx"] = l.direction.x();
      o["dy"] = l.direction.y();
    }
    links.push_back(std::move(o));
  }
  doc["links"] = std::move(links);

  Json hists = Json::array();
  for (const ColorHistogram& h : trace.histograms()) {
    Json bins = Json::array();
    for (double b : h.bins) bins.push_back(b);
    hists.push_back(std::move(bins));
  }
  doc["hists"] = std::move(hists);

  Json homs = Json::array();
  for (const HomographyLink& h : trace.homographies()) {
    homs.push_back({{"i", h.src}, {"j", h.dst},
                    {"H", detail::matrix_json(h.h)}, {"tracked", h.tracked}});
  }
  doc["homs"] = std::move(homs);
  return doc.dump() + "\n";
}

void save_trace(const MotionTrace& trace, const std::filesystem::path& path) {
  detail::write_text_file(path, format_trace(trace));
}

}  // namespace lapse

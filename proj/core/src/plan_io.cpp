#include "lapse/plan_io.hpp"

#include <cmath>

#include "json_util.hpp"
#include "lapse/errors.hpp"

namespace lapse {

using detail::Json;
using detail::require;

namespace {

const char* solver_name(Solver s) {
  return s == Solver::kDijkstra ? "dijkstra" : "dag";
}

Solver parse_solver(const std::string& s) {
  if (s == "dag") return Solver::kDagDp;
  if (s == "dijkstra") return Solver::kDijkstra;
  throw ParseError("plan: unknown solver \"" + s + "\"");
}

template <class F>
auto parse_with(std::string_view text, const char* what, F&& from_json) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
  try {
    return from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

std::string read_text(const std::filesystem::path& path) {
  return detail::read_json_file(path).dump();
}

// Non-finite doubles become null.
Json number(double v) {
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

SamplingPlan sampling_from_json(const Json& doc) {
  SamplingPlan plan;
  plan.video_id = require<std::string>(doc, "video_id", "plan");
  plan.solver = parse_solver(require<std::string>(doc, "solver", "plan"));
  plan.selected = require<std::vector<int>>(doc, "selected", "plan");
  if (auto it = doc.find("transitions"); it != doc.end()) {
    for (const Json& t : *it) {
      EdgeCost c;
      auto num = [&](const char* key) {
        const Json& v = t.at(key);
        return v.is_null() ? std::nan("") : v.get<double>();
      };
      c.shakiness = num("shakiness");
      c.velocity = num("velocity");
      c.appearance = num("appearance");
      c.total = num("total");
      plan.transition_costs.push_back(c);
    }
  }
  if (auto it = doc.find("smoothness"); it != doc.end()) {
    plan.smoothness_costs = it->get<std::vector<double>>();
  }
  const Json& total = doc.at("total_cost");
  plan.total_cost = total.is_null() ? std::nan("") : total.get<double>();
  return plan;
}

PanoramaPlan panorama_from_json(const Json& doc) {
  PanoramaPlan plan;
  for (const Json& p : doc.at("panoramas")) {
    PanoramaCandidate c;
    c.video = require<int>(p, "video", "panorama");
    c.center = require<int>(p, "center", "panorama");
    const auto frames = require<std::vector<int>>(p, "members", "panorama");
    const auto videos =
        require<std::vector<int>>(p, "member_videos", "panorama");
    const Json& sizes = p.at("sizes");
    const Json& warps = p.at("warps");
    if (videos.size() != frames.size() || sizes.size() != frames.size() ||
        warps.size() != frames.size()) {
      throw ParseError("panorama: member arrays differ in length");
    }
    for (std::size_t k = 0; k < frames.size(); ++k) {
      c.members.push_back({videos[k], frames[k], sizes[k].at(0).get<int>(),
                           sizes[k].at(1).get<int>(),
                           detail::parse_matrix(warps[k], "panorama")});
    }
    c.fov_pixels = require<double>(p, "fov", "panorama");
    const auto box = require<std::vector<double>>(p, "canvas", "panorama");
    if (box.size() != 4) throw ParseError("panorama: canvas needs 4 numbers");
    c.canvas = {box[0], box[1], box[2], box[3]};
    plan.panoramas.push_back(std::move(c));
  }
  plan.selected = require<std::vector<std::size_t>>(doc, "selected", "plan");
  for (std::size_t id : plan.selected) {
    if (id >= plan.panoramas.size()) {
      throw ParseError("plan: selected id out of range");
    }
  }
  for (const Json& a : doc.at("alignment")) {
    plan.alignment.push_back({require<double>(a, "theta", "alignment"),
                              require<double>(a, "tx", "alignment"),
                              require<double>(a, "ty", "alignment"),
                              require<bool>(a, "reset", "alignment")});
  }
  for (const Json& c : doc.at("crop")) {
    plan.crop.push_back({Vec2(require<double>(c, "cx", "crop"),
                              require<double>(c, "cy", "crop")),
                         require<double>(c, "w", "crop"),
                         require<double>(c, "h", "crop")});
  }
  plan.crop_width = require<double>(doc, "crop_w", "plan");
  plan.crop_height = require<double>(doc, "crop_h", "plan");
  plan.total_cost = require<double>(doc, "total_cost", "plan");
  return plan;
}

std::vector<RawCorrespondence> correspondences_from_json(const Json& doc) {
  std::vector<RawCorrespondence> out;
  auto one = [&](const Json& o) {
    RawCorrespondence pair;
    pair.video_a = require<std::string>(o, "a", "correspondence");
    pair.video_b = require<std::string>(o, "b", "correspondence");
    for (const Json& m : o.at("matches")) {
      RawMatch match;
      match.frame_a = require<int>(m, "fa", "match");
      match.frame_b = require<int>(m, "fb", "match");
      match.count = require<int>(m, "count", "match");
      const bool tracked =
          m.contains("tracked") ? m.at("tracked").get<bool>() : true;
      if (auto h = m.find("H"); h != m.end() && tracked) {
        Mat3 mat = detail::parse_matrix(*h, "match");
        if (mat(2, 2) == 0.0) throw ParseError("match: H(2,2) is zero");
        match.b_to_a = mat / mat(2, 2);
      }
      pair.matches.push_back(std::move(match));
    }
    out.push_back(std::move(pair));
  };
  if (doc.is_array()) {
    for (const Json& o : doc) one(o);
  } else {
    one(doc);
  }
  return out;
}

}  // namespace

std::string format_sampling_plan(const SamplingPlan& plan) {
  Json doc;
  doc["video_id"] = plan.video_id;
  doc["solver"] = solver_name(plan.solver);
  doc["selected"] = plan.selected;
  Json transitions = Json::array();
  for (std::size_t k = 0; k < plan.transition_costs.size(); ++k) {
    const EdgeCost& c = plan.transition_costs[k];
    transitions.push_back({{"i", plan.selected[k]},
                           {"j", plan.selected[k + 1]},
                           {"shakiness", number(c.shakiness)},
                           {"velocity", number(c.velocity)},
                           {"appearance", number(c.appearance)},
                           {"total", number(c.total)}});
  }
  doc["transitions"] = std::move(transitions);
  doc["smoothness"] = plan.smoothness_costs;
  doc["total_cost"] = number(plan.total_cost);
  return doc.dump(1) + "\n";
}

SamplingPlan parse_sampling_plan(std::string_view json_text) {
  return parse_with(json_text, "plan", sampling_from_json);
}

void save_sampling_plan(const SamplingPlan& plan,
                        const std::filesystem::path& path) {
  detail::write_text_file(path, format_sampling_plan(plan));
}

SamplingPlan load_sampling_plan(const std::filesystem::path& path) {
  return parse_sampling_plan(read_text(path));
}

std::string format_panorama_plan(const PanoramaPlan& plan) {
  Json panoramas = Json::array();
  for (const PanoramaCandidate& c : plan.panoramas) {
    Json frames = Json::array(), videos = Json::array(), sizes = Json::array(),
         warps = Json::array();
    for (const PanoramaMember& m : c.members) {
      frames.push_back(m.frame);
      videos.push_back(m.video);
      sizes.push_back({m.width, m.height});
      warps.push_back(detail::matrix_json(m.warp));
    }
    panoramas.push_back(
        {{"video", c.video},
         {"center", c.center},
         {"members", std::move(frames)},
         {"member_videos", std::move(videos)},
         {"sizes", std::move(sizes)},
         {"warps", std::move(warps)},
         {"fov", c.fov_pixels},
         {"canvas",
          {c.canvas.min_x, c.canvas.min_y, c.canvas.max_x, c.canvas.max_y}}});
  }
  Json alignment = Json::array();
  for (const RigidAlignment& a : plan.alignment) {
    alignment.push_back(
        {{"theta", a.theta}, {"tx", a.tx}, {"ty", a.ty}, {"reset", a.reset}});
  }
  Json crop = Json::array();
  for (const CropWindow& w : plan.crop) {
    crop.push_back({{"cx", w.center.x()},
                    {"cy", w.center.y()},
                    {"w", w.width},
                    {"h", w.height}});
  }
  Json doc;
  doc["panoramas"] = std::move(panoramas);
  doc["selected"] = plan.selected;
  doc["alignment"] = std::move(alignment);
  doc["crop"] = std::move(crop);
  doc["crop_w"] = plan.crop_width;
  doc["crop_h"] = plan.crop_height;
  doc["total_cost"] = plan.total_cost;
  return doc.dump() + "\n";
}

PanoramaPlan parse_panorama_plan(std::string_view json_text) {
  return parse_with(json_text, "panorama plan", panorama_from_json);
}

void save_panorama_plan(const PanoramaPlan& plan,
                        const std::filesystem::path& path) {
  detail::write_text_file(path, format_panorama_plan(plan));
}

PanoramaPlan load_panorama_plan(const std::filesystem::path& path) {
  return parse_panorama_plan(read_text(path));
}

std::string format_report(const EvalReport& report) {
  Json metrics;
  metrics["median_skip"] = report.median_skip;
  metrics["jitter_mean"] = report.jitter_mean;
  metrics["baseline_jitter"] = report.baseline_jitter;
  metrics["jitter_improvement_pct"] = number(report.jitter_improvement_pct);
  metrics["improvement_unbounded"] = std::isinf(report.jitter_improvement_pct);
  if (report.fov_ratio_pct) metrics["fov_ratio_pct"] = *report.fov_ratio_pct;
  metrics["flags"] = {{"flow_heavy_tailed", report.flow_heavy_tailed},
                      {"jitter_not_improved", report.jitter_not_improved}};
  Json runtime = Json::object();
  for (const auto& [stage, ms] : report.runtime_ms) runtime[stage] = ms;
  Json doc;
  doc["metrics"] = std::move(metrics);
  doc["runtime_ms"] = std::move(runtime);
  return doc.dump(1) + "\n";
}

std::vector<RawCorrespondence> parse_correspondences(
    std::string_view json_text) {
  return parse_with(json_text, "correspondence", correspondences_from_json);
}

std::vector<RawCorrespondence> load_correspondences(
    const std::filesystem::path& path) {
  const Json doc = detail::read_json_file(path);
  try {
    return correspondences_from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_correspondences(std::span<const RawCorrespondence> pairs) {
  Json doc = Json::array();
  for (const RawCorrespondence& p : pairs) {
    Json matches = Json::array();
    for (const RawMatch& m : p.matches) {
      Json o = {{"fa", m.frame_a}, {"fb", m.frame_b}, {"count", m.count}};
      if (m.b_to_a) {
        o["H"] = detail::matrix_json(*m.b_to_a);
        o["tracked"] = true;
      }
      matches.push_back(std::move(o));
    }
    doc.push_back(
        {{"a", p.video_a}, {"b", p.video_b}, {"matches", std::move(matches)}});
  }
  return doc.dump() + "\n";
}

void save_correspondences(std::span<const RawCorrespondence> pairs,
                          const std::filesystem::path& path) {
  detail::write_text_file(path, format_correspondences(pairs));
}

}  // namespace lapse

#include "sulreg/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sulreg {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + msg);
}

bool parse_double(std::string_view tok, double& out) {
  // strtod accepts the forms writers commonly emit (including "1e-3", "inf").
  std::string s(tok);
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && !s.empty();
}

bool parse_index(std::string_view tok, std::uint64_t& out) {
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

Vec3 parse_vec3(std::span<const std::string_view> toks, std::size_t line_no) {
  Vec3 p;
  for (int k = 0; k < 3; ++k) {
    double v = 0.0;
    if (!parse_double(toks[k], v)) parse_fail(line_no, "not a number: '" + std::string(toks[k]) + "'");
    if (!std::isfinite(v)) parse_fail(line_no, "non-finite coordinate");
    p[k] = v;
  }
  return p;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

void check_written(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

PointCloud parse_xyz(std::istream& in) {
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = tokenize(strip_comment(line));
    if (toks.empty()) continue;
    if (toks.size() < 3) parse_fail(line_no, "expected 'x y z'");
    cloud.push_back(parse_vec3(toks, line_no));
  }
  return cloud;
}

PointCloud parse_ply(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next() || tokenize(line) != std::vector<std::string_view>{"ply"}) {
    parse_fail(line_no == 0 ? 1 : line_no, "missing 'ply' magic");
  }

  bool format_seen = false;
  std::size_t vertex_count = 0;
  bool vertex_seen = false;
  bool in_vertex = false;
  std::vector<std::string> vertex_props;
  while (true) {
    if (!next()) parse_fail(line_no, "unterminated header");
    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0] == "end_header") break;
    if (toks[0] == "comment" || toks[0] == "obj_info") continue;
    if (toks[0] == "format") {
      if (toks.size() < 2) parse_fail(line_no, "bad format line");
      if (toks[1] != "ascii") {
        throw Error(ErrorCode::UnsupportedFormat, "PLY format '" + std::string(toks[1]) + "'");
      }
      format_seen = true;
    } else if (toks[0] == "element") {
      if (toks.size() != 3) parse_fail(line_no, "bad element line");
      in_vertex = toks[1] == "vertex";
      if (in_vertex) {
        if (vertex_seen) parse_fail(line_no, "duplicate vertex element");
        std::uint64_t n = 0;
        if (!parse_index(toks[2], n)) parse_fail(line_no, "bad vertex count");
        vertex_count = static_cast<std::size_t>(n);
        vertex_seen = true;
      } else if (!vertex_seen) {
        // Elements before the vertex block would need their own parsing.
        throw Error(ErrorCode::UnsupportedFormat, "PLY element before vertex block");
      }
    } else if (toks[0] == "property") {
      if (!in_vertex) continue;
      if (toks.size() >= 2 && toks[1] == "list") {
        throw Error(ErrorCode::UnsupportedFormat, "list property on vertex element");
      }
      if (toks.size() != 3) parse_fail(line_no, "bad property line");
      vertex_props.emplace_back(toks[2]);
    } else {
      parse_fail(line_no, "unknown header keyword '" + std::string(toks[0]) + "'");
    }
  }
  if (!format_seen) parse_fail(line_no, "missing format line");
  if (!vertex_seen) parse_fail(line_no, "missing vertex element");

  int col[3] = {-1, -1, -1};
  for (std::size_t k = 0; k < vertex_props.size(); ++k) {
    if (vertex_props[k] == "x") col[0] = static_cast<int>(k);
    if (vertex_props[k] == "y") col[1] = static_cast<int>(k);
    if (vertex_props[k] == "z") col[2] = static_cast<int>(k);
  }
  if (col[0] < 0 || col[1] < 0 || col[2] < 0) parse_fail(line_no, "vertex lacks x/y/z");

  PointCloud cloud;
  cloud.reserve(vertex_count);
  while (cloud.size() < vertex_count) {
    if (!next()) parse_fail(line_no + 1, "unexpected end of vertex data");
    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks.size() < vertex_props.size()) parse_fail(line_no, "too few vertex values");
    const std::string_view xyz[3] = {toks[col[0]], toks[col[1]], toks[col[2]]};
    cloud.push_back(parse_vec3(xyz, line_no));
  }
  return cloud;
}

PointCloud load_point_cloud(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".xyz" || ext == ".txt") {
    auto in = open_in(path);
    return parse_xyz(in);
  }
  if (ext == ".ply") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return parse_ply(in);
  }
  throw Error(ErrorCode::UnsupportedFormat, "unknown point cloud extension '" + ext + "'");
}

void save_xyz(const fs::path& path, std::span<const Vec3> cloud) {
  auto out = open_out(path);
  for (const auto& p : cloud) out << fmt17(p.x()) << ' ' << fmt17(p.y()) << ' ' << fmt17(p.z()) << '\n';
  check_written(out, path);
}

CorrespondenceSet parse_correspondences(std::istream& in, std::span<const Vec3> source,
                                        std::span<const Vec3> target) {
  CorrespondenceSet corrs;
  std::optional<CorrespondenceFormat> mode;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = tokenize(strip_comment(line));
    if (toks.empty()) continue;
    if (!mode) {
      if (toks.size() == 2) {
        mode = CorrespondenceFormat::Indices;
      } else if (toks.size() == 6) {
        mode = CorrespondenceFormat::Coordinates;
      } else {
        parse_fail(line_no, "expected 'i j' or six coordinates");
      }
    }
    if (*mode == CorrespondenceFormat::Indices) {
      if (toks.size() != 2) parse_fail(line_no, "expected 'i j'");
      std::uint64_t i = 0, j = 0;
      if (!parse_index(toks[0], i) || !parse_index(toks[1], j)) {
        parse_fail(line_no, "indices must be non-negative integers");
      }
      if (i >= source.size() || j >= target.size()) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "line " + std::to_string(line_no) + ": index pair (" + std::to_string(i) +
                        ", " + std::to_string(j) + ") outside clouds of size " +
                        std::to_string(source.size()) + "/" + std::to_string(target.size()));
      }
      corrs.emplace_back(source[i], target[j]);
    } else {
      if (toks.size() != 6) parse_fail(line_no, "expected six coordinates");
      const std::span<const std::string_view> all(toks);
      corrs.emplace_back(parse_vec3(all.subspan(0, 3), line_no), parse_vec3(all.subspan(3, 3), line_no));
    }
  }
  return corrs;
}

CorrespondenceSet load_correspondences(const fs::path& path, std::span<const Vec3> source,
                                       std::span<const Vec3> target) {
  auto in = open_in(path);
  return parse_correspondences(in, source, target);
}

void save_correspondences(const fs::path& path, const CorrespondenceSet& corrs) {
  auto out = open_out(path);
  for (const auto& c : corrs) {
    out << fmt17(c.source.x()) << ' ' << fmt17(c.source.y()) << ' ' << fmt17(c.source.z()) << ' '
        << fmt17(c.target.x()) << ' ' << fmt17(c.target.y()) << ' ' << fmt17(c.target.z()) << '\n';
  }
  check_written(out, path);
}

void save_correspondence_indices(const fs::path& path,
                                 std::span<const std::pair<Index, Index>> pairs) {
  auto out = open_out(path);
  for (const auto& [i, j] : pairs) out << i << ' ' << j << '\n';
  check_written(out, path);
}

namespace {

ordered_json transform_json(const RigidTransform& t) {
  ordered_json rot = ordered_json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(t.rotation(r, c));
  return ordered_json{{"rotation", rot},
                      {"translation", {t.translation.x(), t.translation.y(), t.translation.z()}}};
}

RigidTransform transform_from_json(const ordered_json& j) {
  RigidTransform t;
  const auto& rot = j.at("rotation");
  const auto& tr = j.at("translation");
  if (!rot.is_array() || rot.size() != 9 || !tr.is_array() || tr.size() != 3) {
    throw Error(ErrorCode::ParseError, "rotation needs 9 values and translation 3");
  }
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) t.rotation(r, c) = rot.at(3 * r + c).get<double>();
  for (int k = 0; k < 3; ++k) t.translation[k] = tr.at(k).get<double>();
  return t;
}

template <typename F>
auto json_guard(F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace

RigidTransform load_transform(const fs::path& path) {
  auto in = open_in(path);
  return json_guard([&] { return transform_from_json(ordered_json::parse(in)); });
}

void save_transform(const fs::path& path, const RigidTransform& t) {
  auto out = open_out(path);
  out << transform_json(t).dump(2) << '\n';
  check_written(out, path);
}

std::string result_to_json(const RegistrationResult& result,
                           const std::optional<MetricsReport>& metrics) {
  ordered_json j = transform_json(result.transform);
  j["rounds"] = result.rounds;
  j["total_iterations"] = result.total_iterations;
  j["final_confidence"] = result.final_confidence;
  j["inlier_indices"] = result.inlier_indices;
  if (metrics) {
    j["metrics"] = ordered_json{{"rotation_error_deg", metrics->rotation_error_deg},
                                {"translation_error", metrics->translation_error},
                                {"rmse", metrics->rmse},
                                {"mese", metrics->mese},
                                {"precision", metrics->precision},
                                {"recall", metrics->recall},
                                {"f1", metrics->f1},
                                {"runtime_seconds", metrics->runtime_seconds}};
  }
  ordered_json trace = ordered_json::array();
  for (const auto& r : result.trace) {
    trace.push_back(ordered_json{{"round", r.round},
                                 {"t_glo", r.t_glo},
                                 {"t_lcl", r.t_lcl},
                                 {"local_iterations", r.local_iterations},
                                 {"ir_glo_size", r.ir_glo_size},
                                 {"cl_glo", r.cl_glo},
                                 {"c_sul_size", r.c_sul_size},
                                 {"l_sul_size", r.l_sul_size},
                                 {"branch", to_string(r.branch)},
                                 {"adopted", r.adopted},
                                 {"continued", r.continued},
                                 {"sus_included", r.sus_included},
                                 {"sus_removed", r.sus_removed}});
  }
  j["trace"] = trace;
  if (!result.notes.empty()) j["notes"] = result.notes;
  return j.dump(2);
}

void emit_result(const RegistrationResult& result, const std::optional<MetricsReport>& metrics,
                 const fs::path& path) {
  auto out = open_out(path);
  out << result_to_json(result, metrics) << '\n';
  check_written(out, path);
}

ParsedResult parse_result(const std::string& json_text) {
  return json_guard([&] {
    const auto j = ordered_json::parse(json_text);
    ParsedResult p;
    p.transform = transform_from_json(j);
    p.rounds = j.at("rounds").get<int>();
    p.total_iterations = j.at("total_iterations").get<std::uint64_t>();
    p.final_confidence = j.at("final_confidence").get<double>();
    p.inlier_indices = j.at("inlier_indices").get<IndexSet>();
    if (j.contains("metrics")) {
      const auto& m = j.at("metrics");
      MetricsReport r;
      r.rotation_error_deg = m.at("rotation_error_deg").get<double>();
      r.translation_error = m.at("translation_error").get<double>();
      r.rmse = m.at("rmse").get<double>();
      r.mese = m.at("mese").get<double>();
      r.precision = m.at("precision").get<double>();
      r.recall = m.at("recall").get<double>();
      r.f1 = m.at("f1").get<double>();
      r.runtime_seconds = m.at("runtime_seconds").get<double>();
      p.metrics = r;
    }
    for (const auto& t : j.at("trace")) {
      RoundTrace r;
      r.round = t.at("round").get<int>();
      r.t_glo = t.at("t_glo").get<std::uint64_t>();
      r.t_lcl = t.at("t_lcl").get<std::uint64_t>();
      r.local_iterations = t.at("local_iterations").get<std::uint64_t>();
      r.ir_glo_size = t.at("ir_glo_size").get<std::size_t>();
      r.cl_glo = t.at("cl_glo").get<double>();
      r.c_sul_size = t.at("c_sul_size").get<std::size_t>();
      r.l_sul_size = t.at("l_sul_size").get<std::size_t>();
      const auto branch = t.at("branch").get<std::string>();
      for (auto e : {LocalExit::EarlyTermination, LocalExit::Confidence, LocalExit::SafetyCap}) {
        if (branch == to_string(e)) r.branch = e;
      }
      r.adopted = t.at("adopted").get<bool>();
      r.continued = t.at("continued").get<bool>();
      r.sus_included = t.at("sus_included").get<std::size_t>();
      r.sus_removed = t.at("sus_removed").get<std::size_t>();
      p.trace.push_back(r);
    }
    return p;
  });
}

void write_histogram_csv(const fs::path& path, const HistogramDump& h) {
  auto out = open_out(path);
  out << "bin_low,bin_high,count\n";
  for (std::size_t b = 0; b < h.count.size(); ++b) {
    out << fmt17(h.low[b]) << ',' << fmt17(h.high[b]) << ',' << h.count[b] << '\n';
  }
  check_written(out, path);
}

void write_sus_csv(const fs::path& dir, const std::vector<std::vector<SusDecision>>& log) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string());
  for (std::size_t r = 0; r < log.size(); ++r) {
    const auto path = dir / ("sus_round_" + std::to_string(r) + ".csv");
    auto out = open_out(path);
    out << "index,action,rule,probability,threshold\n";
    for (const auto& d : log[r]) {
      out << d.correspondence_index << ',' << to_string(d.action) << ',' << to_string(d.rule) << ','
          << (d.probability ? fmt17(*d.probability) : "") << ','
          << (d.threshold_drawn ? fmt17(*d.threshold_drawn) : "") << '\n';
    }
    check_written(out, path);
  }
}

}  // namespace sulreg

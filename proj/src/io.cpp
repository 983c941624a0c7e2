#include "distdim/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "distdim/errors.hpp"

namespace distdim::io {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string strip(std::string s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool skip_line(const std::string& line) { return line.empty() || line[0] == '#'; }

Rational json_rational(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  throw ParseError("facet entries must be \"p/q\" strings or integers");
}

std::string format_double(double v, int precision) {
  std::ostringstream out;
  out << std::setprecision(precision) << v;
  return out.str();
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open \"" + path + "\" for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open \"" + path + "\" for writing");
  out << content;
  if (!out) throw std::runtime_error("write to \"" + path + "\" failed");
}

NormSpec parse_norm(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("norm file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.size() != 1) throw ParseError("norm file must hold exactly one of \"polyhedral\" or \"lp\"");
  try {
    if (doc.contains("polyhedral")) {
      const json& p = doc.at("polyhedral");
      const long long q = p.at("q").get<long long>();
      if (q < 1) throw ParseError("polyhedral q must be a positive integer");
      std::vector<RVec> facets;
      for (const auto& row : p.at("facets")) {
        RVec f;
        for (const auto& v : row) {
          Rational r = json_rational(v);
          if (denominator(Rational(r * q)) != 1)
            throw ParseError("facet entry " + to_string(r) + " is not a multiple of 1/" + std::to_string(q));
          f.push_back(std::move(r));
        }
        facets.push_back(std::move(f));
      }
      return PolyhedralNorm(std::move(facets));
    }
    if (doc.contains("lp")) {
      const json& p = doc.at("lp");
      const double exponent = p.at("p").get<double>();
      Vec weights;
      if (p.contains("weights")) {
        weights = p.at("weights").get<Vec>();
      } else {
        weights.assign(p.at("d").get<std::size_t>(), 1.0);
      }
      return SmoothNorm::lp(exponent, std::move(weights));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed norm file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid norm: ") + e.what());
  }
  throw ParseError("norm file must hold \"polyhedral\" or \"lp\"");
}

std::string norm_to_json(const NormSpec& norm) {
  json doc;
  if (const auto* poly = std::get_if<PolyhedralNorm>(&norm)) {
    json facets = json::array();
    for (const auto& f : poly->facets()) {
      json row = json::array();
      for (const auto& v : f) row.push_back(to_string(v));
      facets.push_back(row);
    }
    doc["polyhedral"] = {{"q", poly->common_denominator().convert_to<long long>()}, {"facets", facets}};
  } else {
    const auto& s = std::get<SmoothNorm>(norm);
    doc["lp"] = {{"p", s.exponent()}, {"weights", s.weights()}};
  }
  return doc.dump(2) + "\n";
}

BlockSchedule parse_schedule(const std::string& text, const Rational& target_density, unsigned q,
                             BlockSchedule::GrowthRule rule) {
  std::istringstream in(text);
  std::string line;
  std::vector<Block> blocks;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (skip_line(line)) continue;
    std::istringstream row(line);
    long long k, m, M;
    std::string extra;
    if (!(row >> k >> m >> M) || (row >> extra))
      throw ParseError("schedule line " + std::to_string(line_no) + " is not \"k m_k M_k\"");
    if (k != static_cast<long long>(blocks.size()) + 1)
      throw ParseError("schedule line " + std::to_string(line_no) + " has block index " + std::to_string(k) +
                       ", expected " + std::to_string(blocks.size() + 1));
    blocks.push_back({m, M});
  }
  try {
    return BlockSchedule(std::move(blocks), target_density, q, rule);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid schedule: ") + e.what());
  }
}

std::string schedule_to_text(const BlockSchedule& schedule) {
  std::ostringstream out;
  for (std::size_t k = 0; k < schedule.blocks().size(); ++k)
    out << (k + 1) << ' ' << schedule.blocks()[k].m << ' ' << schedule.blocks()[k].M << '\n';
  return out.str();
}

std::string cloud_to_csv(const PointCloud& cloud, NumberFormat format, int precision) {
  std::ostringstream out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t j = 0; j < cloud.dim(); ++j) {
      if (j) out << ',';
      if (format == NumberFormat::exact && cloud.is_exact())
        out << to_string(cloud.coord(i, j));
      else if (format == NumberFormat::exact)
        out << to_string(Rational(cloud.coord_double(i, j)));
      else
        out << format_double(cloud.coord_double(i, j), precision);
    }
    out << '\n';
  }
  return out.str();
}

PointCloud parse_cloud_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool decimal = false;
  std::size_t dim = 0, line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (skip_line(line)) continue;
    auto cells = split(line, ',');
    for (auto& c : cells) {
      c = strip(c);
      if (c.empty()) throw ParseError("empty cell on cloud line " + std::to_string(line_no));
      decimal = decimal || c.find_first_of(".eEni") != std::string::npos;
    }
    if (dim == 0) dim = cells.size();
    if (cells.size() != dim) throw ParseError("cloud line " + std::to_string(line_no) + " has a different width");
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw ParseError("cloud file holds no points");
  if (decimal) {
    Vec flat;
    for (const auto& r : rows)
      for (const auto& c : r) {
        std::size_t used = 0;
        double v;
        try {
          v = c.find('/') != std::string::npos ? to_double(parse_rational(c)) : std::stod(c, &used);
        } catch (const std::logic_error&) {
          throw ParseError("malformed number \"" + c + "\"");
        }
        if (c.find('/') == std::string::npos && used != c.size()) throw ParseError("malformed number \"" + c + "\"");
        flat.push_back(v);
      }
    try {
      return PointCloud::approximate_flat(dim, std::move(flat));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
  }
  std::vector<RVec> pts;
  for (const auto& r : rows) {
    RVec p;
    for (const auto& c : r) p.push_back(parse_rational(c));
    pts.push_back(std::move(p));
  }
  return PointCloud::exact(dim, pts);
}

std::string profile_to_csv(const CoveringProfile& profile) {
  std::ostringstream out;
  out << "delta,count,provenance\n";
  for (const auto& e : profile.entries()) out << to_string(e.delta) << ',' << e.count.str() << ',' << to_string(e.provenance) << '\n';
  return out.str();
}

CoveringProfile parse_profile_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<ProfileEntry> entries;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (skip_line(line)) continue;
    if (!header && line == "delta,count,provenance") {
      header = true;
      continue;
    }
    auto cells = split(line, ',');
    if (cells.size() != 3) throw ParseError("profile line " + std::to_string(line_no) + " needs 3 fields");
    ProfileEntry e;
    e.delta = parse_rational(cells[0]);
    Rational count = parse_rational(cells[1]);
    if (denominator(count) != 1) throw ParseError("profile count must be an integer");
    e.count = numerator(count);
    try {
      e.provenance = parse_provenance(strip(cells[2]));
    } catch (const std::invalid_argument& err) {
      throw ParseError(err.what());
    }
    entries.push_back(std::move(e));
  }
  try {
    return CoveringProfile(std::move(entries), "imported");
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid profile: ") + e.what());
  }
}

}  // namespace distdim::io

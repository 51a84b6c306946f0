#include "oppsched/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace oppsched {

double ResponseTimeDistribution::cdf(double t) const {
  switch (family) {
    case DistFamily::deterministic:
      return t >= mean ? 1.0 : 0.0;
    case DistFamily::exponential:
      return t <= 0.0 ? 0.0 : -std::expm1(-t / mean);
  }
  return 0.0;
}

double ResponseTimeDistribution::sample(double u) const {
  switch (family) {
    case DistFamily::deterministic:
      return mean;
    case DistFamily::exponential:
      return -mean * std::log1p(-u);
  }
  return mean;
}

double Instance::max_reward() const {
  double m = 0.0;
  for (const auto& o : opportunities) m = std::max(m, o.reward);
  return m;
}

double Instance::total_mean_time() const {
  double s = 0.0;
  for (const auto& o : opportunities) s += o.mean_response_time;
  return s;
}

Schedule Schedule::identity(int32_t n) {
  Schedule s;
  s.order.resize(static_cast<size_t>(n));
  for (int32_t i = 0; i < n; ++i) s.order[static_cast<size_t>(i)] = i;
  return s;
}

Schedule Schedule::parse(const std::string& text) {
  Schedule s;
  if (text.empty()) fail(Errc::parse_error, "empty schedule literal");
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t dash = text.find('-', pos);
    if (dash == std::string::npos) dash = text.size();
    const std::string tok = text.substr(pos, dash - pos);
    int32_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 1)
      fail(Errc::parse_error, "bad schedule element '" + tok + "' (expected 1-based index)");
    s.order.push_back(v - 1);
    if (dash == text.size()) break;
    pos = dash + 1;
  }
  return s;
}

std::string Schedule::to_string() const {
  std::string out;
  for (size_t i = 0; i < order.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(order[i] + 1);
  }
  return out;
}

void require_schedule_for(const Instance& inst, const Schedule& sched) {
  const int32_t n = inst.size();
  if (sched.size() != n)
    fail(Errc::invalid_schedule,
         "schedule has " + std::to_string(sched.size()) + " entries, instance has " +
             std::to_string(n));
  std::vector<bool> seen(static_cast<size_t>(n), false);
  for (int32_t idx : sched.order) {
    if (idx < 0 || idx >= n)
      fail(Errc::invalid_schedule, "index " + std::to_string(idx + 1) + " out of range 1.." +
                                       std::to_string(n));
    if (seen[static_cast<size_t>(idx)])
      fail(Errc::invalid_schedule, "index " + std::to_string(idx + 1) + " repeated");
    seen[static_cast<size_t>(idx)] = true;
  }
}

Instance validate_instance(std::vector<Opportunity> records) {
  if (records.empty()) fail(Errc::empty_instance, "no opportunity records");
  std::unordered_set<std::string> ids;
  for (size_t k = 0; k < records.size(); ++k) {
    const Opportunity& o = records[k];
    const std::string where = "record " + std::to_string(k + 1) + " (id '" + o.id + "')";
    if (!std::isfinite(o.reward) || o.reward < 0.0)
      fail(Errc::invalid_reward, where + ": reward must be >= 0");
    if (!std::isfinite(o.success_prob) || o.success_prob <= 0.0 || o.success_prob > 1.0)
      fail(Errc::invalid_probability, where + ": prob must be in (0,1]");
    if (!std::isfinite(o.mean_response_time) || o.mean_response_time <= 0.0)
      fail(Errc::invalid_time, where + ": mean_time must be > 0");
    if (!ids.insert(o.id).second) fail(Errc::duplicate_id, where + ": id already used");
  }
  return Instance{std::move(records)};
}

namespace {

// Locale-independent full-token double parse.
double parse_double(const std::string& tok, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    fail(Errc::parse_error, where + ": not a number: '" + tok + "'");
  return v;
}

// Shortest round-trip decimal rendering.
std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

DistFamily parse_family(const std::string& tok, const std::string& where) {
  if (tok == "det") return DistFamily::deterministic;
  if (tok == "exp") return DistFamily::exponential;
  fail(Errc::parse_error, where + ": dist must be 'det' or 'exp', got '" + tok + "'");
}

const char* family_name(DistFamily f) {
  return f == DistFamily::deterministic ? "det" : "exp";
}

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cells;
  size_t pos = 0;
  while (true) {
    size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(pos));
      break;
    }
    cells.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return cells;
}

}  // namespace

Instance parse_instance_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(Errc::parse_error, "empty file");
  const auto header = split_csv_line(line);
  const bool has_dist = header.size() == 5 && header[4] == "dist";
  if (!(header.size() == 4 || has_dist) || header[0] != "id" || header[1] != "reward" ||
      header[2] != "prob" || header[3] != "mean_time")
    fail(Errc::parse_error, "bad CSV header (expected id,reward,prob,mean_time[,dist])");

  std::vector<Opportunity> records;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    const std::string where = "line " + std::to_string(lineno);
    if (cells.size() != header.size())
      fail(Errc::parse_error, where + ": expected " + std::to_string(header.size()) +
                                  " columns, got " + std::to_string(cells.size()));
    Opportunity o;
    o.id = cells[0];
    o.reward = parse_double(cells[1], where);
    o.success_prob = parse_double(cells[2], where);
    o.mean_response_time = parse_double(cells[3], where);
    o.dist_family = has_dist ? parse_family(cells[4], where) : DistFamily::exponential;
    records.push_back(std::move(o));
  }
  return validate_instance(std::move(records));
}

Instance parse_instance_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, e.what());
  }
  if (!doc.is_array()) fail(Errc::parse_error, "top-level JSON value must be an array");

  std::vector<Opportunity> records;
  for (size_t k = 0; k < doc.size(); ++k) {
    const auto& item = doc[k];
    const std::string where = "element " + std::to_string(k + 1);
    if (!item.is_object()) fail(Errc::parse_error, where + ": expected an object");
    Opportunity o;
    try {
      o.id = item.at("id").get<std::string>();
      o.reward = item.at("reward").get<double>();
      o.success_prob = item.at("prob").get<double>();
      o.mean_response_time = item.at("mean_time").get<double>();
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::parse_error, where + ": " + e.what());
    }
    if (item.contains("dist")) {
      if (!item["dist"].is_string()) fail(Errc::parse_error, where + ": dist must be a string");
      o.dist_family = parse_family(item["dist"].get<std::string>(), where);
    }
    records.push_back(std::move(o));
  }
  return validate_instance(std::move(records));
}

Instance parse_instance_file(const std::string& path, std::optional<FileFormat> format) {
  if (!format) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
      format = FileFormat::json;
    else
      format = FileFormat::csv;
  }
  std::ifstream in(path);
  if (!in) fail(Errc::parse_error, "cannot open '" + path + "'");
  return *format == FileFormat::json ? parse_instance_json(in) : parse_instance_csv(in);
}

void serialize_instance_csv(const Instance& inst, std::ostream& out) {
  out << "id,reward,prob,mean_time,dist\n";
  for (const auto& o : inst.opportunities) {
    out << o.id << ',' << format_double(o.reward) << ',' << format_double(o.success_prob) << ','
        << format_double(o.mean_response_time) << ',' << family_name(o.dist_family) << '\n';
  }
}

void serialize_instance_json(const Instance& inst, std::ostream& out) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& o : inst.opportunities) {
    arr.push_back({{"id", o.id},
                   {"reward", o.reward},
                   {"prob", o.success_prob},
                   {"mean_time", o.mean_response_time},
                   {"dist", family_name(o.dist_family)}});
  }
  out << arr.dump(2) << '\n';
}

}  // namespace oppsched

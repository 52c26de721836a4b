#include "cep/runner/case_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <boost/tokenizer.hpp>

#include "cep/core/validate.hpp"

namespace cep {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

CaseFormatError::CaseFormatError(std::string file, int row, const std::string& message)
    : std::runtime_error(file + (row > 0 ? ":" + std::to_string(row) : std::string()) + ": " + message),
      file_(std::move(file)),
      row_(row) {}

namespace {

std::string format_number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf, end);
}

std::string format_list(const auto& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    if constexpr (std::is_integral_v<std::decay_t<decltype(v)>>) {
      out += std::to_string(v);
    } else {
      out += format_number(v);
    }
  }
  return out;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\\\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + '"';
}

// One parsed table with its header; cells are addressed by column name.
class Table {
 public:
  Table(const fs::path& dir, const std::string& file) : file_(file) {
    std::ifstream in(dir / file);
    if (!in) throw CaseFormatError(file, 0, "cannot open " + (dir / file).string());
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      std::vector<std::string> cells;
      try {
        boost::tokenizer<boost::escaped_list_separator<char>> tok(line);
        for (const auto& cell : tok) cells.push_back(trim(cell));
      } catch (const boost::escaped_list_error& e) {
        throw CaseFormatError(file_, number, e.what());
      }
      if (header_.empty()) {
        header_ = std::move(cells);
        for (std::size_t k = 0; k < header_.size(); ++k) {
          if (!column_.emplace(header_[k], static_cast<int>(k)).second) {
            throw CaseFormatError(file_, number, "duplicate column '" + header_[k] + "'");
          }
        }
        continue;
      }
      if (cells.size() != header_.size()) {
        throw CaseFormatError(file_, number,
                              "row has " + std::to_string(cells.size()) + " fields, header has " +
                                  std::to_string(header_.size()));
      }
      rows_.push_back(std::move(cells));
      lines_.push_back(number);
    }
    if (header_.empty()) throw CaseFormatError(file_, 0, "missing header line");
  }

  const std::string& file() const { return file_; }
  const std::vector<std::string>& header() const { return header_; }
  int size() const { return static_cast<int>(rows_.size()); }
  int line(int r) const { return lines_[r]; }
  bool has(const std::string& col) const { return column_.contains(col); }

  int column(const std::string& col) const {
    auto it = column_.find(col);
    if (it == column_.end()) throw CaseFormatError(file_, 1, "missing column '" + col + "'");
    return it->second;
  }

  const std::string& text(int r, int col) const { return rows_[r][col]; }
  const std::string& text(int r, const std::string& col) const { return rows_[r][column(col)]; }

  double number(int r, int col) const {
    const std::string& s = rows_[r][col];
    return parse_number(s, r, header_[col]);
  }
  double number(int r, const std::string& col) const { return number(r, column(col)); }

  // Blank or absent cells give `fallback`.
  double number_or(int r, const std::string& col, double fallback) const {
    if (!has(col) || text(r, col).empty()) return fallback;
    return number(r, col);
  }

  bool flag(int r, const std::string& col) const {
    if (!has(col)) return false;
    const std::string& s = text(r, col);
    if (s.empty() || s == "0" || s == "false") return false;
    if (s == "1" || s == "true") return true;
    throw CaseFormatError(file_, lines_[r], "column '" + col + "' expects 0/1, got '" + s + "'");
  }

  int integer(int r, const std::string& col) const {
    const double v = number(r, col);
    if (v != std::floor(v)) {
      throw CaseFormatError(file_, lines_[r], "column '" + col + "' expects an integer");
    }
    return static_cast<int>(v);
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
  }

  double parse_number(const std::string& s, int r, const std::string& col) const {
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    const auto [end, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
      throw CaseFormatError(file_, lines_[r], "column '" + col + "' expects a number, got '" + s + "'");
    }
    return v;
  }

  std::string file_;
  std::vector<std::string> header_;
  std::map<std::string, int> column_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<int> lines_;
};

// Hour-indexed matrix: rows are hours 1..T in order, one column per name.
std::vector<std::vector<double>> read_profiles(const Table& t, const std::vector<std::string>& names,
                                               int hours) {
  const int hour_col = t.column("hour");
  if (t.size() != hours) {
    throw CaseFormatError(t.file(), 0,
                          "expected " + std::to_string(hours) + " hourly rows, found " +
                              std::to_string(t.size()));
  }
  std::vector<int> cols;
  for (const auto& name : names) cols.push_back(t.column(name));
  std::vector<std::vector<double>> out(names.size(), std::vector<double>(hours));
  for (int r = 0; r < hours; ++r) {
    if (t.number(r, hour_col) != r + 1) {
      throw CaseFormatError(t.file(), t.line(r), "expected hour " + std::to_string(r + 1));
    }
    for (std::size_t k = 0; k < cols.size(); ++k) out[k][r] = t.number(r, cols[k]);
  }
  return out;
}

void write_profiles(const fs::path& path, const std::vector<std::string>& names,
                    const std::vector<const std::vector<double>*>& series, int hours) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "hour";
  for (const auto& name : names) out << ',' << quote(name);
  out << '\n';
  for (int t = 0; t < hours; ++t) {
    out << t + 1;
    for (const auto* s : series) out << ',' << format_number(s->at(t));
    out << '\n';
  }
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
  std::vector<T> out;
  boost::tokenizer<boost::char_separator<char>> tok(text, boost::char_separator<char>(", \t"));
  for (const auto& item : tok) {
    T v{};
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || end != item.data() + item.size()) {
      throw CaseFormatError("manifest.ini", 0, "bad entry '" + item + "' in " + key);
    }
    out.push_back(v);
  }
  return out;
}

template <typename T>
T manifest_value(const pt::ptree& section, const std::string& key, std::optional<T> fallback = {}) {
  auto v = section.get_optional<std::string>(pt::ptree::path_type(key, '/'));
  if (!v) {
    if (fallback) return *fallback;
    throw CaseFormatError("manifest.ini", 0, "missing key '" + key + "'");
  }
  if constexpr (std::is_same_v<T, std::string>) {
    return *v;
  } else {
    T out{};
    const auto [end, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || end != v->data() + v->size()) {
      throw CaseFormatError("manifest.ini", 0, "key '" + key + "' expects a number, got '" + *v + "'");
    }
    return out;
  }
}

const std::vector<std::string> kResourceColumns = {
    "id", "zone", "type", "kind", "rps", "no_retire", "unit_size", "existing_capacity",
    "max_new_capacity", "min_power", "ramp_up", "ramp_down", "co2_rate", "var_cost", "inv_cost",
    "fom_cost", "start_cost", "min_up", "min_down", "energy_unit_size", "existing_energy",
    "max_new_energy", "min_duration", "max_duration", "charge_efficiency", "discharge_efficiency",
    "self_discharge", "energy_inv_cost", "energy_fom_cost", "reservoir_hours"};

ResourceCluster read_resource(const Table& t, int r) {
  ResourceCluster g;
  g.id = t.text(r, "id");
  g.zone = t.text(r, "zone");
  if (t.has("type")) g.type = t.text(r, "type");
  auto kind = parse_resource_kind(t.text(r, "kind"));
  if (!kind) throw CaseFormatError(t.file(), t.line(r), "unknown resource kind '" + t.text(r, "kind") + "'");
  g.kind = *kind;
  g.rps = t.flag(r, "rps");
  g.no_retire = t.flag(r, "no_retire");
  g.unit_size = t.number_or(r, "unit_size", g.unit_size);
  g.existing_capacity = t.number_or(r, "existing_capacity", g.existing_capacity);
  g.max_new_capacity = t.number_or(r, "max_new_capacity", g.max_new_capacity);
  g.min_power = t.number_or(r, "min_power", g.min_power);
  g.ramp_up = t.number_or(r, "ramp_up", g.ramp_up);
  g.ramp_down = t.number_or(r, "ramp_down", g.ramp_down);
  g.co2_rate = t.number_or(r, "co2_rate", g.co2_rate);
  g.var_cost = t.number_or(r, "var_cost", g.var_cost);
  g.inv_cost = t.number_or(r, "inv_cost", g.inv_cost);
  g.fom_cost = t.number_or(r, "fom_cost", g.fom_cost);

  const bool committed = t.has("start_cost") && !t.text(r, "start_cost").empty();
  if (committed) {
    UnitCommitment uc;
    uc.start_cost = t.number(r, "start_cost");
    uc.min_up = t.integer(r, "min_up");
    uc.min_down = t.integer(r, "min_down");
    g.uc = uc;
  }
  if (g.kind == ResourceKind::kStorage) {
    StorageAttributes s;
    s.energy_unit_size = t.number_or(r, "energy_unit_size", s.energy_unit_size);
    s.existing_energy = t.number_or(r, "existing_energy", s.existing_energy);
    s.max_new_energy = t.number_or(r, "max_new_energy", s.max_new_energy);
    s.min_duration = t.number_or(r, "min_duration", s.min_duration);
    s.max_duration = t.number_or(r, "max_duration", s.max_duration);
    s.charge_efficiency = t.number_or(r, "charge_efficiency", s.charge_efficiency);
    s.discharge_efficiency = t.number_or(r, "discharge_efficiency", s.discharge_efficiency);
    s.self_discharge = t.number_or(r, "self_discharge", s.self_discharge);
    s.energy_inv_cost = t.number_or(r, "energy_inv_cost", s.energy_inv_cost);
    s.energy_fom_cost = t.number_or(r, "energy_fom_cost", s.energy_fom_cost);
    g.storage = s;
  } else if (g.kind == ResourceKind::kHydro) {
    HydroAttributes h;
    h.duration = t.number_or(r, "reservoir_hours", h.duration);
    h.energy_inv_cost = t.number_or(r, "energy_inv_cost", h.energy_inv_cost);
    h.energy_fom_cost = t.number_or(r, "energy_fom_cost", h.energy_fom_cost);
    g.hydro = h;
  }
  return g;
}

std::vector<std::string> resource_fields(const ResourceCluster& g) {
  const auto num = format_number;
  std::vector<std::string> f = {
      quote(g.id), quote(g.zone), quote(g.type), to_string(g.kind), g.rps ? "1" : "0",
      g.no_retire ? "1" : "0", num(g.unit_size), num(g.existing_capacity), num(g.max_new_capacity),
      num(g.min_power), num(g.ramp_up), num(g.ramp_down), num(g.co2_rate), num(g.var_cost),
      num(g.inv_cost), num(g.fom_cost)};
  if (g.uc) {
    f.insert(f.end(), {num(g.uc->start_cost), std::to_string(g.uc->min_up), std::to_string(g.uc->min_down)});
  } else {
    f.insert(f.end(), 3, "");
  }
  if (g.storage) {
    const auto& s = *g.storage;
    f.insert(f.end(), {num(s.energy_unit_size), num(s.existing_energy), num(s.max_new_energy),
                       num(s.min_duration), num(s.max_duration), num(s.charge_efficiency),
                       num(s.discharge_efficiency), num(s.self_discharge), num(s.energy_inv_cost),
                       num(s.energy_fom_cost), ""});
  } else if (g.hydro) {
    f.insert(f.end(), 8, "");
    f.insert(f.end(), {num(g.hydro->energy_inv_cost), num(g.hydro->energy_fom_cost), num(g.hydro->duration)});
  } else {
    f.insert(f.end(), 11, "");
  }
  return f;
}

void write_rows(const fs::path& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  auto emit = [&](const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) out << (k ? "," : "") << fields[k];
    out << '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
}

void check_expected_count(const SystemCase& c, const std::string& key, int actual) {
  auto it = c.metadata.find(key);
  if (it == c.metadata.end()) return;
  int expected = 0;
  const auto [end, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), expected);
  if (ec != std::errc() || end != it->second.data() + it->second.size()) {
    throw CaseFormatError("manifest.ini", 0, "metadata '" + key + "' is not an integer");
  }
  if (expected != actual) {
    throw CaseFormatError("resources.csv", 0,
                          key + " is " + std::to_string(expected) + " in the manifest but " +
                              std::to_string(actual) + " resources qualify");
  }
}

}  // namespace

SystemCase load_case(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw CaseFormatError(dir.string(), 0, "case directory not found");
  SystemCase c;

  pt::ptree manifest;
  try {
    pt::read_ini((dir / "manifest.ini").string(), manifest);
  } catch (const pt::ini_parser_error& e) {
    throw CaseFormatError("manifest.ini", static_cast<int>(e.line()), e.message());
  }
  const auto case_section = manifest.get_child_optional("case");
  if (!case_section) throw CaseFormatError("manifest.ini", 0, "missing [case] section");
  const pt::ptree& sec = *case_section;
  c.name = manifest_value<std::string>(sec, "name", std::string());
  try {
    c.policy.scenario = parse_scenario(manifest_value<std::string>(sec, "scenario"));
  } catch (const std::invalid_argument& e) {
    throw CaseFormatError("manifest.ini", 0, e.what());
  }
  c.policy.rps_share = manifest_value<double>(sec, "rps_share", c.policy.rps_share);
  c.policy.co2_intensity = manifest_value<double>(sec, "co2_intensity", c.policy.co2_intensity);
  c.policy.rps_penalty = manifest_value<double>(sec, "rps_penalty", c.policy.rps_penalty);
  c.policy.co2_penalty = manifest_value<double>(sec, "co2_penalty", c.policy.co2_penalty);
  c.year_hours = manifest_value<double>(sec, "year_hours", c.year_hours);
  const int tau = manifest_value<int>(sec, "hours_per_subperiod");
  auto weights = parse_list<double>(manifest_value<std::string>(sec, "weights"), "weights");
  auto ids = parse_list<int>(manifest_value<std::string>(sec, "week_ids", std::string()), "week_ids");
  try {
    c.time = TimeStructure(tau, std::move(weights), std::move(ids));
  } catch (const std::invalid_argument& e) {
    throw CaseFormatError("manifest.ini", 0, e.what());
  }
  if (const auto meta = manifest.get_child_optional("metadata")) {
    for (const auto& [key, value] : *meta) c.metadata[key] = value.data();
  }
  const int hours = c.time.total_hours();

  const Table zones(dir, "zones.csv");
  for (int r = 0; r < zones.size(); ++r) c.zones.push_back(zones.text(r, "zone"));

  const Table resources(dir, "resources.csv");
  for (int r = 0; r < resources.size(); ++r) c.clusters.push_back(read_resource(resources, r));

  const Table lines(dir, "transmission.csv");
  for (int r = 0; r < lines.size(); ++r) {
    TransmissionLine l;
    l.id = lines.text(r, "id");
    l.from = lines.text(r, "from");
    l.to = lines.text(r, "to");
    l.existing_capacity = lines.number_or(r, "existing_capacity", 0.0);
    l.max_new_capacity = lines.number_or(r, "max_new_capacity", 0.0);
    l.cost = lines.number_or(r, "cost", 0.0);
    c.lines.push_back(std::move(l));
  }

  c.demand = read_profiles(Table(dir, "demand.csv"), c.zones, hours);

  std::vector<std::string> ids_all;
  for (const auto& g : c.clusters) ids_all.push_back(g.id);
  auto avail = read_profiles(Table(dir, "availability.csv"), ids_all, hours);
  for (std::size_t g = 0; g < c.clusters.size(); ++g) c.clusters[g].availability = std::move(avail[g]);

  std::vector<std::string> hydro_ids;
  for (const auto& g : c.clusters) {
    if (g.is_hydro()) hydro_ids.push_back(g.id);
  }
  auto inflows = read_profiles(Table(dir, "inflows.csv"), hydro_ids, hours);
  for (std::size_t g = 0, k = 0; g < c.clusters.size(); ++g) {
    if (c.clusters[g].is_hydro()) c.clusters[g].hydro->inflow = std::move(inflows[k++]);
  }

  const Table segments(dir, "segments.csv");
  for (int r = 0; r < segments.size(); ++r) {
    c.segments.push_back({segments.text(r, "id"), segments.number(r, "cost"),
                          segments.number(r, "max_fraction")});
  }

  check_expected_count(c, "expected_clusters", static_cast<int>(c.clusters.size()));
  check_expected_count(c, "expected_uc_clusters", c.num_uc_clusters());

  const auto report = validate_case(c);
  if (!report.ok()) throw CaseFormatError(dir.string(), 0, "invalid case: " + report.summary());
  return c;
}

void write_case(const SystemCase& c, const fs::path& dir) {
  fs::create_directories(dir);
  const int hours = c.time.total_hours();

  pt::ptree manifest;
  auto put = [&](const std::string& key, const std::string& value) {
    manifest.put(pt::ptree::path_type(key, '/'), value);
  };
  put("case/name", c.name);
  put("case/scenario", to_string(c.policy.scenario));
  put("case/hours_per_subperiod", std::to_string(c.time.hours_per_subperiod()));
  put("case/weights", format_list(c.time.weights()));
  put("case/week_ids", format_list(c.time.week_ids()));
  put("case/year_hours", format_number(c.year_hours));
  put("case/rps_share", format_number(c.policy.rps_share));
  put("case/co2_intensity", format_number(c.policy.co2_intensity));
  put("case/rps_penalty", format_number(c.policy.rps_penalty));
  put("case/co2_penalty", format_number(c.policy.co2_penalty));
  for (const auto& [key, value] : c.metadata) put("metadata/" + key, value);
  pt::write_ini((dir / "manifest.ini").string(), manifest);

  std::vector<std::vector<std::string>> rows;
  for (const auto& z : c.zones) rows.push_back({quote(z)});
  write_rows(dir / "zones.csv", {"zone"}, rows);

  rows.clear();
  for (const auto& g : c.clusters) rows.push_back(resource_fields(g));
  write_rows(dir / "resources.csv", kResourceColumns, rows);

  rows.clear();
  for (const auto& l : c.lines) {
    rows.push_back({quote(l.id), quote(l.from), quote(l.to), format_number(l.existing_capacity),
                    format_number(l.max_new_capacity), format_number(l.cost)});
  }
  write_rows(dir / "transmission.csv", {"id", "from", "to", "existing_capacity", "max_new_capacity", "cost"},
             rows);

  rows.clear();
  for (const auto& s : c.segments) {
    rows.push_back({quote(s.id), format_number(s.cost), format_number(s.max_fraction)});
  }
  write_rows(dir / "segments.csv", {"id", "cost", "max_fraction"}, rows);

  std::vector<const std::vector<double>*> series;
  for (const auto& d : c.demand) series.push_back(&d);
  write_profiles(dir / "demand.csv", c.zones, series, hours);

  std::vector<std::string> names, hydro_names;
  std::vector<const std::vector<double>*> hydro_series;
  series.clear();
  for (const auto& g : c.clusters) {
    names.push_back(g.id);
    series.push_back(&g.availability);
    if (g.is_hydro()) {
      hydro_names.push_back(g.id);
      hydro_series.push_back(&g.hydro->inflow);
    }
  }
  write_profiles(dir / "availability.csv", names, series, hours);
  write_profiles(dir / "inflows.csv", hydro_names, hydro_series, hours);
}

SystemCase select_weeks(const SystemCase& c, const std::vector<int>& week_ids,
                        const std::vector<double>& weights) {
  if (week_ids.empty()) throw std::invalid_argument("no weeks selected");
  if (week_ids.size() != weights.size()) throw std::invalid_argument("week and weight counts differ");
  if (std::set<int>(week_ids.begin(), week_ids.end()).size() != week_ids.size()) {
    throw std::invalid_argument("week ids must be distinct");
  }
  double total = 0.0;
  for (double rho : weights) {
    if (!(rho > 0.0)) throw std::invalid_argument("week weights must be positive");
    total += rho;
  }
  if (std::abs(total - c.year_hours) > 1e-6 * std::max(1.0, c.year_hours)) {
    throw std::invalid_argument("week weights sum to " + format_number(total) + ", year has " +
                                format_number(c.year_hours) + " hours");
  }

  const auto& source = c.time.week_ids();
  const int tau = c.time.hours_per_subperiod();
  std::vector<int> first;  // 0-based first hour of each chosen week in the source profiles
  for (int id : week_ids) {
    auto it = std::find(source.begin(), source.end(), id);
    if (it == source.end()) throw std::invalid_argument("week " + std::to_string(id) + " not in case");
    first.push_back(static_cast<int>(it - source.begin()) * tau);
  }
  auto restrict = [&](const std::vector<double>& profile) {
    std::vector<double> out;
    out.reserve(first.size() * tau);
    for (int f : first) out.insert(out.end(), profile.begin() + f, profile.begin() + f + tau);
    return out;
  };

  SystemCase out = c;
  out.time = TimeStructure(tau, weights, week_ids);
  for (auto& d : out.demand) d = restrict(d);
  for (auto& g : out.clusters) {
    g.availability = restrict(g.availability);
    if (g.hydro) g.hydro->inflow = restrict(g.hydro->inflow);
  }
  return out;
}

SystemCase select_even_weeks(const SystemCase& c, int count) {
  const int W = c.time.num_subperiods();
  if (count < 1 || count > W) {
    throw std::invalid_argument("week count must lie in 1.." + std::to_string(W));
  }
  std::vector<int> ids;
  for (int k = 0; k < count; ++k) ids.push_back(c.time.week_ids()[(k * W) / count]);
  return select_weeks(c, ids, std::vector<double>(count, c.year_hours / count));
}

}  // namespace cep

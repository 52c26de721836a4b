#include "cep/model/formulation.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

namespace cep {

std::span<const int> RowMatrix::row_cols(int i) const {
  return {index.data() + start[i], static_cast<std::size_t>(start[i + 1] - start[i])};
}

std::span<const double> RowMatrix::row_vals(int i) const {
  return {value.data() + start[i], static_cast<std::size_t>(start[i + 1] - start[i])};
}

double RowMatrix::row_dot(int i, std::span<const double> x) const {
  double sum = 0.0;
  for (std::int64_t k = start[i]; k < start[i + 1]; ++k) sum += value[k] * x[index[k]];
  return sum;
}

void RowMatrix::append_row(std::span<const int> cols, std::span<const double> vals) {
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (cols[k] < 0 || cols[k] >= num_cols) throw std::out_of_range("row entry outside block columns");
    index.push_back(cols[k]);
    value.push_back(vals[k]);
  }
  start.push_back(static_cast<std::int64_t>(index.size()));
}

const char* to_string(RowFamily family) {
  switch (family) {
    case RowFamily::kNewCapacityLimit: return "new_capacity_limit";
    case RowFamily::kRetirementLimit: return "retirement_limit";
    case RowFamily::kNoRetirement: return "no_retirement";
    case RowFamily::kCapacityDefinition: return "capacity_definition";
    case RowFamily::kDurationLimit: return "duration_limit";
    case RowFamily::kLineExpansionLimit: return "line_expansion_limit";
    case RowFamily::kLineCapacityDefinition: return "line_capacity_definition";
    case RowFamily::kDemandBalance: return "demand_balance";
    case RowFamily::kAvailability: return "availability";
    case RowFamily::kStorageLimit: return "storage_limit";
    case RowFamily::kMinOutput: return "min_output";
    case RowFamily::kFlowLimit: return "flow_limit";
    case RowFamily::kCurtailmentLimit: return "curtailment_limit";
    case RowFamily::kStorageBalance: return "storage_balance";
    case RowFamily::kStorageWrap: return "storage_wrap";
    case RowFamily::kHydroBalance: return "hydro_balance";
    case RowFamily::kHydroWrap: return "hydro_wrap";
    case RowFamily::kRamp: return "ramp";
    case RowFamily::kRampWrap: return "ramp_wrap";
    case RowFamily::kCommitmentLimit: return "commitment_limit";
    case RowFamily::kCommitmentOutput: return "commitment_output";
    case RowFamily::kCommitmentBalance: return "commitment_balance";
    case RowFamily::kCommitmentWrap: return "commitment_wrap";
    case RowFamily::kCommitmentRamp: return "commitment_ramp";
    case RowFamily::kCommitmentRampWrap: return "commitment_ramp_wrap";
    case RowFamily::kMinUpTime: return "min_up_time";
    case RowFamily::kMinDownTime: return "min_down_time";
  }
  return "?";
}

namespace {

// Accumulates one row over two column spaces, merging repeated columns.
class RowBuilder {
 public:
  RowBuilder& x(int col, double v) {
    x_.emplace_back(col, v);
    return *this;
  }
  RowBuilder& y(int col, double v) {
    y_.emplace_back(col, v);
    return *this;
  }

  void emit_to(RowMatrix& first, RowMatrix* second) {
    flush(x_, first);
    if (second != nullptr) flush(y_, *second);
    x_.clear();
    y_.clear();
  }

 private:
  void flush(std::vector<std::pair<int, double>>& entries, RowMatrix& out) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    cols_.clear();
    vals_.clear();
    for (std::size_t k = 0; k < entries.size();) {
      const int col = entries[k].first;
      double sum = 0.0;
      for (; k < entries.size() && entries[k].first == col; ++k) sum += entries[k].second;
      if (sum == 0.0) continue;
      cols_.push_back(col);
      vals_.push_back(sum);
    }
    out.append_row(cols_, vals_);
  }

  std::vector<std::pair<int, double>> x_;
  std::vector<std::pair<int, double>> y_;
  std::vector<int> cols_;
  std::vector<double> vals_;
};

class OperationalBuilder {
 public:
  OperationalBuilder(OperationalBlock& block) : block_(block) {}

  RowBuilder& row() { return row_; }

  void emit(RowSense sense, double rhs, RowFamily family) {
    row_.emit_to(block_.A, &block_.B);
    block_.sense.push_back(sense);
    block_.b.push_back(rhs);
    block_.family.push_back(family);
  }

 private:
  OperationalBlock& block_;
  RowBuilder row_;
};

int allocate(int& next, int count) {
  const int base = next;
  next += count;
  return base;
}

}  // namespace

std::string InvestmentIndex::describe(const SystemCase& c, int j) const {
  auto find = [j](const std::vector<int>& cols) {
    const auto it = std::find(cols.begin(), cols.end(), j);
    return it == cols.end() ? -1 : static_cast<int>(it - cols.begin());
  };
  const std::pair<const std::vector<int>*, const char*> groups[] = {
      {&new_units, "new_units"},         {&retired_units, "retired_units"},
      {&capacity, "capacity"},           {&energy_new, "energy_new_units"},
      {&energy_retired, "energy_retired_units"}, {&energy_capacity, "energy_capacity"},
  };
  for (const auto& [cols, label] : groups) {
    const int g = find(*cols);
    if (g >= 0) return std::string(label) + "[" + c.clusters[g].id + "]";
  }
  if (const int l = find(line_new); l >= 0) return "line_new[" + c.lines[l].id + "]";
  if (const int l = find(line_capacity); l >= 0) return "line_capacity[" + c.lines[l].id + "]";
  return "y" + std::to_string(j);
}

std::string OperationalIndex::describe(const SystemCase& c, int j) const {
  auto hourly = [&](const std::vector<int>& bases, const char* label,
                    auto&& name_of) -> std::string {
    for (std::size_t k = 0; k < bases.size(); ++k) {
      if (bases[k] >= 0 && j >= bases[k] && j < bases[k] + hours) {
        return std::string(label) + "[" + name_of(k) + "," + std::to_string(j - bases[k]) + "]";
      }
    }
    return {};
  };
  auto cluster = [&](std::size_t k) { return c.clusters[k].id; };
  const std::pair<const std::vector<int>*, const char*> groups[] = {
      {&generation, "gen"}, {&charge, "charge"}, {&state_of_charge, "soc"},
      {&level, "level"},    {&spill, "spill"},   {&commit, "commit"},
      {&start, "start"},    {&shut, "shut"},
  };
  for (const auto& [bases, label] : groups) {
    if (auto s = hourly(*bases, label, cluster); !s.empty()) return s;
  }
  if (auto s = hourly(flow, "flow", [&](std::size_t k) { return c.lines[k].id; }); !s.empty()) return s;
  if (auto s = hourly(curtailment, "nse",
                      [&](std::size_t k) {
                        return c.zones[k / num_segments] + "/" + c.segments[k % num_segments].id;
                      });
      !s.empty()) {
    return s;
  }
  if (j == rps_slack) return "rps_slack";
  if (j == co2_slack) return "co2_slack";
  return "x" + std::to_string(j);
}

InvestmentBlock build_investment_block(const SystemCase& c) {
  InvestmentBlock out;
  auto& idx = out.index;
  const int G = static_cast<int>(c.clusters.size());
  const int L = static_cast<int>(c.lines.size());
  idx.new_units.assign(G, -1);
  idx.retired_units.assign(G, -1);
  idx.capacity.assign(G, -1);
  idx.energy_new.assign(G, -1);
  idx.energy_retired.assign(G, -1);
  idx.energy_capacity.assign(G, -1);
  idx.line_new.assign(L, -1);
  idx.line_capacity.assign(L, -1);

  int next = 0;
  for (int g = 0; g < G; ++g) {
    idx.new_units[g] = next++;
    idx.retired_units[g] = next++;
    idx.capacity[g] = next++;
    if (c.clusters[g].is_storage()) {
      idx.energy_new[g] = next++;
      idx.energy_retired[g] = next++;
      idx.energy_capacity[g] = next++;
    }
  }
  for (int l = 0; l < L; ++l) {
    idx.line_new[l] = next++;
    idx.line_capacity[l] = next++;
  }
  idx.size = next;

  out.R.num_cols = next;
  out.c0.assign(next, 0.0);
  out.integer.assign(next, 0);
  RowBuilder row;
  auto emit = [&](RowSense sense, double rhs, RowFamily family) {
    row.emit_to(out.R, nullptr);
    out.sense.push_back(sense);
    out.r.push_back(rhs);
    out.family.push_back(family);
  };

  for (int g = 0; g < G; ++g) {
    const auto& k = c.clusters[g];
    const int omega = idx.new_units[g];
    const int delta = idx.retired_units[g];
    const int cap = idx.capacity[g];
    out.integer[omega] = 1;
    out.integer[delta] = 1;

    row.x(omega, k.unit_size);
    emit(RowSense::kLessEqual, k.max_new_capacity, RowFamily::kNewCapacityLimit);
    row.x(delta, k.unit_size);
    emit(RowSense::kLessEqual, k.existing_capacity, RowFamily::kRetirementLimit);
    if (k.no_retire) {
      row.x(delta, 1.0);
      emit(RowSense::kEqual, 0.0, RowFamily::kNoRetirement);
    }
    row.x(cap, 1.0).x(omega, -k.unit_size).x(delta, k.unit_size);
    emit(RowSense::kEqual, k.existing_capacity, RowFamily::kCapacityDefinition);

    out.c0[omega] += k.inv_cost * k.unit_size;
    out.c0[cap] += k.fom_cost;
    if (k.is_hydro() && k.hydro) {
      out.c0[omega] += k.hydro->energy_inv_cost * k.hydro->duration * k.unit_size;
      out.c0[cap] += k.hydro->energy_fom_cost * k.hydro->duration;
    }

    if (k.is_storage() && k.storage) {
      const auto& s = *k.storage;
      const int enew = idx.energy_new[g];
      const int eret = idx.energy_retired[g];
      const int ecap = idx.energy_capacity[g];
      out.integer[enew] = 1;
      out.integer[eret] = 1;
      row.x(enew, s.energy_unit_size);
      emit(RowSense::kLessEqual, s.max_new_energy, RowFamily::kNewCapacityLimit);
      row.x(eret, s.energy_unit_size);
      emit(RowSense::kLessEqual, s.existing_energy, RowFamily::kRetirementLimit);
      if (k.no_retire) {
        row.x(eret, 1.0);
        emit(RowSense::kEqual, 0.0, RowFamily::kNoRetirement);
      }
      row.x(ecap, 1.0).x(enew, -s.energy_unit_size).x(eret, s.energy_unit_size);
      emit(RowSense::kEqual, s.existing_energy, RowFamily::kCapacityDefinition);
      row.x(cap, s.min_duration).x(ecap, -1.0);
      emit(RowSense::kLessEqual, 0.0, RowFamily::kDurationLimit);
      row.x(ecap, 1.0).x(cap, -s.max_duration);
      emit(RowSense::kLessEqual, 0.0, RowFamily::kDurationLimit);

      out.c0[enew] += s.energy_inv_cost * s.energy_unit_size;
      out.c0[ecap] += s.energy_fom_cost;
    }
  }

  for (int l = 0; l < L; ++l) {
    const auto& line = c.lines[l];
    const int tnew = idx.line_new[l];
    const int tcap = idx.line_capacity[l];
    out.integer[tnew] = 1;
    row.x(tnew, 1.0);
    emit(RowSense::kLessEqual, line.max_new_capacity, RowFamily::kLineExpansionLimit);
    row.x(tcap, 1.0).x(tnew, -1.0);
    emit(RowSense::kEqual, line.existing_capacity, RowFamily::kLineCapacityDefinition);
    out.c0[tnew] += line.cost;
  }
  return out;
}

OperationalIndex make_operational_index(const SystemCase& c, Scenario scenario) {
  OperationalIndex x;
  const int G = static_cast<int>(c.clusters.size());
  const int tau = c.time.hours_per_subperiod();
  x.hours = tau;
  x.num_segments = static_cast<int>(c.segments.size());
  for (auto* v : {&x.generation, &x.charge, &x.state_of_charge, &x.level, &x.spill, &x.commit,
                  &x.start, &x.shut}) {
    v->assign(G, -1);
  }
  int next = 0;
  for (int g = 0; g < G; ++g) {
    const auto& k = c.clusters[g];
    x.generation[g] = allocate(next, tau);
    if (k.is_storage()) {
      x.charge[g] = allocate(next, tau);
      x.state_of_charge[g] = allocate(next, tau);
    }
    if (k.is_hydro()) {
      x.level[g] = allocate(next, tau);
      x.spill[g] = allocate(next, tau);
    }
    if (k.is_uc()) {
      x.commit[g] = allocate(next, tau);
      x.start[g] = allocate(next, tau);
      x.shut[g] = allocate(next, tau);
    }
  }
  for (std::size_t l = 0; l < c.lines.size(); ++l) x.flow.push_back(allocate(next, tau));
  for (std::size_t z = 0; z < c.zones.size(); ++z) {
    for (std::size_t s = 0; s < c.segments.size(); ++s) x.curtailment.push_back(allocate(next, tau));
  }
  if (scenario == Scenario::kRps) x.rps_slack = next++;
  if (scenario == Scenario::kCo2) x.co2_slack = next++;
  x.size = next;
  return x;
}

OperationalBlock build_operational_block(const SystemCase& c, const OperationalIndex& x,
                                         const InvestmentIndex& y, int w, Scenario scenario) {
  const auto& ts = c.time;
  const int tau = x.hours;
  const int t0 = ts.first_hour(w);
  const int G = static_cast<int>(c.clusters.size());
  const int Z = static_cast<int>(c.zones.size());
  const int S = x.num_segments;

  OperationalBlock block;
  block.w = w;
  block.A.num_cols = x.size;
  block.B.num_cols = y.size;
  block.c.assign(x.size, 0.0);
  block.lower.assign(x.size, 0.0);
  for (int base : x.flow) std::fill_n(block.lower.begin() + base, tau, -kInf);

  OperationalBuilder ob(block);
  auto& row = ob.row();
  // Local hour of the circular predecessor within the subperiod.
  auto prev = [tau](int i) { return i == 0 ? tau - 1 : i - 1; };

  std::vector<int> zone_of(G);
  for (int g = 0; g < G; ++g) zone_of[g] = c.zone_index(c.clusters[g].zone);

  // Demand balance.
  for (int z = 0; z < Z; ++z) {
    for (int i = 0; i < tau; ++i) {
      for (int g = 0; g < G; ++g) {
        if (zone_of[g] != z) continue;
        row.x(x.at(x.generation[g], i), 1.0);
        if (x.charge[g] >= 0) row.x(x.at(x.charge[g], i), -1.0);
      }
      for (std::size_t l = 0; l < c.lines.size(); ++l) {
        if (c.lines[l].from == c.zones[z]) row.x(x.at(x.flow[l], i), -1.0);
        if (c.lines[l].to == c.zones[z]) row.x(x.at(x.flow[l], i), 1.0);
      }
      for (int s = 0; s < S; ++s) row.x(x.at(x.nse(z, s), i), 1.0);
      ob.emit(RowSense::kEqual, c.demand[z][t0 + i - 1], RowFamily::kDemandBalance);
    }
  }

  for (int g = 0; g < G; ++g) {
    const auto& k = c.clusters[g];
    const int P = y.capacity[g];
    const int gen = x.generation[g];
    auto sigma = [&](int i) { return k.availability[t0 + i - 1]; };

    if (!k.is_uc()) {
      for (int i = 0; i < tau; ++i) {
        row.x(x.at(gen, i), 1.0).y(P, -sigma(i));
        ob.emit(RowSense::kLessEqual, 0.0, RowFamily::kAvailability);
      }
    }

    if (k.is_storage() && k.storage) {
      const auto& st = *k.storage;
      const int E = y.energy_capacity[g];
      const int ch = x.charge[g];
      const int soc = x.state_of_charge[g];
      for (int i = 0; i < tau; ++i) {
        row.x(x.at(ch, i), 1.0).y(P, -sigma(i));
        ob.emit(RowSense::kLessEqual, 0.0, RowFamily::kAvailability);
        row.x(x.at(gen, i), 1.0).x(x.at(ch, i), 1.0).y(P, -1.0);
        ob.emit(RowSense::kLessEqual, 0.0, RowFamily::kStorageLimit);
        row.x(x.at(soc, i), 1.0).y(E, -1.0);
        ob.emit(RowSense::kLessEqual, 0.0, RowFamily::kStorageLimit);
        row.x(x.at(ch, i), st.charge_efficiency).x(x.at(soc, i), 1.0).y(E, -1.0);
        ob.emit(RowSense::kLessEqual, 0.0, RowFamily::kStorageLimit);
        row.x(x.at(gen, i), 1.0 / st.discharge_efficiency).x(x.at(soc, i), -1.0);
        ob.emit(RowSense::kLessEqual, 0.0, RowFamily::kStorageLimit);
      }
      for (int i = 0; i < tau; ++i) {
        row.x(x.at(soc, i), 1.0)
            .x(x.at(soc, prev(i)), -(1.0 - st.self_discharge))
            .x(x.at(ch, i), -st.charge_efficiency)
            .x(x.at(gen, i), 1.0 / st.discharge_efficiency);
        ob.emit(RowSense::kEqual, 0.0, i == 0 ? RowFamily::kStorageWrap : RowFamily::kStorageBalance);
      }
    }

    if (k.is_hydro() && k.hydro) {
      const auto& h = *k.hydro;
      const int lev = x.level[g];
      const int sp = x.spill[g];
      for (int i = 0; i < tau; ++i) {
        row.x(x.at(lev, i), 1.0).y(P, -h.duration);
        ob.emit(RowSense::kLessEqual, 0.0, RowFamily::kStorageLimit);
      }
      for (int i = 0; i < tau; ++i) {
        row.x(x.at(gen, i), 1.0).x(x.at(sp, i), 1.0).y(P, -k.min_power);
        ob.emit(RowSense::kGreaterEqual, 0.0, RowFamily::kMinOutput);
      }
      for (int i = 0; i < tau; ++i) {
        row.x(x.at(lev, i), 1.0)
            .x(x.at(lev, prev(i)), -1.0)
            .x(x.at(gen, i), 1.0)
            .x(x.at(sp, i), 1.0)
            .y(P, -h.inflow[t0 + i - 1]);
        ob.emit(RowSense::kEqual, 0.0, i == 0 ? RowFamily::kHydroWrap : RowFamily::kHydroBalance);
      }
    }

    if (!k.is_uc() && !k.is_storage() && !k.is_hydro()) {
      for (int i = 0; i < tau; ++i) {
        row.x(x.at(gen, i), 1.0).y(P, -k.min_power);
        ob.emit(RowSense::kGreaterEqual, 0.0, RowFamily::kMinOutput);
      }
    }

    if (!k.is_uc()) {
      // Interior pairs first, then the two rows closing the circle.
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < tau; ++i) {
          const bool wrap = i == 0;
          if (wrap != (pass == 1)) continue;
          const RowFamily family = wrap ? RowFamily::kRampWrap : RowFamily::kRamp;
          row.x(x.at(gen, i), 1.0).x(x.at(gen, prev(i)), -1.0).y(P, -k.ramp_up);
          ob.emit(RowSense::kLessEqual, 0.0, family);
          row.x(x.at(gen, prev(i)), 1.0).x(x.at(gen, i), -1.0).y(P, -k.ramp_down);
          ob.emit(RowSense::kLessEqual, 0.0, family);
        }
      }
    }

    if (k.is_uc()) {
      const double unit = k.unit_size;
      const int u = x.commit[g];
      const int su = x.start[g];
      const int sd = x.shut[g];
      for (int i = 0; i < tau; ++i) {
        for (int var : {u, su, sd}) {
          row.x(x.at(var, i), unit).y(P, -1.0);
          ob.emit(RowSense::kLessEqual, 0.0, RowFamily::kCommitmentLimit);
        }
        row.x(x.at(gen, i), 1.0).x(x.at(u, i), -k.min_power * unit);
        ob.emit(RowSense::kGreaterEqual, 0.0, RowFamily::kCommitmentOutput);
        row.x(x.at(gen, i), 1.0).x(x.at(u, i), -sigma(i) * unit);
        ob.emit(RowSense::kLessEqual, 0.0, RowFamily::kCommitmentOutput);
      }
      for (int i = 0; i < tau; ++i) {
        row.x(x.at(u, i), 1.0).x(x.at(u, prev(i)), -1.0).x(x.at(su, i), -1.0).x(x.at(sd, i), 1.0);
        ob.emit(RowSense::kEqual, 0.0,
                i == 0 ? RowFamily::kCommitmentWrap : RowFamily::kCommitmentBalance);
      }
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < tau; ++i) {
          const bool wrap = i == 0;
          if (wrap != (pass == 1)) continue;
          const RowFamily family = wrap ? RowFamily::kCommitmentRampWrap : RowFamily::kCommitmentRamp;
          const double start_up = std::min(sigma(i), std::max(k.min_power, k.ramp_up));
          const double start_dn = std::min(sigma(i), std::max(k.min_power, k.ramp_down));
          row.x(x.at(gen, i), 1.0)
              .x(x.at(gen, prev(i)), -1.0)
              .x(x.at(u, i), -unit * k.ramp_up)
              .x(x.at(su, i), unit * k.ramp_up - unit * start_up)
              .x(x.at(sd, i), unit * k.min_power);
          ob.emit(RowSense::kLessEqual, 0.0, family);
          row.x(x.at(gen, prev(i)), 1.0)
              .x(x.at(gen, i), -1.0)
              .x(x.at(u, i), -unit * k.ramp_down)
              .x(x.at(su, i), unit * k.ramp_down + unit * k.min_power)
              .x(x.at(sd, i), -unit * start_dn);
          ob.emit(RowSense::kLessEqual, 0.0, family);
        }
      }
      const auto& uc = *k.uc;
      for (int i = 0; i < tau; ++i) {
        const int t = t0 + i;
        row.x(x.at(u, i), 1.0);
        for (int n = 0; n <= uc.min_up; ++n) row.x(x.at(su, circular_prev(t, n, w, ts) - t0), -1.0);
        ob.emit(RowSense::kGreaterEqual, 0.0, RowFamily::kMinUpTime);
        row.x(x.at(u, i), 1.0).y(P, -1.0 / unit);
        for (int n = 0; n <= uc.min_down; ++n) row.x(x.at(sd, circular_prev(t, n, w, ts) - t0), 1.0);
        ob.emit(RowSense::kLessEqual, 0.0, RowFamily::kMinDownTime);
      }
    }
  }

  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    const int T = y.line_capacity[l];
    for (int i = 0; i < tau; ++i) {
      row.x(x.at(x.flow[l], i), 1.0).y(T, -1.0);
      ob.emit(RowSense::kLessEqual, 0.0, RowFamily::kFlowLimit);
      row.x(x.at(x.flow[l], i), -1.0).y(T, -1.0);
      ob.emit(RowSense::kLessEqual, 0.0, RowFamily::kFlowLimit);
    }
  }

  for (int z = 0; z < Z; ++z) {
    for (int s = 0; s < S; ++s) {
      for (int i = 0; i < tau; ++i) {
        row.x(x.at(x.nse(z, s), i), 1.0);
        ob.emit(RowSense::kLessEqual, c.segments[s].max_fraction * c.demand[z][t0 + i - 1],
                RowFamily::kCurtailmentLimit);
      }
    }
  }

  // Objective: hourly terms weighted by alpha_t, policy penalties unweighted.
  for (int i = 0; i < tau; ++i) {
    const double alpha = ts.alpha(t0 + i);
    for (int g = 0; g < G; ++g) {
      const auto& k = c.clusters[g];
      block.c[x.at(x.generation[g], i)] += k.var_cost * alpha;
      if (x.charge[g] >= 0) block.c[x.at(x.charge[g], i)] += k.var_cost * alpha;
      if (x.start[g] >= 0) block.c[x.at(x.start[g], i)] += k.uc->start_cost * alpha;
    }
    for (int z = 0; z < Z; ++z) {
      for (int s = 0; s < S; ++s) block.c[x.at(x.nse(z, s), i)] += c.segments[s].cost * alpha;
    }
  }
  if (scenario == Scenario::kRps) block.c[x.rps_slack] = c.policy.rps_penalty;
  if (scenario == Scenario::kCo2) block.c[x.co2_slack] = c.policy.co2_penalty;
  return block;
}

PolicyBlock build_policy_block(const SystemCase& c, const OperationalIndex& x, Scenario scenario) {
  PolicyBlock out;
  const int W = c.time.num_subperiods();
  out.Q.resize(W);
  for (auto& q : out.Q) q.num_cols = x.size;
  if (scenario == Scenario::kRef) return out;

  const double demand = c.weighted_demand();
  const int G = static_cast<int>(c.clusters.size());
  for (int w = 1; w <= W; ++w) {
    const int t0 = c.time.first_hour(w);
    RowBuilder row;
    for (int i = 0; i < x.hours; ++i) {
      const double alpha = c.time.alpha(t0 + i);
      for (int g = 0; g < G; ++g) {
        const auto& k = c.clusters[g];
        if (scenario == Scenario::kRps) {
          if (k.rps) row.x(x.at(x.generation[g], i), -alpha);
        } else {
          row.x(x.at(x.generation[g], i), alpha * k.co2_rate);
          if (x.charge[g] >= 0) row.x(x.at(x.charge[g], i), alpha * k.co2_rate);
        }
      }
    }
    if (scenario == Scenario::kRps) {
      row.x(x.rps_slack, -1.0);
    } else {
      row.x(x.co2_slack, -1.0);
    }
    row.emit_to(out.Q[w - 1], nullptr);
  }
  if (scenario == Scenario::kRps) {
    out.e.push_back(-c.policy.rps_share * demand);
    out.row_names.push_back("rps_share");
  } else {
    out.e.push_back(c.policy.co2_intensity * demand);
    out.row_names.push_back("co2_cap");
  }
  return out;
}

CompactBlocks build_blocks(const SystemCase& c, Scenario scenario, int workers) {
  CompactBlocks out;
  out.scenario = scenario;
  out.investment = build_investment_block(c);
  out.x_index = make_operational_index(c, scenario);
  const int W = c.time.num_subperiods();
  out.operations.resize(W);
  std::atomic<int> next{1};
  auto work = [&] {
    for (int w = next++; w <= W; w = next++) {
      out.operations[w - 1] = build_operational_block(c, out.x_index, out.investment.index, w, scenario);
    }
  };
  const int threads = std::clamp(workers, 1, std::max(1, W));
  std::vector<std::jthread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(work);
  work();
  pool.clear();
  out.policy = build_policy_block(c, out.x_index, scenario);
  return out;
}

namespace {

void append_row(const RowMatrix& m, int i, int offset, std::vector<int>& cols,
                std::vector<double>& vals) {
  for (std::int64_t k = m.start[i]; k < m.start[i + 1]; ++k) {
    cols.push_back(m.index[k] + offset);
    vals.push_back(m.value[k]);
  }
}

AssembledProgram assemble(const CompactBlocks& blocks, bool relax, bool budgeted) {
  AssembledProgram out;
  auto& lp = out.lp;
  const auto& inv = blocks.investment;
  const int m = inv.index.size;
  const int n = blocks.x_index.size;
  const int W = blocks.num_subperiods();
  const int K = blocks.policy.num_rows();

  std::int64_t nnz = inv.R.num_nonzeros();
  int rows = inv.R.num_rows() + K;
  for (const auto& b : blocks.operations) {
    nnz += b.A.num_nonzeros() + b.B.num_nonzeros();
    rows += b.A.num_rows();
  }
  for (const auto& q : blocks.policy.Q) nnz += q.num_nonzeros();
  lp.reserve(m + W * n, rows, nnz);

  for (int j = 0; j < m; ++j) lp.add_column(inv.c0[j], 0.0, kInf, !relax && inv.integer[j]);
  for (const auto& b : blocks.operations) {
    out.x_offset.push_back(lp.num_cols());
    if (b.A.num_cols != n || b.B.num_cols != m) throw std::logic_error("operational block dimension mismatch");
    for (int j = 0; j < n; ++j) lp.add_column(b.c[j], b.lower[j], kInf);
  }
  if (budgeted && K > 0) {
    for (int w = 0; w < W; ++w) {
      out.q_offset.push_back(lp.num_cols());
      for (int k = 0; k < K; ++k) lp.add_column(0.0, -kInf, kInf);
    }
  }

  std::vector<int> cols;
  std::vector<double> vals;
  for (int i = 0; i < inv.R.num_rows(); ++i) {
    cols.clear();
    vals.clear();
    append_row(inv.R, i, 0, cols, vals);
    lp.add_row(cols, vals, inv.sense[i], inv.r[i]);
  }
  for (int w = 0; w < W; ++w) {
    const auto& b = blocks.operations[w];
    for (int i = 0; i < b.A.num_rows(); ++i) {
      cols.clear();
      vals.clear();
      append_row(b.B, i, 0, cols, vals);
      append_row(b.A, i, out.x_offset[w], cols, vals);
      lp.add_row(cols, vals, b.sense[i], b.b[i]);
    }
  }
  if (K == 0) return out;

  out.coupling_row = lp.num_rows();
  if (!budgeted) {
    for (int k = 0; k < K; ++k) {
      cols.clear();
      vals.clear();
      for (int w = 0; w < W; ++w) append_row(blocks.policy.Q[w], k, out.x_offset[w], cols, vals);
      lp.add_row(cols, vals, RowSense::kLessEqual, blocks.policy.e[k]);
    }
    return out;
  }
  for (int k = 0; k < K; ++k) {
    cols.clear();
    vals.clear();
    for (int w = 0; w < W; ++w) {
      cols.push_back(out.q_offset[w] + k);
      vals.push_back(1.0);
    }
    lp.add_row(cols, vals, RowSense::kEqual, blocks.policy.e[k]);
  }
  for (int w = 0; w < W; ++w) {
    for (int k = 0; k < K; ++k) {
      cols.clear();
      vals.clear();
      append_row(blocks.policy.Q[w], k, out.x_offset[w], cols, vals);
      cols.push_back(out.q_offset[w] + k);
      vals.push_back(-1.0);
      lp.add_row(cols, vals, RowSense::kLessEqual, 0.0);
    }
  }
  return out;
}

}  // namespace

AssembledProgram assemble_monolithic(const CompactBlocks& blocks, bool relax) {
  return assemble(blocks, relax, false);
}

AssembledProgram assemble_budgeted(const CompactBlocks& blocks, bool relax) {
  return assemble(blocks, relax, true);
}

AssembledProgram assemble_monolithic(const SystemCase& c, Scenario scenario, bool relax) {
  return assemble(build_blocks(c, scenario), relax, false);
}

AssembledProgram assemble_budgeted(const SystemCase& c, Scenario scenario, bool relax) {
  return assemble(build_blocks(c, scenario), relax, true);
}

std::vector<std::vector<double>> budgets_from_point(const PolicyBlock& policy,
                                                    std::span<const std::vector<double>> x) {
  const int W = static_cast<int>(policy.Q.size());
  const int K = policy.num_rows();
  if (static_cast<int>(x.size()) != W) throw std::invalid_argument("one operational vector per subperiod required");
  std::vector<std::vector<double>> q(W, std::vector<double>(K, 0.0));
  for (int k = 0; k < K; ++k) {
    double rest = policy.e[k];
    for (int w = W - 1; w >= 1; --w) {
      q[w][k] = policy.Q[w].row_dot(k, x[w]);
      rest -= q[w][k];
    }
    if (W > 0) q[0][k] = rest;
  }
  return q;
}

}  // namespace cep

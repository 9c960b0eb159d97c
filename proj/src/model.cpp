#include "dwsc/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace dwsc {

namespace {

bool in_unit_interval(double v) { return std::isfinite(v) && v > 0.0 && v <= 1.0; }

std::string describe(const std::string& kind, std::size_t index, const std::string& id) {
  std::ostringstream os;
  os << kind << "[" << index << "] ('" << id << "')";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Taxonomy
// ---------------------------------------------------------------------------

Taxonomy Taxonomy::build(const std::vector<ConceptRecord>& concepts) {
  Taxonomy t;
  t.ids_.reserve(concepts.size());
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    const auto& c = concepts[i];
    if (c.id.empty()) throw ValidationError(describe("taxonomy", i, c.id) + ": empty concept id");
    if (!t.index_.emplace(c.id, static_cast<int>(i)).second)
      throw ValidationError(describe("taxonomy", i, c.id) + ": duplicate concept id");
    t.ids_.push_back(c.id);
  }
  t.parent_.resize(concepts.size(), -1);
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    const auto& c = concepts[i];
    if (!c.parent) continue;
    auto it = t.index_.find(*c.parent);
    if (it == t.index_.end())
      throw ValidationError(describe("taxonomy", i, c.id) + ": parent '" + *c.parent +
                            "' not defined");
    if (it->second == static_cast<int>(i))
      throw ValidationError(describe("taxonomy", i, c.id) + ": concept is its own parent");
    t.parent_[i] = it->second;
  }

  // Forest check: every parent chain must terminate at a root.
  const int n = t.size();
  for (int c = 0; c < n; ++c) {
    int steps = 0;
    for (int cur = c; cur != -1; cur = t.parent_[static_cast<std::size_t>(cur)]) {
      if (++steps > n)
        throw ValidationError("taxonomy: cycle through concept '" + t.ids_[static_cast<std::size_t>(c)] + "'");
    }
  }

  t.anc_.assign(static_cast<std::size_t>(n), Bitset(static_cast<std::size_t>(n)));
  for (int c = 0; c < n; ++c) {
    auto& mask = t.anc_[static_cast<std::size_t>(c)];
    for (int cur = c; cur != -1; cur = t.parent_[static_cast<std::size_t>(cur)])
      mask.set(static_cast<std::size_t>(cur));
  }
  return t;
}

int Taxonomy::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw LookupError("unknown concept id '" + id + "'");
  return it->second;
}

bool Taxonomy::satisfies(const std::vector<int>& available, const std::vector<int>& needed) const {
  Bitset cover(static_cast<std::size_t>(size()));
  for (int a : available) cover |= ancestors_or_self(a);
  for (int nd : needed)
    if (!cover.test(static_cast<std::size_t>(nd))) return false;
  return true;
}

bool Taxonomy::satisfies(const std::vector<std::string>& available,
                         const std::vector<std::string>& needed) const {
  std::vector<int> av, nd;
  av.reserve(available.size());
  nd.reserve(needed.size());
  for (const auto& a : available) av.push_back(index_of(a));
  for (const auto& n : needed) nd.push_back(index_of(n));
  return satisfies(av, nd);
}

bool subsumes(const Taxonomy& taxonomy, const std::string& provided, const std::string& required) {
  return taxonomy.subsumes(provided, required);
}

bool satisfies(const Taxonomy& taxonomy, const std::vector<std::string>& available,
               const std::vector<std::string>& needed) {
  return taxonomy.satisfies(available, needed);
}

// ---------------------------------------------------------------------------
// Repository
// ---------------------------------------------------------------------------

Repository Repository::build(RepositoryData data) {
  Repository repo;
  repo.taxonomy_ = Taxonomy::build(data.taxonomy);

  // Locations.
  repo.locations_.reserve(data.locations.size());
  for (std::size_t i = 0; i < data.locations.size(); ++i) {
    const auto& rec = data.locations[i];
    const std::string where = describe("locations", i, rec.id);
    if (rec.id.empty()) throw ValidationError(where + ": empty id");
    if (!repo.location_index_.emplace(rec.id, static_cast<int>(i)).second)
      throw ValidationError(where + ": duplicate location id");
    if (!std::isfinite(rec.x) || !std::isfinite(rec.y))
      throw ValidationError(where + ": coords must be finite");
    if (!in_unit_interval(rec.server_access_latency))
      throw ValidationError(where + ": server_access_latency must be in (0,1]");
    repo.locations_.push_back({rec.x, rec.y, rec.server_access_latency});
  }
  if (repo.locations_.empty()) throw ValidationError("locations: at least one location required");

  // Data items.
  repo.data_items_.reserve(data.data_items.size());
  for (std::size_t i = 0; i < data.data_items.size(); ++i) {
    const auto& rec = data.data_items[i];
    const std::string where = describe("data_items", i, rec.id);
    if (rec.id.empty()) throw ValidationError(where + ": empty id");
    if (!repo.data_index_.emplace(rec.id, static_cast<int>(i)).second)
      throw ValidationError(where + ": duplicate data item id");
    if (!in_unit_interval(rec.provision_cost))
      throw ValidationError(where + ": provision_cost must be in (0,1]");
    if (!std::isfinite(rec.size) || rec.size <= 0.0)
      throw ValidationError(where + ": size must be > 0");
    auto loc = repo.location_index_.find(rec.location);
    if (loc == repo.location_index_.end())
      throw ValidationError(where + ": location '" + rec.location + "' not defined");
    repo.data_items_.push_back({rec.provision_cost, rec.size, loc->second});
  }

  // Services.
  repo.services_.reserve(data.services.size());
  for (std::size_t i = 0; i < data.services.size(); ++i) {
    const auto& rec = data.services[i];
    const std::string where = describe("services", i, rec.id);
    if (rec.id.empty()) throw ValidationError(where + ": empty id");
    if (!repo.service_index_.emplace(rec.id, static_cast<int>(i)).second)
      throw ValidationError(where + ": duplicate service id");
    if (rec.inputs.empty()) throw ValidationError(where + ": inputs must be non-empty");
    if (rec.outputs.empty()) throw ValidationError(where + ": outputs must be non-empty");

    CompiledService svc;
    auto loc = repo.location_index_.find(rec.location);
    if (loc == repo.location_index_.end())
      throw ValidationError(where + ": location '" + rec.location + "' not defined");
    svc.location = loc->second;

    auto resolve_concepts = [&](const std::vector<std::string>& names, const char* field) {
      std::set<int> seen;
      for (const auto& name : names) {
        int idx;
        try {
          idx = repo.taxonomy_.index_of(name);
        } catch (const LookupError&) {
          throw ValidationError(where + ": " + field + " concept '" + name + "' not defined");
        }
        seen.insert(idx);
      }
      return std::vector<int>(seen.begin(), seen.end());
    };
    svc.inputs = resolve_concepts(rec.inputs, "input");
    svc.outputs = resolve_concepts(rec.outputs, "output");

    for (std::size_t b = 0; b < rec.data_bindings.size(); ++b) {
      const auto& bind = rec.data_bindings[b];
      std::ostringstream bw;
      bw << where << ".data_bindings[" << b << "]";
      auto di = repo.data_index_.find(bind.data);
      if (di == repo.data_index_.end())
        throw ValidationError(bw.str() + ": data item '" + bind.data + "' not defined");
      if (!in_unit_interval(bind.process_time))
        throw ValidationError(bw.str() + ": process_time must be in (0,1]");
      if (!in_unit_interval(bind.service_cost))
        throw ValidationError(bw.str() + ": service_cost must be in (0,1]");
      if (!in_unit_interval(bind.transfer_time))
        throw ValidationError(bw.str() + ": transfer_time must be in (0,1]");
      if (!in_unit_interval(bind.data_comm_cost))
        throw ValidationError(bw.str() + ": data_comm_cost must be in (0,1]");
      svc.bindings.push_back({di->second, bind.process_time, bind.service_cost,
                              bind.transfer_time, bind.data_comm_cost});
    }
    repo.services_.push_back(std::move(svc));
  }

  // Link attributes: exactly one record per ordered location pair.
  const std::size_t n_loc = repo.locations_.size();
  repo.links_.assign(n_loc * n_loc, LinkAttr{});
  std::vector<char> link_seen(n_loc * n_loc, 0);
  for (std::size_t i = 0; i < data.link_attrs.size(); ++i) {
    const auto& rec = data.link_attrs[i];
    std::ostringstream where;
    where << "link_attrs[" << i << "] ('" << rec.from << "'->'" << rec.to << "')";
    auto from = repo.location_index_.find(rec.from);
    auto to = repo.location_index_.find(rec.to);
    if (from == repo.location_index_.end())
      throw ValidationError(where.str() + ": location '" + rec.from + "' not defined");
    if (to == repo.location_index_.end())
      throw ValidationError(where.str() + ": location '" + rec.to + "' not defined");
    std::size_t slot = static_cast<std::size_t>(from->second) * n_loc +
                       static_cast<std::size_t>(to->second);
    if (link_seen[slot]) throw ValidationError(where.str() + ": duplicate location pair");
    link_seen[slot] = 1;
    if (!in_unit_interval(rec.prop_delay_service))
      throw ValidationError(where.str() + ": prop_delay_service must be in (0,1]");
    if (!in_unit_interval(rec.prop_delay_data))
      throw ValidationError(where.str() + ": prop_delay_data must be in (0,1]");
    if (!in_unit_interval(rec.edge_comm_cost))
      throw ValidationError(where.str() + ": edge_comm_cost must be in (0,1]");
    repo.links_[slot] = {rec.prop_delay_service, rec.prop_delay_data, rec.edge_comm_cost};
  }
  for (std::size_t f = 0; f < n_loc; ++f)
    for (std::size_t t = 0; t < n_loc; ++t)
      if (!link_seen[f * n_loc + t])
        throw ValidationError("link_attrs: missing ordered pair ('" +
                              data.locations[f].id + "'->'" + data.locations[t].id + "')");

  // Weights.
  const auto& w = data.weights;
  for (double v : {w.w_t1, w.w_t2, w.w_c1, w.w_c2})
    if (!std::isfinite(v) || v < 0.0)
      throw ValidationError("weights: entries must be finite and >= 0");
  if (std::abs(w.sum() - 1.0) > 1e-12)
    throw ValidationError("weights: w_t1+w_t2+w_c1+w_c2 must equal 1 within 1e-12");

  // Optional explicit distance matrix.
  if (data.distance_matrix) {
    const auto& m = *data.distance_matrix;
    if (m.size() != n_loc)
      throw ValidationError("distance_matrix: expected " + std::to_string(n_loc) + " rows");
    for (std::size_t r = 0; r < n_loc; ++r) {
      if (m[r].size() != n_loc)
        throw ValidationError("distance_matrix: row " + std::to_string(r) + " has wrong width");
      for (std::size_t c = 0; c < n_loc; ++c) {
        double v = m[r][c];
        if (!std::isfinite(v) || v < 0.0)
          throw ValidationError("distance_matrix: entries must be finite and >= 0");
        if (r == c && v != 0.0)
          throw ValidationError("distance_matrix: diagonal must be zero");
        if (c < r && m[c][r] != v)
          throw ValidationError("distance_matrix: must be symmetric");
      }
    }
  }

  // Derived tables.
  repo.loc_dist_.assign(n_loc * n_loc, 0.0);
  for (std::size_t a = 0; a < n_loc; ++a) {
    for (std::size_t b = 0; b < n_loc; ++b) {
      double d;
      if (data.distance_matrix) {
        d = (*data.distance_matrix)[a][b];
      } else {
        double dx = repo.locations_[a].x - repo.locations_[b].x;
        double dy = repo.locations_[a].y - repo.locations_[b].y;
        d = std::sqrt(dx * dx + dy * dy);
      }
      repo.loc_dist_[a * n_loc + b] = d;
    }
  }

  const std::size_t n_con = static_cast<std::size_t>(repo.taxonomy_.size());
  repo.coverage_.reserve(repo.services_.size());
  repo.input_mask_.reserve(repo.services_.size());
  for (const auto& svc : repo.services_) {
    Bitset cover(n_con);
    for (int o : svc.outputs) cover |= repo.taxonomy_.ancestors_or_self(o);
    repo.coverage_.push_back(std::move(cover));
    Bitset in(n_con);
    for (int c : svc.inputs) in.set(static_cast<std::size_t>(c));
    repo.input_mask_.push_back(std::move(in));
  }

  repo.records_ = std::move(data);
  return repo;
}

int Repository::service_index(const std::string& id) const {
  auto it = service_index_.find(id);
  if (it == service_index_.end()) throw LookupError("unknown service id '" + id + "'");
  return it->second;
}

int Repository::location_index(const std::string& id) const {
  auto it = location_index_.find(id);
  if (it == location_index_.end()) throw LookupError("unknown location id '" + id + "'");
  return it->second;
}

int Repository::data_item_index(const std::string& id) const {
  auto it = data_index_.find(id);
  if (it == data_index_.end()) throw LookupError("unknown data item id '" + id + "'");
  return it->second;
}

// ---------------------------------------------------------------------------
// Task
// ---------------------------------------------------------------------------

Task Task::resolve(const Repository& repo, const TaskRecord& rec) {
  if (rec.provided.empty()) throw ValidationError("task: provided set must be non-empty");
  if (rec.wanted.empty()) throw ValidationError("task: wanted set must be non-empty");
  auto resolve_set = [&](const std::vector<std::string>& names, const char* field) {
    std::set<int> seen;
    for (const auto& name : names) {
      try {
        seen.insert(repo.taxonomy().index_of(name));
      } catch (const LookupError&) {
        throw ValidationError(std::string("task: ") + field + " concept '" + name +
                              "' not defined");
      }
    }
    return std::vector<int>(seen.begin(), seen.end());
  };
  Task task;
  task.provided = resolve_set(rec.provided, "provided");
  task.wanted = resolve_set(rec.wanted, "wanted");
  return task;
}

Bitset Task::provided_coverage(const Repository& repo) const {
  Bitset cover(static_cast<std::size_t>(repo.n_concepts()));
  for (int p : provided) cover |= repo.taxonomy().ancestors_or_self(p);
  return cover;
}

}  // namespace dwsc

#include "dwsc/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

#include "dwsc/decode.hpp"
#include "dwsc/errors.hpp"
#include "dwsc/rng.hpp"

namespace dwsc {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Generator
// ---------------------------------------------------------------------------

void GenSpec::validate() const {
  if (n_services < 1) throw GenerationError("gen: n_services must be >= 1");
  if (n_concepts < 1) throw GenerationError("gen: n_concepts must be >= 1");
  if (n_locations < 1) throw GenerationError("gen: n_locations must be >= 1");
  if (n_clusters < 1) throw GenerationError("gen: n_clusters must be >= 1");
  if (chain_length < 1) throw GenerationError("gen: chain_length must be >= 1");
  if (n_chains < 1) throw GenerationError("gen: n_chains must be >= 1");
  if (n_chains * chain_length > n_services)
    throw GenerationError("gen: n_chains * chain_length must be <= n_services");
  if (data_items_min < 0 || data_items_max < data_items_min)
    throw GenerationError("gen: data item range must satisfy 0 <= min <= max");
  if (distances) {
    if (distances->size() != static_cast<std::size_t>(n_locations))
      throw GenerationError("gen: distance matrix must be n_locations square");
    for (const auto& row : *distances)
      if (row.size() != static_cast<std::size_t>(n_locations))
        throw GenerationError("gen: distance matrix must be n_locations square");
  }
}

std::vector<std::vector<double>> scale_distances_to_unit(
    const std::vector<std::vector<double>>& dist) {
  double max_d = 0.0;
  for (const auto& row : dist)
    for (double d : row) max_d = std::max(max_d, d);
  if (max_d <= 0.0) max_d = 1.0;
  std::vector<std::vector<double>> out(dist.size());
  for (std::size_t r = 0; r < dist.size(); ++r) {
    out[r].resize(dist[r].size());
    for (std::size_t c = 0; c < dist[r].size(); ++c)
      out[r][c] = std::max(dist[r][c] / max_d, std::numeric_limits<double>::min());
  }
  return out;
}

namespace {

std::string num_id(const char* prefix, int i) { return prefix + std::to_string(i); }

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Uniform pick of the concept itself or any of its ancestors: the producer
// stays valid under descendant-or-equal matching.
int random_ancestor_or_self(const std::vector<int>& parent, int concept_idx, Rng& rng) {
  std::vector<int> chain;
  for (int cur = concept_idx; cur != -1; cur = parent[static_cast<std::size_t>(cur)])
    chain.push_back(cur);
  return chain[static_cast<std::size_t>(rng.below(chain.size()))];
}

}  // namespace

RepositoryData generate_records(const GenSpec& spec, TaskRecord& task_out) {
  spec.validate();

  Rng tax_rng(derive_seed(spec.seed, "gen-taxonomy"));
  Rng loc_rng(derive_seed(spec.seed, "gen-locations"));
  Rng data_rng(derive_seed(spec.seed, "gen-data"));
  Rng svc_rng(derive_seed(spec.seed, "gen-services"));
  Rng link_rng(derive_seed(spec.seed, "gen-links"));

  RepositoryData out;

  // Concept tree: node 0 is the root, every later node hangs under a random
  // earlier one.
  std::vector<int> parent(static_cast<std::size_t>(spec.n_concepts), -1);
  for (int c = 0; c < spec.n_concepts; ++c) {
    ConceptRecord rec;
    rec.id = num_id("c", c);
    if (c > 0) {
      parent[static_cast<std::size_t>(c)] = static_cast<int>(tax_rng.below(static_cast<std::uint64_t>(c)));
      rec.parent = num_id("c", parent[static_cast<std::size_t>(c)]);
    }
    out.taxonomy.push_back(std::move(rec));
  }

  // Locations in Gaussian clusters on the unit square.
  std::vector<std::pair<double, double>> centers;
  centers.reserve(static_cast<std::size_t>(spec.n_clusters));
  for (int k = 0; k < spec.n_clusters; ++k)
    centers.push_back({0.05 + 0.9 * loc_rng.real01(), 0.05 + 0.9 * loc_rng.real01()});
  for (int l = 0; l < spec.n_locations; ++l) {
    const auto& center = centers[static_cast<std::size_t>(l % spec.n_clusters)];
    LocationRecord rec;
    rec.id = num_id("L", l);
    rec.x = clamp01(center.first + 0.01 * loc_rng.gauss());
    rec.y = clamp01(center.second + 0.01 * loc_rng.gauss());
    rec.server_access_latency = loc_rng.pos_real01();
    out.locations.push_back(std::move(rec));
  }

  // Data item pool.
  const int n_data = std::max(1, spec.n_services / 2);
  std::vector<int> data_location(static_cast<std::size_t>(n_data));
  for (int d = 0; d < n_data; ++d) {
    DataItemRecord rec;
    rec.id = num_id("d", d);
    rec.provision_cost = data_rng.pos_real01();
    rec.size = data_rng.pos_real01();
    const int loc = static_cast<int>(data_rng.below(static_cast<std::uint64_t>(spec.n_locations)));
    data_location[static_cast<std::size_t>(d)] = loc;
    rec.location = num_id("L", loc);
    out.data_items.push_back(std::move(rec));
  }

  // Task inputs, then a feasible chain s0 -> s1 -> ... planted from them.
  auto pick_concepts = [&](int count, Rng& rng) {
    std::vector<int> all(static_cast<std::size_t>(spec.n_concepts));
    for (int c = 0; c < spec.n_concepts; ++c) all[static_cast<std::size_t>(c)] = c;
    rng.shuffle(all);
    all.resize(static_cast<std::size_t>(std::min(count, spec.n_concepts)));
    return all;
  };

  const std::vector<int> provided = pick_concepts(3, svc_rng);

  // Services bind data hosted close to them: from a handful of sampled pool
  // items the nearest ones win, keeping data transfer a local affair unless a
  // location has no nearby data at all.
  auto make_bindings = [&](int service_location, Rng& rng) {
    std::vector<DataBindingRecord> bindings;
    int count = static_cast<int>(rng.range(spec.data_items_min, spec.data_items_max));
    count = std::min(count, n_data);
    std::vector<int> picked;
    for (int b = 0; b < count; ++b) {
      int best = -1;
      double best_d = 0.0;
      for (int attempt = 0; attempt < 6; ++attempt) {
        const int cand = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_data)));
        if (std::find(picked.begin(), picked.end(), cand) != picked.end()) continue;
        const auto& lc = out.locations[static_cast<std::size_t>(data_location[static_cast<std::size_t>(cand)])];
        const auto& ls = out.locations[static_cast<std::size_t>(service_location)];
        const double dist = std::hypot(lc.x - ls.x, lc.y - ls.y);
        if (best < 0 || dist < best_d) {
          best = cand;
          best_d = dist;
        }
      }
      if (best < 0) break;
      picked.push_back(best);
      DataBindingRecord rec;
      rec.data = num_id("d", best);
      rec.process_time = rng.pos_real01();
      rec.service_cost = rng.pos_real01();
      rec.transfer_time = rng.pos_real01();
      rec.data_comm_cost = rng.pos_real01();
      bindings.push_back(std::move(rec));
    }
    return bindings;
  };

  Bitset provided_anc(static_cast<std::size_t>(spec.n_concepts));
  for (int p : provided)
    for (int cur = p; cur != -1; cur = parent[static_cast<std::size_t>(cur)])
      provided_anc.set(static_cast<std::size_t>(cur));

  // The planted solution: a pipeline of chain_length service signatures where
  // every step consumes concepts that only earlier steps produce. The task
  // outputs are picked first and kept exclusive to the final step, so no
  // shortcut can bypass the pipeline.
  std::vector<int> wanted;
  {
    std::vector<int> escaping;
    for (int c = 0; c < spec.n_concepts; ++c)
      if (!provided_anc.test(static_cast<std::size_t>(c))) escaping.push_back(c);
    if (escaping.empty())
      throw GenerationError(
          "gen: could not plant a non-trivial task; the task inputs cover the whole taxonomy");
    svc_rng.shuffle(escaping);
    const int n_wanted = static_cast<int>(svc_rng.range(1, 2));
    escaping.resize(static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(n_wanted), escaping.size())));
    wanted = escaping;
    std::sort(wanted.begin(), wanted.end());
  }
  Bitset wanted_cone(static_cast<std::size_t>(spec.n_concepts));  // concepts covering a task output
  for (int c = 0; c < spec.n_concepts; ++c)
    for (int cur = c; cur != -1; cur = parent[static_cast<std::size_t>(cur)])
      if (std::binary_search(wanted.begin(), wanted.end(), cur)) wanted_cone.set(static_cast<std::size_t>(c));

  // Outputs of non-final steps: escape the task input cover, stay outside the
  // task output cone, and never repeat across steps, so each mid-chain
  // concept has exactly one producing step (plus that step's clones).
  std::vector<int> midchain_pool;
  for (int c = 0; c < spec.n_concepts; ++c)
    if (!provided_anc.test(static_cast<std::size_t>(c)) && !wanted_cone.test(static_cast<std::size_t>(c)))
      midchain_pool.push_back(c);
  svc_rng.shuffle(midchain_pool);
  std::size_t midchain_cursor = 0;
  auto midchain_outputs = [&](int count) {
    std::vector<int> out;
    for (int i = 0; i < count; ++i) {
      if (midchain_cursor >= midchain_pool.size())
        throw GenerationError(
            "gen: taxonomy too small to plant the chain; increase n_concepts");
      out.push_back(midchain_pool[midchain_cursor++]);
    }
    return out;
  };
  // Mostly the concept itself, sometimes its parent: one level of
  // generalization keeps subsumption in play without opening shortcuts past
  // the pipeline.
  auto uncovered_ancestor = [&](int concept_idx, Rng& rng) {
    if (rng.chance(0.3)) {
      const int up = parent[static_cast<std::size_t>(concept_idx)];
      if (up != -1 && !provided_anc.test(static_cast<std::size_t>(up))) return up;
    }
    return concept_idx;
  };

  // Independent pipelines are planted back to back; slot k*chain_length + s
  // holds step s of pipeline k. Every pipeline ends in the task outputs, each
  // draws its own mid-chain concepts, so they form disjoint solution basins.
  const int n_chain_services = spec.n_chains * spec.chain_length;
  std::vector<std::vector<int>> chain_inputs;   // concept indices per chain service
  std::vector<std::vector<int>> chain_outputs;
  for (int cs = 0; cs < n_chain_services; ++cs) {
    const int s = cs % spec.chain_length;       // step within its pipeline
    const int base = cs - s;                    // slot of the pipeline's step 0
    std::vector<int> inputs;
    if (s == 0) {
      const int n_in = static_cast<int>(svc_rng.range(1, std::min<std::int64_t>(3, static_cast<std::int64_t>(provided.size()))));
      std::vector<int> source = provided;
      svc_rng.shuffle(source);
      for (int i = 0; i < n_in; ++i)
        inputs.push_back(random_ancestor_or_self(parent, source[static_cast<std::size_t>(i)], svc_rng));
    } else {
      // One dependency on the previous step keeps the pipeline deep; the rest
      // may branch to any earlier step of the same pipeline.
      const int n_in = static_cast<int>(svc_rng.range(1, 3));
      for (int i = 0; i < n_in; ++i) {
        const int step = base + (i == 0 ? s - 1 : static_cast<int>(svc_rng.below(static_cast<std::uint64_t>(s))));
        const auto& outs = chain_outputs[static_cast<std::size_t>(step)];
        const int source = outs[static_cast<std::size_t>(svc_rng.below(outs.size()))];
        inputs.push_back(uncovered_ancestor(source, svc_rng));
      }
    }
    std::set<int> dedup(inputs.begin(), inputs.end());
    chain_inputs.push_back(std::vector<int>(dedup.begin(), dedup.end()));

    if (s == spec.chain_length - 1)
      chain_outputs.push_back(wanted);
    else
      chain_outputs.push_back(midchain_outputs(static_cast<int>(svc_rng.range(1, 2))));
  }

  // Concepts whose production would satisfy a task output or a chain input;
  // random fillers avoid them, so real coverage always comes from the planted
  // chain or its clones and the instance keeps its pipeline structure.
  std::vector<int> safe_concepts;
  {
    std::set<int> guarded(wanted.begin(), wanted.end());
    for (const auto& ins : chain_inputs)
      for (int c : ins)
        if (!provided_anc.test(static_cast<std::size_t>(c))) guarded.insert(c);
    for (int c = 0; c < spec.n_concepts; ++c) {
      bool covers_guarded = false;
      for (int cur = c; cur != -1; cur = parent[static_cast<std::size_t>(cur)])
        if (guarded.count(cur)) covers_guarded = true;
      if (!covers_guarded) safe_concepts.push_back(c);
    }
  }

  // Chain services first, then fillers: half clones of random chain services
  // (same signature, fresh location and attributes), half random signatures.
  auto concept_names = [&](const std::vector<int>& idxs) {
    std::vector<std::string> names;
    names.reserve(idxs.size());
    for (int c : idxs) names.push_back(num_id("c", c));
    return names;
  };

  auto pick_safe_concepts = [&](int count, Rng& rng) {
    if (safe_concepts.empty()) return pick_concepts(count, rng);
    std::vector<int> pool = safe_concepts;
    rng.shuffle(pool);
    pool.resize(static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(count), pool.size())));
    return pool;
  };

  // Locations are dealt round-robin over clusters, so cluster k owns the
  // locations with index = k mod n_clusters.
  auto location_in_cluster = [&](int cluster, Rng& rng) {
    const int per = (spec.n_locations + spec.n_clusters - 1) / spec.n_clusters;
    for (int attempt = 0; attempt < 8; ++attempt) {
      const int slot = static_cast<int>(rng.below(static_cast<std::uint64_t>(per)));
      const int loc = cluster + slot * spec.n_clusters;
      if (loc < spec.n_locations) return loc;
    }
    return cluster % spec.n_locations;
  };

  for (int s = 0; s < spec.n_services; ++s) {
    ServiceRecord rec;
    rec.id = num_id("s", s);
    int loc = static_cast<int>(svc_rng.below(static_cast<std::uint64_t>(spec.n_locations)));
    if (s < n_chain_services) {
      rec.inputs = concept_names(chain_inputs[static_cast<std::size_t>(s)]);
      rec.outputs = concept_names(chain_outputs[static_cast<std::size_t>(s)]);
    } else if (svc_rng.chance(0.75)) {
      // Clone of a pipeline step, pinned inside one cluster: every step gets
      // alternatives across clusters, so low-delay compositions are the
      // cluster-coherent ones.
      const int t = static_cast<int>(svc_rng.below(static_cast<std::uint64_t>(n_chain_services)));
      const int cluster = static_cast<int>(svc_rng.below(static_cast<std::uint64_t>(spec.n_clusters)));
      rec.inputs = concept_names(chain_inputs[static_cast<std::size_t>(t)]);
      rec.outputs = concept_names(chain_outputs[static_cast<std::size_t>(t)]);
      loc = location_in_cluster(cluster, svc_rng);
    } else {
      rec.inputs = concept_names(pick_concepts(static_cast<int>(svc_rng.range(1, 3)), svc_rng));
      rec.outputs = concept_names(pick_safe_concepts(static_cast<int>(svc_rng.range(1, 3)), svc_rng));
    }
    rec.location = num_id("L", loc);
    rec.data_bindings = make_bindings(loc, svc_rng);
    out.services.push_back(std::move(rec));
  }

  // Link attributes per ordered location pair. Propagation delays follow the
  // scaled distances; communication cost is drawn fresh per pair.
  std::vector<std::vector<double>> dist(static_cast<std::size_t>(spec.n_locations),
                                        std::vector<double>(static_cast<std::size_t>(spec.n_locations), 0.0));
  if (spec.distances) {
    dist = *spec.distances;
  } else {
    for (int a = 0; a < spec.n_locations; ++a)
      for (int b = 0; b < spec.n_locations; ++b) {
        const auto& la = out.locations[static_cast<std::size_t>(a)];
        const auto& lb = out.locations[static_cast<std::size_t>(b)];
        dist[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
            std::hypot(la.x - lb.x, la.y - lb.y);
      }
  }
  const auto delay = scale_distances_to_unit(dist);
  for (int a = 0; a < spec.n_locations; ++a) {
    for (int b = 0; b < spec.n_locations; ++b) {
      LinkRecord rec;
      rec.from = num_id("L", a);
      rec.to = num_id("L", b);
      rec.prop_delay_service = delay[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      rec.prop_delay_data = delay[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      rec.edge_comm_cost = link_rng.pos_real01();
      out.link_attrs.push_back(std::move(rec));
    }
  }

  if (spec.distances) out.distance_matrix = spec.distances;
  out.weights = WeightVector{};

  task_out.provided = concept_names(provided);
  task_out.wanted = concept_names(wanted);
  return out;
}

Dataset generate(const GenSpec& spec) {
  TaskRecord task_record;
  RepositoryData records = generate_records(spec, task_record);
  Dataset ds{Repository::build(std::move(records)), task_record, {}};
  ds.task = Task::resolve(ds.repo, ds.task_record);

  // The planted chain must decode and validate; anything else is a generator
  // defect.
  Chromosome all;
  all.genes.resize(static_cast<std::size_t>(ds.repo.n_services()));
  for (int s = 0; s < ds.repo.n_services(); ++s) all.genes[static_cast<std::size_t>(s)] = s;
  DecodeOutcome probe = try_backward_decode(ds.repo, ds.task, all);
  if (!probe.result) throw GenerationError("gen: planted chain failed to decode");
  return ds;
}

// ---------------------------------------------------------------------------
// Canonical text form
// ---------------------------------------------------------------------------

namespace {

void append_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  out += '"';
}

void append_string_array(std::string& out, const std::vector<std::string>& values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    append_escaped(out, values[i]);
  }
  out += ']';
}

}  // namespace

std::string to_canonical_text(const RepositoryData& repo, const TaskRecord& task) {
  std::string out;
  out.reserve(1 << 16);
  out += "{\n";
  out += "  \"schema_version\": " + std::to_string(kDatasetSchemaVersion) + ",\n";

  const auto& w = repo.weights;
  out += "  \"weights\": {\"w_t1\": " + format_real(w.w_t1) + ", \"w_t2\": " + format_real(w.w_t2) +
         ", \"w_c1\": " + format_real(w.w_c1) + ", \"w_c2\": " + format_real(w.w_c2) + "},\n";

  out += "  \"taxonomy\": [\n";
  for (std::size_t i = 0; i < repo.taxonomy.size(); ++i) {
    const auto& c = repo.taxonomy[i];
    out += "    {\"id\": ";
    append_escaped(out, c.id);
    out += ", \"parent\": ";
    if (c.parent)
      append_escaped(out, *c.parent);
    else
      out += "null";
    out += i + 1 < repo.taxonomy.size() ? "},\n" : "}\n";
  }
  out += "  ],\n";

  out += "  \"locations\": [\n";
  for (std::size_t i = 0; i < repo.locations.size(); ++i) {
    const auto& l = repo.locations[i];
    out += "    {\"id\": ";
    append_escaped(out, l.id);
    out += ", \"x\": " + format_real(l.x) + ", \"y\": " + format_real(l.y) +
           ", \"server_access_latency\": " + format_real(l.server_access_latency);
    out += i + 1 < repo.locations.size() ? "},\n" : "}\n";
  }
  out += "  ],\n";

  out += "  \"data_items\": [\n";
  for (std::size_t i = 0; i < repo.data_items.size(); ++i) {
    const auto& d = repo.data_items[i];
    out += "    {\"id\": ";
    append_escaped(out, d.id);
    out += ", \"provision_cost\": " + format_real(d.provision_cost) +
           ", \"size\": " + format_real(d.size) + ", \"location\": ";
    append_escaped(out, d.location);
    out += i + 1 < repo.data_items.size() ? "},\n" : "}\n";
  }
  out += "  ],\n";

  out += "  \"services\": [\n";
  for (std::size_t i = 0; i < repo.services.size(); ++i) {
    const auto& s = repo.services[i];
    out += "    {\"id\": ";
    append_escaped(out, s.id);
    out += ", \"inputs\": ";
    append_string_array(out, s.inputs);
    out += ", \"outputs\": ";
    append_string_array(out, s.outputs);
    out += ", \"location\": ";
    append_escaped(out, s.location);
    out += ", \"data_bindings\": [";
    for (std::size_t b = 0; b < s.data_bindings.size(); ++b) {
      const auto& bind = s.data_bindings[b];
      if (b) out += ", ";
      out += "{\"data\": ";
      append_escaped(out, bind.data);
      out += ", \"process_time\": " + format_real(bind.process_time) +
             ", \"service_cost\": " + format_real(bind.service_cost) +
             ", \"transfer_time\": " + format_real(bind.transfer_time) +
             ", \"data_comm_cost\": " + format_real(bind.data_comm_cost) + "}";
    }
    out += "]";
    out += i + 1 < repo.services.size() ? "},\n" : "}\n";
  }
  out += "  ],\n";

  out += "  \"link_attrs\": [\n";
  for (std::size_t i = 0; i < repo.link_attrs.size(); ++i) {
    const auto& l = repo.link_attrs[i];
    out += "    {\"from\": ";
    append_escaped(out, l.from);
    out += ", \"to\": ";
    append_escaped(out, l.to);
    out += ", \"prop_delay_service\": " + format_real(l.prop_delay_service) +
           ", \"prop_delay_data\": " + format_real(l.prop_delay_data) +
           ", \"edge_comm_cost\": " + format_real(l.edge_comm_cost);
    out += i + 1 < repo.link_attrs.size() ? "},\n" : "}\n";
  }
  out += "  ],\n";

  out += "  \"distance_matrix\": ";
  if (repo.distance_matrix) {
    out += "[\n";
    const auto& m = *repo.distance_matrix;
    for (std::size_t r = 0; r < m.size(); ++r) {
      out += "    [";
      for (std::size_t c = 0; c < m[r].size(); ++c) {
        if (c) out += ", ";
        out += format_real(m[r][c]);
      }
      out += r + 1 < m.size() ? "],\n" : "]\n";
    }
    out += "  ],\n";
  } else {
    out += "null,\n";
  }

  out += "  \"task\": {\"provided\": ";
  append_string_array(out, task.provided);
  out += ", \"wanted\": ";
  append_string_array(out, task.wanted);
  out += "}\n";
  out += "}\n";
  return out;
}

std::string to_canonical_text(const Repository& repo, const TaskRecord& task) {
  return to_canonical_text(repo.records(), task);
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw LoadError(path + ": missing field '" + key + "'");
  return *it;
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw LoadError(path + ": expected a string");
  return v.get<std::string>();
}

double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) throw LoadError(path + ": expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw LoadError(path + ": expected an integer");
  return v.get<int>();
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw LoadError(path + ": expected an array");
  return v;
}

const json& as_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw LoadError(path + ": expected an object");
  return v;
}

std::vector<std::string> string_list(const json& v, const std::string& path) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < as_array(v, path).size(); ++i)
    out.push_back(as_string(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

Dataset parse_dataset_text(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw LoadError(origin + ": " + e.what());
  }
  as_object(doc, origin);

  const int version = as_int(require(doc, "schema_version", origin), origin + ".schema_version");
  if (version != kDatasetSchemaVersion)
    throw LoadError(origin + ": unsupported schema_version " + std::to_string(version));

  RepositoryData data;

  {
    const std::string path = origin + ".weights";
    const json& w = as_object(require(doc, "weights", origin), path);
    data.weights.w_t1 = as_real(require(w, "w_t1", path), path + ".w_t1");
    data.weights.w_t2 = as_real(require(w, "w_t2", path), path + ".w_t2");
    data.weights.w_c1 = as_real(require(w, "w_c1", path), path + ".w_c1");
    data.weights.w_c2 = as_real(require(w, "w_c2", path), path + ".w_c2");
  }

  {
    const std::string path = origin + ".taxonomy";
    const json& arr = as_array(require(doc, "taxonomy", origin), path);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + "[" + std::to_string(i) + "]";
      const json& c = as_object(arr[i], p);
      ConceptRecord rec;
      rec.id = as_string(require(c, "id", p), p + ".id");
      const json& parent = require(c, "parent", p);
      if (!parent.is_null()) rec.parent = as_string(parent, p + ".parent");
      data.taxonomy.push_back(std::move(rec));
    }
  }

  {
    const std::string path = origin + ".locations";
    const json& arr = as_array(require(doc, "locations", origin), path);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + "[" + std::to_string(i) + "]";
      const json& l = as_object(arr[i], p);
      LocationRecord rec;
      rec.id = as_string(require(l, "id", p), p + ".id");
      rec.x = as_real(require(l, "x", p), p + ".x");
      rec.y = as_real(require(l, "y", p), p + ".y");
      rec.server_access_latency =
          as_real(require(l, "server_access_latency", p), p + ".server_access_latency");
      data.locations.push_back(std::move(rec));
    }
  }

  {
    const std::string path = origin + ".data_items";
    const json& arr = as_array(require(doc, "data_items", origin), path);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + "[" + std::to_string(i) + "]";
      const json& d = as_object(arr[i], p);
      DataItemRecord rec;
      rec.id = as_string(require(d, "id", p), p + ".id");
      rec.provision_cost = as_real(require(d, "provision_cost", p), p + ".provision_cost");
      rec.size = as_real(require(d, "size", p), p + ".size");
      rec.location = as_string(require(d, "location", p), p + ".location");
      data.data_items.push_back(std::move(rec));
    }
  }

  {
    const std::string path = origin + ".services";
    const json& arr = as_array(require(doc, "services", origin), path);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + "[" + std::to_string(i) + "]";
      const json& s = as_object(arr[i], p);
      ServiceRecord rec;
      rec.id = as_string(require(s, "id", p), p + ".id");
      rec.inputs = string_list(require(s, "inputs", p), p + ".inputs");
      rec.outputs = string_list(require(s, "outputs", p), p + ".outputs");
      rec.location = as_string(require(s, "location", p), p + ".location");
      const json& binds = as_array(require(s, "data_bindings", p), p + ".data_bindings");
      for (std::size_t b = 0; b < binds.size(); ++b) {
        const std::string bp = p + ".data_bindings[" + std::to_string(b) + "]";
        const json& bind = as_object(binds[b], bp);
        DataBindingRecord brec;
        brec.data = as_string(require(bind, "data", bp), bp + ".data");
        brec.process_time = as_real(require(bind, "process_time", bp), bp + ".process_time");
        brec.service_cost = as_real(require(bind, "service_cost", bp), bp + ".service_cost");
        brec.transfer_time = as_real(require(bind, "transfer_time", bp), bp + ".transfer_time");
        brec.data_comm_cost = as_real(require(bind, "data_comm_cost", bp), bp + ".data_comm_cost");
        rec.data_bindings.push_back(std::move(brec));
      }
      data.services.push_back(std::move(rec));
    }
  }

  {
    const std::string path = origin + ".link_attrs";
    const json& arr = as_array(require(doc, "link_attrs", origin), path);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + "[" + std::to_string(i) + "]";
      const json& l = as_object(arr[i], p);
      LinkRecord rec;
      rec.from = as_string(require(l, "from", p), p + ".from");
      rec.to = as_string(require(l, "to", p), p + ".to");
      rec.prop_delay_service =
          as_real(require(l, "prop_delay_service", p), p + ".prop_delay_service");
      rec.prop_delay_data = as_real(require(l, "prop_delay_data", p), p + ".prop_delay_data");
      rec.edge_comm_cost = as_real(require(l, "edge_comm_cost", p), p + ".edge_comm_cost");
      data.link_attrs.push_back(std::move(rec));
    }
  }

  {
    const std::string path = origin + ".distance_matrix";
    const json& m = require(doc, "distance_matrix", origin);
    if (!m.is_null()) {
      std::vector<std::vector<double>> matrix;
      for (std::size_t r = 0; r < as_array(m, path).size(); ++r) {
        const std::string rp = path + "[" + std::to_string(r) + "]";
        std::vector<double> row;
        for (std::size_t c = 0; c < as_array(m[r], rp).size(); ++c)
          row.push_back(as_real(m[r][c], rp + "[" + std::to_string(c) + "]"));
        matrix.push_back(std::move(row));
      }
      data.distance_matrix = std::move(matrix);
    }
  }

  TaskRecord task_record;
  {
    const std::string path = origin + ".task";
    const json& t = as_object(require(doc, "task", origin), path);
    task_record.provided = string_list(require(t, "provided", path), path + ".provided");
    task_record.wanted = string_list(require(t, "wanted", path), path + ".wanted");
  }

  Dataset ds{Repository::build(std::move(data)), task_record, {}};
  ds.task = Task::resolve(ds.repo, ds.task_record);
  return ds;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_dataset_text(buf.str(), path);
  } catch (const ValidationError& e) {
    throw LoadError(path + ": " + e.what());
  }
}

void save_dataset(const Repository& repo, const TaskRecord& task, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << to_canonical_text(repo, task);
  if (!out) throw Error("write failed for '" + path + "'");
}

std::vector<std::vector<double>> distance_matrix(const Repository& repo) {
  const int n = repo.n_locations();
  std::vector<std::vector<double>> m(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = repo.location_distance(a, b);
  return m;
}

std::vector<std::vector<double>> load_distance_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path + ": cannot open file");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw LoadError(path + ": malformed number in row " + std::to_string(rows.size()));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw LoadError(path + ": empty matrix");
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r].size() != rows.size())
      throw LoadError(path + ": matrix must be square (row " + std::to_string(r) + ")");
  return rows;
}

}  // namespace dwsc

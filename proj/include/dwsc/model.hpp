#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dwsc/bitset.hpp"
#include "dwsc/errors.hpp"

namespace dwsc {

// ---------------------------------------------------------------------------
// Plain serializable records. Symbolic references (parent concept, location,
// data item) are resolved to dense indices when a Repository is built; the
// records are kept verbatim so a repository can be written back canonically.
// ---------------------------------------------------------------------------

struct ConceptRecord {
  std::string id;
  std::optional<std::string> parent;  // absent for roots
};

struct LocationRecord {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  double server_access_latency = 0.0;  // Tsal, in (0,1]
};

struct DataItemRecord {
  std::string id;
  double provision_cost = 0.0;  // in (0,1]
  double size = 0.0;            // > 0
  std::string location;
};

struct DataBindingRecord {
  std::string data;
  double process_time = 0.0;    // Tproc, in (0,1]
  double service_cost = 0.0;    // Cs, in (0,1]
  double transfer_time = 0.0;   // Tt, in (0,1]
  double data_comm_cost = 0.0;  // Ccd, in (0,1]
};

struct ServiceRecord {
  std::string id;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string location;
  std::vector<DataBindingRecord> data_bindings;
};

struct LinkRecord {
  std::string from;
  std::string to;
  double prop_delay_service = 0.0;  // Tps, in (0,1]
  double prop_delay_data = 0.0;     // Tpd, in (0,1]
  double edge_comm_cost = 0.0;      // Ccs, in (0,1]
};

struct WeightVector {
  double w_t1 = 0.2;
  double w_t2 = 0.3;
  double w_c1 = 0.2;
  double w_c2 = 0.3;

  double sum() const { return w_t1 + w_t2 + w_c1 + w_c2; }
};

struct RepositoryData {
  std::vector<ConceptRecord> taxonomy;
  std::vector<LocationRecord> locations;
  std::vector<DataItemRecord> data_items;
  std::vector<ServiceRecord> services;
  std::vector<LinkRecord> link_attrs;  // one entry per ordered location pair
  // Optional externally supplied pairwise location distances. When present it
  // replaces the Euclidean distance over coordinates everywhere.
  std::optional<std::vector<std::vector<double>>> distance_matrix;
  WeightVector weights;
};

struct TaskRecord {
  std::vector<std::string> provided;  // task inputs
  std::vector<std::string> wanted;    // task outputs
};

// ---------------------------------------------------------------------------
// Taxonomy: a concept forest with descendant-or-equal subsumption.
// ---------------------------------------------------------------------------

class Taxonomy {
 public:
  static Taxonomy build(const std::vector<ConceptRecord>& concepts);

  int size() const { return static_cast<int>(ids_.size()); }
  int index_of(const std::string& id) const;  // throws LookupError
  const std::string& id_of(int idx) const { return ids_[static_cast<std::size_t>(idx)]; }
  int parent(int idx) const { return parent_[static_cast<std::size_t>(idx)]; }

  // True iff `provided` equals `required` or descends from it: a more
  // specific output satisfies a more general input.
  bool subsumes(int provided, int required) const {
    return anc_[static_cast<std::size_t>(provided)].test(static_cast<std::size_t>(required));
  }
  bool subsumes(const std::string& provided, const std::string& required) const {
    return subsumes(index_of(provided), index_of(required));
  }

  // The concept plus all its ancestors: exactly the requirements this concept
  // can satisfy when produced.
  const Bitset& ancestors_or_self(int idx) const { return anc_[static_cast<std::size_t>(idx)]; }

  // True iff every needed concept is subsumed by at least one available one.
  bool satisfies(const std::vector<int>& available, const std::vector<int>& needed) const;
  bool satisfies(const std::vector<std::string>& available,
                 const std::vector<std::string>& needed) const;

 private:
  std::vector<std::string> ids_;
  std::vector<int> parent_;  // -1 for roots
  std::unordered_map<std::string, int> index_;
  std::vector<Bitset> anc_;
};

// ---------------------------------------------------------------------------
// Repository: immutable after build; safe to share across threads.
// ---------------------------------------------------------------------------

struct LinkAttr {
  double prop_delay_service = 0.0;
  double prop_delay_data = 0.0;
  double edge_comm_cost = 0.0;
};

struct CompiledLocation {
  double x = 0.0;
  double y = 0.0;
  double server_access_latency = 0.0;
};

struct CompiledDataItem {
  double provision_cost = 0.0;
  double size = 0.0;
  int location = -1;
};

struct CompiledBinding {
  int data = -1;
  double process_time = 0.0;
  double service_cost = 0.0;
  double transfer_time = 0.0;
  double data_comm_cost = 0.0;
};

struct CompiledService {
  int location = -1;
  std::vector<int> inputs;   // concept indices, ascending
  std::vector<int> outputs;  // concept indices, ascending
  std::vector<CompiledBinding> bindings;
};

class Repository {
 public:
  // Validates every model invariant; error messages name the offending
  // record and field.
  static Repository build(RepositoryData data);

  const Taxonomy& taxonomy() const { return taxonomy_; }
  const WeightVector& weights() const { return records_.weights; }
  const RepositoryData& records() const { return records_; }

  int n_services() const { return static_cast<int>(services_.size()); }
  int n_locations() const { return static_cast<int>(locations_.size()); }
  int n_data_items() const { return static_cast<int>(data_items_.size()); }
  int n_concepts() const { return taxonomy_.size(); }

  const CompiledService& service(int i) const { return services_[static_cast<std::size_t>(i)]; }
  const CompiledLocation& location(int i) const { return locations_[static_cast<std::size_t>(i)]; }
  const CompiledDataItem& data_item(int i) const { return data_items_[static_cast<std::size_t>(i)]; }

  const std::string& service_id(int i) const { return records_.services[static_cast<std::size_t>(i)].id; }
  const std::string& location_id(int i) const { return records_.locations[static_cast<std::size_t>(i)].id; }
  const std::string& data_item_id(int i) const { return records_.data_items[static_cast<std::size_t>(i)].id; }

  int service_index(const std::string& id) const;    // throws LookupError
  int location_index(const std::string& id) const;   // throws LookupError
  int data_item_index(const std::string& id) const;  // throws LookupError

  const LinkAttr& link(int from_loc, int to_loc) const {
    return links_[static_cast<std::size_t>(from_loc) * static_cast<std::size_t>(n_locations()) +
                  static_cast<std::size_t>(to_loc)];
  }

  bool has_explicit_distances() const { return records_.distance_matrix.has_value(); }

  // Pairwise location distance: the externally supplied matrix when present,
  // Euclidean over coordinates otherwise.
  double location_distance(int a, int b) const {
    return loc_dist_[static_cast<std::size_t>(a) * static_cast<std::size_t>(n_locations()) +
                     static_cast<std::size_t>(b)];
  }

  // Distance between the hosting locations of two services.
  double service_distance(int s1, int s2) const {
    return location_distance(service(s1).location, service(s2).location);
  }
  double service_distance(const std::string& s1, const std::string& s2) const {
    return service_distance(service_index(s1), service_index(s2));
  }

  // Requirement concepts the service's outputs can satisfy.
  const Bitset& service_coverage(int i) const { return coverage_[static_cast<std::size_t>(i)]; }
  // Raw input concepts of the service.
  const Bitset& service_input_mask(int i) const { return input_mask_[static_cast<std::size_t>(i)]; }

 private:
  Taxonomy taxonomy_;
  RepositoryData records_;
  std::vector<CompiledLocation> locations_;
  std::vector<CompiledDataItem> data_items_;
  std::vector<CompiledService> services_;
  std::vector<LinkAttr> links_;     // n_loc * n_loc, row-major by (from, to)
  std::vector<double> loc_dist_;    // n_loc * n_loc
  std::vector<Bitset> coverage_;    // per service
  std::vector<Bitset> input_mask_;  // per service
  std::unordered_map<std::string, int> service_index_;
  std::unordered_map<std::string, int> location_index_;
  std::unordered_map<std::string, int> data_index_;
};

// Composition task resolved against a repository.
struct Task {
  std::vector<int> provided;  // concept indices, ascending, unique
  std::vector<int> wanted;

  static Task resolve(const Repository& repo, const TaskRecord& rec);

  // Requirement concepts satisfiable directly from the task inputs.
  Bitset provided_coverage(const Repository& repo) const;
};

// Free-function forms of the matching relations.
bool subsumes(const Taxonomy& taxonomy, const std::string& provided, const std::string& required);
bool satisfies(const Taxonomy& taxonomy, const std::vector<std::string>& available,
               const std::vector<std::string>& needed);

}  // namespace dwsc

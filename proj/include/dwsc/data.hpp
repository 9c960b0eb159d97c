#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dwsc/model.hpp"

namespace dwsc {

inline constexpr int kDatasetSchemaVersion = 1;

// Knobs for the synthetic repository generator. A feasible chain of
// `chain_length` services from the task inputs to the task outputs is always
// planted, so every generated dataset is solvable. With n_chains > 1 several
// independent pipelines solve the same task, giving multimodal instances.
struct GenSpec {
  int n_services = 100;
  int n_concepts = 60;
  int n_locations = 20;
  int n_clusters = 5;
  int data_items_min = 1;
  int data_items_max = 3;
  int chain_length = 8;
  int n_chains = 1;
  std::uint64_t seed = 1;
  // Optional externally supplied pairwise location distances (n_locations
  // square, symmetric); replaces the Euclidean distances over coordinates.
  std::optional<std::vector<std::vector<double>>> distances;

  void validate() const;  // throws GenerationError
};

struct Dataset {
  Repository repo;
  TaskRecord task_record;
  Task task;
};

// Deterministic: the same spec always produces byte-identical text.
RepositoryData generate_records(const GenSpec& spec, TaskRecord& task_out);
Dataset generate(const GenSpec& spec);

// Canonical serialization: fixed field order, two-space indent, reals with up
// to 17 significant digits. save-load-save is byte stable.
std::string to_canonical_text(const RepositoryData& repo, const TaskRecord& task);
std::string to_canonical_text(const Repository& repo, const TaskRecord& task);

Dataset parse_dataset_text(const std::string& text, const std::string& origin);
Dataset load_dataset(const std::string& path);
void save_dataset(const Repository& repo, const TaskRecord& task, const std::string& path);

// Effective pairwise location distances (explicit matrix when present,
// Euclidean over coordinates otherwise).
std::vector<std::vector<double>> distance_matrix(const Repository& repo);

// Distance-derived link delay: distances scaled so the farthest pair maps to
// 1.0, clamped to stay positive for co-located pairs.
std::vector<std::vector<double>> scale_distances_to_unit(
    const std::vector<std::vector<double>>& dist);

// Square symmetric matrix file: one row of whitespace-separated reals per
// line, '#' comments allowed.
std::vector<std::vector<double>> load_distance_matrix(const std::string& path);

// %.17g, the canonical number form used across dataset and report files.
std::string format_real(double v);

}  // namespace dwsc

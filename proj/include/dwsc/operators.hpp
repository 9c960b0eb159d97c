#pragma once

#include <utility>
#include <vector>

#include "dwsc/decode.hpp"
#include "dwsc/model.hpp"
#include "dwsc/qos.hpp"
#include "dwsc/rng.hpp"

namespace dwsc {

// Cut position inside a chromosome; the cut lies before the gene at `index`,
// so a valid cut always leaves a non-empty prefix and suffix.
struct SplitPoint {
  int index = 0;

  bool operator==(const SplitPoint&) const = default;
};

// The k split points whose adjacent consecutive services are farthest apart,
// sorted ascending by index. Ties break toward the lower index.
std::vector<SplitPoint> max_gap_split(const Repository& repo, const Chromosome& chrom, int k);

// Baseline crossover: each parent is cut at an independently drawn random
// point and the whole other parent is embedded between prefix and suffix.
// Duplicates keep their first occurrence. Parents shorter than two genes are
// copied unchanged.
std::pair<Chromosome, Chromosome> index_crossover(const Chromosome& p1, const Chromosome& p2,
                                                  Rng& rng);

// Deterministic variant used by the distance-guided operators and by tests.
std::pair<Chromosome, Chromosome> index_crossover_at(const Chromosome& p1, const Chromosome& p2,
                                                     int cut1, int cut2);

// Index crossover with each parent cut at its widest service gap.
std::pair<Chromosome, Chromosome> dg_index_crossover(const Repository& repo, const Chromosome& p1,
                                                     const Chromosome& p2);

// Each parent splits at its two widest gaps into three parts; children
// interleave the parts, starting with either parent. Parents shorter than
// three genes fall back to the single-point variant.
std::pair<Chromosome, Chromosome> dg_two_point_crossover(const Repository& repo,
                                                         const Chromosome& p1,
                                                         const Chromosome& p2);

// A longest common subsequence of the two gene lists. Among equal-length
// solutions the one with lexicographically smallest match positions in p1.
std::vector<int> lcs(const Chromosome& p1, const Chromosome& p2);

// LCS together with the matched positions in both parents.
struct LcsMatch {
  std::vector<int> genes;
  std::vector<int> pos1;
  std::vector<int> pos2;
};
LcsMatch lcs_match(const Chromosome& p1, const Chromosome& p2);

// Like dg_index_crossover, but cut points falling strictly inside a parent's
// matched LCS span are excluded, so both children keep the LCS as a
// subsequence. When a parent has no legal cut the parents are copied
// unchanged.
std::pair<Chromosome, Chromosome> dg_lcs_crossover(const Repository& repo, const Chromosome& p1,
                                                   const Chromosome& p2);

// Keeps a random-length prefix and appends the rest of the repository in
// random order; the result always contains every repository service.
Chromosome mutate(const Repository& repo, const Chromosome& chrom, Rng& rng);

// Neighbors for the distance-guided local search: every repository service
// that can feed the gene after the widest gap, inserted there as one
// independently shuffled block per neighbor. Empty when the chromosome is too
// short or no such services exist outside the chromosome.
std::vector<Chromosome> local_search_neighborhood(const Repository& repo, const Chromosome& chrom,
                                                  int neighborhood_size, Rng& rng);

// Evaluates the neighborhood plus the original and returns the best; the
// original wins ties.
Chromosome local_search(const Repository& repo, const Task& task, const NormBounds& bounds,
                        const Chromosome& chrom, int neighborhood_size, Rng& rng);

}  // namespace dwsc

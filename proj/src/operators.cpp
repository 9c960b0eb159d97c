#include "dwsc/operators.hpp"

#include <algorithm>
#include <array>

#include "dwsc/errors.hpp"

namespace dwsc {

namespace {

int len_of(const Chromosome& c) { return static_cast<int>(c.genes.size()); }

// prefix(host)[0,cut) + inner + suffix(host)[cut,len), first occurrence kept.
Chromosome embed(const Chromosome& host, int cut, const Chromosome& inner) {
  int max_gene = -1;
  for (int g : host.genes) max_gene = std::max(max_gene, g);
  for (int g : inner.genes) max_gene = std::max(max_gene, g);
  std::vector<char> seen(static_cast<std::size_t>(max_gene + 1), 0);

  Chromosome child;
  child.genes.reserve(host.genes.size() + inner.genes.size());
  auto push = [&](int g) {
    if (seen[static_cast<std::size_t>(g)]) return;
    seen[static_cast<std::size_t>(g)] = 1;
    child.genes.push_back(g);
  };
  for (int i = 0; i < cut; ++i) push(host.genes[static_cast<std::size_t>(i)]);
  for (int g : inner.genes) push(g);
  for (int i = cut; i < len_of(host); ++i) push(host.genes[static_cast<std::size_t>(i)]);
  return child;
}

// Widest-gap cut among the indices `allowed` returns true for; ties break
// toward the lower index. -1 when no index is allowed.
template <class Allowed>
int max_gap_index(const Repository& repo, const Chromosome& chrom, Allowed&& allowed) {
  int best = -1;
  double best_dist = -1.0;
  for (int i = 1; i < len_of(chrom); ++i) {
    if (!allowed(i)) continue;
    const double d = repo.service_distance(chrom.genes[static_cast<std::size_t>(i - 1)],
                                           chrom.genes[static_cast<std::size_t>(i)]);
    if (d > best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::vector<SplitPoint> max_gap_split(const Repository& repo, const Chromosome& chrom, int k) {
  const int len = len_of(chrom);
  if (len < 2) throw ValidationError("max_gap_split: chromosome must have at least two genes");
  if (k < 1 || k > len - 1)
    throw ValidationError("max_gap_split: k must be in [1, len-1]");

  std::vector<int> order(static_cast<std::size_t>(len - 1));
  for (int i = 1; i < len; ++i) order[static_cast<std::size_t>(i - 1)] = i;
  std::vector<double> dist(static_cast<std::size_t>(len), 0.0);
  for (int i = 1; i < len; ++i)
    dist[static_cast<std::size_t>(i)] = repo.service_distance(
        chrom.genes[static_cast<std::size_t>(i - 1)], chrom.genes[static_cast<std::size_t>(i)]);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (dist[static_cast<std::size_t>(a)] != dist[static_cast<std::size_t>(b)])
      return dist[static_cast<std::size_t>(a)] > dist[static_cast<std::size_t>(b)];
    return a < b;
  });

  std::vector<SplitPoint> points;
  points.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) points.push_back({order[static_cast<std::size_t>(i)]});
  std::sort(points.begin(), points.end(),
            [](const SplitPoint& a, const SplitPoint& b) { return a.index < b.index; });
  return points;
}

std::pair<Chromosome, Chromosome> index_crossover_at(const Chromosome& p1, const Chromosome& p2,
                                                     int cut1, int cut2) {
  return {embed(p1, cut1, p2), embed(p2, cut2, p1)};
}

std::pair<Chromosome, Chromosome> index_crossover(const Chromosome& p1, const Chromosome& p2,
                                                  Rng& rng) {
  if (len_of(p1) < 2 || len_of(p2) < 2) return {p1, p2};
  const int cut1 = static_cast<int>(rng.range(1, len_of(p1) - 1));
  const int cut2 = static_cast<int>(rng.range(1, len_of(p2) - 1));
  return index_crossover_at(p1, p2, cut1, cut2);
}

std::pair<Chromosome, Chromosome> dg_index_crossover(const Repository& repo, const Chromosome& p1,
                                                     const Chromosome& p2) {
  if (len_of(p1) < 2 || len_of(p2) < 2) return {p1, p2};
  const int cut1 = max_gap_split(repo, p1, 1)[0].index;
  const int cut2 = max_gap_split(repo, p2, 1)[0].index;
  return index_crossover_at(p1, p2, cut1, cut2);
}

std::pair<Chromosome, Chromosome> dg_two_point_crossover(const Repository& repo,
                                                         const Chromosome& p1,
                                                         const Chromosome& p2) {
  if (len_of(p1) < 3 || len_of(p2) < 3) return dg_index_crossover(repo, p1, p2);

  const auto cuts1 = max_gap_split(repo, p1, 2);
  const auto cuts2 = max_gap_split(repo, p2, 2);
  auto parts = [](const Chromosome& p, const std::vector<SplitPoint>& cuts) {
    std::array<std::vector<int>, 3> out;
    const auto& g = p.genes;
    out[0].assign(g.begin(), g.begin() + cuts[0].index);
    out[1].assign(g.begin() + cuts[0].index, g.begin() + cuts[1].index);
    out[2].assign(g.begin() + cuts[1].index, g.end());
    return out;
  };
  const auto a = parts(p1, cuts1);
  const auto b = parts(p2, cuts2);

  auto weave = [](const std::array<std::vector<int>, 3>& first,
                  const std::array<std::vector<int>, 3>& second) {
    Chromosome host;
    for (int i = 0; i < 3; ++i) {
      host.genes.insert(host.genes.end(), first[static_cast<std::size_t>(i)].begin(),
                        first[static_cast<std::size_t>(i)].end());
      host.genes.insert(host.genes.end(), second[static_cast<std::size_t>(i)].begin(),
                        second[static_cast<std::size_t>(i)].end());
    }
    return embed(host, 0, Chromosome{});
  };
  return {weave(a, b), weave(b, a)};
}

LcsMatch lcs_match(const Chromosome& p1, const Chromosome& p2) {
  const int n = len_of(p1);
  const int m = len_of(p2);
  // dp[i][j] = LCS length of p1[i:], p2[j:].
  std::vector<std::vector<int>> dp(static_cast<std::size_t>(n + 1),
                                   std::vector<int>(static_cast<std::size_t>(m + 1), 0));
  for (int i = n - 1; i >= 0; --i) {
    for (int j = m - 1; j >= 0; --j) {
      if (p1.genes[static_cast<std::size_t>(i)] == p2.genes[static_cast<std::size_t>(j)])
        dp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            1 + dp[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j + 1)];
      else
        dp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            std::max(dp[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j)],
                     dp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j + 1)]);
    }
  }

  // Traceback preferring the earliest usable position in p1: skip p1[i] only
  // when no remaining match of it preserves the optimum.
  LcsMatch match;
  int i = 0, j = 0;
  while (i < n && j < m && dp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > 0) {
    if (p1.genes[static_cast<std::size_t>(i)] == p2.genes[static_cast<std::size_t>(j)] &&
        dp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
            1 + dp[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j + 1)]) {
      match.genes.push_back(p1.genes[static_cast<std::size_t>(i)]);
      match.pos1.push_back(i);
      match.pos2.push_back(j);
      ++i;
      ++j;
    } else if (dp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
               dp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j + 1)]) {
      ++j;
    } else {
      ++i;
    }
  }
  return match;
}

std::vector<int> lcs(const Chromosome& p1, const Chromosome& p2) {
  return lcs_match(p1, p2).genes;
}

std::pair<Chromosome, Chromosome> dg_lcs_crossover(const Repository& repo, const Chromosome& p1,
                                                   const Chromosome& p2) {
  if (len_of(p1) < 2 || len_of(p2) < 2) return {p1, p2};

  const LcsMatch match = lcs_match(p1, p2);
  if (match.genes.empty()) return dg_index_crossover(repo, p1, p2);

  // A cut strictly inside the matched span would break the LCS occurrence
  // apart between prefix and embedded block.
  auto legal_cut = [&](const Chromosome& p, const std::vector<int>& pos) {
    const int first = pos.front();
    const int last = pos.back();
    return max_gap_index(repo, p, [&](int i) { return i <= first || i > last; });
  };
  const int cut1 = legal_cut(p1, match.pos1);
  const int cut2 = legal_cut(p2, match.pos2);
  if (cut1 < 0 || cut2 < 0) return {p1, p2};
  return index_crossover_at(p1, p2, cut1, cut2);
}

Chromosome mutate(const Repository& repo, const Chromosome& chrom, Rng& rng) {
  const int len = len_of(chrom);
  const int keep = static_cast<int>(rng.range(0, len));

  std::vector<char> in_prefix(static_cast<std::size_t>(repo.n_services()), 0);
  Chromosome out;
  out.genes.reserve(static_cast<std::size_t>(repo.n_services()));
  for (int i = 0; i < keep; ++i) {
    out.genes.push_back(chrom.genes[static_cast<std::size_t>(i)]);
    in_prefix[static_cast<std::size_t>(chrom.genes[static_cast<std::size_t>(i)])] = 1;
  }
  std::vector<int> rest;
  rest.reserve(static_cast<std::size_t>(repo.n_services() - keep));
  for (int s = 0; s < repo.n_services(); ++s)
    if (!in_prefix[static_cast<std::size_t>(s)]) rest.push_back(s);
  rng.shuffle(rest);
  out.genes.insert(out.genes.end(), rest.begin(), rest.end());
  return out;
}

std::vector<Chromosome> local_search_neighborhood(const Repository& repo, const Chromosome& chrom,
                                                  int neighborhood_size, Rng& rng) {
  if (len_of(chrom) < 2 || neighborhood_size < 1) return {};

  const int split = max_gap_split(repo, chrom, 1)[0].index;
  const int target = chrom.genes[static_cast<std::size_t>(split)];

  std::vector<char> in_chrom(static_cast<std::size_t>(repo.n_services()), 0);
  for (int g : chrom.genes) in_chrom[static_cast<std::size_t>(g)] = 1;

  // Every repository service whose outputs can feed the gene after the gap.
  std::vector<int> feeders;
  for (int s = 0; s < repo.n_services(); ++s) {
    if (in_chrom[static_cast<std::size_t>(s)]) continue;
    if (repo.service_coverage(s).intersects(repo.service_input_mask(target))) feeders.push_back(s);
  }
  if (feeders.empty()) return {};

  std::vector<Chromosome> neighbors;
  neighbors.reserve(static_cast<std::size_t>(neighborhood_size));
  for (int t = 0; t < neighborhood_size; ++t) {
    std::vector<int> block = feeders;
    rng.shuffle(block);
    Chromosome neighbor;
    neighbor.genes.reserve(chrom.genes.size() + block.size());
    neighbor.genes.insert(neighbor.genes.end(), chrom.genes.begin(),
                          chrom.genes.begin() + split);
    neighbor.genes.insert(neighbor.genes.end(), block.begin(), block.end());
    neighbor.genes.insert(neighbor.genes.end(), chrom.genes.begin() + split, chrom.genes.end());
    neighbors.push_back(std::move(neighbor));
  }
  return neighbors;
}

Chromosome local_search(const Repository& repo, const Task& task, const NormBounds& bounds,
                        const Chromosome& chrom, int neighborhood_size, Rng& rng) {
  const std::vector<Chromosome> neighbors =
      local_search_neighborhood(repo, chrom, neighborhood_size, rng);
  if (neighbors.empty()) return chrom;

  const DecodeOutcome base = try_backward_decode(repo, task, chrom);
  if (!base.result) return chrom;
  double best_fitness = fitness(repo, task, base.result->dag, bounds).fitness;

  const Chromosome* best = &chrom;
  for (const Chromosome& cand : neighbors) {
    const DecodeOutcome outcome = try_backward_decode(repo, task, cand);
    if (!outcome.result) continue;
    const double f = fitness(repo, task, outcome.result->dag, bounds).fitness;
    if (f < best_fitness) {
      best_fitness = f;
      best = &cand;
    }
  }
  return *best;
}

}  // namespace dwsc

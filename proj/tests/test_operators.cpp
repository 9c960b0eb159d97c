#include <algorithm>
#include <set>

#include "doctest.h"
#include "dwsc/operators.hpp"
#include "dwsc/qos.hpp"
#include "helpers.hpp"

using namespace dwsc;

namespace {

// n services spread over n locations on a line, so the gap between
// consecutive genes is the absolute coordinate difference.
RepositoryData line_repo_data(const std::vector<double>& coords) {
  RepositoryData d;
  d.taxonomy = {{"c0", std::nullopt}, {"c1", "c0"}, {"c2", "c0"}};
  for (std::size_t i = 0; i < coords.size(); ++i)
    d.locations.push_back({"L" + std::to_string(i), coords[i], 0.0, 0.5});
  for (std::size_t a = 0; a < coords.size(); ++a)
    for (std::size_t b = 0; b < coords.size(); ++b)
      d.link_attrs.push_back({"L" + std::to_string(a), "L" + std::to_string(b), 0.5, 0.5, 0.5});
  for (std::size_t i = 0; i < coords.size(); ++i)
    d.services.push_back(
        {"s" + std::to_string(i), {"c1"}, {"c2"}, "L" + std::to_string(i), {}});
  return d;
}

Repository line_repo(const std::vector<double>& coords) {
  return Repository::build(line_repo_data(coords));
}

std::set<int> gene_set(const Chromosome& c) { return {c.genes.begin(), c.genes.end()}; }

// Brute-force argmax scan over consecutive gaps; ties to the lower index.
std::vector<int> max_gap_oracle(const Repository& repo, const Chromosome& c, int k) {
  std::vector<std::pair<double, int>> gaps;
  for (std::size_t i = 1; i < c.genes.size(); ++i)
    gaps.push_back({repo.service_distance(c.genes[i - 1], c.genes[i]), static_cast<int>(i)});
  std::sort(gaps.begin(), gaps.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<int> idx;
  for (int i = 0; i < k; ++i) idx.push_back(gaps[static_cast<std::size_t>(i)].second);
  std::sort(idx.begin(), idx.end());
  return idx;
}

bool duplicate_free(const Chromosome& c) {
  return gene_set(c).size() == c.genes.size();
}

}  // namespace

TEST_CASE("max_gap_split: unique max, tie-break, and the brute-force oracle") {
  SUBCASE("distances 0.2 then 0.9 put the cut at index 2") {
    const Repository repo = line_repo({0.0, 0.2, 1.1});
    const auto points = max_gap_split(repo, Chromosome{{0, 1, 2}}, 1);
    REQUIRE(points.size() == 1);
    CHECK(points[0].index == 2);
  }
  SUBCASE("all distances equal: lowest index wins") {
    const Repository repo = line_repo({0.0, 0.0, 0.0, 0.0});
    const auto points = max_gap_split(repo, Chromosome{{0, 1, 2, 3}}, 1);
    REQUIRE(points.size() == 1);
    CHECK(points[0].index == 1);
  }
  SUBCASE("k = 2 against the oracle on random ten-gene chromosomes") {
    Rng rng(50);
    std::vector<double> coords;
    for (int i = 0; i < 10; ++i) coords.push_back(rng.real01());
    const Repository repo = line_repo(coords);
    for (int trial = 0; trial < 100; ++trial) {
      Chromosome c{{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}};
      rng.shuffle(c.genes);
      const auto got = max_gap_split(repo, c, 2);
      const auto want = max_gap_oracle(repo, c, 2);
      REQUIRE(got.size() == 2);
      CHECK(got[0].index == want[0]);
      CHECK(got[1].index == want[1]);
    }
  }
  SUBCASE("too-short chromosomes are rejected") {
    const Repository repo = line_repo({0.0, 1.0});
    CHECK_THROWS_AS(max_gap_split(repo, Chromosome{{0}}, 1), ValidationError);
  }
}

TEST_CASE("index crossover embeds the whole other parent at the cut") {
  const Chromosome p1{{10, 11, 12}};
  const Chromosome p2{{20, 21}};
  const auto [c1, c2] = index_crossover_at(p1, p2, 1, 1);
  CHECK(c1.genes == std::vector<int>{10, 20, 21, 11, 12});
  CHECK(c2.genes == std::vector<int>{20, 10, 11, 12, 21});
}

TEST_CASE("index crossover on identical parents yields permutations of the shared set") {
  Rng rng(51);
  const Chromosome p{{3, 1, 4, 5, 9}};
  for (int i = 0; i < 50; ++i) {
    const auto [c1, c2] = index_crossover(p, p, rng);
    CHECK(gene_set(c1) == gene_set(p));
    CHECK(gene_set(c2) == gene_set(p));
    CHECK(duplicate_free(c1));
    CHECK(duplicate_free(c2));
  }
}

TEST_CASE("index crossover: children reconstruct prefix + other + suffix for every cut pair") {
  // Exhaustive over all cut combinations on overlapping parents of length <= 5.
  const Chromosome p1{{0, 1, 2, 3, 4}};
  const Chromosome p2{{3, 4, 5, 6}};
  for (int cut1 = 1; cut1 < 5; ++cut1) {
    for (int cut2 = 1; cut2 < 4; ++cut2) {
      const auto [c1, c2] = index_crossover_at(p1, p2, cut1, cut2);
      // Manual reconstruction with first-occurrence dedup.
      auto rebuild = [](const std::vector<int>& host, int cut, const std::vector<int>& inner) {
        std::vector<int> raw(host.begin(), host.begin() + cut);
        raw.insert(raw.end(), inner.begin(), inner.end());
        raw.insert(raw.end(), host.begin() + cut, host.end());
        std::vector<int> out;
        for (int g : raw)
          if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
        return out;
      };
      CHECK(c1.genes == rebuild(p1.genes, cut1, p2.genes));
      CHECK(c2.genes == rebuild(p2.genes, cut2, p1.genes));
      CHECK(gene_set(c1) == std::set<int>{0, 1, 2, 3, 4, 5, 6});
    }
  }
}

TEST_CASE("degenerate parents are copied unchanged") {
  Rng rng(52);
  const Chromosome tiny{{7}};
  const Chromosome normal{{1, 2, 3}};
  const auto [a, b] = index_crossover(tiny, normal, rng);
  CHECK(a == tiny);
  CHECK(b == normal);

  const Repository repo = line_repo({0.0, 0.5, 1.0});
  const auto [c, d] = dg_index_crossover(repo, Chromosome{{0}}, Chromosome{{1, 2}});
  CHECK(c.genes == std::vector<int>{0});
  CHECK(d.genes == std::vector<int>{1, 2});
}

TEST_CASE("distance-guided index crossover cuts at the widest gaps") {
  // Coordinates chosen so p1's widest gap is after index 1 and p2's after
  // index 2; the result must equal the index crossover at those cuts.
  const Repository repo = line_repo({0.0, 0.1, 0.9, 1.0, 0.45});
  const Chromosome p1{{0, 1, 2, 3}};  // gaps: .1, .8, .1 -> cut 2
  const Chromosome p2{{2, 4, 0}};     // gaps: .45, .45 -> tie, cut 1
  const auto got = dg_index_crossover(repo, p1, p2);
  const auto want = index_crossover_at(p1, p2, 2, 1);
  CHECK(got.first == want.first);
  CHECK(got.second == want.second);
}

TEST_CASE("distance-guided index crossover cut indices match the oracle on random parents") {
  dwsc::Dataset ds = testutil::small_dataset(61);
  Rng rng(53);
  for (int i = 0; i < 60; ++i) {
    const Chromosome p1 = testutil::random_feasible_chromosome(ds, rng);
    const Chromosome p2 = testutil::random_feasible_chromosome(ds, rng);
    if (p1.genes.size() < 2 || p2.genes.size() < 2) continue;
    const auto got = dg_index_crossover(ds.repo, p1, p2);
    const auto want = index_crossover_at(p1, p2, max_gap_oracle(ds.repo, p1, 1)[0],
                                         max_gap_oracle(ds.repo, p2, 1)[0]);
    CHECK(got.first == want.first);
    CHECK(got.second == want.second);
  }
}

TEST_CASE("two-point crossover: forced interleave of unit parts") {
  const Repository repo = line_repo({0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  const Chromosome p1{{0, 1, 2}};
  const Chromosome p2{{3, 4, 5}};
  // All gaps tie, so both parents split at indices 1 and 2 into unit parts.
  const auto [c1, c2] = dg_two_point_crossover(repo, p1, p2);
  CHECK(c1.genes == std::vector<int>{0, 3, 1, 4, 2, 5});
  CHECK(c2.genes == std::vector<int>{3, 0, 4, 1, 5, 2});
}

TEST_CASE("two-point crossover: children carry the union of both parents") {
  SUBCASE("identical parents keep their own gene set") {
    const Repository repo = line_repo({0.0, 0.2, 0.5, 0.9});
    const Chromosome p{{0, 1, 2, 3}};
    const auto [c1, c2] = dg_two_point_crossover(repo, p, p);
    CHECK(gene_set(c1) == gene_set(p));
    CHECK(gene_set(c2) == gene_set(p));
  }
  SUBCASE("exhaustive union check for lengths <= 6") {
    dwsc::Dataset ds = testutil::small_dataset(62);
    Rng rng(54);
    for (int i = 0; i < 100; ++i) {
      Chromosome p1, p2;
      const int n1 = 3 + static_cast<int>(rng.below(4));
      const int n2 = 3 + static_cast<int>(rng.below(4));
      std::vector<int> pool(static_cast<std::size_t>(ds.repo.n_services()));
      for (int s = 0; s < ds.repo.n_services(); ++s) pool[static_cast<std::size_t>(s)] = s;
      rng.shuffle(pool);
      p1.genes.assign(pool.begin(), pool.begin() + n1);
      rng.shuffle(pool);
      p2.genes.assign(pool.begin(), pool.begin() + n2);

      const auto [c1, c2] = dg_two_point_crossover(ds.repo, p1, p2);
      std::set<int> expect = gene_set(p1);
      for (int g : p2.genes) expect.insert(g);
      CHECK(gene_set(c1) == expect);
      CHECK(gene_set(c2) == expect);
      CHECK(duplicate_free(c1));
      CHECK(duplicate_free(c2));
    }
  }
  SUBCASE("length below three falls back to the single-point variant") {
    const Repository repo = line_repo({0.0, 0.3, 0.7, 1.0});
    const Chromosome p1{{0, 1}};
    const Chromosome p2{{2, 3, 1}};
    CHECK(dg_two_point_crossover(repo, p1, p2) == dg_index_crossover(repo, p1, p2));
  }
}

TEST_CASE("lcs: forced unique subsequence and disjoint parents") {
  CHECK(lcs(Chromosome{{1, 2, 3, 4}}, Chromosome{{2, 3, 4, 5}}) == std::vector<int>{2, 3, 4});
  CHECK(lcs(Chromosome{{1, 2}}, Chromosome{{3, 4}}).empty());
}

TEST_CASE("lcs length matches the exponential oracle and is a common subsequence") {
  Rng rng(55);
  for (int trial = 0; trial < 120; ++trial) {
    const int n1 = 1 + static_cast<int>(rng.below(8));
    const int n2 = 1 + static_cast<int>(rng.below(8));
    std::vector<int> pool{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    rng.shuffle(pool);
    Chromosome p1, p2;
    p1.genes.assign(pool.begin(), pool.begin() + n1);
    rng.shuffle(pool);
    p2.genes.assign(pool.begin(), pool.begin() + n2);

    const auto seq = lcs(p1, p2);
    CHECK(testutil::is_subsequence(seq, p1.genes));
    CHECK(testutil::is_subsequence(seq, p2.genes));
    CHECK(static_cast<int>(seq.size()) ==
          testutil::lcs_length_bruteforce(p1.genes, p2.genes));
  }
}

TEST_CASE("lcs picks the lexicographically smallest match positions in the first parent") {
  // Two equal-length solutions exist; the one starting earlier in p1 wins.
  const Chromosome p1{{7, 1, 9}};
  const Chromosome p2{{9, 1, 7}};
  const LcsMatch m = lcs_match(p1, p2);
  REQUIRE(m.genes.size() == 1);
  CHECK(m.genes[0] == 7);
  CHECK(m.pos1 == std::vector<int>{0});

  // Oracle: enumerate every maximum-length common subsequence of a random
  // pair and take the smallest position vector.
  Rng rng(56);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<int> pool{0, 1, 2, 3, 4, 5, 6, 7};
    rng.shuffle(pool);
    Chromosome a, b;
    a.genes.assign(pool.begin(), pool.begin() + 6);
    rng.shuffle(pool);
    b.genes.assign(pool.begin(), pool.begin() + 6);

    const int best_len = testutil::lcs_length_bruteforce(a.genes, b.genes);
    std::vector<int> best_positions;
    const int n = static_cast<int>(a.genes.size());
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<int> sub, pos;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) {
          sub.push_back(a.genes[static_cast<std::size_t>(i)]);
          pos.push_back(i);
        }
      if (static_cast<int>(sub.size()) != best_len) continue;
      if (!testutil::is_subsequence(sub, b.genes)) continue;
      if (best_positions.empty() || pos < best_positions) best_positions = pos;
    }
    const LcsMatch m2 = lcs_match(a, b);
    CHECK(m2.pos1 == best_positions);
  }
}

TEST_CASE("lcs crossover reduces to the index variant when the lcs is empty") {
  const Repository repo = line_repo({0.0, 0.2, 0.6, 1.0});
  const Chromosome p1{{0, 1}};
  const Chromosome p2{{2, 3}};
  CHECK(lcs(p1, p2).empty());
  CHECK(dg_lcs_crossover(repo, p1, p2) == dg_index_crossover(repo, p1, p2));
}

TEST_CASE("lcs crossover avoids cutting inside the matched span") {
  // p1 = [0, 1, 2, 3]: the widest gap is inside the lcs span, the second
  // widest (index 1) is outside and must be chosen.
  const Repository repo = line_repo({0.0, 0.5, 1.4, 1.5});
  const Chromosome p1{{0, 1, 2, 3}};  // gaps: .5, .9, .1; lcs span [1..2]
  const Chromosome p2{{1, 2}};        // whole parent is the lcs
  CHECK(lcs(p1, p2) == std::vector<int>{1, 2});

  // p2 has no legal cut at all (span covers everything): parents returned.
  const auto copies = dg_lcs_crossover(repo, p1, p2);
  CHECK(copies.first == p1);
  CHECK(copies.second == p2);

  // With a longer p2 the exclusion forces p1's cut to index 1.
  const Chromosome p3{{3, 1, 2}};  // lcs [1,2] spans p3[1..2]; cut 1 allowed
  const auto got = dg_lcs_crossover(repo, p1, p3);
  const auto want = index_crossover_at(p1, p3, 1, 1);
  CHECK(got == want);
}

TEST_CASE("lcs crossover children contain the lcs as a subsequence") {
  dwsc::Dataset ds = testutil::small_dataset(63);
  Rng rng(57);
  int interesting = 0;
  for (int i = 0; i < 150; ++i) {
    const Chromosome p1 = testutil::random_feasible_chromosome(ds, rng);
    const Chromosome p2 = testutil::random_feasible_chromosome(ds, rng);
    if (p1.genes.size() < 2 || p2.genes.size() < 2) continue;
    const auto seq = lcs(p1, p2);
    if (!seq.empty()) ++interesting;
    const auto [c1, c2] = dg_lcs_crossover(ds.repo, p1, p2);
    CHECK(testutil::is_subsequence(seq, c1.genes));
    CHECK(testutil::is_subsequence(seq, c2.genes));
    CHECK(duplicate_free(c1));
    CHECK(duplicate_free(c2));
  }
  CHECK(interesting > 10);  // the sample must actually exercise the operator
}

TEST_CASE("mutate keeps a prefix and appends the rest of the repository") {
  dwsc::Dataset ds = testutil::small_dataset(64);
  Rng rng(58);
  std::set<int> full;
  for (int s = 0; s < ds.repo.n_services(); ++s) full.insert(s);

  for (int i = 0; i < 300; ++i) {
    const Chromosome base = testutil::random_feasible_chromosome(ds, rng);
    if (base.genes.empty()) continue;
    const Chromosome mutated = mutate(ds.repo, base, rng);
    CHECK(gene_set(mutated) == full);
    CHECK(duplicate_free(mutated));

    // The longest common prefix with the original must be followed purely by
    // services outside that prefix.
    std::size_t k = 0;
    while (k < base.genes.size() && k < mutated.genes.size() &&
           base.genes[k] == mutated.genes[k])
      ++k;
    std::set<int> prefix(mutated.genes.begin(), mutated.genes.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t j = k; j < mutated.genes.size(); ++j) CHECK(!prefix.count(mutated.genes[j]));
  }
}

TEST_CASE("local search: no feeders or short input returns the original") {
  testutil::ChainFixture fx;
  const NormBounds bounds = norm_bounds(fx.repo, fx.task);
  Rng rng(59);

  const Chromosome tiny{{0}};
  CHECK(local_search(fx.repo, fx.task, bounds, tiny, 10, rng) == tiny);

  // All repository services already in the chromosome: no feeders left.
  const Chromosome all{{0, 1, 2}};
  CHECK(local_search_neighborhood(fx.repo, all, 10, rng).empty());
  CHECK(local_search(fx.repo, fx.task, bounds, all, 10, rng) == all);
}

TEST_CASE("local search neighborhood: size respected, insertion at the widest gap") {
  dwsc::Dataset ds = testutil::small_dataset(65);
  Rng rng(60);
  for (int i = 0; i < 30; ++i) {
    const Chromosome base = testutil::random_feasible_chromosome(ds, rng);
    if (base.genes.size() < 2) continue;
    Rng fork = rng;  // same draws as local_search would consume
    const auto neighborhood = local_search_neighborhood(ds.repo, base, 10, fork);
    if (neighborhood.empty()) continue;
    CHECK(neighborhood.size() == 10);
    const int split = max_gap_split(ds.repo, base, 1)[0].index;
    for (const auto& n : neighborhood) {
      CHECK(n.genes.size() > base.genes.size());
      // Prefix and suffix of the original remain in place.
      for (int j = 0; j < split; ++j) CHECK(n.genes[static_cast<std::size_t>(j)] == base.genes[static_cast<std::size_t>(j)]);
      const std::size_t inserted = n.genes.size() - base.genes.size();
      for (std::size_t j = static_cast<std::size_t>(split); j < base.genes.size(); ++j)
        CHECK(n.genes[j + inserted] == base.genes[j]);
      CHECK(duplicate_free(n));
    }
  }
}

TEST_CASE("local search never returns a worse chromosome and matches the evaluated minimum") {
  dwsc::Dataset ds = testutil::small_dataset(66);
  const NormBounds bounds = norm_bounds(ds.repo, ds.task);
  Rng rng(61);
  for (int i = 0; i < 40; ++i) {
    const Chromosome base = testutil::random_feasible_chromosome(ds, rng);
    if (base.genes.size() < 2) continue;

    Rng search_rng = rng;   // the search consumes these draws
    Rng replay_rng = rng;   // the oracle replays the identical neighborhood
    const Chromosome chosen = local_search(ds.repo, ds.task, bounds, base, 10, search_rng);
    const auto neighborhood = local_search_neighborhood(ds.repo, base, 10, replay_rng);
    rng = search_rng;  // keep the outer stream moving

    auto eval = [&](const Chromosome& c) {
      return fitness(ds.repo, ds.task, backward_decode(ds.repo, ds.task, c).dag, bounds).fitness;
    };
    const double base_fit = eval(base);
    const double chosen_fit = eval(chosen);
    CHECK(chosen_fit <= base_fit);

    double best = base_fit;
    for (const auto& n : neighborhood) best = std::min(best, eval(n));
    CHECK(chosen_fit == best);
  }
}

TEST_CASE("distance-guided operators are rng-free and index crossover replays its draws") {
  dwsc::Dataset ds = testutil::small_dataset(67);
  Rng rng(62);
  for (int i = 0; i < 25; ++i) {
    const Chromosome p1 = testutil::random_feasible_chromosome(ds, rng);
    const Chromosome p2 = testutil::random_feasible_chromosome(ds, rng);
    if (p1.genes.size() < 2 || p2.genes.size() < 2) continue;

    CHECK(dg_index_crossover(ds.repo, p1, p2) == dg_index_crossover(ds.repo, p1, p2));
    CHECK(dg_two_point_crossover(ds.repo, p1, p2) == dg_two_point_crossover(ds.repo, p1, p2));
    CHECK(dg_lcs_crossover(ds.repo, p1, p2) == dg_lcs_crossover(ds.repo, p1, p2));

    Rng a = rng;
    Rng b = rng;
    CHECK(index_crossover(p1, p2, a) == index_crossover(p1, p2, b));
  }
}
